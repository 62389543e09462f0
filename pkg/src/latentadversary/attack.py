#Latent Adversary - generative adversarial training at desk scale
#
#Copyright (c) 2026 The Latent Adversary developers
#
#Permission is hereby granted, free of charge, to any person obtaining a copy
#of this software and associated documentation files (the "Software"), to deal
#in the Software without restriction, including without limitation the rights
#to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
#copies of the Software, and to permit persons to whom the Software is
#furnished to do so, subject to the following conditions:
#
#The above copyright notice and this permission notice shall be included in all
#copies or substantial portions of the Software.
#
#THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
#IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
#OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
#SOFTWARE.

"""
This module defines the iterative sign-gradient attacks on the style and
noise variables of a generator
"""
import json
import logging
from collections import OrderedDict

import numpy as np

from latentadversary import ConfigError, NumericalError
from latentadversary.config import Options
from latentadversary.criteria import MODES, make_criterion, least_likely
from latentadversary.groups import LayerGroup, VARIABLES
from latentadversary.tensor import Graph, Tensor, softmax_cross_entropy, get_dtype
from latentadversary.workers import parallel_map

logger = logging.getLogger(__name__)

MODE_DEFAULTS = {
    'targeted' : {'epsilon' : 0.005},
}
"step sizes that differ from the defaults in some attack modes"

class AttackConfig(Options):
    """
    Settings of a latent attack. Layer groups are strings 'lo:hi' or None
    for all layers; target is a class index, 'random' or None.
    """
    section = 'attack'
    defaults = OrderedDict([
        ('mode','nontargeted'),
        ('variables','both'),
        ('epsilon',0.004),
        ('delta',0.2),
        ('max_iters',50),
        ('style_layers',None),
        ('noise_layers',None),
        ('target',None),
        ('seed',0),
    ])

    def __init__(self,**kwargs):
        mode = kwargs.get('mode',self.defaults['mode'])
        for name,value in MODE_DEFAULTS.get(mode,{}).items():
            kwargs.setdefault(name,value)
        Options.__init__(self,**kwargs)

    def validate(self):
        self.require(self.mode in MODES,'mode',"Unknown attack mode: %s" % self.mode)
        self.require(self.variables in VARIABLES,'variables',
                     "Unknown variable set: %s" % self.variables)
        self.require(self.epsilon >= 0,'epsilon',"must not be negative")
        self.require(self.delta >= 0,'delta',"must not be negative")
        self.require(int(self.max_iters) == self.max_iters and self.max_iters >= 1,
                     'max_iters',"must be an integer of at least 1")
        if self.mode == 'targeted':
            self.require(self.target is not None,'target',"targeted mode needs a target")
        if self.target is not None and self.target != 'random':
            self.require(int(self.target) >= 0,'target',"must not be negative")
        for name in ('style_layers','noise_layers'):
            if getattr(self,name) is not None:
                LayerGroup.parse(getattr(self,name))

    def check_target(self,classes):
        """
        Check a fixed target against the number of classes

        :raises ConfigError: if the target is not in [0,classes)
        """
        if self.target is not None and self.target != 'random':
            self.require(int(self.target) < classes,'target',
                         "target %d outside [0,%d)" % (int(self.target),classes))

    def style_group(self,num_layers):
        return self._group(self.style_layers,num_layers)

    def noise_group(self,num_layers):
        return self._group(self.noise_layers,num_layers)

    def _group(self,text,num_layers):
        if text is None:
            return LayerGroup.everything(num_layers)
        return LayerGroup.parse(text,num_layers)

    @property
    def updates_style(self):
        return self.variables in ('style','both')

    @property
    def updates_noise(self):
        return self.variables in ('noise','both')

class AttackOutcome(object):
    """
    Result of one latent attack.
    """
    def __init__(self,state,image,label,original_prediction,final_prediction,
                 fooled,iterations_used,trajectory,target=None,seed=None):
        self.state = state
        "final LatentState"
        self.image = image
        "final image as array (3,H,W)"
        self.label = int(label)
        "ground truth label"
        self.original_prediction = int(original_prediction)
        "prediction for the initial latents"
        self.final_prediction = int(final_prediction)
        "prediction for the final latents"
        self.fooled = bool(fooled)
        "whether the success predicate holds for the final prediction"
        self.iterations_used = int(iterations_used)
        "number of update steps taken"
        self.trajectory = trajectory
        "list of dictionaries with iteration, loss and prediction"
        self.target = target
        "class the loss was taken against"
        self.seed = seed
        "latent seed of the sample, if drawn from a seed"

    def to_record(self,config=None):
        """
        JSON-lines record of this outcome

        :param AttackConfig config: config whose hash is included
        :rtype: OrderedDict
        """
        return OrderedDict([
            ('config_hash',None if config is None else config.hash()),
            ('seed',self.seed),
            ('label',self.label),
            ('target',self.target),
            ('original_prediction',self.original_prediction),
            ('final_prediction',self.final_prediction),
            ('fooled',self.fooled),
            ('iterations',self.iterations_used),
            ('predictions',[t['prediction'] for t in self.trajectory]),
            ('losses',[t['loss'] for t in self.trajectory]),
        ])

    def __repr__(self):
        return "AttackOutcome(label=%d, prediction=%d, fooled=%s, iterations=%d)" % \
            (self.label,self.final_prediction,self.fooled,self.iterations_used)

def _batched(arrays):
    return [Tensor(a[None]) for a in arrays]

def evaluate(state,classifier,generator,target=None,with_grads=True):
    """
    One forward pass through generator and classifier, and optionally the
    gradients of the cross entropy against target.

    :param LatentState state: latents of a single image
    :param target: class for the loss; None for the least likely class of
                   this very prediction
    :returns: dictionary with image, probs, target, loss, style_grads and
              noise_grads
    :raises NumericalError: if a gradient is not finite
    """
    styles,noises = _batched(state.styles),_batched(state.noises)
    with Graph() as graph:
        if with_grads:
            for t in styles + noises:
                graph.watch(t)
        image = generator.synthesize(styles,noises)
        logits = classifier.logits(image)
        z = logits.data[0].astype(np.float64)
        probs = np.exp(z - z.max())
        probs /= probs.sum()
        if target is None:
            target = least_likely(probs)
        loss = softmax_cross_entropy(logits,[target])
        result = {
            'image' : image.data[0],
            'probs' : probs,
            'target' : int(target),
            'loss' : float(loss.data),
        }
        if with_grads:
            try:
                grads = graph.backward(loss,styles + noises)
            except NumericalError as e:
                raise NumericalError("attack gradient is not finite: %s" % e,
                                     {'target' : target,'loss' : float(loss.data)})
            result['style_grads'] = [grads[t].data[0] for t in styles]
            result['noise_grads'] = [grads[t].data[0] for t in noises]
    return result

def apply_step(state,style_grads,noise_grads,config,direction=-1.):
    """
    Sign-gradient update of the in-group latents.

    Style coordinates change by exactly 0 or +-epsilon, noise coordinates by
    0 or +-delta. Latents outside the groups or outside the variable set are
    copied unchanged.

    :param LatentState state: current latents
    :param float direction: -1 to descend the loss, +1 to ascend it
    :rtype: LatentState
    """
    new = state.copy()
    num_layers = state.num_layers
    if config.updates_style and config.epsilon > 0:
        for l in config.style_group(num_layers):
            step = direction*config.epsilon*np.sign(style_grads[l])
            new.styles[l] = (state.styles[l] + step).astype(get_dtype())
    if config.updates_noise and config.delta > 0:
        for l in config.noise_group(num_layers):
            step = direction*config.delta*np.sign(noise_grads[l])
            new.noises[l] = (state.noises[l] + step).astype(get_dtype())
    return new

def nontargeted_step(state,config,classifier,generator,target=None):
    """
    One step towards the least likely class,
    y <- y - epsilon*sign(grad_y J(F(g(y,eta)),ll)), and likewise for eta
    with delta.

    :param target: frozen least likely class; None to take it from the
                   prediction for state
    :rtype: LatentState
    """
    result = evaluate(state,classifier,generator,target)
    return apply_step(state,result['style_grads'],result['noise_grads'],config,-1.)

def targeted_step(state,config,classifier,generator,target=None):
    """
    One step towards a target class, defaults to config.target

    :rtype: LatentState
    """
    target = config.target if target is None else target
    if target is None or target == 'random':
        raise ConfigError('attack.target',"targeted step needs a class index")
    result = evaluate(state,classifier,generator,int(target))
    return apply_step(state,result['style_grads'],result['noise_grads'],config,-1.)

def run_attack(initial,label,config,classifier,generator,target=None,seed=None):
    """
    Iterate sign-gradient steps until the success predicate holds or
    max_iters steps were taken.

    The predicate is checked before every step, so an initial image that is
    already misclassified gives iterations_used=0. The least likely class is
    fixed from the initial prediction.

    :param LatentState initial: starting latents
    :param int label: ground truth label, the generator's class
    :param AttackConfig config: attack settings
    :param int target: target class for the targeted mode, overrides
                       config.target
    :rtype: AttackOutcome
    :raises ConfigError: for an invalid target
    :raises NumericalError: if a gradient is not finite
    """
    initial.validate(generator.schema)
    if target is None and config.mode == 'targeted':
        target = config.target
    criterion = make_criterion(config.mode,label,target,classifier.classes)
    state = initial.copy()
    trajectory = []
    fooled = False
    original = None
    for iteration in range(config.max_iters + 1):
        last = iteration == config.max_iters
        try:
            result = evaluate(state,classifier,generator,criterion.target,with_grads=not last)
        except NumericalError as e:
            e.diagnostic.update(iteration=iteration,label=label,seed=seed)
            raise
        if criterion.target is None:
            criterion.start(result['probs'])
        prediction = int(np.argmax(result['probs']))
        if original is None:
            original = prediction
        trajectory.append(OrderedDict([('iteration',iteration),('loss',result['loss']),
                                       ('prediction',prediction)]))
        if criterion.satisfied(prediction):
            fooled = True
            break
        if last:
            break
        state = apply_step(state,result['style_grads'],result['noise_grads'],config,criterion.direction)
    logger.debug("Attack on label %d: fooled=%s after %d iterations",label,fooled,iteration)
    return AttackOutcome(state,result['image'],label,original,prediction,fooled,iteration,
                         trajectory,criterion.target,seed)

def draw_latent(generators,seed):
    """
    Draw a class uniformly and a latent of that class's generator

    :param sequence generators: per-class generators, generator i draws class i
    :param int seed: sample seed
    :returns: tuple of label and LatentState
    """
    label = int(np.random.default_rng([seed,5]).integers(len(generators)))
    return label,generators[label].sample_latent(seed)

def draw_target(config,seed,label,classes):
    """
    Target class of a sample: config.target, or a class other than label
    drawn uniformly when config.target is 'random'
    """
    if config.mode != 'targeted':
        return None
    if config.target == 'random':
        others = [c for c in range(classes) if c != label]
        return int(np.random.default_rng([config.seed,seed,3]).choice(others))
    return int(config.target)

def batch_attack(seeds,config,classifier,generators,threads=1):
    """
    Attack one generated sample per seed. Attacks are independent and run
    on a thread pool against the shared, frozen models.

    :param sequence seeds: latent seeds; samples whose label equals a fixed
                           target are skipped
    :param int threads: worker threads
    :rtype: list of AttackOutcomes in seed order
    :raises ConfigError: for a fixed target outside the classifier's classes
    """
    config.check_target(classifier.classes)

    def one(seed):
        label,state = draw_latent(generators,seed)
        target = draw_target(config,seed,label,classifier.classes)
        if target == label:
            return None
        return run_attack(state,label,config,classifier,generators[label],target,seed)

    outcomes = [o for o in parallel_map(one,seeds,threads,desc='attack') if o is not None]
    if len(outcomes) < len(seeds):
        logger.info("Skipped %d samples whose label is the target",len(seeds) - len(outcomes))
    stats = attack_stats(outcomes)
    logger.info("Attacked %d samples, fooling rate %.3f",len(outcomes),stats['fooling_rate'])
    return outcomes

def attack_stats(outcomes):
    """
    Fooling rate over all outcomes, and mean and standard deviation of the
    iterations over the fooled outcomes only. Mean and std are None when no
    outcome fooled the model.

    :rtype: OrderedDict
    """
    iterations = np.array([o.iterations_used for o in outcomes if o.fooled],dtype=float)
    total = len(outcomes)
    stats = OrderedDict([
        ('count',total),
        ('fooled',int(iterations.size)),
        ('fooling_rate',iterations.size/total if total else 0.),
        ('mean_iterations',None),
        ('std_iterations',None),
    ])
    if iterations.size:
        stats['mean_iterations'] = float(iterations.mean())
        stats['std_iterations'] = float(iterations.std())
    return stats

def export_outcomes(outcomes,filename,config=None):
    """
    Write one JSON-lines record per outcome
    """
    with open(filename,'w') as fid:
        for outcome in outcomes:
            fid.write(json.dumps(outcome.to_record(config)) + '\n')
    logger.info("Wrote %d attack records to %s",len(outcomes),filename)

def read_outcome_records(filename):
    "read back the records written by export_outcomes"
    with open(filename) as fid:
        return [json.loads(line,object_pairs_hook=OrderedDict) for line in fid if line.strip()]

def sweep_steps(seeds,config,classifier,generators,epsilons,deltas,threads=1):
    """
    Fooling rate and mean iterations for a grid of step sizes, for
    calibrating epsilon and delta to a generator's latent scale.

    :rtype: list of OrderedDicts
    """
    rows = []
    for epsilon in epsilons:
        for delta in deltas:
            cfg = config.replace(epsilon=epsilon,delta=delta)
            stats = attack_stats(batch_attack(seeds,cfg,classifier,generators,threads))
            row = OrderedDict([('epsilon',epsilon),('delta',delta),('config_hash',cfg.hash())])
            row.update(stats)
            rows.append(row)
            logger.info("epsilon %g delta %g: fooling rate %.3f",epsilon,delta,stats['fooling_rate'])
    return rows
