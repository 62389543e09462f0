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
This module defines the training loops: plain training, adversarial
training with latent attacks against the current model, and the baseline
defenses trained with pixel attacks
"""
import logging
from collections import OrderedDict, deque

import numpy as np

from latentadversary import ConfigError, AcceptanceError
from latentadversary.attack import AttackConfig, batch_attack
from latentadversary.config import Options, parse_ratio
from latentadversary.groups import LayerSchedule
from latentadversary.nn import SGD
from latentadversary.pixel import PixelAttackConfig, pixel_attack
from latentadversary.segattack import SegAttackConfig, run_seg_attack
from latentadversary.tensor import Graph, softmax_cross_entropy,\
    pixelwise_softmax_cross_entropy, get_dtype
from latentadversary.workers import progress

logger = logging.getLogger(__name__)

ATTACK_KINDS = ('gat','pgd','spatial','recolor','ifgsm-capped')
"attacks that can produce the adversarial part of a batch"

class TrainConfig(Options):
    """
    Settings of a training run. ratio is 'clean:adversarial'; threshold is
    the largest number of attack iterations a kept adversarial sample may
    need.
    """
    section = 'train'
    defaults = OrderedDict([
        ('epochs',30),
        ('batch_size',64),
        ('ratio','1:1'),
        ('threshold',10),
        ('attack','gat'),
        ('ifgsm_steps',2),
        ('group_width',2),
        ('lr',0.01),
        ('momentum',0.9),
        ('weight_decay',0.),
        ('retry_factor',5),
        ('acceptance_window',500),
        ('min_acceptance',0.01),
        ('eval_batch_size',200),
        ('seed',0),
    ])

    def validate(self):
        self.require(int(self.epochs) >= 1,'epochs',"must be at least 1")
        self.require(int(self.batch_size) >= 1,'batch_size',"must be at least 1")
        self.require(parse_ratio(self.ratio)[0] > 0,'ratio',"every batch needs clean samples")
        self.require(int(self.threshold) >= 0,'threshold',"must not be negative")
        self.require(self.attack in ATTACK_KINDS,'attack',"Unknown attack kind: %s" % self.attack)
        self.require(int(self.ifgsm_steps) >= 1,'ifgsm_steps',"must be at least 1")
        self.require(int(self.group_width) >= 1,'group_width',"must be at least 1")
        self.require(self.lr > 0,'lr',"must be positive")
        self.require(int(self.retry_factor) >= 1,'retry_factor',"must be at least 1")
        self.require(0 <= self.min_acceptance <= 1,'min_acceptance',"must lie in [0,1]")

    def split(self):
        "number of clean and adversarial samples per batch"
        clean,adv = parse_ratio(self.ratio)
        n_adv = int(round(self.batch_size*adv/float(clean + adv)))
        if adv and not n_adv:
            n_adv = 1
        return self.batch_size - n_adv,n_adv

    def adversarial_count(self,n_clean):
        """
        Size of the adversarial part that goes with a clean part of n_clean
        samples. Full batches use :meth:`split`; the short last batch of an
        epoch is scaled by the ratio.
        """
        full_clean,full_adv = self.split()
        if not full_adv or n_clean == full_clean:
            return full_adv
        clean,adv = parse_ratio(self.ratio)
        return max(1,int(round(n_clean*adv/float(clean))))

class TrainRun(object):
    """
    Per-epoch record of a training run.
    """
    def __init__(self,config):
        self.config = config
        "TrainConfig of the run"
        self.config_hash = config.hash()
        "hash of the resolved config"
        self.epochs = []
        "list of per-epoch dictionaries"
        self.checkpoint = None
        "path of the final checkpoint, once saved"

    def add_epoch(self,**values):
        record = OrderedDict([('epoch',len(self.epochs))])
        record.update(sorted(values.items()))
        self.epochs.append(record)
        return record

    def _column(self,name):
        return [e[name] for e in self.epochs if e.get(name) is not None]

    @property
    def clean_accuracy(self):
        return self._column('clean_accuracy')

    @property
    def adversarial_accuracy(self):
        return self._column('adversarial_accuracy')

    @property
    def acceptance_rate(self):
        return self._column('acceptance_rate')

    @property
    def test_accuracy(self):
        return self._column('test_accuracy')

    def curves(self):
        "metric names to per-epoch lists"
        names = []
        for e in self.epochs:
            names.extend(n for n in e if n != 'epoch' and n not in names)
        return OrderedDict((n,[e.get(n) for e in self.epochs]) for n in names)

    def metadata(self):
        "record stored in checkpoints"
        final = self.epochs[-1] if self.epochs else {}
        trained_against = self.config.attack if self.config.split()[1] else None
        return OrderedDict([('seed',self.config.seed),('epochs',len(self.epochs)),
                            ('trained_against',trained_against),
                            ('config_hash',self.config_hash),('final',final)])

    def to_dict(self):
        return OrderedDict([
            ('config',self.config.to_dict()),
            ('config_hash',self.config_hash),
            ('seed',self.config.seed),
            ('epochs',self.epochs),
            ('checkpoint',self.checkpoint),
        ])

    def __len__(self):
        return len(self.epochs)

class _ClassifierTask(object):
    name = 'classifier'

    def targets(self,dataset,idx):
        return dataset.labels[idx]

    def loss(self,logits,targets):
        return softmax_cross_entropy(logits,targets)

    def hits(self,logits,targets):
        return int((np.argmax(logits,axis=1) == targets).sum()),len(targets)

    def predict(self,model,x):
        return model.predict(x)

class _SegmenterTask(object):
    name = 'segmenter'

    def targets(self,dataset,idx):
        return dataset.layouts[idx].astype(int)

    def loss(self,logits,targets):
        return pixelwise_softmax_cross_entropy(logits,targets)

    def hits(self,logits,targets):
        return int((np.argmax(logits,axis=1) == targets).sum()),targets.size

    def predict(self,model,x):
        return model.predict(x)

def evaluate_task(task,model,dataset,batch_size=200):
    "accuracy of a classifier, or pixel accuracy of a segmenter, on a dataset"
    hits,total = 0,0
    for start in range(0,len(dataset),batch_size):
        idx = np.arange(start,min(start + batch_size,len(dataset)))
        targets = task.targets(dataset,idx)
        hits += int((task.predict(model,dataset.images[idx]) == targets).sum())
        total += targets.size
    return hits/float(total) if total else 0.

def _fit(task,model,train,config,adversary=None,test=None):
    n_clean,n_adv = config.split()
    if n_adv and adversary is None:
        raise ConfigError('train.ratio',"adversarial parts need an attack")
    data_rng = np.random.default_rng([config.seed,101])
    adv_rng = np.random.default_rng([config.seed,202])
    opt = SGD(model.parameters(),config.lr,config.momentum,config.weight_decay)
    run = TrainRun(config)
    batch_index = 0
    logger.info("Training %s for %d epochs, %d clean and %d adversarial samples per batch",
                task.name,config.epochs,n_clean,n_adv)
    for epoch in range(config.epochs):
        clean_hits = clean_total = adv_hits = adv_total = skipped = 0
        losses = []
        if adversary is not None:
            adversary.reset_epoch()
        for idx in progress(list(train.batches(n_clean,data_rng)),'epoch %d' % epoch):
            x = train.images[idx]
            y = task.targets(train,idx)
            count = len(idx)
            if n_adv:
                adv_x,adv_y = adversary(model,config.adversarial_count(count),batch_index,adv_rng)
                if not len(adv_x):
                    logger.warning("No adversarial samples for batch %d, skipping the step",batch_index)
                    skipped += 1
                    batch_index += 1
                    continue
                x = np.concatenate([x,adv_x.astype(x.dtype)])
                y = np.concatenate([y,adv_y])
            with Graph() as graph:
                model.watch(graph)
                logits = model.logits(x.astype(get_dtype()))
                loss = task.loss(logits,y)
                grads = graph.backward(loss,model.parameters())
            opt.step(grads)
            h,t = task.hits(logits.data[:count],y[:count])
            clean_hits,clean_total = clean_hits + h,clean_total + t
            if len(y) > count:
                h,t = task.hits(logits.data[count:],y[count:])
                adv_hits,adv_total = adv_hits + h,adv_total + t
            losses.append(float(loss.data))
            batch_index += 1
        record = run.add_epoch(
            loss=float(np.mean(losses)) if losses else None,
            clean_accuracy=clean_hits/float(clean_total) if clean_total else None,
            adversarial_accuracy=adv_hits/float(adv_total) if adv_total else None,
            acceptance_rate=adversary.epoch_acceptance() if adversary is not None else None,
            test_accuracy=evaluate_task(task,model,test,config.eval_batch_size) if test is not None else None,
            skipped_batches=skipped,
        )
        logger.info("epoch %d: %s",epoch,", ".join("%s %.4f" % (k,v) for k,v in record.items()
                                                   if k != 'epoch' and v is not None))
    return run

def fit_classifier(model,train,config,test=None,adversary=None):
    """
    Train a classifier with SGD, optionally mixing adversarial samples into
    every batch.

    :param Classifier model: model to train in place
    :param Dataset train: training data
    :param TrainConfig config: schedule and batch composition
    :param Dataset test: evaluated after every epoch if given
    :param adversary: callable producing adversarial samples
    :rtype: TrainRun
    """
    return _fit(_ClassifierTask(),model,train,config,adversary,test)

def fit_segmenter(model,train,config,test=None,adversary=None):
    "like fit_classifier, with per-pixel cross entropy against the layouts"
    if train.layouts is None:
        raise ValueError("Segmenter training needs a dataset with layouts")
    return _fit(_SegmenterTask(),model,train,config,adversary,test)

class _Adversary(object):
    def __init__(self):
        self.accepted = 0
        self.attempts = 0

    def reset_epoch(self):
        self.accepted = 0
        self.attempts = 0

    def epoch_acceptance(self):
        return self.accepted/float(self.attempts) if self.attempts else None

def _pad(items,count):
    "repeat items cyclically up to count"
    return [items[i % len(items)] for i in range(count)] if items else []

class GatAdversary(_Adversary):
    """
    Source of latent adversarial samples against the current model, with the
    iteration-cap filter and a rotating layer-group schedule.
    """
    def __init__(self,generators,attack_config,config,threads=1):
        _Adversary.__init__(self)
        self.generators = generators
        self.attack_config = attack_config
        self.config = config
        self.threads = threads
        self.schedule = LayerSchedule.consecutive(generators[0].num_layers,config.group_width)
        self.window = deque(maxlen=config.acceptance_window)

    def __call__(self,model,count,batch_index,rng):
        outcomes,attempts = generate_gat_batch(model,self.generators,self.attack_config,self.config,
                                               count,batch_index,rng,self.threads)
        self.accepted += len(outcomes)
        self.attempts += attempts
        self.window.extend([1]*len(outcomes) + [0]*(attempts - len(outcomes)))
        if len(self.window) == self.window.maxlen:
            rate = float(np.mean(self.window))
            if rate < self.config.min_acceptance:
                raise AcceptanceError("acceptance rate %.4f over the last %d attempts is below %.4f" %
                                      (rate,len(self.window),self.config.min_acceptance),rate)
        if len(outcomes) < count:
            logger.warning("Only %d of %d adversarial samples accepted in batch %d",
                           len(outcomes),count,batch_index)
        outcomes = _pad(outcomes,count)
        if not outcomes:
            return np.zeros((0,3,32,32),dtype=get_dtype()),np.zeros(0,dtype=int)
        return np.stack([o.image for o in outcomes]),np.array([o.label for o in outcomes])

def generate_gat_batch(model,generators,attack_config,config,count,batch_index=0,rng=None,threads=1):
    """
    Draw latent adversarial samples against the current model state.

    Samples are drawn class first, then latent. Each is attacked with the
    layer group and variable set the schedule assigns to this batch, and
    kept only if it fools the model within config.threshold iterations.
    Rejected samples are redrawn, up to retry_factor times count attempts.

    :param Classifier model: the model being trained
    :param sequence generators: per-class generators
    :param AttackConfig attack_config: step sizes and mode
    :param TrainConfig config: threshold, schedule and retry settings
    :param int count: requested number of samples
    :param int batch_index: running batch index, selects the schedule slot
    :param rng: numpy Generator for the latent seeds
    :returns: tuple of the accepted AttackOutcomes (labels are the
              generators' classes) and the number of attempts
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    schedule = LayerSchedule.consecutive(generators[0].num_layers,config.group_width)
    group,variables = schedule[batch_index]
    threshold = int(config.threshold)
    cfg = attack_config.replace(variables=variables,style_layers=str(group),
                                noise_layers=str(group),max_iters=max(threshold,1))
    accepted = []
    attempts = 0
    cap = config.retry_factor*count
    while len(accepted) < count and attempts < cap:
        need = min(count - len(accepted),cap - attempts)
        seeds = [int(s) for s in rng.integers(2**31,size=need)]
        for outcome in batch_attack(seeds,cfg,model,generators,threads):
            if outcome.fooled and outcome.iterations_used <= threshold:
                accepted.append(outcome)
        attempts += need
    logger.debug("batch %d: %s layers %s, accepted %d of %d",batch_index,variables,group,
                 len(accepted),attempts)
    return accepted[:count],attempts

class PixelAdversary(_Adversary):
    """
    Source of pixel-space adversarial samples: training images attacked
    against the current model.
    """
    def __init__(self,train,pixel_config):
        _Adversary.__init__(self)
        self.train = train
        self.pixel_config = pixel_config

    def __call__(self,model,count,batch_index,rng):
        idx = rng.integers(len(self.train),size=count)
        labels = self.train.labels[idx]
        adv = pixel_attack(self.train.images[idx],labels,model,self.pixel_config)
        self.accepted += count
        self.attempts += count
        return adv,labels

class SegAdversary(_Adversary):
    """
    Source of adversarial segmentation samples: the first iterations of the
    modulation attack from training layouts.
    """
    def __init__(self,train,spade,seg_config):
        _Adversary.__init__(self)
        self.train = train
        self.spade = spade
        self.seg_config = seg_config.replace(record_every=1)

    def __call__(self,model,count,batch_index,rng):
        per_layout = self.seg_config.iterations
        starts = -(-count//per_layout)
        idx = rng.integers(len(self.train),size=starts)
        layouts = self.train.layouts[idx].astype(int)
        z = rng.standard_normal((starts,self.spade.config.latent_dim)).astype(get_dtype())
        trajectory = run_seg_attack(layouts,z,self.seg_config,model,self.spade)
        images = np.concatenate([r['image'] for r in trajectory.records[1:]])
        maps = np.concatenate([layouts for _ in trajectory.records[1:]])
        self.accepted += count
        self.attempts += count
        return images[:count],maps[:count].astype(np.uint8)

def adversarial_train(model,train,generators,config,attack_config=None,test=None,threads=1):
    """
    Train a classifier on batches of clean images and latent adversarial
    samples generated against the current model.

    :param Classifier model: model to train in place
    :param Dataset train: clean training data
    :param sequence generators: per-class generators
    :param TrainConfig config: training settings
    :param AttackConfig attack_config: latent attack settings
    :param Dataset test: evaluated after every epoch if given
    :rtype: TrainRun
    :raises AcceptanceError: if the filter stops accepting samples
    """
    attack_config = attack_config or AttackConfig()
    adversary = GatAdversary(generators,attack_config,config,threads) if config.split()[1] else None
    return fit_classifier(model,train,config,test,adversary)

def baseline_pixel_config(kind,config,pixel_config=None):
    """
    Pixel attack settings of a baseline defense. pixel_config is used when
    it is of the matching kind, otherwise the kind's defaults apply.
    """
    base = 'ifgsm' if kind == 'ifgsm-capped' else kind
    if pixel_config is None or pixel_config.kind != base:
        seed = config.seed if pixel_config is None else pixel_config.seed
        pixel_config = PixelAttackConfig.for_kind(base,seed=seed)
    if kind == 'ifgsm-capped':
        return pixel_config.replace(iterations=config.ifgsm_steps,random_start=False)
    return pixel_config

def baseline_adv_train(model,train,kind,config,pixel_config=None,test=None):
    """
    Train a classifier with a pixel-space attack producing the adversarial
    part of every batch.

    :param str kind: pgd, spatial, recolor or ifgsm-capped
    :param PixelAttackConfig pixel_config: attack settings; for ifgsm-capped
                                           the iterations are config.ifgsm_steps
    :rtype: TrainRun
    :raises ValueError: for unknown kinds
    """
    if kind not in ATTACK_KINDS or kind == 'gat':
        raise ValueError("Unknown baseline attack: %s" % kind)
    adversary = None
    if config.split()[1]:
        adversary = PixelAdversary(train,baseline_pixel_config(kind,config,pixel_config))
    return fit_classifier(model,train,config.replace(attack=kind),test,adversary)

def seg_adversarial_train(model,train,spade,config,seg_config=None,test=None):
    """
    Train a segmenter on clean pairs and modulation attack outputs of
    iterations 1 to seg_config.iterations per starting layout.

    :rtype: TrainRun
    """
    seg_config = seg_config or SegAttackConfig()
    adversary = SegAdversary(train,spade,seg_config) if config.split()[1] else None
    return fit_segmenter(model,train,config,test,adversary)

def seg_pixel_accuracy(model,dataset,batch_size=200):
    "pixel accuracy of a segmenter on a dataset with layouts"
    return evaluate_task(_SegmenterTask(),model,dataset,batch_size)
