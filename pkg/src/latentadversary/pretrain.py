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
This module defines the pretraining drivers for the generators, the
classifier, the segmenter and the layout conditioned generator, together
with their quality gates
"""
import logging
from collections import OrderedDict

import numpy as np

from latentadversary import ConfigError, GateError
from latentadversary.config import Options
from latentadversary.models import StyleGenerator, Discriminator, Classifier,\
    Segmenter, SpadeGenerator, RESOLUTIONS
from latentadversary.nn import Adam
from latentadversary.tensor import Graph, Tensor, softplus, reduce_mean, sub,\
    power, as_tensor, get_dtype
from latentadversary.training import fit_classifier, fit_segmenter
from latentadversary.workers import progress

logger = logging.getLogger(__name__)

class PretrainConfig(Options):
    """
    Settings of the generator pretraining and the acceptance gates
    """
    section = 'pretrain'
    defaults = OrderedDict([
        ('gan_steps',3000),
        ('gan_batch_size',32),
        ('gan_lr',2e-3),
        ('gan_betas',[0.,0.99]),
        ('r1_gamma',10.),
        ('r1_every',4),
        ('r1_step',1e-2),
        ('generator',OrderedDict()),
        ('discriminator',OrderedDict()),
        ('gate_samples',200),
        ('gate_discriminator_accuracy',0.8),
        ('gate_class_consistency',0.9),
        ('gate_classifier_accuracy',0.95),
        ('gate_pixel_accuracy',0.9),
        ('spade_steps',2000),
        ('spade_batch_size',32),
        ('spade_lr',2e-3),
        ('spade',OrderedDict()),
        ('classifier',OrderedDict()),
        ('segmenter',OrderedDict()),
        ('seed',0),
    ])

    def validate(self):
        for name in ('gan_steps','gan_batch_size','r1_every','gate_samples',
                     'spade_steps','spade_batch_size'):
            self.require(int(getattr(self,name)) >= 1,name,"must be at least 1")
        self.require(self.r1_gamma >= 0,'r1_gamma',"must not be negative")
        self.require(self.r1_step > 0,'r1_step',"must be positive")
        self.require(len(self.gan_betas) == 2,'gan_betas',"expected two values")

def _unit_noise(rng,batch):
    return [rng.standard_normal((batch,r,r)).astype(get_dtype()) for r in RESOLUTIONS]

def _latents(rng,generator,batch):
    return rng.standard_normal((batch,generator.config.latent_dim)).astype(get_dtype())

def _param_grads(disc,x):
    "gradients of sum(D(x)) with respect to the discriminator parameters"
    params = disc.parameters()
    with Graph() as graph:
        disc.watch(graph)
        grads = graph.backward(disc(x).sum(),params)
    return [grads[p].data for p in params]

def r1_gradients(disc,real,gamma,step=1e-2):
    """
    Gradients of the R1 penalty gamma/2 * mean ||grad_x D(x)||^2 with
    respect to the discriminator parameters. The mixed second derivative is
    taken as a central difference of parameter gradients along the input
    gradient direction.

    :param Discriminator disc: the discriminator
    :param real: batch of real images
    :param float gamma: penalty weight
    :param float step: finite difference step along the normalized direction
    :returns: tuple of the penalty value and a dictionary of parameter
              tensors to gradient arrays
    """
    x = Tensor(real)
    with Graph() as graph:
        graph.watch(x)
        v = graph.backward(disc(x).sum(),[x])[x].data
    n = real.shape[0]
    penalty = 0.5*gamma*float((v.astype(np.float64)**2).sum())/n
    norm = float(np.sqrt((v.astype(np.float64)**2).sum()))
    params = disc.parameters()
    if norm == 0:
        return penalty,dict((p,np.zeros(p.shape)) for p in params)
    u = v/norm
    plus = _param_grads(disc,real + step*u)
    minus = _param_grads(disc,real - step*u)
    factor = gamma*norm/(2*step*n)
    return penalty,dict((p,factor*(a - b)) for p,a,b in zip(params,plus,minus))

def discriminator_accuracy(disc,real,fake):
    "fraction of real images scored positive and fake images scored negative"
    hits = np.concatenate([disc(real).data > 0,disc(fake).data <= 0])
    return float(hits.mean())

def class_consistency(generator,classifier,samples,seed=0,batch_size=50):
    """
    Fraction of generated images classified as the generator's class

    :rtype: float
    """
    predictions = []
    for start in range(0,samples,batch_size):
        states = [generator.sample_latent([seed,i]) for i in range(start,min(start + batch_size,samples))]
        styles = [np.stack([s.styles[l] for s in states]) for l in range(generator.num_layers)]
        noises = [np.stack([s.noises[l] for s in states]) for l in range(generator.num_layers)]
        predictions.append(classifier.predict(generator.synthesize(styles,noises)))
    return float(np.mean(np.concatenate(predictions) == generator.class_index))

def pretrain_generator(label,train,config,classifier=None,holdout=None,gate=True):
    """
    Train the style-based generator of one class with the non-saturating GAN
    objective and an R1 penalty on the discriminator.

    :param int label: class index of the generator
    :param Dataset train: images of this class
    :param PretrainConfig config: training settings
    :param Classifier classifier: frozen classifier for the consistency gate
    :param Dataset holdout: held out real images for the discriminator gate
    :param bool gate: whether to enforce the gates
    :rtype: StyleGenerator
    :raises ConfigError: if gate is set and the classifier or the holdout is
                         missing
    :raises GateError: if a gate fails, with the training curves attached
    """
    if gate:
        if classifier is None:
            raise ConfigError('models.classifier',
                              "the class consistency gate of generator %d needs a classifier" % label)
        if holdout is None or not len(holdout):
            raise ConfigError('pretrain.holdout',
                              "the discriminator gate of generator %d needs held out images" % label)
    rng = np.random.default_rng([config.seed,label,11])
    g_args = dict(config.generator)
    g_args.update(class_index=label,seed=int(rng.integers(2**31)))
    generator = StyleGenerator(**g_args)
    d_args = dict(config.discriminator)
    d_args.update(seed=int(rng.integers(2**31)))
    disc = Discriminator(**d_args)
    opt_g = Adam(generator.parameters(),config.gan_lr,config.gan_betas)
    opt_d = Adam(disc.parameters(),config.gan_lr,config.gan_betas)
    batch = config.gan_batch_size
    curves = OrderedDict([('d_loss',[]),('g_loss',[]),('r1',[])])

    logger.info("Pretraining generator for class %d on %d images",label,len(train))
    for step in progress(range(config.gan_steps),'gan %d' % label):
        idx = rng.integers(len(train),size=batch)
        real = train.images[idx].astype(get_dtype())

        fake = generator.generate(_latents(rng,generator,batch),_unit_noise(rng,batch)).data
        with Graph() as graph:
            disc.watch(graph)
            loss_d = reduce_mean(softplus(disc(fake))) + reduce_mean(softplus(-disc(real)))
            grads = graph.backward(loss_d,disc.parameters())
        if config.r1_gamma > 0 and step % config.r1_every == 0:
            penalty,r1 = r1_gradients(disc,real,config.r1_gamma*config.r1_every,config.r1_step)
            for p in disc.parameters():
                grads[p] = grads[p].data + r1[p]
            curves['r1'].append(penalty/config.r1_every)
        opt_d.step(grads)

        with Graph() as graph:
            generator.watch(graph)
            fake = generator.generate(_latents(rng,generator,batch),_unit_noise(rng,batch))
            loss_g = reduce_mean(softplus(-disc(fake)))
            grads = graph.backward(loss_g,generator.parameters())
        opt_g.step(grads)

        curves['d_loss'].append(float(loss_d.data))
        curves['g_loss'].append(float(loss_g.data))
        if step % 100 == 0:
            logger.debug("gan %d step %d: d %.4f g %.4f",label,step,loss_d.data,loss_g.data)

    metrics = OrderedDict()
    if holdout is not None and len(holdout):
        count = min(config.gate_samples,len(holdout))
        fake = generator.generate(_latents(rng,generator,count),_unit_noise(rng,count)).data
        metrics['discriminator_accuracy'] = discriminator_accuracy(disc,holdout.images[:count],fake)
    if classifier is not None:
        metrics['class_consistency'] = class_consistency(generator,classifier,config.gate_samples,config.seed)
    generator.metadata = OrderedDict([
        ('seed',config.seed),('steps',config.gan_steps),
        ('final_d_loss',curves['d_loss'][-1]),('final_g_loss',curves['g_loss'][-1]),
        ('metrics',metrics),
    ])
    logger.info("Generator %d: %s",label,", ".join("%s %.3f" % m for m in metrics.items()))

    if gate:
        if metrics['discriminator_accuracy'] > config.gate_discriminator_accuracy:
            raise GateError("generator %d: discriminator accuracy %.3f above %.3f" %
                            (label,metrics['discriminator_accuracy'],config.gate_discriminator_accuracy),curves)
        if metrics['class_consistency'] < config.gate_class_consistency:
            raise GateError("generator %d: class consistency %.3f below %.3f" %
                            (label,metrics['class_consistency'],config.gate_class_consistency),curves)
    return generator

def new_classifier(classes,train_config,config):
    "untrained classifier with the architecture of config.classifier"
    c_args = dict(config.classifier)
    c_args.setdefault('classes',classes)
    c_args.setdefault('seed',train_config.seed)
    return Classifier(**c_args)

def new_segmenter(label_classes,train_config,config):
    "untrained segmenter with the architecture of config.segmenter"
    s_args = dict(config.segmenter)
    s_args.setdefault('label_classes',label_classes)
    s_args.setdefault('seed',train_config.seed)
    return Segmenter(**s_args)

def _require_test(test,name):
    if test is None or not len(test):
        raise ConfigError('pretrain.test',"the %s gate needs a test set" % name)

def pretrain_classifier(train,test,train_config,config,gate=True):
    """
    Train a classifier on clean images only.

    :param Dataset train: training images
    :param Dataset test: held out images for the gate
    :param TrainConfig train_config: optimizer and schedule, the ratio is
                                     forced to clean only
    :param PretrainConfig config: architecture and gate settings
    :rtype: tuple of Classifier and TrainRun
    :raises ConfigError: if gate is set and there is no test set
    :raises GateError: if the test accuracy is below the gate
    """
    if gate:
        _require_test(test,'classifier')
    model = new_classifier(train.classes,train_config,config)
    run = fit_classifier(model,train,train_config.replace(ratio='1:0'),test=test)
    accuracy = run.test_accuracy[-1] if run.test_accuracy else None
    model.metadata = run.metadata()
    if gate and accuracy < config.gate_classifier_accuracy:
        raise GateError("classifier: test accuracy %.3f below %.3f" %
                        (accuracy,config.gate_classifier_accuracy),run.curves())
    return model,run

def pretrain_segmenter(train,test,train_config,config,gate=True):
    """
    Train a segmenter on clean image and layout pairs.

    :rtype: tuple of Segmenter and TrainRun
    :raises ValueError: if the datasets carry no layouts
    :raises ConfigError: if gate is set and there is no test set
    :raises GateError: if the test pixel accuracy is below the gate
    """
    if gate:
        _require_test(test,'segmenter')
    if train.layouts is None:
        raise ValueError("Segmenter pretraining needs a dataset with layouts")
    model = new_segmenter(train.label_classes,train_config,config)
    run = fit_segmenter(model,train,train_config.replace(ratio='1:0'),test=test)
    accuracy = run.test_accuracy[-1] if run.test_accuracy else None
    model.metadata = run.metadata()
    if gate and accuracy < config.gate_pixel_accuracy:
        raise GateError("segmenter: test pixel accuracy %.3f below %.3f" %
                        (accuracy,config.gate_pixel_accuracy),run.curves())
    return model,run

def pretrain_spade(train,config):
    """
    Fit the layout conditioned generator by pixel regression of its output
    onto the dataset images given their layouts.

    :param Dataset train: images with layouts
    :param PretrainConfig config: steps, batch size and learning rate
    :rtype: SpadeGenerator
    """
    if train.layouts is None:
        raise ValueError("SPADE pretraining needs a dataset with layouts")
    rng = np.random.default_rng([config.seed,23])
    s_args = dict(config.spade)
    s_args.setdefault('label_classes',train.label_classes)
    s_args.setdefault('seed',config.seed)
    model = SpadeGenerator(**s_args)
    opt = Adam(model.parameters(),config.spade_lr,config.gan_betas)
    losses = []
    for step in progress(range(config.spade_steps),'spade'):
        idx = rng.integers(len(train),size=config.spade_batch_size)
        z = rng.standard_normal((len(idx),model.config.latent_dim)).astype(get_dtype())
        with Graph() as graph:
            model.watch(graph)
            out = model(train.layouts[idx],z)
            loss = reduce_mean(power(sub(out,as_tensor(train.images[idx])),2))
            grads = graph.backward(loss,model.parameters())
        opt.step(grads)
        losses.append(float(loss.data))
        if step % 100 == 0:
            logger.debug("spade step %d: mse %.4f",step,losses[-1])
    model.metadata = OrderedDict([('seed',config.seed),('steps',config.spade_steps),
                                  ('final_mse',losses[-1])])
    logger.info("SPADE generator: final pixel mse %.4f",losses[-1])
    return model
