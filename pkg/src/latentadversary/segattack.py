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
This module defines the attack on semantic segmentation through the
modulation maps of a layout conditioned generator
"""
import json
import logging
from collections import OrderedDict

import numpy as np

from latentadversary.config import Options
from latentadversary.data import Dataset
from latentadversary.tensor import Graph, Tensor, pixelwise_softmax_cross_entropy, get_dtype

logger = logging.getLogger(__name__)

SEG_VARIABLES = ('gamma','beta','both')
"modulation maps the attack may modify"

class SegAttackConfig(Options):
    section = 'segattack'
    defaults = OrderedDict([
        ('step',0.001),
        ('iterations',10),
        ('variables','both'),
        ('record_every',1),
        ('seed',0),
    ])

    def validate(self):
        self.require(self.step >= 0,'step',"must not be negative")
        self.require(int(self.iterations) >= 1,'iterations',"must be at least 1")
        self.require(self.variables in SEG_VARIABLES,'variables',
                     "Unknown variable set: %s" % self.variables)
        self.require(int(self.record_every) >= 1,'record_every',"must be at least 1")

def pixel_accuracy(prediction,truth):
    """
    Fraction of pixels whose predicted label equals the true label

    :param prediction: label map(s)
    :param truth: label map(s) of the same shape
    :rtype: float
    """
    prediction,truth = np.asarray(prediction),np.asarray(truth)
    if prediction.shape != truth.shape:
        raise ValueError("Label maps of shapes %s and %s differ" % (prediction.shape,truth.shape))
    if prediction.size == 0:
        return 0.
    return float(np.mean(prediction == truth))

def _layout_batch(layout):
    layout = np.asarray(layout,dtype=int)
    return layout[None] if layout.ndim == 2 else layout

def _forward(gammas,betas,layout,z,segmenter,spade,with_grads):
    gammas = [Tensor(g) for g in gammas]
    betas = [Tensor(b) for b in betas]
    with Graph() as graph:
        if with_grads:
            for t in gammas + betas:
                graph.watch(t)
        image = spade.spade_synthesize(gammas,betas,z)
        logits = segmenter.logits(image)
        loss = pixelwise_softmax_cross_entropy(logits,layout)
        result = {'image' : image.data,'prediction' : np.argmax(logits.data,axis=1),
                  'loss' : float(loss.data)}
        if with_grads:
            grads = graph.backward(loss,gammas + betas)
            result['gamma_grads'] = [grads[t].data for t in gammas]
            result['beta_grads'] = [grads[t].data for t in betas]
    return result

def _ascend(gammas,betas,result,config):
    if config.step == 0:
        return [g.copy() for g in gammas],[b.copy() for b in betas]
    gammas = [(g + config.step*np.sign(d)).astype(get_dtype()) if config.variables != 'beta' else g.copy()
              for g,d in zip(gammas,result['gamma_grads'])]
    betas = [(b + config.step*np.sign(d)).astype(get_dtype()) if config.variables != 'gamma' else b.copy()
             for b,d in zip(betas,result['beta_grads'])]
    return gammas,betas

def seg_attack_step(gammas,betas,layout,z,segmenter,spade,config):
    """
    One ascent step of the pixelwise cross entropy between the segmenter's
    prediction for the generated image and the conditioning layout, with
    respect to the selected modulation maps. Unselected maps are copied
    unchanged.

    :param list gammas: per-layer gamma maps (N,C_l,r_l,r_l)
    :param list betas: per-layer beta maps
    :param layout: conditioning label map(s)
    :param z: latent(s) of the generator
    :rtype: tuple of the new gamma and beta lists
    """
    layout = _layout_batch(layout)
    result = _forward(gammas,betas,layout,z,segmenter,spade,True)
    return _ascend([np.asarray(g) for g in gammas],[np.asarray(b) for b in betas],result,config)

class SegTrajectory(object):
    """
    Snapshots of a segmentation attack at the recorded iterations.
    """
    def __init__(self,layout,records,gammas,betas):
        self.layout = layout
        "conditioning label maps (N,H,W)"
        self.records = records
        "list of dictionaries with iteration, image, prediction, pixel_accuracy and loss"
        self.gammas = gammas
        "final gamma maps"
        self.betas = betas
        "final beta maps"

    def __len__(self):
        return len(self.records)

    def accuracies(self):
        return [r['pixel_accuracy'] for r in self.records]

    def to_records(self):
        "JSON-lines records without the image arrays"
        return [OrderedDict([('iteration',r['iteration']),('pixel_accuracy',r['pixel_accuracy']),
                             ('loss',r['loss'])]) for r in self.records]

    def export(self,filename):
        with open(filename,'w') as fid:
            for record in self.to_records():
                fid.write(json.dumps(record) + '\n')

    def to_dataset(self,classes):
        """
        Images of all snapshots as Dataset, with the conditioning layouts as
        label maps. The class label of an image is its largest shape label.
        """
        imgs,layouts = [],[]
        for r in self.records:
            imgs.append(r['image'])
            layouts.append(self.layout)
        layouts = np.concatenate(layouts)
        labels = np.maximum(layouts.reshape(len(layouts),-1).max(axis=1).astype(int) - 1,0)
        provenance = [OrderedDict([('iteration',r['iteration']),('sample',i)])
                      for r in self.records for i in range(len(self.layout))]
        return Dataset(np.concatenate(imgs),labels,classes,layouts,provenance)

def run_seg_attack(layout,z,config,segmenter,spade):
    """
    Attack the segmenter for config.iterations steps from the modulation maps
    of the layout, recording every record_every iterations, iteration 0
    included.

    :param layout: label map (H,W) or batch (N,H,W)
    :param z: latent vector or batch of latents
    :rtype: SegTrajectory
    """
    layout = _layout_batch(layout)
    gammas,betas = spade.spade_modulation(layout)
    gammas,betas = [g.data.copy() for g in gammas],[b.data.copy() for b in betas]
    records = []
    for iteration in range(config.iterations + 1):
        last = iteration == config.iterations
        result = _forward(gammas,betas,layout,z,segmenter,spade,not last)
        if iteration % config.record_every == 0:
            records.append({
                'iteration' : iteration,
                'image' : result['image'],
                'prediction' : result['prediction'],
                'pixel_accuracy' : pixel_accuracy(result['prediction'],layout),
                'loss' : result['loss'],
            })
        if not last:
            gammas,betas = _ascend(gammas,betas,result,config)
    logger.debug("Segmentation attack: pixel accuracy %.3f -> %.3f",
                 records[0]['pixel_accuracy'],records[-1]['pixel_accuracy'])
    return SegTrajectory(layout,records,gammas,betas)
