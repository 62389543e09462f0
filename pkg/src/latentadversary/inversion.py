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
This module defines the embedding of given images into the style and noise
variables of a generator
"""
import logging
from collections import OrderedDict

import numpy as np

from latentadversary import ShapeError
from latentadversary.config import Options
from latentadversary.latents import LatentState
from latentadversary.models import images
from latentadversary.nn import Adam
from latentadversary.tensor import Graph, Tensor, add, sub, scale,\
    power, reduce_mean

logger = logging.getLogger(__name__)

class InversionConfig(Options):
    section = 'inversion'
    defaults = OrderedDict([
        ('steps',500),
        ('lr',0.01),
        ('pixel_weight',1.),
        ('feature_weight',1.),
        ('success_rmse',0.05),
        ('seed',0),
    ])

    def validate(self):
        self.require(int(self.steps) >= 1,'steps',"must be at least 1")
        self.require(self.lr > 0,'lr',"must be positive")
        self.require(self.pixel_weight >= 0,'pixel_weight',"must not be negative")
        self.require(self.feature_weight >= 0,'feature_weight',"must not be negative")
        self.require(self.success_rmse >= 0,'success_rmse',"must not be negative")

def _mse(a,b):
    return reduce_mean(power(sub(a,b),2))

def _distance(x,target,target_features,classifier,config):
    total = scale(_mse(x,target),config.pixel_weight)
    if config.feature_weight > 0:
        for f,g in zip(classifier.features(x),target_features):
            total = add(total,scale(_mse(f,g),config.feature_weight))
    return total

def perceptual_distance(a,b,classifier,config=None):
    """
    Weighted sum of the mean squared pixel error and the mean squared errors
    of the classifier's block activations.

    :param a: image or batch of images
    :param b: image or batch of images of the same shape
    :param Classifier classifier: network providing the block activations
    :param InversionConfig config: weights, defaults to both weights 1
    :rtype: scalar Tensor
    :raises ShapeError: if the shapes differ
    """
    config = config or InversionConfig()
    a,b = images(a,'perceptual_distance'),images(b,'perceptual_distance')
    if a.shape != b.shape:
        raise ShapeError('perceptual_distance',a.shape,b.shape)
    return _distance(a,b,classifier.features(b),classifier,config)

class InversionResult(object):
    """
    Best latents found for an image.
    """
    def __init__(self,state,distance,rmse,success,steps,curve):
        self.state = state
        "best LatentState"
        self.distance = distance
        "perceptual distance of the best latents"
        self.rmse = rmse
        "pixel root mean squared error of the best latents"
        self.success = success
        "whether rmse is within the success threshold"
        self.steps = steps
        "number of update steps taken"
        self.curve = curve
        "distance before every step and after the last one"

    def __iter__(self):
        return iter((self.state,self.distance))

    def __repr__(self):
        return "InversionResult(distance=%g, rmse=%g, success=%s)" % \
            (self.distance,self.rmse,self.success)

def invert(image,generator,classifier,config,initial=None):
    """
    Minimize the perceptual distance between the generated and the given
    image over the styles and noises, with Adam updates from a random
    initialization.

    :param image: image (3,H,W) with values in [-1,1]
    :param generator: generator to embed into
    :param Classifier classifier: network for the feature distance
    :param InversionConfig config: budget, learning rate and weights
    :param LatentState initial: starting latents, defaults to a random draw
    :rtype: InversionResult, unpacks to (state, distance)
    :raises ValueError: if the image is outside [-1,1]
    """
    target = images(image,'invert')
    if np.any(np.abs(target.data) > 1.):
        raise ValueError("Image values must lie in [-1,1]")
    target_features = [Tensor(f.data) for f in classifier.features(target)]
    if initial is None:
        initial = generator.sample_latent([config.seed,17])
    initial.validate(generator.schema)
    leaves = [Tensor(a[None]) for a in initial.styles + initial.noises]
    num_layers = initial.num_layers
    opt = Adam(leaves,config.lr)

    def state_of(tensors):
        return LatentState([t.data[0] for t in tensors[:num_layers]],
                           [t.data[0] for t in tensors[num_layers:]])

    best_state,best_distance = initial.copy(),None
    curve = []
    steps = 0
    while True:
        last = steps == config.steps
        with Graph() as graph:
            if not last:
                for t in leaves:
                    graph.watch(t)
            x = generator.synthesize(leaves[:num_layers],leaves[num_layers:])
            distance = _distance(x,target,target_features,classifier,config)
            d = float(distance.data)
            if best_distance is None or d < best_distance:
                best_state,best_distance = state_of(leaves),d
            curve.append(d)
            if last or d == 0.:
                break
            grads = graph.backward(distance,leaves)
        opt.step(grads)
        steps += 1
        if steps % 50 == 0:
            logger.debug("inversion step %d: distance %.5f",steps,d)

    generated = generator.synthesize(best_state.styles,best_state.noises).data
    rmse = float(np.sqrt(np.mean((generated.astype(np.float64) - target.data)**2)))
    success = rmse <= config.success_rmse
    logger.info("Inverted image in %d steps: distance %.5f, rmse %.4f",steps,best_distance,rmse)
    return InversionResult(best_state,best_distance,rmse,success,steps,curve)
