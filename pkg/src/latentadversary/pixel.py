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
This module defines the pixel-space attacks: norm bounded sign-gradient
attacks, a smooth flow field attack and a monotone recoloring attack
"""
import logging
from collections import OrderedDict

import numpy as np

from latentadversary.config import Options
from latentadversary.models import images
from latentadversary.tensor import Graph, Tensor, add, sub, power, reshape,\
    getitem, matmul, reduce_mean, reduce_sum, scale, sqrt, softmax_cross_entropy,\
    bilinear_grid_sample, get_dtype

logger = logging.getLogger(__name__)

KINDS = ('pgd','ifgsm','spatial','recolor')
"names of the pixel attacks"

KIND_DEFAULTS = {
    'pgd' : {'epsilon' : 8.,'step_size' : 2.,'iterations' : 20},
    'ifgsm' : {'epsilon' : 4.,'step_size' : 1.,'iterations' : 5},
    'spatial' : {'iterations' : 20},
    'recolor' : {'iterations' : 20},
}
"defaults that depend on the attack kind"

class PixelAttackConfig(Options):
    """
    Settings of a pixel attack. epsilon and step_size are on the 0-255
    scale; flow_budget and flow_step are in pixels.
    """
    section = 'pixel'
    defaults = OrderedDict([
        ('kind','pgd'),
        ('epsilon',8.),
        ('step_size',2.),
        ('iterations',20),
        ('random_start',None),
        ('flow_budget',2.),
        ('flow_step',0.25),
        ('smoothness',0.05),
        ('curve_bound',0.3),
        ('curve_step',0.02),
        ('knots',8),
        ('seed',0),
    ])

    @classmethod
    def for_kind(cls,kind,**kwargs):
        "config with the defaults of an attack kind, overridden by kwargs"
        values = dict(KIND_DEFAULTS.get(kind,{}))
        values.update(kwargs)
        return cls(kind=kind,**values)

    def validate(self):
        self.require(self.kind in KINDS,'kind',"Unknown attack kind: %s" % self.kind)
        for name in ('epsilon','step_size','flow_budget','flow_step','smoothness',
                     'curve_bound','curve_step'):
            self.require(getattr(self,name) >= 0,name,"must not be negative")
        self.require(int(self.iterations) >= 1,'iterations',"must be at least 1")
        self.require(int(self.knots) >= 2,'knots',"at least 2 knots are needed")

    @property
    def radius(self):
        "epsilon on the [-1,1] image scale"
        return 2.*self.epsilon/255.

    @property
    def alpha(self):
        "step size on the [-1,1] image scale"
        return 2.*self.step_size/255.

def _loss_grad(loss_fn,variable):
    leaf = Tensor(variable)
    with Graph() as graph:
        graph.watch(leaf)
        loss = loss_fn(leaf)
        return graph.backward(loss,[leaf])[leaf].data

def pgd(x,labels,classifier,config):
    """
    Iterated sign-gradient ascent of the cross entropy, projected onto the
    intersection of the L-infinity ball of radius epsilon and the valid
    range. Kind 'pgd' starts at a random point in the ball, kind 'ifgsm' at
    x itself.

    :param x: images (N,3,H,W) in [-1,1]
    :param labels: labels (N,)
    :rtype: array of adversarial images
    """
    x0 = images(x,'pgd').data.astype(np.float64)
    labels = np.asarray(labels).reshape(-1)
    eps = config.radius
    if eps == 0:
        return x0.astype(get_dtype())
    random_start = config.kind == 'pgd' if config.random_start is None else config.random_start
    adv = x0.copy()
    if random_start:
        rng = np.random.default_rng([config.seed,29])
        adv = np.clip(adv + rng.uniform(-eps,eps,adv.shape),-1.,1.)
    for _ in range(config.iterations):
        g = _loss_grad(lambda t: softmax_cross_entropy(classifier.logits(t),labels),adv)
        adv = adv + config.alpha*np.sign(g)
        adv = np.clip(np.clip(adv,x0 - eps,x0 + eps),-1.,1.)
    return adv.astype(get_dtype())

def ifgsm(x,labels,classifier,config):
    "pgd from a zero start"
    return pgd(x,labels,classifier,config.replace(kind='ifgsm',random_start=False))

def identity_grid(n,h,w):
    "sampling grid (n,h,w,2) that reproduces an image exactly"
    rows,cols = np.meshgrid(np.arange(h,dtype=float),np.arange(w,dtype=float),indexing='ij')
    return np.broadcast_to(np.stack([rows,cols],axis=-1),(n,h,w,2)).copy()

def flow_smoothness(flow,floor=1e-8):
    """
    Total variation of a flow field (n,h,w,2): the mean L2 norm of the
    difference between vertically and horizontally neighbouring flow
    vectors. floor keeps the gradient finite for constant flows.
    """
    dy = sub(getitem(flow,(slice(None),slice(1,None))),getitem(flow,(slice(None),slice(None,-1))))
    dx = sub(getitem(flow,(slice(None),slice(None),slice(1,None))),
             getitem(flow,(slice(None),slice(None),slice(None,-1))))
    return add(reduce_mean(sqrt(add(reduce_sum(power(dy,2),axis=-1),floor))),
               reduce_mean(sqrt(add(reduce_sum(power(dx,2),axis=-1),floor))))

def clip_flow(flow,budget):
    "scale flow vectors down to a per-pixel L2 norm of at most budget"
    norm = np.sqrt((flow**2).sum(axis=-1,keepdims=True))
    return flow*np.minimum(1.,budget/np.maximum(norm,1e-12))

def spatial_attack(x,labels,classifier,config):
    """
    Flow field attack: a per-pixel displacement is optimized by sign-gradient
    ascent of the cross entropy minus smoothness times the flow's total
    variation, and the image is resampled bilinearly along it. Flow vectors
    are clipped to flow_budget pixels.

    :rtype: array of adversarial images
    """
    x0 = images(x,'spatial_attack').data
    labels = np.asarray(labels).reshape(-1)
    if config.flow_budget == 0:
        return x0.copy()
    n,_,h,w = x0.shape
    base = identity_grid(n,h,w)
    flow = np.zeros((n,h,w,2))

    def objective(f):
        sampled = bilinear_grid_sample(x0,add(base,f))
        loss = softmax_cross_entropy(classifier.logits(sampled),labels)
        return sub(loss,scale(flow_smoothness(f),config.smoothness))

    for _ in range(config.iterations):
        flow = clip_flow(flow + config.flow_step*np.sign(_loss_grad(objective,flow)),config.flow_budget)
    out = bilinear_grid_sample(x0,base + flow).data
    return np.clip(out,-1.,1.).astype(get_dtype())

def knot_levels(knots):
    return np.linspace(-1.,1.,knots)

def hat_weights(x,knots):
    """
    Piecewise linear interpolation weights of every pixel on the knots

    :rtype: array (N,C,H*W,knots)
    """
    levels = knot_levels(knots)
    n,c,h,w = x.shape
    flat = np.clip(x.reshape(n,c,h*w),-1.,1.)
    width = levels[1] - levels[0]
    j = np.minimum(((flat + 1.)/width).astype(int),knots - 2)
    t = (flat - levels[j])/width
    weights = np.zeros((n,c,h*w,knots))
    idx = np.indices(j.shape)
    weights[idx[0],idx[1],idx[2],j] = 1. - t
    weights[idx[0],idx[1],idx[2],j + 1] += t
    return weights

def project_curve(deviation,bound):
    """
    Project knot deviations onto monotone curves within bound of the
    identity and within the valid range
    """
    levels = knot_levels(deviation.shape[-1])
    outputs = levels + np.clip(deviation,-bound,bound)
    outputs = np.maximum.accumulate(outputs,axis=-1)
    outputs = np.clip(outputs,-1.,1.)
    return outputs - levels

def apply_curve(x,deviation):
    """
    Remap every channel of every image through its monotone curve

    :param x: images (N,C,H,W)
    :param deviation: knot deviations (N,C,knots), array or Tensor
    :rtype: Tensor
    """
    x = np.asarray(x)
    n,c,h,w = x.shape
    weights = hat_weights(x,np.shape(getattr(deviation,'data',deviation))[-1])
    shift = matmul(weights,reshape(deviation,(n,c,-1,1)))
    return add(np.clip(x,-1.,1.),reshape(shift,(n,c,h,w)))

def recolor_attack(x,labels,classifier,config):
    """
    Recoloring attack: per-channel monotone piecewise linear intensity
    curves, optimized by sign-gradient ascent of the cross entropy with the
    knot deviations bounded by curve_bound. Spatial content is untouched.

    :rtype: array of adversarial images
    """
    x0 = images(x,'recolor_attack').data
    labels = np.asarray(labels).reshape(-1)
    if config.curve_bound == 0:
        return x0.copy()
    n,c = x0.shape[:2]
    deviation = np.zeros((n,c,config.knots))

    def objective(d):
        return softmax_cross_entropy(classifier.logits(apply_curve(x0,d)),labels)

    for _ in range(config.iterations):
        deviation = deviation + config.curve_step*np.sign(_loss_grad(objective,deviation))
        deviation = project_curve(deviation,config.curve_bound)
    return np.clip(apply_curve(x0,deviation).data,-1.,1.).astype(get_dtype())

def pixel_attack(x,labels,classifier,config):
    """
    Run the pixel attack named by config.kind

    :raises ValueError: for unknown kinds
    """
    if config.kind == 'pgd':
        return pgd(x,labels,classifier,config)
    elif config.kind == 'ifgsm':
        return ifgsm(x,labels,classifier,config)
    elif config.kind == 'spatial':
        return spatial_attack(x,labels,classifier,config)
    elif config.kind == 'recolor':
        return recolor_attack(x,labels,classifier,config)
    else:
        raise ValueError("Unknown attack kind: %s" % config.kind)

def attack_batch(x,labels,classifier,config,batch_size=100):
    """
    Attack images in batches and report which ones fool the classifier

    :returns: tuple of adversarial images and a boolean array, true where
              the prediction differs from the label
    """
    labels = np.asarray(labels).reshape(-1)
    out = []
    for start in range(0,len(labels),batch_size):
        out.append(pixel_attack(x[start:start + batch_size],labels[start:start + batch_size],
                                classifier,config))
    adv = np.concatenate(out) if out else np.zeros((0,) + np.shape(x)[1:],dtype=get_dtype())
    fooled = classifier.predict(adv) != labels if len(adv) else np.zeros(0,dtype=bool)
    logger.debug("%s attack fooled %d of %d images",config.kind,int(fooled.sum()),len(labels))
    return adv,fooled
