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
This module defines the generators, the classifier, the segmenter and the
discriminator
"""
from collections import OrderedDict

import numpy as np

from latentadversary import ShapeError, ConfigError
from latentadversary.config import Options
from latentadversary.latents import LatentSchema, LatentState
from latentadversary.nn import Module, Linear, Conv2d
from latentadversary.tensor import as_tensor, get_dtype, add, sub, mul, scale,\
    power, leaky_relu, tanh, sigmoid, softmax, reshape, getitem, concat,\
    avg_pool2d, upsample_nearest, instance_normalize, adain

SHAPES = ('circle','square','triangle','cross','diamond','ring')
"class defining shapes, in class index order"

RESOLUTIONS = (4,4,8,8,16,16,32,32)
"spatial resolution of each generator layer"

def images(x,operation,channels=3):
    """
    Wrap images as Tensor of shape (N,C,H,W), adding a batch axis to a
    single (C,H,W) image.

    :raises ShapeError: for anything else
    """
    x = as_tensor(x)
    if x.ndim == 3:
        x = reshape(x,(1,) + x.shape)
    if x.ndim != 4 or x.shape[1] != channels:
        raise ShapeError(operation,x.shape,(None,channels,None,None))
    return x

def shape_mask(u,v,shape,sharpness):
    """
    Soft mask of a shape in normalized coordinates, close to 1 inside and 0
    outside. The unit shape is centered at the origin with radius about 1.

    :param Tensor u: horizontal coordinates
    :param Tensor v: vertical coordinates, increasing downwards
    :param str shape: one of :data:`SHAPES`
    :param sharpness: edge sharpness, a number or Tensor broadcasting with u
    :rtype: Tensor
    """
    def inside(d):
        return sigmoid(mul(sharpness,d))

    if shape == 'circle':
        return inside(sub(1.,add(power(u,2),power(v,2))))
    elif shape == 'square':
        return inside(sub(1.,add(power(u,8),power(v,8))))
    elif shape == 'triangle':
        base = inside(sub(0.7,v))
        left = inside(add(sub(v,scale(u,2.)),0.9))
        right = inside(add(add(v,scale(u,2.)),0.9))
        return mul(mul(base,left),right)
    elif shape == 'cross':
        bar1 = inside(sub(1.,add(power(u,8),power(scale(v,3.),8))))
        bar2 = inside(sub(1.,add(power(scale(u,3.),8),power(v,8))))
        return sub(add(bar1,bar2),mul(bar1,bar2))
    elif shape == 'diamond':
        a = scale(add(u,v),0.75)
        b = scale(sub(u,v),0.75)
        return inside(sub(1.,add(power(a,8),power(b,8))))
    elif shape == 'ring':
        r2 = add(power(u,2),power(v,2))
        return mul(inside(sub(1.,r2)),inside(sub(r2,0.36)))
    else:
        raise ValueError("Unknown shape: %s" % shape)

def coordinate_grid(size):
    "row and column coordinates in [-1,1], each of shape (1,1,size,size)"
    t = np.linspace(-1.,1.,size)
    rows,cols = np.meshgrid(t,t,indexing='ij')
    return rows.reshape(1,1,size,size),cols.reshape(1,1,size,size)

def one_hot(layout,classes):
    """
    One-hot encode a label map.

    :param layout: integer array (N,H,W) or (H,W)
    :param int classes: number of label classes
    :rtype: array of shape (N,classes,H,W)
    """
    layout = np.asarray(layout,dtype=int)
    if layout.ndim == 2:
        layout = layout[None]
    if layout.ndim != 3:
        raise ShapeError('one_hot',layout.shape)
    if layout.size and (layout.min() < 0 or layout.max() >= classes):
        raise ValueError("Label map values outside [0,%d)" % classes)
    return np.eye(classes,dtype=get_dtype())[layout].transpose(0,3,1,2)

class Model(Module):
    """
    Abstract baseclass for the models. Subclasses set :attr:`config_class`
    and create their parameters in :meth:`build`.
    """
    config_class = Options

    def __init__(self,**kwargs):
        Module.__init__(self)
        self.config = self.config_class(**kwargs)
        "architecture configuration"
        self.metadata = OrderedDict()
        "training metadata stored alongside the parameters"
        self.build(np.random.default_rng(self.config.seed))

    def build(self,rng):
        raise NotImplementedError

    def descriptor(self):
        return OrderedDict([('kind',self.kind),('config',self.config.to_dict())])

    def __repr__(self):
        return "%s(%d parameters)" % (type(self).__name__,self.num_parameters())

def _check_channels(config,name):
    config.require(len(config.channels) == len(RESOLUTIONS),name,
                   "expected %d layer widths" % len(RESOLUTIONS))
    config.require(all(int(c) > 0 for c in config.channels),name,"widths must be positive")

class StyleGeneratorConfig(Options):
    section = 'models.style_generator'
    defaults = OrderedDict([
        ('latent_dim',64),
        ('mapping_layers',3),
        ('mapping_width',64),
        ('channels',[64,64,64,64,32,32,32,32]),
        ('noise_init',0.1),
        ('class_index',0),
        ('seed',0),
    ])

    def validate(self):
        self.require(self.latent_dim > 0,'latent_dim',"must be positive")
        self.require(self.mapping_layers >= 1,'mapping_layers',"must be at least 1")
        _check_channels(self,'channels')

class StyleGenerator(Model):
    """
    Style-based generator: a mapping network f turns z into w, learned affine
    heads turn w into one style vector per layer, and the synthesis network
    g renders an image from the style vectors and per-layer noise maps.
    """
    kind = 'style-generator'
    config_class = StyleGeneratorConfig

    def build(self,rng):
        c = self.config
        self.mapping = []
        n_in = c.latent_dim
        for i in range(c.mapping_layers):
            self.mapping.append(self.add_module('mapping%d' % i,Linear(rng,n_in,c.mapping_width)))
            n_in = c.mapping_width
        self.heads = []
        for l,width in enumerate(c.channels):
            head = self.add_module('style%d' % l,Linear(rng,c.mapping_width,2*width,gain=1.))
            head.bias.data[:width] = 1.
            self.heads.append(head)
        self.noise_strength = self.add_param('noise_strength',np.full(len(RESOLUTIONS),c.noise_init))
        self.const = self.add_param('const',rng.standard_normal((1,c.channels[0],RESOLUTIONS[0],RESOLUTIONS[0])))
        self.convs = []
        c_in = c.channels[0]
        for l,width in enumerate(c.channels):
            self.convs.append(self.add_module('conv%d' % l,Conv2d(rng,c_in,width)))
            c_in = width
        self.to_rgb = self.add_module('to_rgb',Conv2d(rng,c_in,3,size=1,gain=1.))

    @property
    def schema(self):
        return LatentSchema([2*c for c in self.config.channels],[(r,r) for r in RESOLUTIONS])

    @property
    def num_layers(self):
        return len(RESOLUTIONS)

    @property
    def class_index(self):
        return self.config.class_index

    def map_latent(self,z):
        """
        Map a latent z to the intermediate latent w

        :param z: vector of length latent_dim, or a batch of them
        :rtype: Tensor
        :raises ShapeError: for a wrong length
        """
        z = as_tensor(z)
        if z.ndim not in (1,2) or z.shape[-1] != self.config.latent_dim:
            raise ShapeError('map_latent',z.shape,(self.config.latent_dim,))
        x = reshape(z,(-1,self.config.latent_dim))
        for layer in self.mapping:
            x = leaky_relu(layer(x))
        if z.ndim == 1:
            x = reshape(x,(self.config.mapping_width,))
        return x

    def styles_from_w(self,w):
        """
        Compute the per-layer style vectors y_l = A_l w + b_l

        :rtype: list of Tensors of length 2*C_l
        """
        w = as_tensor(w)
        if w.shape[-1] != self.config.mapping_width:
            raise ShapeError('styles_from_w',w.shape,(self.config.mapping_width,))
        flat = reshape(w,(-1,self.config.mapping_width))
        styles = [head(flat) for head in self.heads]
        if w.ndim == 1:
            styles = [reshape(y,(y.shape[-1],)) for y in styles]
        return styles

    def sample_noise(self,seed):
        """
        Draw one unit Gaussian map per layer, scaled by the layer's learned
        noise strength.

        :param seed: seed or sequence of seeds for numpy's default_rng
        :rtype: list of arrays
        """
        rng = np.random.default_rng(seed)
        strength = self.noise_strength.data
        return [(strength[l]*rng.standard_normal((r,r))).astype(get_dtype())
                for l,r in enumerate(RESOLUTIONS)]

    def sample_z(self,seed):
        return np.random.default_rng(seed).standard_normal(self.config.latent_dim).astype(get_dtype())

    def sample_latent(self,seed):
        """
        Draw a LatentState: styles from a random z, noise from an independent
        stream of the same seed.

        :rtype: LatentState
        """
        w = self.map_latent(self.sample_z([seed,0]))
        return LatentState([y.data for y in self.styles_from_w(w)],self.sample_noise([seed,1]))

    def _check(self,styles,noises):
        if len(styles) != self.num_layers or len(noises) != self.num_layers:
            raise ShapeError('synthesize',(len(styles),),(len(noises),),(self.num_layers,))
        for l,(y,n,width,r) in enumerate(zip(styles,noises,self.config.channels,RESOLUTIONS)):
            if y.shape[-1] != 2*width:
                raise ShapeError('synthesize[layer %d] style' % l,y.shape,(2*width,))
            if n.shape[-2:] != (r,r):
                raise ShapeError('synthesize[layer %d] noise' % l,n.shape,(r,r))

    def synthesize(self,styles,noises):
        """
        Render images from style vectors and noise maps.

        :param sequence styles: per-layer style vectors, (2C_l,) or (N,2C_l)
        :param sequence noises: per-layer noise maps, (r,r) or (N,r,r)
        :rtype: Tensor of shape (N,3,32,32) with values in [-1,1]
        :raises ShapeError: naming the first layer that does not fit
        """
        styles = [as_tensor(y) for y in styles]
        noises = [as_tensor(n) for n in noises]
        self._check(styles,noises)
        x = self.const
        for l,(conv,width,r) in enumerate(zip(self.convs,self.config.channels,RESOLUTIONS)):
            if x.shape[-1] < r:
                x = upsample_nearest(x,r//x.shape[-1])
            x = conv(x)
            x = leaky_relu(add(x,reshape(noises[l],(-1,1,r,r))))
            y = styles[l]
            x = adain(x,getitem(y,(Ellipsis,slice(0,width))),getitem(y,(Ellipsis,slice(width,2*width))))
        return tanh(self.to_rgb(x))

    def generate(self,z,unit_noises):
        """
        Differentiable path from z and unit noise to images, through all
        parameters including the noise strengths. Used for training.

        :param z: batch of latents (N,latent_dim)
        :param unit_noises: per-layer unit Gaussian maps (N,r,r)
        :rtype: Tensor
        """
        styles = self.styles_from_w(self.map_latent(z))
        noises = [mul(getitem(self.noise_strength,l),n) for l,n in enumerate(unit_noises)]
        return self.synthesize(styles,noises)

    def __call__(self,state):
        return self.synthesize(state.styles,state.noises)

class ProceduralGeneratorConfig(Options):
    section = 'models.procedural_generator'
    defaults = OrderedDict([
        ('class_index',0),
        ('classes',4),
        ('noise_scale',0.1),
        ('image_size',32),
        ('seed',0),
    ])

    def validate(self):
        self.require(1 <= self.classes <= len(SHAPES),'classes',
                     "between 1 and %d classes are supported" % len(SHAPES))
        self.require(0 <= self.class_index < self.classes,'class_index',"outside [0,classes)")
        self.require(self.image_size == RESOLUTIONS[-1],'image_size',
                     "only %d pixels are supported" % RESOLUTIONS[-1])

STYLE_WIDTH = 6
"style vector length of every procedural generator layer"

class ProceduralGenerator(Model):
    """
    Fixed smooth generator of one class's shape, with the latent schema of
    the style-based generator. Layers 0-1 place and size the shape, layers
    2-5 color the shape and the background, layers 6-7 weight a fixed
    family of stripe textures. Noise maps are upsampled and added before
    the final tanh.
    """
    kind = 'procedural-generator'
    config_class = ProceduralGeneratorConfig

    def build(self,rng):
        size = self.config.image_size
        self.rows,self.cols = coordinate_grid(size)
        patterns = []
        for j in range(2*STYLE_WIDTH):
            theta = j*np.pi/(2*STYLE_WIDTH)
            freq = 1.5 + j % 3
            phase = np.cos(theta)*self.cols + np.sin(theta)*self.rows
            patterns.append(np.sin(np.pi*freq*phase))
        self.patterns = patterns

    @classmethod
    def family(cls,classes=4,**kwargs):
        "one generator per class"
        return [cls(class_index=c,classes=classes,**kwargs) for c in range(classes)]

    @property
    def schema(self):
        return LatentSchema([STYLE_WIDTH]*len(RESOLUTIONS),[(r,r) for r in RESOLUTIONS])

    @property
    def num_layers(self):
        return len(RESOLUTIONS)

    @property
    def class_index(self):
        return self.config.class_index

    @property
    def shape(self):
        return SHAPES[self.config.class_index]

    def sample_noise(self,seed):
        rng = np.random.default_rng(seed)
        return [(self.config.noise_scale*rng.standard_normal((r,r))).astype(get_dtype())
                for r in RESOLUTIONS]

    def sample_latent(self,seed):
        rng = np.random.default_rng([seed,0])
        styles = [0.5*rng.standard_normal(STYLE_WIDTH) for _ in RESOLUTIONS]
        return LatentState(styles,self.sample_noise([seed,1]))

    def synthesize(self,styles,noises):
        """
        Render images from style vectors and noise maps.

        :rtype: Tensor of shape (N,3,32,32) with values in [-1,1]
        :raises ShapeError: naming the first layer that does not fit
        """
        y = [as_tensor(s) for s in styles]
        noises = [as_tensor(n) for n in noises]
        if len(y) != self.num_layers or len(noises) != self.num_layers:
            raise ShapeError('synthesize',(len(y),),(len(noises),),(self.num_layers,))
        for l,(s,n,r) in enumerate(zip(y,noises,RESOLUTIONS)):
            if s.shape[-1] != STYLE_WIDTH:
                raise ShapeError('synthesize[layer %d] style' % l,s.shape,(STYLE_WIDTH,))
            if n.shape[-2:] != (r,r):
                raise ShapeError('synthesize[layer %d] noise' % l,n.shape,(r,r))

        def comp(l,i):
            return reshape(getitem(y[l],(Ellipsis,i)),(-1,1,1,1))

        def rgb(l,lo):
            return reshape(getitem(y[l],(Ellipsis,slice(lo,lo + 3))),(-1,3,1,1))

        def pair(l,i):
            return add(comp(l,i),comp(l + 1,i))

        cy = scale(tanh(pair(0,0)),0.35)
        cx = scale(tanh(pair(0,1)),0.35)
        inv_size = add(scale(tanh(pair(0,2)),0.4),2.2)
        aspect = add(scale(tanh(sub(comp(0,3),comp(1,3))),0.2),1.)
        sharpness = add(scale(tanh(pair(0,4)),2.),10.)
        shade = scale(tanh(pair(0,5)),0.2)

        u = mul(mul(sub(self.cols,cx),inv_size),aspect)
        v = mul(sub(self.rows,cy),inv_size)
        mask = shape_mask(u,v,self.shape,sharpness)

        fg = scale(tanh(add(add(rgb(2,0),rgb(3,0)),scale(sub(rgb(2,3),rgb(3,3)),0.5))),0.9)
        fg = mul(fg,add(mul(shade,self.cols),1.))
        bg = scale(tanh(add(add(rgb(4,0),rgb(5,0)),scale(sub(rgb(4,3),rgb(5,3)),0.5))),0.5)

        x = add(mul(mask,fg),mul(sub(1.,mask),bg))
        for j,pattern in enumerate(self.patterns):
            layer = 6 + j // STYLE_WIDTH
            x = add(x,mul(scale(tanh(comp(layer,j % STYLE_WIDTH)),0.08),pattern))
        size = self.config.image_size
        for n,r in zip(noises,RESOLUTIONS):
            n = reshape(n,(-1,1,r,r))
            if r < size:
                n = upsample_nearest(n,size//r)
            x = add(x,n)
        return tanh(x)

    def __call__(self,state):
        return self.synthesize(state.styles,state.noises)

class ClassifierConfig(Options):
    section = 'models.classifier'
    defaults = OrderedDict([
        ('channels',[32,64,128]),
        ('classes',4),
        ('image_size',32),
        ('seed',0),
    ])

    def validate(self):
        self.require(self.classes >= 2,'classes',"at least 2 classes are needed")
        self.require(len(self.channels) >= 1,'channels',"at least one block is needed")
        self.require(self.image_size % 2**len(self.channels) == 0,'image_size',
                     "must be divisible by %d" % 2**len(self.channels))

class Classifier(Model):
    """
    Convolutional classifier: blocks of convolution, leaky ReLU and 2x
    average pooling, followed by a fully connected head.
    """
    kind = 'classifier'
    config_class = ClassifierConfig

    def build(self,rng):
        c = self.config
        self.blocks = []
        c_in = 3
        for i,width in enumerate(c.channels):
            self.blocks.append(self.add_module('block%d' % i,Conv2d(rng,c_in,width)))
            c_in = width
        side = c.image_size//2**len(c.channels)
        self.head = self.add_module('head',Linear(rng,c_in*side*side,c.classes,gain=1.))

    @property
    def classes(self):
        return self.config.classes

    def features(self,x):
        """
        Activations after every block

        :rtype: list of Tensors
        """
        x = images(x,'classifier')
        feats = []
        for conv in self.blocks:
            x = avg_pool2d(leaky_relu(conv(x)))
            feats.append(x)
        return feats

    def logits(self,x):
        """
        Class scores before the softmax

        :param x: images (N,3,H,W) or a single image (3,H,W)
        :rtype: Tensor of shape (N,K)
        """
        last = self.features(x)[-1]
        return self.head(reshape(last,(last.shape[0],-1)))

    __call__ = logits

    def classify(self,x):
        """
        Probability distribution over classes

        :rtype: array of shape (N,K)
        """
        return softmax(self.logits(x)).data

    def predict(self,x):
        "most likely class per image"
        return np.argmax(self.logits(x).data,axis=1)

class DiscriminatorConfig(Options):
    section = 'models.discriminator'
    defaults = OrderedDict([
        ('channels',[16,32,64]),
        ('image_size',32),
        ('seed',0),
    ])

class Discriminator(Model):
    """
    Three convolutional blocks and a linear head scoring real versus
    generated images.
    """
    kind = 'discriminator'
    config_class = DiscriminatorConfig

    def build(self,rng):
        c = self.config
        self.blocks = []
        c_in = 3
        for i,width in enumerate(c.channels):
            self.blocks.append(self.add_module('block%d' % i,Conv2d(rng,c_in,width)))
            c_in = width
        side = c.image_size//2**len(c.channels)
        self.head = self.add_module('head',Linear(rng,c_in*side*side,1,gain=1.))

    def __call__(self,x):
        "one score per image, as Tensor of shape (N,)"
        x = images(x,'discriminator')
        for conv in self.blocks:
            x = avg_pool2d(leaky_relu(conv(x)))
        return reshape(self.head(reshape(x,(x.shape[0],-1))),(-1,))

class SpadeGeneratorConfig(Options):
    section = 'models.spade_generator'
    defaults = OrderedDict([
        ('label_classes',5),
        ('latent_dim',64),
        ('embed_channels',16),
        ('channels',[32,32,32,32,16,16,16,16]),
        ('seed',0),
    ])

    def validate(self):
        self.require(self.label_classes >= 2,'label_classes',"at least 2 classes are needed")
        _check_channels(self,'channels')

class SpadeGenerator(Model):
    """
    Layout conditioned generator. The one-hot layout is embedded by a
    convolution and per-layer heads turn the embedding into spatially varying
    modulation maps gamma and beta, which scale and shift the normalized
    activations of the synthesis trunk.
    """
    kind = 'spade-generator'
    config_class = SpadeGeneratorConfig

    def build(self,rng):
        c = self.config
        self.embed = self.add_module('embed',Conv2d(rng,c.label_classes,c.embed_channels))
        r0 = RESOLUTIONS[0]
        self.fc = self.add_module('fc',Linear(rng,c.latent_dim,c.channels[0]*r0*r0))
        self.convs = []
        self.gamma_heads = []
        self.beta_heads = []
        c_in = c.channels[0]
        for l,width in enumerate(c.channels):
            self.convs.append(self.add_module('conv%d' % l,Conv2d(rng,c_in,width)))
            self.gamma_heads.append(self.add_module('gamma%d' % l,Conv2d(rng,c.embed_channels,width,gain=0.5)))
            self.beta_heads.append(self.add_module('beta%d' % l,Conv2d(rng,c.embed_channels,width,gain=0.5)))
            c_in = width
        self.to_rgb = self.add_module('to_rgb',Conv2d(rng,c_in,3,size=1,gain=1.))

    @property
    def num_layers(self):
        return len(RESOLUTIONS)

    def sample_z(self,seed):
        return np.random.default_rng(seed).standard_normal(self.config.latent_dim).astype(get_dtype())

    def spade_modulation(self,layout):
        """
        Modulation maps for every layer

        :param layout: label map (N,H,W) or (H,W), or a one-hot array (N,K,H,W)
        :returns: tuple of the list of gamma maps and the list of beta maps,
                  each of shape (N,C_l,r_l,r_l)
        """
        if np.ndim(getattr(layout,'data',layout)) == 4:
            x = images(layout,'spade_modulation',self.config.label_classes)
        else:
            x = as_tensor(one_hot(layout,self.config.label_classes))
        if x.shape[-1] != RESOLUTIONS[-1]:
            raise ShapeError('spade_modulation',x.shape,(RESOLUTIONS[-1],RESOLUTIONS[-1]))
        e = leaky_relu(self.embed(x))
        pooled = {e.shape[-1] : e}
        gammas,betas = [],[]
        for l,r in enumerate(RESOLUTIONS):
            while r not in pooled:
                smallest = min(pooled)
                pooled[smallest//2] = avg_pool2d(pooled[smallest])
            gammas.append(self.gamma_heads[l](pooled[r]))
            betas.append(self.beta_heads[l](pooled[r]))
        return gammas,betas

    def spade_synthesize(self,gammas,betas,z):
        """
        Render images from modulation maps and a latent

        :param z: latent of length latent_dim, or a batch of them
        :rtype: Tensor of shape (N,3,32,32) with values in [-1,1]
        :raises ShapeError: naming the first layer that does not fit
        """
        gammas = [as_tensor(g) for g in gammas]
        betas = [as_tensor(b) for b in betas]
        z = as_tensor(z)
        if len(gammas) != self.num_layers or len(betas) != self.num_layers:
            raise ShapeError('spade_synthesize',(len(gammas),),(len(betas),),(self.num_layers,))
        if z.shape[-1] != self.config.latent_dim:
            raise ShapeError('spade_synthesize',z.shape,(self.config.latent_dim,))
        r0 = RESOLUTIONS[0]
        x = reshape(self.fc(reshape(z,(-1,self.config.latent_dim))),(-1,self.config.channels[0],r0,r0))
        for l,(conv,width,r) in enumerate(zip(self.convs,self.config.channels,RESOLUTIONS)):
            for name,m in (('gamma',gammas[l]),('beta',betas[l])):
                if m.ndim != 4 or m.shape[1:] != (width,r,r):
                    raise ShapeError('spade_synthesize[layer %d] %s' % (l,name),m.shape,(width,r,r))
            if x.shape[-1] < r:
                x = upsample_nearest(x,r//x.shape[-1])
            x = instance_normalize(conv(x))
            x = leaky_relu(add(mul(x,add(gammas[l],1.)),betas[l]))
        return tanh(self.to_rgb(x))

    def __call__(self,layout,z):
        gammas,betas = self.spade_modulation(layout)
        return self.spade_synthesize(gammas,betas,z)

class SegmenterConfig(Options):
    section = 'models.segmenter'
    defaults = OrderedDict([
        ('label_classes',5),
        ('channels',[16,32,64]),
        ('seed',0),
    ])

    def validate(self):
        self.require(self.label_classes >= 2,'label_classes',"at least 2 classes are needed")
        self.require(len(self.channels) == 3,'channels',"expected 3 level widths")

class Segmenter(Model):
    """
    Three level encoder-decoder with skip connections, predicting per-pixel
    class scores at the input resolution.
    """
    kind = 'segmenter'
    config_class = SegmenterConfig

    def build(self,rng):
        c1,c2,c3 = self.config.channels
        self.enc1 = self.add_module('enc1',Conv2d(rng,3,c1))
        self.enc2 = self.add_module('enc2',Conv2d(rng,c1,c2))
        self.enc3 = self.add_module('enc3',Conv2d(rng,c2,c3))
        self.dec2 = self.add_module('dec2',Conv2d(rng,c3 + c2,c2))
        self.dec1 = self.add_module('dec1',Conv2d(rng,c2 + c1,c1))
        self.out = self.add_module('out',Conv2d(rng,c1,self.config.label_classes,size=1,gain=1.))

    @property
    def label_classes(self):
        return self.config.label_classes

    def logits(self,x):
        """
        Per-pixel class scores

        :rtype: Tensor of shape (N,K_s,H,W)
        :raises ShapeError: if H or W is not divisible by 4
        """
        x = images(x,'segmenter')
        if x.shape[2] % 4 or x.shape[3] % 4:
            raise ShapeError('segmenter',x.shape)
        e1 = leaky_relu(self.enc1(x))
        e2 = leaky_relu(self.enc2(avg_pool2d(e1)))
        e3 = leaky_relu(self.enc3(avg_pool2d(e2)))
        d2 = leaky_relu(self.dec2(concat([upsample_nearest(e3),e2],axis=1)))
        d1 = leaky_relu(self.dec1(concat([upsample_nearest(d2),e1],axis=1)))
        return self.out(d1)

    __call__ = logits

    def segment(self,x):
        """
        Per-pixel probability distributions over label classes

        :rtype: array of shape (N,K_s,H,W)
        """
        return softmax(self.logits(x),axis=1).data

    def predict(self,x):
        "label map of shape (N,H,W)"
        return np.argmax(self.logits(x).data,axis=1)

MODEL_CLASSES = OrderedDict((cls.kind,cls) for cls in
    (StyleGenerator,ProceduralGenerator,Classifier,Discriminator,SpadeGenerator,Segmenter))
"model classes by descriptor kind"

def build_model(descriptor):
    """
    Create an untrained model from an architecture descriptor

    :param dict descriptor: dictionary with kind and config
    :rtype: Model
    :raises ConfigError: for unknown kinds or config keys
    """
    kind = descriptor.get('kind')
    if kind not in MODEL_CLASSES:
        raise ConfigError('kind',"Unknown model kind: %s" % kind)
    return MODEL_CLASSES[kind](**descriptor.get('config',{}))
