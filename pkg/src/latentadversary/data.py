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
This module defines the procedural shapes datasets and their file format.

Every image shows exactly one class defining shape. Hue, position, size,
background level and texture are drawn from a random stream that depends
only on the seed and the sample index, never on the label.
"""
import colorsys
import json
import logging
import struct
from collections import OrderedDict

import numpy as np

from latentadversary import ConfigError, FormatError
from latentadversary.config import Options
from latentadversary.models import SHAPES, shape_mask, coordinate_grid
from latentadversary.tensor import Tensor
from latentadversary.workers import parallel_map

logger = logging.getLogger(__name__)

TEXTURES = ('stripes','checker')
"background texture families"

class SynthSpec(Options):
    """
    Distribution of a procedural dataset. The in-domain and out-of-domain
    variants share the classes but use disjoint hue ranges and different
    texture families.
    """
    section = 'data'
    defaults = OrderedDict([
        ('classes',4),
        ('image_size',32),
        ('train_size',4000),
        ('test_size',1000),
        ('ood_size',1000),
        ('hue_range',[0.,0.5]),
        ('ood_hue_range',[0.5,1.]),
        ('saturation_range',[0.6,1.]),
        ('value_range',[0.7,1.]),
        ('background_range',[-0.8,0.]),
        ('center_range',0.35),
        ('inverse_size_range',[1.9,2.6]),
        ('texture','stripes'),
        ('ood_texture','checker'),
        ('texture_amplitude',0.15),
        ('pixel_noise',0.03),
        ('edge_sharpness',12.),
        ('seed',0),
    ])

    def validate(self):
        self.require(1 <= self.classes <= len(SHAPES),'classes',
                     "between 1 and %d classes are supported" % len(SHAPES))
        self.require(self.image_size == 32,'image_size',"only 32 pixels are supported")
        for name in ('train_size','test_size','ood_size'):
            self.require(int(getattr(self,name)) >= 1,name,"must be at least 1")
        for name in ('hue_range','ood_hue_range','saturation_range','value_range',
                     'background_range','inverse_size_range'):
            lo,hi = getattr(self,name)
            self.require(lo <= hi,name,"lower bound exceeds upper bound")
        for name in ('texture','ood_texture'):
            self.require(getattr(self,name) in TEXTURES,name,
                         "Unknown texture: %s" % getattr(self,name))
        a,b = self.hue_range,self.ood_hue_range
        self.require(a[1] <= b[0] or b[1] <= a[0],'ood_hue_range',
                     "must be disjoint from hue_range")

class Dataset(object):
    """
    Images with class labels, optional segmentation layouts and a provenance
    record per image.
    """
    def __init__(self,images,labels,classes,layouts=None,provenance=None):
        """
        Create a new Dataset

        :param images: array (n,3,H,W) with values in [-1,1]
        :param labels: integer array (n,)
        :param int classes: number of classes K
        :param layouts: optional label maps (n,H,W), 0 is background and
                        k+1 marks the shape of class k
        :param list provenance: optional per-image dictionaries
        :raises ValueError: for misaligned arrays or labels outside [0,K)
        """
        self.images = np.asarray(images,dtype=np.float32)
        "pixel array (n,3,H,W)"
        self.labels = np.asarray(labels,dtype=np.int64)
        "class labels (n,)"
        self.classes = int(classes)
        "number of classes"
        self.layouts = None if layouts is None else np.asarray(layouts,dtype=np.uint8)
        "label maps (n,H,W) or None"
        self.provenance = list(provenance) if provenance is not None else [{} for _ in self.labels]
        "list of per-image dictionaries"
        n = len(self.labels)
        if self.images.ndim != 4 or self.images.shape[0] != n:
            raise ValueError("Images of shape %s do not match %d labels" % (self.images.shape,n))
        if self.layouts is not None and self.layouts.shape != (n,) + self.images.shape[2:]:
            raise ValueError("Layouts of shape %s do not match images" % (self.layouts.shape,))
        if len(self.provenance) != n:
            raise ValueError("Got %d provenance records for %d images" % (len(self.provenance),n))
        if n and (self.labels.min() < 0 or self.labels.max() >= self.classes):
            raise ValueError("Labels outside [0,%d)" % self.classes)

    def __len__(self):
        return len(self.labels)

    @property
    def label_classes(self):
        "number of layout classes, background included"
        return self.classes + 1

    def subset(self,indices):
        indices = np.asarray(indices,dtype=int)
        return Dataset(
            self.images[indices],
            self.labels[indices],
            self.classes,
            None if self.layouts is None else self.layouts[indices],
            [self.provenance[i] for i in indices]
        )

    def class_slice(self,label):
        "all samples of one class"
        return self.subset(np.flatnonzero(self.labels == label))

    def batches(self,batch_size,rng):
        """
        Iterate over index arrays of a random permutation

        :param int batch_size: samples per batch, the last batch may be smaller
        :param rng: numpy Generator for the permutation
        """
        order = rng.permutation(len(self))
        for start in range(0,len(order),batch_size):
            yield order[start:start + batch_size]

    def equals(self,other):
        "bit-exact comparison of all arrays and records"
        return self.classes == other.classes and \
            np.array_equal(self.images,other.images) and \
            np.array_equal(self.labels,other.labels) and \
            ((self.layouts is None and other.layouts is None) or
             (self.layouts is not None and other.layouts is not None and
              np.array_equal(self.layouts,other.layouts))) and \
            self.provenance == other.provenance

    def save(self,filename):
        """
        Write the dataset as GATD container and a JSON-lines provenance
        sidecar at filename + '.jsonl'
        """
        save_dataset(self,filename)

    @classmethod
    def load(cls,filename):
        return load_dataset(filename)

    def __repr__(self):
        return "Dataset(%d images, %d classes%s)" % \
            (len(self),self.classes,", with layouts" if self.layouts is not None else "")

def _uniform(rng,bounds):
    return float(rng.uniform(bounds[0],bounds[1]))

def draw_nuisance(spec,index,ood=False):
    """
    Draw the nuisance factors of one sample. They depend on the seed, the
    index and the domain only.

    :rtype: dict
    """
    rng = np.random.default_rng([spec.seed,index,1 if ood else 0])
    c = spec.center_range
    return OrderedDict([
        ('hue',_uniform(rng,spec.ood_hue_range if ood else spec.hue_range)),
        ('saturation',_uniform(rng,spec.saturation_range)),
        ('value',_uniform(rng,spec.value_range)),
        ('background',_uniform(rng,spec.background_range)),
        ('center',[float(rng.uniform(-c,c)),float(rng.uniform(-c,c))]),
        ('inverse_size',_uniform(rng,spec.inverse_size_range)),
        ('aspect',float(rng.uniform(0.85,1.15))),
        ('texture',spec.ood_texture if ood else spec.texture),
        ('texture_angle',float(rng.uniform(0.,np.pi))),
        ('texture_frequency',float(rng.uniform(1.5,4.))),
        ('texture_phase',float(rng.uniform(0.,2*np.pi))),
        ('noise_seed',int(rng.integers(2**31))),
    ])

def _texture(kind,rows,cols,angle,freq,phase):
    a = np.cos(angle)*cols + np.sin(angle)*rows
    if kind == 'stripes':
        return np.sin(np.pi*freq*a + phase)
    elif kind == 'checker':
        b = -np.sin(angle)*cols + np.cos(angle)*rows
        return np.sign(np.sin(np.pi*freq*a + phase)*np.sin(np.pi*freq*b + phase))
    else:
        raise ValueError("Unknown texture: %s" % kind)

def render_sample(spec,label,nuisance):
    """
    Render one image and its layout

    :returns: tuple of image (3,H,W) and layout (H,W)
    """
    size = spec.image_size
    rows,cols = coordinate_grid(size)
    rows,cols = rows[0,0],cols[0,0]
    cy,cx = nuisance['center']
    u = (cols - cx)*nuisance['inverse_size']*nuisance['aspect']
    v = (rows - cy)*nuisance['inverse_size']
    mask = np.asarray(shape_mask(Tensor(u),Tensor(v),SHAPES[label],spec.edge_sharpness).data,dtype=np.float64)

    fg = 2*np.array(colorsys.hsv_to_rgb(nuisance['hue'],nuisance['saturation'],nuisance['value'])) - 1
    texture = spec.texture_amplitude*_texture(nuisance['texture'],rows,cols,
        nuisance['texture_angle'],nuisance['texture_frequency'],nuisance['texture_phase'])
    bg = nuisance['background'] + texture
    image = mask*fg[:,None,None] + (1 - mask)*bg[None]
    noise = np.random.default_rng(nuisance['noise_seed']).standard_normal(image.shape)
    image = np.clip(image + spec.pixel_noise*noise,-1.,1.)
    layout = np.where(mask > 0.5,label + 1,0).astype(np.uint8)
    return image.astype(np.float32),layout

def balanced_labels(spec,n,stream=0):
    """
    Labels i % K in a seeded random order, so that class counts differ by at
    most one.
    """
    labels = np.arange(n) % spec.classes
    return np.random.default_rng([spec.seed,2**20 + stream]).permutation(labels)

def _synthesize(spec,n,ood,offset,threads):
    if n <= 0:
        raise ConfigError('data.n',"number of samples must be positive, got %d" % n)
    labels = balanced_labels(spec,n,offset + (1 if ood else 0))

    def make(i):
        nuisance = draw_nuisance(spec,offset + i,ood)
        image,layout = render_sample(spec,int(labels[i]),nuisance)
        record = OrderedDict([('index',offset + i),('label',int(labels[i])),
                              ('shape',SHAPES[labels[i]]),('domain','ood' if ood else 'in')])
        record.update(nuisance)
        return image,layout,record

    results = parallel_map(make,range(n),threads,desc='synthesize')
    logger.info("Synthesized %d %s images",n,'out-of-domain' if ood else 'in-domain')
    return Dataset(
        np.stack([r[0] for r in results]),
        labels,
        spec.classes,
        np.stack([r[1] for r in results]),
        [r[2] for r in results]
    )

def synth_dataset(spec,n,offset=0,threads=1):
    """
    Synthesize an in-domain dataset.

    :param SynthSpec spec: distribution and seed
    :param int n: number of samples
    :param int offset: index of the first sample, so that disjoint splits
                       can be drawn from one spec
    :param int threads: worker threads
    :rtype: Dataset
    :raises ConfigError: if n is not positive
    """
    return _synthesize(spec,n,False,offset,threads)

def synth_ood_dataset(spec,n=None,threads=1):
    """
    Synthesize an out-of-domain dataset with the same classes and shifted
    nuisance distributions.

    :param int n: number of samples, defaults to spec.ood_size
    :rtype: Dataset
    """
    return _synthesize(spec,spec.ood_size if n is None else n,True,0,threads)

def synth_splits(spec,threads=1):
    "train and test datasets with disjoint sample indices"
    train = synth_dataset(spec,spec.train_size,0,threads)
    test = synth_dataset(spec,spec.test_size,spec.train_size,threads)
    return train,test

def label_nuisance_information(spec,n=10000,bins=8):
    """
    Plug-in estimate of the mutual information in nats between the label
    and the hue bin of n in-domain samples.

    :rtype: float
    """
    labels = balanced_labels(spec,n)
    lo,hi = spec.hue_range
    hues = np.array([draw_nuisance(spec,i)['hue'] for i in range(n)])
    hue_bins = np.minimum(((hues - lo)/max(hi - lo,1e-12)*bins).astype(int),bins - 1)
    joint = np.zeros((spec.classes,bins))
    np.add.at(joint,(labels,hue_bins),1.)
    joint /= joint.sum()
    outer = joint.sum(axis=1,keepdims=True)*joint.sum(axis=0,keepdims=True)
    nonzero = joint > 0
    return float((joint[nonzero]*np.log(joint[nonzero]/outer[nonzero])).sum())

def nearest_centroid_accuracy(train,test):
    """
    Accuracy of a nearest class centroid classifier on raw pixels

    :rtype: float
    """
    flat = train.images.reshape(len(train),-1).astype(np.float64)
    centroids = np.stack([flat[train.labels == c].mean(axis=0) for c in range(train.classes)])
    queries = test.images.reshape(len(test),-1).astype(np.float64)
    dist = ((queries[:,None,:] - centroids[None])**2).sum(axis=2)
    return float(np.mean(dist.argmin(axis=1) == test.labels))

MAGIC = b'GATD'
VERSION = 1
_HEADER = struct.Struct('<4sHIHHHHB')

def save_dataset(dataset,filename):
    """
    Write a dataset as GATD container: magic, u16 version, u32 count, u16
    height, width, channels and classes, u8 layout flag, then the int32
    labels, the optional uint8 layouts and the float32 pixels, all little
    endian. Provenance goes to a JSON-lines sidecar filename + '.jsonl'.
    """
    n,c,h,w = dataset.images.shape
    has_layouts = dataset.layouts is not None
    with open(filename,'wb') as fid:
        fid.write(_HEADER.pack(MAGIC,VERSION,n,h,w,c,dataset.classes,int(has_layouts)))
        fid.write(dataset.labels.astype('<i4').tobytes())
        if has_layouts:
            fid.write(dataset.layouts.astype(np.uint8).tobytes())
        fid.write(dataset.images.astype('<f4').tobytes())
    with open(filename + '.jsonl','w') as fid:
        for record in dataset.provenance:
            fid.write(json.dumps(record) + '\n')
    logger.info("Saved %r to %s",dataset,filename)

def load_dataset(filename):
    """
    Read a GATD container and its sidecar, if present

    :rtype: Dataset
    :raises FormatError: for bad magic, version or lengths
    """
    with open(filename,'rb') as fid:
        data = fid.read()
    if len(data) < _HEADER.size:
        raise FormatError("%s: truncated header" % filename)
    magic,version,n,h,w,c,classes,has_layouts = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError("%s: bad magic %r, expected %r" % (filename,magic,MAGIC))
    if version != VERSION:
        raise FormatError("%s: unsupported dataset version %d" % (filename,version))
    sizes = [4*n,n*h*w if has_layouts else 0,4*n*c*h*w]
    if len(data) != _HEADER.size + sum(sizes):
        raise FormatError("%s: expected %d bytes, found %d" %
                          (filename,_HEADER.size + sum(sizes),len(data)))
    offset = _HEADER.size
    labels = np.frombuffer(data[offset:offset + sizes[0]],dtype='<i4').astype(np.int64)
    offset += sizes[0]
    layouts = None
    if has_layouts:
        layouts = np.frombuffer(data[offset:offset + sizes[1]],dtype=np.uint8).reshape(n,h,w)
    offset += sizes[1]
    images = np.frombuffer(data[offset:],dtype='<f4').reshape(n,c,h,w)
    provenance = None
    try:
        with open(filename + '.jsonl') as fid:
            provenance = [json.loads(line,object_pairs_hook=OrderedDict) for line in fid if line.strip()]
    except IOError:
        logger.warning("No provenance sidecar for %s",filename)
    try:
        return Dataset(images.copy(),labels,classes,None if layouts is None else layouts.copy(),provenance)
    except ValueError as e:
        raise FormatError("%s: %s" % (filename,e))
