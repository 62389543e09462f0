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
This module defines the checkpoint container for model parameters.

A checkpoint starts with the magic bytes ``GATC``, a little-endian u16
format version and a u32 length, followed by that many bytes of UTF-8 JSON
with the architecture descriptor, the training metadata and the parameter
manifest. The rest of the file is the parameter payload as little-endian
32-bit floats in declaration order.
"""
import json
import logging
import struct
from collections import OrderedDict

import numpy as np

from latentadversary import FormatError
from latentadversary.models import build_model

logger = logging.getLogger(__name__)

MAGIC = b'GATC'
VERSION = 1
_HEADER = struct.Struct('<4sHI')

def save_checkpoint(model,filename,metadata=None):
    """
    Write a model to a checkpoint file

    Parameters are stored as 32-bit floats. Models in run precision round
    trip bit for bit; float64 parameters of test precision are rounded.

    :param Model model: the model to save
    :param str filename: output file
    :param dict metadata: training metadata, defaults to model.metadata
    """
    if metadata is None:
        metadata = model.metadata
    params = list(model.named_parameters())
    blob = OrderedDict([
        ('descriptor',model.descriptor()),
        ('metadata',metadata),
        ('parameters',[[name,list(t.shape)] for name,t in params]),
    ])
    text = json.dumps(blob).encode('utf-8')
    with open(filename,'wb') as fid:
        fid.write(_HEADER.pack(MAGIC,VERSION,len(text)))
        fid.write(text)
        for _,tensor in params:
            fid.write(np.ascontiguousarray(tensor.data,dtype='<f4').tobytes())
    logger.info("Saved %s with %d parameters to %s",model.kind,model.num_parameters(),filename)

def read_checkpoint(filename):
    """
    Read the raw content of a checkpoint file

    :returns: tuple of the JSON blob and an OrderedDict of parameter arrays
    :raises FormatError: for bad magic, version or lengths
    """
    with open(filename,'rb') as fid:
        data = fid.read()
    if len(data) < _HEADER.size:
        raise FormatError("%s: truncated header" % filename)
    magic,version,length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError("%s: bad magic %r, expected %r" % (filename,magic,MAGIC))
    if version != VERSION:
        raise FormatError("%s: unsupported checkpoint version %d" % (filename,version))
    start = _HEADER.size
    if len(data) < start + length:
        raise FormatError("%s: truncated descriptor" % filename)
    try:
        blob = json.loads(data[start:start + length].decode('utf-8'),object_pairs_hook=OrderedDict)
    except ValueError as e:
        raise FormatError("%s: malformed descriptor: %s" % (filename,e))
    offset = start + length
    state = OrderedDict()
    for name,shape in blob['parameters']:
        count = int(np.prod(shape,dtype=int))
        end = offset + 4*count
        if end > len(data):
            raise FormatError("%s: payload too short for parameter %s" % (filename,name))
        state[name] = np.frombuffer(data[offset:end],dtype='<f4').reshape(shape)
        offset = end
    if offset != len(data):
        raise FormatError("%s: %d trailing bytes after payload" % (filename,len(data) - offset))
    return blob,state

def load_checkpoint(filename,kind=None):
    """
    Rebuild a model from a checkpoint file

    :param str filename: checkpoint to read
    :param str kind: expected model kind, checked if given
    :rtype: Model
    :raises FormatError: for malformed files or unexpected kinds
    """
    blob,state = read_checkpoint(filename)
    descriptor = blob['descriptor']
    if kind is not None and descriptor.get('kind') != kind:
        raise FormatError("%s: expected a %s, found a %s" % (filename,kind,descriptor.get('kind')))
    model = build_model(descriptor)
    names = [n for n,_ in model.named_parameters()]
    if names != list(state):
        raise FormatError("%s: parameter names do not match the architecture" % filename)
    try:
        model.load_state(state)
    except ValueError as e:
        raise FormatError("%s: %s" % (filename,e))
    model.metadata = OrderedDict(blob.get('metadata') or {})
    logger.debug("Loaded %s from %s",model.kind,filename)
    return model

def load_generators(paths):
    """
    Load the per-class generator set. Generator i must have class index i.

    :param sequence paths: one checkpoint per class, in class order
    :rtype: list of StyleGenerators
    :raises FormatError: if class indices do not match the order
    """
    generators = [load_checkpoint(p,'style-generator') for p in paths]
    for i,(path,generator) in enumerate(zip(paths,generators)):
        if generator.class_index != i:
            raise FormatError("%s: generator has class %d, expected %d" %
                              (path,generator.class_index,i))
    return generators
