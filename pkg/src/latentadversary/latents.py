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
This module defines the latent variables of style-based generators
"""
import numpy as np

from latentadversary import ShapeError
from latentadversary.tensor import Tensor, get_dtype

class LatentSchema(object):
    """
    Shapes of the per-layer style vectors and noise maps of a generator.
    """
    def __init__(self,style_sizes,noise_shapes):
        """
        Create a new LatentSchema

        :param sequence style_sizes: length of the style vector of each layer
        :param sequence noise_shapes: (height,width) of each noise map
        :raises ValueError: if the number of layers differ
        """
        if len(style_sizes) != len(noise_shapes):
            raise ValueError("Schema has %d style layers but %d noise layers" %
                             (len(style_sizes),len(noise_shapes)))
        self.style_sizes = tuple(int(s) for s in style_sizes)
        "length of the style vector per layer"
        self.noise_shapes = tuple(tuple(s) for s in noise_shapes)
        "shape of the noise map per layer"

    @property
    def num_layers(self):
        return len(self.style_sizes)

    def __eq__(self,other):
        return isinstance(other,LatentSchema) and \
               self.style_sizes == other.style_sizes and \
               self.noise_shapes == other.noise_shapes

    def __ne__(self,other):
        return not self == other

    def __repr__(self):
        return "LatentSchema(%s, %s)" % (self.style_sizes,self.noise_shapes)

class LatentState(object):
    """
    Style vectors y and noise maps eta for every layer of a generator.
    """
    def __init__(self,styles,noises):
        """
        Create a new LatentState. The arrays are copied.

        :param sequence styles: one style vector per layer
        :param sequence noises: one noise map per layer
        """
        self.styles = [np.array(s.data if isinstance(s,Tensor) else s,dtype=get_dtype()) for s in styles]
        "list of style vectors"
        self.noises = [np.array(n.data if isinstance(n,Tensor) else n,dtype=get_dtype()) for n in noises]
        "list of noise maps"

    @property
    def num_layers(self):
        return len(self.styles)

    def copy(self):
        return LatentState(self.styles,self.noises)

    def validate(self,schema):
        """
        Check that this state fits a generator

        :param LatentSchema schema: the generator's schema
        :raises ShapeError: naming the first layer that does not fit
        """
        if len(self.styles) != schema.num_layers or len(self.noises) != schema.num_layers:
            raise ShapeError('latent layers',(len(self.styles),),(schema.num_layers,))
        for l,(s,size) in enumerate(zip(self.styles,schema.style_sizes)):
            if s.shape != (size,):
                raise ShapeError('style[%d]' % l,s.shape,(size,))
        for l,(n,shape) in enumerate(zip(self.noises,schema.noise_shapes)):
            if n.shape != shape:
                raise ShapeError('noise[%d]' % l,n.shape,shape)

    def tensors(self):
        "fresh Tensors for all styles and noises, to be watched by a graph"
        return [Tensor(s) for s in self.styles],[Tensor(n) for n in self.noises]

    def same_as(self,other):
        """
        Check for bit-identical values

        :rtype: bool
        """
        return self.num_layers == other.num_layers and \
            all(np.array_equal(a,b) for a,b in zip(self.styles,other.styles)) and \
            all(np.array_equal(a,b) for a,b in zip(self.noises,other.noises))

    def to_dict(self):
        return {
            'styles' : [s.tolist() for s in self.styles],
            'noises' : [n.tolist() for n in self.noises],
        }

    @classmethod
    def from_dict(cls,values):
        return cls(values['styles'],values['noises'])

    def __repr__(self):
        return "LatentState(%d layers)" % self.num_layers
