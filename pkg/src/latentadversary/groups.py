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
This module defines layer groups, contiguous ranges of generator layers whose
latents an attack may modify, and the schedule that rotates over them during
adversarial training
"""
from itertools import tee

from latentadversary import ConfigError

def pairwise(iterable):
    "s -> (s0,s1), (s1,s2), (s2, s3), ..."
    a, b = tee(iterable)
    next(b, None)
    return zip(a, b)

class LayerGroup(object):
    """
    A contiguous range of generator layers, both bounds included.
    """
    def __init__(self,lo,hi):
        """
        Create a new LayerGroup. If hi is smaller than lo, the group is
        assumed to be empty.

        :param int lo: first layer in the group
        :param int hi: last layer in the group
        """
        self.bounds = (int(lo),int(hi))

    @classmethod
    def everything(cls,num_layers):
        """
        Create a new LayerGroup containing all layers of a generator

        :param int num_layers: number of layers of the generator
        """
        return cls(0,num_layers - 1)

    @classmethod
    def single(cls,layer):
        """
        Create a new LayerGroup containing exactly one layer
        """
        return cls(layer,layer)

    @classmethod
    def empty(cls):
        return cls(1,0)

    @classmethod
    def parse(cls,text,num_layers=None):
        """
        Create a new LayerGroup from a string 'lo:hi'. The strings 'all' and
        ':' select all layers.

        :param str text: the group, e.g. '2:5'
        :param int num_layers: number of layers, for validation
        :rtype: LayerGroup
        :raises ConfigError: if the string is malformed or out of range
        """
        text = str(text).strip()
        if text in ('all',':'):
            if num_layers is None:
                raise ConfigError('layers',"'all' needs the number of layers")
            return cls.everything(num_layers)
        try:
            lo,hi = [int(p) for p in text.split(':')]
        except ValueError:
            raise ConfigError('layers',"expected 'lo:hi', got %r" % text)
        group = cls(lo,hi)
        if num_layers is not None:
            group.validate(num_layers)
        return group

    @property
    def lo(self):
        return self.bounds[0]

    @property
    def hi(self):
        return self.bounds[1]

    def validate(self,num_layers):
        """
        Check that 0 <= lo <= hi < num_layers

        :raises ConfigError: if the group does not fit the generator
        """
        if not 0 <= self.lo <= self.hi < num_layers:
            raise ConfigError('layers',"group %s does not fit %d layers" % (self,num_layers))

    def is_empty(self):
        """
        Check whether this group contains no layer.

        :rtype: bool
        """
        return self.hi < self.lo

    def is_disjoint(self,other):
        """
        Check whether two LayerGroups share no layer.

        :param LayerGroup other: the group to check disjointedness with
        :rtype: bool
        """
        if self.is_empty() or other.is_empty():
            return True
        return self.hi < other.lo or other.hi < self.lo

    def intersection(self,other):
        """
        Return a new LayerGroup with the layers that are in both groups

        :param LayerGroup other: group to intersect with
        :rtype: LayerGroup
        """
        if self.is_disjoint(other):
            return LayerGroup.empty()
        return LayerGroup(max(self.lo,other.lo),min(self.hi,other.hi))

    def mask(self,num_layers):
        "list of booleans, one per layer, true for members"
        return [l in self for l in range(num_layers)]

    def __contains__(self,layer):
        """
        Check membership of a layer index.

        :param int layer: layer to check membership of
        :rtype: bool
        """
        return self.lo <= layer <= self.hi

    def __iter__(self):
        return iter(range(self.lo,self.hi + 1))

    def __len__(self):
        return max(self.hi - self.lo + 1,0)

    def __eq__(self,other):
        if not isinstance(other,LayerGroup):
            return NotImplemented
        if self.is_empty() and other.is_empty():
            return True
        return self.bounds == other.bounds

    def __ne__(self,other):
        return not self == other

    def __hash__(self):
        if self.is_empty():
            return hash((1,0))
        return hash(self.bounds)

    def __str__(self):
        if self.is_empty():
            return "<empty group>"
        return "%d:%d" % self.bounds

    def __repr__(self):
        return "LayerGroup(%d,%d)" % self.bounds

VARIABLES = ('style','noise','both')
"latent variable sets an attack may modify"

class LayerSchedule(object):
    """
    A rotation over disjoint layer groups, alternating the variable set from
    batch to batch. Batch b attacks style if b is even and noise otherwise,
    using group (b // 2) modulo the number of groups.
    """
    def __init__(self,groups):
        """
        Create a new LayerSchedule

        :param sequence groups: disjoint, non-empty LayerGroups
        :raises ValueError: if groups overlap or are empty
        """
        groups = sorted(groups,key=lambda g: g.bounds)
        if not groups:
            raise ValueError("A schedule needs at least one layer group")
        for g in groups:
            if g.is_empty():
                raise ValueError("Empty layer group in schedule")
        for g1,g2 in pairwise(groups):
            if not g1.is_disjoint(g2):
                raise ValueError("Overlapping layer groups %s and %s" % (g1,g2))
        self.groups = groups
        "sorted list of layer groups"

    @classmethod
    def consecutive(cls,num_layers,width=2):
        """
        Create a schedule over consecutive groups of width layers,
        e.g. 0:1, 2:3, ... The last group may be narrower.

        :param int num_layers: number of generator layers
        :param int width: layers per group
        """
        if width < 1:
            raise ValueError("Group width must be positive, got %d" % width)
        return cls([LayerGroup(lo,min(lo + width,num_layers) - 1)
                    for lo in range(0,num_layers,width)])

    def __getitem__(self,batch):
        """
        The layer group and variable set for a batch index

        :param int batch: running batch index
        :rtype: tuple of LayerGroup and str
        """
        variables = 'style' if batch % 2 == 0 else 'noise'
        return self.groups[(batch // 2) % len(self.groups)],variables

    def __len__(self):
        return len(self.groups)

    def __contains__(self,layer):
        return any(layer in g for g in self.groups)

    def __repr__(self):
        return "LayerSchedule([%s])" % ", ".join(str(g) for g in self.groups)
