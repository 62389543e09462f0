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
This module defines the success predicates of attacks and the class each
attack descends towards
"""
import numpy as np

from latentadversary import ConfigError

MODES = ('nontargeted','targeted','nontargeted-ascent')
"names of the attack modes"

def least_likely(probs):
    """
    Index of the least likely class, ties broken by the lowest index.

    :param probs: probability vector
    :rtype: int
    :raises ValueError: for an empty vector
    """
    probs = np.asarray(probs).reshape(-1)
    if probs.size == 0:
        raise ValueError("Least likely class of an empty probability vector")
    return int(np.argmin(probs))

class Criterion(object):
    """
    Abstract baseclass for success predicates.

    An attack with a criterion takes steps
    ``x <- x + direction * step * sign(grad J(F(x), target))``
    until :meth:`satisfied` holds for the prediction.
    """
    mode = None
    "name of the attack mode"

    def __init__(self,label):
        self.label = int(label)
        "ground truth label of the attacked sample"
        self.target = None
        "class the cross entropy is taken against"
        self.direction = -1.
        "-1 to descend the loss, +1 to ascend it"

    def start(self,probs):
        """
        Fix the loss target from the prediction for the initial input

        :param probs: probability vector of the initial input
        """

    def satisfied(self,prediction):
        """
        check whether the prediction counts as a successful attack

        :param int prediction: predicted class
        :rtype: bool
        """
        raise NotImplementedError

    def __repr__(self):
        return "%s(label=%d, target=%s)" % (type(self).__name__,self.label,self.target)

class Untargeted(Criterion):
    """
    Success is any prediction other than the label. The loss target is the
    least likely class of the initial input, frozen for the whole attack.
    """
    mode = 'nontargeted'

    def start(self,probs):
        self.target = least_likely(probs)

    def satisfied(self,prediction):
        return int(prediction) != self.label

class Ascent(Untargeted):
    """
    Success is any prediction other than the label, reached by ascending the
    loss on the label itself.
    """
    mode = 'nontargeted-ascent'

    def __init__(self,label):
        Untargeted.__init__(self,label)
        self.target = self.label
        self.direction = 1.

    def start(self,probs):
        pass

class Targeted(Criterion):
    """
    Success is a prediction of one given class.
    """
    mode = 'targeted'

    def __init__(self,label,target,classes=None):
        """
        Create a new Targeted criterion

        :param int label: ground truth label
        :param int target: class the attack should reach
        :param int classes: number of classes, for validation
        :raises ConfigError: if the target equals the label or is out of range
        """
        Criterion.__init__(self,label)
        target = int(target)
        if target == self.label:
            raise ConfigError('attack.target',"target %d equals the ground truth label" % target)
        if target < 0 or (classes is not None and target >= classes):
            raise ConfigError('attack.target',"target %d outside [0,%s)" % (target,classes))
        self.target = target

    def satisfied(self,prediction):
        return int(prediction) == self.target

def make_criterion(mode,label,target=None,classes=None):
    """
    Build the criterion for an attack mode

    :param str mode: one of :data:`MODES`
    :param int label: ground truth label
    :param int target: target class for the targeted mode
    :param int classes: number of classes
    :rtype: Criterion
    :raises ConfigError: for unknown modes or invalid targets
    """
    if mode == 'nontargeted':
        return Untargeted(label)
    elif mode == 'nontargeted-ascent':
        return Ascent(label)
    elif mode == 'targeted':
        if target is None:
            raise ConfigError('attack.target',"targeted mode needs a target")
        return Targeted(label,target,classes)
    else:
        raise ConfigError('attack.mode',"Unknown attack mode: %s" % mode)
