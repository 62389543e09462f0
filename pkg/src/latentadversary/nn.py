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
This module defines parameterised building blocks and the optimizers that
update them
"""
from collections import OrderedDict

import numpy as np

from latentadversary.tensor import Tensor, matmul, conv2d, add

class Module(object):
    """
    Abstract baseclass for everything that owns parameters.

    Parameters and submodules are registered in declaration order, which is
    also the order of the checkpoint payload.
    """
    kind = None
    "name of the architecture in checkpoint descriptors"

    def __init__(self):
        self._params = OrderedDict()
        self._modules = OrderedDict()

    def add_param(self,name,array):
        """
        Register a new parameter

        :param str name: name of the parameter, unique within this module
        :param array: initial values
        :rtype: Tensor
        """
        tensor = Tensor(array)
        self._params[name] = tensor
        return tensor

    def add_module(self,name,module):
        self._modules[name] = module
        return module

    def named_parameters(self,prefix=''):
        """
        Iterate over (dotted name, Tensor) pairs in declaration order
        """
        for name,tensor in self._params.items():
            yield prefix + name,tensor
        for name,module in self._modules.items():
            for item in module.named_parameters(prefix + name + '.'):
                yield item

    def parameters(self):
        "list of parameter tensors in declaration order"
        return [t for _,t in self.named_parameters()]

    def watch(self,graph):
        """
        Declare all parameters as leaves of graph
        """
        for tensor in self.parameters():
            graph.watch(tensor)

    def state(self):
        "copy of all parameter values, dotted names to arrays"
        return OrderedDict((n,t.data.copy()) for n,t in self.named_parameters())

    def load_state(self,state):
        for name,tensor in self.named_parameters():
            if state[name].shape != tensor.shape:
                raise ValueError("Parameter %s has shape %s, got %s" %
                                 (name,tensor.shape,state[name].shape))
            tensor.data = np.array(state[name],dtype=tensor.data.dtype)

    def num_parameters(self):
        return sum(t.size for t in self.parameters())

    def descriptor(self):
        """
        Architecture descriptor for checkpoints.

        :rtype: dict
        """
        raise NotImplementedError

def _he(rng,shape,fan_in,gain=np.sqrt(2./(1 + 0.2**2))):
    return rng.standard_normal(shape)*gain/np.sqrt(fan_in)

class Linear(Module):
    """
    Fully connected layer y = x W + b
    """
    def __init__(self,rng,n_in,n_out,bias_init=0.,gain=None):
        Module.__init__(self)
        if gain is None:
            self.weight = self.add_param('weight',_he(rng,(n_in,n_out),n_in))
        else:
            self.weight = self.add_param('weight',rng.standard_normal((n_in,n_out))*gain/np.sqrt(n_in))
        self.bias = self.add_param('bias',np.full(n_out,bias_init))

    def __call__(self,x):
        return add(matmul(x,self.weight),self.bias)

class Conv2d(Module):
    """
    Convolution with 'same' zero padding for odd kernel sizes
    """
    def __init__(self,rng,c_in,c_out,size=3,stride=1,gain=None):
        Module.__init__(self)
        fan_in = c_in*size*size
        if gain is None:
            self.weight = self.add_param('weight',_he(rng,(c_out,c_in,size,size),fan_in))
        else:
            self.weight = self.add_param('weight',rng.standard_normal((c_out,c_in,size,size))*gain/np.sqrt(fan_in))
        self.bias = self.add_param('bias',np.zeros(c_out))
        self.stride = stride
        self.padding = size//2

    def __call__(self,x):
        return conv2d(x,self.weight,self.bias,self.stride,self.padding)

class Optimizer(object):
    """
    Abstract baseclass for optimizers working on a list of tensors in place.
    """
    def __init__(self,tensors):
        self.tensors = list(tensors)
        "tensors updated by this optimizer"

    def step(self,grads):
        """
        Update all tensors

        :param dict grads: dictionary of tensors to gradient Tensors or arrays
        """
        for i,tensor in enumerate(self.tensors):
            g = grads.get(tensor)
            if g is None:
                continue
            g = g.data if isinstance(g,Tensor) else np.asarray(g)
            tensor.data = (tensor.data - self._delta(i,g)).astype(tensor.data.dtype)

    def _delta(self,i,g):
        raise NotImplementedError

class SGD(Optimizer):
    """
    Stochastic gradient descent with heavy-ball momentum
    """
    def __init__(self,tensors,lr=0.01,momentum=0.9,weight_decay=0.):
        Optimizer.__init__(self,tensors)
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity = [np.zeros(t.shape) for t in self.tensors]

    def _delta(self,i,g):
        if self.weight_decay:
            g = g + self.weight_decay*self.tensors[i].data
        self.velocity[i] = self.momentum*self.velocity[i] + g
        return self.lr*self.velocity[i]

class Adam(Optimizer):
    """
    Adaptive moment estimation
    """
    def __init__(self,tensors,lr=1e-3,betas=(0.9,0.999),eps=1e-8):
        Optimizer.__init__(self,tensors)
        self.lr = lr
        self.betas = tuple(betas)
        self.eps = eps
        self.m = [np.zeros(t.shape) for t in self.tensors]
        self.v = [np.zeros(t.shape) for t in self.tensors]
        self.t = [0 for t in self.tensors]

    def _delta(self,i,g):
        b1,b2 = self.betas
        self.t[i] += 1
        self.m[i] = b1*self.m[i] + (1 - b1)*g
        self.v[i] = b2*self.v[i] + (1 - b2)*g*g
        m_hat = self.m[i]/(1 - b1**self.t[i])
        v_hat = self.v[i]/(1 - b2**self.t[i])
        return self.lr*m_hat/(np.sqrt(v_hat) + self.eps)
