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
This module contains the reverse-mode differentiation engine: tensors, the
graph that records executed kernels, the kernels themselves and a finite
difference oracle to verify them.

Kernels are plain functions. When a :class:`Graph` is active on the current
thread and one of the operands is watched by it (or was produced by it), the
kernel records a node with one adjoint function per operand. Everything else
is a constant.
"""
import threading
from contextlib import contextmanager

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from latentadversary import ShapeError, GraphError, NumericalError

PRECISIONS = {
    'float32' : np.float32,
    'float64' : np.float64,
    'run' : np.float32,
    'test' : np.float64,
}

VARIANCE_FLOOR = 1e-5

_settings = {'dtype' : np.float32}
_local = threading.local()

def set_precision(mode):
    """
    Select the element type of newly created tensors.

    :param str mode: one of 'run'/'float32' or 'test'/'float64'
    """
    if mode not in PRECISIONS:
        raise ValueError("Unknown precision mode: %s" % mode)
    _settings['dtype'] = PRECISIONS[mode]

def get_dtype():
    "element type of newly created tensors"
    return _settings['dtype']

@contextmanager
def precision(mode):
    """
    Context manager that switches the precision mode temporarily.
    """
    old = _settings['dtype']
    set_precision(mode)
    try:
        yield
    finally:
        _settings['dtype'] = old

class Tensor(object):
    """
    A dense n-dimensional array that can take part in a differentiation graph.
    """
    __array_priority__ = 100

    def __init__(self,data,dtype=None):
        """
        Create a new Tensor

        :param data: array-like with the elements
        :param dtype: element type, defaults to the active precision
        """
        self.data = np.asarray(data,dtype=dtype or get_dtype())
        "numpy array holding the elements"
        self.node = None
        "index of the node in the graph that produced this tensor"
        self.graph = None
        "graph that produced this tensor"

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def numpy(self):
        "the elements as numpy array"
        return self.data

    def item(self):
        return self.data.item()

    def is_finite(self):
        return bool(np.all(np.isfinite(self.data)))

    def __add__(self,other):
        return add(self,other)

    def __radd__(self,other):
        return add(other,self)

    def __sub__(self,other):
        return sub(self,other)

    def __rsub__(self,other):
        return sub(other,self)

    def __mul__(self,other):
        return mul(self,other)

    def __rmul__(self,other):
        return mul(other,self)

    def __neg__(self):
        return scale(self,-1.)

    def __truediv__(self,other):
        if isinstance(other,Tensor):
            raise TypeError("Tensors can only be divided by numbers")
        return scale(self,1./other)

    def __getitem__(self,index):
        return getitem(self,index)

    def reshape(self,*shape):
        if len(shape) == 1 and isinstance(shape[0],(tuple,list)):
            shape = shape[0]
        return reshape(self,shape)

    def sum(self,axis=None,keepdims=False):
        return reduce_sum(self,axis,keepdims)

    def mean(self,axis=None,keepdims=False):
        return reduce_mean(self,axis,keepdims)

    def __repr__(self):
        if self.graph is None:
            return "Tensor(shape=%s)" % (self.shape,)
        return "Tensor(shape=%s, node=%d)" % (self.shape,self.node)

def as_tensor(value):
    "wrap value in a Tensor unless it already is one"
    if isinstance(value,Tensor):
        return value
    return Tensor(value)

class _Node(object):
    __slots__ = ('parents','leaf')

    def __init__(self,parents,leaf=False):
        self.parents = parents
        self.leaf = leaf

def _check_finite(array,where):
    if not np.all(np.isfinite(array)):
        bad = int(np.sum(~np.isfinite(array)))
        raise NumericalError(
            "%d non-finite values in %s" % (bad,where),
            {'where' : where, 'count' : bad, 'shape' : tuple(np.shape(array))}
        )

def active_graph():
    "the innermost graph entered on this thread, or None"
    stack = getattr(_local,'stack',None)
    if not stack:
        return None
    return stack[-1]

class Graph(object):
    """
    Ordered record of executed kernels together with the adjoint functions
    needed to propagate gradients back to the watched leaves.

    A graph is used as a context manager. It belongs to the thread that
    entered it.
    """
    def __init__(self):
        self.nodes = []
        "list of recorded nodes, in execution order"
        self.leaves = {}
        "dictionary of id(tensor) to node index for watched tensors"
        self._keep = []
        self.consumed = False
        "whether backward was already run"

    def __enter__(self):
        if not hasattr(_local,'stack'):
            _local.stack = []
        _local.stack.append(self)
        return self

    def __exit__(self,*exc):
        _local.stack.remove(self)
        return False

    def watch(self,tensor):
        """
        Declare a tensor as leaf, so that gradients with respect to it are
        computed.

        :param Tensor tensor: the tensor to watch
        :rtype: Tensor
        :raises NumericalError: if the tensor contains NaN or Inf
        """
        if id(tensor) in self.leaves:
            return tensor
        _check_finite(tensor.data,"watched leaf")
        self.nodes.append(_Node([],leaf=True))
        self.leaves[id(tensor)] = len(self.nodes) - 1
        self._keep.append(tensor)
        return tensor

    def node_of(self,tensor):
        "index of the node for this tensor, or None if it is a constant"
        if tensor.graph is self:
            return tensor.node
        return self.leaves.get(id(tensor))

    def record(self,data,inputs,adjoints):
        """
        Wrap the result of a kernel and record a node if any input is tracked.

        :param data: result array
        :param sequence inputs: operands (Tensors or None)
        :param sequence adjoints: one function per operand mapping the output
                                  gradient to the operand gradient
        :rtype: Tensor
        """
        out = Tensor(data)
        if self.consumed:
            return out
        parents = []
        for tensor,adjoint in zip(inputs,adjoints):
            if tensor is None or adjoint is None:
                continue
            idx = self.node_of(tensor)
            if idx is not None:
                parents.append((idx,adjoint))
        if not parents:
            return out
        self.nodes.append(_Node(parents))
        out.node = len(self.nodes) - 1
        out.graph = self
        return out

    def backward(self,loss,wrt=None):
        """
        Propagate gradients from a scalar loss back to the watched leaves.

        Nodes are visited exactly once, in reverse execution order, which is
        a reverse topological order. Gradients add up across fan-out.

        :param Tensor loss: scalar produced by this graph
        :param wrt: leaves to return gradients for, defaults to all watched
        :type wrt: sequence of Tensors
        :returns: dictionary of leaf tensors to gradient tensors
        :raises GraphError: for non-scalar losses, unknown leaves or a graph
                            that was already consumed
        """
        if self.consumed:
            raise GraphError("graph was already consumed by backward")
        if loss.size != 1:
            raise GraphError("backward needs a scalar loss, got shape %s" % (loss.shape,))
        start = self.node_of(loss)
        if start is None:
            raise GraphError("loss was not produced by this graph")
        _check_finite(loss.data,"loss")

        if wrt is None:
            wrt = list(self._keep)
        targets = []
        for leaf in wrt:
            if id(leaf) not in self.leaves:
                raise GraphError("leaf %r is not on the graph" % (leaf,))
            targets.append((leaf,self.leaves[id(leaf)]))

        grads = {start : np.ones_like(loss.data)}
        for idx in range(start,-1,-1):
            node = self.nodes[idx]
            if node.leaf:
                continue
            g = grads.pop(idx,None)
            if g is None:
                continue
            for parent,adjoint in node.parents:
                contribution = adjoint(g)
                if parent in grads:
                    grads[parent] = grads[parent] + contribution
                else:
                    grads[parent] = contribution

        result = {}
        for leaf,idx in targets:
            if idx in grads:
                g = np.reshape(grads[idx],leaf.shape)
            else:
                g = np.zeros(leaf.shape)
            _check_finite(g,"gradient")
            result[leaf] = Tensor(g)

        self.consumed = True
        self.nodes = []
        return result

def backward(loss,wrt=None):
    """
    Run backward on the graph that produced loss.

    :param Tensor loss: a scalar tensor produced by a graph
    :param wrt: leaves to return gradients for
    :returns: dictionary of leaf tensors to gradient tensors
    """
    if not isinstance(loss,Tensor) or loss.graph is None:
        raise GraphError("loss was not produced by any graph")
    return loss.graph.backward(loss,wrt)

def value_and_grad(fn,inputs):
    """
    Evaluate fn on fresh leaves and differentiate it.

    :param callable fn: maps the list of input Tensors to a scalar Tensor
    :param sequence inputs: arrays or Tensors for the leaves
    :returns: tuple of the loss value (float) and a list of gradient arrays
    """
    leaves = [Tensor(np.array(x.data if isinstance(x,Tensor) else x)) for x in inputs]
    with Graph() as graph:
        for leaf in leaves:
            graph.watch(leaf)
        loss = fn(leaves)
        grads = graph.backward(loss,leaves)
    return float(loss.data),[grads[leaf].data for leaf in leaves]

def _record(data,inputs,adjoints):
    graph = active_graph()
    if graph is None:
        return Tensor(data)
    return graph.record(data,inputs,adjoints)

def _unbroadcast(grad,shape):
    "sum grad over the axes that broadcasting added or stretched"
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis,extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis,keepdims=True)
    return grad

def _broadcast_shape(operation,a,b):
    try:
        return np.broadcast_shapes(a.shape,b.shape)
    except ValueError:
        raise ShapeError(operation,a.shape,b.shape)

#elementwise arithmetic

def add(a,b):
    a,b = as_tensor(a),as_tensor(b)
    _broadcast_shape('add',a,b)
    return _record(a.data + b.data,(a,b),(
        lambda g: _unbroadcast(g,a.shape),
        lambda g: _unbroadcast(g,b.shape)
    ))

def sub(a,b):
    a,b = as_tensor(a),as_tensor(b)
    _broadcast_shape('sub',a,b)
    return _record(a.data - b.data,(a,b),(
        lambda g: _unbroadcast(g,a.shape),
        lambda g: -_unbroadcast(g,b.shape)
    ))

def mul(a,b):
    a,b = as_tensor(a),as_tensor(b)
    _broadcast_shape('mul',a,b)
    return _record(a.data*b.data,(a,b),(
        lambda g: _unbroadcast(g*b.data,a.shape),
        lambda g: _unbroadcast(g*a.data,b.shape)
    ))

def scale(x,factor):
    """
    Multiply by a constant number.
    """
    x = as_tensor(x)
    factor = float(factor)
    return _record(x.data*factor,(x,),(lambda g: g*factor,))

def power(x,exponent):
    """
    Raise to an integer power.
    """
    x = as_tensor(x)
    exponent = int(exponent)
    return _record(x.data**exponent,(x,),(
        lambda g: g*exponent*x.data**(exponent-1),
    ))

def sqrt(x):
    """
    Elementwise square root, for positive values.
    """
    x = as_tensor(x)
    out = np.sqrt(x.data)
    return _record(out,(x,),(lambda g: 0.5*g/out,))

def sign(x):
    """
    Elementwise sign with sign(0) = 0. The result is a constant.
    """
    x = as_tensor(x)
    return Tensor(np.sign(x.data))

#activations

def leaky_relu(x,slope=0.2):
    x = as_tensor(x)
    positive = x.data > 0
    return _record(np.where(positive,x.data,slope*x.data),(x,),(
        lambda g: np.where(positive,g,slope*g),
    ))

def tanh(x):
    x = as_tensor(x)
    out = np.tanh(x.data)
    return _record(out,(x,),(lambda g: g*(1. - out*out),))

def sigmoid(x):
    x = as_tensor(x)
    out = 0.5*(1. + np.tanh(0.5*x.data))
    return _record(out,(x,),(lambda g: g*out*(1. - out),))

def softplus(x):
    "log(1 + exp(x)), computed stably"
    x = as_tensor(x)
    return _record(np.logaddexp(0.,x.data),(x,),(
        lambda g: g*0.5*(1. + np.tanh(0.5*x.data)),
    ))

def softmax(x,axis=-1):
    x = as_tensor(x)
    z = x.data - x.data.max(axis=axis,keepdims=True)
    e = np.exp(z)
    out = e/e.sum(axis=axis,keepdims=True)
    return _record(out,(x,),(
        lambda g: out*(g - (g*out).sum(axis=axis,keepdims=True)),
    ))

#shape manipulation and reductions

def reshape(x,shape):
    x = as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError:
        raise ShapeError('reshape',x.shape,shape)
    return _record(out,(x,),(lambda g: g.reshape(x.shape),))

def getitem(x,index):
    """
    Basic indexing (integers and slices).
    """
    x = as_tensor(x)
    out = np.array(x.data[index])

    def adjoint(g):
        res = np.zeros(x.shape,dtype=g.dtype)
        res[index] += g
        return res
    return _record(out,(x,),(adjoint,))

def concat(tensors,axis=0):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors],axis=axis)
    except ValueError:
        raise ShapeError('concat',*[t.shape for t in tensors])
    bounds = np.cumsum([0] + [t.shape[axis] for t in tensors])

    def make(lo,hi):
        def adjoint(g):
            index = [slice(None)]*g.ndim
            index[axis] = slice(lo,hi)
            return g[tuple(index)]
        return adjoint
    return _record(out,tensors,[make(lo,hi) for lo,hi in zip(bounds[:-1],bounds[1:])])

def _expand(g,shape,axis,keepdims):
    if axis is not None and not keepdims:
        axes = axis if isinstance(axis,tuple) else (axis,)
        axes = tuple(a % len(shape) for a in axes)
        for a in sorted(axes):
            g = np.expand_dims(g,a)
    return np.array(np.broadcast_to(g,shape))

def reduce_sum(x,axis=None,keepdims=False):
    x = as_tensor(x)
    return _record(x.data.sum(axis=axis,keepdims=keepdims),(x,),(
        lambda g: _expand(g,x.shape,axis,keepdims),
    ))

def reduce_mean(x,axis=None,keepdims=False):
    x = as_tensor(x)
    out = x.data.mean(axis=axis,keepdims=keepdims)
    count = x.size/max(np.size(out),1)
    return _record(out,(x,),(
        lambda g: _expand(g,x.shape,axis,keepdims)/count,
    ))

#linear algebra and convolutions

def matmul(a,b):
    """
    Matrix product over the last two axes, leading axes broadcast.
    """
    a,b = as_tensor(a),as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError('matmul',a.shape,b.shape)
    return _record(np.matmul(a.data,b.data),(a,b),(
        lambda g: _unbroadcast(np.matmul(g,np.swapaxes(b.data,-1,-2)),a.shape),
        lambda g: _unbroadcast(np.matmul(np.swapaxes(a.data,-1,-2),g),b.shape)
    ))

def conv2d(x,weight,bias=None,stride=1,padding=0):
    """
    2D cross-correlation with zero padding.

    :param Tensor x: input of shape (N,C,H,W)
    :param Tensor weight: kernel of shape (O,C,kh,kw)
    :param Tensor bias: optional bias of shape (O,)
    :param int stride: stride in both directions
    :param int padding: zero padding in both directions
    :rtype: Tensor of shape (N,O,Ho,Wo)
    """
    x,weight = as_tensor(x),as_tensor(weight)
    if bias is not None:
        bias = as_tensor(bias)
    if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[1]:
        raise ShapeError('conv2d',x.shape,weight.shape)
    if bias is not None and bias.shape != (weight.shape[0],):
        raise ShapeError('conv2d',weight.shape,bias.shape)
    n,c,h,w = x.shape
    o,_,kh,kw = weight.shape
    ho = (h + 2*padding - kh)//stride + 1
    wo = (w + 2*padding - kw)//stride + 1
    if ho <= 0 or wo <= 0:
        raise ShapeError('conv2d',x.shape,weight.shape)

    xp = np.pad(x.data,((0,0),(0,0),(padding,padding),(padding,padding)))
    win = sliding_window_view(xp,(kh,kw),axis=(2,3))[:,:,::stride,::stride]
    out = np.tensordot(win,weight.data,axes=([1,4,5],[1,2,3])).transpose(0,3,1,2)
    if bias is not None:
        out = out + bias.data.reshape(1,o,1,1)

    def grad_x(g):
        cols = np.tensordot(g,weight.data,axes=([1],[0]))
        gxp = np.zeros(xp.shape,dtype=g.dtype)
        for i in range(kh):
            for j in range(kw):
                gxp[:,:,i:i+stride*ho:stride,j:j+stride*wo:stride] += \
                    cols[:,:,:,:,i,j].transpose(0,3,1,2)
        return gxp[:,:,padding:padding+h,padding:padding+w]

    def grad_w(g):
        return np.tensordot(g,win,axes=([0,2,3],[0,2,3]))

    def grad_b(g):
        return g.sum(axis=(0,2,3))

    return _record(np.ascontiguousarray(out),(x,weight,bias),(grad_x,grad_w,grad_b))

def avg_pool2d(x,factor=2):
    """
    Average over non-overlapping factor x factor windows.
    """
    x = as_tensor(x)
    if x.ndim != 4 or x.shape[2] % factor or x.shape[3] % factor:
        raise ShapeError('avg_pool2d',x.shape)
    n,c,h,w = x.shape
    out = x.data.reshape(n,c,h//factor,factor,w//factor,factor).mean(axis=(3,5))
    return _record(out,(x,),(
        lambda g: np.repeat(np.repeat(g,factor,axis=2),factor,axis=3)/(factor*factor),
    ))

def upsample_nearest(x,factor=2):
    """
    Nearest-neighbour upsampling of the two trailing axes of a (N,C,H,W)
    tensor.
    """
    x = as_tensor(x)
    if x.ndim != 4:
        raise ShapeError('upsample_nearest',x.shape)
    n,c,h,w = x.shape
    out = np.repeat(np.repeat(x.data,factor,axis=2),factor,axis=3)
    return _record(out,(x,),(
        lambda g: g.reshape(n,c,h,factor,w,factor).sum(axis=(3,5)),
    ))

#normalization

def instance_normalize(x,floor=VARIANCE_FLOOR):
    """
    Normalize every channel of every sample to zero mean and unit variance
    over the two trailing axes. The variance is floored at floor.
    """
    x = as_tensor(x)
    if x.ndim < 2:
        raise ShapeError('instance_normalize',x.shape)
    axes = (-2,-1)
    xc = x.data - x.data.mean(axis=axes,keepdims=True)
    var = (xc*xc).mean(axis=axes,keepdims=True)
    floored = var < floor
    r = 1./np.sqrt(np.maximum(var,floor))

    def adjoint(g):
        direct = r*(g - g.mean(axis=axes,keepdims=True))
        through_var = r**3*xc*(g*xc).mean(axis=axes,keepdims=True)
        return direct - np.where(floored,0.,through_var)
    return _record(xc*r,(x,),(adjoint,))

def adain(x,scale,bias):
    """
    Adaptive instance normalization: normalize each channel, then apply
    the style provided scale and bias.

    :param Tensor x: activations of shape (N,C,H,W)
    :param Tensor scale: per channel scale of shape (C,) or (N,C)
    :param Tensor bias: per channel bias, same shape as scale
    """
    x,scale,bias = as_tensor(x),as_tensor(scale),as_tensor(bias)
    if scale.shape[-1] != x.shape[1] or bias.shape != scale.shape:
        raise ShapeError('adain',x.shape,scale.shape,bias.shape)
    s = reshape(scale,scale.shape + (1,1))
    b = reshape(bias,bias.shape + (1,1))
    return add(mul(instance_normalize(x),s),b)

#resampling

def bilinear_grid_sample(x,grid):
    """
    Sample x bilinearly at the given pixel coordinates.

    :param Tensor x: images of shape (N,C,H,W), H and W at least 2
    :param Tensor grid: coordinates of shape (N,Ho,Wo,2) as (row,column)
                        in pixel units; coordinates outside the image are
                        clamped to the border
    :rtype: Tensor of shape (N,C,Ho,Wo)
    """
    x,grid = as_tensor(x),as_tensor(grid)
    if x.ndim != 4 or grid.ndim != 4 or grid.shape[3] != 2 or \
       grid.shape[0] != x.shape[0] or x.shape[2] < 2 or x.shape[3] < 2:
        raise ShapeError('bilinear_grid_sample',x.shape,grid.shape)
    n,c,h,w = x.shape
    gy,gx = grid.data[...,0],grid.data[...,1]
    cy,cx = np.clip(gy,0,h-1),np.clip(gx,0,w-1)
    y0 = np.minimum(np.floor(cy),h-2).astype(int)
    x0 = np.minimum(np.floor(cx),w-2).astype(int)
    wy = (cy - y0)[...,None]
    wx = (cx - x0)[...,None]
    nid = np.arange(n)[:,None,None]
    xt = x.data.transpose(0,2,3,1)
    v00,v01 = xt[nid,y0,x0],xt[nid,y0,x0+1]
    v10,v11 = xt[nid,y0+1,x0],xt[nid,y0+1,x0+1]
    out = (1-wy)*(1-wx)*v00 + (1-wy)*wx*v01 + wy*(1-wx)*v10 + wy*wx*v11

    def grad_x(g):
        gt = g.transpose(0,2,3,1)
        res = np.zeros(xt.shape,dtype=g.dtype)
        np.add.at(res,(nid,y0,x0),gt*(1-wy)*(1-wx))
        np.add.at(res,(nid,y0,x0+1),gt*(1-wy)*wx)
        np.add.at(res,(nid,y0+1,x0),gt*wy*(1-wx))
        np.add.at(res,(nid,y0+1,x0+1),gt*wy*wx)
        return res.transpose(0,3,1,2)

    def grad_grid(g):
        gt = g.transpose(0,2,3,1)
        dy = ((1-wx)*(v10 - v00) + wx*(v11 - v01))*gt
        dx = ((1-wy)*(v01 - v00) + wy*(v11 - v10))*gt
        inside_y = (gy >= 0) & (gy <= h-1)
        inside_x = (gx >= 0) & (gx <= w-1)
        return np.stack([dy.sum(axis=-1)*inside_y,dx.sum(axis=-1)*inside_x],axis=-1)

    return _record(out.transpose(0,3,1,2),(x,grid),(grad_x,grad_grid))

#losses

def _check_labels(operation,labels,classes):
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise ValueError("%s: labels outside [0,%d)" % (operation,classes))

def softmax_cross_entropy(logits,labels):
    """
    Mean cross entropy between softmax(logits) and integer labels.

    :param Tensor logits: shape (N,K)
    :param labels: integer array of shape (N,)
    :rtype: scalar Tensor
    """
    logits = as_tensor(logits)
    labels = np.asarray(labels,dtype=int).reshape(-1)
    if logits.ndim != 2 or logits.shape[0] != labels.shape[0]:
        raise ShapeError('softmax_cross_entropy',logits.shape,labels.shape)
    _check_labels('softmax_cross_entropy',labels,logits.shape[1])
    n = logits.shape[0]
    z = logits.data - logits.data.max(axis=1,keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=1,keepdims=True))
    logp = z - logsum
    rows = np.arange(n)
    loss = -logp[rows,labels].mean()

    def adjoint(g):
        res = np.exp(logp)
        res[rows,labels] -= 1.
        return res*(g/n)
    return _record(loss,(logits,),(adjoint,))

def pixelwise_softmax_cross_entropy(logits,labels):
    """
    Mean per-pixel cross entropy against a label map.

    :param Tensor logits: shape (N,K,H,W)
    :param labels: integer array of shape (N,H,W)
    :rtype: scalar Tensor
    """
    logits = as_tensor(logits)
    labels = np.asarray(labels,dtype=int)
    if logits.ndim != 4 or labels.shape != (logits.shape[0],) + logits.shape[2:]:
        raise ShapeError('pixelwise_softmax_cross_entropy',logits.shape,labels.shape)
    k = logits.shape[1]
    flat = reshape(_move_channels_last(logits),(-1,k))
    return softmax_cross_entropy(flat,labels.reshape(-1))

def _move_channels_last(x):
    x = as_tensor(x)
    return _record(np.ascontiguousarray(x.data.transpose(0,2,3,1)),(x,),(
        lambda g: g.transpose(0,3,1,2),
    ))

#verification

def finite_diff_grad(f,x,h=1e-5):
    """
    Central difference estimate of the gradient of a scalar function.

    :param callable f: deterministic function of a Tensor returning a scalar
    :param x: point to evaluate the gradient at
    :param float h: step, must be positive
    :rtype: Tensor
    """
    if h <= 0:
        raise ValueError("Step must be positive, got %s" % h)
    x = np.array(x.data if isinstance(x,Tensor) else x,dtype=np.float64)
    grad = np.zeros(x.shape)
    for i in range(x.size):
        orig = x.flat[i]
        x.flat[i] = orig + h
        plus = float(np.asarray(_scalar(f(Tensor(x.copy())))))
        x.flat[i] = orig - h
        minus = float(np.asarray(_scalar(f(Tensor(x.copy())))))
        x.flat[i] = orig
        grad.flat[i] = (plus - minus)/(2*h)
    return Tensor(grad)

def _scalar(value):
    if isinstance(value,Tensor):
        return value.data
    return value

def relative_error(a,b):
    """
    Norm-wise relative difference ||a-b|| / max(||a||,||b||).
    """
    a = np.asarray(a.data if isinstance(a,Tensor) else a,dtype=np.float64)
    b = np.asarray(b.data if isinstance(b,Tensor) else b,dtype=np.float64)
    scale_ = max(np.linalg.norm(a),np.linalg.norm(b),1e-12)
    return float(np.linalg.norm(a - b)/scale_)
