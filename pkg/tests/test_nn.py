import unittest

import numpy as np

from latentadversary.nn import *
from latentadversary.tensor import Graph, Tensor, reduce_sum, power, set_precision

class Tiny(Module):
    def __init__(self):
        Module.__init__(self)
        rng = np.random.default_rng(0)
        self.fc = self.add_module('fc',Linear(rng,3,2))
        self.conv = self.add_module('conv',Conv2d(rng,1,2))
        self.offset = self.add_param('offset',np.zeros(2))

class TestModule(unittest.TestCase):
    def setUp(self):
        set_precision('test')
        self.model = Tiny()

    def tearDown(self):
        set_precision('run')

    def test_names(self):
        names = [n for n,_ in self.model.named_parameters()]
        self.assertEqual(names,['offset','fc.weight','fc.bias','conv.weight','conv.bias'])
        self.assertEqual(self.model.num_parameters(),2 + 6 + 2 + 18 + 2)

    def test_state(self):
        state = self.model.state()
        other = Tiny()
        for t in other.parameters():
            t.data = t.data + 1.
        other.load_state(state)
        for a,b in zip(self.model.parameters(),other.parameters()):
            np.testing.assert_array_equal(a.data,b.data)

    def test_load_wrong_shape(self):
        state = self.model.state()
        state['offset'] = np.zeros(3)
        self.assertRaises(ValueError,self.model.load_state,state)

    def test_conv_same_padding(self):
        out = self.model.conv(np.zeros((1,1,5,5)))
        self.assertEqual(out.shape,(1,2,5,5))

class TestOptimizers(unittest.TestCase):
    def setUp(self):
        set_precision('test')

    def tearDown(self):
        set_precision('run')

    def minimize(self,opt_class,**kwargs):
        x = Tensor([3.,-2.])
        opt = opt_class([x],**kwargs)
        for _ in range(300):
            with Graph() as graph:
                graph.watch(x)
                grads = graph.backward(reduce_sum(power(x,2)))
            opt.step(grads)
        return x.data

    def test_sgd(self):
        np.testing.assert_allclose(self.minimize(SGD,lr=0.05,momentum=0.5),0.,atol=1e-6)

    def test_adam(self):
        np.testing.assert_allclose(self.minimize(Adam,lr=0.05),0.,atol=5e-2)

    def test_missing_gradient(self):
        x = Tensor([1.])
        SGD([x]).step({})
        self.assertEqual(float(x.data[0]),1.)

    def test_weight_decay(self):
        x = Tensor([1.])
        SGD([x],lr=0.1,momentum=0.,weight_decay=0.5).step({x : np.zeros(1)})
        self.assertAlmostEqual(float(x.data[0]),0.95)
