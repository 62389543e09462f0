import unittest
import threading

import numpy as np

from latentadversary import ShapeError, GraphError, NumericalError
from latentadversary.tensor import *

TOLERANCE = 1e-4

class GradientCase(unittest.TestCase):
    def setUp(self):
        set_precision('test')
        self.rng = np.random.default_rng(0)

    def tearDown(self):
        set_precision('run')

    def check(self,fn,*shapes,**kwargs):
        "compare the engine's gradients of fn with central differences"
        instances = kwargs.get('instances',5)
        for _ in range(instances):
            inputs = [self.rng.standard_normal(s) for s in shapes]
            value,grads = value_and_grad(lambda ts: fn(*ts),inputs)
            for i,g in enumerate(grads):
                def partial(t,i=i):
                    args = [Tensor(x) for x in inputs]
                    args[i] = t
                    return fn(*args)
                numeric = finite_diff_grad(partial,inputs[i])
                self.assertLess(relative_error(g,numeric),TOLERANCE)

class TestKernelGradients(GradientCase):
    def test_arithmetic(self):
        self.check(lambda a,b: reduce_sum(mul(add(a,b),sub(a,b))),(3,4),(3,4))
        self.check(lambda a,b: reduce_sum(mul(a,b)),(2,3,4),(4,))
        self.check(lambda a: reduce_sum(power(a,3)),(5,))
        self.check(lambda a: reduce_sum(sqrt(add(power(a,2),1.))),(5,))
        self.check(lambda a: reduce_sum(scale(a,-2.5)),(2,2))

    def test_operators(self):
        self.check(lambda a,b: (a*b - a + 2.*b).sum(),(3,),(3,))
        self.check(lambda a: (-a).mean(),(4,4))

    def test_activations(self):
        self.check(lambda a: reduce_sum(mul(leaky_relu(a),a)),(10,))
        self.check(lambda a: reduce_sum(tanh(a)),(10,))
        self.check(lambda a: reduce_sum(sigmoid(a)),(10,))
        self.check(lambda a: reduce_sum(softplus(a)),(10,))

    def test_softmax(self):
        w = self.rng.standard_normal((3,5))
        self.check(lambda a: reduce_sum(mul(softmax(a),w)),(3,5))
        self.check(lambda a: reduce_sum(mul(softmax(a,axis=0),w)),(3,5))

    def test_shapes(self):
        self.check(lambda a: reduce_sum(power(reshape(a,(6,2)),2)),(3,4))
        self.check(lambda a: reduce_sum(power(getitem(a,(slice(1,3),Ellipsis)),2)),(4,3))
        self.check(lambda a,b: reduce_sum(power(concat([a,b],axis=1),2)),(2,3),(2,2))

    def test_reductions(self):
        self.check(lambda a: reduce_sum(power(reduce_sum(a,axis=1),2)),(3,4))
        self.check(lambda a: reduce_sum(power(reduce_mean(a,axis=(0,2),keepdims=True),2)),(2,3,4))

    def test_matmul(self):
        self.check(lambda a,b: reduce_sum(matmul(a,b)),(3,4),(4,2))
        self.check(lambda a,b: reduce_sum(power(matmul(a,b),2)),(2,3,4),(4,5))

    def test_conv2d(self):
        self.check(lambda x,w,b: reduce_sum(power(conv2d(x,w,b,1,1),2)),(2,3,5,5),(4,3,3,3),(4,),instances=2)
        self.check(lambda x,w: reduce_sum(power(conv2d(x,w,None,2,1),2)),(1,2,6,6),(3,2,3,3),instances=2)

    def test_pooling(self):
        self.check(lambda x: reduce_sum(power(avg_pool2d(x),2)),(2,2,4,4))
        self.check(lambda x: reduce_sum(power(upsample_nearest(x),2)),(2,2,3,3))

    def test_normalization(self):
        w = self.rng.standard_normal((2,3,4,4))
        self.check(lambda x: reduce_sum(mul(instance_normalize(x),w)),(2,3,4,4))
        self.check(lambda x,s,b: reduce_sum(mul(adain(x,s,b),w)),(2,3,4,4),(2,3),(2,3))

    def test_grid_sample(self):
        x = self.rng.standard_normal((1,2,5,5))
        base = np.stack(np.meshgrid(np.arange(5.),np.arange(5.),indexing='ij'),axis=-1)[None]
        offset = 0.3 + 0.2*self.rng.random((1,5,5,2))
        grid = np.clip(base + offset,0.1,3.9)
        value,grads = value_and_grad(lambda ts: reduce_sum(power(bilinear_grid_sample(ts[0],ts[1]),2)),[x,grid])
        for i,point in enumerate([x,grid]):
            def partial(t,i=i):
                args = [Tensor(x),Tensor(grid)]
                args[i] = t
                return reduce_sum(power(bilinear_grid_sample(*args),2))
            self.assertLess(relative_error(grads[i],finite_diff_grad(partial,point)),TOLERANCE)

    def test_cross_entropy(self):
        labels = np.array([0,2,1])
        self.check(lambda a: softmax_cross_entropy(a,labels),(3,4))
        layout = np.array([[[0,1],[2,1]]])
        self.check(lambda a: pixelwise_softmax_cross_entropy(a,layout),(1,3,2,2))

class TestKernelValues(unittest.TestCase):
    def setUp(self):
        set_precision('test')

    def tearDown(self):
        set_precision('run')

    def test_sign_of_zero(self):
        self.assertEqual(list(sign(np.array([-2.,0.,3.])).data),[-1.,0.,1.])

    def test_identity_grid(self):
        x = np.arange(12.).reshape(1,1,3,4)
        grid = np.stack(np.meshgrid(np.arange(3.),np.arange(4.),indexing='ij'),axis=-1)[None]
        np.testing.assert_allclose(bilinear_grid_sample(x,grid).data,x)

    def test_instance_normalize_constant(self):
        out = instance_normalize(np.ones((1,2,3,3)))
        self.assertTrue(np.all(np.isfinite(out.data)))
        np.testing.assert_allclose(out.data,0.)

    def test_cross_entropy_uniform(self):
        loss = softmax_cross_entropy(np.zeros((2,4)),[1,3])
        self.assertAlmostEqual(float(loss.data),np.log(4))

    def test_shape_errors(self):
        self.assertRaises(ShapeError,add,np.zeros(3),np.zeros(4))
        self.assertRaises(ShapeError,matmul,np.zeros((2,3)),np.zeros((2,3)))
        self.assertRaises(ShapeError,conv2d,np.zeros((1,2,4,4)),np.zeros((1,3,3,3)))
        self.assertRaises(ShapeError,reshape,np.zeros(6),(4,))
        self.assertRaises(ValueError,softmax_cross_entropy,np.zeros((1,3)),[3])

    def test_precision(self):
        self.assertEqual(Tensor([1.]).data.dtype,np.float64)
        with precision('run'):
            self.assertEqual(Tensor([1.]).data.dtype,np.float32)
        self.assertEqual(get_dtype(),np.float64)
        self.assertRaises(ValueError,set_precision,'half')

class TestGraph(unittest.TestCase):
    def setUp(self):
        set_precision('test')

    def tearDown(self):
        set_precision('run')

    def test_unwatched_is_constant(self):
        a,b = Tensor([1.,2.]),Tensor([3.,4.])
        with Graph() as graph:
            graph.watch(a)
            loss = reduce_sum(mul(a,b))
            grads = graph.backward(loss)
        np.testing.assert_allclose(grads[a].data,[3.,4.])
        self.assertNotIn(b,grads)

    def test_fan_out(self):
        a = Tensor([2.])
        with Graph() as graph:
            graph.watch(a)
            loss = reduce_sum(add(mul(a,a),a))
            grads = graph.backward(loss,[a])
        np.testing.assert_allclose(grads[a].data,[5.])

    def test_non_scalar_loss(self):
        a = Tensor([1.,2.])
        with Graph() as graph:
            graph.watch(a)
            self.assertRaises(GraphError,graph.backward,mul(a,a))

    def test_consumed(self):
        a = Tensor([1.])
        with Graph() as graph:
            graph.watch(a)
            loss = reduce_sum(a*a)
            graph.backward(loss)
            self.assertRaises(GraphError,graph.backward,loss)

    def test_leaf_not_on_graph(self):
        a,b = Tensor([1.]),Tensor([1.])
        with Graph() as graph:
            graph.watch(a)
            loss = reduce_sum(a*b)
            self.assertRaises(GraphError,graph.backward,loss,[b])

    def test_loss_from_other_graph(self):
        self.assertRaises(GraphError,backward,Tensor(1.))

    def test_non_finite_leaf(self):
        with Graph() as graph:
            self.assertRaises(NumericalError,graph.watch,Tensor([np.nan]))

    def test_thread_local(self):
        seen = []
        with Graph():
            t = threading.Thread(target=lambda: seen.append(active_graph()))
            t.start()
            t.join()
            self.assertIsNotNone(active_graph())
        self.assertEqual(seen,[None])
        self.assertIsNone(active_graph())

    def test_finite_diff_step(self):
        self.assertRaises(ValueError,finite_diff_grad,lambda t: reduce_sum(t),np.zeros(2),0.)

    def test_relative_error(self):
        self.assertEqual(relative_error([1.,2.],[1.,2.]),0.)
        self.assertAlmostEqual(relative_error([1.,0.],[0.,0.]),1.)
