import unittest

import numpy as np

from latentadversary import ConfigError, GateError
from latentadversary.data import SynthSpec, synth_dataset
from latentadversary.models import Classifier, Discriminator, ProceduralGenerator
from latentadversary.pretrain import *
from latentadversary.tensor import set_precision, Graph, Tensor, relative_error
from latentadversary.training import TrainConfig

TINY = PretrainConfig(
    gan_steps=2,gan_batch_size=2,r1_every=1,gate_samples=4,
    generator={'latent_dim' : 4,'mapping_layers' : 1,'mapping_width' : 4,'channels' : [2]*8},
    discriminator={'channels' : [2,2,2]},
    spade_steps=2,spade_batch_size=2,
    spade={'latent_dim' : 4,'embed_channels' : 2,'channels' : [2]*8},
    classifier={'channels' : [4,4]},
    segmenter={'channels' : [4,4,4]},
)

class TestR1(unittest.TestCase):
    def setUp(self):
        set_precision('test')
        self.disc = Discriminator(channels=[2,2,2])
        self.real = np.random.default_rng(0).uniform(-1,1,(2,3,32,32))

    def tearDown(self):
        set_precision('run')

    def penalty(self):
        x = Tensor(self.real)
        with Graph() as graph:
            graph.watch(x)
            v = graph.backward(self.disc(x).sum(),[x])[x].data
        return 0.5*(v**2).sum()/len(self.real)

    def test_head_gradient(self):
        penalty,grads = r1_gradients(self.disc,self.real,1.,1e-4)
        self.assertAlmostEqual(penalty,self.penalty())
        weight = self.disc.head.weight
        numeric = np.zeros(weight.shape)
        for i in range(weight.size):
            orig = weight.data.flat[i]
            weight.data.flat[i] = orig + 1e-5
            plus = self.penalty()
            weight.data.flat[i] = orig - 1e-5
            minus = self.penalty()
            weight.data.flat[i] = orig
            numeric.flat[i] = (plus - minus)/2e-5
        self.assertLess(relative_error(grads[weight],numeric),1e-2)

    def test_zero_weight(self):
        penalty,_ = r1_gradients(self.disc,self.real,0.)
        self.assertEqual(penalty,0.)

class TestPretrain(unittest.TestCase):
    def setUp(self):
        self.train = synth_dataset(SynthSpec(seed=0),8)
        self.test = synth_dataset(SynthSpec(seed=0),4,8)
        self.train_config = TrainConfig(epochs=1,batch_size=4)

    def test_classifier(self):
        model,run = pretrain_classifier(self.train,self.test,self.train_config,TINY,gate=False)
        self.assertEqual(model.classes,4)
        self.assertEqual(len(run.test_accuracy),1)
        self.assertIsNone(model.metadata['trained_against'])

    def test_classifier_gate(self):
        config = TINY.replace(gate_classifier_accuracy=1.01)
        with self.assertRaises(GateError) as ctx:
            pretrain_classifier(self.train,self.test,self.train_config,config)
        self.assertIn('loss',ctx.exception.curves)

    def test_new_models_follow_seed(self):
        a = new_classifier(4,TrainConfig(seed=3),TINY)
        b = new_classifier(4,TrainConfig(seed=3),TINY)
        np.testing.assert_array_equal(a.head.weight.data,b.head.weight.data)
        self.assertEqual(new_segmenter(5,self.train_config,TINY).label_classes,5)

    def test_generator(self):
        generator = pretrain_generator(2,self.train.class_slice(2),TINY,gate=False)
        self.assertEqual(generator.class_index,2)
        self.assertEqual(generator.metadata['steps'],2)
        self.assertTrue(np.isfinite(generator.metadata['final_d_loss']))

    def test_generator_gate(self):
        config = TINY.replace(gate_discriminator_accuracy=-1.)
        with self.assertRaises(GateError) as ctx:
            pretrain_generator(0,self.train.class_slice(0),config,Classifier(channels=[4,4]),
                               self.test.class_slice(0))
        self.assertEqual(len(ctx.exception.curves['d_loss']),2)

    def test_generator_gate_inputs(self):
        with self.assertRaises(ConfigError) as ctx:
            pretrain_generator(0,self.train.class_slice(0),TINY,holdout=self.test.class_slice(0))
        self.assertEqual(ctx.exception.field,'models.classifier')
        with self.assertRaises(ConfigError) as ctx:
            pretrain_generator(0,self.train.class_slice(0),TINY,Classifier(channels=[4,4]))
        self.assertEqual(ctx.exception.field,'pretrain.holdout')

    def test_gate_needs_test_set(self):
        with self.assertRaises(ConfigError):
            pretrain_classifier(self.train,None,self.train_config,TINY)
        with self.assertRaises(ConfigError):
            pretrain_segmenter(self.train,None,self.train_config,TINY)
        model,run = pretrain_classifier(self.train,None,self.train_config,TINY,gate=False)
        self.assertEqual(run.test_accuracy,[])

    def test_segmentation(self):
        segmenter,run = pretrain_segmenter(self.train,self.test,self.train_config,TINY,gate=False)
        self.assertEqual(segmenter.label_classes,5)
        spade = pretrain_spade(self.train,TINY)
        self.assertEqual(spade.metadata['steps'],2)

    def test_class_consistency(self):
        value = class_consistency(ProceduralGenerator(),Classifier(channels=[4,4]),5,batch_size=2)
        self.assertTrue(0 <= value <= 1)
