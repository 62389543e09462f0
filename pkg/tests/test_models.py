import unittest

import numpy as np

from latentadversary import ShapeError, ConfigError
from latentadversary.models import *
from latentadversary.tensor import set_precision, value_and_grad, finite_diff_grad,\
    relative_error, reduce_sum, mul

SMALL_GENERATOR = dict(latent_dim=8,mapping_layers=2,mapping_width=8,channels=[4]*8)
SMALL_CLASSIFIER = dict(channels=[4,4],classes=4)

class TestStyleGenerator(unittest.TestCase):
    def setUp(self):
        set_precision('test')
        self.generator = StyleGenerator(**SMALL_GENERATOR)

    def tearDown(self):
        set_precision('run')

    def test_schema(self):
        schema = self.generator.schema
        self.assertEqual(schema.num_layers,8)
        self.assertEqual(schema.style_sizes,(8,)*8)
        self.assertEqual(schema.noise_shapes[-1],(32,32))

    def test_sample_is_deterministic(self):
        a = self.generator.sample_latent(5)
        b = self.generator.sample_latent(5)
        self.assertTrue(a.same_as(b))
        self.assertFalse(a.same_as(self.generator.sample_latent(6)))
        a.validate(self.generator.schema)

    def test_image_range(self):
        x = self.generator(self.generator.sample_latent(0)).data
        self.assertEqual(x.shape,(1,3,32,32))
        self.assertTrue(np.all(np.abs(x) <= 1.))

    def test_batch(self):
        states = [self.generator.sample_latent(s) for s in range(2)]
        styles = [np.stack([s.styles[l] for s in states]) for l in range(8)]
        noises = [np.stack([s.noises[l] for s in states]) for l in range(8)]
        batch = self.generator.synthesize(styles,noises).data
        np.testing.assert_allclose(batch[1],self.generator(states[1]).data[0],atol=1e-10)

    def test_wrong_layer(self):
        state = self.generator.sample_latent(0)
        state.noises[3] = np.zeros((4,4))
        with self.assertRaises(ShapeError) as ctx:
            self.generator(state)
        self.assertIn('layer 3',ctx.exception.operation)

    def test_map_latent_shape(self):
        self.assertRaises(ShapeError,self.generator.map_latent,np.zeros(3))

class TestProceduralGenerator(unittest.TestCase):
    def test_family(self):
        family = ProceduralGenerator.family(3)
        self.assertEqual([g.class_index for g in family],[0,1,2])
        self.assertEqual(family[1].shape,'square')

    def test_image(self):
        g = ProceduralGenerator(class_index=2)
        x = g(g.sample_latent(1)).data
        self.assertEqual(x.shape,(1,3,32,32))
        self.assertTrue(np.all(np.abs(x) <= 1.))

    def test_invalid(self):
        self.assertRaises(ConfigError,ProceduralGenerator,class_index=4,classes=4)
        self.assertRaises(ConfigError,ProceduralGenerator,classes=9)

class TestClassifier(unittest.TestCase):
    def setUp(self):
        set_precision('test')
        self.classifier = Classifier(**SMALL_CLASSIFIER)

    def tearDown(self):
        set_precision('run')

    def test_outputs(self):
        x = np.random.default_rng(0).uniform(-1,1,(3,3,32,32))
        probs = self.classifier.classify(x)
        self.assertEqual(probs.shape,(3,4))
        np.testing.assert_allclose(probs.sum(axis=1),1.)
        self.assertEqual(list(self.classifier.predict(x)),list(probs.argmax(axis=1)))

    def test_single_image(self):
        self.assertEqual(self.classifier.logits(np.zeros((3,32,32))).shape,(1,4))

    def test_wrong_channels(self):
        self.assertRaises(ShapeError,self.classifier.logits,np.zeros((1,1,32,32)))

    def test_config(self):
        self.assertRaises(ConfigError,Classifier,classes=1)
        self.assertRaises(ConfigError,Classifier,image_size=30)
        self.assertRaises(ConfigError,Classifier,colour=True)

    def test_same_seed_same_weights(self):
        other = Classifier(**SMALL_CLASSIFIER)
        for a,b in zip(self.classifier.parameters(),other.parameters()):
            np.testing.assert_array_equal(a.data,b.data)

class TestComposite(unittest.TestCase):
    "gradient of the classifier output through the generator w.r.t. one style"
    def setUp(self):
        set_precision('test')

    def tearDown(self):
        set_precision('run')

    def check(self,generator,layer,variables):
        classifier = Classifier(**SMALL_CLASSIFIER)
        state = generator.sample_latent(3)
        weights = np.random.default_rng(1).standard_normal((1,4))

        def loss(t):
            styles = list(state.styles)
            noises = list(state.noises)
            if variables == 'style':
                styles[layer] = t
            else:
                noises[layer] = t
            return reduce_sum(mul(classifier.logits(generator.synthesize(styles,noises)),weights))

        point = state.styles[layer] if variables == 'style' else state.noises[layer]
        _,grads = value_and_grad(lambda ts: loss(ts[0]),[point])
        self.assertLess(relative_error(grads[0],finite_diff_grad(loss,point)),1e-4)

    def test_style_generator(self):
        self.check(StyleGenerator(**SMALL_GENERATOR),2,'style')
        self.check(StyleGenerator(**SMALL_GENERATOR),1,'noise')

    def test_procedural_generator(self):
        self.check(ProceduralGenerator(class_index=1),0,'style')
        self.check(ProceduralGenerator(class_index=1),6,'style')

class TestSegmentation(unittest.TestCase):
    def setUp(self):
        set_precision('test')

    def tearDown(self):
        set_precision('run')

    def test_segmenter(self):
        segmenter = Segmenter(label_classes=3,channels=[4,4,4])
        x = np.zeros((2,3,32,32))
        self.assertEqual(segmenter.segment(x).shape,(2,3,32,32))
        self.assertEqual(segmenter.predict(x).shape,(2,32,32))
        self.assertRaises(ShapeError,segmenter.logits,np.zeros((1,3,30,30)))

    def test_spade(self):
        spade = SpadeGenerator(label_classes=3,latent_dim=4,embed_channels=4,channels=[4]*8)
        layout = np.zeros((32,32),dtype=int)
        layout[8:20,8:20] = 2
        gammas,betas = spade.spade_modulation(layout)
        self.assertEqual(len(gammas),8)
        self.assertEqual(gammas[0].shape,(1,4,4,4))
        self.assertEqual(betas[-1].shape,(1,4,32,32))
        x = spade.spade_synthesize(gammas,betas,spade.sample_z(0)).data
        self.assertEqual(x.shape,(1,3,32,32))
        np.testing.assert_allclose(spade(layout,spade.sample_z(0)).data,x)
        gammas[2] = np.zeros((1,4,4,4))
        self.assertRaises(ShapeError,spade.spade_synthesize,gammas,betas,spade.sample_z(0))

    def test_one_hot(self):
        encoded = one_hot([[0,1],[2,1]],3)
        self.assertEqual(encoded.shape,(1,3,2,2))
        np.testing.assert_array_equal(encoded.sum(axis=1),1.)
        self.assertRaises(ValueError,one_hot,[[0,3]],3)

class TestBuildModel(unittest.TestCase):
    def test_descriptor(self):
        model = Classifier(**SMALL_CLASSIFIER)
        rebuilt = build_model(model.descriptor())
        self.assertEqual(rebuilt.config,model.config)
        self.assertEqual(rebuilt.num_parameters(),model.num_parameters())

    def test_unknown_kind(self):
        self.assertRaises(ConfigError,build_model,{'kind' : 'transformer'})
