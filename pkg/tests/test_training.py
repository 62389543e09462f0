import unittest

import numpy as np

from latentadversary import ConfigError, AcceptanceError
from latentadversary.attack import AttackConfig
from latentadversary.data import SynthSpec, synth_dataset, Dataset
from latentadversary.models import Classifier, ProceduralGenerator, Segmenter, SpadeGenerator
from latentadversary.pixel import PixelAttackConfig
from latentadversary.segattack import SegAttackConfig
from latentadversary.tensor import add, scale
from latentadversary.training import *
from latentadversary.training import _pad, _Adversary, _ClassifierTask

class Biased(Classifier):
    "predicts the class favoured by a large logit offset, whatever the image"
    favoured = 0

    def logits(self,x):
        offset = np.zeros(self.classes)
        offset[self.favoured] = 10.
        return add(scale(Classifier.logits(self,x),1e-6),offset)

class AlwaysWrong(Biased):
    favoured = 1

class Recording(_Adversary):
    "hands out training images and remembers the requested counts"
    def __init__(self,source,empty=False):
        _Adversary.__init__(self)
        self.source = source
        self.empty = empty
        self.requests = []

    def __call__(self,model,count,batch_index,rng):
        self.requests.append(count)
        if self.empty:
            return np.zeros((0,3,32,32)),np.zeros(0,dtype=int)
        idx = np.arange(count) % len(self.source)
        return self.source.images[idx],self.source.labels[idx]

def small_classifier():
    return Classifier(channels=[4,4],classes=4)

class TestTrainConfig(unittest.TestCase):
    def test_split(self):
        self.assertEqual(TrainConfig(batch_size=64).split(),(32,32))
        self.assertEqual(TrainConfig(batch_size=64,ratio='1:0').split(),(64,0))
        self.assertEqual(TrainConfig(batch_size=8,ratio='1:3').split(),(2,6))
        self.assertEqual(TrainConfig(batch_size=2,ratio='3:1').split(),(1,1))

    def test_invalid(self):
        self.assertRaises(ConfigError,TrainConfig,ratio='0:1')
        self.assertRaises(ConfigError,TrainConfig,ratio='1-1')
        self.assertRaises(ConfigError,TrainConfig,attack='fgsm')
        self.assertRaises(ConfigError,TrainConfig,min_acceptance=2.)

    def test_adversarial_count(self):
        config = TrainConfig(batch_size=16)
        self.assertEqual(config.adversarial_count(8),8)
        self.assertEqual(config.adversarial_count(2),2)
        self.assertEqual(TrainConfig(batch_size=16,ratio='1:0').adversarial_count(3),0)
        config = TrainConfig(batch_size=8,ratio='1:3')
        self.assertEqual(config.adversarial_count(2),6)
        self.assertEqual(config.adversarial_count(1),3)

class TestTrainRun(unittest.TestCase):
    def test_curves(self):
        run = TrainRun(TrainConfig(ratio='1:0'))
        run.add_epoch(loss=1.,clean_accuracy=0.5,adversarial_accuracy=None)
        run.add_epoch(loss=0.5,clean_accuracy=0.75,adversarial_accuracy=None)
        self.assertEqual(len(run),2)
        self.assertEqual(run.clean_accuracy,[0.5,0.75])
        self.assertEqual(run.adversarial_accuracy,[])
        self.assertEqual(run.curves()['loss'],[1.,0.5])
        self.assertIsNone(run.metadata()['trained_against'])
        self.assertEqual(run.metadata()['final']['epoch'],1)
        self.assertEqual(run.to_dict()['config_hash'],TrainConfig(ratio='1:0').hash())

    def test_trained_against(self):
        self.assertEqual(TrainRun(TrainConfig(attack='recolor')).metadata()['trained_against'],'recolor')

class TestFit(unittest.TestCase):
    def setUp(self):
        self.train = synth_dataset(SynthSpec(seed=0),8)
        self.config = TrainConfig(epochs=2,batch_size=4,ratio='1:0',lr=0.05)

    def test_deterministic(self):
        a,b = small_classifier(),small_classifier()
        run_a = fit_classifier(a,self.train,self.config)
        run_b = adversarial_train(b,self.train,ProceduralGenerator.family(4),self.config)
        self.assertEqual(run_a.curves(),run_b.curves())
        for p,q in zip(a.parameters(),b.parameters()):
            np.testing.assert_array_equal(p.data,q.data)

    def test_parameters_change(self):
        model = small_classifier()
        before = [p.data.copy() for p in model.parameters()]
        run = fit_classifier(model,self.train,self.config,test=self.train)
        self.assertEqual(len(run),2)
        self.assertEqual(len(run.test_accuracy),2)
        self.assertTrue(any(not np.array_equal(a,p.data) for a,p in zip(before,model.parameters())))

    def test_needs_adversary(self):
        self.assertRaises(ConfigError,fit_classifier,small_classifier(),self.train,
                          self.config.replace(ratio='1:1'))

    def test_short_batch_composition(self):
        train = synth_dataset(SynthSpec(seed=0),10)
        adversary = Recording(train)
        config = TrainConfig(epochs=1,batch_size=16,ratio='1:1')
        run = fit_classifier(small_classifier(),train,config,adversary=adversary)
        self.assertEqual(adversary.requests,[8,2])
        self.assertEqual(run.epochs[0]['skipped_batches'],0)
        self.assertIsNotNone(run.adversarial_accuracy[0])

    def test_empty_adversarial_part(self):
        model = small_classifier()
        before = [p.data.copy() for p in model.parameters()]
        adversary = Recording(self.train,empty=True)
        run = fit_classifier(model,self.train,self.config.replace(ratio='1:1'),adversary=adversary)
        self.assertEqual(adversary.requests,[2]*8)
        self.assertEqual([e['skipped_batches'] for e in run.epochs],[4,4])
        self.assertEqual(run.clean_accuracy,[])
        for a,p in zip(before,model.parameters()):
            np.testing.assert_array_equal(a,p.data)

    def test_evaluate(self):
        accuracy = evaluate_task(_ClassifierTask(),small_classifier(),self.train,3)
        self.assertTrue(0 <= accuracy <= 1)

class TestGatBatch(unittest.TestCase):
    def setUp(self):
        self.generators = [ProceduralGenerator(class_index=0,classes=1)]

    def test_filter_rejects(self):
        config = TrainConfig(threshold=0,retry_factor=5)
        accepted,attempts = generate_gat_batch(Biased(channels=[4,4],classes=2),self.generators,
                                               AttackConfig(),config,2,rng=np.random.default_rng(0))
        self.assertEqual(accepted,[])
        self.assertEqual(attempts,10)

    def test_filter_accepts(self):
        config = TrainConfig(threshold=0)
        accepted,attempts = generate_gat_batch(AlwaysWrong(channels=[4,4],classes=2),self.generators,
                                               AttackConfig(),config,3,rng=np.random.default_rng(0))
        self.assertEqual(len(accepted),3)
        self.assertEqual(attempts,3)
        for outcome in accepted:
            self.assertTrue(outcome.fooled)
            self.assertEqual(outcome.iterations_used,0)
            self.assertEqual(outcome.label,0)

    def test_adversary(self):
        adversary = GatAdversary(self.generators,AttackConfig(),TrainConfig(threshold=0))
        x,y = adversary(AlwaysWrong(channels=[4,4],classes=2),2,0,np.random.default_rng(0))
        self.assertEqual(x.shape,(2,3,32,32))
        self.assertEqual(list(y),[0,0])
        self.assertEqual(adversary.epoch_acceptance(),1.)

    def test_acceptance_error(self):
        config = TrainConfig(threshold=0,acceptance_window=4,retry_factor=2)
        adversary = GatAdversary(self.generators,AttackConfig(),config)
        with self.assertRaises(AcceptanceError) as ctx:
            adversary(Biased(channels=[4,4],classes=2),2,0,np.random.default_rng(0))
        self.assertEqual(ctx.exception.rate,0.)

    def test_pad(self):
        self.assertEqual(_pad([1,2],5),[1,2,1,2,1])
        self.assertEqual(_pad([],3),[])

class TestAdversarialTraining(unittest.TestCase):
    def setUp(self):
        self.train = synth_dataset(SynthSpec(seed=1),8)

    def test_gat(self):
        config = TrainConfig(epochs=1,batch_size=4,threshold=3,retry_factor=2)
        run = adversarial_train(small_classifier(),self.train,ProceduralGenerator.family(4),config,
                                AttackConfig(epsilon=0.05,delta=0.05))
        self.assertEqual(len(run),1)
        self.assertEqual(run.metadata()['trained_against'],'gat')
        for rate in run.acceptance_rate:
            self.assertTrue(0 <= rate <= 1)

    def test_pgd(self):
        config = TrainConfig(epochs=1,batch_size=4)
        run = baseline_adv_train(small_classifier(),self.train,'pgd',config,
                                 PixelAttackConfig.for_kind('pgd',iterations=1))
        self.assertEqual(run.metadata()['trained_against'],'pgd')
        self.assertEqual(run.acceptance_rate,[1.])
        self.assertEqual(len(run.adversarial_accuracy),1)

    def test_capped_config(self):
        pixel = baseline_pixel_config('ifgsm-capped',TrainConfig(ifgsm_steps=3))
        self.assertEqual(pixel.kind,'ifgsm')
        self.assertEqual(pixel.iterations,3)
        self.assertFalse(pixel.random_start)
        custom = PixelAttackConfig.for_kind('spatial',flow_budget=1.)
        self.assertEqual(baseline_pixel_config('spatial',TrainConfig(),custom).flow_budget,1.)
        self.assertEqual(baseline_pixel_config('recolor',TrainConfig(),custom).kind,'recolor')

    def test_unknown_baseline(self):
        self.assertRaises(ValueError,baseline_adv_train,small_classifier(),self.train,'gat',TrainConfig())

class TestSegmenterTraining(unittest.TestCase):
    def setUp(self):
        self.train = synth_dataset(SynthSpec(seed=2),4)
        self.segmenter = Segmenter(label_classes=5,channels=[4,4,4])

    def test_seg_adversarial(self):
        spade = SpadeGenerator(label_classes=5,latent_dim=4,embed_channels=4,channels=[4]*8)
        config = TrainConfig(epochs=1,batch_size=4)
        run = seg_adversarial_train(self.segmenter,self.train,spade,config,SegAttackConfig(iterations=2))
        self.assertEqual(len(run),1)
        self.assertTrue(0 <= seg_pixel_accuracy(self.segmenter,self.train) <= 1)

    def test_needs_layouts(self):
        data = Dataset(self.train.images,self.train.labels,4)
        self.assertRaises(ValueError,fit_segmenter,self.segmenter,data,TrainConfig(ratio='1:0'))
