import os
import shutil
import tempfile
import unittest

import numpy as np

from latentadversary import ConfigError
from latentadversary.attack import *
from latentadversary.models import Classifier, ProceduralGenerator
from latentadversary.tensor import set_precision

def small_models():
    return Classifier(channels=[4,4],classes=4),ProceduralGenerator.family(4)

class TestAttackConfig(unittest.TestCase):
    def test_defaults(self):
        config = AttackConfig()
        self.assertTrue(config.updates_style)
        self.assertTrue(config.updates_noise)
        self.assertEqual(len(config.style_group(8)),8)

    def test_invalid(self):
        self.assertRaises(ConfigError,AttackConfig,epsilon=-1.)
        self.assertRaises(ConfigError,AttackConfig,mode='targeted')
        self.assertRaises(ConfigError,AttackConfig,variables='pixels')
        self.assertRaises(ConfigError,AttackConfig,max_iters=0)
        self.assertRaises(ConfigError,AttackConfig,style_layers='2-3')

    def test_mode_defaults(self):
        self.assertEqual(AttackConfig().epsilon,0.004)
        targeted = AttackConfig(mode='targeted',target=1)
        self.assertEqual((targeted.epsilon,targeted.delta),(0.005,0.2))
        self.assertEqual(AttackConfig(mode='targeted',target=1,epsilon=0.01).epsilon,0.01)
        self.assertEqual(AttackConfig.from_dict({'mode' : 'targeted','target' : 0}).epsilon,0.005)

    def test_target_range(self):
        AttackConfig(mode='targeted',target=3).check_target(4)
        AttackConfig(mode='targeted',target='random').check_target(4)
        config = AttackConfig(mode='targeted',target=4)
        self.assertRaises(ConfigError,config.check_target,4)
        self.assertRaises(ConfigError,AttackConfig,mode='targeted',target=-1)

class TestApplyStep(unittest.TestCase):
    def setUp(self):
        set_precision('test')
        rng = np.random.default_rng(0)
        generator = ProceduralGenerator()
        self.state = generator.sample_latent(1)
        self.style_grads = [rng.standard_normal(s.shape) for s in self.state.styles]
        self.noise_grads = [rng.standard_normal(n.shape) for n in self.state.noises]
        self.style_grads[2][0] = 0.

    def tearDown(self):
        set_precision('run')

    def test_steps_are_exact(self):
        config = AttackConfig(epsilon=0.01,delta=0.2,style_layers='2:3',noise_layers='5:5')
        new = apply_step(self.state,self.style_grads,self.noise_grads,config)
        for l in range(8):
            ds = new.styles[l] - self.state.styles[l]
            dn = new.noises[l] - self.state.noises[l]
            if l in (2,3):
                np.testing.assert_allclose(ds,-0.01*np.sign(self.style_grads[l]),atol=1e-12)
            else:
                np.testing.assert_array_equal(new.styles[l],self.state.styles[l])
            if l == 5:
                np.testing.assert_allclose(np.abs(dn),0.2,atol=1e-12)
            else:
                np.testing.assert_array_equal(new.noises[l],self.state.noises[l])
        self.assertEqual(new.styles[2][0],self.state.styles[2][0])

    def test_variable_set(self):
        config = AttackConfig(variables='noise')
        new = apply_step(self.state,self.style_grads,self.noise_grads,config)
        for a,b in zip(new.styles,self.state.styles):
            np.testing.assert_array_equal(a,b)

    def test_ascent_direction(self):
        config = AttackConfig(variables='style',epsilon=0.5)
        new = apply_step(self.state,self.style_grads,self.noise_grads,config,1.)
        np.testing.assert_allclose(new.styles[0] - self.state.styles[0],
                                   0.5*np.sign(self.style_grads[0]),atol=1e-12)

    def test_input_untouched(self):
        before = self.state.copy()
        apply_step(self.state,self.style_grads,self.noise_grads,AttackConfig())
        self.assertTrue(before.same_as(self.state))

class TestRunAttack(unittest.TestCase):
    def setUp(self):
        self.classifier,self.generators = small_models()
        self.generator = self.generators[1]
        self.state = self.generator.sample_latent(4)
        self.prediction = int(self.classifier.predict(self.generator(self.state).data)[0])

    def test_already_fooled(self):
        label = (self.prediction + 1) % 4
        outcome = run_attack(self.state,label,AttackConfig(),self.classifier,self.generator)
        self.assertTrue(outcome.fooled)
        self.assertEqual(outcome.iterations_used,0)
        self.assertTrue(outcome.state.same_as(self.state))

    def test_zero_budget(self):
        config = AttackConfig(epsilon=0.,delta=0.,max_iters=3)
        outcome = run_attack(self.state,self.prediction,config,self.classifier,self.generator)
        self.assertFalse(outcome.fooled)
        self.assertEqual(outcome.iterations_used,3)
        self.assertEqual(len(outcome.trajectory),4)
        self.assertTrue(outcome.state.same_as(self.state))
        self.assertEqual(outcome.original_prediction,self.prediction)

    def test_iterations_bounded(self):
        config = AttackConfig(epsilon=0.05,delta=0.05,max_iters=5)
        outcome = run_attack(self.state,self.prediction,config,self.classifier,self.generator)
        self.assertLessEqual(outcome.iterations_used,5)
        self.assertEqual(len(outcome.trajectory),outcome.iterations_used + 1)
        self.assertEqual(outcome.fooled,outcome.final_prediction != self.prediction)
        self.assertEqual(outcome.target,outcome.to_record()['target'])

    def test_targeted_at_label(self):
        config = AttackConfig(mode='targeted',target=self.prediction)
        self.assertRaises(ConfigError,run_attack,self.state,self.prediction,config,
                          self.classifier,self.generator)

    def test_targeted_step(self):
        config = AttackConfig(mode='targeted',target=2)
        new = targeted_step(self.state,config,self.classifier,self.generator)
        new.validate(self.generator.schema)
        self.assertRaises(ConfigError,targeted_step,self.state,AttackConfig(),
                          self.classifier,self.generator)

class TestBatchAttack(unittest.TestCase):
    def setUp(self):
        self.classifier,self.generators = small_models()
        self.config = AttackConfig(max_iters=2,epsilon=0.05,delta=0.05)
        self.dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.dir)

    def test_threads_do_not_matter(self):
        a = batch_attack(range(6),self.config,self.classifier,self.generators)
        b = batch_attack(range(6),self.config,self.classifier,self.generators,threads=3)
        self.assertEqual([o.to_record() for o in a],[o.to_record() for o in b])

    def test_export(self):
        outcomes = batch_attack(range(3),self.config,self.classifier,self.generators)
        filename = os.path.join(self.dir,'outcomes.jsonl')
        export_outcomes(outcomes,filename,self.config)
        records = read_outcome_records(filename)
        self.assertEqual(len(records),3)
        self.assertEqual(records[0]['config_hash'],self.config.hash())
        self.assertEqual([r['seed'] for r in records],[0,1,2])

    def test_random_target(self):
        config = AttackConfig(mode='targeted',target='random')
        for seed in range(10):
            label,_ = draw_latent(self.generators,seed)
            self.assertNotEqual(draw_target(config,seed,label,4),label)
        self.assertIsNone(draw_target(AttackConfig(),0,0,4))

    def test_target_outside_classes(self):
        config = AttackConfig(mode='targeted',target=7,max_iters=1)
        self.assertRaises(ConfigError,batch_attack,range(2),config,self.classifier,self.generators)

    def test_sweep(self):
        rows = sweep_steps(range(2),self.config,self.classifier,self.generators,[0.,0.1],[0.])
        self.assertEqual([r['epsilon'] for r in rows],[0.,0.1])
        self.assertNotEqual(rows[0]['config_hash'],rows[1]['config_hash'])

class FakeOutcome(object):
    def __init__(self,fooled,iterations_used):
        self.fooled = fooled
        self.iterations_used = iterations_used

class TestAttackStats(unittest.TestCase):
    def test_fooled_only(self):
        stats = attack_stats([FakeOutcome(True,2),FakeOutcome(True,4),FakeOutcome(False,50)])
        self.assertEqual(stats['count'],3)
        self.assertAlmostEqual(stats['fooling_rate'],2/3.)
        self.assertEqual(stats['mean_iterations'],3.)
        self.assertEqual(stats['std_iterations'],1.)

    def test_none_fooled(self):
        stats = attack_stats([FakeOutcome(False,50)])
        self.assertEqual(stats['fooling_rate'],0.)
        self.assertIsNone(stats['mean_iterations'])
        self.assertEqual(attack_stats([])['count'],0)
