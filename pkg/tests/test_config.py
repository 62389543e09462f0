import json
import os
import shutil
import tempfile
import unittest
from collections import OrderedDict

from latentadversary import ConfigError
from latentadversary.attack import AttackConfig
from latentadversary.config import *

class TestOptions(unittest.TestCase):
    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as ctx:
            AttackConfig(colour='red')
        self.assertEqual(ctx.exception.field,'attack.colour')

    def test_defaults_are_copies(self):
        a,b = ModelPaths(),ModelPaths()
        a.generators.append('g.gatc')
        self.assertEqual(b.generators,[])

    def test_replace(self):
        config = AttackConfig(epsilon=0.1)
        other = config.replace(delta=0.5)
        self.assertEqual(other.epsilon,0.1)
        self.assertEqual(config.delta,0.2)
        self.assertNotEqual(config,other)
        self.assertNotEqual(config.hash(),other.hash())

    def test_from_dict(self):
        self.assertEqual(AttackConfig.from_dict(None),AttackConfig())
        self.assertRaises(ConfigError,AttackConfig.from_dict,[1,2])

    def test_hash_ignores_key_order(self):
        a = OrderedDict([('x',1),('y',[1,2])])
        b = OrderedDict([('y',[1,2]),('x',1)])
        self.assertEqual(config_hash(a),config_hash(b))
        self.assertEqual(canonical_json(a),'{"x":1,"y":[1,2]}')

class TestRatio(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(parse_ratio('1:1'),(1,1))
        self.assertEqual(parse_ratio('3:0'),(3,0))

    def test_invalid(self):
        for text in ('1','a:b','0:0','-1:2','1:2:3'):
            self.assertRaises(ConfigError,parse_ratio,text)

class TestRunConfig(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.dir)

    def write(self,text):
        filename = os.path.join(self.dir,'run.json')
        with open(filename,'w') as fid:
            fid.write(text)
        return filename

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.seed,0)
        self.assertEqual(config.attack,AttackConfig())
        self.assertEqual(config.eval.samples,500)

    def test_seed_inheritance(self):
        config = RunConfig({'seed' : 7,'train' : {'seed' : 3}})
        self.assertEqual(config.attack.seed,7)
        self.assertEqual(config.data.seed,7)
        self.assertEqual(config.train.seed,3)

    def test_unknown_section(self):
        with self.assertRaises(ConfigError) as ctx:
            RunConfig({'atack' : {}})
        self.assertEqual(ctx.exception.field,'atack')
        self.assertRaises(ConfigError,RunConfig,{'attack' : 3})

    def test_round_trip(self):
        config = RunConfig({'seed' : 2,'attack' : {'epsilon' : 0.01}})
        again = RunConfig(config.to_dict())
        self.assertEqual(again.to_dict(),config.to_dict())

    def test_line_numbers(self):
        filename = self.write('{\n  "attack" : {\n    "epsilonn" : 0.1\n  }\n}\n')
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.load(filename)
        self.assertEqual(ctx.exception.line,3)
        self.assertEqual(ctx.exception.field,'attack.epsilonn')

    def test_malformed(self):
        filename = self.write('{\n  "seed" : 1,\n  "attack" : {,}\n}\n')
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.load(filename)
        self.assertEqual(ctx.exception.line,3)
        self.assertRaises(ConfigError,RunConfig.load,self.write('[1,2]'))

    def test_invalid_value(self):
        filename = self.write(json.dumps({'attack' : {'epsilon' : -1}},indent=1))
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.load(filename)
        self.assertEqual(ctx.exception.line,3)

    def test_missing_checkpoint(self):
        filename = self.write(json.dumps({'models' : {'classifier' : 'missing.gatc'}}))
        self.assertRaises(ConfigError,RunConfig.load,filename)
        config = RunConfig.load(filename,check_paths=False)
        self.assertRaises(ConfigError,config.models.check_paths,['classifier'])
        config.models.check_paths(['segmenter'])

    def test_overrides(self):
        filename = self.write(json.dumps({'seed' : 1,'attack' : {'seed' : 4,'epsilon' : 0.5}}))
        config = RunConfig.load(filename,overrides={'seed' : 9,'attack.delta' : 0.1})
        self.assertEqual(config.seed,9)
        self.assertEqual(config.attack.seed,9)
        self.assertEqual(config.attack.epsilon,0.5)
        self.assertEqual(config.attack.delta,0.1)
        self.assertEqual(config.train.seed,9)

class TestApplyOverrides(unittest.TestCase):
    def test_new_section(self):
        document = apply_overrides(OrderedDict(),{'train.ratio' : '1:0'})
        self.assertEqual(document,{'train' : {'ratio' : '1:0'}})

    def test_malformed(self):
        self.assertRaises(ConfigError,apply_overrides,{},{'epsilon' : 1.})
        self.assertRaises(ConfigError,apply_overrides,{'attack' : 1},{'attack.epsilon' : 1.})
