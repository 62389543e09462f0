import os
import shutil
import struct
import tempfile
import unittest

import numpy as np

from latentadversary import FormatError
from latentadversary.checkpoint import *
from latentadversary.models import Classifier, StyleGenerator
from latentadversary.tensor import precision

class TestCheckpoint(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.mkdtemp()
        self.filename = os.path.join(self.dir,'clf.gatc')
        self.model = Classifier(channels=[4,4],classes=3,seed=7)
        self.model.metadata['trained_against'] = 'pgd'
        save_checkpoint(self.model,self.filename)

    def tearDown(self):
        shutil.rmtree(self.dir)

    def corrupt(self,data):
        with open(self.filename,'wb') as fid:
            fid.write(data)

    def content(self):
        with open(self.filename,'rb') as fid:
            return fid.read()

    def test_round_trip(self):
        loaded = load_checkpoint(self.filename,'classifier')
        self.assertEqual(loaded.config,self.model.config)
        self.assertEqual(loaded.metadata['trained_against'],'pgd')
        x = np.random.default_rng(0).uniform(-1,1,(2,3,32,32))
        np.testing.assert_allclose(loaded.logits(x).data,self.model.logits(x).data,rtol=1e-5)

    def test_run_precision_exact(self):
        loaded = load_checkpoint(self.filename,'classifier')
        for p,q in zip(self.model.parameters(),loaded.parameters()):
            np.testing.assert_array_equal(p.data,q.data)

    def test_test_precision_rounded(self):
        with precision('test'):
            model = Classifier(channels=[4,4],classes=3,seed=7)
            save_checkpoint(model,self.filename)
            loaded = load_checkpoint(self.filename,'classifier')
        for p,q in zip(model.parameters(),loaded.parameters()):
            self.assertEqual(q.data.dtype,np.float64)
            np.testing.assert_array_equal(q.data,p.data.astype(np.float32))

    def test_wrong_kind(self):
        self.assertRaises(FormatError,load_checkpoint,self.filename,'segmenter')

    def test_bad_magic(self):
        self.corrupt(b'XXXX' + self.content()[4:])
        self.assertRaises(FormatError,read_checkpoint,self.filename)

    def test_bad_version(self):
        data = self.content()
        self.corrupt(data[:4] + struct.pack('<H',VERSION + 1) + data[6:])
        self.assertRaises(FormatError,read_checkpoint,self.filename)

    def test_truncated(self):
        data = self.content()
        self.corrupt(data[:-4])
        self.assertRaises(FormatError,read_checkpoint,self.filename)
        self.corrupt(data[:5])
        self.assertRaises(FormatError,read_checkpoint,self.filename)

    def test_trailing(self):
        self.corrupt(self.content() + b'\0'*4)
        self.assertRaises(FormatError,read_checkpoint,self.filename)

    def test_generator_order(self):
        paths = []
        for c in (1,0):
            path = os.path.join(self.dir,'g%d.gatc' % c)
            generator = StyleGenerator(latent_dim=4,mapping_layers=1,mapping_width=4,
                                       channels=[2]*8,class_index=c)
            save_checkpoint(generator,path)
            paths.append(path)
        self.assertRaises(FormatError,load_generators,paths)
        self.assertEqual([g.class_index for g in load_generators(paths[::-1])],[0,1])
