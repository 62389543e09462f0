import unittest

import numpy as np

from latentadversary import ShapeError
from latentadversary.latents import *

class TestLatentState(unittest.TestCase):
    def setUp(self):
        self.schema = LatentSchema([4,4,6],[(2,2),(4,4),(4,4)])
        rng = np.random.default_rng(3)
        self.state = LatentState([rng.standard_normal(s) for s in self.schema.style_sizes],
                                 [rng.standard_normal(s) for s in self.schema.noise_shapes])

    def test_validate(self):
        self.state.validate(self.schema)
        self.assertEqual(self.state.num_layers,3)

    def test_validate_wrong_shape(self):
        bad = self.state.copy()
        bad.noises[1] = np.zeros((3,3))
        with self.assertRaises(ShapeError) as ctx:
            bad.validate(self.schema)
        self.assertEqual(ctx.exception.operation,'noise[1]')

    def test_copy_is_independent(self):
        other = self.state.copy()
        self.assertTrue(other.same_as(self.state))
        other.styles[0][0] += 1.
        self.assertFalse(other.same_as(self.state))

    def test_dict(self):
        self.assertTrue(LatentState.from_dict(self.state.to_dict()).same_as(self.state))

    def test_schema(self):
        self.assertEqual(self.schema.num_layers,3)
        self.assertRaises(ValueError,LatentSchema,[4],[(2,2),(4,4)])
        self.assertEqual(self.schema,LatentSchema([4,4,6],[(2,2),(4,4),(4,4)]))
