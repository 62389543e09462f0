import unittest

from latentadversary import ConfigError
from latentadversary.criteria import *

class TestLeastLikely(unittest.TestCase):
    def test_argmin(self):
        self.assertEqual(least_likely([0.5,0.1,0.4]),1)

    def test_ties(self):
        self.assertEqual(least_likely([0.4,0.2,0.2,0.2]),1)

    def test_empty(self):
        self.assertRaises(ValueError,least_likely,[])

class TestCriteria(unittest.TestCase):
    def test_untargeted(self):
        c = make_criterion('nontargeted',2)
        c.start([0.1,0.2,0.6,0.1])
        self.assertEqual(c.target,0)
        self.assertEqual(c.direction,-1)
        self.assertFalse(c.satisfied(2))
        self.assertTrue(c.satisfied(1))

    def test_ascent(self):
        c = make_criterion('nontargeted-ascent',1)
        c.start([0.1,0.8,0.1])
        self.assertEqual(c.target,1)
        self.assertEqual(c.direction,1)
        self.assertTrue(c.satisfied(0))

    def test_targeted(self):
        c = make_criterion('targeted',0,3,4)
        self.assertEqual(c.target,3)
        self.assertFalse(c.satisfied(1))
        self.assertTrue(c.satisfied(3))

    def test_invalid(self):
        self.assertRaises(ConfigError,make_criterion,'targeted',2,2,4)
        self.assertRaises(ConfigError,make_criterion,'targeted',2,4,4)
        self.assertRaises(ConfigError,make_criterion,'targeted',2,None,4)
        self.assertRaises(ConfigError,make_criterion,'sideways',2)
