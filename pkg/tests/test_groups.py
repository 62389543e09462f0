import unittest

from latentadversary import ConfigError
from latentadversary.groups import *

class TestLayerGroup(unittest.TestCase):
    def setUp(self):
        self.a = LayerGroup(0,3)
        self.b = LayerGroup(2,5)
        self.c = LayerGroup(6,7)
        self.e = LayerGroup.empty()

    def test_contains(self):
        self.assertTrue(0 in self.a)
        self.assertTrue(3 in self.a)
        self.assertFalse(4 in self.a)
        self.assertFalse(0 in self.e)

    def test_len(self):
        self.assertEqual(len(self.a),4)
        self.assertEqual(len(self.e),0)
        self.assertEqual(list(LayerGroup.single(4)),[4])

    def test_disjoint(self):
        self.assertFalse(self.a.is_disjoint(self.b))
        self.assertTrue(self.a.is_disjoint(self.c))
        self.assertTrue(self.e.is_disjoint(self.a))

    def test_intersection(self):
        self.assertEqual(self.a.intersection(self.b),LayerGroup(2,3))
        self.assertTrue(self.a.intersection(self.c).is_empty())

    def test_equality(self):
        self.assertEqual(LayerGroup(2,1),LayerGroup(5,0))
        self.assertEqual(hash(LayerGroup(2,1)),hash(self.e))
        self.assertNotEqual(self.a,self.b)

    def test_mask(self):
        self.assertEqual(self.c.mask(8),[False]*6 + [True]*2)

    def test_parse(self):
        self.assertEqual(LayerGroup.parse('2:5'),self.b)
        self.assertEqual(LayerGroup.parse('all',8),LayerGroup(0,7))
        self.assertEqual(LayerGroup.parse(':',8),LayerGroup.everything(8))
        self.assertEqual(str(LayerGroup.parse(' 6:7 ')),'6:7')

    def test_parse_errors(self):
        self.assertRaises(ConfigError,LayerGroup.parse,'2-5')
        self.assertRaises(ConfigError,LayerGroup.parse,'all')
        self.assertRaises(ConfigError,LayerGroup.parse,'3:8',8)
        self.assertRaises(ConfigError,LayerGroup.parse,'5:2',8)

class TestLayerSchedule(unittest.TestCase):
    def test_consecutive(self):
        schedule = LayerSchedule.consecutive(8,2)
        self.assertEqual(len(schedule),4)
        self.assertEqual(schedule.groups[0],LayerGroup(0,1))
        self.assertEqual(schedule.groups[-1],LayerGroup(6,7))
        self.assertEqual(len(LayerSchedule.consecutive(7,3)),3)

    def test_rotation(self):
        schedule = LayerSchedule.consecutive(8,2)
        self.assertEqual(schedule[0],(LayerGroup(0,1),'style'))
        self.assertEqual(schedule[1],(LayerGroup(0,1),'noise'))
        self.assertEqual(schedule[2],(LayerGroup(2,3),'style'))
        self.assertEqual(schedule[7],(LayerGroup(6,7),'noise'))
        self.assertEqual(schedule[8],(LayerGroup(0,1),'style'))

    def test_invalid(self):
        self.assertRaises(ValueError,LayerSchedule,[LayerGroup(0,3),LayerGroup(2,5)])
        self.assertRaises(ValueError,LayerSchedule,[])
        self.assertRaises(ValueError,LayerSchedule,[LayerGroup.empty()])
        self.assertRaises(ValueError,LayerSchedule.consecutive,8,0)

    def test_pairwise(self):
        self.assertEqual(list(pairwise([1,2,3])),[(1,2),(2,3)])
