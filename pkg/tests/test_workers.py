import threading
import unittest

from latentadversary.workers import *

class TestParallelMap(unittest.TestCase):
    def setUp(self):
        set_quiet(True)

    def tearDown(self):
        set_quiet(False)

    def test_order(self):
        self.assertEqual(parallel_map(lambda x: x*x,range(20),threads=4),[x*x for x in range(20)])

    def test_inline(self):
        names = parallel_map(lambda x: threading.current_thread().name,range(3))
        self.assertEqual(set(names),set([threading.current_thread().name]))

    def test_threads(self):
        self.assertRaises(ValueError,parallel_map,abs,[1],0)
        self.assertEqual(parallel_map(abs,[],2),[])
