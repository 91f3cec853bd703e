import os
import unittest

import mock
from testfixtures import log_capture

from dstab.workers import Outcome, ordered_map, thread_count


class TestThreadCount(unittest.TestCase):
    """ DSTAB_THREADS handling """

    def test_env(self):
        with mock.patch.dict(os.environ, {'DSTAB_THREADS': '3'}):
            self.assertEqual(thread_count(), 3)

    def test_default(self):
        with mock.patch.dict(os.environ, {'DSTAB_THREADS': ''}):
            self.assertEqual(thread_count(), os.cpu_count() or 1)

    @log_capture()
    def test_invalid(self, lc):
        for value in ('zero', '0', '-2'):
            with mock.patch.dict(os.environ, {'DSTAB_THREADS': value}):
                self.assertEqual(thread_count(), 1)
        self.assertEqual(len([r for r in lc.records if r.levelname == 'WARNING']), 3)


class TestOrderedMap(unittest.TestCase):
    """ Thread pool map that keeps input order """

    def test_order(self):
        for threads in (1, 4):
            outcomes = ordered_map(lambda x: x * x, range(20), threads=threads)
            self.assertEqual([o.value for o in outcomes], [x * x for x in range(20)])
            self.assertEqual([o.index for o in outcomes], list(range(20)))

    def test_start(self):
        outcomes = ordered_map(str, 'ab', threads=1, start=10)
        self.assertEqual(outcomes, [Outcome(10, 'a'), Outcome(11, 'b')])

    def test_caught(self):
        def half(x):
            if x % 2:
                raise ValueError('odd')
            return x // 2

        outcomes = ordered_map(half, range(4), threads=2, catch=(ValueError,))
        self.assertEqual([o.ok for o in outcomes], [True, False, True, False])
        self.assertIsInstance(outcomes[1].error, ValueError)

    def test_uncaught(self):
        with self.assertRaises(KeyError):
            ordered_map(lambda x: {}[x], range(3), threads=2, catch=())
