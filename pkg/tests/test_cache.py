#
#  test_cache.py
#
import os
import tempfile
import unittest
from unittest import mock

import cache
from util import LIMITS_ENV, reload_settings


class SupportCacheTests(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.directory.name, "supports.pkl")
        self.env = mock.patch.dict(os.environ, {LIMITS_ENV: f"cache_entries=2,cache_file={self.path}"})
        self.env.start()
        reload_settings()
        cache.clear()
        self.calls = []

    def tearDown(self):
        cache.clear()
        self.env.stop()
        reload_settings()
        self.directory.cleanup()

    def compute(self, key):
        def run():
            self.calls.append(key)
            return key * 10
        return run

    def test_least_recently_used_is_evicted(self):
        for key in (1, 2):
            cache.get_or_compute(key, self.compute(key))
        self.assertEqual(cache.get_or_compute(1, self.compute(1)), 10)
        cache.get_or_compute(3, self.compute(3))
        self.assertEqual(cache.size(), 2)
        cache.get_or_compute(1, self.compute(1))
        cache.get_or_compute(2, self.compute(2))
        self.assertEqual(self.calls, [1, 2, 3, 2])

    def test_misses_do_not_write_the_file(self):
        for key in (1, 2, 3):
            cache.get_or_compute(key, self.compute(key))
        self.assertFalse(os.path.exists(self.path))
        self.assertTrue(cache.flush())
        self.assertEqual(cache.import_cache(self.path), {2: 20, 3: 30})
        self.assertFalse(cache.flush())

    def test_flushed_entries_are_reloaded(self):
        cache.get_or_compute(4, self.compute(4))
        cache.flush()
        cache.clear()
        self.assertEqual(cache.get_or_compute(4, self.compute(4)), 40)
        self.assertEqual(self.calls, [4])
        self.assertFalse(cache.flush())

    def test_missing_file_is_empty(self):
        self.assertEqual(cache.import_cache(os.path.join(self.directory.name, "absent.pkl")), {})


if __name__ == "__main__":
    unittest.main()
