from __future__ import annotations

import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from signbalance.bruhat import gl_stack
from signbalance.cache import EnumerationCache
from signbalance.errors import CacheFormatError
from signbalance.ff import GF2, make_spec

F4 = make_spec(2, 2)


class EnumerationCacheTests(unittest.TestCase):
    def test_path_naming(self) -> None:
        cache = EnumerationCache("/tmp/sbal")
        self.assertEqual(cache.path_for("GL", 3, F4).name, "GL_n3_2^2_1-1-1.sbal")

    def test_miss_returns_none(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            self.assertIsNone(EnumerationCache(tmp).load("GL", 2, GF2, 2))

    def test_round_trip_both_encodings(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            cache = EnumerationCache(tmp)
            for n, spec in ((3, GF2), (2, F4)):
                stack = gl_stack(n, spec)
                path = cache.store("GL", n, spec, stack)
                self.assertTrue(path.read_bytes().startswith(b"SBAL1\nGL "))
                np.testing.assert_array_equal(cache.load("GL", n, spec, n), stack)

    def test_header_mismatch(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            cache = EnumerationCache(tmp)
            path = cache.store("GL", 2, GF2, gl_stack(2, GF2))
            path.write_bytes(path.read_bytes().replace(b"GL 2", b"GL 3", 1))
            with self.assertRaises(CacheFormatError):
                cache.load("GL", 2, GF2, 2)

    def test_truncated_body(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            cache = EnumerationCache(tmp)
            path = cache.store("GL", 2, F4, gl_stack(2, F4))
            path.write_bytes(path.read_bytes()[:-3])
            with self.assertRaises(CacheFormatError):
                cache.load("GL", 2, F4, 2)

    def test_bad_magic(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            cache = EnumerationCache(tmp)
            cache.path_for("Sp", 1, GF2).write_text("nope\n", encoding="ascii")
            with self.assertRaises(CacheFormatError):
                cache.load("Sp", 1, GF2, 2)


if __name__ == "__main__":
    unittest.main()
