from __future__ import annotations

import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from signbalance import verify
from signbalance.cache import EnumerationCache
from signbalance.config import Settings

_CACHED_CHECKS = {
    "_check_orders": 2,
    "_check_bruhat": 3,
    "_check_gl_imbalance": 3,
    "_check_residues": 3,
    "_check_sp_imbalance": 2,
    "_check_sp_structure": 2,
    "_check_bijection": 1,
    "_check_csp": 1,
}


def _patched_checks():
    names = [*_CACHED_CHECKS, "_check_mahonian", "_check_gl_cosets"]
    return {name: mock.patch.object(verify, name) for name in names}


class VerifySuiteCacheTests(unittest.TestCase):
    def _run_with_mocks(self, cache: EnumerationCache | None) -> dict[str, mock.MagicMock]:
        patches = _patched_checks()
        mocks = {name: patch.start() for name, patch in patches.items()}
        try:
            result = verify.verify_suite(Settings(workers=1), quick=True, cache=cache)
        finally:
            for patch in patches.values():
                patch.stop()
        self.assertTrue(result.passed)
        return mocks

    def test_one_temporary_cache_is_shared_by_every_check(self) -> None:
        mocks = self._run_with_mocks(None)
        caches = {id(mocks[name].call_args.args[pos]) for name, pos in _CACHED_CHECKS.items()}
        self.assertEqual(len(caches), 1)
        cache = mocks["_check_csp"].call_args.args[1]
        self.assertIsInstance(cache, EnumerationCache)
        self.assertFalse(cache.directory.exists())

    def test_given_cache_is_passed_through(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            cache = EnumerationCache(tmp)
            mocks = self._run_with_mocks(cache)
        for name, pos in _CACHED_CHECKS.items():
            self.assertIs(mocks[name].call_args.args[pos], cache)


if __name__ == "__main__":
    unittest.main()
