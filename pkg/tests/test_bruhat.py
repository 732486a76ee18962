from __future__ import annotations

import sys
import tempfile
import unittest
from collections import Counter
from pathlib import Path
from unittest import mock

import numpy as np
from hypothesis import given, seed, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from signbalance.bruhat import (
    borel_stack,
    canonical_rep,
    cell_free_positions,
    codes_to_stack,
    decompose,
    decompose_sp,
    enumerate_cell_reps,
    enumerate_sp,
    gl_stack,
    is_canonical,
    restore_first_row,
    sp_borel,
    sp_borel_stack,
    sp_codes,
    stack_to_codes,
    symplectic_mask,
    transvections,
    u_pi_membership,
)
from signbalance.cache import EnumerationCache
from signbalance.coxeter import Perm, SignedPerm, embed_signed, identity_perm, inv_count, iterate_sn, longest, perm_matrix
from signbalance.errors import NotSupportedError, NotSymplecticError, ShapeMismatchError, SingularMatrixError
from signbalance.ff import GF2, make_spec
from signbalance.matgroup import Mat, from_rows, identity, is_symplectic, is_upper_triangular, mat_mul, random_invertible

F3 = make_spec(3)
F4 = make_spec(2, 2)


def _lower_unitriangular(n: int) -> list[Mat]:
    below = [(i, j) for i in range(n) for j in range(i)]
    out = []
    for bits in range(1 << len(below)):
        data = np.eye(n, dtype=np.int64)
        for k, (i, j) in enumerate(below):
            data[i, j] = (bits >> k) & 1
        out.append(Mat(GF2, data))
    return out


class DecompositionTests(unittest.TestCase):
    def test_worked_example(self) -> None:
        g = from_rows([[1, 1], [1, 0]], GF2)
        fac = decompose(g)
        self.assertEqual(fac.pi, Perm((1, 2)))
        self.assertEqual(fac.u.to_lists(), [[1, 0], [1, 1]])
        self.assertEqual(fac.b.to_lists(), [[1, 1], [0, 1]])

    def test_permutation_matrix_is_its_own_representative(self) -> None:
        for p in iterate_sn(3):
            rep, pi = canonical_rep(perm_matrix(p, F3))
            self.assertEqual(pi, p)
            self.assertEqual(rep, perm_matrix(p, F3))

    def test_singular_input(self) -> None:
        with self.assertRaises(SingularMatrixError):
            decompose(from_rows([[1, 1], [1, 1]], GF2))

    def test_round_trip_on_small_groups(self) -> None:
        for spec in (GF2, F3, F4):
            for data in gl_stack(2, spec):
                g = Mat(spec, data)
                fac = decompose(g)
                self.assertEqual(mat_mul(mat_mul(fac.u, perm_matrix(fac.pi, spec)), fac.b), g)
                self.assertTrue(u_pi_membership(fac.u, fac.pi))
                self.assertTrue(is_upper_triangular(fac.b))

    @seed(1)
    @settings(deadline=None, max_examples=60)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([GF2, F3, F4]), st.integers(2, 5))
    def test_random_matrices(self, rng_seed: int, spec, n: int) -> None:
        rng = np.random.default_rng(rng_seed)
        g = random_invertible(n, spec, rng)
        fac = decompose(g)
        rep, _ = canonical_rep(g)
        self.assertTrue(is_canonical(rep))
        self.assertEqual(mat_mul(mat_mul(fac.u, perm_matrix(fac.pi, spec)), fac.b), g)
        self.assertTrue(u_pi_membership(fac.u, fac.pi))
        upper = np.triu(rng.integers(0, spec.q, size=(n, n)), k=1)
        upper[np.arange(n), np.arange(n)] = rng.integers(1, spec.q, size=n)
        self.assertEqual(canonical_rep(mat_mul(g, Mat(spec, upper))), canonical_rep(g))


class CellTests(unittest.TestCase):
    def test_free_positions(self) -> None:
        self.assertEqual(cell_free_positions(Perm((1, 3, 2))).free_positions, {(2, 1), (3, 1)})
        self.assertEqual(cell_free_positions(longest(3)).dimension, 0)
        self.assertEqual(cell_free_positions(identity_perm(3)).sorted_positions(), [(2, 1), (3, 1), (3, 2)])

    def test_cell_dimension_mismatch_is_a_shape_error(self) -> None:
        with mock.patch("signbalance.bruhat.inv_count", return_value=0):
            with self.assertRaises(ShapeMismatchError):
                cell_free_positions(Perm((2, 1, 3)))

    def test_cell_sizes(self) -> None:
        self.assertEqual(len(list(enumerate_cell_reps(Perm((3, 1, 2)), GF2))), 2)
        self.assertEqual(len(list(enumerate_cell_reps(identity_perm(2), F3))), 3)
        total = sum(len(list(enumerate_cell_reps(p, GF2))) for p in iterate_sn(3))
        self.assertEqual(total, 21)
        for p in iterate_sn(3):
            for rep in enumerate_cell_reps(p, F3):
                self.assertTrue(is_canonical(rep))
                self.assertEqual(canonical_rep(rep)[1], p)

    def test_borel_counts(self) -> None:
        self.assertEqual(borel_stack(2, GF2).shape[0], 2)
        self.assertEqual(borel_stack(3, F3).shape[0], 8 * 27)
        self.assertEqual(borel_stack(1, F4).shape[0], 3)

    def test_gl_enumeration(self) -> None:
        for n, spec, order in ((3, GF2, 168), (2, F3, 48), (2, F4, 180)):
            stack = gl_stack(n, spec)
            self.assertEqual(stack.shape[0], order)
            self.assertEqual(len({row.tobytes() for row in stack}), order)

    def test_cell_size_law_in_gl3(self) -> None:
        per_pi = Counter(canonical_rep(Mat(GF2, data))[1] for data in gl_stack(3, GF2))
        for p, count in per_pi.items():
            self.assertEqual(count, 2 ** (3 - inv_count(p)) * 8)

    def test_u_pi_membership(self) -> None:
        lower = _lower_unitriangular(3)
        self.assertTrue(all(u_pi_membership(u, identity_perm(3)) for u in lower))
        passing = [u for u in lower if u_pi_membership(u, longest(3))]
        self.assertEqual(passing, [identity(3, GF2)])
        self.assertFalse(u_pi_membership(from_rows([[1, 1], [0, 1]], GF2), identity_perm(2)))


class SymplecticTests(unittest.TestCase):
    def test_orders(self) -> None:
        self.assertEqual(len(list(enumerate_sp(1))), 6)
        codes = sp_codes(2)
        self.assertEqual(codes.size, 720)
        self.assertEqual(np.unique(codes).size, 720)
        self.assertTrue(symplectic_mask(codes, 2).all())

    def test_sp_matches_filtered_gl(self) -> None:
        gl2 = {Mat(GF2, data) for data in gl_stack(2, GF2)}
        self.assertEqual({g for g in gl2 if is_symplectic(g)}, set(enumerate_sp(1)))
        gl4 = stack_to_codes(gl_stack(4, GF2))
        filtered = np.sort(gl4[symplectic_mask(gl4, 2)])
        np.testing.assert_array_equal(filtered, np.sort(sp_codes(2)))

    def test_code_conversions(self) -> None:
        stack = gl_stack(3, GF2)
        np.testing.assert_array_equal(codes_to_stack(stack_to_codes(stack), 3), stack)

    def test_transvections_are_symplectic(self) -> None:
        for n in (1, 2, 3):
            gens = transvections(n)
            self.assertEqual(len(gens), 4**n - 1)
            self.assertTrue(all(is_symplectic(t) for t in gens))

    def test_decompose_every_sp4_element(self) -> None:
        sigmas = Counter()
        for g in enumerate_sp(2):
            fac = decompose_sp(g)
            self.assertEqual(embed_signed(fac.sigma), fac.pi)
            self.assertTrue(is_symplectic(fac.u))
            self.assertTrue(is_symplectic(fac.b))
            sigmas[fac.sigma] += 1
        self.assertEqual(len(sigmas), 8)
        self.assertEqual(sum(sigmas.values()), 720)

    def test_signed_permutation_matrix(self) -> None:
        sigma = SignedPerm((-1,))
        g = perm_matrix(embed_signed(sigma), GF2)
        fac = decompose_sp(g)
        self.assertEqual(fac.sigma, sigma)
        self.assertEqual(fac.u, identity(2, GF2))
        self.assertEqual(fac.b, identity(2, GF2))

    def test_decompose_sp_rejections(self) -> None:
        with self.assertRaises(NotSymplecticError):
            decompose_sp(perm_matrix(Perm((2, 3, 4, 1)), GF2))
        with self.assertRaises(NotSupportedError):
            decompose_sp(identity(2, F3))
        with self.assertRaises(NotSupportedError):
            sp_codes(5)

    def test_symplectic_borel(self) -> None:
        self.assertEqual({str(b.to_lists()) for b in sp_borel(1)}, {"[[1, 0], [0, 1]]", "[[1, 1], [0, 1]]"})
        self.assertEqual(len(list(sp_borel(2))), 16)
        self.assertEqual(len(list(sp_borel(3))), 512)

    def test_symplectic_borel_matches_filtered_gl_borel(self) -> None:
        for n in (1, 2, 3):
            borel = borel_stack(2 * n, GF2)
            filtered = borel[symplectic_mask(stack_to_codes(borel), n)]
            np.testing.assert_array_equal(sp_borel_stack(n), filtered)

    def test_symplectic_borel_at_largest_half_dim(self) -> None:
        stack = sp_borel_stack(4)
        self.assertEqual(stack.shape, (1 << 16, 8, 8))
        self.assertTrue(symplectic_mask(stack_to_codes(stack), 4).all())
        self.assertFalse(np.tril(stack, k=-1).any())
        self.assertEqual(np.unique(stack_to_codes(stack)).size, 1 << 16)
        with self.assertRaises(NotSupportedError):
            sp_borel_stack(5)

    def test_first_row_completion(self) -> None:
        for b in sp_borel(2):
            self.assertEqual(restore_first_row(b), b)
            for bits in range(4):
                data = b.data.astype(np.int64).copy()
                data[1, 3] = bits & 1
                data[2, 3] = (bits >> 1) & 1
                self.assertTrue(is_symplectic(restore_first_row(Mat(GF2, data))))

    def test_closure_uses_cache(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            cache = EnumerationCache(tmp)
            first = sp_codes(2, cache)
            self.assertTrue(cache.path_for("Sp", 2, GF2).exists())
            second = sp_codes(2, cache)
            np.testing.assert_array_equal(np.sort(first), np.sort(second))
            gl_first = gl_stack(2, F3, cache)
            np.testing.assert_array_equal(gl_stack(2, F3, cache), gl_first)


if __name__ == "__main__":
    unittest.main()
