from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from signbalance.coxeter import inv_count, iterate_sn
from signbalance.errors import NotRootUniformError
from signbalance.qseries import (
    IntPoly,
    bn_q_factorial,
    borel_order_gl,
    eval_at_nontrivial_root,
    eval_at_root_power,
    order_gl,
    order_sp,
    q_factorial,
    q_factorial_poly,
    q_int,
)

_coeff_lists = st.lists(st.integers(min_value=-50, max_value=50), max_size=12)


class QAnalogTests(unittest.TestCase):
    def test_q_integers(self) -> None:
        self.assertEqual(q_int(0, 5), 0)
        self.assertEqual(q_int(3, 2), 7)
        self.assertEqual(q_factorial(0, 7), 1)
        self.assertEqual(q_factorial(3, 2), 21)
        self.assertEqual(bn_q_factorial(2, 2), 45)
        self.assertEqual(q_factorial_poly(3).coeffs, (1, 2, 2, 1))

    def test_group_orders(self) -> None:
        self.assertEqual(order_gl(1, 5), 4)
        self.assertEqual(order_gl(2, 2), 6)
        self.assertEqual(order_gl(3, 2), 168)
        self.assertEqual(order_gl(4, 2), 20160)
        self.assertEqual(order_gl(2, 3), 48)
        self.assertEqual(order_sp(1, 2), 6)
        self.assertEqual(order_sp(2, 2), 720)
        self.assertEqual(order_sp(3, 2), 1451520)
        with self.assertRaises(ValueError):
            order_gl(0, 2)

    def test_order_is_borel_times_cell_sizes(self) -> None:
        for n in range(1, 6):
            for q in (2, 3, 4, 5):
                cells = sum(q ** (math.comb(n, 2) - inv_count(p)) for p in iterate_sn(n))
                self.assertEqual(order_gl(n, q), borel_order_gl(n, q) * cells)


class IntPolyTests(unittest.TestCase):
    def test_normalization_and_arithmetic(self) -> None:
        self.assertEqual(IntPoly((1, 2, 0, 0)).coeffs, (1, 2))
        self.assertEqual(IntPoly().degree, -1)
        self.assertEqual((IntPoly((1, 1)) * IntPoly((1, 1))).coeffs, (1, 2, 1))
        self.assertEqual((3 * IntPoly((1, 2))).coeffs, (3, 6))
        self.assertEqual(IntPoly((0, 1)).shift(2), IntPoly.monomial(3))
        self.assertEqual(IntPoly.from_counts({3: 2, 0: 1}).coeffs, (1, 0, 0, 2))
        self.assertEqual(str(IntPoly((2, -1, 0, 4))), "2 - t + 4t^3")

    def test_cyclic_reduction(self) -> None:
        self.assertEqual(IntPoly.monomial(3).reduce_mod_cyclic(2), IntPoly((0, 1)))
        self.assertEqual(IntPoly((0, 0, 2, 4)).reduce_mod_cyclic(2).coeffs, (2, 4))
        self.assertEqual(IntPoly((1,)).cyclic_coefficients(3), (1, 0, 0))

    def test_json_uses_decimal_strings(self) -> None:
        big = IntPoly((1, 10**40))
        self.assertEqual(big.to_json(), ["1", str(10**40)])
        self.assertEqual(IntPoly.from_json('["1", "2"]'), IntPoly((1, 2)))

    @settings(deadline=None, max_examples=100)
    @given(_coeff_lists, _coeff_lists)
    def test_ring_operations_match_evaluation(self, a: list[int], b: list[int]) -> None:
        pa, pb = IntPoly(tuple(a)), IntPoly(tuple(b))
        for x in (-2, -1, 0, 1, 3):
            self.assertEqual((pa * pb).evaluate(x), pa.evaluate(x) * pb.evaluate(x))
            self.assertEqual((pa - pb).evaluate(x), pa.evaluate(x) - pb.evaluate(x))


class RootEvaluationTests(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(eval_at_nontrivial_root(IntPoly((2, 4)), 2), -2)
        self.assertEqual(eval_at_nontrivial_root(IntPoly((0, 1, 1, 1)), 4), -1)
        self.assertEqual(eval_at_root_power(IntPoly((1, 1, 1)), 3, 0), 3)
        self.assertEqual(eval_at_root_power(IntPoly((1, 1, 1)), 3, 1), 0)
        self.assertEqual(eval_at_root_power(IntPoly((2, 4)), 4, 2), -2)

    def test_non_uniform_residues(self) -> None:
        with self.assertRaises(NotRootUniformError):
            eval_at_nontrivial_root(IntPoly((0, 1)), 3)

    @settings(deadline=None, max_examples=100)
    @given(_coeff_lists)
    def test_square_root_of_unity_is_minus_one(self, coeffs: list[int]) -> None:
        poly = IntPoly(tuple(coeffs))
        self.assertEqual(eval_at_root_power(poly, 2, 1), poly.evaluate(-1))
        self.assertEqual(eval_at_root_power(poly, 4, 2), poly.evaluate(-1))
        self.assertEqual(eval_at_root_power(poly, 5, 0), poly.evaluate(1))

    @settings(deadline=None, max_examples=100)
    @given(st.integers(min_value=-20, max_value=20), st.integers(min_value=-20, max_value=20), st.integers(2, 7))
    def test_uniform_residues(self, c0: int, c1: int, q: int) -> None:
        poly = IntPoly((c0,) + (c1,) * (q - 1))
        for power in range(1, q):
            if math.gcd(power, q) == 1:
                self.assertEqual(eval_at_root_power(poly, q, power), c0 - c1)


if __name__ == "__main__":
    unittest.main()
