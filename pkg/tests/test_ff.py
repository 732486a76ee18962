from __future__ import annotations

import sys
import unittest
from pathlib import Path

import galois
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from signbalance.errors import (
    FieldDivisionError,
    NotPrimeError,
    NotSupportedError,
    OutOfRangeError,
    ReducibleModulusError,
    SpecMismatchError,
)
from signbalance.ff import (
    _poly_rem,
    arith,
    elements,
    from_index,
    galois_field,
    index,
    index_relabeling,
    make_spec,
    parse_field,
    reversed_relabeling,
    successor,
    tables,
)

_FIELDS = [make_spec(2), make_spec(3), make_spec(2, 2), make_spec(5), make_spec(2, 3), make_spec(3, 2)]


class FieldSpecTests(unittest.TestCase):
    def test_default_moduli_are_smallest_irreducible(self) -> None:
        self.assertEqual(make_spec(2, 2).modulus, (1, 1, 1))
        self.assertEqual(make_spec(3, 2).modulus, (1, 0, 1))
        self.assertEqual(make_spec(2, 3).modulus, (1, 0, 1, 1))

    def test_prime_field_has_trivial_modulus(self) -> None:
        spec = make_spec(5)
        self.assertEqual(spec.q, 5)
        self.assertEqual(spec.descriptor, "5^1/0,1")

    def test_rejects_non_prime(self) -> None:
        with self.assertRaises(NotPrimeError):
            make_spec(4)

    def test_linear_modulus_is_normalized(self) -> None:
        self.assertEqual(make_spec(3, 1, (1, 1)), make_spec(3))
        self.assertEqual(make_spec(5, 1, [4, 1]).modulus, (0, 1))
        self.assertEqual(parse_field("5^1/3,1"), make_spec(5))
        with self.assertRaises(ValueError):
            make_spec(3, 1, (1, 2))

    def test_rejects_reducible_modulus(self) -> None:
        with self.assertRaises(ReducibleModulusError):
            make_spec(2, 2, [1, 0, 1])

    def test_rejects_oversized_field(self) -> None:
        with self.assertRaises(NotSupportedError):
            make_spec(2, 9)

    def test_parse_field_formats(self) -> None:
        self.assertEqual(parse_field("3"), make_spec(3))
        self.assertEqual(parse_field("2^2"), make_spec(2, 2))
        self.assertEqual(parse_field("2^2/1,1,1"), make_spec(2, 2, (1, 1, 1)))
        self.assertEqual(parse_field(" 3^2 / 2,2,1 ").modulus, (2, 2, 1))
        with self.assertRaises(ValueError):
            parse_field("GF(4)")


class FieldArithmeticTests(unittest.TestCase):
    def test_prime_field_examples(self) -> None:
        f3 = make_spec(3)
        self.assertEqual((f3(2) + f3(2)).index, 1)
        self.assertEqual((f3(2) * f3(2)).index, 1)
        self.assertEqual((-f3(1)).index, 2)
        self.assertEqual((f3(1) / f3(2)).index, 2)

    def test_f4_multiplication(self) -> None:
        f4 = make_spec(2, 2)
        x = f4(2)
        self.assertEqual((x * x).index, 3)
        self.assertEqual((x * f4(3)).index, 1)
        self.assertEqual(x.inverse().index, 3)
        self.assertEqual((f4(1) + x).index, 3)
        self.assertEqual(str(f4(3)), "x + 1")

    def test_division_by_zero(self) -> None:
        f5 = make_spec(5)
        with self.assertRaises(FieldDivisionError):
            f5(3) / f5(0)
        with self.assertRaises(FieldDivisionError):
            f5(0).inverse()

    def test_mixed_fields_rejected(self) -> None:
        with self.assertRaises(SpecMismatchError):
            arith("add", make_spec(2)(1), make_spec(3)(1))

    def test_index_bounds(self) -> None:
        spec = make_spec(3)
        with self.assertRaises(OutOfRangeError):
            from_index(spec, 3)
        with self.assertRaises(OutOfRangeError):
            from_index(spec, -1)

    def test_index_and_successor_walk_all_elements(self) -> None:
        spec = make_spec(3, 2)
        seen = [index(e) for e in elements(spec)]
        self.assertEqual(seen, list(range(9)))
        self.assertEqual(successor(spec(8)).index, 0)

    def test_relabelings(self) -> None:
        spec = make_spec(2, 2)
        self.assertEqual(reversed_relabeling(spec), (0, 3, 2, 1))
        with self.assertRaises(ValueError):
            index_relabeling(spec, (1, 0, 2, 3))


class FieldTableTests(unittest.TestCase):
    def test_galois_field_uses_the_modulus(self) -> None:
        f9 = make_spec(3, 2, (2, 2, 1))
        field = galois_field(f9)
        self.assertEqual(field.order, 9)
        self.assertEqual(field.irreducible_poly, galois.Poly([1, 2, 2], field=galois.GF(3)))
        self.assertEqual(galois_field(make_spec(5, 1, (2, 1))).order, 5)

    def test_products_match_polynomial_reduction(self) -> None:
        for spec in (make_spec(2, 2), make_spec(2, 3), make_spec(3, 2), make_spec(3, 2, (2, 2, 1))):
            t = tables(spec)
            for i in range(spec.q):
                for j in range(spec.q):
                    a, b = t.digits[i].tolist(), t.digits[j].tolist()
                    prod = [0] * (2 * spec.k - 1)
                    for s, x in enumerate(a):
                        for r, y in enumerate(b):
                            prod[s + r] += x * y
                    expected = int(np.dot(_poly_rem(prod, spec.modulus, spec.p), t.weights))
                    self.assertEqual(int(t.mul[i, j]), expected)

    def test_table_inverses_and_negatives(self) -> None:
        for spec in _FIELDS:
            t = tables(spec)
            units = np.arange(1, spec.q)
            np.testing.assert_array_equal(t.mul[units, t.inv[units]], np.ones(spec.q - 1))
            np.testing.assert_array_equal(t.add[np.arange(spec.q), t.neg], np.zeros(spec.q))
            self.assertFalse(t.mul.flags.writeable)


@st.composite
def _field_triples(draw):
    spec = draw(st.sampled_from(_FIELDS))
    values = st.integers(min_value=0, max_value=spec.q - 1)
    return spec, draw(values), draw(values), draw(values)


class FieldAxiomTests(unittest.TestCase):
    @settings(deadline=None, max_examples=200)
    @given(_field_triples())
    def test_ring_axioms(self, triple) -> None:
        spec, a, b, c = triple
        x, y, z = spec(a), spec(b), spec(c)
        self.assertEqual((x + y) + z, x + (y + z))
        self.assertEqual((x * y) * z, x * (y * z))
        self.assertEqual(x * (y + z), x * y + x * z)
        self.assertEqual(x + y, y + x)
        self.assertEqual(x * y, y * x)
        self.assertEqual(x - x, spec.zero)

    @settings(deadline=None, max_examples=200)
    @given(_field_triples())
    def test_nonzero_elements_are_invertible(self, triple) -> None:
        spec, a, _, _ = triple
        if a == 0:
            return
        self.assertEqual(spec(a) * spec(a).inverse(), spec.one)


if __name__ == "__main__":
    unittest.main()
