"""Exact q-analogs, group orders and integer polynomials in one variable t.

Everything here is arbitrary-precision Python ``int``; nothing touches floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import NotRootUniformError


@dataclass(frozen=True, slots=True)
class IntPoly:
    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [int(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> IntPoly:
        if not counts:
            return cls()
        if min(counts) < 0:
            raise ValueError(f"Exponents must be nonnegative, got {min(counts)}.")
        coeffs = [0] * (max(counts) + 1)
        for exponent, count in counts.items():
            coeffs[exponent] += int(count)
        return cls(tuple(coeffs))

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> IntPoly:
        return cls((0,) * exponent + (coefficient,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, exponent: int) -> int:
        return self.coeffs[exponent] if 0 <= exponent < len(self.coeffs) else 0

    def __add__(self, other: IntPoly) -> IntPoly:
        size = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self.coefficient(i) + other.coefficient(i) for i in range(size)))

    def __neg__(self) -> IntPoly:
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: IntPoly) -> IntPoly:
        return self + (-other)

    def __mul__(self, other: IntPoly | int) -> IntPoly:
        if isinstance(other, int):
            return IntPoly(tuple(c * other for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def shift(self, k: int) -> IntPoly:
        """Multiply by t^k."""
        if k < 0:
            raise ValueError(f"Shift must be nonnegative, got {k}.")
        return IntPoly((0,) * k + self.coeffs) if self.coeffs else IntPoly()

    def reduce_mod_cyclic(self, m: int) -> IntPoly:
        """Fold exponents modulo m, i.e. reduce modulo t^m - 1."""
        if m < 1:
            raise ValueError(f"Cyclic modulus must be >= 1, got {m}.")
        out = [0] * m
        for i, c in enumerate(self.coeffs):
            out[i % m] += c
        return IntPoly(tuple(out))

    def cyclic_coefficients(self, m: int) -> tuple[int, ...]:
        """The m residues c_0..c_{m-1}, zero padded."""
        reduced = self.reduce_mod_cyclic(m)
        return tuple(reduced.coefficient(i) for i in range(m))

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def total(self) -> int:
        return sum(self.coeffs)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Iterable[str | int] | str) -> IntPoly:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(int(c) for c in data))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else "-" if c == -1 else str(c)
                terms.append(f"{head}t" if i == 1 else f"{head}t^{i}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


def q_int(n: int, q: int) -> int:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}.")
    return sum(q**i for i in range(n))


def q_factorial(n: int, q: int) -> int:
    return math.prod(q_int(i, q) for i in range(1, n + 1))


def q_int_poly(n: int) -> IntPoly:
    return IntPoly((1,) * n)


def q_factorial_poly(n: int) -> IntPoly:
    out = IntPoly((1,))
    for i in range(1, n + 1):
        out = out * q_int_poly(i)
    return out


def bn_q_factorial(n: int, q: int) -> int:
    """[2]_q [4]_q ... [2n]_q."""
    return math.prod(q_int(2 * i, q) for i in range(1, n + 1))


def bn_q_factorial_poly(n: int) -> IntPoly:
    out = IntPoly((1,))
    for i in range(1, n + 1):
        out = out * q_int_poly(2 * i)
    return out


def order_gl(n: int, q: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    return q ** math.comb(n, 2) * (q - 1) ** n * q_factorial(n, q)


def order_sp(n: int, q: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    return q ** (n * n) * (q - 1) ** n * bn_q_factorial(n, q)


def borel_order_gl(n: int, q: int) -> int:
    return (q - 1) ** n * q ** math.comb(n, 2)


def eval_at_nontrivial_root(poly: IntPoly, q: int) -> int:
    """P(w) for any primitive q-th root of unity w, provided the value is root-independent."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}.")
    c = poly.cyclic_coefficients(q)
    if len(set(c[1:])) != 1:
        raise NotRootUniformError(f"Residues {list(c[1:])} are not uniform; P(w) depends on the choice of root.")
    return c[0] - c[1]


def eval_at_root_power(poly: IntPoly, q: int, power: int) -> int:
    """P(w^power) for a primitive q-th root w; power = 0 mod q gives P(1)."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}.")
    power %= q
    if power == 0:
        return poly.total()
    d = math.gcd(power, q)
    order = q // d
    step = power // d
    folded: dict[int, int] = {}
    for i, c in enumerate(poly.coeffs):
        if c:
            key = (step * i) % order
            folded[key] = folded.get(key, 0) + c
    return eval_at_nontrivial_root(IntPoly.from_counts(folded) if folded else IntPoly(), order)
