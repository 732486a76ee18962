"""Exact arithmetic in F_p and F_{p^k}.

Elements are identified with integers in [0, q) through the base-p value of
their coefficient vector (constant term least significant). That integer is
both the storage format used by matrices and the bijection behind the s(K)
statistic, and its natural order is the lexicographic order on coordinates.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import galois
import numpy as np

from .errors import (
    FieldDivisionError,
    NotPrimeError,
    NotSupportedError,
    OutOfRangeError,
    ReducibleModulusError,
    SpecMismatchError,
)

MAX_ORDER = 256

_FIELD_RE = re.compile(r"^\s*(\d+)(?:\s*\^\s*(\d+))?\s*(?:/\s*([\d\s,]+))?\s*$")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_rem(a: Sequence[int], divisor: Sequence[int], p: int) -> list[int]:
    """Remainder of a by a monic divisor over Z_p; coefficients constant term first."""
    deg = len(divisor) - 1
    rem = [c % p for c in a]
    for top in range(len(rem) - 1, deg - 1, -1):
        coef = rem[top]
        if not coef:
            continue
        base = top - deg
        for j, d in enumerate(divisor):
            rem[base + j] = (rem[base + j] - coef * d) % p
    rem = rem[:deg]
    return rem + [0] * (deg - len(rem))


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= k/2."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not any(_poly_rem(modulus, list(low) + [1], p)):
                return False
    return True


@dataclass(frozen=True, slots=True)
class FieldSpec:
    p: int
    k: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def descriptor(self) -> str:
        coeffs = ",".join(str(c) for c in self.modulus)
        return f"{self.p}^{self.k}/{coeffs}"

    @property
    def zero(self) -> FieldElement:
        return from_index(self, 0)

    @property
    def one(self) -> FieldElement:
        return from_index(self, 1)

    def __call__(self, value: int) -> FieldElement:
        return from_index(self, value)

    def __str__(self) -> str:
        return f"F_{self.q}" if self.k == 1 else f"F_{self.q} ({self.descriptor})"


@dataclass(frozen=True, slots=True)
class FieldTables:
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    digits: np.ndarray
    weights: np.ndarray


def make_spec(p: int, k: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime.")
    if k < 1:
        raise ValueError(f"Extension degree must be >= 1, got {k}.")
    if p**k > MAX_ORDER:
        raise NotSupportedError(f"Field order {p}^{k} exceeds the supported maximum {MAX_ORDER}.")

    if modulus is None:
        if k == 1:
            return FieldSpec(p=p, k=1, modulus=(0, 1))
        for low in itertools.product(range(p), repeat=k):
            candidate = tuple(low) + (1,)
            if is_irreducible(candidate, p):
                return FieldSpec(p=p, k=k, modulus=candidate)
        raise ReducibleModulusError(f"No irreducible polynomial of degree {k} over Z_{p}.")  # pragma: no cover

    coeffs = tuple(int(c) for c in modulus)
    if len(coeffs) != k + 1 or coeffs[-1] != 1:
        raise ValueError(f"Modulus must be monic of degree {k}, got coefficients {coeffs}.")
    if any(c < 0 or c >= p for c in coeffs):
        raise ValueError(f"Modulus coefficients must lie in [0, {p}), got {coeffs}.")
    if k == 1:
        # Every monic linear modulus gives the same Z_p.
        return FieldSpec(p=p, k=1, modulus=(0, 1))
    if not is_irreducible(coeffs, p):
        raise ReducibleModulusError(f"Modulus {coeffs} is reducible over Z_{p}.")
    return FieldSpec(p=p, k=k, modulus=coeffs)


def parse_field(text: str) -> FieldSpec:
    """Parse "p", "p^k" or "p^k/c0,c1,...,ck"."""
    match = _FIELD_RE.match(text)
    if not match:
        raise ValueError(f"Unrecognized field descriptor: {text!r}")
    p = int(match.group(1))
    k = int(match.group(2) or 1)
    raw = match.group(3)
    modulus = None
    if raw:
        modulus = [int(tok) for tok in re.split(r"[\s,]+", raw.strip()) if tok]
    return make_spec(p, k, modulus)


def _digits_of(i: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(i % p)
        i //= p
    return out


@functools.lru_cache(maxsize=None)
def galois_field(spec: FieldSpec) -> type[galois.FieldArray]:
    """The galois field class for ``spec``; its integer representation is our index."""
    if spec.k == 1:
        return galois.GF(spec.p)
    base = galois.GF(spec.p)
    # galois lists coefficients highest degree first.
    poly = galois.Poly(list(reversed(spec.modulus)), field=base)
    return galois.GF(spec.q, irreducible_poly=poly)


def _plain(arr: galois.FieldArray) -> np.ndarray:
    return arr.view(np.ndarray).astype(np.uint8)


@functools.lru_cache(maxsize=None)
def tables(spec: FieldSpec) -> FieldTables:
    p, k, q = spec.p, spec.k, spec.q
    field = galois_field(spec)
    x = field(np.arange(q))
    digits = np.array([_digits_of(i, p, k) for i in range(q)], dtype=np.int64).reshape(q, k)
    weights = np.array([p**t for t in range(k)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.uint8)
    inv[1:] = _plain(np.reciprocal(x[1:]))

    out = FieldTables(
        add=_plain(x[:, None] + x[None, :]),
        mul=_plain(x[:, None] * x[None, :]),
        neg=_plain(-x),
        inv=inv,
        digits=digits,
        weights=weights,
    )
    for arr in (out.add, out.mul, out.neg, out.inv, out.digits, out.weights):
        arr.setflags(write=False)
    return out


@dataclass(frozen=True, slots=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != self.spec.k:
            raise ValueError(f"Expected {self.spec.k} coefficients, got {len(coeffs)}.")
        if any(c < 0 or c >= self.spec.p for c in coeffs):
            raise ValueError(f"Coefficients must lie in [0, {self.spec.p}), got {coeffs}.")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def index(self) -> int:
        return index(self)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __add__(self, other: FieldElement) -> FieldElement:
        return arith("add", self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return arith("sub", self, other)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return arith("mul", self, other)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return arith("div", self, other)

    def __neg__(self) -> FieldElement:
        return arith("neg", self)

    def inverse(self) -> FieldElement:
        return arith("inv", self)

    def __str__(self) -> str:
        if self.spec.k == 1:
            return str(self.coeffs[0])
        terms = []
        for power in range(self.spec.k - 1, -1, -1):
            c = self.coeffs[power]
            if not c:
                continue
            if power == 0:
                terms.append(str(c))
                continue
            head = "" if c == 1 else str(c)
            terms.append(f"{head}x" if power == 1 else f"{head}x^{power}")
        return " + ".join(terms) or "0"


def index(e: FieldElement) -> int:
    value = 0
    for c in reversed(e.coeffs):
        value = value * e.spec.p + c
    return value


def from_index(spec: FieldSpec, i: int) -> FieldElement:
    i = int(i)
    if i < 0 or i >= spec.q:
        raise OutOfRangeError(f"Index {i} outside [0, {spec.q}).")
    return FieldElement(spec, tuple(_digits_of(i, spec.p, spec.k)))


def successor(e: FieldElement) -> FieldElement:
    return from_index(e.spec, (index(e) + 1) % e.spec.q)


def elements(spec: FieldSpec) -> Iterator[FieldElement]:
    for i in range(spec.q):
        yield from_index(spec, i)


def arith(op: str, a: FieldElement, b: FieldElement | None = None) -> FieldElement:
    spec = a.spec
    field = galois_field(spec)
    x = field(index(a))

    if op == "neg":
        return from_index(spec, int(-x))
    if op == "inv":
        if not x:
            raise FieldDivisionError("Zero has no multiplicative inverse.")
        return from_index(spec, int(np.reciprocal(x)))

    if b is None:
        raise ValueError(f"Operation {op!r} needs two operands.")
    if b.spec != spec:
        raise SpecMismatchError(f"Cannot combine elements of {spec} and {b.spec}.")
    y = field(index(b))

    if op == "add":
        return from_index(spec, int(x + y))
    if op == "sub":
        return from_index(spec, int(x - y))
    if op == "mul":
        return from_index(spec, int(x * y))
    if op == "div":
        if not y:
            raise FieldDivisionError("Division by zero.")
        return from_index(spec, int(x / y))
    raise ValueError(f"Unknown field operation: {op!r}")


def index_relabeling(spec: FieldSpec, order: Sequence[int]) -> tuple[int, ...]:
    """Validate an alternate bijection F_q -> {0..q-1} given on canonical indices.

    ``order[i]`` is the label of the element whose canonical index is ``i``.
    """
    labels = tuple(int(x) for x in order)
    if sorted(labels) != list(range(spec.q)):
        raise ValueError(f"Relabeling must be a permutation of 0..{spec.q - 1}, got {labels}.")
    if labels[0] != 0:
        raise ValueError("Relabeling must send the zero element to 0.")
    return labels


def reversed_relabeling(spec: FieldSpec) -> tuple[int, ...]:
    return index_relabeling(spec, [0] + list(range(spec.q - 1, 0, -1)))


GF2 = make_spec(2)
