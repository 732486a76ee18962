"""Permutations of S_n and signed permutations of B_n.

One-line images are 1-indexed: ``Perm((3, 1, 2))`` sends 1 -> 3, 2 -> 1, 3 -> 2.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidPermutationError, SymmetryViolationError
from .ff import FieldSpec
from .matgroup import Mat
from .qseries import IntPoly


@dataclass(frozen=True, slots=True)
class Perm:
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(v) for v in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise InvalidPermutationError(f"{image} is not a permutation of 1..{len(image)}.")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, j: int) -> int:
        return self.image[j - 1]

    def compose(self, other: Perm) -> Perm:
        """(self o other)(j) = self(other(j))."""
        if other.n != self.n:
            raise InvalidPermutationError(f"Cannot compose permutations of sizes {self.n} and {other.n}.")
        return Perm(tuple(self.image[v - 1] for v in other.image))

    def inverse(self) -> Perm:
        inv = [0] * self.n
        for j, v in enumerate(self.image, start=1):
            inv[v - 1] = j
        return Perm(tuple(inv))

    def one_line(self) -> str:
        return " ".join(str(v) for v in self.image)

    def __str__(self) -> str:
        return self.one_line()


@dataclass(frozen=True, slots=True)
class SignedPerm:
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(v) for v in self.image)
        if 0 in image or sorted(abs(v) for v in image) != list(range(1, len(image) + 1)):
            raise InvalidPermutationError(f"{image} is not a signed permutation of 1..{len(image)}.")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        value = self.image[abs(i) - 1]
        return value if i > 0 else -value

    def compose(self, other: SignedPerm) -> SignedPerm:
        if other.n != self.n:
            raise InvalidPermutationError(f"Cannot compose signed permutations of sizes {self.n} and {other.n}.")
        return SignedPerm(tuple(self(v) for v in other.image))

    def inverse(self) -> SignedPerm:
        inv = [0] * self.n
        for i, v in enumerate(self.image, start=1):
            inv[abs(v) - 1] = i if v > 0 else -i
        return SignedPerm(tuple(inv))

    def one_line(self) -> str:
        return " ".join(str(v) for v in self.image)

    def __str__(self) -> str:
        return self.one_line()


def identity_perm(n: int) -> Perm:
    return Perm(tuple(range(1, n + 1)))


def identity_signed(n: int) -> SignedPerm:
    return SignedPerm(tuple(range(1, n + 1)))


def longest(n: int) -> Perm:
    """w_0 = (n, n-1, ..., 1)."""
    return Perm(tuple(range(n, 0, -1)))


def simple_reflection(n: int, i: int) -> Perm:
    """s_i swaps i and i+1, for 1 <= i <= n-1."""
    if not 1 <= i < n:
        raise InvalidPermutationError(f"s_{i} is not a generator of S_{n}.")
    image = list(range(1, n + 1))
    image[i - 1], image[i] = image[i], image[i - 1]
    return Perm(tuple(image))


def simple_reflection_b(n: int, i: int) -> SignedPerm:
    """s_0 exchanges 1 and -1; s_i (i >= 1) swaps i and i+1."""
    if i == 0:
        if n < 1:
            raise InvalidPermutationError("B_0 has no generators.")
        return SignedPerm((-1,) + tuple(range(2, n + 1)))
    if not 1 <= i < n:
        raise InvalidPermutationError(f"s_{i} is not a generator of B_{n}.")
    image = list(range(1, n + 1))
    image[i - 1], image[i] = image[i], image[i - 1]
    return SignedPerm(tuple(image))


def extend(p: Perm, n: int) -> Perm:
    """View p in S_n by fixing the points p.n+1 .. n."""
    if n < p.n:
        raise InvalidPermutationError(f"Cannot extend S_{p.n} into S_{n}.")
    return Perm(p.image + tuple(range(p.n + 1, n + 1)))


def extend_signed(s: SignedPerm, n: int) -> SignedPerm:
    if n < s.n:
        raise InvalidPermutationError(f"Cannot extend B_{s.n} into B_{n}.")
    return SignedPerm(s.image + tuple(range(s.n + 1, n + 1)))


def _inversions(values: Sequence[int]) -> int:
    return sum(1 for a, b in itertools.combinations(values, 2) if a > b)


def inv_count(p: Perm) -> int:
    return _inversions(p.image)


def descents(p: Perm) -> tuple[int, ...]:
    return tuple(i for i in range(1, p.n) if p.image[i] < p.image[i - 1])


def maj(p: Perm) -> int:
    return sum(descents(p))


def length_b(s: SignedPerm) -> int:
    return _inversions(s.image) + sum(-v for v in s.image if v < 0)


def perm_matrix(p: Perm, spec: FieldSpec) -> Mat:
    data = np.zeros((p.n, p.n), dtype=np.int64)
    for j, i in enumerate(p.image):
        data[i - 1, j] = 1
    return Mat(spec, data)


def _position(label: int, n: int) -> int:
    return n + 1 - label if label > 0 else n - label


def _label(position: int, n: int) -> int:
    return n + 1 - position if position <= n else -(position - n)


def embed_signed(s: SignedPerm) -> Perm:
    """Realize s on the positions 1..2n labelled n, ..., 1, -1, ..., -n."""
    n = s.n
    return Perm(tuple(_position(s(_label(i, n)), n) for i in range(1, 2 * n + 1)))


def signed_from_embedded(p: Perm) -> SignedPerm:
    if p.n % 2:
        raise SymmetryViolationError(f"An embedded B_n element acts on an even number of points, got {p.n}.")
    n = p.n // 2
    if any(p(i) + p(p.n + 1 - i) != p.n + 1 for i in range(1, p.n + 1)):
        raise SymmetryViolationError(f"{p.one_line()} is not centrally symmetric.")
    return SignedPerm(tuple(_label(p(_position(i, n)), n) for i in range(1, n + 1)))


def iterate_sn(n: int) -> Iterator[Perm]:
    """All of S_n in lexicographic one-line order; S_0 holds only the empty permutation."""
    for image in itertools.permutations(range(1, n + 1)):
        yield Perm(image)


def iterate_bn(n: int) -> Iterator[SignedPerm]:
    images = []
    for image in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            images.append(tuple(v * s for v, s in zip(image, signs)))
    for image in sorted(images):
        yield SignedPerm(image)


def parse_perm(text: str) -> Perm:
    try:
        return Perm(tuple(int(tok) for tok in text.replace(",", " ").split()))
    except ValueError as exc:
        raise InvalidPermutationError(f"Cannot parse permutation {text!r}: {exc}") from exc


def parse_signed(text: str) -> SignedPerm:
    cleaned = text.replace(",", " ").replace("−", "-")
    try:
        return SignedPerm(tuple(int(tok) for tok in cleaned.split()))
    except ValueError as exc:
        raise InvalidPermutationError(f"Cannot parse signed permutation {text!r}: {exc}") from exc


def inv_generating_function(n: int) -> IntPoly:
    return IntPoly.from_counts(Counter(inv_count(p) for p in iterate_sn(n)))


def maj_generating_function(n: int) -> IntPoly:
    return IntPoly.from_counts(Counter(maj(p) for p in iterate_sn(n)))


def bn_length_generating_function(n: int) -> IntPoly:
    return IntPoly.from_counts(Counter(length_b(s) for s in iterate_bn(n)))
