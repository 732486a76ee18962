"""Dense matrices over F_q, with a bit-packed fast path for q = 2.

A ``Mat`` stores element indices (see ``ff``) in a read-only uint8 array.
Row and column arguments of the functions here are 0-based, as in numpy.
The packed form of a q = 2 matrix is one Python int per row with bit j holding
entry (i, j); ``encode`` packs a whole matrix into one int with bit i*m + j.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeMismatchError, SingularMatrixError, SpecMismatchError, WrongFieldError
from .ff import FieldElement, FieldSpec, from_index, galois_field, make_spec, tables

MAX_PACKED_COLS = 64


@dataclass(frozen=True, slots=True, eq=False)
class Mat:
    spec: FieldSpec
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeMismatchError(f"Matrix data must be a non-empty 2-D array, got shape {arr.shape}.")
        if arr.min() < 0 or arr.max() >= self.spec.q:
            raise ValueError(f"Matrix entries must be element indices in [0, {self.spec.q}).")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def entry(self, i: int, j: int) -> FieldElement:
        return from_index(self.spec, int(self.data[i, j]))

    def to_lists(self) -> list[list[int]]:
        return self.data.astype(int).tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.spec, self.data.shape, self.data.tobytes()))

    def __matmul__(self, other: Mat) -> Mat:
        return mat_mul(self, other)

    def __repr__(self) -> str:
        return f"Mat({self.spec.descriptor}, {self.to_lists()})"


def from_rows(rows: Sequence[Sequence[int | FieldElement]], spec: FieldSpec) -> Mat:
    values = [[x.index if isinstance(x, FieldElement) else int(x) for x in row] for row in rows]
    widths = {len(row) for row in values}
    if len(widths) != 1:
        raise ShapeMismatchError("All rows must have the same length.")
    return Mat(spec, np.array(values, dtype=np.int64))


def identity(n: int, spec: FieldSpec) -> Mat:
    return Mat(spec, np.eye(n, dtype=np.int64))


def zeros(rows: int, cols: int, spec: FieldSpec) -> Mat:
    return Mat(spec, np.zeros((rows, cols), dtype=np.int64))


def transpose(a: Mat) -> Mat:
    return Mat(a.spec, a.data.T)


def column(a: Mat, j: int) -> tuple[FieldElement, ...]:
    return tuple(from_index(a.spec, int(v)) for v in a.data[:, j])


def _same_spec(a: Mat, b: Mat) -> None:
    if a.spec != b.spec:
        raise SpecMismatchError(f"Matrices over {a.spec} and {b.spec} cannot be combined.")


def _use_packed(spec: FieldSpec, cols: int, packed: bool | None) -> bool:
    if packed is None:
        return spec.q == 2 and cols <= MAX_PACKED_COLS
    if packed and spec.q != 2:
        raise WrongFieldError(f"The packed path needs q = 2, got q = {spec.q}.")
    return packed


# -- q = 2 packed kernels ----------------------------------------------------


def pack_rows(a: Mat) -> tuple[int, ...]:
    if a.spec.q != 2:
        raise WrongFieldError(f"Only q = 2 matrices can be bit-packed, got q = {a.spec.q}.")
    if a.cols > MAX_PACKED_COLS:
        raise ShapeMismatchError(f"Packed rows hold at most {MAX_PACKED_COLS} columns.")
    weights = np.left_shift(np.uint64(1), np.arange(a.cols, dtype=np.uint64))
    return tuple(int(v) for v in (a.data.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64))


def unpack_rows(rows: Sequence[int], cols: int, spec: FieldSpec | None = None) -> Mat:
    spec = spec or make_spec(2)
    data = [[(row >> j) & 1 for j in range(cols)] for row in rows]
    return Mat(spec, np.array(data, dtype=np.int64))


def gf2_mul_rows(a_rows: Sequence[int], b_rows: Sequence[int]) -> tuple[int, ...]:
    out = []
    for row in a_rows:
        acc = 0
        j = 0
        while row:
            if row & 1:
                acc ^= b_rows[j]
            row >>= 1
            j += 1
        out.append(acc)
    return tuple(out)


def gf2_inverse_rows(rows: Sequence[int]) -> tuple[int, ...]:
    n = len(rows)
    work = list(rows)
    inv = [1 << i for i in range(n)]
    for col in range(n):
        bit = 1 << col
        pivot = next((r for r in range(col, n) if work[r] & bit), None)
        if pivot is None:
            raise SingularMatrixError("Matrix is singular over Z_2.")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for r in range(n):
            if r != col and work[r] & bit:
                work[r] ^= work[col]
                inv[r] ^= inv[col]
    return tuple(inv)


def gf2_rank(rows: Sequence[int], n_cols: int) -> int:
    work = list(rows)
    rank = 0
    for col in range(n_cols):
        bit = 1 << col
        pivot = next((r for r in range(rank, len(work)) if work[r] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and work[r] & bit:
                work[r] ^= work[rank]
        rank += 1
    return rank


def gf2_gram_rows(rows: Sequence[int]) -> tuple[int, ...]:
    """Rows of A^T M A over Z_2 for the antidiagonal M of the symplectic form."""
    m = len(rows)
    out = []
    for i in range(m):
        acc = 0
        for k, row in enumerate(rows):
            if (row >> i) & 1:
                acc ^= rows[m - 1 - k]
        out.append(acc)
    return tuple(out)


def encode(a: Mat) -> int:
    code = 0
    for i, row in enumerate(pack_rows(a)):
        code |= row << (i * a.cols)
    return code


def decode(code: int, m: int, spec: FieldSpec | None = None) -> Mat:
    mask = (1 << m) - 1
    return unpack_rows([(code >> (i * m)) & mask for i in range(m)], m, spec)


# -- generic kernels -----------------------------------------------------------


def _generic_inverse(a: np.ndarray, spec: FieldSpec) -> np.ndarray:
    field = galois_field(spec)
    try:
        inv = np.linalg.inv(field(a.astype(np.int64)))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"Matrix is singular over {spec}.") from exc
    return inv.view(np.ndarray).astype(np.uint8)


def _generic_det(a: np.ndarray, spec: FieldSpec) -> int:
    field = galois_field(spec)
    return int(np.linalg.det(field(a.astype(np.int64))))


def stack_mul(a: np.ndarray, b: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Broadcast product of index stacks shaped (..., n, k) and (..., k, m)."""
    if spec.k == 1:
        return (np.matmul(a.astype(np.int64), b.astype(np.int64)) % spec.p).astype(np.uint8)
    t = tables(spec)
    prod = t.mul[a[..., :, :, None], b[..., None, :, :]]
    acc = prod[..., 0, :]
    for s in range(1, prod.shape[-2]):
        acc = t.add[acc, prod[..., s, :]]
    return acc


# -- public operations ---------------------------------------------------------


def mat_mul(a: Mat, b: Mat, *, packed: bool | None = None) -> Mat:
    _same_spec(a, b)
    if a.cols != b.rows:
        raise ShapeMismatchError(f"Cannot multiply {a.shape} by {b.shape}.")
    if _use_packed(a.spec, max(a.cols, b.cols), packed):
        return unpack_rows(gf2_mul_rows(pack_rows(a), pack_rows(b)), b.cols, a.spec)
    field = galois_field(a.spec)
    prod = field(a.data.astype(np.int64)) @ field(b.data.astype(np.int64))
    return Mat(a.spec, prod.view(np.ndarray))


def inverse(a: Mat, *, packed: bool | None = None) -> Mat:
    if a.rows != a.cols:
        raise ShapeMismatchError(f"Only square matrices are invertible, got {a.shape}.")
    if _use_packed(a.spec, a.cols, packed):
        return unpack_rows(gf2_inverse_rows(pack_rows(a)), a.cols, a.spec)
    return Mat(a.spec, _generic_inverse(a.data, a.spec))


def det(a: Mat, *, packed: bool | None = None) -> FieldElement:
    if a.rows != a.cols:
        raise ShapeMismatchError(f"Determinant needs a square matrix, got {a.shape}.")
    if _use_packed(a.spec, a.cols, packed):
        return from_index(a.spec, int(gf2_rank(pack_rows(a), a.cols) == a.rows))
    return from_index(a.spec, _generic_det(a.data, a.spec))


def is_invertible(a: Mat) -> bool:
    return a.rows == a.cols and bool(det(a))


def entry_sum(a: Mat, *, packed: bool | None = None) -> FieldElement:
    if _use_packed(a.spec, a.cols, packed):
        return from_index(a.spec, sum(row.bit_count() for row in pack_rows(a)) & 1)
    t = tables(a.spec)
    digit_sums = t.digits[a.data.reshape(-1)].sum(axis=0) % a.spec.p
    return from_index(a.spec, int(digit_sums @ t.weights))


def nonzero_count(a: Mat) -> int:
    return int(np.count_nonzero(a.data))


def ones_count(a: Mat, *, packed: bool | None = None) -> int:
    """The o(K) statistic: number of 1's of a matrix over Z_2."""
    if a.spec.q != 2:
        raise WrongFieldError(f"o(K) is defined for Z_2 matrices, got q = {a.spec.q}.")
    if _use_packed(a.spec, a.cols, packed):
        return sum(row.bit_count() for row in pack_rows(a))
    return nonzero_count(a)


def is_upper_triangular(a: Mat) -> bool:
    return not np.any(np.tril(a.data, k=-1))


def symplectic_form(n: int, spec: FieldSpec) -> Mat:
    if n < 1:
        raise ValueError(f"Half-dimension must be >= 1, got {n}.")
    minus_one = int(tables(spec).neg[1])
    data = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for i in range(2 * n):
        data[i, 2 * n - 1 - i] = 1 if i < n else minus_one
    return Mat(spec, data)


def is_symplectic(a: Mat) -> bool:
    if a.rows != a.cols or a.rows % 2:
        return False
    n = a.rows // 2
    if _use_packed(a.spec, a.cols, None):
        m = a.rows
        return gf2_gram_rows(pack_rows(a)) == tuple(1 << (m - 1 - i) for i in range(m))
    form = symplectic_form(n, a.spec)
    if mat_mul(mat_mul(transpose(a), form), a) != form:
        return False
    return det(a).index == 1


def bilinear_form(x: Sequence[FieldElement], y: Sequence[FieldElement]) -> FieldElement:
    if len(x) != len(y) or len(x) % 2 or not x:
        raise ShapeMismatchError(f"Vectors must share an even length, got {len(x)} and {len(y)}.")
    spec = x[0].spec
    if any(v.spec != spec for v in (*x, *y)):
        raise SpecMismatchError("Vector entries must share one field.")
    t = tables(spec)
    m = len(x)
    n = m // 2
    acc = 0
    for i in range(m):
        term = int(t.mul[x[i].index, y[m - 1 - i].index])
        acc = int(t.add[acc, term if i < n else t.neg[term]])
    return from_index(spec, acc)


def cartan_involution(a: Mat) -> Mat:
    """phi(A) = M^{-1} (A^T)^{-1} M."""
    if a.rows != a.cols or a.rows % 2:
        raise ShapeMismatchError(f"phi needs a square matrix of even size, got {a.shape}.")
    form = symplectic_form(a.rows // 2, a.spec)
    return mat_mul(mat_mul(inverse(form), inverse(transpose(a))), form)


def random_invertible(n: int, spec: FieldSpec, rng: np.random.Generator) -> Mat:
    while True:
        candidate = Mat(spec, rng.integers(0, spec.q, size=(n, n)))
        if is_invertible(candidate):
            return candidate


def read_matrix_text(text: str) -> Mat:
    """Parse "p k n m", an optional modulus line when k > 1, then n rows of m indices."""
    lines = [line.split() for line in text.strip().splitlines() if line.strip()]
    if not lines or len(lines[0]) != 4:
        raise ValueError("First line must be 'p k n m'.")
    p, k, n, m = (int(tok) for tok in lines[0])
    body = lines[1:]
    modulus = None
    if k > 1:
        if not body:
            raise ValueError("Missing modulus line for an extension field.")
        modulus = [int(tok) for tok in body[0]]
        body = body[1:]
    spec = make_spec(p, k, modulus)
    if len(body) != n or any(len(row) != m for row in body):
        raise ShapeMismatchError(f"Expected {n} rows of {m} entries.")
    return from_rows([[int(tok) for tok in row] for row in body], spec)


def format_matrix_text(a: Mat) -> str:
    head = [f"{a.spec.p} {a.spec.k} {a.rows} {a.cols}"]
    if a.spec.k > 1:
        head.append(" ".join(str(c) for c in a.spec.modulus))
    body = [" ".join(str(v) for v in row) for row in a.to_lists()]
    return "\n".join(head + body) + "\n"
