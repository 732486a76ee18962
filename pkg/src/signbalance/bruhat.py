"""Bruhat decomposition g = u [pi] b, coset representatives and group enumeration.

Matrix positions in ``CellDescriptor`` are 1-indexed (row, column) pairs to
match permutation one-line notation; array work below is 0-indexed.

Symplectic enumeration works on packed codes: a 2n x 2n matrix over Z_2 is one
uint64 with bit i*m + j holding entry (i, j), m = 2n <= 8.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .cache import EnumerationCache
from .coxeter import Perm, SignedPerm, inv_count, iterate_sn, perm_matrix, signed_from_embedded
from .errors import (
    ClosureMismatchError,
    NotSupportedError,
    NotSymplecticError,
    ShapeMismatchError,
    SingularMatrixError,
    SymmetryViolationError,
)
from .ff import GF2, FieldSpec, tables
from .matgroup import Mat, identity, inverse, is_symplectic, is_upper_triangular, mat_mul, stack_mul, transpose
from .qseries import order_gl, order_sp

logger = logging.getLogger(__name__)

Group = Literal["GL", "Sp"]

MAX_SP_HALF_DIM = 4
_CHUNK = 1 << 15


@dataclass(frozen=True, slots=True)
class BruhatFactorization:
    u: Mat
    pi: Perm
    b: Mat
    group: Group = "GL"
    sigma: SignedPerm | None = None


@dataclass(frozen=True, slots=True)
class CellDescriptor:
    pi: Perm
    free_positions: frozenset[tuple[int, int]]

    @property
    def dimension(self) -> int:
        return len(self.free_positions)

    def sorted_positions(self) -> list[tuple[int, int]]:
        return sorted(self.free_positions)


# -- GL_n(F_q) -----------------------------------------------------------------


def canonical_rep(g: Mat) -> tuple[Mat, Perm]:
    """Reduce g by column operations to the representative R of g B+.

    Column j is scaled so its topmost nonzero entry becomes 1, and that row is
    cleared to the right. The rightmost nonzero entry of every row of R is then
    1 and is the first nonzero entry of its column.
    """
    if g.rows != g.cols:
        raise ShapeMismatchError(f"Only square matrices have a Bruhat decomposition, got {g.shape}.")
    t = tables(g.spec)
    n = g.rows
    work = g.data.astype(np.int64).copy()
    image = []
    for j in range(n):
        nonzero = np.nonzero(work[:, j])[0]
        if nonzero.size == 0:
            raise SingularMatrixError(f"Matrix is singular over {g.spec}.")
        i = int(nonzero[0])
        work[:, j] = t.mul[t.inv[work[i, j]], work[:, j]]
        for c in range(j + 1, n):
            if work[i, c]:
                factor = t.neg[work[i, c]]
                work[:, c] = t.add[work[:, c], t.mul[factor, work[:, j]]]
        image.append(i + 1)
    return Mat(g.spec, work), Perm(tuple(image))


def is_canonical(rep: Mat) -> bool:
    if rep.rows != rep.cols:
        return False
    data = rep.data
    used = set()
    for i in range(rep.rows):
        nonzero = np.nonzero(data[i])[0]
        if nonzero.size == 0:
            return False
        c = int(nonzero[-1])
        if data[i, c] != 1 or np.any(data[:i, c]) or c in used:
            return False
        used.add(c)
    return True


def u_pi_membership(u: Mat, pi: Perm) -> bool:
    if u.rows != u.cols or u.rows != pi.n:
        return False
    data = u.data
    if np.any(np.diag(data) != 1) or not is_upper_triangular(transpose(u)):
        return False
    pos = pi.inverse().image
    for i in range(u.rows):
        for j in range(i):
            if data[i, j] and pos[i] < pos[j]:
                return False
    return True


def decompose(g: Mat) -> BruhatFactorization:
    rep, pi = canonical_rep(g)
    u = mat_mul(rep, transpose(perm_matrix(pi, g.spec)))
    b = mat_mul(inverse(rep), g)
    return BruhatFactorization(u=u, pi=pi, b=b, group="GL")


def cell_free_positions(pi: Perm) -> CellDescriptor:
    pos = pi.inverse()
    free = frozenset(
        (i, j) for j in range(1, pi.n + 1) for i in range(1, pi.n + 1) if i > pi(j) and pos(i) > j
    )
    descriptor = CellDescriptor(pi=pi, free_positions=free)
    expected = math.comb(pi.n, 2) - inv_count(pi)
    if descriptor.dimension != expected:
        raise ShapeMismatchError(f"Cell of {pi} has {descriptor.dimension} free positions, expected {expected}.")
    return descriptor


def _grid(values: range, width: int) -> np.ndarray:
    """Every tuple of ``width`` values, first coordinate most significant."""
    rows = list(itertools.product(values, repeat=width))
    return np.array(rows, dtype=np.uint8).reshape(len(rows), width)


def cell_reps_stack(pi: Perm, spec: FieldSpec) -> np.ndarray:
    positions = cell_free_positions(pi).sorted_positions()
    base = perm_matrix(pi, spec).data
    values = _grid(range(spec.q), len(positions))
    stack = np.repeat(base[None, :, :], values.shape[0], axis=0)
    for col, (i, j) in enumerate(positions):
        stack[:, i - 1, j - 1] = values[:, col]
    return stack


def enumerate_cell_reps(pi: Perm, spec: FieldSpec) -> Iterator[Mat]:
    for data in cell_reps_stack(pi, spec):
        yield Mat(spec, data)


def borel_stack(n: int, spec: FieldSpec) -> np.ndarray:
    upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    diag = _grid(range(1, spec.q), n)
    off = _grid(range(spec.q), len(upper))
    stack = np.zeros((diag.shape[0], off.shape[0], n, n), dtype=np.uint8)
    idx = np.arange(n)
    stack[:, :, idx, idx] = diag[:, None, :]
    for col, (i, j) in enumerate(upper):
        stack[:, :, i, j] = off[None, :, col]
    return stack.reshape(-1, n, n)


def enumerate_borel(n: int, spec: FieldSpec) -> Iterator[Mat]:
    for data in borel_stack(n, spec):
        yield Mat(spec, data)


def gl_cell_stack(pi: Perm, spec: FieldSpec, borel: np.ndarray | None = None) -> np.ndarray:
    """All g with Bruhat permutation pi, as rep x borel products."""
    borel = borel_stack(pi.n, spec) if borel is None else borel
    reps = cell_reps_stack(pi, spec)
    products = stack_mul(reps[:, None, :, :], borel[None, :, :, :], spec)
    return products.reshape(-1, pi.n, pi.n)


def gl_stack(n: int, spec: FieldSpec, cache: EnumerationCache | None = None) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    if cache is not None:
        cached = cache.load("GL", n, spec, n)
        if cached is not None:
            return cached
    borel = borel_stack(n, spec)
    stack = np.concatenate([gl_cell_stack(pi, spec, borel) for pi in iterate_sn(n)], axis=0)
    expected = order_gl(n, spec.q)
    if stack.shape[0] != expected:
        raise ClosureMismatchError(f"Enumerated {stack.shape[0]} elements of GL_{n}, expected {expected}.")
    logger.info("Enumerated GL_%d over %s: %d elements", n, spec, stack.shape[0])
    if cache is not None:
        cache.store("GL", n, spec, stack)
    return stack


def enumerate_gl(n: int, spec: FieldSpec, cache: EnumerationCache | None = None) -> Iterator[Mat]:
    for data in gl_stack(n, spec, cache):
        yield Mat(spec, data)


# -- Sp_2n(Z_2) ----------------------------------------------------------------


def _check_half_dim(n: int) -> int:
    if not 1 <= n <= MAX_SP_HALF_DIM:
        raise NotSupportedError(f"Packed symplectic enumeration supports 1 <= n <= {MAX_SP_HALF_DIM}, got {n}.")
    return 2 * n


def transvection(v: tuple[int, ...] | np.ndarray) -> Mat:
    """T_v : x -> x + B(x, v) v over Z_2, i.e. I + v rev(v)^T."""
    vec = np.asarray(v, dtype=np.int64) % 2
    if vec.ndim != 1 or vec.size % 2 or not vec.any():
        raise ValueError(f"Transvection needs a nonzero vector of even length, got {vec.tolist()}.")
    data = (np.eye(vec.size, dtype=np.int64) + np.outer(vec, vec[::-1])) % 2
    return Mat(GF2, data)


def transvections(n: int) -> list[Mat]:
    m = 2 * n
    return [transvection(tuple((bits >> i) & 1 for i in range(m))) for bits in range(1, 1 << m)]


def identity_code(m: int) -> np.uint64:
    return np.uint64(sum(1 << (i * m + i) for i in range(m)))


def codes_to_stack(codes: np.ndarray, m: int) -> np.ndarray:
    codes = np.ascontiguousarray(codes, dtype="<u8")
    bits = np.unpackbits(codes.view(np.uint8).reshape(-1, 8), axis=1, bitorder="little")
    return bits[:, : m * m].reshape(-1, m, m)


def stack_to_codes(stack: np.ndarray) -> np.ndarray:
    stack = np.asarray(stack, dtype=np.uint8)
    count, m = stack.shape[0], stack.shape[1]
    packed = np.packbits(stack.reshape(count, m * m), axis=1, bitorder="little")
    padded = np.zeros((count, 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view("<u8").reshape(count).astype(np.uint64)


def _rows(codes: np.ndarray, m: int) -> list[np.ndarray]:
    mask = np.uint64((1 << m) - 1)
    return [(codes >> np.uint64(k * m)) & mask for k in range(m)]


def symplectic_mask(codes: np.ndarray, n: int) -> np.ndarray:
    """Vectorized A^T M A = M test over Z_2."""
    m = _check_half_dim(n)
    codes = np.asarray(codes, dtype=np.uint64)
    rows = _rows(codes, m)
    ok = np.ones(codes.shape, dtype=bool)
    for i in range(m):
        acc = np.zeros(codes.shape, dtype=np.uint64)
        for k in range(m):
            bit = (rows[k] >> np.uint64(i)) & np.uint64(1)
            acc ^= bit * rows[m - 1 - k]
        ok &= acc == np.uint64(1 << (m - 1 - i))
    return ok


def _apply_transvection(codes: np.ndarray, v: int, m: int) -> np.ndarray:
    rows = _rows(codes, m)
    w = np.zeros(codes.shape, dtype=np.uint64)
    for k in range(m):
        if (v >> (m - 1 - k)) & 1:
            w ^= rows[k]
    spread = np.uint64(sum(1 << (i * m) for i in range(m) if (v >> i) & 1))
    return codes ^ (w * spread)


def sp_codes(n: int, cache: EnumerationCache | None = None) -> np.ndarray:
    """Sp_2n(Z_2) as packed codes: BFS layers from I under all transvections, each layer sorted."""
    m = _check_half_dim(n)
    expected = order_sp(n, 2)
    if cache is not None:
        cached = cache.load("Sp", n, GF2, m)
        if cached is not None:
            codes = stack_to_codes(cached)
            if codes.size != expected:
                raise ClosureMismatchError(f"Cached Sp_{m} holds {codes.size} elements, expected {expected}.")
            return codes

    generators = range(1, 1 << m)
    frontier = np.array([identity_code(m)], dtype=np.uint64)
    visited = frontier.copy()
    layers = [frontier]
    depth = 0
    while frontier.size:
        found: list[np.ndarray] = []
        pending = 0
        for start in range(0, frontier.size, _CHUNK):
            chunk = frontier[start : start + _CHUNK]
            candidates = np.unique(np.concatenate([_apply_transvection(chunk, v, m) for v in generators]))
            pos = np.searchsorted(visited, candidates)
            pos[pos == visited.size] = 0
            fresh = candidates[visited[pos] != candidates]
            found.append(fresh)
            pending += fresh.size
            if pending > 4 * _CHUNK and len(found) > 1:
                found = [np.unique(np.concatenate(found))]
                pending = found[0].size
        frontier = np.unique(np.concatenate(found)) if found else np.empty(0, dtype=np.uint64)
        if frontier.size:
            layers.append(frontier)
            visited = np.union1d(visited, frontier)
        depth += 1
        logger.debug("Sp_%d closure: layer %d adds %d (total %d)", m, depth, frontier.size, visited.size)

    codes = np.concatenate(layers)
    if codes.size != expected:
        raise ClosureMismatchError(f"Transvection closure reached {codes.size} elements of Sp_{m}, expected {expected}.")
    logger.info("Enumerated Sp_%d(Z_2): %d elements in %d layers", m, codes.size, len(layers))
    if cache is not None:
        cache.store("Sp", n, GF2, codes_to_stack(codes, m))
    return codes


def enumerate_sp(n: int, cache: EnumerationCache | None = None) -> Iterator[Mat]:
    m = 2 * n
    codes = sp_codes(n, cache)
    for start in range(0, codes.size, _CHUNK):
        for data in codes_to_stack(codes[start : start + _CHUNK], m):
            yield Mat(GF2, data)


def decompose_sp(g: Mat) -> BruhatFactorization:
    if g.spec.q != 2:
        raise NotSupportedError(f"Symplectic decomposition is implemented over Z_2 only, got {g.spec}.")
    if not is_symplectic(g):
        raise NotSymplecticError("Matrix does not preserve the symplectic form.")
    fac = decompose(g)
    if not (is_symplectic(fac.u) and is_symplectic(fac.b)):
        raise SymmetryViolationError("Bruhat factors of a symplectic matrix are not symplectic.")
    sigma = signed_from_embedded(fac.pi)
    return BruhatFactorization(u=fac.u, pi=fac.pi, b=fac.b, group="Sp", sigma=sigma)


def sp_borel_stack(n: int) -> np.ndarray:
    """Upper triangular elements of Sp_2n(Z_2), built as [[A, A K Y], [0, K A^-T K]].

    A runs over unitriangular n x n matrices, Y over symmetric ones and K is the
    n x n antidiagonal. Rows come out in the lexicographic order of their
    strictly upper entries, the same order as ``borel_stack``.
    """
    m = _check_half_dim(n)
    flip = np.eye(n, dtype=np.int64)[::-1]
    unis = borel_stack(n, GF2)
    a = unis.astype(np.int64)
    a_inv_t = np.stack([inverse(Mat(GF2, data)).data.T for data in unis]).astype(np.int64)

    sym = [(i, j) for i in range(n) for j in range(i, n)]
    values = _grid(range(2), len(sym))
    ys = np.zeros((values.shape[0], n, n), dtype=np.int64)
    for col, (i, j) in enumerate(sym):
        ys[:, i, j] = values[:, col]
        ys[:, j, i] = values[:, col]

    out = np.zeros((a.shape[0], ys.shape[0], m, m), dtype=np.uint8)
    out[:, :, :n, :n] = a[:, None]
    out[:, :, :n, n:] = (a[:, None] @ flip @ ys[None]) % 2
    out[:, :, n:, n:] = ((flip @ a_inv_t @ flip) % 2)[:, None]
    out = out.reshape(-1, m, m)
    keys = [out[:, i, j] for i in range(m) for j in range(i + 1, m)]
    return out[np.lexsort(keys[::-1])]


def sp_borel(n: int) -> Iterator[Mat]:
    for data in sp_borel_stack(n):
        yield Mat(GF2, data)


def restore_first_row(b: Mat) -> Mat:
    """Recompute b_{1i} = sum_{k=2}^{2n} b_{ki} b_{2n+1-k,2n} for 2 <= i <= 2n-1 over Z_2."""
    if b.spec.q != 2:
        raise NotSupportedError(f"First-row completion is implemented over Z_2 only, got {b.spec}.")
    if b.rows != b.cols or b.rows % 2:
        raise ShapeMismatchError(f"Expected a square matrix of even size, got {b.shape}.")
    m = b.rows
    data = b.data.astype(np.int64).copy()
    last = data[:, m - 1]
    for i in range(1, m - 1):
        data[0, i] = sum(int(data[k, i]) * int(last[m - 1 - k]) for k in range(1, m)) % 2
    return Mat(b.spec, data)


def sp_identity(n: int) -> Mat:
    return identity(2 * n, GF2)
