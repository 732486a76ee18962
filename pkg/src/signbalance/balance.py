"""Sign-balance of GL_n(F_q) and Sp_2n(Z_2).

Two statistics are tracked. ``ones`` is the number of 1 entries of a Z_2
matrix; ``fieldsum`` is the sum of all entries taken in F_q and reported as
its element index, optionally passed through an alternate labeling that
keeps 0 fixed.

Every imbalance has a brute-force path (enumerate, histogram, evaluate at a
root of unity) and a structured path that sums odd-coset contributions over
S_{n-1} or B_{n-1}. The cyclic action on cosets and its sieving audit live at
the bottom of the module.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .bruhat import (
    borel_stack,
    canonical_rep,
    codes_to_stack,
    gl_cell_stack,
    gl_stack,
    is_canonical,
    restore_first_row,
    sp_borel_stack,
    sp_codes,
)
from .cache import EnumerationCache
from .coxeter import Perm, SignedPerm, embed_signed, extend, extend_signed, inv_count, iterate_bn, iterate_sn, length_b
from .errors import (
    NegativeExponentError,
    NotCanonicalError,
    NotSupportedError,
    NotSymplecticError,
    WrongFieldError,
)
from .ff import GF2, FieldSpec, make_spec, tables
from .matgroup import Mat, entry_sum, inverse, is_symplectic, mat_mul, ones_count, stack_mul
from .models import CspPowerRow, CspReport
from .qseries import IntPoly, bn_q_factorial, eval_at_root_power, q_factorial

logger = logging.getLogger(__name__)

Stat = Literal["ones", "fieldsum"]


@dataclass(frozen=True, slots=True)
class GenFun:
    poly: IntPoly
    stat: Stat
    group: str = ""
    n: int = 0
    field: str = ""

    def coefficients(self, width: int | None = None) -> list[int]:
        coeffs = list(self.poly.coeffs)
        if width is not None:
            coeffs += [0] * (width - len(coeffs))
        return coeffs


@dataclass(frozen=True, slots=True)
class SignBalanced:
    first_odd_column: int


@dataclass(frozen=True, slots=True)
class Odd:
    pass


CosetClass = SignBalanced | Odd


# -- statistics ----------------------------------------------------------------


def _check_relabel(spec: FieldSpec, relabel: Sequence[int] | None) -> np.ndarray | None:
    if relabel is None:
        return None
    labels = np.asarray(relabel, dtype=np.int64)
    if labels.shape != (spec.q,) or labels[0] != 0 or sorted(labels.tolist()) != list(range(spec.q)):
        raise ValueError(f"Relabeling must be a permutation of 0..{spec.q - 1} fixing 0.")
    return labels


def stat_s(k: Mat, relabel: Sequence[int] | None = None) -> int:
    value = entry_sum(k).index
    return int(relabel[value]) if relabel is not None else value


def _stat_of(k: Mat, stat: Stat, relabel: Sequence[int] | None) -> int:
    if stat == "ones":
        return ones_count(k)
    if stat == "fieldsum":
        return stat_s(k, relabel)
    raise ValueError(f"Unknown statistic: {stat!r}")


def stack_stat(stack: np.ndarray, spec: FieldSpec, stat: Stat, relabel: Sequence[int] | None = None) -> np.ndarray:
    """Per-matrix statistic over an (N, n, m) stack of element indices."""
    if stat == "ones":
        if spec.q != 2:
            raise WrongFieldError(f"o(K) is defined for Z_2 matrices, got q = {spec.q}.")
        return np.count_nonzero(stack, axis=(1, 2))
    if stat != "fieldsum":
        raise ValueError(f"Unknown statistic: {stat!r}")
    t = tables(spec)
    if spec.k == 1:
        values = stack.astype(np.int64).sum(axis=(1, 2)) % spec.p
    else:
        values = (t.digits[stack].sum(axis=(1, 2)) % spec.p) @ t.weights
    labels = _check_relabel(spec, relabel)
    return labels[values] if labels is not None else values


def _histogram(values: np.ndarray) -> IntPoly:
    if values.size == 0:
        return IntPoly()
    return IntPoly(tuple(int(c) for c in np.bincount(values.astype(np.int64))))


def gen_fun(
    stream: Iterable[Mat],
    stat: Stat,
    relabel: Sequence[int] | None = None,
    group: str = "",
    n: int = 0,
) -> GenFun:
    counts: Counter[int] = Counter()
    spec = None
    for k in stream:
        spec = k.spec
        counts[_stat_of(k, stat, relabel)] += 1
    return GenFun(IntPoly.from_counts(counts), stat, group, n, spec.descriptor if spec else "")


def _cell_histogram(
    p: int, k: int, modulus: tuple[int, ...], image: tuple[int, ...], stat: Stat, relabel: tuple[int, ...] | None
) -> tuple[int, ...]:
    spec = make_spec(p, k, modulus)
    stack = gl_cell_stack(Perm(image), spec)
    return _histogram(stack_stat(stack, spec, stat, relabel)).coeffs


def gl_gen_fun(
    n: int,
    spec: FieldSpec,
    stat: Stat = "fieldsum",
    workers: int = 1,
    relabel: Sequence[int] | None = None,
    cache: EnumerationCache | None = None,
) -> GenFun:
    """Histogram of a statistic over GL_n(F_q).

    With a cache or a single worker the whole group is materialized; otherwise
    each Bruhat cell is a separate job and the partial histograms are added.
    """
    if stat == "ones" and spec.q != 2:
        raise WrongFieldError(f"o(K) is defined for Z_2 matrices, got q = {spec.q}.")
    relabel_t = tuple(int(x) for x in relabel) if relabel is not None else None
    if cache is not None or workers <= 1:
        poly = _histogram(stack_stat(gl_stack(n, spec, cache), spec, stat, relabel_t))
    else:
        images = [pi.image for pi in iterate_sn(n)]
        jobs = [(spec.p, spec.k, spec.modulus, image, stat, relabel_t) for image in images]
        poly = IntPoly()
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for coeffs in executor.map(_cell_histogram, *zip(*jobs)):
                poly = poly + IntPoly(coeffs)
        logger.info("Merged %d cell histograms for GL_%d over %s", len(jobs), n, spec)
    return GenFun(poly, stat, "GL", n, spec.descriptor)


def sp_gen_fun(n: int, stat: Stat = "ones", cache: EnumerationCache | None = None) -> GenFun:
    if stat != "ones":
        raise NotSupportedError("Symplectic generating functions use the o(K) statistic.")
    codes = sp_codes(n, cache)
    counts = np.zeros(4 * n * n + 1, dtype=np.int64)
    step = 1 << 18
    for start in range(0, codes.size, step):
        chunk = np.ascontiguousarray(codes[start : start + step], dtype="<u8")
        ones = np.unpackbits(chunk.view(np.uint8).reshape(-1, 8), axis=1).sum(axis=1).astype(np.int64)
        counts += np.bincount(ones, minlength=counts.size)
    return GenFun(IntPoly(tuple(int(c) for c in counts)), "ones", "Sp", n, GF2.descriptor)


def residue_histogram_gl(
    n: int,
    spec: FieldSpec,
    workers: int = 1,
    relabel: Sequence[int] | None = None,
    cache: EnumerationCache | None = None,
) -> list[int]:
    """Empirical count of GL_n(F_q) matrices per entry-sum label 0..q-1."""
    return gl_gen_fun(n, spec, "fieldsum", workers, relabel, cache).coefficients(spec.q)


# -- type A cosets -------------------------------------------------------------


def _column_sums(rep: Mat) -> np.ndarray:
    t = tables(rep.spec)
    return (t.digits[rep.data].sum(axis=0) % rep.spec.p) @ t.weights


def classify_coset(rep: Mat) -> CosetClass:
    if not is_canonical(rep):
        raise NotCanonicalError("Coset classification needs a canonical representative.")
    sums = _column_sums(rep)
    for j in range(rep.cols - 1):
        if sums[j]:
            return SignBalanced(first_odd_column=j + 1)
    return Odd()


def coset_gen_fun(rep: Mat, stat: Stat = "fieldsum", relabel: Sequence[int] | None = None) -> GenFun:
    if not is_canonical(rep):
        raise NotCanonicalError("Coset generating functions need a canonical representative.")
    coset = stack_mul(rep.data[None, :, :], borel_stack(rep.rows, rep.spec), rep.spec)
    poly = _histogram(stack_stat(coset, rep.spec, stat, relabel))
    return GenFun(poly, stat, "coset", rep.rows, rep.spec.descriptor)


def odd_coset_contribution_gl(n: int, q: int) -> int:
    """Root evaluation of the generating function of one odd coset."""
    return -((q - 1) ** (n - 1)) * q ** math.comb(n, 2)


def count_odd_cosets_gl(pi: Perm, n: int, q: int) -> int:
    if pi.n != n:
        raise ValueError(f"Permutation of size {pi.n} does not belong to S_{n}.")
    if pi(n) != n:
        return 0
    exponent = math.comb(n, 2) - inv_count(pi) - (n - 1)
    if exponent < 0:
        raise NegativeExponentError(f"Odd-coset exponent {exponent} < 0 for {pi}.")
    return q**exponent


def imbalance_gl_closed(n: int, q: int) -> int:
    return odd_coset_contribution_gl(n, q) * q_factorial(n - 1, q)


def imbalance_gl(
    n: int,
    spec: FieldSpec,
    method: Literal["brute", "structured"] = "structured",
    workers: int = 1,
    relabel: Sequence[int] | None = None,
    cache: EnumerationCache | None = None,
) -> int:
    """Sum of w^{s(K)} over GL_n(F_q) for a primitive q-th root of unity w."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    q = spec.q
    if method == "brute":
        poly = gl_gen_fun(n, spec, "fieldsum", workers, relabel, cache).poly
        return eval_at_root_power(poly, q, 1)
    if method == "structured":
        per_coset = odd_coset_contribution_gl(n, q)
        return sum(per_coset * count_odd_cosets_gl(extend(pi, n), n, q) for pi in iterate_sn(n - 1))
    raise ValueError(f"Unknown method: {method!r}")


def residue_counts_gl(n: int, q: int) -> tuple[int, int]:
    """(N_0, N_i): matrices with entry sum 0, and with entry sum equal to a fixed i != 0."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    base = q_factorial(n - 1, q) * (q - 1) ** (n - 1) * q ** math.comb(n, 2)
    return base * (q ** (n - 1) - 1), base * q ** (n - 1)


# -- type C cosets -------------------------------------------------------------


def _check_sp_rep(rep: Mat) -> None:
    if rep.spec.q != 2:
        raise NotSupportedError(f"Symplectic cosets are handled over Z_2 only, got {rep.spec}.")
    if not is_canonical(rep):
        raise NotCanonicalError("Coset classification needs a canonical representative.")
    if not is_symplectic(rep):
        raise NotSymplecticError("Symplectic coset representative does not preserve the form.")


def classify_coset_sp(rep: Mat) -> CosetClass:
    _check_sp_rep(rep)
    sums = rep.data.sum(axis=0) % 2
    for j in range(rep.cols - 1):
        if sums[j]:
            return SignBalanced(first_odd_column=j + 1)
    return Odd()


def coset_gen_fun_sp(rep: Mat) -> GenFun:
    _check_sp_rep(rep)
    coset = stack_mul(rep.data[None, :, :], sp_borel_stack(rep.rows // 2), GF2)
    return GenFun(_histogram(stack_stat(coset, GF2, "ones")), "ones", "coset", rep.rows // 2, GF2.descriptor)


def count_odd_cosets_sp(sigma: SignedPerm, n: int) -> int:
    if sigma.n != n:
        raise ValueError(f"Signed permutation of size {sigma.n} does not belong to B_{n}.")
    if sigma(n) != n:
        return 0
    exponent = (n - 1) ** 2 - length_b(sigma)
    if exponent < 0:
        raise NegativeExponentError(f"Odd-coset exponent {exponent} < 0 for {sigma}.")
    return 2**exponent


def imbalance_sp_closed(n: int) -> int:
    return -(2 ** (n * n)) * bn_q_factorial(n - 1, 2)


def imbalance_sp(
    n: int, method: Literal["brute", "structured"] = "structured", cache: EnumerationCache | None = None
) -> int:
    """Sum of (-1)^{o(K)} over Sp_2n(Z_2)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    if method == "brute":
        return sp_gen_fun(n, "ones", cache).poly.evaluate(-1)
    if method == "structured":
        per_coset = -(2 ** (n * n))
        return sum(per_coset * count_odd_cosets_sp(extend_signed(s, n), n) for s in iterate_bn(n - 1))
    raise ValueError(f"Unknown method: {method!r}")


def parity_counts_sp(n: int) -> tuple[int, int]:
    """(even, odd) numbers of matrices in Sp_2n(Z_2) by parity of o(K)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}.")
    base = 2 ** (n * n - 1) * bn_q_factorial(n - 1, 2)
    top = 2 ** (2 * n) - 1
    return base * (top - 1), base * (top + 1)


# -- cyclic action -------------------------------------------------------------


def _orbit_gl(k: Mat) -> tuple[CosetClass, list[Mat]]:
    """The class of k's coset and the images of k under every power 0..q-1."""
    rep, _ = canonical_rep(k)
    cls = classify_coset(rep)
    q = k.spec.q
    if isinstance(cls, Odd):
        return cls, [k] * q
    b = inverse(rep) @ k
    j, n = cls.first_odd_column, k.rows
    images = []
    for power in range(q):
        data = b.data.astype(np.int64).copy()
        data[j - 1, n - 1] = (data[j - 1, n - 1] + power) % q
        images.append(mat_mul(rep, Mat(k.spec, data)))
    return cls, images


def csp_action(power: int, k: Mat) -> Mat:
    """Apply the generator of C_q ``power`` times: advance entry (j, n) of b in index order."""
    _, images = _orbit_gl(k)
    return images[power % k.spec.q]


def _orbit_sp(k: Mat) -> tuple[CosetClass, list[Mat]]:
    rep, _ = canonical_rep(k)
    cls = classify_coset_sp(rep)
    if isinstance(cls, Odd):
        return cls, [k, k]
    b = inverse(rep) @ k
    j, m = cls.first_odd_column, k.rows
    data = b.data.astype(np.int64).copy()
    data[j - 1, m - 1] ^= 1
    toggled = restore_first_row(Mat(GF2, data))
    return cls, [k, mat_mul(rep, toggled)]


def csp_action_sp(power: int, k: Mat) -> Mat:
    """Type C analog over Z_2: toggle entry (j, 2n) of b, then recompute b's first row."""
    if k.spec.q != 2:
        raise NotSupportedError(f"The symplectic action is defined over Z_2 only, got {k.spec}.")
    _, images = _orbit_sp(k)
    return images[power % 2]


def _audit(
    elements: Iterable[Mat],
    order: int,
    poly: IntPoly,
    orbit_fn: Callable[[Mat], tuple[CosetClass, list[Mat]]],
    group: str,
    n: int,
    field_descriptor: str,
    extrapolated: bool,
) -> CspReport:
    fixed = [0] * order
    sizes: Counter[int] = Counter()
    odd_elements = 0
    total = 0
    for k in elements:
        cls, images = orbit_fn(k)
        total += 1
        if isinstance(cls, Odd):
            odd_elements += 1
        for power, image in enumerate(images):
            if image == k:
                fixed[power] += 1
        sizes[len(set(images))] += 1

    notes: list[str] = []
    census = {}
    divides = True
    for size, count in sorted(sizes.items()):
        if order % size or count % size:
            divides = False
            notes.append(f"{count} elements have orbit size {size}, which does not divide {order} evenly.")
        census[size] = count // size
    orbit_total = sum(census.values())
    free_orbits = census.get(order, 0)

    residues = poly.cyclic_coefficients(order)
    rows = []
    for power in range(order):
        try:
            evaluation = eval_at_root_power(poly, order, power)
        except ValueError:
            evaluation = None
        expected_orbits = orbit_total if power == 0 else free_orbits
        cond_1 = evaluation is not None and evaluation == fixed[power]
        cond_1_sign = evaluation is not None and abs(evaluation) == fixed[power]
        rows.append(
            CspPowerRow(
                power=power,
                fixed_points=fixed[power],
                evaluation=evaluation,
                coefficient=residues[power],
                expected_orbits=expected_orbits,
                condition_1=cond_1,
                condition_1_up_to_sign=cond_1_sign if power else cond_1,
                condition_2=residues[power] == expected_orbits,
            )
        )

    consistent = divides and fixed[0] == total and all(fixed[l] == odd_elements for l in range(1, order))
    if not consistent:
        notes.append("Fixed points of nontrivial powers differ from the odd-coset elements.")
    logger.info("Cyclic sieving audit of %s n=%d over %s: %d elements", group, n, field_descriptor, total)
    return CspReport(
        group=group,
        n=n,
        field=field_descriptor,
        q=order,
        rows=rows,
        orbit_census=census,
        odd_coset_elements=odd_elements,
        consistent=consistent,
        extrapolated=extrapolated,
        notes=notes,
    )


def csp_audit(n: int, spec: FieldSpec, cache: EnumerationCache | None = None) -> CspReport:
    stack = gl_stack(n, spec, cache)
    poly = _histogram(stack_stat(stack, spec, "fieldsum"))
    elements = (Mat(spec, data) for data in stack)
    return _audit(elements, spec.q, poly, _orbit_gl, "GL", n, spec.descriptor, extrapolated=False)


def csp_audit_sp(n: int, cache: EnumerationCache | None = None) -> CspReport:
    codes = sp_codes(n, cache)
    poly = sp_gen_fun(n, "ones", cache).poly
    elements = (Mat(GF2, data) for data in codes_to_stack(codes, 2 * n))
    report = _audit(elements, 2, poly, _orbit_sp, "Sp", n, GF2.descriptor, extrapolated=True)
    report.notes.append("Type C action extends the type A construction by toggling entry (j, 2n).")
    return report


def embedded_fixes_last(sigma: SignedPerm) -> bool:
    """sigma(n) = n exactly when its embedding fixes position 2n."""
    pi = embed_signed(sigma)
    return pi(pi.n) == pi.n
