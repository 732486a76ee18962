"""End-to-end checks: every identity is recomputed by enumeration and compared exactly."""

from __future__ import annotations

import logging
import math
import tempfile
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import balance
from .bruhat import (
    borel_stack,
    canonical_rep,
    codes_to_stack,
    decompose,
    decompose_sp,
    enumerate_cell_reps,
    gl_stack,
    sp_codes,
    symplectic_mask,
    u_pi_membership,
)
from .cache import EnumerationCache
from .config import Settings
from .coxeter import (
    SignedPerm,
    extend_signed,
    inv_count,
    inv_generating_function,
    iterate_bn,
    iterate_sn,
    maj_generating_function,
    perm_matrix,
)
from .errors import SignBalanceError
from .ff import GF2, FieldSpec, make_spec, reversed_relabeling
from .matgroup import Mat, bilinear_form, column, encode, is_upper_triangular, mat_mul, random_invertible
from .models import CheckResult, CspReport
from .qseries import bn_q_factorial, borel_order_gl, order_gl, order_sp, q_factorial_poly

logger = logging.getLogger(__name__)

GL_IMBALANCES = {
    (1, 2): -1,
    (1, 3): -1,
    (1, 4): -1,
    (1, 5): -1,
    (2, 2): -2,
    (3, 2): -24,
    (4, 2): -1344,
    (2, 3): -6,
    (3, 3): -432,
    (2, 4): -12,
    (2, 5): -20,
}
SP_IMBALANCES = {1: -2, 2: -48, 3: -23040}
GL_ORDER_CASES = [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 4), (2, 5)]
GL_COSET_CASES = [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 4)]
QUICK_SKIP_GL = {(3, 3)}
QUICK_MAX_SP = 2


@dataclass(slots=True)
class SuiteResult:
    checks: list[CheckResult] = field(default_factory=list)
    csp_reports: list[CspReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, expected: int, computed: int) -> None:
        check = CheckResult(name=name, expected=int(expected), computed=int(computed))
        if not check.passed:
            logger.warning("Check failed: %s", check.line())
        self.checks.append(check)


def _field(q: int) -> FieldSpec:
    for p in (2, 3, 5, 7):
        k = round(math.log(q, p))
        if p**k == q:
            return make_spec(p, k)
    raise ValueError(f"{q} is not a supported prime power.")


def _check_mahonian(out: SuiteResult) -> None:
    for n in range(1, 8):
        target = q_factorial_poly(n)
        out.add(f"mahonian inv n={n}", 1, int(inv_generating_function(n) == target))
        out.add(f"mahonian maj n={n}", 1, int(maj_generating_function(n) == target))


def _round_trip_failures(stack: np.ndarray, spec: FieldSpec) -> int:
    failures = 0
    for data in stack:
        g = Mat(spec, data)
        fac = decompose(g)
        rebuilt = mat_mul(mat_mul(fac.u, perm_matrix(fac.pi, spec)), fac.b)
        b_ok = is_upper_triangular(fac.b) and bool(np.all(np.diag(fac.b.data)))
        if rebuilt != g or not u_pi_membership(fac.u, fac.pi) or not b_ok:
            failures += 1
    return failures


def _cell_size_failures(stack: np.ndarray, spec: FieldSpec, n: int) -> int:
    sizes = Counter(canonical_rep(Mat(spec, data))[1] for data in stack)
    borel = borel_order_gl(n, spec.q)
    return sum(1 for pi in iterate_sn(n) if sizes[pi] != spec.q ** (math.comb(n, 2) - inv_count(pi)) * borel)


def _check_bruhat(out: SuiteResult, samples: int, seed: int, cache: EnumerationCache | None) -> None:
    for n, q in [(3, 2), (2, 3), (2, 4)]:
        spec = _field(q)
        out.add(f"bruhat round trip GL({n},{q}) failures", 0, _round_trip_failures(gl_stack(n, spec, cache), spec))
    for n, q in [(2, 2), (3, 2), (2, 3)]:
        spec = _field(q)
        out.add(f"cell size law GL({n},{q}) failures", 0, _cell_size_failures(gl_stack(n, spec, cache), spec, n))

    rng = np.random.default_rng(seed)
    borel = borel_stack(4, GF2)
    trip = canon = 0
    for _ in range(samples):
        g = random_invertible(4, GF2, rng)
        trip += _round_trip_failures(g.data[None, :, :], GF2)
        b = Mat(GF2, borel[rng.integers(borel.shape[0])])
        if canonical_rep(mat_mul(g, b))[0] != canonical_rep(g)[0]:
            canon += 1
    out.add(f"bruhat round trip random GL(4,2) x{samples} failures", 0, trip)
    out.add(f"canonical rep invariance random GL(4,2) x{samples} failures", 0, canon)


def _check_orders(out: SuiteResult, quick: bool, cache: EnumerationCache | None) -> None:
    for n, q in GL_ORDER_CASES:
        if quick and (n, q) in QUICK_SKIP_GL:
            continue
        out.add(f"order GL({n},{q})", order_gl(n, q), gl_stack(n, _field(q), cache).shape[0])
    for n in range(1, (QUICK_MAX_SP if quick else 3) + 1):
        out.add(f"order Sp({2 * n},2)", order_sp(n, 2), sp_codes(n, cache).size)


def _check_gl_imbalance(out: SuiteResult, quick: bool, workers: int, cache: EnumerationCache | None) -> None:
    for (n, q), expected in GL_IMBALANCES.items():
        if quick and (n, q) in QUICK_SKIP_GL:
            continue
        spec = _field(q)
        out.add(f"imbalance GL({n},{q}) closed form", expected, balance.imbalance_gl_closed(n, q))
        out.add(f"imbalance GL({n},{q}) structured", expected, balance.imbalance_gl(n, spec, "structured"))
        out.add(f"imbalance GL({n},{q}) brute", expected, balance.imbalance_gl(n, spec, "brute", workers, cache=cache))


def _check_residues(out: SuiteResult, quick: bool, workers: int, cache: EnumerationCache | None) -> None:
    for n, q in GL_ORDER_CASES:
        if quick and (n, q) in QUICK_SKIP_GL:
            continue
        n0, ni = balance.residue_counts_gl(n, q)
        hist = balance.residue_histogram_gl(n, _field(q), workers, cache=cache)
        out.add(f"residue N_0 GL({n},{q})", n0, hist[0])
        for i in range(1, q):
            out.add(f"residue N_{i} GL({n},{q})", ni, hist[i])


def _check_sp_imbalance(out: SuiteResult, quick: bool, cache: EnumerationCache | None) -> None:
    for n, expected in SP_IMBALANCES.items():
        if quick and n > QUICK_MAX_SP:
            continue
        out.add(f"imbalance Sp({2 * n},2) closed form", expected, balance.imbalance_sp_closed(n))
        out.add(f"imbalance Sp({2 * n},2) structured", expected, balance.imbalance_sp(n, "structured"))
        out.add(f"imbalance Sp({2 * n},2) brute", expected, balance.imbalance_sp(n, "brute", cache))
        even, odd = balance.parity_counts_sp(n)
        coeffs = balance.sp_gen_fun(n, "ones", cache).poly.coeffs
        out.add(f"even matrices Sp({2 * n},2)", even, sum(coeffs[0::2]))
        out.add(f"odd matrices Sp({2 * n},2)", odd, sum(coeffs[1::2]))


def _check_gl_cosets(out: SuiteResult, n: int, spec: FieldSpec) -> None:
    q = spec.q
    tag = f"GL({n},{q})"
    uniform = borel_order_gl(n, q) // q
    contribution = balance.odd_coset_contribution_gl(n, q)
    violations = count_mismatches = total_odd = 0
    for pi in iterate_sn(n):
        odd_here = 0
        for rep in enumerate_cell_reps(pi, spec):
            cls = balance.classify_coset(rep)
            residues = balance.coset_gen_fun(rep).coefficients(q)
            if isinstance(cls, balance.Odd):
                odd_here += 1
                value = residues[0] - residues[1]
                if residues[0] != 0 or len(set(residues[1:])) != 1 or value != contribution:
                    violations += 1
            elif any(r != uniform for r in residues):
                violations += 1
        total_odd += odd_here
        if odd_here != balance.count_odd_cosets_gl(pi, n, q) or (odd_here > 0) != (pi(n) == n):
            count_mismatches += 1
    out.add(f"coset dichotomy {tag} violations", 0, violations)
    out.add(f"odd coset counts {tag} mismatches", 0, count_mismatches)
    expected_total = sum(balance.count_odd_cosets_gl(pi, n, q) for pi in iterate_sn(n))
    out.add(f"odd cosets {tag} total", expected_total, total_odd)


def _check_sp_structure(out: SuiteResult, n: int, cache: EnumerationCache | None) -> None:
    m = 2 * n
    codes = sp_codes(n, cache)
    out.add(f"symplectic mask Sp({m},2) failures", 0, int(np.count_nonzero(~symplectic_mask(codes, n))))

    reps: dict[int, tuple[Mat, SignedPerm | None]] = {}
    form_failures = decomposition_failures = 0
    for data in codes_to_stack(codes, m):
        g = Mat(GF2, data)
        cols = [column(g, j) for j in range(m)]
        for i in range(m):
            for j in range(m):
                expected = 1 if i + j == m - 1 else 0
                if bilinear_form(cols[i], cols[j]).index != expected:
                    form_failures += 1
        try:
            fac = decompose_sp(g)
        except SignBalanceError:
            decomposition_failures += 1
            continue
        rep = mat_mul(fac.u, perm_matrix(fac.pi, GF2))
        reps.setdefault(encode(rep), (rep, fac.sigma))
    out.add(f"column form equations Sp({m},2) failures", 0, form_failures)
    out.add(f"symplectic decompositions Sp({m},2) failures", 0, decomposition_failures)

    odd_by_sigma: dict[SignedPerm | None, int] = defaultdict(int)
    violations = 0
    per_coset = -(2 ** (n * n))
    for rep, sigma in reps.values():
        cls = balance.classify_coset_sp(rep)
        poly = balance.coset_gen_fun_sp(rep).poly
        value = poly.evaluate(-1)
        if isinstance(cls, balance.Odd):
            odd_by_sigma[sigma] += 1
            if any(c for c in poly.coeffs[0::2]) or value != per_coset:
                violations += 1
        elif value != 0:
            violations += 1
    out.add(f"symplectic cosets Sp({m},2)", order_sp(n, 2) // 2 ** (n * n), len(reps))
    out.add(f"symplectic coset dichotomy Sp({m},2) violations", 0, violations)
    mismatches = sum(
        1 for sigma in iterate_bn(n) if odd_by_sigma.get(sigma, 0) != balance.count_odd_cosets_sp(sigma, n)
    )
    out.add(f"symplectic odd coset counts Sp({m},2) mismatches", 0, mismatches)
    structured = sum(balance.count_odd_cosets_sp(extend_signed(s, n), n) for s in iterate_bn(n - 1))
    out.add(f"symplectic odd cosets Sp({m},2) total", bn_q_factorial(n - 1, 2), sum(odd_by_sigma.values()))
    out.add(f"symplectic odd cosets Sp({m},2) structured", bn_q_factorial(n - 1, 2), structured)


def _check_bijection(out: SuiteResult, cache: EnumerationCache | None) -> None:
    for n, q in [(2, 4), (2, 3)]:
        spec = _field(q)
        value = balance.imbalance_gl(n, spec, "brute", relabel=reversed_relabeling(spec), cache=cache)
        out.add(f"imbalance GL({n},{q}) reversed labels", balance.imbalance_gl_closed(n, q), value)


def _check_csp(out: SuiteResult, cache: EnumerationCache | None) -> None:
    for n, q in [(2, 2), (3, 2), (2, 3)]:
        report = balance.csp_audit(n, _field(q), cache)
        out.csp_reports.append(report)
        out.add(f"cyclic action GL({n},{q}) consistent", 1, int(report.consistent))
        sizes_ok = set(report.orbit_census) <= {1, q}
        out.add(f"cyclic action GL({n},{q}) orbit sizes in {{1,{q}}}", 1, int(sizes_ok))


def verify_suite(settings: Settings, quick: bool = False, cache: EnumerationCache | None = None) -> SuiteResult:
    if cache is None:
        # Several checks share the Sp_6 and GL enumerations; keep them for this run only.
        with tempfile.TemporaryDirectory(prefix="sbal-verify-") as tmp:
            logger.debug("No enumeration cache configured, using %s for this run", tmp)
            return verify_suite(settings, quick, EnumerationCache(tmp))

    out = SuiteResult()
    samples = settings.quick_random_samples if quick else settings.random_samples
    workers = settings.workers

    _check_mahonian(out)
    _check_orders(out, quick, cache)
    _check_bruhat(out, samples, settings.seed, cache)
    _check_gl_imbalance(out, quick, workers, cache)
    _check_residues(out, quick, workers, cache)
    _check_sp_imbalance(out, quick, cache)
    for n, q in GL_COSET_CASES:
        if quick and (n, q) in QUICK_SKIP_GL:
            continue
        _check_gl_cosets(out, n, _field(q))
    _check_sp_structure(out, 2, cache)
    _check_bijection(out, cache)
    _check_csp(out, cache)

    failed = sum(1 for check in out.checks if not check.passed)
    logger.info("Verify suite: %d checks, %d failed", len(out.checks), failed)
    return out
