from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from . import balance
from .bruhat import codes_to_stack, decompose, decompose_sp, gl_stack, sp_codes
from .cache import EnumerationCache
from .config import Settings, load_settings
from .errors import SignBalanceError, VerificationMismatchError
from .ff import GF2, FieldSpec, elements, parse_field, reversed_relabeling
from .matgroup import read_matrix_text
from .models import CrossCheck, DecompositionReport, ImbalanceReport
from .qseries import eval_at_root_power, order_gl, order_sp
from .verify import verify_suite

logger = logging.getLogger(__name__)

VERBS = ("verify", "genfun", "imbalance", "decompose", "enumerate", "csp", "field-info")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2


@dataclass(slots=True)
class Command:
    verb: str
    group: str = "gl"
    n: int = 2
    field: str | None = None
    stat: str | None = None
    method: str = "both"
    out: str = "json"
    quick: bool = False
    alt_bijection: bool = False
    matrix_text: str | None = None

    def spec(self) -> FieldSpec:
        return parse_field(self.field or "2")

    def resolved_stat(self) -> str:
        if self.stat:
            return self.stat
        return "ones" if self.group == "sp" else "fieldsum"

    def validate(self) -> None:
        if self.verb not in VERBS:
            raise ValueError(f"Unknown command: {self.verb}")
        spec = self.spec()
        if self.group == "sp" and (spec.p, spec.k) != (2, 1):
            raise ValueError("Symplectic commands run over the field 2^1 only.")
        if self.resolved_stat() == "ones" and spec.q != 2:
            raise ValueError("The ones statistic needs q = 2.")
        if self.group == "sp" and self.resolved_stat() != "ones":
            raise ValueError("Symplectic commands use the ones statistic.")
        if self.n < 1:
            raise ValueError(f"--n must be >= 1, got {self.n}.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Bruhat decomposition and sign-balance toolkit for GL_n(F_q) and Sp_2n(Z_2).")
    parser.add_argument("command", choices=VERBS, help="Action to run.")
    parser.add_argument("--group", default="gl", choices=["gl", "sp"], help="Matrix group (default: gl).")
    parser.add_argument("--n", type=int, default=2, help="Matrix size for gl, half-dimension for sp (default: 2).")
    parser.add_argument("--field", default=None, help='Field descriptor "p", "p^k" or "p^k/c0,...,ck" (default: 2).')
    parser.add_argument("--stat", default=None, choices=["ones", "fieldsum"], help="Statistic (default per group).")
    parser.add_argument(
        "--method",
        default="both",
        choices=["brute", "structured", "both"],
        help="Imbalance computation path; both requires agreement (default: both).",
    )
    parser.add_argument("--out", default="json", choices=["json", "csv", "text"], help="Output format.")
    parser.add_argument("--cache-dir", default=None, help="Enumeration cache directory (overrides SIGNBAL_CACHE).")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (overrides SIGNBAL_WORKERS).")
    parser.add_argument("--quick", action="store_true", help="Run the reduced verify suite.")
    parser.add_argument("--file", default=None, help="Matrix text file for decompose (default: stdin).")
    parser.add_argument("--save-dir", default=None, help="Also write the JSON document into this directory.")
    parser.add_argument("--log-level", default=None, help="Logging level (overrides SIGNBAL_LOG_LEVEL).")
    parser.add_argument(
        "--alt-bijection",
        action="store_true",
        help="Label nonzero field elements in reverse index order for the fieldsum statistic.",
    )
    return parser


def _safe_stem(text: str) -> str:
    stem = re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("._")
    return stem or "result"


def save_result_json(payload: dict[str, Any] | list[Any], stem: str, output_dir: str) -> Path:
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{_safe_stem(stem)}.json"
    out_path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return out_path


def _dump(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2)


def _cache_from(settings: Settings) -> EnumerationCache | None:
    if settings.cache_dir and settings.use_cache:
        return EnumerationCache(settings.cache_dir)
    return None


def _relabel(cmd: Command, spec: FieldSpec) -> tuple[int, ...] | None:
    return reversed_relabeling(spec) if cmd.alt_bijection else None


def _genfun(cmd: Command, settings: Settings) -> balance.GenFun:
    cache = _cache_from(settings)
    if cmd.group == "sp":
        return balance.sp_gen_fun(cmd.n, "ones", cache)
    spec = cmd.spec()
    return balance.gl_gen_fun(cmd.n, spec, cmd.resolved_stat(), settings.workers, _relabel(cmd, spec), cache)


def _run_genfun(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    gf = _genfun(cmd, settings)
    payload = {
        "group": cmd.group.upper(),
        "n": cmd.n,
        "field": gf.field,
        "stat": gf.stat,
        "coefficients": [str(c) for c in gf.coefficients()],
    }
    if cmd.out == "csv":
        text = "exponent,count\n" + "".join(f"{i},{c}\n" for i, c in enumerate(gf.coefficients()))
    elif cmd.out == "text":
        text = f"{str(gf.poly)}\n"
    else:
        text = _dump(payload) + "\n"
    return EXIT_OK, payload, text


def _run_imbalance(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    cache = _cache_from(settings)
    checks: list[CrossCheck] = []
    coefficients: list[int] = []
    if cmd.group == "sp":
        q = 2
        closed = balance.imbalance_sp_closed(cmd.n)
        brute = structured = None
        if cmd.method in {"brute", "both"}:
            gf = balance.sp_gen_fun(cmd.n, "ones", cache)
            coefficients = gf.coefficients()
            brute = gf.poly.evaluate(-1)
        if cmd.method in {"structured", "both"}:
            structured = balance.imbalance_sp(cmd.n, "structured")
        field_name = GF2.descriptor
    else:
        spec = cmd.spec()
        q = spec.q
        closed = balance.imbalance_gl_closed(cmd.n, q)
        brute = structured = None
        if cmd.method in {"brute", "both"}:
            gf = balance.gl_gen_fun(cmd.n, spec, cmd.resolved_stat(), settings.workers, _relabel(cmd, spec), cache)
            coefficients = gf.coefficients()
            brute = eval_at_root_power(gf.poly, q, 1)
        if cmd.method in {"structured", "both"}:
            structured = balance.imbalance_gl(cmd.n, spec, "structured")
        field_name = spec.descriptor

    if brute is not None and structured is not None:
        checks.append(CrossCheck("brute == structured", brute, structured))
    if brute is not None:
        checks.append(CrossCheck("brute == closed form", brute, closed))
    if structured is not None:
        checks.append(CrossCheck("structured == closed form", structured, closed))
    value = brute if brute is not None else structured

    report = ImbalanceReport(
        group=cmd.group.upper(),
        n=cmd.n,
        field=field_name,
        stat=cmd.resolved_stat(),
        coefficients=coefficients,
        q=q,
        value=int(value),
        method=cmd.method,
        cross_checks=checks,
    )
    payload = report.to_dict()
    if cmd.out == "csv":
        text = "residue,count\n" + "".join(
            f"{r},{c}\n" for r, c in enumerate(_residues(coefficients, q))
        )
    elif cmd.out == "text":
        lines = [f"imbalance {report.group} n={cmd.n} over {field_name}: {report.value}"]
        lines += [f"{c.name}: {c.lhs} vs {c.rhs} {'PASS' if c.passed else 'FAIL'}" for c in checks]
        text = "\n".join(lines) + "\n"
    else:
        text = _dump(payload) + "\n"
    return (EXIT_OK if report.passed else EXIT_MISMATCH), payload, text


def _residues(coefficients: list[int], q: int) -> list[int]:
    out = [0] * q
    for i, c in enumerate(coefficients):
        out[i % q] += c
    return out


def _run_decompose(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    if cmd.matrix_text is None:
        raise ValueError("decompose needs a matrix on stdin or via --file.")
    g = read_matrix_text(cmd.matrix_text)
    if cmd.field is not None and g.spec != cmd.spec():
        raise ValueError(f"Matrix is over {g.spec.descriptor}, but --field is {cmd.field}.")
    fac = decompose_sp(g) if cmd.group == "sp" else decompose(g)
    report = DecompositionReport(
        group=fac.group,
        field=g.spec.descriptor,
        u=fac.u.to_lists(),
        pi=fac.pi.one_line(),
        b=fac.b.to_lists(),
        sigma=fac.sigma.one_line() if fac.sigma is not None else None,
    )
    payload = report.to_dict()
    if cmd.out == "json":
        return EXIT_OK, payload, _dump(payload) + "\n"
    sep = "," if cmd.out == "csv" else " "
    lines = [f"pi{sep}{fac.pi.one_line()}"]
    if fac.sigma is not None:
        lines.append(f"sigma{sep}{fac.sigma.one_line()}")
    for name, mat in (("u", fac.u), ("b", fac.b)):
        lines += [f"{name}{sep}" + sep.join(str(v) for v in row) for row in mat.to_lists()]
    return EXIT_OK, payload, "\n".join(lines) + "\n"


def _run_enumerate(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    cache = _cache_from(settings)
    if cmd.group == "sp":
        stack = codes_to_stack(sp_codes(cmd.n, cache), 2 * cmd.n)
        expected = order_sp(cmd.n, 2)
        field_name = GF2.descriptor
    else:
        spec = cmd.spec()
        stack = gl_stack(cmd.n, spec, cache)
        expected = order_gl(cmd.n, spec.q)
        field_name = spec.descriptor
    payload = {
        "group": cmd.group.upper(),
        "n": cmd.n,
        "field": field_name,
        "count": str(stack.shape[0]),
        "order": str(expected),
    }
    status = EXIT_OK if stack.shape[0] == expected else EXIT_MISMATCH
    if cmd.out == "json":
        return status, payload, _dump(payload) + "\n"
    sep = "," if cmd.out == "csv" else " "
    flat = stack.reshape(stack.shape[0], -1)
    return status, payload, "".join(sep.join(str(int(v)) for v in row) + "\n" for row in flat)


def _run_csp(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    cache = _cache_from(settings)
    report = balance.csp_audit_sp(cmd.n, cache) if cmd.group == "sp" else balance.csp_audit(cmd.n, cmd.spec(), cache)
    payload = report.to_dict()
    if cmd.out == "json":
        text = _dump(payload) + "\n"
    else:
        sep = "," if cmd.out == "csv" else " "
        header = ["power", "fixed", "evaluation", "a_l", "orbits", "cond1", "cond1_sign", "cond2"]
        lines = [sep.join(header)]
        for row in report.rows:
            values = [
                row.power,
                row.fixed_points,
                "-" if row.evaluation is None else row.evaluation,
                row.coefficient,
                row.expected_orbits,
                int(row.condition_1),
                int(row.condition_1_up_to_sign),
                int(row.condition_2),
            ]
            lines.append(sep.join(str(v) for v in values))
        text = "\n".join(lines) + "\n"
    return (EXIT_OK if report.consistent else EXIT_MISMATCH), payload, text


def _run_field_info(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    spec = cmd.spec()
    payload = {
        "field": spec.descriptor,
        "p": spec.p,
        "k": spec.k,
        "q": spec.q,
        "modulus": list(spec.modulus),
        "elements": [str(e) for e in elements(spec)],
    }
    if cmd.out == "json":
        return EXIT_OK, payload, _dump(payload) + "\n"
    sep = "," if cmd.out == "csv" else " "
    return EXIT_OK, payload, "".join(f"{i}{sep}{e}\n" for i, e in enumerate(payload["elements"]))


def _run_verify(cmd: Command, settings: Settings) -> tuple[int, Any, str]:
    result = verify_suite(settings, quick=cmd.quick, cache=_cache_from(settings))
    payload = {
        "checks": [check.to_dict() for check in result.checks],
        "csp": [report.to_dict() for report in result.csp_reports],
        "passed": result.passed,
    }
    if cmd.out == "json":
        text = _dump(payload) + "\n"
    else:
        text = "".join(check.line() + "\n" for check in result.checks)
    return (EXIT_OK if result.passed else EXIT_MISMATCH), payload, text


_HANDLERS = {
    "verify": _run_verify,
    "genfun": _run_genfun,
    "imbalance": _run_imbalance,
    "decompose": _run_decompose,
    "enumerate": _run_enumerate,
    "csp": _run_csp,
    "field-info": _run_field_info,
}


def run(cmd: Command, settings: Settings | None = None) -> tuple[int, Any, str]:
    """Execute one command; returns (exit status, JSON payload, rendered output)."""
    settings = settings or load_settings()
    cmd.validate()
    return _HANDLERS[cmd.verb](cmd, settings)


def _stem(cmd: Command) -> str:
    return f"{cmd.verb}_{cmd.group}_n{cmd.n}_{cmd.field or 2}_{cmd.resolved_stat()}_{cmd.method}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    settings = load_settings()
    if args.cache_dir:
        settings = replace(settings, cache_dir=args.cache_dir)
    if args.workers is not None:
        settings = replace(settings, workers=max(1, args.workers))
    if args.log_level:
        settings = replace(settings, log_level=args.log_level.upper())
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    cmd = Command(
        verb=args.command,
        group=args.group,
        n=args.n,
        field=args.field,
        stat=args.stat,
        method=args.method,
        out=args.out,
        quick=args.quick,
        alt_bijection=args.alt_bijection,
    )
    try:
        if cmd.verb == "decompose":
            if args.file:
                if not Path(args.file).exists():
                    raise FileNotFoundError(f"Input file does not exist: {args.file}")
                cmd.matrix_text = Path(args.file).read_text(encoding="utf-8")
            else:
                cmd.matrix_text = sys.stdin.read()
        status, payload, text = run(cmd, settings)
    except VerificationMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (SignBalanceError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.save_dir:
        out_path = save_result_json(payload, _stem(cmd), args.save_dir)
        logger.info("Saved %s", out_path)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
