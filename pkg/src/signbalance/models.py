from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any


def _num(value: int | None) -> str | None:
    return None if value is None else str(value)


@dataclass(slots=True)
class CrossCheck:
    name: str
    lhs: int
    rhs: int

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "lhs": str(self.lhs), "rhs": str(self.rhs), "pass": self.passed}


@dataclass(slots=True)
class ImbalanceReport:
    group: str
    n: int
    field: str
    stat: str
    coefficients: list[int]
    q: int
    value: int
    method: str
    cross_checks: list[CrossCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.cross_checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "group": self.group,
            "n": self.n,
            "field": self.field,
            "stat": self.stat,
            "coefficients": [str(c) for c in self.coefficients],
            "evaluation": {"q": self.q, "value": str(self.value)},
            "method": self.method,
            "cross_checks": [check.to_dict() for check in self.cross_checks],
        }


@dataclass(slots=True)
class CheckResult:
    name: str
    expected: int
    computed: int

    @property
    def passed(self) -> bool:
        return self.expected == self.computed

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name}: expected {self.expected} computed {self.computed} {verdict}"

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "expected": str(self.expected), "computed": str(self.computed), "pass": self.passed}


@dataclass(slots=True)
class CspPowerRow:
    power: int
    fixed_points: int
    evaluation: int | None
    coefficient: int
    expected_orbits: int
    condition_1: bool
    condition_1_up_to_sign: bool
    condition_2: bool

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        for key in ("fixed_points", "evaluation", "coefficient", "expected_orbits"):
            out[key] = _num(out[key])
        return out


@dataclass(slots=True)
class CspReport:
    group: str
    n: int
    field: str
    q: int
    rows: list[CspPowerRow]
    orbit_census: dict[int, int]
    odd_coset_elements: int
    consistent: bool
    extrapolated: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "group": self.group,
            "n": self.n,
            "field": self.field,
            "q": self.q,
            "rows": [row.to_dict() for row in self.rows],
            "orbit_census": {str(size): str(count) for size, count in self.orbit_census.items()},
            "odd_coset_elements": str(self.odd_coset_elements),
            "consistent": self.consistent,
            "extrapolated": self.extrapolated,
            "notes": list(self.notes),
        }


@dataclass(slots=True)
class DecompositionReport:
    group: str
    field: str
    u: list[list[int]]
    pi: str
    b: list[list[int]]
    sigma: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
