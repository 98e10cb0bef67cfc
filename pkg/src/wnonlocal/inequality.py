"""The N-party single-photon Bell expression and its quantum values.

The expression for ``n`` sites is

    Omega = sum_k P(all Z, only site k occupied)
            - sum_{i<j} [P(Z=+1 elsewhere, x_i=+1, x_j=-1) + P(..., x_i=-1, x_j=+1)]
            - P(all x=+1) - P(all x=-1)

with classical bound 0. At ``n = 3`` the term list (and its order) is the
three-site inequality verbatim.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .states import (
    DimensionMismatch,
    MeasurementSetting,
    OutcomeAssignment,
    settings_with_x,
)


@dataclass(frozen=True)
class BellTerm:
    sign: int
    setting: MeasurementSetting
    outcome: OutcomeAssignment

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"term sign must be +1 or -1, got {self.sign!r}")
        if self.setting.n != self.outcome.n:
            raise DimensionMismatch("term setting and outcome lengths differ")

    def to_dict(self) -> dict:
        return {"sign": self.sign, "bases": str(self.setting), "signs": str(self.outcome)}

    @classmethod
    def from_dict(cls, d: dict) -> "BellTerm":
        return cls(
            int(d["sign"]),
            MeasurementSetting.from_string(d["bases"]),
            OutcomeAssignment.from_string(d["signs"]),
        )


@dataclass(frozen=True)
class BellExpression:
    n: int
    terms: tuple[BellTerm, ...]
    classical_bound: float = 0.0
    name: str = field(default="omega", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.setting.n != self.n:
                raise DimensionMismatch(f"term over {t.setting.n} sites in {self.n}-site expression")

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[BellTerm]:
        return iter(self.terms)

    @property
    def positive_terms(self) -> int:
        return sum(1 for t in self.terms if t.sign == 1)

    @property
    def negative_terms(self) -> int:
        return sum(1 for t in self.terms if t.sign == -1)

    def settings(self) -> list[MeasurementSetting]:
        """Distinct settings, in first-appearance order."""
        seen = {}
        for t in self.terms:
            seen.setdefault(t.setting, None)
        return list(seen)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "classical_bound": self.classical_bound,
            "terms": [t.to_dict() for t in self.terms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BellExpression":
        return cls(
            int(d["n"]),
            tuple(BellTerm.from_dict(t) for t in d["terms"]),
            float(d.get("classical_bound", 0.0)),
            d.get("name", "omega"),
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _check_inequality_n(n: int, minimum: int = 3) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < minimum:
        raise ValueError(f"need an integer n >= {minimum}, got {n!r}")


def build_omega(n: int) -> BellExpression:
    """Term list of the ``n``-site inequality (``n + n(n-1) + 2`` terms)."""
    _check_inequality_n(n)
    all_z = MeasurementSetting.uniform(n, "Z")
    terms = []
    # occupied site listed from the last site to the first
    for k in reversed(range(n)):
        signs = tuple(-1 if i == k else 1 for i in range(n))
        terms.append(BellTerm(1, all_z, OutcomeAssignment(signs)))
    # pairs in reverse lexicographic order: (n-2, n-1), ..., (0, 1)
    for i, j in sorted(itertools.combinations(range(n), 2), reverse=True):
        setting = settings_with_x(n, (i, j))
        for si, sj in ((1, -1), (-1, 1)):
            signs = [1] * n
            signs[i], signs[j] = si, sj
            terms.append(BellTerm(-1, setting, OutcomeAssignment(tuple(signs))))
    all_x = MeasurementSetting.uniform(n, "X")
    terms.append(BellTerm(-1, all_x, OutcomeAssignment((1,) * n)))
    terms.append(BellTerm(-1, all_x, OutcomeAssignment((-1,) * n)))
    return BellExpression(n, tuple(terms), 0.0, "omega")


def term_count(n: int) -> int:
    return n + n * (n - 1) + 2


def term_values(expr: BellExpression, state) -> list[float]:
    """Per-term probabilities on ``state`` (anything with ``n`` and ``probability``)."""
    if state.n != expr.n:
        raise DimensionMismatch(f"expression over {expr.n} sites, state has {state.n}")
    return [state.probability(t.setting, t.outcome) for t in expr.terms]


def evaluate_on_state(expr: BellExpression, state) -> float:
    """Signed sum of term probabilities.

    Summation runs in term order with :func:`math.fsum`, so the result does
    not depend on how per-term work was scheduled.
    """
    values = term_values(expr, state)
    return math.fsum(t.sign * v for t, v in zip(expr.terms, values))


def omega_closed_form_exact(n: int) -> Fraction:
    _check_inequality_n(n)
    return 1 - Fraction(n, 2 ** (n - 1))


def omega_closed_form(n: int) -> float:
    """W-state value ``1 - n / 2**(n-1)``."""
    return float(omega_closed_form_exact(n))


def violation_probability(n: int) -> float:
    """Probability that all-X outcomes on W(n) are not all equal."""
    _check_inequality_n(n, minimum=2)
    return float(1 - Fraction(n, 2 ** (n - 1)))
