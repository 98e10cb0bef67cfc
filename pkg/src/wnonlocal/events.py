"""Events over outcome assignments, and event / conditional probabilities.

An event is evaluated on outcome *indices* (bit ``i`` set <-> sign -1 on
site ``i``) so that membership over a whole distribution is a handful of
vectorised bit operations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .states import (
    DimensionMismatch,
    OutcomeAssignment,
    PureState,
    _X_BRAS,
    as_outcome,
    as_setting,
)

ZERO_PROBABILITY_TOL = 1e-14


class UndefinedConditional(ArithmeticError):
    """Raised when conditioning on an event of (numerically) zero probability."""


def _site_mask(sites: Sequence[int] | None, n: int) -> int:
    if sites is None:
        return (1 << n) - 1
    mask = 0
    for s in sites:
        if not 0 <= s < n:
            raise DimensionMismatch(f"site {s} out of range for {n} modes")
        mask |= 1 << s
    return mask


class Event:
    """Base class; subclasses implement :meth:`index_mask`."""

    def index_mask(self, indices: np.ndarray, n: int) -> np.ndarray:
        raise NotImplementedError

    def contains(self, outcome) -> bool:
        outcome = as_outcome(outcome)
        idx = np.array([outcome.index], dtype=np.int64)
        return bool(self.index_mask(idx, outcome.n)[0])

    def __and__(self, other: "Event") -> "Event":
        return Intersection((self, other))


@dataclass(frozen=True)
class Fixed(Event):
    """Partial assignment: ``signs`` maps site -> +1/-1, other sites free."""

    signs: Mapping[int, int]

    def __post_init__(self):
        signs = {int(k): int(v) for k, v in dict(self.signs).items()}
        if any(v not in (1, -1) for v in signs.values()):
            raise ValueError(f"fixed signs must be +1 or -1: {self.signs!r}")
        object.__setattr__(self, "signs", signs)

    def __hash__(self):
        return hash(tuple(sorted(self.signs.items())))

    def index_mask(self, indices, n):
        care = _site_mask(list(self.signs), n)
        want = sum(1 << s for s, v in self.signs.items() if v == -1)
        return (indices & care) == want


@dataclass(frozen=True)
class AllEqual(Event):
    """All signs on ``sites`` (default: every site) coincide."""

    sites: tuple[int, ...] | None = None

    def index_mask(self, indices, n):
        m = _site_mask(self.sites, n)
        sub = indices & m
        return (sub == 0) | (sub == m)


@dataclass(frozen=True)
class ExactlyOneNegative(Event):
    """Exactly one sign on ``sites`` (default: every site) is -1."""

    sites: tuple[int, ...] | None = None

    def index_mask(self, indices, n):
        m = _site_mask(self.sites, n)
        return np.bitwise_count(indices & m) == 1


def signs_equal(i: int, j: int) -> AllEqual:
    return AllEqual((i, j))


def all_positive(sites: Sequence[int]) -> Fixed:
    return Fixed({s: 1 for s in sites})


@dataclass(frozen=True)
class Intersection(Event):
    parts: tuple[Event, ...]

    def index_mask(self, indices, n):
        mask = np.ones(indices.shape, dtype=bool)
        for part in self.parts:
            mask &= part.index_mask(indices, n)
        return mask


@dataclass(frozen=True)
class Predicate(Event):
    """Arbitrary predicate over an :class:`OutcomeAssignment` (slow fallback)."""

    fn: Callable[[OutcomeAssignment], bool]
    name: str = "predicate"

    def index_mask(self, indices, n):
        return np.array(
            [bool(self.fn(OutcomeAssignment.from_index(int(j), n))) for j in indices],
            dtype=bool,
        )


def _partial_probability(state: PureState, setting, fixed: Fixed) -> float:
    # unfixed sites are summed over a complete basis, so their basis is irrelevant:
    # P = || (prod_fixed <e_i|) psi ||^2
    n = state.n
    index = []
    for site in reversed(range(n)):
        if site in fixed.signs and setting.bases[site] == "Z":
            index.append(0 if fixed.signs[site] == 1 else 1)
        else:
            index.append(slice(None))
    amp = state.tensor()[tuple(index)]
    remaining = [s for s in reversed(range(n)) if not (s in fixed.signs and setting.bases[s] == "Z")]
    # contract from the back so earlier axis positions stay valid
    for pos in reversed(range(len(remaining))):
        site = remaining[pos]
        if site in fixed.signs:
            bra = _X_BRAS[0 if fixed.signs[site] == 1 else 1]
            amp = np.tensordot(amp, bra, axes=([pos], [0]))
    return float(np.sum(np.abs(amp) ** 2))


def event_probability(state, setting, event: Event) -> float:
    """Probability that the outcome of ``setting`` lies in ``event``.

    ``state`` is anything exposing ``n`` and ``distribution(setting)``; a
    :class:`PureState` with a :class:`Fixed` event takes a marginal shortcut.
    """
    setting = as_setting(setting)
    n = state.n
    if setting.n != n:
        raise DimensionMismatch(f"setting has {setting.n} sites, state has {n}")
    if isinstance(event, Fixed) and isinstance(state, PureState):
        _site_mask(list(event.signs), n)
        return min(1.0, _partial_probability(state, setting, event))
    probs = state.distribution(setting)
    indices = np.arange(2**n, dtype=np.int64)
    total = float(np.sum(probs[event.index_mask(indices, n)]))
    return min(1.0, max(0.0, total))


def conditional_probability(state, setting, target: Event, condition: Event) -> float:
    p_cond = event_probability(state, setting, condition)
    if p_cond <= ZERO_PROBABILITY_TOL:
        raise UndefinedConditional(
            f"conditioning event has probability {p_cond!r}; conditional is undefined"
        )
    p_joint = event_probability(state, setting, target & condition)
    return p_joint / p_cond
