"""Noisy W-state predictions and finite-shot simulation of the Bell test.

Noise is mixed in at the probability level, ``p * W + (1 - p) * sigma``:

* ``white_noise``: sigma is the maximally mixed state on all ``2**n`` levels,
  so every full outcome of a product setting has probability ``2**-n``.
* ``photon_loss``: uniform per-site survival ``eta`` takes a single-photon
  state to ``eta * W + (1 - eta) * vacuum``, so sigma is the vacuum.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from .inequality import BellExpression, build_omega, omega_closed_form_exact
from .states import (
    AnalyticW,
    MeasurementSetting,
    OutcomeAssignment,
    analytic_w_probability,
    as_outcome,
    as_setting,
)

NOISE_KINDS = ("white_noise", "photon_loss")
_ALIASES = {"white": "white_noise", "loss": "photon_loss"}


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    p: float

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        p = float(self.p)
        if not (0.0 <= p <= 1.0) or math.isnan(p):
            raise ValueError(f"noise parameter must lie in [0, 1], got {self.p!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", p)


def _sigma_probability(kind: str, setting: MeasurementSetting, outcome: OutcomeAssignment) -> float:
    n = setting.n
    if kind == "white_noise":
        return 2.0**-n
    n_x = 0
    for b, s in zip(setting.bases, outcome.signs):
        if b == "Z" and s == -1:
            return 0.0
        n_x += b == "X"
    return 2.0**-n_x


def _sigma_distribution(kind: str, setting: MeasurementSetting) -> np.ndarray:
    n = setting.n
    if kind == "white_noise":
        return np.full(2**n, 2.0**-n)
    xmask = setting.x_mask
    zmask = (2**n - 1) ^ xmask
    idx = np.arange(2**n, dtype=np.int64)
    n_x = bin(xmask).count("1")
    return np.where((idx & zmask) == 0, 2.0**-n_x, 0.0)


@dataclass(frozen=True)
class NoisyW:
    """Probability source for the mixture of W(n) with a noise state."""

    n: int
    model: NoiseModel

    def probability(self, setting, outcome) -> float:
        return noisy_term_probability(self.n, self.model, setting, outcome)

    def distribution(self, setting) -> np.ndarray:
        setting = as_setting(setting)
        p = self.model.p
        return p * AnalyticW(self.n).distribution(setting) + (1 - p) * _sigma_distribution(
            self.model.kind, setting
        )


def noisy_term_probability(n: int, model: NoiseModel, setting, outcome) -> float:
    setting, outcome = as_setting(setting), as_outcome(outcome)
    p_w = analytic_w_probability(n, setting, outcome)
    return model.p * p_w + (1 - model.p) * _sigma_probability(model.kind, setting, outcome)


def omega_sigma_exact(n: int, kind: str) -> Fraction:
    """Bell value of the pure noise state, as an exact rational."""
    kind = _ALIASES.get(kind, kind)
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if kind == "white_noise":
        return Fraction(n - n * (n - 1) - 2, 2**n)
    if kind == "photon_loss":
        return -(Fraction(n * (n - 1), 4) + Fraction(2, 2**n))
    raise ValueError(f"unknown noise kind {kind!r}")


def noisy_omega(n: int, model: NoiseModel) -> float:
    """``p * Omega_W(n) + (1 - p) * Omega_sigma(n)``."""
    w = omega_closed_form_exact(n)
    s = omega_sigma_exact(n, model.kind)
    return model.p * float(w) + (1 - model.p) * float(s)


def critical_parameter_exact(n: int, kind: str) -> Fraction:
    w = omega_closed_form_exact(n)
    s = omega_sigma_exact(n, kind)
    if not s < 0 < w:
        raise ValueError(f"no sign change for n={n}, kind={kind}: sigma={s}, W={w}")
    return s / (s - w)


def critical_parameter(n: int, kind: str) -> float:
    """Mixing weight at which the noisy Bell value crosses zero."""
    return float(critical_parameter_exact(n, kind))


@dataclass(frozen=True)
class ShotRecord:
    setting: MeasurementSetting
    counts: dict
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def frequency(self, outcome) -> float:
        return self.counts.get(str(as_outcome(outcome)), 0) / self.shots

    def rows(self) -> list[dict]:
        return [
            {"setting": str(self.setting), "outcome": k, "count": v, "shots": self.shots}
            for k, v in self.counts.items()
        ]

    def to_dict(self) -> dict:
        return {"setting": str(self.setting), "counts": dict(self.counts), "shots": self.shots}


@lru_cache(maxsize=32)
def _cdf(source, setting: MeasurementSetting) -> np.ndarray:
    cdf = np.cumsum(source.distribution(setting))
    return cdf / cdf[-1]


def _setting_stream(seed, setting: MeasurementSetting) -> np.random.Generator:
    # stream depends only on (seed, setting), never on scheduling
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(setting.n, setting.x_mask)))


def sample_setting(source, setting, shots: int, seed=None) -> ShotRecord:
    """Draw ``shots`` i.i.d. outcomes by inverse CDF over the exact distribution.

    ``source`` is any object with ``n`` and ``distribution(setting)``
    (:class:`PureState`, :class:`AnalyticW`, :class:`NoisyW`).
    """
    setting = as_setting(setting)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if setting.n != source.n:
        raise ValueError(f"setting has {setting.n} sites, source has {source.n}")
    cdf = _cdf(source, setting)
    rng = _setting_stream(seed, setting)
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    draws = np.minimum(draws, cdf.size - 1)
    idx, counts = np.unique(draws, return_counts=True)
    n = setting.n
    return ShotRecord(
        setting,
        {str(OutcomeAssignment.from_index(int(j), n)): int(c) for j, c in zip(idx, counts)},
        int(shots),
    )


@dataclass(frozen=True)
class OmegaEstimate:
    n: int
    value: float
    lower: float
    upper: float
    std_error: float
    level: float
    method: str
    records: tuple[ShotRecord, ...]
    term_intervals: tuple[tuple[float, float], ...] = field(repr=False)
    exact_value: float | None = None

    @property
    def violation_detected(self) -> bool:
        return self.lower > 0

    @property
    def verdict(self) -> str:
        return "violation detected" if self.violation_detected else "no violation"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "omega_hat": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "std_error": self.std_error,
            "level": self.level,
            "method": self.method,
            "exact_value": self.exact_value,
            "verdict": self.verdict,
        }


def _term_interval(k: int, shots: int, level: float, method: str) -> tuple[float, float]:
    p_hat = k / shots
    if method == "normal":
        z = NormalDist().inv_cdf(0.5 + level / 2)
        hw = z * math.sqrt(p_hat * (1 - p_hat) / shots)
        return max(0.0, p_hat - hw), min(1.0, p_hat + hw)
    if method == "exact":
        from scipy.stats import beta

        alpha = 1 - level
        lo = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, shots - k + 1))
        hi = 1.0 if k == shots else float(beta.ppf(1 - alpha / 2, k + 1, shots - k))
        return lo, hi
    raise ValueError(f"unknown interval method {method!r}")


def estimate_from_records(
    expr: BellExpression,
    records,
    level: float = 0.99,
    method: str = "normal",
) -> OmegaEstimate:
    """Plug-in estimate of ``expr`` with a conservative summed interval."""
    by_setting = {r.setting: r for r in records}
    value = 0.0
    lower = upper = 0.0
    intervals = []
    for term in expr.terms:
        rec = by_setting[term.setting]
        k = rec.counts.get(str(term.outcome), 0)
        p_hat = k / rec.shots
        lo, hi = _term_interval(k, rec.shots, level, method)
        intervals.append((lo, hi))
        value += term.sign * p_hat
        if term.sign > 0:
            lower += lo
            upper += hi
        else:
            lower -= hi
            upper -= lo
    # multinomial variance of the signed sum within each setting; settings independent
    var = 0.0
    for setting, rec in by_setting.items():
        signs = {str(t.outcome): t.sign for t in expr.terms if t.setting == setting}
        m1 = sum(s * rec.counts.get(o, 0) for o, s in signs.items()) / rec.shots
        m2 = sum(rec.counts.get(o, 0) for o in signs) / rec.shots
        var += (m2 - m1 * m1) / rec.shots
    return OmegaEstimate(
        n=expr.n,
        value=value,
        lower=lower,
        upper=upper,
        std_error=math.sqrt(max(var, 0.0)),
        level=level,
        method=method,
        records=tuple(records),
        term_intervals=tuple(intervals),
    )


def estimate_omega(
    n: int,
    model: NoiseModel | None,
    shots_per_setting: int,
    seed=None,
    level: float = 0.99,
    method: str = "normal",
    workers: int = 1,
) -> OmegaEstimate:
    """Simulate the full test protocol: sample every setting the inequality uses."""
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be >= 1")
    if not 0 < level < 1:
        raise ValueError(f"coverage level must lie in (0, 1), got {level}")
    expr = build_omega(n)
    source = NoisyW(n, model) if model is not None else AnalyticW(n)
    settings = expr.settings()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(lambda s: sample_setting(source, s, shots_per_setting, seed), settings))
    else:
        records = [sample_setting(source, s, shots_per_setting, seed) for s in settings]
    est = estimate_from_records(expr, records, level, method)
    exact = noisy_omega(n, model) if model is not None else float(omega_closed_form_exact(n))
    return replace(est, exact_value=exact)
