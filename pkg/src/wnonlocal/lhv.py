"""Local deterministic strategies: exhaustive classical bounds and the Hardy check.

A strategy fixes an outcome for every (site, basis) pair and is encoded as a
``2n``-bit integer: bits ``0..n-1`` hold the Z outcomes, bits ``n..2n-1`` the
X outcomes, a set bit meaning -1. A Bell term over setting ``S`` with outcome
``o`` is matched by a strategy exactly when ``code & care == want`` for the
term's precomputed masks, which is what the enumeration kernel evaluates.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .events import AllEqual, event_probability
from .inequality import BellExpression
from .states import AnalyticW, DimensionMismatch, MeasurementSetting, OutcomeAssignment

# TBB on this class of hosts is too old for numba; prefer OpenMP
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

DEFAULT_CEILING = 12
CHUNK_BITS = 16
DEFAULT_ARGMAX_LIMIT = 1024


class EnumerationInfeasible(RuntimeError):
    pass


@dataclass(frozen=True)
class DeterministicStrategy:
    z_signs: tuple[int, ...]
    x_signs: tuple[int, ...]

    def __post_init__(self):
        z = tuple(int(s) for s in self.z_signs)
        x = tuple(int(s) for s in self.x_signs)
        if len(z) != len(x):
            raise DimensionMismatch("z and x sign lists differ in length")
        if any(s not in (1, -1) for s in z + x):
            raise ValueError("strategy signs must be +1 or -1")
        object.__setattr__(self, "z_signs", z)
        object.__setattr__(self, "x_signs", x)

    @property
    def n(self) -> int:
        return len(self.z_signs)

    def encode(self) -> int:
        n = self.n
        code = 0
        for i, (z, x) in enumerate(zip(self.z_signs, self.x_signs)):
            if z == -1:
                code |= 1 << i
            if x == -1:
                code |= 1 << (n + i)
        return code

    @classmethod
    def decode(cls, code: int, n: int) -> "DeterministicStrategy":
        if not 0 <= code < 4**n:
            raise ValueError(f"code {code} out of range for {n} sites")
        z = tuple(-1 if (code >> i) & 1 else 1 for i in range(n))
        x = tuple(-1 if (code >> (n + i)) & 1 else 1 for i in range(n))
        return cls(z, x)

    def outcome(self, basis: str, site: int) -> int:
        return self.z_signs[site] if basis == "Z" else self.x_signs[site]

    def to_dict(self) -> dict:
        return {
            "encoding": self.encode(),
            "z": str(OutcomeAssignment(self.z_signs)),
            "x": str(OutcomeAssignment(self.x_signs)),
        }


def evaluate_strategy(strategy: DeterministicStrategy, expr: BellExpression) -> int:
    """Value of ``expr`` on a deterministic strategy, straight from the term list."""
    if strategy.n != expr.n:
        raise DimensionMismatch(f"strategy has {strategy.n} sites, expression {expr.n}")
    total = 0
    for term in expr.terms:
        if all(
            strategy.outcome(b, i) == s
            for i, (b, s) in enumerate(zip(term.setting.bases, term.outcome.signs))
        ):
            total += term.sign
    return total


def term_masks(expr: BellExpression) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(care, want, weight)`` arrays for the bit-encoded strategy form."""
    n = expr.n
    care = np.empty(len(expr.terms), dtype=np.int64)
    want = np.empty(len(expr.terms), dtype=np.int64)
    weight = np.empty(len(expr.terms), dtype=np.int64)
    for t, term in enumerate(expr.terms):
        c = w = 0
        for i, (b, s) in enumerate(zip(term.setting.bases, term.outcome.signs)):
            bit = 1 << (i if b == "Z" else n + i)
            c |= bit
            if s == -1:
                w |= bit
        care[t], want[t], weight[t] = c, w, term.sign
    return care, want, weight


@numba.njit(cache=True, nogil=True)
def _value(code, care, want, weight):
    v = 0
    for t in range(care.shape[0]):
        if (code & care[t]) == want[t]:
            v += weight[t]
    return v


@numba.njit(parallel=True, cache=True)
def _chunk_maxima(care, want, weight, total, chunk):
    n_chunks = (total + chunk - 1) // chunk
    best = np.empty(n_chunks, dtype=np.int64)
    count = np.zeros(n_chunks, dtype=np.int64)
    for c in numba.prange(n_chunks):
        lo = c * chunk
        hi = min(lo + chunk, total)
        b = _value(lo, care, want, weight)
        k = 1
        for code in range(lo + 1, hi):
            v = _value(code, care, want, weight)
            if v > b:
                b = v
                k = 1
            elif v == b:
                k += 1
        best[c] = b
        count[c] = k
    return best, count


@numba.njit(cache=True)
def _collect(care, want, weight, lo, hi, target, limit):
    out = np.empty(limit, dtype=np.int64)
    k = 0
    for code in range(lo, hi):
        if k >= limit:
            break
        if _value(code, care, want, weight) == target:
            out[k] = code
            k += 1
    return out[:k]


@numba.njit(cache=True)
def _values_range(care, want, weight, lo, hi):
    out = np.empty(hi - lo, dtype=np.int64)
    for code in range(lo, hi):
        out[code - lo] = _value(code, care, want, weight)
    return out


def strategy_values(expr: BellExpression, lo: int = 0, hi: int | None = None) -> np.ndarray:
    """Expression value for every encoding in ``[lo, hi)``."""
    care, want, weight = term_masks(expr)
    hi = 4**expr.n if hi is None else hi
    return _values_range(care, want, weight, lo, hi)


@dataclass(frozen=True)
class BoundCertificate:
    n: int
    max_value: float
    argmax: tuple[int, ...]
    strategies_searched: int
    argmax_count: int
    exhaustive: bool = True
    wall_time: float = field(default=0.0, compare=False)

    def argmax_strategies(self) -> list[DeterministicStrategy]:
        return [DeterministicStrategy.decode(c, self.n) for c in self.argmax]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_value": self.max_value,
            "argmax": [DeterministicStrategy.decode(c, self.n).to_dict() for c in self.argmax],
            "argmax_count": self.argmax_count,
            "strategies_searched": self.strategies_searched,
            "exhaustive": self.exhaustive,
            "wall_time": self.wall_time,
        }


def _check_ceiling(n: int, ceiling: int) -> None:
    if n > ceiling:
        raise EnumerationInfeasible(
            f"enumeration infeasible: n={n} exceeds the ceiling of {ceiling} "
            f"({4**n} strategies)"
        )


def enumerate_bound(
    expr: BellExpression,
    ceiling: int = DEFAULT_CEILING,
    argmax_limit: int = DEFAULT_ARGMAX_LIMIT,
    workers: int | None = None,
) -> BoundCertificate:
    """Maximise ``expr`` over all ``4**n`` deterministic strategies.

    The space is cut into fixed-size contiguous chunks reduced by max; the
    ``argmax_limit`` lowest maximising encodings are reported, together with
    the total number of maximisers. Chunking does not depend on ``workers``,
    so the certificate is the same for any thread count.
    """
    n = expr.n
    _check_ceiling(n, ceiling)
    if workers is not None:
        numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))
    start = time.perf_counter()
    care, want, weight = term_masks(expr)
    total = 4**n
    chunk = min(total, 1 << CHUNK_BITS)
    best, count = _chunk_maxima(care, want, weight, total, chunk)
    top = int(best.max())
    hits = best == top
    argmax: list[int] = []
    for c in np.flatnonzero(hits):
        if len(argmax) >= argmax_limit:
            break
        lo = int(c) * chunk
        found = _collect(care, want, weight, lo, min(lo + chunk, total), top, argmax_limit - len(argmax))
        argmax.extend(int(x) for x in found)
    return BoundCertificate(
        n=n,
        max_value=float(top),
        argmax=tuple(argmax),
        strategies_searched=total,
        argmax_count=int(count[hits].sum()),
        exhaustive=True,
        wall_time=time.perf_counter() - start,
    )


def sample_bound(expr: BellExpression, samples: int, seed=None) -> BoundCertificate:
    """Non-exhaustive lower estimate of the bound from random strategies."""
    rng = np.random.default_rng(seed)
    care, want, weight = term_masks(expr)
    start = time.perf_counter()
    # draw z and x halves separately so n up to 31 fits in int64
    n = expr.n
    codes = rng.integers(0, 2**n, size=samples, dtype=np.int64) | (
        rng.integers(0, 2**n, size=samples, dtype=np.int64) << n
    )
    values = np.array([_value(int(c), care, want, weight) for c in codes])
    top = int(values.max())
    winners = np.unique(codes[values == top])
    return BoundCertificate(
        n=n,
        max_value=float(top),
        argmax=tuple(int(c) for c in winners[:DEFAULT_ARGMAX_LIMIT]),
        strategies_searched=samples,
        argmax_count=len(winners),
        exhaustive=False,
        wall_time=time.perf_counter() - start,
    )


def mixture_value(expr: BellExpression, codes, weights) -> float:
    """Value of ``expr`` on the behaviour of a convex mixture of strategies.

    The term probabilities of the mixed behaviour are formed first and the
    expression is then evaluated on them.
    """
    codes = np.asarray(codes, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)
    if codes.shape != weights.shape:
        raise ValueError("codes and weights must have the same shape")
    if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    care, want, weight = term_masks(expr)
    match = (codes[:, None] & care[None, :]) == want[None, :]
    term_probs = weights @ match
    return math.fsum(weight * term_probs)


def mixture_bound_check(
    expr: BellExpression,
    trials: int,
    seed=None,
    components: int = 8,
    ceiling: int = DEFAULT_CEILING,
) -> float:
    """Largest value over ``trials`` random mixtures of ``components`` strategies.

    Weights are flat-Dirichlet (uniform on the simplex).
    """
    _check_ceiling(expr.n, ceiling)
    rng = np.random.default_rng(seed)
    total = 4**expr.n
    best = -math.inf
    for _ in range(trials):
        codes = rng.integers(0, total, size=components, dtype=np.int64)
        weights = rng.dirichlet(np.ones(components))
        weights /= weights.sum()
        best = max(best, mixture_value(expr, codes, weights))
    return best


@dataclass(frozen=True)
class HardyReport:
    n: int
    strategies_searched: int
    survivors: tuple[int, ...]
    survivors_by_world: dict
    all_survivors_uniform_x: bool
    quantum_all_equal_probability: float

    @property
    def holds(self) -> bool:
        """Every world has survivors and all of them force equal X outcomes."""
        return self.all_survivors_uniform_x and all(v > 0 for v in self.survivors_by_world.values())

    @property
    def contradiction_probability(self) -> float:
        return 1.0 - self.quantum_all_equal_probability

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "strategies_searched": self.strategies_searched,
            "survivors": len(self.survivors),
            "survivors_by_world": {str(k): v for k, v in self.survivors_by_world.items()},
            "all_survivors_uniform_x": self.all_survivors_uniform_x,
            "quantum_all_equal_probability": self.quantum_all_equal_probability,
            "holds": self.holds,
        }


def certainty_filter(codes: np.ndarray, n: int) -> np.ndarray:
    """Strategies consistent with the W-state certainties.

    Exactly one Z outcome is -1, and for every pair whose complementary
    ``n - 2`` Z outcomes are all +1, the pair's X outcomes agree.
    """
    full = (1 << n) - 1
    z = codes & full
    x = (codes >> n) & full
    keep = np.bitwise_count(z) == 1
    for i, j in itertools.combinations(range(n), 2):
        others = full ^ ((1 << i) | (1 << j))
        applies = (z & others) == 0
        agree = ((x >> i) & 1) == ((x >> j) & 1)
        keep &= ~applies | agree
    return keep


def hardy_implication_check(n: int, ceiling: int = DEFAULT_CEILING) -> HardyReport:
    """Exhaustively verify that the certainty constraints force equal X outcomes.

    Survivors are grouped by which site carries the -1 Z outcome (the
    mutually exclusive "worlds"); the implication has to hold in each.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    _check_ceiling(n, ceiling)
    full = (1 << n) - 1
    total = 4**n
    step = 1 << 20
    survivors = []
    for lo in range(0, total, step):
        codes = np.arange(lo, min(lo + step, total), dtype=np.int64)
        survivors.append(codes[certainty_filter(codes, n)])
    surv = np.concatenate(survivors)
    x = (surv >> n) & full
    uniform = bool(np.all((x == 0) | (x == full)))
    worlds = {k: int(np.count_nonzero((surv & full) == (1 << k))) for k in range(n)}
    p_equal = event_probability(AnalyticW(n), MeasurementSetting.uniform(n, "X"), AllEqual())
    return HardyReport(
        n=n,
        strategies_searched=total,
        survivors=tuple(int(c) for c in surv),
        survivors_by_world=worlds,
        all_survivors_uniform_x=uniform,
        quantum_all_equal_probability=p_equal,
    )
