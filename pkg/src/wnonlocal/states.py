"""Single-excitation states of N field modes and their Z/X outcome probabilities.

Conventions
-----------
* Basis index: bit ``i`` of the occupation index is site ``i`` (site 0 is the
  lowest-order bit); a set bit means one photon in that mode.
* Z outcome +1 means the site is empty, -1 means it is occupied.
* X outcome +1/-1 selects the projector onto ``(|0> +/- |1>)/sqrt(2)``.

Sites are 0-based throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

STATEVECTOR_MAX_MODES = 24
NORM_TOL = 1e-12

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
# bra vectors <+| and <-| indexed by outcome bit (0 <-> +1, 1 <-> -1)
_X_BRAS = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]])


class DimensionMismatch(ValueError):
    pass


def _check_modes(n: int, limit: int | None = None) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"invalid mode count {n!r}; need an integer >= 1")
    if limit is not None and n > limit:
        raise ValueError(
            f"statevector path supports at most {limit} modes, got {n}; "
            "use the analytic W-state path instead"
        )


@dataclass(frozen=True)
class MeasurementSetting:
    """Per-site basis choice, each entry ``'Z'`` or ``'X'``."""

    bases: tuple[str, ...]

    def __post_init__(self):
        bases = tuple(str(b).upper() for b in self.bases)
        if any(b not in ("Z", "X") for b in bases):
            raise ValueError(f"bases must be Z or X, got {self.bases!r}")
        object.__setattr__(self, "bases", bases)

    @classmethod
    def from_string(cls, text: str) -> "MeasurementSetting":
        return cls(tuple(text))

    @classmethod
    def uniform(cls, n: int, basis: str) -> "MeasurementSetting":
        return cls((basis,) * n)

    @property
    def n(self) -> int:
        return len(self.bases)

    @property
    def x_mask(self) -> int:
        """Bitmask of the sites measured in X."""
        return sum(1 << i for i, b in enumerate(self.bases) if b == "X")

    def __str__(self) -> str:
        return "".join(self.bases)


@dataclass(frozen=True)
class OutcomeAssignment:
    """Per-site outcome signs (+1 or -1)."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"outcome signs must be +1 or -1, got {self.signs!r}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_string(cls, text: str) -> "OutcomeAssignment":
        table = {"+": 1, "-": -1}
        try:
            return cls(tuple(table[c] for c in text))
        except KeyError:
            raise ValueError(f"outcome string may only contain '+' and '-': {text!r}") from None

    @classmethod
    def from_index(cls, index: int, n: int) -> "OutcomeAssignment":
        """Inverse of :attr:`index` (bit set <-> sign -1)."""
        return cls(tuple(-1 if (index >> i) & 1 else 1 for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def index(self) -> int:
        return sum(1 << i for i, s in enumerate(self.signs) if s == -1)

    def __str__(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.signs)


def as_setting(setting) -> MeasurementSetting:
    if isinstance(setting, MeasurementSetting):
        return setting
    if isinstance(setting, str):
        return MeasurementSetting.from_string(setting)
    return MeasurementSetting(tuple(setting))


def as_outcome(outcome) -> OutcomeAssignment:
    if isinstance(outcome, OutcomeAssignment):
        return outcome
    if isinstance(outcome, str):
        return OutcomeAssignment.from_string(outcome)
    return OutcomeAssignment(tuple(outcome))


def _check_lengths(n: int, setting: MeasurementSetting, outcome: OutcomeAssignment | None = None):
    if setting.n != n:
        raise DimensionMismatch(f"setting has {setting.n} sites, state has {n}")
    if outcome is not None and outcome.n != n:
        raise DimensionMismatch(f"outcome has {outcome.n} sites, state has {n}")


@dataclass(frozen=True, eq=False)
class PureState:
    """Dense amplitude vector over the ``2**n`` occupation basis."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_modes(self.n, STATEVECTOR_MAX_MODES)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n,):
            raise DimensionMismatch(
                f"expected {2**self.n} amplitudes for {self.n} modes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (squared norm {norm!r})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped so that site ``i`` is axis ``n - 1 - i``."""
        return self.amplitudes.reshape((2,) * self.n)

    def probability(self, setting, outcome) -> float:
        return outcome_probability(self, setting, outcome)

    def distribution(self, setting) -> np.ndarray:
        return outcome_distribution(self, setting)


def build_w_state(n: int) -> PureState:
    """Symmetric single-photon superposition over ``n`` modes."""
    _check_modes(n, STATEVECTOR_MAX_MODES)
    amps = np.zeros(2**n, dtype=complex)
    amps[[1 << i for i in range(n)]] = 1.0 / np.sqrt(n)
    return PureState(n, amps)


def build_vacuum(n: int) -> PureState:
    _check_modes(n, STATEVECTOR_MAX_MODES)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return PureState(n, amps)


def outcome_probability(state: PureState, setting, outcome) -> float:
    """Probability of one full outcome assignment under a product Z/X setting.

    Z sites are fixed by basic indexing (a view), so only the X sites are
    contracted: the cost is ``O(2**n_x)`` on top of the view.
    """
    setting, outcome = as_setting(setting), as_outcome(outcome)
    n = state.n
    _check_lengths(n, setting, outcome)
    index = []
    x_sites = []
    # axis order runs from site n-1 down to site 0
    for site in reversed(range(n)):
        bit = 0 if outcome.signs[site] == 1 else 1
        if setting.bases[site] == "Z":
            index.append(bit)
        else:
            index.append(slice(None))
            x_sites.append(site)
    amp = state.tensor()[tuple(index)]
    # remaining axes are the X sites in the same (descending) order; contract from the back
    for site in reversed(x_sites):
        bit = 0 if outcome.signs[site] == 1 else 1
        amp = amp @ _X_BRAS[bit]
    amp = complex(amp)
    return float(amp.real**2 + amp.imag**2)


def outcome_distribution(state: PureState, setting) -> np.ndarray:
    """All ``2**n`` outcome probabilities for a setting, indexed like the basis.

    Entry ``j`` is the probability of the assignment whose sign on site ``i``
    is -1 exactly when bit ``i`` of ``j`` is set.
    """
    setting = as_setting(setting)
    n = state.n
    _check_lengths(n, setting)
    psi = state.tensor()
    for site, basis in enumerate(setting.bases):
        if basis == "X":
            axis = n - 1 - site
            psi = np.moveaxis(np.tensordot(_X_BRAS, psi, axes=([1], [axis])), 0, axis)
    probs = (psi.real**2 + psi.imag**2).reshape(-1)
    return probs


def _w_exact(n: int, setting: MeasurementSetting, outcome: OutcomeAssignment) -> Fraction:
    n_x = 0
    x_sum = 0
    z_negative = 0
    for basis, sign in zip(setting.bases, outcome.signs):
        if basis == "X":
            n_x += 1
            x_sum += sign
        elif sign == -1:
            z_negative += 1
    if z_negative > 1:
        return Fraction(0)
    if z_negative == 1:
        # photon pinned to the single occupied Z site; every X site sees |0>
        return Fraction(1, n * 2**n_x)
    # photon somewhere among the X sites; amplitude (1/sqrt(n)) 2^(-n_x/2) sum_k s_k
    return Fraction(x_sum * x_sum, n * 2**n_x)


def analytic_w_probability(n: int, setting, outcome, exact: bool = False):
    """Closed-form outcome probability for the ``n``-mode W state.

    The amplitude is a sum over photon positions of product overlaps, which
    collapses to ``O(n)`` work. With ``exact=True`` a :class:`Fraction` is
    returned.
    """
    _check_modes(n)
    setting, outcome = as_setting(setting), as_outcome(outcome)
    _check_lengths(n, setting, outcome)
    value = _w_exact(n, setting, outcome)
    return value if exact else float(value)


def analytic_w_distribution(n: int, setting) -> np.ndarray:
    """Vectorised closed form over all ``2**n`` outcomes of one setting."""
    _check_modes(n)
    setting = as_setting(setting)
    _check_lengths(n, setting)
    idx = np.arange(2**n, dtype=np.int64)
    xmask = setting.x_mask
    zmask = (2**n - 1) ^ xmask
    n_x = bin(xmask).count("1")
    z_neg = np.bitwise_count(idx & zmask)
    x_neg = np.bitwise_count(idx & xmask).astype(np.int64)
    x_sum = n_x - 2 * x_neg
    scale = 1.0 / (n * 2.0**n_x)
    return np.where(z_neg == 1, scale, np.where(z_neg == 0, x_sum * x_sum * scale, 0.0))


@dataclass(frozen=True)
class AnalyticW:
    """W state evaluated through the closed form; usable for any ``n``."""

    n: int

    def __post_init__(self):
        _check_modes(self.n)

    def probability(self, setting, outcome) -> float:
        return analytic_w_probability(self.n, setting, outcome)

    def distribution(self, setting) -> np.ndarray:
        return analytic_w_distribution(self.n, setting)


def all_outcomes(n: int) -> Iterable[OutcomeAssignment]:
    for j in range(2**n):
        yield OutcomeAssignment.from_index(j, n)


def settings_with_x(n: int, x_sites: Sequence[int]) -> MeasurementSetting:
    """Setting that measures ``x_sites`` in X and every other site in Z."""
    chosen = set(x_sites)
    return MeasurementSetting(tuple("X" if i in chosen else "Z" for i in range(n)))
