"""Per-reaction rate specifications: constants and bounded time-varying bands.

A banded rate kappa_k(t) stays strictly inside its band (lower, upper); the
global bound eta with eta < kappa_k(t) < 1/eta is derived from the bands, not
user-supplied.  Time profiles come from a small reproducible library:
constant value, sinusoid spanning the band, and seeded piecewise-constant
switching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# profile kind codes shared with the kernels
KIND_CONSTANT = 0
KIND_SINUSOID = 1
KIND_SWITCH = 2

_ETA_MARGIN = 1.0 - 1e-9
_CLAMP = 1e-9  # relative inset keeping banded values strictly inside the band


@dataclass(frozen=True)
class Sinusoid:
    """kappa(t) = mid + half*sin(freq*t + phase), clamped inside the band."""

    freq: float = 1.0
    phase: float = 0.0


@dataclass(frozen=True)
class Switching:
    """Piecewise-constant values, log-uniform in the band, seeded."""

    dwell: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class FixedValue:
    """Banded rate pinned at one admissible value (degenerate profile)."""

    value: float


Profile = Sinusoid | Switching | FixedValue


@dataclass(frozen=True)
class ConstantRate:
    kappa: float

    def __post_init__(self):
        if not self.kappa > 0 or not math.isfinite(self.kappa):
            raise ValueError(f"rate constant must be positive and finite, got {self.kappa}")

    @property
    def lower(self) -> float:
        return self.kappa

    @property
    def upper(self) -> float:
        return self.kappa


@dataclass(frozen=True)
class BandedRate:
    lower: float
    upper: float
    profile: Profile = Sinusoid()

    def __post_init__(self):
        if not (0 < self.lower <= self.upper) or not math.isfinite(self.upper):
            raise ValueError(
                f"band requires 0 < lower <= upper < inf, got [{self.lower}, {self.upper}]"
            )


RateSpec = ConstantRate | BandedRate


@dataclass(frozen=True)
class KineticsArrays:
    """Kernel-ready encoding of the kinetics (see _kernels)."""

    kind: np.ndarray
    base: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    freq: np.ndarray
    phase: np.ndarray
    dwell: np.ndarray
    values: np.ndarray

    def as_args(self) -> tuple:
        return (
            self.kind, self.base, self.lo, self.hi,
            self.freq, self.phase, self.dwell, self.values,
        )


@dataclass(frozen=True)
class Kinetics:
    """Rate specification for each reaction, in reaction order."""

    rates: tuple[RateSpec, ...]

    def __post_init__(self):
        if not self.rates:
            raise ValueError("kinetics must cover at least one reaction")

    @property
    def n_reactions(self) -> int:
        return len(self.rates)

    @property
    def is_autonomous(self) -> bool:
        return all(
            isinstance(r, ConstantRate)
            or isinstance(r.profile, FixedValue)
            for r in self.rates
        )

    def lower_bounds(self) -> np.ndarray:
        return np.array([r.lower for r in self.rates], dtype=np.float64)

    def upper_bounds(self) -> np.ndarray:
        return np.array([r.upper for r in self.rates], dtype=np.float64)

    def eta(self) -> float:
        """Global bound with eta < kappa_k(t) < 1/eta for every reaction."""
        tightest = min(min(r.lower, 1.0 / r.upper) for r in self.rates)
        return _ETA_MARGIN * tightest

    def is_bounded(self) -> bool:
        """All rates sit in a positive finite band (so an eta exists)."""
        return self.eta() > 0

    def compile(self, horizon: float = 1.0) -> KineticsArrays:
        """Encode profiles as flat arrays; switching values are pre-drawn to
        cover the given horizon (prefix-stable in the horizon)."""
        n = self.n_reactions
        kind = np.zeros(n, dtype=np.int64)
        base = np.zeros(n, dtype=np.float64)
        lo = self.lower_bounds()
        hi = self.upper_bounds()
        freq = np.zeros(n, dtype=np.float64)
        phase = np.zeros(n, dtype=np.float64)
        dwell = np.ones(n, dtype=np.float64)
        seg_values: list[np.ndarray] = []
        for k, spec in enumerate(self.rates):
            if isinstance(spec, ConstantRate):
                base[k] = spec.kappa
                seg_values.append(np.array([spec.kappa]))
                continue
            prof = spec.profile
            if isinstance(prof, FixedValue):
                base[k] = min(max(prof.value, spec.lower), spec.upper)
                seg_values.append(np.array([base[k]]))
            elif isinstance(prof, Sinusoid):
                kind[k] = KIND_SINUSOID
                freq[k] = prof.freq
                phase[k] = prof.phase
                base[k] = 0.5 * (spec.lower + spec.upper)
                seg_values.append(np.array([base[k]]))
            else:
                kind[k] = KIND_SWITCH
                dwell[k] = prof.dwell
                n_seg = max(1, int(math.ceil(horizon / prof.dwell)) + 2)
                rng = np.random.default_rng(prof.seed)
                vals = np.exp(
                    rng.uniform(math.log(spec.lower), math.log(spec.upper), size=n_seg)
                )
                seg_values.append(vals)
        width = max(len(v) for v in seg_values)
        values = np.zeros((n, width), dtype=np.float64)
        for k, vals in enumerate(seg_values):
            values[k, : len(vals)] = vals
            values[k, len(vals):] = vals[-1]
        margin = _CLAMP * (hi - lo)
        return KineticsArrays(
            kind=kind, base=base,
            lo=lo + margin, hi=hi - margin,
            freq=freq, phase=phase, dwell=dwell, values=values,
        )


def constant_kinetics(*kappas: float) -> Kinetics:
    return Kinetics(tuple(ConstantRate(k) for k in kappas))
