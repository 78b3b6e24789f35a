"""Mass-action dynamics: rates, the ODE right-hand side, the Lyapunov
function V(z) = sum z_i (ln z_i - 1) + 1, descent functionals, and a
positivity-preserving adaptive Dormand-Prince integrator."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .kinetics import Kinetics, KineticsArrays
from .model import ReactionNetwork, monomial, reaction_vectors


class IntegrationError(RuntimeError):
    """Base for integration failures; carries the partial trajectory."""

    def __init__(self, message: str, partial: "Trajectory | None" = None):
        super().__init__(message)
        self.partial = partial


class StepSizeUnderflow(IntegrationError):
    """Step size collapsed (state pinned against the positivity boundary)."""


class NonFiniteState(IntegrationError):
    """State or derivative stopped being finite."""


class MaxStepsExceeded(IntegrationError):
    """Step budget exhausted before the horizon."""


@dataclass(frozen=True)
class System:
    """Kernel-ready arrays for one reaction system."""

    net: ReactionNetwork
    kin: Kinetics
    source_exponents: np.ndarray   # (R, N) y_k
    reaction_matrix: np.ndarray    # (R, N) y_k' - y_k
    arrays: KineticsArrays

    def kernel_args(self) -> tuple:
        return (self.source_exponents, self.reaction_matrix) + self.arrays.as_args()


def compile_system(net: ReactionNetwork, kin: Kinetics, horizon: float = 1.0) -> System:
    if kin.n_reactions != net.n_reactions:
        raise ValueError(
            f"kinetics covers {kin.n_reactions} reactions, network has {net.n_reactions}"
        )
    y = np.array([net.source_vector(k) for k in range(net.n_reactions)], dtype=np.float64)
    d = np.array(reaction_vectors(net), dtype=np.float64)
    return System(
        net=net, kin=kin,
        source_exponents=y, reaction_matrix=d,
        arrays=kin.compile(horizon),
    )


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------

def rate(k: int, x: Sequence[float], t: float, net: ReactionNetwork, kin: Kinetics) -> float:
    """kappa_k(t) * x**y_k for reaction k (reference implementation on top of
    the monomial convention; the integrator uses the compiled kernels)."""
    sys = compile_system(net, kin, horizon=max(1.0, t))
    kap = _kernels.kappa_eval(float(t), *sys.arrays.as_args())
    return float(kap[k]) * monomial(x, net.source_vector(k))


def rhs(x: Sequence[float], t: float, net: ReactionNetwork, kin: Kinetics) -> np.ndarray:
    """sum_k rate_k(x, t) (y_k' - y_k); lies in the stoichiometric subspace."""
    sys = compile_system(net, kin, horizon=max(1.0, t))
    return _rhs_system(np.asarray(x, dtype=np.float64), float(t), sys)


def _rhs_system(x: np.ndarray, t: float, sys: System) -> np.ndarray:
    return _kernels.rhs_eval(t, x, *sys.kernel_args())


def lyapunov(z: Sequence[float]) -> float:
    """V(z) = sum z_i (ln z_i - 1) + 1; zero exactly at the all-ones state."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(z <= 0):
        raise ValueError("lyapunov requires a strictly positive state")
    return float(np.sum(z * (np.log(z) - 1.0) + 1.0))


def lyapunov_gradient(z: Sequence[float]) -> np.ndarray:
    """grad V(z) = ln z."""
    z = np.asarray(z, dtype=np.float64)
    if np.any(z <= 0):
        raise ValueError("lyapunov gradient requires a strictly positive state")
    return np.log(z)


def descent(x: Sequence[float], t: float, net: ReactionNetwork, kin: Kinetics) -> float:
    """d/dt V(x(t)) along the flow: rhs(x, t) . ln x."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("descent requires a strictly positive state")
    return float(np.dot(rhs(x, t, net, kin), np.log(x)))


def descent_worst_case(x: Sequence[float], net: ReactionNetwork, kin: Kinetics) -> float:
    """Max over admissible rate constants of the descent value at x.

    The descent is linear in kappa, so the maximum is coordinatewise: the
    upper band end when a reaction's contribution is positive, the lower one
    otherwise.  Equals descent(x, .) whenever every band is degenerate.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("descent_worst_case requires a strictly positive state")
    sys = compile_system(net, kin)
    contrib = _descent_contributions(np.log(x)[None, :], sys)[0]
    lo = kin.lower_bounds()
    hi = kin.upper_bounds()
    return float(np.sum(np.where(contrib > 0, hi * contrib, lo * contrib)))


def _descent_contributions(logx: np.ndarray, sys: System) -> np.ndarray:
    """Per-reaction terms a_k = x**y_k ((y_k'-y_k) . ln x), batched over rows
    of logx (shape (S, N)) -> (S, R)."""
    mon = np.exp(logx @ sys.source_exponents.T)
    growth = logx @ sys.reaction_matrix.T
    return mon * growth


def descent_worst_case_batch(states: np.ndarray, sys: System) -> np.ndarray:
    """Vectorized worst-case descent over rows of a positive state matrix."""
    contrib = _descent_contributions(np.log(states), sys)
    lo = sys.kin.lower_bounds()
    hi = sys.kin.upper_bounds()
    return np.sum(np.where(contrib > 0, contrib * hi, contrib * lo), axis=1)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Time-stamped strictly positive states with Lyapunov annotations."""

    times: np.ndarray
    states: np.ndarray
    v1: np.ndarray
    descent: np.ndarray
    n_accepted: int = 0
    n_rejected: int = 0
    species_names: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.states)))

    def min_component(self) -> float:
        return float(np.min(self.states))

    def summary(self) -> dict:
        return {
            "schema": "crn-bound/summary/v1",
            "t_end": float(self.times[-1]),
            "n_samples": int(len(self.times)),
            "max_norm": self.sup_norm(),
            "final_state": [float(v) for v in self.final_state],
            "min_component": self.min_component(),
            "v1_max": float(np.max(self.v1)),
            "n_accepted": self.n_accepted,
            "n_rejected": self.n_rejected,
        }

    def to_csv(self, path: str) -> None:
        n = self.states.shape[1]
        header = ["t"] + [f"x{i + 1}" for i in range(n)] + ["V1", "descent"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(len(self.times)):
                writer.writerow(
                    [repr(float(self.times[i]))]
                    + [repr(float(v)) for v in self.states[i]]
                    + [repr(float(self.v1[i])), repr(float(self.descent[i]))]
                )

    def to_json_summary(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2)
            fh.write("\n")


@dataclass(frozen=True)
class IntegrateOptions:
    rtol: float = 1e-8
    atol: float = 1e-10
    grid_points: int = 201
    max_steps: int = 2_000_000
    h_initial: float | None = None

    def __post_init__(self):
        if self.rtol <= 0 or self.atol < 0:
            raise ValueError("tolerances must be positive")


def _initial_step(x0: np.ndarray, f0: np.ndarray, t_end: float, opts) -> float:
    if opts.h_initial is not None:
        return min(opts.h_initial, t_end)
    scale = opts.atol + opts.rtol * np.abs(x0)
    d0 = float(np.sqrt(np.mean((x0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return min(h, 0.1 * t_end)


def integrate(
    net: ReactionNetwork,
    kin: Kinetics,
    x0: Sequence[float],
    t_end: float,
    opts: IntegrateOptions | None = None,
) -> Trajectory:
    """Integrate the mass-action system from a strictly positive x0.

    Adaptive embedded Dormand-Prince 5(4); any step whose accepted state
    would have a non-positive component is rejected and retried at half the
    step.  The stored samples are the adaptive accept points merged with a
    uniform output grid (cubic Hermite interpolation, which preserves linear
    conservation laws exactly).
    """
    opts = opts or IntegrateOptions()
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1 or len(x0) != net.n_species:
        raise ValueError(f"x0 must have length {net.n_species}")
    if np.any(x0 <= 0) or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be strictly positive and finite")
    if t_end <= 0:
        raise ValueError("t_end must be positive")

    sys = compile_system(net, kin, horizon=t_end)
    args = sys.kernel_args()

    f0 = np.asarray(_kernels.rhs_eval(0.0, x0, *args))
    if not np.all(np.isfinite(f0)):
        raise NonFiniteState("derivative not finite at x0")
    h0 = _initial_step(x0, f0, t_end, opts)

    status, ts, xs, fs, n_acc, n_rej = _kernels.integrate_loop(
        x0, float(t_end), opts.rtol, opts.atol, h0, opts.max_steps, *args
    )
    if status != _kernels.STATUS_OK:
        partial = _assemble(ts, xs, fs, sys, opts, n_acc, n_rej) if len(ts) else None
        t_last = float(ts[-1]) if len(ts) else 0.0
        if status == _kernels.STATUS_UNDERFLOW:
            raise StepSizeUnderflow(f"step size underflow at t={t_last:.6g}", partial)
        if status == _kernels.STATUS_NONFINITE:
            raise NonFiniteState(f"derivative not finite at t={t_last:.6g}", partial)
        raise MaxStepsExceeded(
            f"exceeded {opts.max_steps} steps at t={t_last:.6g}", partial
        )
    return _assemble(ts, xs, fs, sys, opts, n_acc, n_rej)


def _hermite(t, t0, t1, x0, x1, f0, f1) -> np.ndarray:
    """Cubic Hermite interpolant; state weights sum to one, so any linear
    conservation law of the endpoints is preserved."""
    dt = t1 - t0
    s = (t - t0) / dt
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * x0 + h01 * x1 + dt * (h10 * f0 + h11 * f1)


def _assemble(ts, xs, fs, sys: System, opts, n_acc, n_rej) -> Trajectory:
    times = np.array(ts)
    states = np.array(xs)
    t_end = times[-1]
    if opts.grid_points >= 2 and len(times) >= 2 and t_end > 0:
        grid = np.linspace(0.0, t_end, opts.grid_points)
        inside = grid[(grid > 0) & (grid < t_end)]
        extra_t = []
        extra_x = []
        pos = np.searchsorted(times, inside, side="right") - 1
        for g, i in zip(inside, pos):
            if g == times[i]:
                continue
            xg = _hermite(g, times[i], times[i + 1], xs[i], xs[i + 1], fs[i], fs[i + 1])
            if np.any(xg <= 0):
                # fall back to the positive convex combination
                w = (g - times[i]) / (times[i + 1] - times[i])
                xg = (1 - w) * xs[i] + w * xs[i + 1]
            extra_t.append(g)
            extra_x.append(xg)
        if extra_t:
            times = np.concatenate([times, np.array(extra_t)])
            states = np.vstack([states, np.array(extra_x)])
            order = np.argsort(times, kind="stable")
            times = times[order]
            states = states[order]

    v1 = np.sum(states * (np.log(states) - 1.0) + 1.0, axis=1)
    logx = np.log(states)
    contrib = _descent_contributions(logx, sys)
    kap = _kernels.kappa_matrix(times, *sys.arrays.as_args())
    desc = np.sum(kap * contrib, axis=1)
    return Trajectory(
        times=times, states=states, v1=v1, descent=desc,
        n_accepted=n_acc, n_rejected=n_rej,
        species_names=sys.net.species_names,
    )
