"""Boundedness and permanence certification.

The underlying result is asymptotic: weakly reversible single-linkage-class
systems with bounded kinetics have bounded trajectories.  A finite tool can
certify the hypotheses exactly (graph structure plus kinetics bands) but can
only gather evidence for the conclusion, so verdicts here are labelled
empirical: a descent-threshold sampling campaign plus simulation trials with
the Lyapunov proof-shape inequality checked along every trajectory.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .dynamics import (
    IntegrateOptions,
    IntegrationError,
    System,
    Trajectory,
    compile_system,
    descent_worst_case_batch,
    integrate,
    lyapunov,
)
from .graph import is_weakly_reversible, linkage_classes
from .kinetics import BandedRate, ConstantRate, Kinetics, Sinusoid, Switching
from .model import ReactionNetwork, reaction_vectors, validate_network
from .tiers import NoPartitionError, tier_partition

THREADS_ENV = "CRN_BOUND_THREADS"

CONCLUSION_CERTIFIED = "CertifiedHypotheses+EmpiricallyBounded"
CONCLUSION_HYPOTHESES_FAIL = "HypothesesFail"
CONCLUSION_DESCENT_VIOLATION = "DescentViolationFound"
CONCLUSION_INCONCLUSIVE = "Inconclusive"


class DomainEmpty(ValueError):
    """No compatibility-class point satisfies the shell constraints."""


class DeltaNonPositive(ValueError):
    """Permanence check requires a strictly positive boundary margin."""


class SpecInfeasible(ValueError):
    """Random-network spec asks for the impossible."""


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _run_ordered(fn, jobs: Sequence) -> list:
    workers = _thread_count()
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# ---------------------------------------------------------------------------
# Hypotheses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisFlags:
    weakly_reversible: bool
    single_linkage_class: bool
    kinetics_bounded: bool

    @property
    def all_ok(self) -> bool:
        return self.weakly_reversible and self.single_linkage_class and self.kinetics_bounded

    def as_dict(self) -> dict:
        return {
            "weakly_reversible": self.weakly_reversible,
            "single_linkage_class": self.single_linkage_class,
            "kinetics_bounded": self.kinetics_bounded,
        }


def check_hypotheses(net: ReactionNetwork, kin: Kinetics) -> HypothesisFlags:
    wr, _ = is_weakly_reversible(net)
    return HypothesisFlags(
        weakly_reversible=wr,
        single_linkage_class=linkage_classes(net).n_classes == 1,
        kinetics_bounded=kin.is_bounded(),
    )


# ---------------------------------------------------------------------------
# Descent threshold search
# ---------------------------------------------------------------------------

DEFAULT_SHELL_GRID = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)


@dataclass
class DomainSpec:
    """Compatibility class representative, plus the boundary margin for the
    permanence variant."""

    x_ref: np.ndarray
    delta: float | None = None

    def __post_init__(self):
        self.x_ref = np.asarray(self.x_ref, dtype=np.float64)
        if np.any(self.x_ref <= 0):
            raise ValueError("class representative must be strictly positive")


@dataclass(frozen=True)
class ViolationSample:
    x: tuple[float, ...]
    value: float
    shell_m: float


@dataclass
class ThresholdResult:
    m_estimate: float | None
    violations: list[ViolationSample]  # nonempty only when no grid M passed
    samples_evaluated: int
    epsilon: float
    delta: float | None
    vacuous: bool = False  # accepted shell had no class points (bounded class)
    shells_rejected: int = 0  # smaller grid M values that showed violations


def _orthonormal_span(net: ReactionNetwork) -> np.ndarray:
    dmat = np.array(reaction_vectors(net), dtype=np.float64)
    u, s, vt = np.linalg.svd(dmat, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(1.0, s.max())))
    return vt[:rank]


def _sample_shell(
    sys: System,
    basis: np.ndarray,
    x_ref: np.ndarray,
    shell_m: float,
    n_target: int,
    rng: np.random.Generator,
    epsilon_mode: bool,
    delta: float | None,
) -> np.ndarray:
    """Sample compatibility-class points satisfying the shell constraint.

    Coordinate variant (epsilon_mode False): some x_i > M or x_i < 1/M.
    Norm variant (epsilon_mode True): all x_i >= delta and |x| > M.
    Mixes a log-uniform coordinate box projected onto the class with
    boundary-targeted and far-field rays, so both extreme regimes of the
    class get probed.
    """
    n = len(x_ref)
    s_dim = basis.shape[0]
    projector = basis.T @ basis
    out: list[np.ndarray] = []
    total = 0
    batch = max(2048, n_target // 4)
    for _ in range(80):
        if total >= n_target:
            break
        cands = []
        # (a) log-uniform coordinates, projected affinely onto the class
        z = np.exp(
            rng.uniform(math.log(1.0 / (10 * shell_m)), math.log(10 * shell_m), size=(batch, n))
        )
        cands.append(x_ref[None, :] + (z - x_ref[None, :]) @ projector)
        # (b) rays toward the positivity boundary and (c) far field
        dirs = rng.standard_normal(size=(batch, s_dim)) @ basis
        norms = np.linalg.norm(dirs, axis=1)
        keep = norms > 1e-12
        dirs = dirs[keep] / norms[keep, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(dirs < 0, x_ref[None, :] / (-dirs), np.inf)
        r_max = np.minimum(ratios.min(axis=1), 1e12)
        u = np.exp(rng.uniform(math.log(1e-9), 0.0, size=len(dirs)))
        cands.append(x_ref[None, :] + ((1.0 - u) * r_max)[:, None] * dirs)
        r_far = np.exp(
            rng.uniform(
                math.log(1e-2 * (1.0 + float(np.max(x_ref)))),
                math.log(10.0 * shell_m * math.sqrt(n) + 10.0),
                size=len(dirs),
            )
        )
        cands.append(x_ref[None, :] + r_far[:, None] * dirs)

        pts = np.vstack(cands)
        good = np.all(pts > 0, axis=1) & np.all(np.isfinite(pts), axis=1)
        pts = pts[good]
        if epsilon_mode:
            mask = np.all(pts >= delta, axis=1) & (np.linalg.norm(pts, axis=1) > shell_m)
        else:
            mask = np.any((pts > shell_m) | (pts < 1.0 / shell_m), axis=1)
        pts = pts[mask]
        if len(pts):
            out.append(pts)
            total += len(pts)
    if not out:
        return np.empty((0, n))
    return np.vstack(out)[:n_target]


def search_descent_threshold(
    net: ReactionNetwork,
    kin: Kinetics,
    domain: DomainSpec,
    epsilon: float = 0.0,
    grid: Sequence[float] = DEFAULT_SHELL_GRID,
    samples: int = 10_000,
    seed: int = 0,
) -> ThresholdResult:
    """Find the smallest grid M whose class shell shows no descent violation.

    The worst case over admissible rate constants of the descent value must
    be < -epsilon on every sampled shell point; otherwise the violating
    samples are reported.  Raises :class:`DomainEmpty` when no grid shell
    contains any class point (a bounded class under the norm variant).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    sys = compile_system(net, kin)
    basis = _orthonormal_span(net)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    epsilon_mode = domain.delta is not None
    violations: list[ViolationSample] = []
    evaluated = 0
    rejected = 0
    any_points = False
    for shell_m in grid:
        pts = _sample_shell(
            sys, basis, domain.x_ref, shell_m, samples, rng,
            epsilon_mode, domain.delta,
        )
        if len(pts) == 0:
            if any_points:
                # shells shrink as M grows: an empty shell is vacuously clean
                return ThresholdResult(
                    m_estimate=float(shell_m), violations=[],
                    samples_evaluated=evaluated, epsilon=epsilon,
                    delta=domain.delta, vacuous=True, shells_rejected=rejected,
                )
            continue
        any_points = True
        vals = descent_worst_case_batch(pts, sys)
        evaluated += len(pts)
        bad = np.nonzero(vals >= -epsilon)[0]
        if len(bad) == 0:
            # violations at smaller M are expected; this M certifies the shell
            return ThresholdResult(
                m_estimate=float(shell_m), violations=[],
                samples_evaluated=evaluated, epsilon=epsilon, delta=domain.delta,
                shells_rejected=rejected,
            )
        rejected += 1
        for i in bad[:5]:
            violations.append(
                ViolationSample(
                    x=tuple(float(v) for v in pts[i]),
                    value=float(vals[i]),
                    shell_m=float(shell_m),
                )
            )
    if not any_points:
        raise DomainEmpty("no compatibility-class point satisfies the shell constraints")
    return ThresholdResult(
        m_estimate=None, violations=violations, samples_evaluated=evaluated,
        epsilon=epsilon, delta=domain.delta, shells_rejected=rejected,
    )


# ---------------------------------------------------------------------------
# Boundedness certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialSpec:
    trials: int = 3
    x0_min: float = 0.01
    x0_max: float = 1000.0
    horizon: float = 50.0
    seed: int = 0
    rtol: float = 1e-8
    atol: float = 1e-10
    grid_points: int = 201
    max_steps: int = 800_000
    samples_per_shell: int = 10_000
    shell_grid: tuple[float, ...] = DEFAULT_SHELL_GRID
    proof_shape_tol: float = 1e-3
    no_union_sequences: int = 0
    settle_magnitude: float = 2.0  # magnitude cap for the first (settling) trial


@dataclass
class TrialResult:
    x0: tuple[float, ...]
    sup_norm_observed: float
    v1_max: float
    bounded_verdict: bool | None  # None: window too short to judge
    proof_shape_ok: bool | None
    horizon_reached: float = 0.0
    error: str | None = None

    def as_dict(self) -> dict:
        def fin(v: float):
            return v if math.isfinite(v) else None

        return {
            "x0": list(self.x0),
            "sup_norm_observed": fin(self.sup_norm_observed),
            "v1_max": fin(self.v1_max),
            "bounded_verdict": self.bounded_verdict,
            "proof_shape_ok": self.proof_shape_ok,
            "horizon_reached": self.horizon_reached,
            "error": self.error,
        }


@dataclass
class CertificateReport:
    hypotheses: HypothesisFlags
    m_estimate: float | None
    epsilon_margin: float | None
    descent_violations: list[ViolationSample]
    trials: list[TrialResult]
    conclusion: str
    proof_shape_bound: float | None = None
    no_union_counterexamples: list[dict] = field(default_factory=list)
    seed: int = 0
    network_summary: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "schema": "crn-bound/report/v1",
            "network": self.network_summary,
            "seed": self.seed,
            "hypotheses": self.hypotheses.as_dict(),
            "m_estimate": self.m_estimate,
            "epsilon_margin": self.epsilon_margin,
            "proof_shape_bound": self.proof_shape_bound,
            "descent_violations": [
                {"x": list(v.x), "value": v.value, "shell_m": v.shell_m}
                for v in self.descent_violations
            ],
            "simulation_evidence": [t.as_dict() for t in self.trials],
            "no_union_counterexamples": self.no_union_counterexamples,
            "conclusion": self.conclusion,
        }


def _network_summary(net: ReactionNetwork) -> dict:
    names = net.species_names
    return {
        "species": list(names),
        "n_complexes": net.n_complexes,
        "reactions": [
            f"{net.complexes[r.source].format(names)} -> {net.complexes[r.product].format(names)}"
            for r in net.reactions
        ],
    }


def v1_sphere_sup(radius: float, n: int) -> float:
    """Exact supremum of the Lyapunov function on the sphere |x| = radius
    intersected with the closed positive orthant.

    Critical configurations put equal mass on k coordinates and send the
    rest to zero (each vanished coordinate contributes its limit value 1).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    best = -math.inf
    for k in range(1, n + 1):
        z = radius / math.sqrt(k)
        best = max(best, k * (z * (math.log(z) - 1.0) + 1.0) + (n - k))
    return best


def _bounded_verdict(traj: Trajectory) -> bool:
    """Scale-free heuristic: sup-norm in the second half of the horizon must
    stay below 10x the running maximum attained in the first half."""
    half = traj.times[-1] / 2.0
    norms = np.max(np.abs(traj.states), axis=1)
    first = norms[traj.times <= half]
    second = norms[traj.times > half]
    if len(second) == 0:
        return True
    return bool(np.max(second) < 10.0 * np.max(first))


def _x0_for_trial(spec: TrialSpec, n: int, trial_seed, settle: bool = False) -> np.ndarray:
    """Initial state with |x0| drawn log-uniformly up to the magnitude cap
    and a mild per-coordinate spread (within a decade).

    The settling trial stays at order-one magnitude so every network gets at
    least one trial the explicit integrator can carry to the horizon; later
    trials range up to x0_max. High-degree mass-action systems far from
    equilibrium develop quasi-equilibrium flux plateaus whose fast modes an
    explicit method must resolve, so wild trials may exhaust their step
    budget; they then contribute window evidence instead of a verdict.
    """
    rng = np.random.default_rng(trial_seed)
    if settle:
        lo = min(0.5, spec.x0_max)
        hi = min(spec.settle_magnitude, spec.x0_max)
    else:
        lo, hi = spec.x0_min, spec.x0_max
    magnitude = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    spread = np.exp(rng.uniform(math.log(0.3), math.log(3.0), size=n))
    x0 = magnitude * spread
    return x0 * (magnitude / max(float(np.max(x0)), 1e-300))


def certify_boundedness(
    net: ReactionNetwork, kin: Kinetics, trial_spec: TrialSpec | None = None
) -> CertificateReport:
    """Hypothesis check, descent-threshold search on each trial's
    compatibility class, and simulation trials with the Lyapunov
    proof-shape inequality V(x(t)) <= max(V(x0), B)."""
    spec = trial_spec or TrialSpec()
    flags = check_hypotheses(net, kin)
    n = net.n_species
    ss = np.random.SeedSequence(spec.seed)
    trial_seeds = ss.spawn(spec.trials)
    shell_seeds = np.random.SeedSequence(spec.seed + 1).generate_state(max(1, spec.trials))

    x0s = [
        _x0_for_trial(spec, n, sd, settle=(i == 0))
        for i, sd in enumerate(trial_seeds)
    ]

    m_estimate: float | None = None
    violations: list[ViolationSample] = []
    for i, x0 in enumerate(x0s):
        try:
            res = search_descent_threshold(
                net, kin, DomainSpec(x_ref=x0), epsilon=0.0,
                grid=spec.shell_grid, samples=spec.samples_per_shell,
                seed=int(shell_seeds[i]),
            )
        except DomainEmpty:
            m_estimate = None
            break
        violations.extend(res.violations)
        if res.m_estimate is not None:
            m_estimate = res.m_estimate if m_estimate is None else max(m_estimate, res.m_estimate)
        else:
            m_estimate = None
            break

    bound = None
    if m_estimate is not None:
        bound = v1_sphere_sup(m_estimate * math.sqrt(n), n)

    opts = IntegrateOptions(
        rtol=spec.rtol, atol=spec.atol,
        grid_points=spec.grid_points, max_steps=spec.max_steps,
    )

    def run_trial(x0: np.ndarray) -> TrialResult:
        error = None
        try:
            traj = integrate(net, kin, x0, spec.horizon, opts)
        except IntegrationError as exc:
            traj = exc.partial
            error = f"{type(exc).__name__}: {exc}"
        if traj is None or len(traj) == 0:
            return TrialResult(
                x0=tuple(float(v) for v in x0),
                sup_norm_observed=float("nan"), v1_max=float("nan"),
                bounded_verdict=None, proof_shape_ok=None,
                horizon_reached=0.0, error=error,
            )
        reached = float(traj.times[-1])
        proof_ok = None
        if bound is not None:
            cap = max(lyapunov(x0), bound) + spec.proof_shape_tol
            proof_ok = bool(np.all(traj.v1 <= cap))
        if error is None:
            verdict = _bounded_verdict(traj)
        elif reached >= 0.5 * spec.horizon:
            # stall deep into the horizon: judge the computed window
            verdict = _bounded_verdict(traj)
        else:
            verdict = None
        return TrialResult(
            x0=tuple(float(v) for v in x0),
            sup_norm_observed=traj.sup_norm(),
            v1_max=float(np.max(traj.v1)),
            bounded_verdict=verdict,
            proof_shape_ok=proof_ok,
            horizon_reached=reached,
            error=error,
        )

    trials = _run_ordered(run_trial, x0s)

    no_union: list[dict] = []
    if spec.no_union_sequences > 0 and flags.all_ok:
        no_union = check_no_union(
            net, x0s[0], n_sequences=spec.no_union_sequences, seed=spec.seed + 2
        )

    if not flags.all_ok:
        conclusion = CONCLUSION_HYPOTHESES_FAIL
    elif violations:
        conclusion = CONCLUSION_DESCENT_VIOLATION
    elif (
        m_estimate is not None
        and any(t.bounded_verdict is True for t in trials)
        and not any(t.bounded_verdict is False for t in trials)
        and not any(t.proof_shape_ok is False for t in trials)
        and not no_union
    ):
        conclusion = CONCLUSION_CERTIFIED
    else:
        conclusion = CONCLUSION_INCONCLUSIVE

    return CertificateReport(
        hypotheses=flags,
        m_estimate=m_estimate,
        epsilon_margin=None,
        descent_violations=violations,
        trials=trials,
        conclusion=conclusion,
        proof_shape_bound=bound,
        no_union_counterexamples=no_union,
        seed=spec.seed,
        network_summary=_network_summary(net),
    )


# ---------------------------------------------------------------------------
# Permanence
# ---------------------------------------------------------------------------

@dataclass
class PermanenceReport:
    hypotheses: HypothesisFlags
    delta: float
    epsilon: float
    m_estimate: float | None
    threshold_vacuous: bool
    rho_hat: float | None
    rho_per_trial: list[float]
    premise_ok: bool
    trials: list[TrialResult]
    conclusion: str
    seed: int = 0
    note: str = (
        "the threshold M depends on delta; permanence is conditional on the "
        "assumed uniform liminf > delta over the class"
    )

    def as_dict(self) -> dict:
        return {
            "schema": "crn-bound/permanence/v1",
            "hypotheses": self.hypotheses.as_dict(),
            "delta": self.delta,
            "epsilon_margin": self.epsilon,
            "m_estimate": self.m_estimate,
            "threshold_vacuous": self.threshold_vacuous,
            "rho_hat": self.rho_hat,
            "rho_per_trial": self.rho_per_trial,
            "premise_ok": self.premise_ok,
            "simulation_evidence": [t.as_dict() for t in self.trials],
            "conclusion": self.conclusion,
            "note": self.note,
            "seed": self.seed,
        }


def check_permanence(
    net: ReactionNetwork,
    kin: Kinetics,
    delta: float,
    trial_spec: TrialSpec | None = None,
    epsilon: float = 1e-3,
) -> PermanenceReport:
    """Permanence evidence on the delta-interior of the compatibility class:
    epsilon-margin descent threshold plus empirical tail bounds rho.

    delta is a user input; the conclusion is conditional on trajectories
    eventually staying above delta (checked empirically per trial).
    """
    if delta <= 0:
        raise DeltaNonPositive(f"delta must be positive, got {delta}")
    spec = trial_spec or TrialSpec()
    flags = check_hypotheses(net, kin)
    n = net.n_species
    trial_seeds = np.random.SeedSequence(spec.seed).spawn(spec.trials)
    x0s = [
        _x0_for_trial(spec, n, sd, settle=(i == 0))
        for i, sd in enumerate(trial_seeds)
    ]

    m_estimate = None
    vacuous = False
    if flags.all_ok:
        try:
            res = search_descent_threshold(
                net, kin, DomainSpec(x_ref=x0s[0], delta=delta), epsilon=epsilon,
                grid=spec.shell_grid, samples=spec.samples_per_shell, seed=spec.seed + 1,
            )
            m_estimate = res.m_estimate
            vacuous = res.vacuous
        except DomainEmpty:
            # the delta-interior of the class is bounded: the norm condition
            # is vacuous for every grid M
            vacuous = True

    opts = IntegrateOptions(
        rtol=spec.rtol, atol=spec.atol,
        grid_points=spec.grid_points, max_steps=spec.max_steps,
    )
    trials: list[TrialResult] = []
    rho_per_trial: list[float] = []
    premise_ok = True
    for x0 in x0s:
        try:
            traj = integrate(net, kin, x0, spec.horizon, opts)
        except IntegrationError as exc:
            trials.append(
                TrialResult(
                    x0=tuple(float(v) for v in x0),
                    sup_norm_observed=float("nan"), v1_max=float("nan"),
                    bounded_verdict=False, proof_shape_ok=None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            premise_ok = False
            continue
        tail = traj.states[traj.times > traj.times[-1] / 2.0]
        tail_min = float(np.min(tail))
        tail_max = float(np.max(tail))
        rho = min(tail_min, 1.0 / tail_max)
        rho_per_trial.append(rho)
        if tail_min < delta:
            premise_ok = False
        trials.append(
            TrialResult(
                x0=tuple(float(v) for v in x0),
                sup_norm_observed=traj.sup_norm(),
                v1_max=float(np.max(traj.v1)),
                bounded_verdict=_bounded_verdict(traj),
                proof_shape_ok=None,
                horizon_reached=float(traj.times[-1]),
            )
        )

    rho_hat = min(rho_per_trial) if rho_per_trial and len(rho_per_trial) == len(x0s) else None

    if not flags.all_ok:
        conclusion = CONCLUSION_HYPOTHESES_FAIL
    elif (
        premise_ok
        and rho_hat is not None
        and rho_hat > 0
        and (m_estimate is not None or vacuous)
    ):
        conclusion = CONCLUSION_CERTIFIED
    else:
        # includes trials whose tails dip below delta: the corollary's
        # uniform-liminf premise failed empirically at this delta
        conclusion = CONCLUSION_INCONCLUSIVE

    return PermanenceReport(
        hypotheses=flags, delta=delta, epsilon=epsilon,
        m_estimate=m_estimate, threshold_vacuous=vacuous,
        rho_hat=rho_hat, rho_per_trial=rho_per_trial,
        premise_ok=premise_ok, trials=trials,
        conclusion=conclusion, seed=spec.seed,
    )


# ---------------------------------------------------------------------------
# Random network generation and campaigns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkSpec:
    n_species: int
    num_complexes: int
    max_coeff: int = 3
    extra_edges: int = 0
    seed: int = 0
    kinetics: str = "constant"  # "constant" | "banded"
    rate_range: tuple[float, float] = (0.5, 2.0)


def generate_random_network(spec: NetworkSpec) -> tuple[ReactionNetwork, Kinetics]:
    """Seeded random network that is weakly reversible with a single linkage
    class by construction: distinct complexes joined in one directed cycle,
    plus optional chord reactions."""
    if spec.n_species < 1 or spec.num_complexes < 2:
        raise SpecInfeasible("need n_species >= 1 and num_complexes >= 2")
    space = (spec.max_coeff + 1) ** spec.n_species
    if spec.num_complexes > space:
        raise SpecInfeasible(
            f"only {space} distinct complexes exist with entries <= {spec.max_coeff}"
        )
    if spec.kinetics not in ("constant", "banded"):
        raise SpecInfeasible(f"unknown kinetics mode {spec.kinetics!r}")
    rng = np.random.default_rng(spec.seed)

    complexes = None
    for _ in range(500):
        cand = rng.integers(0, spec.max_coeff + 1, size=(spec.num_complexes, spec.n_species))
        rows = {tuple(int(v) for v in row) for row in cand}
        if len(rows) < spec.num_complexes:
            continue
        cand_rows = [tuple(int(v) for v in row) for row in cand]
        if all(any(row[i] >= 1 for row in cand_rows) for i in range(spec.n_species)):
            complexes = cand_rows
            break
    if complexes is None:
        raise SpecInfeasible("could not sample distinct complexes covering every species")

    order = rng.permutation(spec.num_complexes)
    edges = [(int(order[i]), int(order[(i + 1) % spec.num_complexes])) for i in range(spec.num_complexes)]
    edge_set = set(edges)
    chords = [
        (a, b)
        for a in range(spec.num_complexes)
        for b in range(spec.num_complexes)
        if a != b and (a, b) not in edge_set
    ]
    n_extra = min(spec.extra_edges, len(chords))
    if n_extra:
        picks = rng.choice(len(chords), size=n_extra, replace=False)
        edges.extend(chords[int(i)] for i in picks)

    net = validate_network([f"S{i + 1}" for i in range(spec.n_species)], complexes, edges)

    lo, hi = spec.rate_range
    rates = []
    for k in range(len(edges)):
        if spec.kinetics == "constant":
            rates.append(ConstantRate(float(np.exp(rng.uniform(math.log(lo), math.log(hi))))))
        else:
            a, b = np.sort(np.exp(rng.uniform(math.log(lo), math.log(hi), size=2)))
            if rng.integers(0, 2) == 0:
                profile = Sinusoid(
                    freq=float(rng.uniform(0.5, 2.0)),
                    phase=float(rng.uniform(0.0, 2.0 * math.pi)),
                )
            else:
                profile = Switching(
                    dwell=float(rng.uniform(0.5, 2.0)),
                    seed=int(rng.integers(0, 2**31)),
                )
            rates.append(BandedRate(float(a), float(b), profile))
    return net, Kinetics(tuple(rates))


def check_no_union(
    net: ReactionNetwork,
    x_ref: Sequence[float],
    n_sequences: int = 20,
    seed: int = 0,
    n_max: int = 40,
    constant: float = 2.0,
) -> list[dict]:
    """Structural lemma sweep: along class-constrained divergent sequences
    the top tier must never be all of the complexes (single linkage class).

    Sequences are power-law paths inside the compatibility class of x_ref:
    either decaying onto a boundary point of the class or growing along a
    non-negative class direction.  Returns the counterexamples found
    (expected empty); sequences that fail to partition are skipped.
    """
    x_ref = np.asarray(x_ref, dtype=np.float64)
    basis = _orthonormal_span(net)
    complexes = [c.coefficients for c in net.complexes]
    rng = np.random.default_rng(seed)
    ns = np.arange(1, n_max + 1, dtype=np.float64)
    found: list[dict] = []
    for _ in range(n_sequences):
        d = rng.standard_normal(basis.shape[0]) @ basis
        norm = np.linalg.norm(d)
        if norm < 1e-12:
            continue
        d = d / norm
        gamma = float(rng.choice([1.0, 2.0]))
        if np.all(d >= -1e-14):
            # unbounded class direction: grow along it
            pts = x_ref[None, :] + (ns**gamma - 1.0)[:, None] * d[None, :]
        else:
            with np.errstate(divide="ignore"):
                ratios = np.where(d < 0, x_ref / (-d), np.inf)
            r_max = float(np.min(ratios))
            x_bnd = x_ref + r_max * d
            x_bnd[x_bnd < 0] = 0.0
            pts = x_bnd[None, :] + (ns**-gamma)[:, None] * (x_ref - x_bnd)[None, :]
        if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
            continue
        spread = np.max(pts[-1] / pts[0])
        shrink = np.min(pts[-1] / pts[0])
        if spread < 2e2 and shrink > 5e-3:
            continue  # no coordinate diverges far enough to count
        try:
            part = tier_partition(pts, complexes, constant)
        except NoPartitionError:
            continue
        if part.top_is_everything():
            found.append(
                {
                    "first_point": [float(v) for v in pts[0]],
                    "last_point": [float(v) for v in pts[-1]],
                    "tiers": [list(t) for t in part.tiers],
                }
            )
    return found


@dataclass
class CampaignResult:
    count: int
    reports: list[CertificateReport]
    spec: NetworkSpec
    seed: int

    def aggregate(self) -> dict:
        conclusions: dict[str, int] = {}
        sup_norms: list[float] = []
        for rep in self.reports:
            conclusions[rep.conclusion] = conclusions.get(rep.conclusion, 0) + 1
            for t in rep.trials:
                if t.error is None:
                    sup_norms.append(t.sup_norm_observed)
        agg: dict = {
            "networks": self.count,
            "conclusions": dict(sorted(conclusions.items())),
            "bounded_trials": sum(
                1 for rep in self.reports for t in rep.trials if t.bounded_verdict
            ),
            "total_trials": sum(len(rep.trials) for rep in self.reports),
        }
        if sup_norms:
            arr = np.sort(np.array(sup_norms))
            agg["sup_norm"] = {
                "min": float(arr[0]),
                "median": float(arr[len(arr) // 2]),
                "max": float(arr[-1]),
            }
        return agg

    def as_dict(self) -> dict:
        return {
            "schema": "crn-bound/campaign/v1",
            "seed": self.seed,
            "spec": {
                "n_species": self.spec.n_species,
                "num_complexes": self.spec.num_complexes,
                "max_coeff": self.spec.max_coeff,
                "extra_edges": self.spec.extra_edges,
                "kinetics": self.spec.kinetics,
                "rate_range": list(self.spec.rate_range),
            },
            "aggregate": self.aggregate(),
            "reports": [rep.as_dict() for rep in self.reports],
        }


def run_campaign(
    spec: NetworkSpec,
    count: int,
    seed: int = 0,
    trial_spec: TrialSpec | None = None,
) -> CampaignResult:
    """Certify `count` seeded random networks drawn from the spec."""
    base_trial = trial_spec or TrialSpec()
    if count < 0:
        raise ValueError("count must be non-negative")
    net_seeds = np.random.SeedSequence(seed).generate_state(max(1, 2 * count))

    def one(i: int) -> CertificateReport:
        net, kin = generate_random_network(replace(spec, seed=int(net_seeds[2 * i])))
        return certify_boundedness(
            net, kin, replace(base_trial, seed=int(net_seeds[2 * i + 1]))
        )

    reports = _run_ordered(one, list(range(count)))
    return CampaignResult(count=count, reports=reports, spec=spec, seed=seed)
