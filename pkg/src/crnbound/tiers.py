"""Tier partitioning of complexes along finite point sequences.

The underlying definitions are asymptotic (behaviour as n goes to infinity);
this module uses a deterministic finite-data surrogate, flagged as such in
results: comparability is tested on a tail window (default: the last half of
the sequence) and divergence is tested by monotone growth of the pairwise
log-ratio plus exceeding ln C at the final sample.  On exact power-law
sequences the surrogate recovers the asymptotic partition exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .certificates import (
    CombinationCert,
    ConservationRelation,
    SignPattern,
    respecting_relation,
)

LIMIT_ZERO = "zero"
LIMIT_INF = "inf"
LIMIT_BOUNDED = "bounded"

_MONOTONE_SLACK = 1e-9
_SHARE_SLACK = 1e-12


class NonPositivePoint(ValueError):
    """Sequence points must be strictly positive in every coordinate."""


class BadConstant(ValueError):
    """Comparability constant must satisfy C > 1."""


class InsufficientData(ValueError):
    """Too few usable points to say anything."""


class PreconditionUnmet(ValueError):
    """Theorem-check hypotheses not met by the supplied sequence."""


class NoPartitionError(ValueError):
    """The sequence does not partition the complexes under the finite
    surrogate (sharing not transitive, or tiers not separated)."""


@dataclass(frozen=True)
class TierPartition:
    """Ordered tiers (highest monomial growth first) plus the constant C."""

    tiers: tuple[tuple[int, ...], ...]
    constant: float

    @property
    def n_tiers(self) -> int:
        return len(self.tiers)

    def tier_of(self, complex_index: int) -> int:
        for rank, tier in enumerate(self.tiers):
            if complex_index in tier:
                return rank
        raise KeyError(complex_index)

    def top_is_everything(self) -> bool:
        return self.n_tiers == 1


@dataclass
class PointSequence:
    """Finite sequence of strictly positive state vectors.

    ``limits`` classifies each coordinate as 'zero' | 'inf' | 'bounded'.
    Synthetic sequences declare it; for empirical data use
    :func:`classify_limits`.
    """

    points: np.ndarray
    limits: tuple[str, ...] | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError("points must be a (length, dimension) array")
        if np.any(self.points <= 0) or not np.all(np.isfinite(self.points)):
            raise NonPositivePoint("all coordinates must be strictly positive")
        if self.limits is not None:
            self.limits = tuple(self.limits)
            if len(self.limits) != self.points.shape[1]:
                raise ValueError("one limit classification per coordinate")
            bad = [l for l in self.limits if l not in (LIMIT_ZERO, LIMIT_INF, LIMIT_BOUNDED)]
            if bad:
                raise ValueError(f"unknown limit classifications {bad}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def effective_limits(self) -> tuple[str, ...]:
        return self.limits if self.limits is not None else classify_limits(self.points)

    def subsequence(self, indices: Sequence[int]) -> "PointSequence":
        return PointSequence(self.points[np.asarray(indices, dtype=int)], self.limits)

    @classmethod
    def powerlaw(
        cls, exponents: Sequence[float], n_max: int, scale: Sequence[float] | None = None
    ) -> "PointSequence":
        """x_n = scale_i * n**alpha_i for n = 1..n_max, with limits declared
        from the signs of the exponents."""
        alphas = np.asarray(exponents, dtype=np.float64)
        ns = np.arange(1, n_max + 1, dtype=np.float64)
        pts = ns[:, None] ** alphas[None, :]
        if scale is not None:
            pts = pts * np.asarray(scale, dtype=np.float64)[None, :]
        limits = tuple(
            LIMIT_ZERO if a < 0 else LIMIT_INF if a > 0 else LIMIT_BOUNDED
            for a in alphas
        )
        return cls(pts, limits)

    @classmethod
    def from_json(cls, spec: str | dict) -> "PointSequence":
        """Synthetic sequence spec: {"type": "powerlaw", "exponents": [...],
        "n_max": ..., "scale": [...]?}."""
        data = json.loads(spec) if isinstance(spec, str) else spec
        if data.get("type") != "powerlaw":
            raise ValueError(f"unknown sequence type {data.get('type')!r}")
        return cls.powerlaw(data["exponents"], int(data["n_max"]), data.get("scale"))


def classify_limits(points: np.ndarray) -> tuple[str, ...]:
    """Heuristic limit classification for empirical sequences: compares
    geometric means of the first and last quarters."""
    pts = np.asarray(points, dtype=np.float64)
    length = len(pts)
    q = max(1, length // 4)
    head = np.exp(np.mean(np.log(pts[:q]), axis=0))
    tail = np.exp(np.mean(np.log(pts[-q:]), axis=0))
    out = []
    for h, t in zip(head, tail):
        if t < h / 32 and t < 0.25:
            out.append(LIMIT_ZERO)
        elif t > 32 * h and t > 4.0:
            out.append(LIMIT_INF)
        else:
            out.append(LIMIT_BOUNDED)
    return tuple(out)


def _as_points(seq) -> np.ndarray:
    if isinstance(seq, PointSequence):
        return seq.points
    pts = np.asarray(seq, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("expected a (length, dimension) array of points")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise NonPositivePoint("all coordinates must be strictly positive")
    return pts


def _log_monomials(points: np.ndarray, complexes) -> np.ndarray:
    ymat = np.asarray(complexes, dtype=np.float64)
    if ymat.ndim != 2 or ymat.shape[1] != points.shape[1]:
        raise ValueError("complexes must be vectors matching the point dimension")
    return np.log(points) @ ymat.T


def tier_partition(seq, complexes, constant: float = 2.0) -> TierPartition:
    """Partition the complexes along the sequence with comparability constant
    ``constant``.

    Two complexes share a tier iff their log-monomial gap stays within
    ln(constant) on the tail window; distinct tiers must have monotonically
    growing gaps exceeding ln(constant) at the last sample, else
    :class:`NoPartitionError` is raised.
    """
    points = _as_points(seq)
    if len(points) < 2:
        raise InsufficientData("need at least two points")
    if not constant > 1.0:
        raise BadConstant(f"constant must exceed 1, got {constant}")
    logm = _log_monomials(points, complexes)
    n_cx = logm.shape[1]
    win = logm[len(points) // 2:]
    lnc = math.log(constant)

    parent = list(range(n_cx))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def shares(j: int, k: int) -> bool:
        gap = np.abs(win[:, j] - win[:, k])
        return bool(np.max(gap) <= lnc + _SHARE_SLACK)

    share = {}
    for j, k in combinations(range(n_cx), 2):
        share[(j, k)] = shares(j, k)
        if share[(j, k)]:
            parent[find(j)] = find(k)

    groups: dict[int, list[int]] = {}
    for j in range(n_cx):
        groups.setdefault(find(j), []).append(j)
    comps = [tuple(sorted(g)) for g in groups.values()]

    for comp in comps:
        for j, k in combinations(comp, 2):
            if not share[(j, k)]:
                raise NoPartitionError(
                    f"sharing is not transitive on the window: complexes {j}, {k}"
                )

    # order tiers by log-monomial at the final sample, highest first
    comps.sort(key=lambda c: -logm[-1, c[0]])

    for hi_tier, lo_tier in combinations(comps, 2):
        for j in hi_tier:
            for k in lo_tier:
                gap = win[:, j] - win[:, k]
                if gap[-1] <= lnc:
                    raise NoPartitionError(
                        f"complexes {j}, {k} neither share a tier nor separate"
                    )
                if np.any(np.diff(gap) < -_MONOTONE_SLACK * np.maximum(1.0, np.abs(gap[:-1]))):
                    raise NoPartitionError(
                        f"gap between complexes {j}, {k} is not monotone on the window"
                    )
                # divergence, not just a constant ratio above the band: the
                # gap must show net growth over the whole sequence
                full = logm[:, j] - logm[:, k]
                if full[-1] - full[0] <= _MONOTONE_SLACK * max(1.0, abs(full[-1])):
                    raise NoPartitionError(
                        f"ratio of complexes {j}, {k} exceeds the constant but "
                        "does not grow along the sequence"
                    )

    return TierPartition(tiers=tuple(comps), constant=float(constant))


# ---------------------------------------------------------------------------
# Subsequence extraction
# ---------------------------------------------------------------------------

def _longest_monotone_run(r: np.ndarray, idx: list[int], lnc: float, sign: int) -> list[int]:
    """Longest strictly monotone subsequence of r (over positions in idx)
    whose final value clears sign*lnc; empty when none does."""
    vals = [sign * r[i] for i in idx]
    m = len(vals)
    best_len = [1] * m
    prev = [-1] * m
    for i in range(m):
        for j in range(i):
            if vals[j] < vals[i] and best_len[j] + 1 > best_len[i]:
                best_len[i] = best_len[j] + 1
                prev[i] = j
    ends = [i for i in range(m) if vals[i] > lnc]
    if not ends:
        return []
    end = max(ends, key=lambda i: (best_len[i], -i))
    chain = []
    while end != -1:
        chain.append(idx[end])
        end = prev[end]
    return chain[::-1]


def partition_subsequence(seq, complexes, constant: float = 2.0):
    """Greedily select a subsequence along which the complexes partition.

    Every complex pair's log-ratio is made either confined to
    [-ln C, ln C] or strictly monotone past ln C; returns the selected
    indices and the induced partition.  Always succeeds when pairwise
    log-ratios are eventually monotone.
    """
    points = _as_points(seq)
    if len(points) < 2:
        raise InsufficientData("need at least two points")
    if not constant > 1.0:
        raise BadConstant(f"constant must exceed 1, got {constant}")
    logm = _log_monomials(points, complexes)
    n_cx = logm.shape[1]
    lnc = math.log(constant)
    idx = list(range(len(points)))
    pairs = list(combinations(range(n_cx), 2))

    def pair_ok(j: int, k: int, cur: list[int]) -> bool:
        r = logm[cur, j] - logm[cur, k]
        if np.max(np.abs(r)) <= lnc + _SHARE_SLACK:
            return True
        diffs = np.diff(r)
        if np.all(diffs > 0) and r[-1] > lnc:
            return True
        if np.all(diffs < 0) and -r[-1] > lnc:
            return True
        return False

    def thin(j: int, k: int, cur: list[int]) -> list[int]:
        r = logm[:, j] - logm[:, k]
        up = _longest_monotone_run(r, cur, lnc, +1)
        if len(up) >= 2:
            return up
        down = _longest_monotone_run(r, cur, lnc, -1)
        if len(down) >= 2:
            return down
        confined = [i for i in cur if abs(r[i]) <= lnc + _SHARE_SLACK]
        return confined

    for _ in range(len(points) * max(1, len(pairs))):
        failing = next((p for p in pairs if not pair_ok(*p, idx)), None)
        if failing is None:
            break
        idx = thin(*failing, idx)
        if len(idx) < 2:
            raise InsufficientData(
                f"fewer than two points remain after thinning pair {failing}"
            )
    else:  # pragma: no cover - loop budget generous
        raise NoPartitionError("subsequence thinning did not converge")

    indices = np.array(idx, dtype=int)
    part = tier_partition(points[indices], complexes, constant)
    return indices, part


def partially_monotonic_subsequence(seq: PointSequence) -> np.ndarray:
    """Longest greedy subsequence that is non-increasing in every
    coordinate tending to zero and non-decreasing in every coordinate
    tending to infinity; bounded coordinates are unconstrained."""
    points = _as_points(seq)
    limits = (
        seq.effective_limits()
        if isinstance(seq, PointSequence)
        else classify_limits(points)
    )
    dec = [i for i, l in enumerate(limits) if l == LIMIT_ZERO]
    inc = [i for i, l in enumerate(limits) if l == LIMIT_INF]
    length = len(points)
    if length < 2:
        raise InsufficientData("need at least two points")
    if not dec and not inc:
        return np.arange(length)

    def admissible(a: int, b: int) -> bool:
        return all(points[b, i] <= points[a, i] for i in dec) and all(
            points[b, j] >= points[a, j] for j in inc
        )

    best: list[int] = []
    for start in range(length):
        chain = [start]
        for nxt in range(start + 1, length):
            if admissible(chain[-1], nxt):
                chain.append(nxt)
        if len(chain) > len(best):
            best = chain
    if len(best) < 2:
        raise InsufficientData("no partially monotonic subsequence of length 2")
    return np.array(best, dtype=int)


# ---------------------------------------------------------------------------
# Conservation theorem check
# ---------------------------------------------------------------------------

@dataclass
class TheoremCheckResult:
    """Outcome of the respecting-relation existence check.

    ``verified`` means an orthogonal relation with the predicted sign
    pattern was found; a combination certificate instead would contradict
    the underlying theorem and is surfaced for investigation.
    """

    verified: bool
    relation: ConservationRelation | None
    certificate: CombinationCert | None
    partition: TierPartition
    pattern: SignPattern
    note: str = (
        "finite-data surrogate: tier comparability and divergence judged on "
        "a tail window, not an infinite sequence"
    )


def theorem_conservation_check(
    seq: PointSequence, complexes, constant: float = 2.0
) -> TheoremCheckResult:
    """Check that a conservation relation respecting (U, V, tiers) exists,
    with U/V read from the declared coordinate limits.

    Preconditions (PreconditionUnmet otherwise): declared limits with at
    least one divergent coordinate, and points partially monotonic in the
    declared sense.
    """
    if not isinstance(seq, PointSequence) or seq.limits is None:
        raise PreconditionUnmet("a PointSequence with declared limits is required")
    limits = seq.limits
    u_set = frozenset(i for i, l in enumerate(limits) if l == LIMIT_ZERO)
    v_set = frozenset(i for i, l in enumerate(limits) if l == LIMIT_INF)
    if not u_set and not v_set:
        raise PreconditionUnmet("no coordinate tends to zero or infinity")
    pts = seq.points
    for i in u_set:
        if np.any(np.diff(pts[:, i]) > 0):
            raise PreconditionUnmet(f"coordinate {i} tends to 0 but is not non-increasing")
    for j in v_set:
        if np.any(np.diff(pts[:, j]) < 0):
            raise PreconditionUnmet(f"coordinate {j} tends to inf but is not non-decreasing")

    partition = tier_partition(seq, complexes, constant)
    pattern = SignPattern(u_set, v_set)
    outcome = respecting_relation(complexes, partition.tiers, pattern)
    if isinstance(outcome, ConservationRelation):
        return TheoremCheckResult(
            verified=True, relation=outcome, certificate=None,
            partition=partition, pattern=pattern,
        )
    return TheoremCheckResult(
        verified=False, relation=None, certificate=outcome,
        partition=partition, pattern=pattern,
    )
