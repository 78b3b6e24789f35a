import math

import numpy as np
import pytest

from crnbound.certificates import SignPattern, verify_respecting
from crnbound.tiers import (
    BadConstant,
    InsufficientData,
    NoPartitionError,
    PointSequence,
    PreconditionUnmet,
    classify_limits,
    partially_monotonic_subsequence,
    partition_subsequence,
    theorem_conservation_check,
    tier_partition,
)


def analytic_tiers(complexes, alphas):
    """Oracle: rank complexes by the growth exponent y . alpha of their
    monomials along x_n = n**alpha."""
    keys = [float(np.dot(c, alphas)) for c in complexes]
    order = sorted(set(keys), reverse=True)
    return tuple(
        tuple(i for i, k in enumerate(keys) if k == level) for level in order
    )


class TestTierPartition:
    def test_three_tier_example(self):
        # monomials n, 1/n, 1 rank as (1,0) > (1,1) > (0,1)
        seq = PointSequence.powerlaw([1.0, -1.0], 100)
        part = tier_partition(seq, [(1, 0), (0, 1), (1, 1)], 2.0)
        assert part.tiers == ((0,), (2,), (1,))

    def test_single_complex_single_tier(self):
        seq = PointSequence.powerlaw([1.0], 10)
        part = tier_partition(seq, [(3,)], 5.0)
        assert part.tiers == ((0,),)

    def test_constant_sequence_single_tier(self):
        pts = np.ones((10, 2))
        part = tier_partition(pts, [(1, 0), (0, 1), (2, 2)], 2.0)
        assert part.tiers == ((0, 1, 2),)

    def test_bad_constant(self):
        with pytest.raises(BadConstant):
            tier_partition(np.ones((5, 1)), [(1,)], 1.0)

    def test_nonpositive_point(self):
        pts = np.ones((5, 2))
        pts[3, 1] = 0.0
        with pytest.raises(Exception):
            tier_partition(pts, [(1, 0)], 2.0)

    def test_matches_analytic_ranking(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 5))
            alphas = rng.choice([-2, -1, 0, 1, 2], size=n)
            while not np.any(alphas):
                alphas = rng.choice([-2, -1, 0, 1, 2], size=n)
            n_cx = int(rng.integers(1, 5))
            complexes = [
                tuple(int(v) for v in rng.integers(0, 4, size=n)) for _ in range(n_cx)
            ]
            seq = PointSequence.powerlaw(alphas, 50)
            part = tier_partition(seq, complexes, 2.0)
            assert part.tiers == analytic_tiers(complexes, alphas)

    def test_sharing_is_equivalence(self):
        seq = PointSequence.powerlaw([1.0, -1.0, 0.0], 60)
        complexes = [(1, 1, 0), (1, 1, 2), (0, 0, 1), (2, 2, 0)]
        part = tier_partition(seq, complexes, 2.0)
        seen = sorted(i for tier in part.tiers for i in tier)
        assert seen == list(range(len(complexes)))  # partition covers all

    def test_ordering_soundness(self):
        seq = PointSequence.powerlaw([1.0, -2.0], 40)
        complexes = [(1, 0), (0, 1), (1, 1), (2, 0)]
        part = tier_partition(seq, complexes, 2.0)
        logm = np.log(seq.points) @ np.array(complexes, dtype=float).T
        for a in range(part.n_tiers - 1):
            hi = part.tiers[a][0]
            lo = part.tiers[a + 1][0]
            ratio = math.exp(logm[-1, hi] - logm[-1, lo])
            assert ratio > part.constant

    def test_idempotent_under_sample_duplication(self):
        seq = PointSequence.powerlaw([1.0, -1.0], 30)
        complexes = [(1, 0), (0, 1), (1, 1)]
        base = tier_partition(seq.points, complexes, 2.0)
        doubled = np.repeat(seq.points, 2, axis=0)
        assert tier_partition(doubled, complexes, 2.0).tiers == base.tiers

    def test_non_monotone_gap_rejected(self):
        # oscillating second coordinate: gap between (1,0) and (0,1) swings
        n = np.arange(1, 41, dtype=float)
        pts = np.stack([n, np.where(n % 2 == 0, n, 1 / n)], axis=1)
        with pytest.raises(NoPartitionError):
            tier_partition(pts, [(1, 0), (0, 1)], 2.0)


class TestPartitionSubsequence:
    def test_alternating_sequence_recovers_tiers(self):
        # odd samples follow (n, 1/n), even samples sit at (1, 1)
        rows = []
        for n in range(1, 101):
            rows.append([float(n), 1.0 / n] if n % 2 == 1 else [1.0, 1.0])
        pts = np.array(rows)
        idx, part = partition_subsequence(pts, [(1, 0), (0, 1), (1, 1)], 2.0)
        assert part.tiers == ((0,), (2,), (1,))
        assert len(idx) >= 2

    def test_already_partitioned_identity(self):
        seq = PointSequence.powerlaw([1.0, -1.0], 30)
        idx, part = partition_subsequence(seq, [(1, 0), (0, 1)], 2.0)
        assert list(idx) == list(range(30))
        assert part.n_tiers == 2

    def test_too_short(self):
        with pytest.raises(InsufficientData):
            partition_subsequence(np.ones((1, 2)), [(1, 0)], 2.0)


class TestPartiallyMonotonicSubsequence:
    def test_already_monotone(self):
        seq = PointSequence.powerlaw([-1.0, 1.0], 20)
        idx = partially_monotonic_subsequence(seq)
        assert list(idx) == list(range(20))

    def test_oscillating_decay(self):
        n = np.arange(1, 41, dtype=float)
        first = 1.0 / n + ((-1.0) ** n) / (2.0 * n)
        pts = np.stack([first, n], axis=1)
        seq = PointSequence(pts, limits=("zero", "inf"))
        idx = partially_monotonic_subsequence(seq)
        assert len(idx) >= 2
        sel = pts[idx]
        assert np.all(np.diff(sel[:, 0]) <= 0)
        assert np.all(np.diff(sel[:, 1]) >= 0)

    def test_bounded_coordinates_unconstrained(self):
        pts = np.abs(np.sin(np.arange(1, 30, dtype=float))) + 0.5
        seq = PointSequence(pts[:, None], limits=("bounded",))
        idx = partially_monotonic_subsequence(seq)
        assert list(idx) == list(range(29))


class TestClassifyLimits:
    def test_powerlaw_classification(self):
        pts = PointSequence.powerlaw([2.0, -2.0, 0.0], 60).points
        assert classify_limits(pts) == ("inf", "zero", "bounded")


class TestTheoremConservationCheck:
    def test_single_tier_mixed_pattern(self):
        # x_n = (1/n, 3n): single complex, so any sign-pattern vector works
        seq = PointSequence.powerlaw([-1.0, 1.0], 40, scale=[1.0, 3.0])
        res = theorem_conservation_check(seq, [(1, 1)], 2.0)
        assert res.verified
        assert res.relation.vector[0] > 0 > res.relation.vector[1]

    def test_both_to_zero(self):
        seq = PointSequence.powerlaw([-1.0, -1.0], 40)
        res = theorem_conservation_check(seq, [(1, 0), (0, 1)], 2.0)
        assert res.verified
        assert res.relation.vector[0] == res.relation.vector[1] > 0

    def test_no_divergent_coordinate(self):
        seq = PointSequence.powerlaw([0.0, 0.0], 10)
        with pytest.raises(PreconditionUnmet):
            theorem_conservation_check(seq, [(1, 0)], 2.0)

    def test_requires_declared_limits(self):
        pts = PointSequence(np.ones((5, 2)) * 2.0)
        with pytest.raises(PreconditionUnmet):
            theorem_conservation_check(pts, [(1, 0)], 2.0)

    def test_not_partially_monotonic_rejected(self):
        pts = np.stack([np.array([1.0, 0.5, 0.6, 0.25, 0.3]), np.ones(5)], axis=1)
        seq = PointSequence(pts, limits=("zero", "bounded"))
        with pytest.raises(PreconditionUnmet):
            theorem_conservation_check(seq, [(1, 0), (0, 1)], 2.0)

    def test_relation_respects_triple(self, rng):
        # randomized mini-campaign of the theorem's statement
        checked = 0
        for _ in range(60):
            n = int(rng.integers(1, 5))
            alphas = rng.choice([-2, -1, 0, 1, 2], size=n)
            if not np.any(alphas):
                continue
            n_cx = int(rng.integers(1, 5))
            complexes = [
                tuple(int(v) for v in rng.integers(0, 4, size=n)) for _ in range(n_cx)
            ]
            seq = PointSequence.powerlaw(alphas, 40)
            res = theorem_conservation_check(seq, complexes, 2.0)
            assert res.verified, f"counterexample: alphas={alphas}, complexes={complexes}"
            pattern = SignPattern(
                frozenset(int(i) for i in np.nonzero(alphas < 0)[0]),
                frozenset(int(i) for i in np.nonzero(alphas > 0)[0]),
            )
            assert verify_respecting(complexes, res.partition.tiers, pattern, res.relation)
            checked += 1
        assert checked >= 30


class TestPointSequence:
    def test_from_json(self):
        seq = PointSequence.from_json(
            '{"type": "powerlaw", "exponents": [1, -1], "n_max": 5}'
        )
        assert seq.points.shape == (5, 2)
        assert seq.limits == ("inf", "zero")
        assert seq.points[4, 0] == 5.0

    def test_rejects_nonpositive(self):
        with pytest.raises(Exception):
            PointSequence(np.array([[1.0, 0.0]]))

    def test_subsequence(self):
        seq = PointSequence.powerlaw([1.0], 10)
        sub = seq.subsequence([0, 2, 4])
        assert sub.points.shape == (3, 1)
        assert sub.limits == seq.limits
