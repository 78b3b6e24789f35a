"""Exact theorem-of-the-alternatives engine.

Implements the sign dichotomy for a finite vector family: either a
combination with non-positive (pattern-signed) coordinates and at least one
strict coordinate exists, or a strictly signed vector orthogonal to every
input exists.  Exactly one alternative holds, and we certify whichever one
we return in rational arithmetic, so results never hinge on a floating
tolerance.

The engine is a dense tableau simplex over `fractions.Fraction` with Bland's
rule (anti-cycling).  Problem sizes here are tiny (dimensions bounded by the
number of species/complexes), so clarity wins over sparsity tricks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

FracVec = tuple[Fraction, ...]


class DimensionMismatch(ValueError):
    """Input vectors do not share a common dimension."""


class OverlappingPattern(ValueError):
    """Positive and negative index sets of a sign pattern intersect."""


class IncompletePattern(ValueError):
    """Full-support query requires the pattern to cover every coordinate."""


class EmptyPattern(ValueError):
    """Triple query requires at least one signed coordinate."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _frac_vectors(vectors: Sequence[Sequence]) -> list[FracVec]:
    vecs = [tuple(_frac(x) for x in v) for v in vectors]
    if not vecs:
        raise ValueError("at least one vector required")
    m = len(vecs[0])
    if m == 0 or any(len(v) != m for v in vecs):
        raise DimensionMismatch("vectors must share a positive dimension")
    return vecs


@dataclass(frozen=True)
class SignPattern:
    """Coordinates required strictly positive (U) and strictly negative (V)."""

    positive: frozenset[int]
    negative: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        if self.positive & self.negative:
            raise OverlappingPattern(
                f"indices {sorted(self.positive & self.negative)} in both sets"
            )

    @property
    def support(self) -> frozenset[int]:
        return self.positive | self.negative


@dataclass(frozen=True)
class CombinationCert:
    """First alternative: coefficients of a pattern-violating combination."""

    coefficients: FracVec
    alt = "combination"


@dataclass(frozen=True)
class OrthogonalCert:
    """Second alternative: strictly signed vector orthogonal to all inputs."""

    vector: FracVec
    alt = "orthogonal"


Certificate = CombinationCert | OrthogonalCert


@dataclass(frozen=True)
class ConservationRelation:
    """Vector orthogonal to within-tier complex differences with prescribed
    positive/negative support."""

    vector: FracVec
    positive_support: frozenset[int] = field(default=frozenset())
    negative_support: frozenset[int] = field(default=frozenset())

    @classmethod
    def from_vector(cls, w: Sequence[Fraction]) -> "ConservationRelation":
        vec = tuple(_frac(x) for x in w)
        return cls(
            vector=vec,
            positive_support=frozenset(i for i, x in enumerate(vec) if x > 0),
            negative_support=frozenset(i for i, x in enumerate(vec) if x < 0),
        )


# ---------------------------------------------------------------------------
# Rational simplex (maximize c.x subject to Ax <= b, x >= 0, with b >= 0)
# ---------------------------------------------------------------------------

def _simplex_max(
    a_rows: list[list[Fraction]], b: list[Fraction], costs: list[Fraction]
) -> tuple[Fraction, list[Fraction], list[Fraction]]:
    """Returns (optimum, primal solution, dual solution).

    Requires b >= 0 so the all-slack basis is feasible; Bland's rule
    guarantees termination.  Duals are read off the slack columns of the
    objective row.
    """
    m = len(a_rows)
    n = len(costs)
    assert all(x >= 0 for x in b), "simplex entry requires b >= 0"
    zero = Fraction(0)
    # tableau rows: [structural | slacks | rhs]
    tab = []
    for i, row in enumerate(a_rows):
        slack = [zero] * m
        slack[i] = Fraction(1)
        tab.append(list(row) + slack + [b[i]])
    obj = [-c for c in costs] + [zero] * m + [zero]
    basis = [n + i for i in range(m)]

    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            break
        leave = None
        best_ratio = None
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                ratio = tab[i][-1] / coef
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            raise RuntimeError("unbounded LP in alternative solver")
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[leave])]
        basis[leave] = enter

    x = [zero] * (n + m)
    for i, bi in enumerate(basis):
        x[bi] = tab[i][-1]
    duals = [obj[n + i] for i in range(m)]
    return obj[-1], x[:n], duals


# ---------------------------------------------------------------------------
# Alternatives
# ---------------------------------------------------------------------------

def stiemke(vectors: Sequence[Sequence]) -> Certificate:
    """Decide the strict-positivity dichotomy for the given vectors.

    Either returns a :class:`CombinationCert` c with sum(c_i u_i) <= 0
    componentwise and at least one strict coordinate, or an
    :class:`OrthogonalCert` w > 0 with w.u_i = 0 for every i.
    """
    vecs = _frac_vectors(vectors)
    n = len(vecs)
    m = len(vecs[0])
    zero, one = Fraction(0), Fraction(1)
    nv = 2 * n + m  # c+ , c- , s
    a_rows = []
    b = []
    for j in range(m):
        row = [zero] * nv
        for i, u in enumerate(vecs):
            row[i] = u[j]
            row[n + i] = -u[j]
        row[2 * n + j] = one
        a_rows.append(row)
        b.append(zero)
    for j in range(m):
        row = [zero] * nv
        row[2 * n + j] = one
        a_rows.append(row)
        b.append(one)
    costs = [zero] * (2 * n) + [one] * m

    opt, x, duals = _simplex_max(a_rows, b, costs)
    if opt > 0:
        coeffs = tuple(x[i] - x[n + i] for i in range(n))
        cert = CombinationCert(coeffs)
        if not verify_combination(vecs, cert):
            raise RuntimeError("internal error: combination certificate invalid")
        return cert
    w = tuple(duals[:m])
    cert = OrthogonalCert(w)
    if not verify_orthogonal(vecs, cert):
        raise RuntimeError("internal error: orthogonal certificate invalid")
    return cert


def _reflect(v: FracVec, negative: frozenset[int]) -> FracVec:
    return tuple(-x if j in negative else x for j, x in enumerate(v))


def stiemke_signed(vectors: Sequence[Sequence], pattern: SignPattern) -> Certificate:
    """Sign-pattern variant: the orthogonal vector must be positive on
    pattern.positive and negative on pattern.negative (which together must
    cover every coordinate).

    Implemented by reflecting the negative coordinates, deciding the plain
    dichotomy, and reflecting the orthogonal vector back.
    """
    vecs = _frac_vectors(vectors)
    m = len(vecs[0])
    if pattern.support != frozenset(range(m)):
        raise IncompletePattern(
            "full-support query: positive/negative sets must cover all coordinates"
        )
    reflected = [_reflect(v, pattern.negative) for v in vecs]
    result = stiemke(reflected)
    if isinstance(result, CombinationCert):
        if not verify_combination(vecs, result, pattern):
            raise RuntimeError("internal error: reflected combination invalid")
        return result
    w = _reflect(result.vector, pattern.negative)
    cert = OrthogonalCert(w)
    if not verify_orthogonal(vecs, cert, pattern):
        raise RuntimeError("internal error: reflected orthogonal invalid")
    return cert


def respecting_relation(
    complexes: Sequence[Sequence],
    tiers: Iterable[Iterable[int]],
    pattern: SignPattern,
) -> ConservationRelation | CombinationCert:
    """Search for a conservation relation that respects (U, V, tiers).

    The relation w must have positive support exactly U, negative support
    exactly V, zeros elsewhere, and w.(y_j - y_k) = 0 whenever y_j, y_k share
    a tier.  If no such w exists, returns the dual combination certificate
    over the within-tier difference vectors restricted to U | V (deduplicated,
    first-occurrence order).
    """
    cxs = [tuple(_frac(x) for x in c) for c in complexes]
    if not cxs:
        raise ValueError("at least one complex required")
    n_dim = len(cxs[0])
    if any(len(c) != n_dim for c in cxs):
        raise DimensionMismatch("complexes must share one dimension")
    support = sorted(pattern.support)
    if not support:
        raise EmptyPattern("U and V cannot both be empty")
    if support[-1] >= n_dim or support[0] < 0:
        raise DimensionMismatch("pattern index out of range")
    tier_list = [sorted(set(t)) for t in tiers]
    covered = sorted(i for t in tier_list for i in t)
    if covered != list(range(len(cxs))):
        raise ValueError("tiers must partition the complex index set")

    restricted: list[FracVec] = []
    seen = set()
    for tier in tier_list:
        for j, k in combinations(tier, 2):
            diff = tuple(cxs[j][i] - cxs[k][i] for i in support)
            if any(x != 0 for x in diff) and diff not in seen:
                seen.add(diff)
                restricted.append(diff)

    pos_in_support = frozenset(
        i for i, coord in enumerate(support) if coord in pattern.positive
    )
    neg_in_support = frozenset(
        i for i, coord in enumerate(support) if coord in pattern.negative
    )
    if not restricted:
        # every within-tier difference vanishes on U|V: any vector with the
        # prescribed signs works
        w_small: FracVec = tuple(
            Fraction(1) if i in pos_in_support else Fraction(-1)
            for i in range(len(support))
        )
    else:
        result = stiemke_signed(
            restricted, SignPattern(pos_in_support, neg_in_support)
        )
        if isinstance(result, CombinationCert):
            return result
        w_small = result.vector

    w = [Fraction(0)] * n_dim
    for pos, coord in enumerate(support):
        w[coord] = w_small[pos]
    return ConservationRelation.from_vector(w)


# ---------------------------------------------------------------------------
# Exact verification
# ---------------------------------------------------------------------------

def verify_combination(
    vectors: Sequence[Sequence],
    cert: CombinationCert,
    pattern: SignPattern | None = None,
) -> bool:
    """Exact check: combination is <=0 on U, >=0 on V, with a strict entry."""
    vecs = _frac_vectors(vectors)
    m = len(vecs[0])
    if len(cert.coefficients) != len(vecs):
        return False
    combo = [Fraction(0)] * m
    for ci, u in zip(cert.coefficients, vecs):
        for j in range(m):
            combo[j] += _frac(ci) * u[j]
    pos = pattern.positive if pattern else frozenset(range(m))
    neg = pattern.negative if pattern else frozenset()
    strict = False
    for j in range(m):
        if j in pos:
            if combo[j] > 0:
                return False
            strict = strict or combo[j] < 0
        elif j in neg:
            if combo[j] < 0:
                return False
            strict = strict or combo[j] > 0
    return strict


def verify_orthogonal(
    vectors: Sequence[Sequence],
    cert: OrthogonalCert,
    pattern: SignPattern | None = None,
) -> bool:
    """Exact check: w orthogonal to every vector with the prescribed signs."""
    vecs = _frac_vectors(vectors)
    m = len(vecs[0])
    w = cert.vector
    if len(w) != m:
        return False
    for u in vecs:
        if sum(wi * ui for wi, ui in zip(w, u)) != 0:
            return False
    pos = pattern.positive if pattern else frozenset(range(m))
    neg = pattern.negative if pattern else frozenset()
    for j in range(m):
        if j in pos and not w[j] > 0:
            return False
        if j in neg and not w[j] < 0:
            return False
    return True


def verify_respecting(
    complexes: Sequence[Sequence],
    tiers: Iterable[Iterable[int]],
    pattern: SignPattern,
    relation: ConservationRelation,
) -> bool:
    """Exact check of both conditions of a respecting relation."""
    cxs = [tuple(_frac(x) for x in c) for c in complexes]
    w = relation.vector
    pos = frozenset(i for i, x in enumerate(w) if x > 0)
    neg = frozenset(i for i, x in enumerate(w) if x < 0)
    if pos != pattern.positive or neg != pattern.negative:
        return False
    for tier in tiers:
        tier = sorted(set(tier))
        for j, k in combinations(tier, 2):
            if sum(wi * (a - b) for wi, a, b in zip(w, cxs[j], cxs[k])) != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def certificate_to_json(cert: Certificate | ConservationRelation) -> dict:
    if isinstance(cert, CombinationCert):
        return {"alt": "combination", "vector": [str(x) for x in cert.coefficients]}
    if isinstance(cert, OrthogonalCert):
        return {"alt": "orthogonal", "vector": [str(x) for x in cert.vector]}
    return {"alt": "orthogonal", "vector": [str(x) for x in cert.vector]}


def certificate_from_json(data: dict) -> Certificate:
    vec = tuple(Fraction(s) for s in data["vector"])
    if data["alt"] == "combination":
        return CombinationCert(vec)
    if data["alt"] == "orthogonal":
        return OrthogonalCert(vec)
    raise ValueError(f"unknown certificate alt {data['alt']!r}")
