"""Core domain types for reaction networks: species, complexes, reactions,
stoichiometry, and monomial evaluation.

All structural computations (ranks, bases, null spaces) use exact rational
arithmetic so that downstream certificates never depend on floating-point
tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence


class UndefinedMonomial(ArithmeticError):
    """Raised when a monomial u**v hits 0**negative, which has no value."""


class IndexOutOfRange(IndexError):
    """Projection index set refers to a nonexistent coordinate."""


# ---------------------------------------------------------------------------
# Validation violations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """Base class for the structural conditions a network can break."""

    index: int

    def describe(self) -> str:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class Condition1Violation(Violation):
    """Species never appears with coefficient >= 1 in any complex."""

    def describe(self) -> str:
        return f"species {self.index} appears in no complex"


@dataclass(frozen=True)
class Condition2Violation(Violation):
    """Reaction maps a complex to itself."""

    def describe(self) -> str:
        return f"reaction {self.index} is trivial (source equals product)"


@dataclass(frozen=True)
class Condition3Violation(Violation):
    """Complex takes part in no reaction, as source or as product."""

    def describe(self) -> str:
        return f"complex {self.index} participates in no reaction"


@dataclass(frozen=True)
class DuplicateComplex(Violation):
    """Complex list contains the same coefficient vector twice."""

    def describe(self) -> str:
        return f"complex {self.index} duplicates an earlier complex"


class NetworkValidationError(ValueError):
    """Carries every violated network condition, not just the first."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations: tuple[Violation, ...] = tuple(violations)
        super().__init__("; ".join(v.describe() for v in self.violations))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Species:
    """A chemical species: dense index plus display name."""

    index: int
    name: str


@dataclass(frozen=True)
class Complex:
    """Non-negative integer coefficient vector over the species."""

    coefficients: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i: int) -> int:
        return self.coefficients[i]

    def format(self, names: Sequence[str]) -> str:
        """Render as '2 S1 + S2', or '0' for the zero complex."""
        terms = []
        for coeff, name in zip(self.coefficients, names):
            if coeff == 0:
                continue
            terms.append(name if coeff == 1 else f"{coeff} {name}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class Reaction:
    """Directed reaction between two complexes, stored by complex index."""

    source: int
    product: int


@dataclass(frozen=True)
class ReactionNetwork:
    """A validated reaction network.

    Instances are immutable; construct through :func:`validate_network` (or
    the parser) so the structural conditions are guaranteed to hold.
    """

    species: tuple[Species, ...]
    complexes: tuple[Complex, ...]
    reactions: tuple[Reaction, ...]

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_complexes(self) -> int:
        return len(self.complexes)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    @property
    def species_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    def source_vector(self, k: int) -> tuple[int, ...]:
        return self.complexes[self.reactions[k].source].coefficients

    def product_vector(self, k: int) -> tuple[int, ...]:
        return self.complexes[self.reactions[k].product].coefficients


@dataclass(frozen=True)
class StoichiometricBasis:
    """Reaction vectors y' - y plus a maximal independent subset of them."""

    reaction_vectors: tuple[tuple[int, ...], ...]
    basis: tuple[tuple[int, ...], ...]
    dimension: int


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def validate_network(
    species_names: Sequence[str],
    complexes: Sequence[Sequence[int]],
    reactions: Sequence[tuple[int, int]],
) -> ReactionNetwork:
    """Check the three network conditions plus complex uniqueness.

    Raises :class:`NetworkValidationError` listing *every* violation, or
    ValueError for malformed raw input (inconsistent dimensions, negative
    coefficients, bad indices, duplicate species names).
    """
    n = len(species_names)
    if n == 0:
        raise ValueError("at least one species required")
    if len(set(species_names)) != n or any(not s for s in species_names):
        raise ValueError("species names must be unique and nonempty")
    cxs = []
    for ci, coeffs in enumerate(complexes):
        tup = tuple(int(c) for c in coeffs)
        if len(tup) != n:
            raise ValueError(f"complex {ci} has length {len(tup)}, expected {n}")
        if any(c < 0 for c in tup):
            raise ValueError(f"complex {ci} has a negative coefficient")
        cxs.append(Complex(tup))
    rxns = []
    for ri, (src, prod) in enumerate(reactions):
        if not (0 <= src < len(cxs) and 0 <= prod < len(cxs)):
            raise ValueError(f"reaction {ri} references a nonexistent complex")
        rxns.append(Reaction(int(src), int(prod)))

    violations: list[Violation] = []
    seen: dict[tuple[int, ...], int] = {}
    for ci, cx in enumerate(cxs):
        if cx.coefficients in seen:
            violations.append(DuplicateComplex(ci))
        else:
            seen[cx.coefficients] = ci
    for si in range(n):
        if not any(cx[si] >= 1 for cx in cxs):
            violations.append(Condition1Violation(si))
    for ri, rx in enumerate(rxns):
        if cxs[rx.source].coefficients == cxs[rx.product].coefficients:
            violations.append(Condition2Violation(ri))
    used = set()
    for rx in rxns:
        used.add(rx.source)
        used.add(rx.product)
    for ci in range(len(cxs)):
        if ci not in used:
            violations.append(Condition3Violation(ci))

    if violations:
        raise NetworkValidationError(violations)
    return ReactionNetwork(
        species=tuple(Species(i, nm) for i, nm in enumerate(species_names)),
        complexes=tuple(cxs),
        reactions=tuple(rxns),
    )


def monomial(u: Sequence[float], v: Sequence[float]) -> float:
    """Evaluate prod_i u_i**v_i with the convention 0**0 = 1.

    Raises :class:`UndefinedMonomial` if u_i = 0 while v_i < 0.  Bases must
    be non-negative.
    """
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    out = 1.0
    for base, exp in zip(u, v):
        if base < 0:
            raise ValueError("monomial base must be non-negative")
        if base == 0:
            if exp < 0:
                raise UndefinedMonomial(f"0**{exp}")
            if exp == 0:
                continue
            out *= 0.0
        elif exp != 0:
            try:
                out *= float(base) ** float(exp)
            except OverflowError:
                out *= float("inf")
    return out


def reaction_vectors(net: ReactionNetwork) -> list[tuple[int, ...]]:
    """Reaction vectors y_k' - y_k in reaction order."""
    out = []
    for rx in net.reactions:
        src = net.complexes[rx.source].coefficients
        prod = net.complexes[rx.product].coefficients
        out.append(tuple(p - s for s, p in zip(src, prod)))
    return out


def _reduce_against(
    vec: list[Fraction], pivots: list[tuple[int, list[Fraction]]]
) -> list[Fraction]:
    """Eliminate vec against already-found pivot rows (exact arithmetic)."""
    for col, row in pivots:
        if vec[col] != 0:
            factor = vec[col] / row[col]
            vec = [a - factor * b for a, b in zip(vec, row)]
    return vec


def stoichiometric_basis(net: ReactionNetwork) -> StoichiometricBasis:
    """Maximal independent subset of the reaction vectors, exact over Q.

    Greedy in reaction order, so the basis is deterministic; the dimension
    is the rank of the reaction-vector matrix over the rationals.
    """
    vecs = reaction_vectors(net)
    pivots: list[tuple[int, list[Fraction]]] = []
    basis: list[tuple[int, ...]] = []
    for v in vecs:
        reduced = _reduce_against([Fraction(x) for x in v], pivots)
        col = next((i for i, x in enumerate(reduced) if x != 0), None)
        if col is not None:
            pivots.append((col, reduced))
            basis.append(v)
    return StoichiometricBasis(
        reaction_vectors=tuple(vecs),
        basis=tuple(basis),
        dimension=len(basis),
    )


def conservation_basis(net: ReactionNetwork) -> list[tuple[int, ...]]:
    """Integer basis of {w : w . (y'-y) = 0 for every reaction}.

    Exact rational RREF of the reaction-vector matrix; each basis vector is
    scaled to coprime integers with its first nonzero entry positive.
    """
    n = net.n_species
    rows = [[Fraction(x) for x in v] for v in reaction_vectors(net)]
    # RREF
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        w = [Fraction(0)] * n
        w[fc] = Fraction(1)
        for ri, pc in enumerate(pivot_cols):
            w[pc] = -rows[ri][fc]
        basis.append(_to_coprime_ints(w))
    return basis


def _to_coprime_ints(w: Sequence[Fraction]) -> tuple[int, ...]:
    denom_lcm = 1
    for x in w:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in w]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def project(v: Sequence[float], idx: Iterable[int]) -> tuple:
    """Project v onto the coordinates in idx (sorted, 0-based)."""
    idx = list(idx)
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("projection index set must be strictly increasing")
    n = len(v)
    for i in idx:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"index {i} out of range for dimension {n}")
    return tuple(v[i] for i in idx)


def directed_cycles_sum_zero(net: ReactionNetwork, cycle: Sequence[int]) -> bool:
    """True if the reaction vectors along the given reaction-index cycle sum
    to zero (requires product complex of each to be source of the next)."""
    vecs = reaction_vectors(net)
    total = [0] * net.n_species
    for k in cycle:
        for i, x in enumerate(vecs[k]):
            total[i] += x
    return all(x == 0 for x in total)


def complex_pairs(net: ReactionNetwork) -> list[tuple[int, int]]:
    """All unordered complex-index pairs, ascending."""
    return list(combinations(range(net.n_complexes), 2))
