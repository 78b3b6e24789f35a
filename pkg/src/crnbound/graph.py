"""Reaction diagram structure: linkage classes, weak reversibility,
reversibility, and unions of linkage classes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .model import ReactionNetwork


class EmptySet(ValueError):
    """Union-of-linkage-classes query got an empty complex set."""


@dataclass(frozen=True)
class ReactionDiagram:
    """Directed graph with complexes as nodes and reactions as edges."""

    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def successors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for a, b in self.edges:
            adj[a].append(b)
        return adj

    def neighbors(self) -> list[list[int]]:
        """Adjacency of the underlying undirected graph."""
        adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass(frozen=True)
class LinkageDecomposition:
    """Partition of the complexes into connected components."""

    classes: tuple[tuple[int, ...], ...]
    class_of: tuple[int, ...]

    @property
    def n_classes(self) -> int:
        return len(self.classes)


def reaction_diagram(net: ReactionNetwork) -> ReactionDiagram:
    edges = tuple(dict.fromkeys((rx.source, rx.product) for rx in net.reactions))
    return ReactionDiagram(n_nodes=net.n_complexes, edges=edges)


def linkage_classes(net: ReactionNetwork) -> LinkageDecomposition:
    """Connected components of the undirected reaction diagram, indexed in
    order of smallest member complex."""
    diagram = reaction_diagram(net)
    adj = diagram.neighbors()
    seen = [False] * diagram.n_nodes
    comps: list[tuple[int, ...]] = []
    for start in range(diagram.n_nodes):
        if seen[start]:
            continue
        queue = deque([start])
        seen[start] = True
        comp = []
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    comps.sort(key=lambda c: c[0])
    class_of = [0] * diagram.n_nodes
    for ci, comp in enumerate(comps):
        for v in comp:
            class_of[v] = ci
    return LinkageDecomposition(classes=tuple(comps), class_of=tuple(class_of))


def _reachable(adj: list[list[int]], start: int, allowed: frozenset[int]) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w in allowed and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def is_weakly_reversible(net: ReactionNetwork) -> tuple[bool, tuple[int, int] | None]:
    """True iff every linkage class is strongly connected.

    On failure the witness is the lexicographically smallest ordered pair of
    complexes (a, b) in one class with no directed path from a to b.
    """
    decomp = linkage_classes(net)
    adj = reaction_diagram(net).successors()
    witness: tuple[int, int] | None = None
    for comp in decomp.classes:
        allowed = frozenset(comp)
        reach = {v: _reachable(adj, v, allowed) for v in comp}
        for a in comp:
            for b in comp:
                if a != b and b not in reach[a]:
                    if witness is None or (a, b) < witness:
                        witness = (a, b)
    return (witness is None), witness


def is_reversible(net: ReactionNetwork) -> bool:
    """True iff y' -> y is a reaction whenever y -> y' is."""
    edges = {(rx.source, rx.product) for rx in net.reactions}
    return all((b, a) in edges for a, b in edges)


def is_union_of_linkage_classes(net: ReactionNetwork, subset: Iterable[int]) -> bool:
    """True iff the complex-index set equals a union of whole linkage classes."""
    t = set(subset)
    if not t:
        raise EmptySet("complex set must be nonempty")
    for ci in t:
        if not 0 <= ci < net.n_complexes:
            raise ValueError(f"complex index {ci} out of range")
    decomp = linkage_classes(net)
    touched = {decomp.class_of[ci] for ci in t}
    union = set()
    for cls in touched:
        union.update(decomp.classes[cls])
    return union == t


def has_return_path(net: ReactionNetwork, reaction_index: int) -> bool:
    """For reaction y -> y', check there is a directed path y' back to y."""
    rx = net.reactions[reaction_index]
    adj = reaction_diagram(net).successors()
    allowed = frozenset(range(net.n_complexes))
    return rx.source in _reachable(adj, rx.product, allowed)
