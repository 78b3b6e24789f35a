import networkx as nx
import pytest

from crnbound.certifier import NetworkSpec, generate_random_network
from crnbound.graph import (
    EmptySet,
    has_return_path,
    is_reversible,
    is_union_of_linkage_classes,
    is_weakly_reversible,
    linkage_classes,
    reaction_diagram,
)
from crnbound.model import validate_network


def _nx_digraph(net):
    g = nx.DiGraph()
    g.add_nodes_from(range(net.n_complexes))
    g.add_edges_from((r.source, r.product) for r in net.reactions)
    return g


class TestLinkageClasses:
    def test_exchange_single_class(self, two_species_exchange):
        assert linkage_classes(two_species_exchange).classes == ((0, 1),)

    def test_two_component(self, two_component):
        decomp = linkage_classes(two_component)
        assert decomp.classes == ((0, 1), (2, 3))
        assert decomp.class_of == (0, 0, 1, 1)

    def test_triangle_single_class(self, triangle):
        assert linkage_classes(triangle).n_classes == 1

    def test_matches_networkx_components(self, rng):
        for seed in range(20):
            net, _ = generate_random_network(
                NetworkSpec(n_species=3, num_complexes=4, extra_edges=2, seed=seed)
            )
            ours = {frozenset(c) for c in linkage_classes(net).classes}
            theirs = {
                frozenset(c)
                for c in nx.connected_components(_nx_digraph(net).to_undirected())
            }
            assert ours == theirs

    def test_invariant_under_reaction_reordering(self, triangle, rng):
        rxns = [(r.source, r.product) for r in triangle.reactions]
        base = linkage_classes(triangle).classes
        for _ in range(5):
            net = validate_network(
                [s.name for s in triangle.species],
                [c.coefficients for c in triangle.complexes],
                [rxns[i] for i in rng.permutation(len(rxns))],
            )
            assert linkage_classes(net).classes == base


class TestWeakReversibility:
    def test_exchange_weakly_reversible(self, two_species_exchange):
        ok, witness = is_weakly_reversible(two_species_exchange)
        assert ok and witness is None

    def test_triangle_weakly_reversible(self, triangle):
        # oracle: the directed triangle is one SCC
        assert nx.is_strongly_connected(_nx_digraph(triangle))
        ok, _ = is_weakly_reversible(triangle)
        assert ok

    def test_dead_end_with_witness(self):
        # A -> B plus C <-> A: complex B has no outgoing path back
        net = validate_network(
            ["A", "B", "C"],
            [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
            [(0, 1), (2, 0), (0, 2)],
        )
        ok, witness = is_weakly_reversible(net)
        assert not ok
        assert witness == (1, 0)

    def test_matches_networkx_scc(self):
        for seed in range(30):
            net, _ = generate_random_network(
                NetworkSpec(n_species=3, num_complexes=4, extra_edges=seed % 4, seed=seed)
            )
            g = _nx_digraph(net)
            expected = all(
                nx.is_strongly_connected(g.subgraph(c))
                for c in nx.connected_components(g.to_undirected())
            )
            assert is_weakly_reversible(net)[0] == expected

    def test_weakly_reversible_has_return_paths(self, triangle):
        # equivalent characterization: a path from product back to source exists
        for k in range(triangle.n_reactions):
            assert has_return_path(triangle, k)

    def test_return_paths_on_random_weakly_reversible_networks(self):
        for seed in range(15):
            net, _ = generate_random_network(
                NetworkSpec(n_species=3, num_complexes=4, extra_edges=seed % 4, seed=seed)
            )
            assert is_weakly_reversible(net)[0]
            for k in range(net.n_reactions):
                assert has_return_path(net, k)


class TestReversibility:
    def test_exchange_reversible(self, two_species_exchange):
        assert is_reversible(two_species_exchange)

    def test_triangle_not_reversible(self, triangle):
        assert not is_reversible(triangle)

    def test_reversible_implies_weakly_reversible(self, rng):
        for seed in range(20):
            net, _ = generate_random_network(
                NetworkSpec(n_species=3, num_complexes=4, extra_edges=3, seed=seed)
            )
            # symmetrize: add every reverse edge
            edges = {(r.source, r.product) for r in net.reactions}
            edges |= {(b, a) for a, b in edges}
            sym = validate_network(
                [s.name for s in net.species],
                [c.coefficients for c in net.complexes],
                sorted(edges),
            )
            assert is_reversible(sym)
            assert is_weakly_reversible(sym)[0]


class TestUnionOfLinkageClasses:
    def test_single_class_full_set(self, two_species_exchange):
        assert is_union_of_linkage_classes(two_species_exchange, {0, 1})

    def test_single_class_proper_subset(self, two_species_exchange):
        assert not is_union_of_linkage_classes(two_species_exchange, {0})

    def test_two_component_one_whole_class(self, two_component):
        assert is_union_of_linkage_classes(two_component, {0, 1})
        assert is_union_of_linkage_classes(two_component, {2, 3})
        assert not is_union_of_linkage_classes(two_component, {1, 2})

    def test_empty_set_rejected(self, two_component):
        with pytest.raises(EmptySet):
            is_union_of_linkage_classes(two_component, set())


class TestReactionDiagram:
    def test_edges_match_reactions(self, triangle):
        diagram = reaction_diagram(triangle)
        assert set(diagram.edges) == {(0, 1), (1, 2), (2, 0)}
        assert diagram.n_nodes == 3
