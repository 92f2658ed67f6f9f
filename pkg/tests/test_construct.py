import itertools

import pytest

import qsym as q
from qsym.construct import ParityVertex, _transport_cycles

from oracles import brute_force_isomorphism


def fiber_indices(g, anchor):
    return [i for i, pv in enumerate(g.labels) if pv.anchor == anchor]


class TestBuild:
    def test_vertex_counts(self):
        for z in (q.complete_bipartite(3, 3), q.complete_graph(5), q.petersen(),
                  q.cycle_graph(4)):
            expected = sum(2 ** (z.degree(v) - 1) for v in range(z.n))
            x0 = q.build_x0(z)
            x1 = q.build_x(z, 0)
            assert x0.n == expected
            assert x1.n == expected

    def test_k33_and_k5_sizes(self):
        assert q.build_x0(q.complete_bipartite(3, 3)).n == 24
        assert q.build_x(q.complete_bipartite(3, 3), 1).n == 24
        assert q.build_x0(q.complete_graph(5)).n == 40
        assert q.build_x(q.complete_graph(5), 3).n == 40

    def test_parity_invariants(self):
        z = q.complete_bipartite(3, 3)
        for pv in q.build_x0(z).labels:
            assert len(pv.edge_subset) % 2 == 0
        for pv in q.build_x(z, 2).labels:
            expected = 1 if pv.anchor == 2 else 0
            assert len(pv.edge_subset) % 2 == expected

    def test_adjacency_rule(self):
        z = q.cycle_graph(4)
        x0 = q.build_x0(z)
        for i, j in itertools.combinations(range(x0.n), 2):
            a, b = x0.labels[i], x0.labels[j]
            e = tuple(sorted((a.anchor, b.anchor)))
            expected = (z.has_edge(*e) if a.anchor != b.anchor else False) and \
                ((e in a.edge_subset) != (e in b.edge_subset))
            assert x0.has_edge(i, j) == expected

    def test_requires_connected(self):
        with pytest.raises(ValueError):
            q.build_x0(q.empty_graph(3))

    def test_enumeration_order_deterministic(self):
        z = q.complete_bipartite(3, 3)
        first = q.parity_vertices(z, None)
        assert first == q.parity_vertices(z, None)
        anchors = [pv.anchor for pv in first]
        assert anchors == sorted(anchors)
        assert first[0] == ParityVertex(0, frozenset())


class TestGameGraphBijection:
    @pytest.mark.parametrize("marked", [None, 0, 4])
    def test_matches_clique_less_game_graph(self, marked):
        z = q.complete_bipartite(3, 3)
        if marked is None:
            parity_graph = q.build_x0(z)
            system = q.homogenize(q.arkhipov_lbcs(z, 0))
        else:
            parity_graph = q.build_x(z, marked)
            system = q.arkhipov_lbcs(z, marked)
        game = q.game_graph(system, include_clique_edges=False)
        assert parity_graph.n == game.n
        # explicit bijection: (anchor, S) <-> (anchor, indicator of S on the support)
        edge_index = {e: i for i, e in enumerate(z.edge_list)}
        game_index = {lab: i for i, lab in enumerate(game.labels)}
        mapping = {}
        for i, pv in enumerate(parity_graph.labels):
            support = sorted(edge_index[e] for e in z.incident_edges(pv.anchor))
            pattern = tuple(int(edge_index[e] in {edge_index[s] for s in pv.edge_subset})
                            for e in z.incident_edges(pv.anchor))
            _ = support
            mapping[i] = game_index[(pv.anchor, pattern)]
        mapped_edges = {tuple(sorted((mapping[u], mapping[v])))
                        for u, v in parity_graph.edges}
        assert mapped_edges == set(game.edges)

    def test_clique_variant_adds_anchor_cliques(self):
        z = q.complete_bipartite(3, 3)
        system = q.homogenize(q.arkhipov_lbcs(z, 0))
        with_cliques = q.game_graph(system, include_clique_edges=True)
        without = q.game_graph(system, include_clique_edges=False)
        extra = with_cliques.edges - without.edges
        assert len(extra) == 6 * 6  # one 4-clique per constraint
        assert all(with_cliques.labels[u][0] == with_cliques.labels[v][0] for u, v in extra)


class TestLift:
    def test_identity_lifts_to_identity(self):
        z = q.complete_bipartite(3, 3)
        lift = q.lift_automorphism(z, q.Permutation.identity(6))
        assert lift.is_identity()

    def test_lift_preserves_anchor_fibers_setwise(self):
        z = q.complete_bipartite(3, 3)
        sigma = q.Permutation((1, 2, 0, 4, 5, 3))  # rotate each side
        lift = q.lift_automorphism(z, sigma)
        x0 = q.build_x0(z)
        for i, pv in enumerate(x0.labels):
            assert x0.labels[lift(i)].anchor == sigma(pv.anchor)

    def test_part_swap_is_verified_automorphism(self):
        z = q.complete_bipartite(3, 3)
        swap = q.Permutation((3, 4, 5, 0, 1, 2))
        lift = q.lift_automorphism(z, swap)
        assert q.is_automorphism(q.build_x0(z), lift)

    def test_all_petersen_lifts_verify(self):
        z = q.petersen()
        x0 = q.build_x0(z)
        for g in q.automorphism_group(z).generators:
            assert q.is_automorphism(x0, q.lift_automorphism(z, g))

    def test_rejects_non_automorphism(self):
        z = q.path_graph(3)
        with pytest.raises(ValueError):
            q.lift_automorphism(z, q.Permutation((1, 0, 2)))


class TestEvenSubgraph:
    def test_empty_set_is_identity(self):
        z = q.complete_bipartite(3, 3)
        assert q.even_subgraph_automorphism(z, frozenset()).is_identity()

    def test_any_cycle_verifies(self):
        z = q.complete_bipartite(3, 3)
        x0 = q.build_x0(z)
        cycle = {(0, 3), (1, 3), (1, 4), (0, 4)}
        perm = q.even_subgraph_automorphism(z, cycle)
        assert q.is_automorphism(x0, perm)
        for i, pv in enumerate(x0.labels):
            assert x0.labels[perm(i)].anchor == pv.anchor

    def test_composition_is_symmetric_difference(self):
        z = q.complete_bipartite(3, 3)
        c1 = frozenset({(0, 3), (1, 3), (1, 4), (0, 4)})
        c2 = frozenset({(1, 4), (2, 4), (2, 5), (1, 5)})
        composed = q.even_subgraph_automorphism(z, c2) * q.even_subgraph_automorphism(z, c1)
        assert composed == q.even_subgraph_automorphism(z, c1 ^ c2)

    def test_rejects_odd_subgraph(self):
        z = q.complete_bipartite(3, 3)
        with pytest.raises(ValueError):
            q.even_subgraph_automorphism(z, {(0, 3)})

    def test_cycle_basis_acts_transitively_on_fibers(self):
        # maps of the fundamental cycles of a spanning tree reach every even
        # subset from the empty one within each anchor fiber
        z = q.complete_bipartite(3, 3)
        x0 = q.build_x0(z)
        tree_edges = {(0, 3), (0, 4), (0, 5), (1, 3), (2, 3)}
        basis = []
        for e in z.edges - frozenset(tree_edges):
            cycles = _transport_cycles(
                q.graph(z.n, tree_edges | {e}), -1, frozenset(), frozenset())
            _ = cycles
        # build fundamental cycles directly: chord + tree path
        import networkx as nx
        t = nx.Graph(list(tree_edges))
        for u, v in sorted(z.edges - frozenset(tree_edges)):
            path = nx.shortest_path(t, u, v)
            cyc = {tuple(sorted(p)) for p in zip(path, path[1:])} | {(u, v)}
            basis.append(q.even_subgraph_automorphism(z, cyc))
        for anchor in range(z.n):
            fiber = fiber_indices(x0, anchor)
            start = next(i for i in fiber if x0.labels[i].edge_subset == frozenset())
            reached = {start}
            frontier = [start]
            while frontier:
                v = frontier.pop()
                for b in basis:
                    w = b(v)
                    if w not in reached:
                        reached.add(w)
                        frontier.append(w)
            assert reached == set(fiber)


class TestFiberTransporter:
    def test_identity_when_equal(self):
        z = q.complete_bipartite(3, 3)
        s = frozenset({(0, 3), (0, 4)})
        assert q.fiber_transporter(z, 0, s, s).is_identity()

    def test_small_difference_single_cycle(self):
        z = q.complete_bipartite(3, 3)
        s = frozenset({(0, 3), (0, 4)})
        t = frozenset({(0, 3), (0, 5)})
        perm = q.fiber_transporter(z, 0, s, t)
        x0 = q.build_x0(z)
        src = x0.labels.index(ParityVertex(0, s))
        assert x0.labels[perm(src)] == ParityVertex(0, t)
        assert q.is_automorphism(x0, perm)

    def test_four_difference_composes_two_cycles(self):
        z = q.complete_graph(5)
        s = frozenset({(0, 1), (0, 2), (0, 3), (0, 4)})
        t = frozenset()
        assert len(_transport_cycles(z, 0, s, t)) == 2
        perm = q.fiber_transporter(z, 0, s, t)
        x0 = q.build_x0(z)
        src = x0.labels.index(ParityVertex(0, s))
        assert x0.labels[perm(src)] == ParityVertex(0, t)

    def test_transports_every_pair_in_every_fiber(self):
        z = q.complete_bipartite(3, 3)
        x0 = q.build_x0(z)
        for anchor in range(z.n):
            fiber = fiber_indices(x0, anchor)
            for i in fiber:
                for j in fiber:
                    s, t = x0.labels[i].edge_subset, x0.labels[j].edge_subset
                    perm = q.fiber_transporter(z, anchor, s, t)
                    assert perm(i) == j
                    assert q.is_automorphism(x0, perm)

    def test_rejects_odd_subsets(self):
        z = q.complete_bipartite(3, 3)
        with pytest.raises(ValueError):
            q.fiber_transporter(z, 0, {(0, 3)}, {(0, 4)})

    def test_rejects_cut_vertex(self):
        z = q.graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
        assert q.cut_vertices(z) == (2,)
        with pytest.raises(ValueError):
            q.fiber_transporter(z, 0, frozenset(), frozenset())


class TestCertificate:
    def test_k33_covers_all(self):
        cert = q.certify_vertex_transitive_x0(q.complete_bipartite(3, 3))
        assert cert.covers_all(24)
        x0 = q.build_x0(q.complete_bipartite(3, 3))
        for entry in cert.entries:
            assert entry.permutation(cert.base) == entry.target
            assert q.is_automorphism(x0, entry.permutation)
            assert entry.word[0][0] == "lift"
            assert all(step[0] == "cycle" for step in entry.word[1:])

    def test_pair_transporter(self):
        cert = q.certify_vertex_transitive_x0(q.cycle_graph(4))
        perm = cert.transporter(2, 5)
        assert perm(2) == 5

    def test_rejects_non_transitive(self):
        with pytest.raises(ValueError, match="not vertex transitive"):
            q.certify_vertex_transitive_x0(q.path_graph(3))

    def test_rejects_disconnected(self):
        with pytest.raises(ValueError, match="not connected"):
            q.certify_vertex_transitive_x0(q.disjoint_union(q.complete_graph(2),
                                                            q.complete_graph(2)))


class TestWitnessPair:
    def test_k33_all_checks_pass(self):
        rep = q.witness_pair(q.complete_bipartite(3, 3), 0)
        assert rep.all_pass
        assert rep.first.n == rep.second.n == 24
        assert rep.union.n == 48
        assert rep.checks.second_vertex_transitive
        assert rep.union_orbit_count == 2
        assert rep.wl_diagonal_mixes_sides
        assert rep.aut_orbits_separate_sides

    def test_non_isomorphic_sides(self):
        rep = q.witness_pair(q.complete_bipartite(3, 3), 0)
        assert brute_force_isomorphism(rep.first, rep.second) is None or rep.first.n > 8

    def test_complemented_variant(self):
        rep = q.witness_pair(q.complete_bipartite(3, 3), 0, complemented=True)
        assert rep.all_pass
        assert q.is_connected(rep.union)

    def test_refuses_planar(self):
        with pytest.raises(ValueError, match="planar"):
            q.witness_pair(q.complete_graph(4), 0)

    def test_refuses_non_vertex_transitive(self):
        # connected non-planar graph with a pendant vertex
        z = q.graph(7, list(q.complete_graph(5).edges) + [(4, 5), (5, 6)])
        assert not q.is_planar(z)
        with pytest.raises(ValueError, match="not vertex transitive"):
            q.witness_pair(z, 0)

    def test_report_dict_shape(self):
        rep = q.witness_pair(q.complete_bipartite(3, 3), 0)
        d = rep.to_dict()
        assert d["all_pass"] is True
        assert d["graphs"]["union"]["n"] == 48
        assert set(d["checks"]) == {
            "non_isomorphic", "wl_equivalent", "edge_class_mapped",
            "first_vertex_transitive", "second_vertex_transitive",
            "union_not_vertex_transitive", "cospectral"}


class TestParityLabels:
    def test_sidecar_format(self):
        z = q.cycle_graph(4)
        x0 = q.build_x0(z)
        text = q.write_parity_labels(x0, z)
        lines = text.strip().splitlines()
        assert len(lines) == x0.n
        for line, pv in zip(lines, x0.labels):
            v, anchor, mask = (int(p) for p in line.split())
            assert x0.labels[v] is pv
            assert anchor == pv.anchor
            incident = z.incident_edges(anchor)
            rebuilt = frozenset(e for i, e in enumerate(incident) if (mask >> i) & 1)
            assert rebuilt == pv.edge_subset
