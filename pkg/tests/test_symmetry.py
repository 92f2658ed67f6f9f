import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qsym as q
from qsym.symmetry import Permutation

from oracles import (brute_force_automorphisms, brute_force_isomorphism,
                     haar_by_averaging, orbit_partition_from_elements,
                     orbital_partition_from_elements)


def small_graphs():
    return st.integers(min_value=0, max_value=10**6).flatmap(
        lambda seed: st.integers(min_value=1, max_value=7).map(
            lambda n: q.random_graph(n, seed)))


class TestPermutation:
    def test_composition_convention(self):
        p = Permutation((1, 2, 0))
        r = Permutation((0, 2, 1))
        assert (p * r).images == tuple(p(r(v)) for v in range(3))

    def test_inverse(self):
        p = Permutation((2, 0, 3, 1))
        assert (p * p.inverse()).is_identity()
        assert (p.inverse() * p).is_identity()

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0, 1))


class TestAutomorphismGroup:
    def test_complete_graph_full_symmetric(self):
        for n in (1, 2, 3, 4, 5, 6):
            assert q.automorphism_group(q.complete_graph(n)).order == math.factorial(n)

    def test_petersen_order(self):
        assert q.automorphism_group(q.petersen()).order == 120

    def test_cycle_dihedral(self):
        for n in (3, 5, 6, 8):
            assert q.automorphism_group(q.cycle_graph(n)).order == 2 * n

    def test_k33_order(self):
        assert q.automorphism_group(q.complete_bipartite(3, 3)).order == 72

    @given(small_graphs())
    @settings(max_examples=30, deadline=None)
    def test_order_matches_brute_force(self, g):
        assert q.automorphism_group(g).order == len(brute_force_automorphisms(g))

    @given(small_graphs())
    @settings(max_examples=20, deadline=None)
    def test_generators_are_automorphisms(self, g):
        group = q.automorphism_group(g)
        for p in group.generators:
            assert q.is_automorphism(g, p)

    def test_element_enumeration_matches_order(self):
        group = q.automorphism_group(q.petersen())
        elements = {p.images for p in group.elements()}
        assert len(elements) == group.order == 120
        assert set(elements) == set(brute_force_automorphisms(q.petersen()))


class TestOrbits:
    def test_petersen_orbitals(self):
        group = q.automorphism_group(q.petersen())
        part = q.orbitals(group)
        assert sorted(part.configuration.class_sizes) == [10, 30, 60]
        oracle = orbital_partition_from_elements(10, brute_force_automorphisms(q.petersen()))
        for cls in oracle:
            ids = {part.configuration.class_of(x, y) for x, y in cls}
            assert len(ids) == 1

    def test_edgeless_graph(self):
        group = q.automorphism_group(q.empty_graph(5))
        assert len(q.orbits(group)) == 1
        assert q.orbitals(group).orbital_count == 2

    def test_path_p3_hand_enumeration(self):
        group = q.automorphism_group(q.path_graph(3))
        assert group.order == 2
        assert q.orbits(group) == ((0, 2), (1,))
        assert q.orbitals(group).orbital_count == 5

    @given(small_graphs())
    @settings(max_examples=20, deadline=None)
    def test_orbits_match_brute_force(self, g):
        got = q.orbits(q.automorphism_group(g))
        oracle = orbit_partition_from_elements(g.n, brute_force_automorphisms(g))
        assert [set(o) for o in got] == [set(o) for o in oracle]

    @given(small_graphs())
    @settings(max_examples=15, deadline=None)
    def test_orbital_partition_is_coherent(self, g):
        part = q.orbitals(q.automorphism_group(g))
        assert q.verify_configuration(part.configuration).ok

    def test_orbital_partition_coherent_for_named_graphs(self):
        for g in (q.petersen(), q.cycle_graph(7), q.complete_bipartite(3, 3)):
            part = q.orbitals(q.automorphism_group(g))
            assert q.verify_configuration(part.configuration).ok

    @given(small_graphs())
    @settings(max_examples=15, deadline=None)
    def test_diagonal_restriction_reproduces_orbits(self, g):
        part = q.orbitals(q.automorphism_group(g))
        diag_classes = {}
        for v in range(g.n):
            diag_classes.setdefault(int(part.configuration.colors[v, v]), set()).add(v)
        assert sorted(map(frozenset, diag_classes.values()), key=min) == \
            [frozenset(o) for o in part.orbits]


class TestTransitivity:
    def test_vertex_transitive_cases(self):
        assert q.is_vertex_transitive(q.petersen())
        assert q.is_vertex_transitive(q.cycle_graph(6))
        assert not q.is_vertex_transitive(q.path_graph(3))

    def test_arc_transitive_cases(self):
        assert q.is_arc_transitive(q.cycle_graph(5))
        assert q.is_arc_transitive(q.petersen())
        assert not q.is_arc_transitive(q.path_graph(3))


class TestCommutant:
    def test_basis_spans_expected_matrices(self):
        g = q.petersen()
        group = q.automorphism_group(g)
        config = q.orbitals(group).configuration
        basis = q.commutant_basis(group)
        assert len(basis) == 3
        assert sum(b for b in basis).tolist() == np.ones((10, 10), dtype=int).tolist()
        # identity, adjacency and all-ones are constant on orbitals
        for m in (np.eye(10, dtype=int), g.adjacency_matrix(), np.ones((10, 10), dtype=int)):
            assert q.in_coherent_algebra(config, m)

    def test_commutes_with_group_examples(self):
        g = q.petersen()
        group = q.automorphism_group(g)
        assert q.commutes_with_group(group, g.adjacency_matrix())
        single = np.zeros((10, 10), dtype=int)
        single[0, 1] = 1
        assert not q.commutes_with_group(group, single)
        dist = [[int(d) if d != math.inf else g.n for d in row]
                for row in q.distance_matrix(g)]
        assert q.commutes_with_group(group, dist)

    def test_commutes_accepts_fraction_matrices(self):
        group = q.automorphism_group(q.cycle_graph(4))
        m = [[Fraction(1, 2) if (x - y) % 4 in (1, 3) else Fraction(0) for y in range(4)]
             for x in range(4)]
        assert q.commutes_with_group(group, m)

    @given(small_graphs())
    @settings(max_examples=12, deadline=None)
    def test_dimension_equals_orbital_count(self, g):
        group = q.automorphism_group(g)
        assert q.commutant_dimension(group) == q.orbitals(group).orbital_count

    def test_dimension_named_cases(self):
        for g in (q.petersen(), q.cycle_graph(7), q.complete_bipartite(3, 3)):
            group = q.automorphism_group(g)
            assert q.commutant_dimension(group) == q.orbitals(group).orbital_count


class TestHaar:
    def test_petersen_values(self):
        values = q.haar_values(q.petersen())
        assert sorted(values.orbital_values.values()) == [Fraction(1, 60), Fraction(1, 30),
                                                          Fraction(1, 10)]
        assert list(values.orbit_values.values()) == [Fraction(1, 10)]
        assert values.averaging_checked

    def test_row_sum_law(self):
        for g in (q.petersen(), q.path_graph(3), q.complete_graph(4)):
            values = q.haar_values(g)
            orbit_of = {}
            for i, orbit in enumerate(values.orbital_partition.orbits):
                for v in orbit:
                    orbit_of[v] = i
            for x in range(g.n):
                total = sum((values.orbit_values[orbit_of[y]]
                             for y in range(g.n) if orbit_of[y] == orbit_of[x]),
                            Fraction(0))
                assert total == 1

    def test_averaging_against_external_oracle(self):
        g = q.cycle_graph(5)
        values = q.haar_values(g)
        colors = values.orbital_partition.configuration.colors
        table = haar_by_averaging(5, brute_force_automorphisms(g))
        for x in range(5):
            for x2 in range(5):
                for y in range(5):
                    for y2 in range(5):
                        expected = table.get((x, x2, y, y2), Fraction(0))
                        same = colors[x, x2] == colors[y, y2]
                        got = values.orbital_values[int(colors[x, x2])] if same else Fraction(0)
                        assert got == expected

    def test_enumeration_bound_skips_check(self):
        values = q.haar_values(q.petersen(), enumeration_bound=10)
        assert not values.averaging_checked
        assert values.group_order == 120


class TestFixedPoints:
    def test_vertex_transitive_single_vector(self):
        group = q.automorphism_group(q.petersen())
        basis = q.fixed_point_basis(group, 1)
        assert len(basis) == 1
        assert basis[0].tolist() == [1] * 10

    def test_petersen_pair_vectors(self):
        group = q.automorphism_group(q.petersen())
        assert len(q.fixed_point_basis(group, 2)) == 3

    def test_edgeless_three(self):
        group = q.automorphism_group(q.empty_graph(3))
        assert len(q.fixed_point_basis(group, 2)) == 2

    def test_higher_order_rejected(self):
        group = q.automorphism_group(q.complete_graph(3))
        with pytest.raises(ValueError, match="m >= 3"):
            q.fixed_point_basis(group, 3)


class TestConfigurationGap:
    def test_petersen_tight(self):
        gap = q.configuration_gap(q.petersen())
        assert gap.refines and gap.tight
        assert gap.wl_classes == gap.orbital_classes == 3

    def test_complete_graph_tight(self):
        gap = q.configuration_gap(q.complete_graph(5))
        assert gap.tight and gap.wl_classes == 2

    @given(small_graphs())
    @settings(max_examples=15, deadline=None)
    def test_orbitals_always_refine(self, g):
        assert q.configuration_gap(g).refines


class TestIsomorphismSearch:
    def test_c5_self_complementary(self):
        c5 = q.cycle_graph(5)
        perm = q.find_isomorphism(c5, q.complement(c5))
        assert perm is not None

    def test_k3_vs_p3(self):
        assert q.find_isomorphism(q.complete_graph(3), q.path_graph(3)) is None

    @given(small_graphs(), st.randoms(use_true_random=False))
    @settings(max_examples=20, deadline=None)
    def test_recovers_random_relabeling(self, g, rnd):
        images = list(range(g.n))
        rnd.shuffle(images)
        h = g.relabel(tuple(images))
        perm = q.find_isomorphism(g, h)
        assert perm is not None
        mapped = {tuple(sorted((perm(u), perm(v)))) for u, v in g.edges}
        assert mapped == set(h.edges)

    @given(small_graphs(), small_graphs())
    @settings(max_examples=20, deadline=None)
    def test_agrees_with_brute_force(self, x, y):
        assert (q.find_isomorphism(x, y) is None) == (brute_force_isomorphism(x, y) is None)


class TestGeneratorFormat:
    def test_round_trip(self):
        group = q.automorphism_group(q.cycle_graph(6))
        text = q.write_generators(group)
        back = q.read_generators(text)
        assert back.degree == 6
        assert back.order == group.order

    def test_trivial_group_needs_degree(self):
        group = q.read_generators("", degree=4)
        assert group.order == 1

    def test_bad_line_rejected(self):
        with pytest.raises(q.FormatError):
            q.read_generators("0 1 1\n")
