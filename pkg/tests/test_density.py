import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphons import (CapExceeded, Caps, LabeledGraph, builtin_quantum,
                      complete, constant, cycle, dyadic, from_simple_graph,
                      glue_product, l2_metric, multi_edge, neighborhood_metric,
                      nonlip, operator_power, path, path_both_labeled,
                      petersen, random_rational, t, t_graph, t_quantum,
                      t_restricted, unlabel)
from graphons.graphs import enumerate_klabeled

F = Fraction


class TestPlainDensities:
    def test_edge_in_constant(self):
        assert t(complete(2), constant(F(1, 2))) == F(1, 2)

    def test_edge_in_c5(self, c5_graphon):
        assert t(complete(2), c5_graphon) == F(2, 5)

    def test_triangle_free(self, c5_graphon):
        assert t(complete(3), c5_graphon) == 0

    def test_c4_in_k4(self):
        w = from_simple_graph(complete(4))
        assert t(cycle(4), w) == F(84, 256)

    def test_multigraph_density(self):
        # a double edge squares the kernel entry
        w = constant(F(1, 2))
        assert t(multi_edge(2), w) == F(1, 4)

    def test_labeled_graph_rejected(self):
        with pytest.raises(Exception):
            t(LabeledGraph(2, 1, [(0, 1)]), constant(F(1, 2)))

    def test_node_cap(self):
        with pytest.raises(CapExceeded):
            t(path(9), constant(F(1, 2)))

    def test_assignment_cap(self):
        w = random_rational(6, seed=0)
        with pytest.raises(CapExceeded):
            t(path(8), w, caps=Caps(max_assignments=10 ** 5))


class TestRestrictedDensities:
    def test_nonlip_anchor_values(self, nonlip_graphon):
        k2dot = LabeledGraph(2, 1, [(0, 1)])
        assert t_restricted(k2dot, nonlip_graphon, (2,)) == F(97, 300)
        assert t_restricted(k2dot, nonlip_graphon, (3,)) == F(197, 300)

    def test_single_labeled_node_is_one(self, nonlip_graphon):
        single = LabeledGraph(1, 1, [])
        for a in range(4):
            assert t_restricted(single, nonlip_graphon, (a,)) == 1

    def test_anchor_out_of_range(self, nonlip_graphon):
        with pytest.raises(Exception):
            t_restricted(LabeledGraph(1, 1, []), nonlip_graphon, (7,))

    def test_label_label_edges_counted(self, bipartite):
        k2both = path_both_labeled(1)
        assert t_restricted(k2both, bipartite, (0, 1)) == 1
        assert t_restricted(k2both, bipartite, (0, 0)) == 0


class TestQuantumDensities:
    def test_h_gives_squared_l2_distance(self):
        h = builtin_quantum("h")
        w = random_rational(5, seed=3)
        d2 = l2_metric(w).squared
        for x in range(5):
            for y in range(5):
                assert t_quantum(h, w, (x, y)) == d2[x][y]

    def test_h_vanishes_on_diagonal(self):
        h = builtin_quantum("h")
        w = constant(F(1, 2))
        assert t_quantum(h, w, (0, 0)) == 0

    def test_f_on_constant_is_one(self):
        f = builtin_quantum("f")
        assert t_quantum(f, constant(F(1, 3)), (0, 0)) == 1

    def test_linearity(self, c5_graphon):
        from graphons import QuantumGraph
        k2 = complete(2)
        q = QuantumGraph([(F(2), k2), (F(-1), k2)])
        assert t_quantum(q, c5_graphon) == t(k2, c5_graphon)


class TestGraphGraphDensities:
    def test_k2_in_k2(self):
        assert t_graph(complete(2), complete(2)) == F(1, 2)

    def test_k2_in_c5(self):
        assert t_graph(complete(2), cycle(5)) == F(2, 5)

    def test_c4_in_k4(self):
        assert t_graph(cycle(4), complete(4)) == F(84, 256)

    @pytest.mark.parametrize("target", [complete(2), path(3), cycle(5)])
    def test_agreement_with_step_engine(self, target):
        w = from_simple_graph(target)
        for motif in enumerate_klabeled(0, 5):
            assert t(motif, w) == t_graph(motif, target)

    def test_agreement_on_petersen(self, petersen_graphon):
        for motif in enumerate_klabeled(0, 4):
            assert t(motif, petersen_graphon) == t_graph(motif, petersen())


class TestStructuralIdentities:
    def test_disjoint_union_multiplies(self, nonlip_graphon):
        tri, edge = cycle(3), complete(2)
        both = LabeledGraph(5, 0, list(tri.edges) + [(u + 3, v + 3) for u, v in edge.edges])
        assert t(both, nonlip_graphon) == t(tri, nonlip_graphon) * t(edge, nonlip_graphon)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_path_density_equals_operator_power(self, nonlip_graphon, m):
        pm = path_both_labeled(m)
        power = operator_power(nonlip_graphon, m)
        for x in range(4):
            for y in range(4):
                assert t_restricted(pm, nonlip_graphon, (x, y)) == power.matrix[x, y]

    def test_glue_density_is_weighted_inner_product(self, nonlip_graphon):
        # for independent labels, t(unlabel(GH)) is the b^k-weighted inner
        # product of the two restricted-density vectors
        w = nonlip_graphon
        fam = enumerate_klabeled(2, 4, independent_labels=True)
        for g, h in itertools.islice(itertools.combinations(fam, 2), 40):
            direct = t(unlabel(glue_product(g, h)), w)
            acc = F(0)
            for a in itertools.product(range(4), repeat=2):
                acc += (w.weights[a[0]] * w.weights[a[1]]
                        * t_restricted(g, w, a) * t_restricted(h, w, a))
            assert direct == acc

    def test_float_mode_tracks_exact(self, nonlip_graphon):
        wf = nonlip_graphon.to_float()
        for motif in enumerate_klabeled(0, 4)[:10]:
            assert abs(t(motif, wf) - float(t(motif, nonlip_graphon))) < 1e-12


class TestLipschitzBound:
    @pytest.mark.parametrize("factory", [lambda: nonlip(F(1, 100)), lambda: dyadic(3)])
    def test_restricted_density_lipschitz_in_r(self, factory):
        # |t_a(F) - t_b(F)| <= |E(F)| * max_i r(a_i, b_i) for multigraphs
        # with nonadjacent labeled nodes
        w = factory()
        r = neighborhood_metric(w).values
        motifs = [
            LabeledGraph(2, 1, [(0, 1)]),
            LabeledGraph(2, 1, [(0, 1), (0, 1)], "multi"),
            LabeledGraph(3, 2, [(0, 2), (1, 2)], "multi"),
            LabeledGraph(4, 2, [(0, 2), (1, 3), (2, 3), (2, 3)], "multi"),
        ]
        for motif in motifs:
            k = motif.label_count
            e = motif.edge_count
            for a in itertools.product(range(w.q), repeat=k):
                for b in itertools.product(range(w.q), repeat=k):
                    gap = abs(t_restricted(motif, w, a) - t_restricted(motif, w, b))
                    bound = e * max(r[a[i]][b[i]] for i in range(k))
                    assert gap <= bound


class TestOrbitInvariance:
    def test_multigraph_densities_constant_on_orbits(self, c5_graphon):
        # anchors in the same automorphism orbit agree for multigraphs too
        from graphons import automorphisms
        group = automorphisms(c5_graphon)
        motifs = [multi_edge(2, labels=1),
                  LabeledGraph(3, 1, [(0, 1), (0, 1), (1, 2)], "multi"),
                  LabeledGraph(3, 2, [(0, 2), (0, 2), (1, 2)], "multi")]
        for motif in motifs:
            k = motif.label_count
            for sigma in group.elements:
                for a in itertools.product(range(5), repeat=k):
                    image = tuple(sigma[x] for x in a)
                    assert t_restricted(motif, c5_graphon, a) == \
                        t_restricted(motif, c5_graphon, image)


@given(st.integers(0, 10 ** 6), st.integers(2, 4))
@settings(max_examples=20, deadline=None)
def test_density_in_unit_interval(seed, nodes):
    w = random_rational(4, seed=seed)
    motif = path(nodes)
    val = t(motif, w)
    assert 0 <= val <= 1
