from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphons import (InputError, LabeledGraph, blow_up, builtin_quantum,
                      canonical_key, complete, cycle, enumerate_klabeled,
                      frucht, glue_product, multi_edge, path,
                      path_both_labeled, petersen, star, subdivide_edge,
                      unlabel)


def k2_dot():
    return LabeledGraph(2, 1, [(0, 1)])


class TestConstruction:
    def test_rejects_loops(self):
        with pytest.raises(InputError):
            LabeledGraph(2, 0, [(0, 0)])

    def test_rejects_repeated_simple_edge(self):
        with pytest.raises(InputError):
            LabeledGraph(2, 0, [(0, 1), (0, 1)])

    def test_multi_allows_repeats(self):
        g = multi_edge(2)
        assert g.edge_count == 2
        assert g.edge_multiplicities() == {(0, 1): 2}

    def test_label_count_bounds(self):
        with pytest.raises(InputError):
            LabeledGraph(2, 3, [])


class TestGlueProduct:
    def test_pendant_edges_glue_to_star(self):
        prod = glue_product(k2_dot(), k2_dot())
        assert prod.node_count == 3
        assert prod.edges == ((0, 1), (0, 2))

    def test_multi_pendant_edges_stay_disjoint(self):
        a = LabeledGraph(2, 1, [(0, 1)], "multi")
        prod = glue_product(a, a)
        assert prod.node_count == 3
        assert prod.edge_count == 2

    def test_p3_both_labeled_squares_to_4_cycle(self):
        p3 = path_both_labeled(2)
        prod = glue_product(p3, p3)
        assert prod.node_count == 4
        assert canonical_key(unlabel(prod)) == canonical_key(cycle(4))

    def test_mismatched_labels_rejected(self):
        with pytest.raises(InputError):
            glue_product(k2_dot(), path_both_labeled(2))

    def test_mismatched_kinds_rejected(self):
        with pytest.raises(InputError):
            glue_product(k2_dot(), LabeledGraph(2, 1, [(0, 1)], "multi"))

    def test_commutative_up_to_key(self):
        g = LabeledGraph(3, 1, [(0, 1), (1, 2)])
        h = LabeledGraph(3, 1, [(0, 1), (0, 2)])
        assert canonical_key(glue_product(g, h)) == canonical_key(glue_product(h, g))

    def test_associative_up_to_key(self):
        g = LabeledGraph(2, 1, [(0, 1)])
        h = LabeledGraph(3, 1, [(0, 2)])
        f = LabeledGraph(3, 1, [(1, 2)])
        lhs = glue_product(glue_product(g, h), f)
        rhs = glue_product(g, glue_product(h, f))
        assert canonical_key(lhs) == canonical_key(rhs)

    def test_node_count_identity(self):
        g = LabeledGraph(4, 2, [(0, 2), (2, 3)])
        h = LabeledGraph(3, 2, [(1, 2)])
        assert unlabel(glue_product(g, h)).node_count == 4 + 3 - 2


class TestUnlabel:
    @pytest.mark.parametrize("g", [k2_dot(), multi_edge(2, labels=2), path_both_labeled(2)])
    def test_drops_labels_only(self, g):
        u = unlabel(g)
        assert u.label_count == 0
        assert u.edges == g.edges
        assert u.node_count == g.node_count


class TestSubdivide:
    def test_pendant_edge_to_path(self):
        g = subdivide_edge(k2_dot(), (0, 1), 2)
        assert g.node_count == 3
        assert canonical_key(unlabel(g)) == canonical_key(path(3))

    def test_both_ends_labeled_rejected(self):
        with pytest.raises(InputError):
            subdivide_edge(path_both_labeled(1), (0, 1), 2)

    def test_m1_is_identity(self):
        g = k2_dot()
        assert subdivide_edge(g, (0, 1), 1) is g

    def test_triangle_edge_m3_gives_5_cycle(self):
        g = subdivide_edge(cycle(3), (0, 1), 3)
        assert (g.node_count, g.edge_count) == (5, 5)
        assert canonical_key(g) == canonical_key(cycle(5))


class TestBlowUp:
    def test_k2_doubles_to_c4(self):
        assert canonical_key(blow_up(complete(2), 2)) == canonical_key(cycle(4))

    def test_identity_factor(self):
        g = petersen()
        assert canonical_key(blow_up(g, 1)) == canonical_key(g)

    def test_edge_count_scales_by_square(self):
        g = blow_up(cycle(5), 2)
        assert g.node_count == 10
        assert g.edge_count == 4 * 5


class TestCanonicalKey:
    def test_relabeled_paths_agree(self):
        a = LabeledGraph(3, 0, [(0, 1), (1, 2)])
        b = LabeledGraph(3, 0, [(0, 2), (1, 2)])
        assert canonical_key(a) == canonical_key(b)

    def test_distinguishes_nonisomorphic(self):
        p3 = LabeledGraph(3, 0, [(0, 1), (1, 2)])
        k2_iso = LabeledGraph(3, 0, [(0, 1)])
        assert canonical_key(p3) != canonical_key(k2_iso)

    def test_star_has_one_key(self):
        keys = set()
        import itertools
        for perm in itertools.permutations(range(1, 4)):
            edges = [(0, p) for p in perm]
            keys.add(canonical_key(LabeledGraph(4, 0, edges)))
        assert len(keys) == 1

    def test_labels_fixed(self):
        a = LabeledGraph(3, 1, [(0, 1)])
        b = LabeledGraph(3, 1, [(1, 2)])
        assert canonical_key(a) != canonical_key(b)

    @given(st.integers(0, 2 ** 10 - 1), st.permutations(list(range(5))))
    @settings(max_examples=60, deadline=None)
    def test_invariant_under_relabeling(self, mask, perm):
        pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
        edges = [pairs[i] for i in range(10) if mask >> i & 1]
        g = LabeledGraph(5, 0, edges)
        h = LabeledGraph(5, 0, [(perm[u], perm[v]) for u, v in edges])
        assert canonical_key(g) == canonical_key(h)


class TestEnumeration:
    def test_small_unlabeled_counts(self):
        assert len(enumerate_klabeled(0, 2)) == 3
        per_n = {}
        for g in enumerate_klabeled(0, 4):
            per_n[g.node_count] = per_n.get(g.node_count, 0) + 1
        assert per_n == {1: 1, 2: 2, 3: 4, 4: 11}

    def test_single_label_single_node(self):
        out = enumerate_klabeled(1, 1)
        assert len(out) == 1
        assert out[0].node_count == 1

    def test_two_independent_labels_two_nodes(self):
        out = enumerate_klabeled(2, 2, independent_labels=True)
        assert len(out) == 1
        assert out[0].edge_count == 0

    def test_keys_distinct_and_sorted(self):
        out = enumerate_klabeled(1, 4)
        keys = [canonical_key(g) for g in out]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    def test_independent_flag_excludes_label_edges(self):
        full = enumerate_klabeled(2, 3)
        indep = enumerate_klabeled(2, 3, independent_labels=True)
        assert len(indep) < len(full)
        assert all(not any(u < 2 and v < 2 for u, v in g.edges) for g in indep)


class TestNamedGraphs:
    def test_petersen_shape(self):
        g = petersen()
        assert (g.node_count, g.edge_count) == (10, 15)
        degs = [0] * 10
        for u, v in g.edges:
            degs[u] += 1
            degs[v] += 1
        assert degs == [3] * 10

    def test_frucht_shape(self):
        g = frucht()
        assert (g.node_count, g.edge_count) == (12, 18)
        degs = [0] * 12
        for u, v in g.edges:
            degs[u] += 1
            degs[v] += 1
        assert degs == [3] * 12

    def test_star(self):
        g = star(3)
        assert (g.node_count, g.edge_count) == (4, 3)


class TestQuantumGraphs:
    def test_h_has_three_terms(self):
        h = builtin_quantum("h")
        assert [c for c, _ in h.terms] == [Fraction(1), Fraction(-2), Fraction(1)] \
            or sorted(c for c, _ in h.terms) == [Fraction(-2), Fraction(1), Fraction(1)]
        assert h.label_count == 2

    def test_f_is_one_minus_h(self):
        f = builtin_quantum("f")
        h = builtin_quantum("h")
        total = f + h
        assert len(total.terms) == 1
        coef, g = total.terms[0]
        assert coef == 1 and g.edge_count == 0 and g.node_count == 2

    def test_combines_duplicate_terms(self):
        g = k2_dot()
        q = type(builtin_quantum("h"))([(Fraction(1), g), (Fraction(2), g)])
        assert len(q.terms) == 1
        assert q.terms[0][0] == 3

    def test_zero_terms_dropped(self):
        g = k2_dot()
        q = type(builtin_quantum("h"))(
            [(Fraction(1), g), (Fraction(-1), LabeledGraph(2, 1, [(0, 1)]))])
        assert len(q.terms) == 0

    def test_unknown_name_rejected(self):
        with pytest.raises(InputError):
            builtin_quantum("g")
