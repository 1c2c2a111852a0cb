from fractions import Fraction

import pytest

from graphons import (FiniteGroup, InputError, blow_up, cayley_graphon,
                      complete, cycle, from_simple_graph, group_builtin,
                      node_transitivity_report, petersen, symmetric_connection,
                      t, transitive_to_cayley)
from graphons.graphs import enumerate_klabeled

F = Fraction


class TestFiniteGroup:
    def test_cyclic_two(self):
        g = FiniteGroup.cyclic(2)
        assert g.table == ((0, 1), (1, 0))
        assert g.identity == 0 and g.inv(1) == 1

    def test_dihedral_orders(self):
        g = FiniteGroup.dihedral(5)
        assert g.order == 10
        # reflections are involutions
        assert all(g.mul(x, x) == g.identity for x in range(5, 10))

    def test_symmetric_three(self):
        g = FiniteGroup.symmetric(3)
        assert g.order == 6
        FiniteGroup.from_table(g.table)  # revalidates associativity

    def test_direct_product(self):
        g = FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(3))
        assert g.order == 6

    def test_non_latin_square_rejected(self):
        with pytest.raises(InputError):
            FiniteGroup.from_table([[0, 1], [0, 1]])

    def test_nonassociative_rejected(self):
        # a Latin square without associativity (order-5 quasigroup)
        table = [[0, 1, 2, 3, 4],
                 [1, 0, 3, 4, 2],
                 [2, 4, 0, 1, 3],
                 [3, 2, 4, 0, 1],
                 [4, 3, 1, 2, 0]]
        with pytest.raises(InputError):
            FiniteGroup.from_table(table)

    def test_builtin_dispatch(self):
        assert group_builtin("cyclic", 7).order == 7
        with pytest.raises(InputError):
            group_builtin("quaternion", 8)


class TestCayleyGraphon:
    def test_two_element_group_bipartite(self):
        w = cayley_graphon(FiniteGroup.cyclic(2), [F(0), F(1)])
        assert w.matrix.tolist() == [[F(0), F(1)], [F(1), F(0)]]

    def test_cycle_indicator_reproduces_cycle(self):
        w = cayley_graphon(FiniteGroup.cyclic(5), [F(0), F(1), F(0), F(0), F(1)])
        ref = from_simple_graph(cycle(5))
        assert w.matrix.tolist() == ref.matrix.tolist()

    def test_asymmetric_connection_rejected(self):
        with pytest.raises(InputError):
            cayley_graphon(FiniteGroup.cyclic(5), [F(0), F(1), F(0), F(0), F(0)])

    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            cayley_graphon(FiniteGroup.cyclic(2), [F(0), F(3, 2)])

    def test_symmetric_connection_helper(self):
        g = FiniteGroup.dihedral(4)
        f = symmetric_connection(g, seed=3)
        assert all(f[x] == f[g.inv(x)] for x in range(g.order))

    @pytest.mark.parametrize("builder,arg,seed", [
        ("cyclic", 7, 21), ("dihedral", 5, 22), ("symmetric", 3, 23)])
    def test_cayley_graphons_node_transitive(self, builder, arg, seed):
        group = group_builtin(builder, arg)
        w = cayley_graphon(group, symmetric_connection(group, seed=seed))
        rep = node_transitivity_report(w, max_nodes=4)
        assert rep.node_transitive and rep.all_agree


class TestTransitiveToCayley:
    def test_c5_round_trip(self, c5_graphon):
        conv = transitive_to_cayley(c5_graphon)
        assert conv.group.order == 10
        assert conv.densities_match
        assert conv.translation_invariant
        assert conv.graphon.q == 10

    def test_constant_trivial_group(self):
        from graphons import constant
        conv = transitive_to_cayley(constant(F(1, 3)))
        assert conv.group.order == 1
        assert conv.densities_match

    def test_petersen_order_120(self, petersen_graphon):
        conv = transitive_to_cayley(petersen_graphon)
        assert conv.group.order == 120
        assert conv.densities_match
        assert conv.translation_invariant

    def test_rejects_non_transitive(self, nonlip_graphon):
        with pytest.raises(InputError):
            transitive_to_cayley(nonlip_graphon)

    def test_connection_is_symmetric(self, c5_graphon):
        conv = transitive_to_cayley(c5_graphon)
        g = conv.group
        assert all(conv.connection[x] == conv.connection[g.inv(x)]
                   for x in range(g.order))


class TestBlowUpWeakIsomorphism:
    @pytest.mark.parametrize("base,m", [(cycle(5), 2), (cycle(6), 2), (complete(4), 3)])
    def test_vertex_transitive_blow_up(self, base, m):
        w1 = from_simple_graph(base)
        w2 = from_simple_graph(blow_up(base, m))
        for motif in enumerate_klabeled(0, 4):
            assert t(motif, w1) == t(motif, w2)

    def test_petersen_blow_up_small_motifs(self):
        w1 = from_simple_graph(petersen())
        w2 = from_simple_graph(blow_up(petersen(), 2))
        for motif in enumerate_klabeled(0, 3):
            assert t(motif, w1) == t(motif, w2)
