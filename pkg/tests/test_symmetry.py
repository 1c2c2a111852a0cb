import itertools
from fractions import Fraction

import numpy as np
import pytest

from graphons import (CapExceeded, InputError, LabeledGraph, algebra_dimension,
                      automorphisms, complete, connection_entry_direct,
                      connection_matrix, constant, cycle, decompose,
                      from_simple_graph, frucht, is_psd, matrix_rank,
                      merge_twins, node_transitivity_report, oracle_partition,
                      orbit_equiv_oracle, orbit_labels, orbits, path, petersen,
                      r_operator, random_rational, spectral_action_check,
                      t_restricted)

F = Fraction


class TestAutomorphisms:
    def test_c5_dihedral(self, c5_graphon):
        assert automorphisms(c5_graphon).order == 10

    def test_petersen(self, petersen_graphon):
        assert automorphisms(petersen_graphon).order == 120

    def test_frucht_trivial(self):
        assert automorphisms(from_simple_graph(frucht())).order == 1

    def test_constant_trivial(self):
        assert automorphisms(constant(F(1, 2))).order == 1

    def test_rejects_impure(self):
        with pytest.raises(InputError):
            automorphisms(from_simple_graph(path(3)))

    def test_step_cap(self, c5_graphon):
        with pytest.raises(CapExceeded):
            automorphisms(c5_graphon, step_cap=3)

    def test_respects_weights(self):
        # same kernel as an edge, but asymmetric weights kill the swap
        w = from_simple_graph(complete(2))
        assert automorphisms(w).order == 2
        lop = merge_twins(w)[0]
        from graphons import StepGraphon
        lop = StepGraphon([F(1, 3), F(2, 3)], [[F(0), F(1)], [F(1), F(0)]])
        assert automorphisms(lop).order == 1

    def test_float_mode_matches_exact(self, c5_graphon):
        assert automorphisms(c5_graphon.to_float()).order == 10


class TestOrbits:
    def test_c5_single_node_orbit(self, c5_graphon):
        group = automorphisms(c5_graphon)
        assert len(orbits(group, 1)) == 1

    def test_trivial_group_singletons(self, nonlip_graphon):
        group = automorphisms(nonlip_graphon)
        assert len(orbits(group, 1)) == 4
        assert len(orbits(group, 2)) == 16

    def test_c5_pair_orbits(self, c5_graphon):
        group = automorphisms(c5_graphon)
        assert len(orbits(group, 2)) == 3

    def test_cap(self, petersen_graphon):
        group = automorphisms(petersen_graphon)
        with pytest.raises(CapExceeded):
            orbits(group, 2, cap=10)


class TestOracle:
    def test_reflexive(self, c5_graphon):
        ok, wit = orbit_equiv_oracle(c5_graphon, (0,), (0,))
        assert ok and wit is None

    def test_path_ends_equivalent(self):
        w = from_simple_graph(path(3))
        ok, wit = orbit_equiv_oracle(w, (0,), (2,), max_nodes=5)
        assert ok and wit is None

    def test_path_end_vs_middle_witnessed(self):
        w = from_simple_graph(path(3))
        ok, wit = orbit_equiv_oracle(w, (0,), (1,), max_nodes=5)
        assert not ok
        assert t_restricted(wit, w, (0,)) != t_restricted(wit, w, (1,))

    def test_nonlip_tail_steps_distinguished(self, nonlip_graphon):
        ok, wit = orbit_equiv_oracle(nonlip_graphon, (2,), (3,))
        assert not ok
        assert wit.node_count == 2

    @pytest.mark.parametrize("k", [1, 2])
    def test_partition_matches_group_orbits_on_c5(self, c5_graphon, k):
        group = automorphisms(c5_graphon)
        part = oracle_partition(c5_graphon, k, max_nodes=k + 3)
        labels = orbit_labels(group, k)
        pairs = list(itertools.product(range(5), repeat=k))
        for a in pairs:
            for b in pairs:
                assert (part[a] == part[b]) == (labels[a] == labels[b])


class TestConnectionMatrices:
    def test_constant_rank_one(self):
        cm = connection_matrix(constant(F(1, 3)), 1, 2)
        assert cm.rank() == 1 and cm.psd()

    def test_path_rank_two(self):
        w = merge_twins(from_simple_graph(path(3)))[0]
        cm = connection_matrix(w, 1, 3)
        assert cm.rank() == 2

    def test_petersen_rank_one(self, petersen_graphon):
        cm = connection_matrix(petersen_graphon, 1, 4)
        assert cm.rank() == 1 and cm.psd()

    def test_gram_identity_against_direct_gluing(self, nonlip_graphon):
        cm = connection_matrix(nonlip_graphon, 1, 3)
        for i, g in enumerate(cm.graphs):
            for j, h in enumerate(cm.graphs):
                assert connection_entry_direct(nonlip_graphon, g, h) == cm.matrix[i, j]

    def test_gram_identity_with_label_edges(self, nonlip_graphon):
        cm = connection_matrix(nonlip_graphon, 2, 3, independent_only=False)
        rng = np.random.default_rng(0)
        n = cm.size
        for _ in range(25):
            i, j = rng.integers(0, n, 2)
            g, h = cm.graphs[i], cm.graphs[j]
            assert connection_entry_direct(nonlip_graphon, g, h) == cm.matrix[i, j]

    def test_symmetric_and_psd(self, nonlip_graphon):
        cm = connection_matrix(nonlip_graphon, 2, 4, independent_only=True)
        n = cm.size
        assert all(cm.matrix[i, j] == cm.matrix[j, i] for i in range(n) for j in range(n))
        assert cm.psd()


class TestRankAndPsd:
    def test_zero_matrix(self):
        m = np.empty((3, 3), dtype=object)
        m[:] = F(0)
        assert matrix_rank(m) == 0 and is_psd(m)

    def test_identity(self):
        m = np.empty((3, 3), dtype=object)
        m[:] = F(0)
        for i in range(3):
            m[i, i] = F(1)
        assert matrix_rank(m) == 3 and is_psd(m)

    def test_rank_one_outer_product(self):
        v = [F(1), F(2), F(3)]
        m = np.empty((3, 3), dtype=object)
        for i in range(3):
            for j in range(3):
                m[i, j] = v[i] * v[j]
        assert matrix_rank(m) == 1 and is_psd(m)

    def test_negative_rejected(self):
        m = np.empty((2, 2), dtype=object)
        m[0, 0], m[0, 1], m[1, 0], m[1, 1] = F(1), F(2), F(2), F(1)
        assert not is_psd(m)

    def test_zero_diagonal_nonzero_row_rejected(self):
        m = np.empty((2, 2), dtype=object)
        m[0, 0], m[0, 1], m[1, 0], m[1, 1] = F(0), F(1), F(1), F(0)
        assert not is_psd(m)

    def test_float_rank(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert matrix_rank(m) == 1


class TestAlgebraDimension:
    def test_constant(self):
        assert algebra_dimension(constant(F(1, 3)), 1, 3) == 1

    def test_path_two_classes(self):
        w = merge_twins(from_simple_graph(path(3)))[0]
        assert algebra_dimension(w, 1, 5) == 2

    def test_c5_pairs(self, c5_graphon):
        assert algebra_dimension(c5_graphon, 2, 5, independent_only=True) == 3

    def test_never_exceeds_orbit_count(self, corpus):
        for name, w in corpus:
            pure, _ = merge_twins(w)
            group = automorphisms(pure)
            for k in (1, 2):
                n_orb = len(set(orbit_labels(group, k).values()))
                dim = algebra_dimension(pure, k, max_nodes=k + 3)
                assert dim <= n_orb, name


class TestTransitivityReport:
    def test_petersen_all_true(self, petersen_graphon):
        rep = node_transitivity_report(petersen_graphon)
        assert rep.verdicts == (True,) * 5 and rep.node_transitive

    def test_path_all_false(self):
        rep = node_transitivity_report(from_simple_graph(path(3)))
        assert rep.verdicts == (False,) * 5 and rep.all_agree

    def test_runs_on_unpurified_input(self):
        rep = node_transitivity_report(from_simple_graph(path(3)))
        assert rep.details["purified_steps"] == 2


class TestROperator:
    def test_matches_eigenfunction_scaling(self, c5_graphon):
        dec = decompose(c5_graphon)
        for r in range(dec.rank):
            out = np.asarray(r_operator(c5_graphon, dec.functions[:, r], 1),
                             dtype=float)
            assert np.abs(out - dec.eigenvalues[r] * dec.functions[:, r]).max() < 1e-9

    def test_constant_input_gives_edge_density_profile(self, c5_graphon):
        ones = np.empty(5, dtype=object)
        ones[:] = [F(1)] * 5
        out = r_operator(c5_graphon, ones, 1)
        k2dot = LabeledGraph(2, 1, [(0, 1)])
        for x in range(5):
            assert out[x] == t_restricted(k2dot, c5_graphon, (x,))

    def test_tensor_products_scale(self, c5_graphon):
        dec = decompose(c5_graphon)
        h = np.multiply.outer(dec.functions[:, 0], dec.functions[:, 1])
        out = np.asarray(r_operator(c5_graphon, h, 2), dtype=float)
        expect = (dec.eigenvalues[0] * dec.eigenvalues[1]
                  * dec.functions[:, 0] * dec.functions[:, 1])
        assert np.abs(out - expect).max() < 1e-9

    def test_equivariance_exact(self, c5_graphon):
        group = automorphisms(c5_graphon)
        rng = np.random.default_rng(5)
        h = np.empty((5, 5), dtype=object)
        for i in range(5):
            for j in range(5):
                h[i, j] = F(int(rng.integers(0, 9)), 8)
        base = r_operator(c5_graphon, h, 2)
        for sigma in group.elements:
            hg = np.empty((5, 5), dtype=object)
            for i in range(5):
                for j in range(5):
                    hg[i, j] = h[sigma[i], sigma[j]]
            moved = r_operator(c5_graphon, hg, 2)
            for x in range(5):
                assert moved[x] == base[sigma[x]]

    def test_shape_checked(self, c5_graphon):
        with pytest.raises(InputError):
            r_operator(c5_graphon, np.zeros((5, 4)), 2)


class TestSpectralAction:
    def test_identity_blocks(self, c5_graphon):
        rep = spectral_action_check(c5_graphon, tuple(range(5)))
        for block in rep.block_matrices:
            assert np.abs(block - np.eye(len(block))).max() < 1e-9

    def test_c5_rotations_orthogonal(self, c5_graphon):
        group = automorphisms(c5_graphon)
        dec = decompose(c5_graphon)
        for sigma in group.elements:
            rep = spectral_action_check(c5_graphon, sigma, decomp=dec)
            assert rep.max_block_residual < 1e-9
            assert rep.max_orthogonality_defect < 1e-9

    def test_petersen_all_sigma(self, petersen_graphon):
        group = automorphisms(petersen_graphon)
        dec = decompose(petersen_graphon)
        worst = 0.0
        for sigma in group.elements:
            rep = spectral_action_check(petersen_graphon, sigma, decomp=dec)
            worst = max(worst, rep.max_block_residual, rep.max_orthogonality_defect)
        assert worst < 1e-9

    def test_non_permutation_rejected(self, c5_graphon):
        with pytest.raises(InputError):
            spectral_action_check(c5_graphon, (0, 0, 1, 2, 3))


class TestFiniteInvariantAlgebra:
    def test_dimension_equals_invariant_function_count(self, corpus):
        # for pure graphons without an all-zero kernel row, the 1-variable
        # algebra has one dimension per node orbit
        for name, w in corpus:
            pure, _ = merge_twins(w)
            if any(all(x == 0 for x in row) for row in pure.matrix):
                continue
            group = automorphisms(pure)
            expected = len(group.node_orbits())
            max_nodes = 6 if name in ("frucht", "dyadic3") else 5
            if pure.q > 10 and max_nodes > 5:
                dim = algebra_dimension(pure, 1, max_nodes)
            else:
                dim = algebra_dimension(pure, 1, max_nodes)
            assert dim == expected, name
