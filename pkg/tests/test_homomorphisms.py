import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conichom.errors import ParameterError, PreconditionError
from conichom.exact import alpha_exact, chi_exact
from conichom.graph import (
    Graph, categorical_product, classical_homomorphism, complement, complete, cycle, empty,
    homomorphic_product, path, petersen,
)
from conichom.homomorphisms import (
    INCONCLUSIVE, NO, STRONG, WEAK, YES, block_sums, categorical_meet_witness, clique_cover_witness,
    compose_witnesses, conic_alpha, conic_alpha_report, decide_hom, degenerate_weak_splus_witness,
    disjoint_union_witness, hom_residuals, hom_to_theta_witness, identity_witness,
    lemma_gram_check, lift_map_witness, make_witness, monotone_transform_big_theta,
    monotone_transform_theta, nonsignalling_check, repair_weak_to_strong_dnn,
    theta_to_hom_witness, weak_alpha_embedding,
)
from conichom.linalg import min_eigenvalue
from conichom.theta import ConeTag, big_theta, big_theta_residual, theta, theta_residual
from oracles import brute_hom_exists, graphs

CONIC = (ConeTag.DNN, ConeTag.SPLUS)
CONES = (ConeTag.CP, ConeTag.DNN, ConeTag.SPLUS)


@lru_cache(maxsize=None)
def decision(x, y, cone, mode=STRONG):
    return decide_hom(x, y, cone, mode)


def lift(x, y, phi=None):
    return lift_map_witness(phi if phi is not None else classical_homomorphism(x, y), x, y)


# -- decisions ---------------------------------------------------------------------------

class TestDecide:
    def test_cp_yes(self):
        d = decision(cycle(5), complete(3), ConeTag.CP)
        assert d.verdict == YES and d.exists and d.method == "combinatorial"
        assert d.witness.valid()

    def test_splus_no(self):
        d = decision(complete(3), cycle(5), ConeTag.SPLUS)
        assert d.verdict == NO and d.exists is False
        assert d.diagnostics["direct"]["route_verdict"] == NO
        assert d.diagnostics["theta"]["route_verdict"] == NO
        # the theta comparison that explains the verdict
        assert big_theta(complete(3), ConeTag.SPLUS).value > big_theta(cycle(5), ConeTag.SPLUS).value

    @pytest.mark.parametrize("cone", CONES)
    def test_reflexive(self, cone):
        g = cycle(5)
        d = decision(g, g, cone)
        assert d.verdict == YES
        assert np.array_equal(d.witness.h.data, identity_witness(g).h.data)

    def test_weak_splus_rejected(self):
        with pytest.raises(ParameterError):
            decide_hom(cycle(5), cycle(5), ConeTag.SPLUS, WEAK)
        with pytest.raises(ParameterError):
            decide_hom(cycle(5), cycle(5), ConeTag.DNN, "sideways")

    def test_weak_dnn_reflexive(self):
        d = decision(cycle(5), cycle(5), ConeTag.DNN, WEAK)
        assert d.verdict == YES and d.witness.mode == WEAK

    def test_trivial_graphs(self):
        assert decide_hom(Graph.from_edges(0), cycle(5), ConeTag.DNN).verdict == YES
        assert decide_hom(cycle(5), Graph.from_edges(0), ConeTag.DNN).verdict == NO

    @pytest.mark.parametrize("x,y", [(cycle(5), complete(3)), (complete(3), cycle(5)),
                                     (cycle(7), cycle(5)), (petersen(), complete(3)),
                                     (complete(4), cycle(7)), (path(3), complete(2))])
    def test_cone_chain_and_splus_criterion(self, x, y):
        verdicts = [decision(x, y, c).verdict for c in CONES]
        assert INCONCLUSIVE not in verdicts
        assert verdicts == sorted(verdicts, key=lambda v: v == YES)
        bx = big_theta(x, ConeTag.SPLUS).value
        by = big_theta(y, ConeTag.SPLUS).value
        assert (verdicts[2] == YES) == (bx <= by + 1e-6)

    def test_yes_witness_passes(self):
        for cone in CONIC:
            d = decision(cycle(5), complete(3), cone)
            assert d.verdict == YES and d.witness.valid(1e-7)
            assert d.witness.residuals.passes(STRONG, 1e-7)


@settings(max_examples=30)
@given(graphs(max_n=4), graphs(max_n=3))
def test_cp_chain(x, y):
    d = decide_hom(x, y, ConeTag.CP)
    truth = brute_hom_exists(x, y)
    assert (d.verdict == YES) == truth
    if x.n and y.n:
        assert (alpha_exact(homomorphic_product(x, y)) == x.n) == truth


# -- basic witnesses ---------------------------------------------------------------------

class TestIdentity:
    def test_k1(self):
        assert identity_witness(complete(1)).h.data.tolist() == [[1.0]]

    def test_k2_pattern(self):
        h = identity_witness(complete(2)).h.data
        expected = np.zeros((4, 4))
        for i in (0, 3):
            for j in (0, 3):
                expected[i, j] = 1.0
        assert np.array_equal(h, expected)

    def test_c5_residuals_zero(self):
        r = identity_witness(cycle(5)).residuals
        assert r.as_dict() == {"block_sum_dev": 0.0, "ortho_dev": 0.0, "mortho_dev": 0.0,
                               "cone_dev": 0.0}

    def test_lift_errors(self):
        with pytest.raises(ParameterError):
            lift_map_witness([0, 1], cycle(5), complete(3))
        with pytest.raises(ParameterError):
            lift_map_witness([0, 1, 0, 1, 5], cycle(5), complete(3))

    def test_residuals_detect_bad_matrix(self):
        r = hom_residuals(np.eye(15) / 3, cycle(5), complete(3), ConeTag.DNN)
        assert r.block_sum_dev > 0
        w = make_witness(np.eye(15) / 3, cycle(5), complete(3), ConeTag.DNN)
        assert not w.valid()


class TestCompose:
    def test_identity(self):
        i = identity_witness(cycle(5))
        assert np.array_equal(compose_witnesses(i, i).h.data, i.h.data)

    def test_lift_composition(self):
        c5, k3, k4 = cycle(5), complete(3), complete(4)
        phi = classical_homomorphism(c5, k3)
        psi = [2, 0, 3]
        w = compose_witnesses(lift(c5, k3, phi), lift(k3, k4, psi))
        assert np.array_equal(w.h.data, lift(c5, k4, [psi[v] for v in phi]).h.data)

    def test_solver_witnesses(self):
        for cone in CONIC:
            w1 = decision(cycle(5), complete(3), cone).witness
            w2 = decision(complete(3), complete(4), cone).witness
            w = compose_witnesses(w1, w2)
            bound = 10 * max(w1.residuals.worst(), w2.residuals.worst(), 1e-12)
            assert w.residuals.worst() <= bound

    def test_mismatch(self):
        with pytest.raises(ParameterError):
            compose_witnesses(identity_witness(cycle(5)), identity_witness(complete(3)))

    @given(graphs(max_n=4), st.integers(0, 2**31), st.integers(0, 2))
    def test_residual_bound(self, x, seed, extra):
        k = chi_exact(x) + extra
        y, z = complete(max(k, 1)), complete(max(k, 1) + 1)
        r = np.random.default_rng(seed)
        phi = classical_homomorphism(x, y)
        psi = r.permutation(z.n)[:y.n].tolist()
        w = compose_witnesses(lift(x, y, phi), lift(y, z, psi))
        assert w.residuals.worst() <= 1e-12
        assert np.array_equal(w.h.data, lift(x, z, [psi[v] for v in phi]).h.data)


class TestRepair:
    def test_strong_input_unchanged(self):
        w = identity_witness(cycle(5), ConeTag.DNN)
        weak = make_witness(w.h, w.x, w.y, ConeTag.DNN, WEAK)
        assert np.array_equal(repair_weak_to_strong_dnn(weak).h.data, w.h.data)

    def test_single_entry(self):
        # one block, two target vertices, off-diagonal mass c
        c = 0.2
        h = np.array([[0.5 - c, c], [c, 0.5 - c]])
        w = make_witness(h, complete(1), empty(2), ConeTag.DNN, WEAK)
        assert w.valid() and w.residuals.mortho_dev == pytest.approx(c)
        r = repair_weak_to_strong_dnn(w)
        assert r.h.data[0, 1] == 0.0
        assert np.allclose(r.h.data.diagonal(), [0.5, 0.5])
        assert r.valid() and r.mode == STRONG

    def test_solver_weak_witness(self):
        d = decision(cycle(5), complete(3), ConeTag.DNN, WEAK)
        r = repair_weak_to_strong_dnn(d.witness)
        assert r.residuals.worst(STRONG) <= 1e-7
        assert np.allclose(block_sums(r.h, 5, 3), block_sums(d.witness.h, 5, 3), atol=1e-12)

    def test_invalid_input(self):
        bad = make_witness(np.eye(15), cycle(5), complete(3), ConeTag.DNN, WEAK)
        with pytest.raises(PreconditionError):
            repair_weak_to_strong_dnn(bad)


class TestLattice:
    def test_meet_diagonal(self):
        z = cycle(5)
        w = categorical_meet_witness(identity_witness(z), identity_witness(z))
        diag = [v * z.n + v for v in range(z.n)]
        assert w.y == categorical_product(z, z)
        assert np.array_equal(w.h.data, lift(z, w.y, diag).h.data)

    def test_meet_lifts(self):
        c5, k3, k4 = cycle(5), complete(3), complete(4)
        p1, p2 = classical_homomorphism(c5, k3), classical_homomorphism(c5, k4)
        w = categorical_meet_witness(lift(c5, k3, p1), lift(c5, k4, p2))
        target = categorical_product(k3, k4)
        combined = [p1[v] * 4 + p2[v] for v in range(5)]
        assert np.array_equal(w.h.data, lift(c5, target, combined).h.data)
        assert w.valid(1e-12)

    def test_union_k1(self):
        k1 = complete(1)
        w = disjoint_union_witness(identity_witness(k1), identity_witness(k1))
        assert w.h.data.tolist() == [[1.0, 1.0], [1.0, 1.0]]

    def test_union_lifts(self):
        c5, c4, k3 = cycle(5), cycle(4), complete(3)
        p1, p2 = classical_homomorphism(c5, k3), classical_homomorphism(c4, k3)
        w = disjoint_union_witness(lift(c5, k3, p1), lift(c4, k3, p2))
        assert w.x.n == 9
        assert np.allclose(w.h.data, lift(w.x, k3, p1 + p2).h.data, atol=1e-15)
        assert np.allclose(block_sums(w.h, 9, 3), 1.0)

    @pytest.mark.parametrize("cone", CONIC)
    def test_solver_inputs(self, cone):
        w53 = decision(cycle(5), complete(3), cone).witness
        w54 = decision(cycle(5), complete(4), cone).witness
        w43 = decision(cycle(4), complete(3), cone).witness
        meet = categorical_meet_witness(w53, w54)
        assert meet.residuals.worst() <= 1e-6
        join = disjoint_union_witness(w53, w43)
        assert join.residuals.worst() <= 1e-6
        assert np.allclose(block_sums(join.h, 9, 3), 1.0, atol=1e-6)


class TestThetaCorrespondence:
    def test_forward_identity(self):
        m = hom_to_theta_witness(identity_witness(cycle(5)))
        assert m.total() == pytest.approx(5.0)
        assert m.trace() == pytest.approx(1.0)
        prod = homomorphic_product(cycle(5), cycle(5))
        assert theta_residual(m, prod, ConeTag.DNN) <= 1e-12

    def test_round_trip(self):
        w = lift(cycle(5), complete(3))
        back = theta_to_hom_witness(hom_to_theta_witness(w), cycle(5), complete(3), ConeTag.DNN)
        assert np.allclose(back.h.data, w.h.data, atol=1e-12)

    @pytest.mark.parametrize("cone", CONIC)
    def test_reverse_on_solver_output(self, cone):
        x, y = cycle(5), complete(3)
        t = theta(homomorphic_product(x, y), cone)
        assert t.value == pytest.approx(5.0, abs=1e-6)
        w = theta_to_hom_witness(t.solution, x, y, cone)
        assert w.valid(1e-7)

    def test_short_value(self):
        t = theta(homomorphic_product(complete(3), cycle(5)), ConeTag.SPLUS)
        with pytest.raises(PreconditionError):
            theta_to_hom_witness(t.solution, complete(3), cycle(5), ConeTag.SPLUS)
        with pytest.raises(PreconditionError):
            hom_to_theta_witness(make_witness(np.eye(1), complete(1), complete(1), ConeTag.DNN, WEAK))


class TestMonotone:
    def test_identity(self):
        g = cycle(5)
        m = theta(complement(g), ConeTag.SPLUS).solution
        assert np.allclose(monotone_transform_theta(m, identity_witness(g)).data, m.data)
        n_mat = big_theta(g, ConeTag.SPLUS).solution
        out, t, top = monotone_transform_big_theta(n_mat, identity_witness(g))
        assert np.allclose(out.data, n_mat.data)

    def test_theta_bar(self):
        x, y = cycle(5), complete(3)
        m = theta(complement(x), ConeTag.SPLUS).solution
        n_mat = monotone_transform_theta(m, lift(x, y))
        assert n_mat.total() == pytest.approx(math.sqrt(5), abs=1e-6)
        assert n_mat.trace() == pytest.approx(1.0, abs=1e-8)
        assert theta_residual(n_mat, complement(y), ConeTag.SPLUS) <= 1e-6
        assert n_mat.total() <= 3 + 1e-9

    def test_big_theta(self):
        x, y = cycle(5), complete(3)
        n_mat = big_theta(y, ConeTag.SPLUS).solution
        out, t, top = monotone_transform_big_theta(n_mat, lift(x, y))
        assert t == pytest.approx(3.0, abs=1e-6)
        assert top.min() >= -1e-9
        assert big_theta_residual(out, x, ConeTag.SPLUS) <= 1e-6
        assert min_eigenvalue(out.data - 1.0) >= -1e-6
        assert t >= math.sqrt(5)

    def test_preconditions(self):
        weak = make_witness(identity_witness(cycle(5)).h, cycle(5), cycle(5), ConeTag.DNN, WEAK)
        with pytest.raises(PreconditionError):
            monotone_transform_theta(np.eye(5) / 5, weak)
        with pytest.raises(ParameterError):
            monotone_transform_theta(np.eye(3) / 3, identity_witness(cycle(5)))


# -- conic independence numbers ----------------------------------------------------------

class TestConicAlpha:
    def test_examples(self):
        assert conic_alpha(cycle(5), ConeTag.CP) == 2
        assert conic_alpha(cycle(5), ConeTag.SPLUS) == 2 == math.floor(math.sqrt(5))
        assert conic_alpha(complete(4), ConeTag.DNN) == 1

    def test_weak_and_report(self):
        rep = conic_alpha_report(cycle(5), ConeTag.DNN, WEAK)
        assert rep["by_search"] == 2 and rep["agree"]
        rep = conic_alpha_report(empty(3), ConeTag.SPLUS)
        assert rep["guarded"] and rep["by_search"] == 3

    def test_weak_splus(self):
        with pytest.raises(ParameterError):
            conic_alpha(cycle(5), ConeTag.SPLUS, WEAK)

    def test_clique_cover_witness(self):
        # C4 has theta 2 and is covered by two edges
        g = cycle(4)
        t = theta(g, ConeTag.SPLUS)
        w = clique_cover_witness(t.solution, g)
        assert w.valid(1e-6) and w.x == complete(2)


# -- checks and degenerate constructions -------------------------------------------------

class TestChecks:
    def test_lemma_gram(self):
        assert lemma_gram_check(identity_witness(complete(2)).h, 2, 2)
        assert not lemma_gram_check(np.eye(2), 2, 1)
        for cone in CONIC:
            w = decision(cycle(5), complete(3), cone).witness
            assert lemma_gram_check(w.h, 5, 3)
        with pytest.raises(ParameterError):
            lemma_gram_check(np.eye(3), 2, 2)

    def test_nonsignalling(self):
        assert nonsignalling_check(identity_witness(cycle(5)).h, 5, 5)
        w = decision(cycle(5), complete(3), ConeTag.DNN, WEAK).witness
        assert nonsignalling_check(w.h, 5, 3, 1e-6)
        # X = K1 + K1 (no edges), Y = E2: perturb a valid witness keeping block sums
        h = identity_witness(empty(2)).h.data.copy()
        e = 0.25
        h[0, 1] += e
        h[1, 0] += e
        h[0, 0] -= e
        h[1, 1] -= e
        h[0, 2] -= e
        h[2, 0] -= e
        h[1, 2] += e
        h[2, 1] += e
        assert np.allclose(block_sums(h, 2, 2), 1.0)
        assert not nonsignalling_check(h, 2, 2)

    def test_degenerate_n1(self):
        h = degenerate_weak_splus_witness(1)
        assert h.dim == 2 and min_eigenvalue(h) >= -1e-12
        assert block_sums(h, 1, 2)[0, 0] == pytest.approx(1.0)

    def test_degenerate_k3(self):
        h = degenerate_weak_splus_witness(3)
        r = hom_residuals(h, complete(3), complete(2), ConeTag.SPLUS)
        assert r.ortho_dev == 0.0 and r.block_sum_dev <= 1e-15 and r.cone_dev <= 1e-12
        assert r.mortho_dev > 0  # only the weak conditions hold

    def test_degenerate_minimal_gamma(self):
        lo, hi = 0.0, 2.0
        for _ in range(60):
            mid = (lo + hi) / 2
            if min_eigenvalue(degenerate_weak_splus_witness(3, mid)) >= -1e-12:
                hi = mid
            else:
                lo = mid
        assert hi == pytest.approx(0.75, abs=1e-9)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_degenerate_against_all_graphs_with_k2(self, n):
        h = degenerate_weak_splus_witness(n)
        for g in (complete(n), empty(n), path(n)):
            r = hom_residuals(h, g, complete(2), ConeTag.SPLUS)
            assert max(r.block_sum_dev, r.ortho_dev, r.cone_dev) <= 1e-9

    def test_weak_alpha_embedding(self):
        d = decision(cycle(5), complete(3), ConeTag.DNN, WEAK)
        w = weak_alpha_embedding(d.witness)
        assert w.residuals.worst(WEAK) <= 1e-6
        assert w.x == complete(5)
