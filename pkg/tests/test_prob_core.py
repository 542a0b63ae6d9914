import math

import numpy as np
import pytest

from ratebound.errors import ArgumentError, PreconditionError
from ratebound.prob_core import (
    FinitePmf,
    JointPmf,
    binary_entropy,
    conditional_second_moment_audit,
    entropy,
    epi_gap,
    fano_lower_bound,
    mutual_information,
    psi,
)


def bsc_joint(p):
    return JointPmf(["X", "Y"], [[0.5 * (1 - p), 0.5 * p], [0.5 * p, 0.5 * (1 - p)]])


class TestEntropy:
    def test_uniform_four_ary_is_two_bits(self):
        assert entropy(JointPmf(["X"], [0.25] * 4), "X") == pytest.approx(2.0, abs=1e-12)

    def test_point_mass_is_zero(self):
        assert entropy(JointPmf(["X"], [1.0, 0.0, 0.0]), "X") == 0.0

    def test_binary_entropy_at_011(self):
        assert entropy(JointPmf(["X"], [0.11, 0.89]), "X") == pytest.approx(0.4999, abs=1e-3)

    def test_unknown_variable_rejected(self):
        with pytest.raises(ArgumentError):
            entropy(JointPmf(["X"], [0.5, 0.5]), "Z")

    def test_conditional_entropy_of_copy_is_zero(self):
        p = JointPmf(["X", "Y"], [[0.5, 0.0], [0.0, 0.5]])
        assert entropy(p, "X", "Y") == pytest.approx(0.0, abs=1e-12)


class TestMutualInformation:
    def test_independent_pair(self):
        p = JointPmf(["X", "Y"], np.outer([0.3, 0.7], [0.6, 0.4]))
        assert mutual_information(p, "X", "Y") == pytest.approx(0.0, abs=1e-12)

    def test_identity_channel_one_bit(self):
        p = JointPmf(["X", "Y"], [[0.5, 0.0], [0.0, 0.5]])
        assert mutual_information(p, "X", "Y") == pytest.approx(1.0, abs=1e-12)

    def test_bsc_011(self):
        assert mutual_information(bsc_joint(0.11), "X", "Y") == pytest.approx(0.5001, abs=1e-3)
        assert mutual_information(bsc_joint(0.11), "X", "Y") == pytest.approx(1 - binary_entropy(0.11), abs=1e-12)

    def test_overlapping_sets_rejected(self):
        with pytest.raises(ArgumentError):
            mutual_information(bsc_joint(0.1), "X", "X")


class TestPsiAndFano:
    @pytest.mark.parametrize("x,expected", [(0, 0.0), (3, 1.0)])
    def test_psi_exact_points(self, x, expected):
        assert psi(x) == expected

    def test_psi_80(self):
        assert psi(80) == pytest.approx(3.1699, abs=1e-4)

    def test_psi_negative_rejected(self):
        with pytest.raises(ArgumentError):
            psi(-0.1)

    @pytest.mark.parametrize("h,card,expected", [(1.0, 4, 0.0), (2.0, 8, 1 / 3), (0.0, 16, 0.0)])
    def test_fano(self, h, card, expected):
        assert fano_lower_bound(h, card) == pytest.approx(expected, abs=1e-12)

    def test_fano_small_cardinality_rejected(self):
        with pytest.raises(ArgumentError):
            fano_lower_bound(1.0, 1)


class TestFinitePmf:
    def test_sum_checked(self):
        with pytest.raises(ArgumentError):
            FinitePmf((0.5, 0.6))

    def test_negative_rejected(self):
        with pytest.raises(ArgumentError):
            FinitePmf((1.5, -0.5))

    def test_p_min_ignores_zero(self):
        assert FinitePmf((0.0, 0.25, 0.75)).p_min == 0.25


def markov_triple(rng, na=3, nb=3, nc=3):
    pb = rng.dirichlet(np.ones(nb))
    pa_b = rng.dirichlet(np.ones(na), size=nb)
    pc_b = rng.dirichlet(np.ones(nc), size=nb)
    t = np.einsum("b,ba,bc->abc", pb, pa_b, pc_b)
    return JointPmf(["A", "B", "C"], t, {"A": rng.normal(size=na), "C": rng.normal(size=nc)})


class TestSecondMoment:
    def test_deterministic_given_b(self):
        t = np.zeros((2, 2, 2))
        t[0, 0, 1] = 0.4
        t[1, 1, 0] = 0.6
        rep = conditional_second_moment_audit(JointPmf(["A", "B", "C"], t, {"A": [1.0, -2.0], "C": [0.5, 3.0]}))
        assert rep.identity_violation == pytest.approx(0.0, abs=1e-12)
        assert rep.max_violation == pytest.approx(0.0, abs=1e-12)

    def test_random_markov_identity(self):
        rep = conditional_second_moment_audit(markov_triple(np.random.default_rng(11)))
        assert rep.identity_violation < 1e-10
        assert rep.inequality_violation == 0.0

    def test_non_markov_rejected(self):
        t = np.zeros((2, 2, 2))
        t[0, 0, 0] = t[1, 0, 1] = 0.5
        with pytest.raises(PreconditionError):
            conditional_second_moment_audit(JointPmf(["A", "B", "C"], t, {"A": [0.0, 1.0], "C": [0.0, 1.0]}))


class TestEpi:
    @pytest.mark.parametrize("vx,vy", [(1, 1), (2, 3)])
    def test_gaussian_equality(self, vx, vy):
        assert abs(epi_gap(vx, vy)) < 1e-9

    def test_uniform_quadrature_nonnegative(self):
        assert epi_gap(1.0, 2.0, mode="uniform") >= -1e-6

    def test_nonpositive_variance_rejected(self):
        with pytest.raises(ArgumentError):
            epi_gap(0.0, 1.0)


def test_marginal_reorders_axes():
    p = JointPmf(["X", "Y"], [[0.1, 0.2], [0.3, 0.4]])
    m = p.marginal(["Y", "X"])
    assert m.table[1, 0] == pytest.approx(0.2)
    assert math.isclose(m.table.sum(), 1.0)
