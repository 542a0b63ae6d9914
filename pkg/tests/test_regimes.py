import math

import numpy as np
import pytest

from ratebound.channels import GaussianIcParams, bsc, cascade_bc, product_net, quantized_gaussian_cic, random_net
from ratebound.errors import ArgumentError, StateError
from ratebound.regimes import (
    CONDITIONS,
    COUNTEREXAMPLE,
    EXACT_FAILS,
    EXACT_HOLDS,
    HOLDS,
    condition,
    extension_audit,
    gaussian_cic_regime,
    gaussian_crc_regime,
    recheck_witness,
    universal_condition_check,
)

SMALL = {"k": 4, "random_samples": 300, "descent_steps": 40}


class TestGaussianCic:
    def test_fig12_strong(self):
        assert gaussian_cic_regime(GaussianIcParams(math.sqrt(2), math.sqrt(2.5), 80, 10))["regime"] == "strong"

    def test_fig13_mixed_side_one(self):
        r = gaussian_cic_regime(GaussianIcParams(math.sqrt(2.5), math.sqrt(0.25), 10, 10))
        assert (r["regime"], r["strong_side"]) == ("mixed", 1)

    def test_noisy(self):
        r = gaussian_cic_regime(GaussianIcParams(0.2, 0.2, 1, 1))
        assert r["regime"] == "noisy" and r["labels"]["noisy"].status == EXACT_HOLDS

    def test_zic_labels_when_gain_vanishes(self):
        r = gaussian_cic_regime(GaussianIcParams(2.0, 0.0, 1, 1))
        assert r["labels"]["zic_strong"].status == EXACT_HOLDS


class TestGaussianCrc:
    def test_fig15_degraded_more_capable(self):
        r = gaussian_crc_regime(GaussianIcParams(math.sqrt(5), 1 / math.sqrt(5), 5, 7))
        assert r["labels"]["degraded_mc"].status == EXACT_HOLDS

    def test_unit_gains_strong(self):
        r = gaussian_crc_regime(GaussianIcParams(1, 1, 3, 2))
        assert r["labels"]["strong"].status == EXACT_HOLDS

    def test_weak_primary(self):
        r = gaussian_crc_regime(GaussianIcParams(0, 0.5, 1, 1))
        assert r["labels"]["weak_primary"].status == EXACT_HOLDS
        assert r["labels"]["strong_primary"].status == EXACT_FAILS

    def test_zero_p2_rejected(self):
        with pytest.raises(ArgumentError):
            gaussian_crc_regime(GaussianIcParams(1, 1, 1, 0))


class TestUniversal:
    def test_sixteen_conditions(self):
        assert len(CONDITIONS) == 16

    def test_unknown_condition(self):
        with pytest.raises(ArgumentError):
            condition("no-such-condition")

    def test_degraded_bc_more_capable(self):
        v = universal_condition_check(cascade_bc(bsc(0.1), bsc(0.1)), "BC-more-capable", budget=SMALL, seed=0)
        assert v.status == HOLDS and v.min_gap >= -1e-9

    def test_identical_marginals_equal_capable(self):
        rng = np.random.default_rng(2)
        m = rng.dirichlet(np.ones(2), size=(2, 1))
        v = universal_condition_check(product_net(m, m), "BC-equal-capable", budget=SMALL, seed=0)
        assert v.status == HOLDS and abs(v.min_gap) < 1e-7

    def test_random_net_strong_counterexample_rechecks(self):
        net = random_net(3)
        v = universal_condition_check(net, "CIC-strong", budget=SMALL, seed=0)
        assert v.status == COUNTEREXAMPLE
        assert recheck_witness(net, v) < -v.tol / 2

    def test_holds_note(self):
        v = universal_condition_check(cascade_bc(bsc(0.1), bsc(0.1)), "BC-less-noisy", budget=SMALL, seed=0)
        assert "not a proof" in v.to_dict()["note"]

    def test_seeded_determinism(self):
        net = random_net(4)
        a = universal_condition_check(net, "CIC-mixed", budget=SMALL, seed=9)
        b = universal_condition_check(net, "CIC-mixed", budget=SMALL, seed=9)
        assert a.to_dict() == b.to_dict()

    def test_quantized_strong_gaussian_not_refuted(self):
        net = quantized_gaussian_cic(GaussianIcParams(1.5, 1.5, 1.0, 1.0), levels=8)
        v = universal_condition_check(net, "CIC-strong", budget=SMALL, seed=0, tol=1e-6)
        assert v.status != COUNTEREXAMPLE


class TestExtensionAudit:
    def test_identical_outputs_strong(self):
        rng = np.random.default_rng(6)
        m = rng.dirichlet(np.ones(2), size=(2, 2))
        net = product_net(m, m)
        v = universal_condition_check(net, "CIC-strong", budget=SMALL, seed=0)
        assert v.status == HOLDS
        rep = extension_audit(net, "CIC-strong", v, samples=300, seed=1)
        assert rep.passed and rep.min_gap >= -1e-9

    def test_refuses_without_holding_verdict(self):
        net = random_net(3)
        v = universal_condition_check(net, "CIC-strong", budget=SMALL, seed=0)
        with pytest.raises(StateError):
            extension_audit(net, "CIC-strong", v)

    def test_crc_identical_outputs(self):
        rng = np.random.default_rng(12)
        m = rng.dirichlet(np.ones(2), size=(2, 2))
        net = product_net(m, m)
        v = universal_condition_check(net, "CRC-strong", budget=SMALL, seed=0)
        rep = extension_audit(net, "CRC-strong", v, samples=300, seed=2)
        assert rep.passed
