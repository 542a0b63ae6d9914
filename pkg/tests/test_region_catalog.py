import math

import numpy as np
import pytest

from ratebound.channels import (
    GaussianBcParams,
    GaussianIcParams,
    bsc,
    cascade_bc,
    crc_messages,
    deterministic_table,
    product_net,
    random_net,
)
from ratebound.errors import ArgumentError, PreconditionError, StateError
from ratebound.prob_core import binary_entropy, psi
from ratebound.regimes import gaussian_cic_regime
from ratebound.region_catalog import (
    BEST_EFFORT,
    EXACT,
    evaluate_discrete,
    evaluate_factors,
    evaluate_gaussian,
    figure_data,
    gaussian_vertices,
    get_region,
    list_regions,
    region_ids,
    sum_rate_capacity,
    worst_violation,
)

FIG12 = GaussianIcParams(math.sqrt(2), math.sqrt(2.5), 80.0, 10.0)
FIG13_P10 = GaussianIcParams(math.sqrt(2.5), math.sqrt(0.25), 10.0, 10.0)


def _max(verts, i):
    return max(v[i] for v in verts)


class TestListing:
    def test_count_and_uniqueness(self):
        ids = region_ids()
        assert len(ids) >= 45
        assert len(set(ids)) == len(ids)

    def test_tiers(self):
        meta = {m["id"]: m for m in list_regions()}
        assert meta["HK-III-18"]["tier"] == "D"
        assert meta["unified-III-70"]["tier"] == "S"
        assert meta["gaussian-strong-CIC-III-24"]["tier"] == "G"
        assert meta["appendix-lifted-A-23"]["tier"] == "S"

    def test_roster_marks_time_sharing(self):
        roster = get_region("HK-III-18").roster()
        assert roster["W1"] == "auxiliary" and roster["X1"] == "input" and "Q" in roster

    def test_unknown_id(self):
        with pytest.raises(ArgumentError):
            get_region("no-such-region")


class TestGaussian:
    def test_strong_cic_corners(self):
        v = gaussian_vertices("gaussian-strong-CIC-III-24", FIG12)
        assert _max(v, 0) == pytest.approx(psi(80), abs=1e-9)
        assert _max(v, 1) == pytest.approx(psi(10), abs=1e-9)
        assert max(a + b for a, b in v) == pytest.approx(psi(100), abs=1e-9)

    def test_strong_cic_sum_corner(self):
        v = gaussian_vertices("gaussian-strong-CIC-III-24", FIG12)
        assert any(abs(a - psi(80)) < 1e-9 and abs(b - (psi(100) - psi(80))) < 1e-9 for a, b in v)

    def test_stamp_exact(self):
        assert get_region("gaussian-strong-CIC-III-24").stamp() == EXACT

    def test_osrsi_bc_contains_degraded(self):
        p = GaussianBcParams(math.sqrt(5), math.sqrt(50), 15.0)
        inner = evaluate_gaussian("gaussian-BC-swapped-III-9", p)
        outer = gaussian_vertices("OSRSI-BC-gaussian-III-111", p)
        assert _max(outer, 0) >= max(float(v[0]) for v in gaussian_vertices("gaussian-BC-swapped-III-9", p)) - 1e-9
        assert inner.variables == ("R1", "R2")

    def test_discrete_family_rejected_for_gaussian(self):
        with pytest.raises(ArgumentError):
            evaluate_gaussian("HK-III-18", FIG12)

    def test_figure_headers(self):
        for fig in (10, 12, 13, 15):
            header, rows = figure_data(fig)
            assert header[0] == "series" and rows
        with pytest.raises(ArgumentError):
            figure_data(11)


class TestSumRate:
    def test_mixed_sum_with_verdict(self):
        res = sum_rate_capacity("mixed-sum-gaussian-III-28", gaussian_cic_regime(FIG13_P10), FIG13_P10)
        assert res.value == pytest.approx(2.5850, abs=1e-4)
        assert res.stamp == EXACT

    def test_missing_verdict(self):
        with pytest.raises(StateError):
            sum_rate_capacity("mixed-sum-gaussian-III-28", None, FIG13_P10)

    def test_verdict_from_other_params(self):
        noisy = GaussianIcParams(0.2, 0.2, 1.0, 1.0)
        with pytest.raises(StateError):
            sum_rate_capacity("mixed-sum-gaussian-III-28", gaussian_cic_regime(FIG13_P10), noisy)

    def test_verdict_set_lacking_label(self):
        noisy = GaussianIcParams(0.2, 0.2, 1.0, 1.0)
        with pytest.raises(StateError):
            sum_rate_capacity("mixed-sum-gaussian-III-28", gaussian_cic_regime(noisy), FIG13_P10)

    def test_noisy_value(self):
        p = GaussianIcParams(0.2, 0.2, 1.0, 1.0)
        res = sum_rate_capacity("noisy-sum-gaussian-III-30", gaussian_cic_regime(p), p)
        assert res.value == pytest.approx(0.9720, abs=1e-4)

    def test_region_is_not_sum_rate(self):
        with pytest.raises(ArgumentError):
            sum_rate_capacity("HK-III-18", None, random_net(0))

    def test_discrete_needs_verdict(self):
        with pytest.raises(StateError):
            sum_rate_capacity("degraded-CIC-sum-III-93", None, random_net(0))


class TestDiscrete:
    def test_superposition_cascade_corners(self):
        # independent oracle: BSC capacities 1 - h(p) of each stage and the cascade
        r = evaluate_discrete("superposition-BC-III-8", cascade_bc(bsc(0.1), bsc(0.1)), fix={"R0": 0},
                              grid={"seed": 0})
        assert r.variables == ("R1", "R2")
        assert _max(r.vertices, 0) == pytest.approx(1 - binary_entropy(0.1), abs=1e-6)
        assert _max(r.vertices, 1) == pytest.approx(1 - binary_entropy(0.18), abs=1e-6)

    def test_useless_channel_collapses_to_origin(self):
        flat = np.full((2, 2, 2), 0.5)
        r = evaluate_discrete("Sato-III-20", product_net(flat, flat), grid={"seed": 0})
        assert r.vertices == [(0.0, 0.0)]

    def test_outer_bound_stamp(self):
        r = evaluate_discrete("Sato-III-20", random_net(1), grid={"seed": 0, "random_samples": 200})
        assert r.stamp == BEST_EFFORT

    def test_seeded_determinism(self):
        a = evaluate_discrete("HK-III-18", random_net(2), grid={"seed": 5, "random_samples": 300, "k": 0})
        b = evaluate_discrete("HK-III-18", random_net(2), grid={"seed": 5, "random_samples": 300, "k": 0})
        assert a.vertices == b.vertices

    def test_strong_capacity_inside_side_information_region(self):
        net = random_net(4)
        base = evaluate_discrete("strong-CIC-III-23", net, grid={"seed": 1, "random_samples": 500})
        side = evaluate_factors("OSRSI-CIC-strong-III-116", net, base.factor_tables)
        assert worst_violation(base.points, side.polyhedron) <= 1e-9

    def test_strong_capacity_inside_sato(self):
        net = random_net(6)
        base = evaluate_discrete("strong-CIC-III-23", net, grid={"seed": 3, "random_samples": 500})
        sato = evaluate_factors("Sato-III-20", net, base.factor_tables)
        assert worst_violation(base.points, sato.polyhedron) <= 1e-9

    def test_more_capable_rows_refine_less_noisy(self):
        net = random_net(5, messages=crc_messages())
        a = evaluate_discrete("more-capable-CRC-III-99", net, grid={"seed": 2, "random_samples": 300})
        b = evaluate_factors("less-noisy-CRC-III-52", net, a.factor_tables)
        assert worst_violation(a.points, b.polyhedron) <= 1e-9

    def test_capacity_without_verdict_is_best_effort(self):
        net = random_net(4)
        r = evaluate_discrete("strong-CIC-III-23", net, grid={"seed": 1, "random_samples": 100, "k": 0})
        assert r.stamp == BEST_EFFORT

    def test_gaussian_tier_has_no_discrete_evaluator(self):
        with pytest.raises(ArgumentError):
            evaluate_discrete("gaussian-BC-III-9", random_net(0))

    def test_semideterministic_precondition(self):
        with pytest.raises(PreconditionError):
            evaluate_discrete("semidet-CRC-III-49", random_net(5, messages=crc_messages()))

    def test_semideterministic_accepts_function(self):
        y1 = deterministic_table(lambda a, b: a ^ b, (2, 2), 2)
        y2 = np.array([[bsc(0.2)[b] for b in range(2)] for _ in range(2)])
        net = product_net(y1, y2, messages=crc_messages())
        r = evaluate_discrete("semidet-CRC-III-49", net, grid={"seed": 0, "random_samples": 100, "k": 0})
        assert r.point_count > 0

    def test_factor_shape_checked(self):
        with pytest.raises(ArgumentError):
            evaluate_factors("Sato-III-20", random_net(0), [np.full((3, 1, 2), 0.5)])

    def test_fix_unknown_rate(self):
        with pytest.raises(ArgumentError):
            evaluate_discrete("Sato-III-20", random_net(0), fix={"R7": 0})
