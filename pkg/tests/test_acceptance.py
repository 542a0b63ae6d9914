"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Frozen reference values come from two routes where possible: the library
call under test and an independent calculator written here with math/numpy.
"""

import contextlib
import math
import time

import numpy as np
import pytest

from ratebound.channels import (
    GaussianBcParams,
    GaussianIcParams,
    bsc,
    deterministic_table,
    product_net,
    random_net,
)
from ratebound.infoexpr import EntropyValuation, InfoExpr, parse_linear
from ratebound.polyhedra import RatePolyhedron, normalize, same_set
from ratebound.prob_core import JointPmf, entropy, mutual_information
from ratebound.regimes import (
    COUNTEREXAMPLE,
    gaussian_cic_regime,
    recheck_witness,
    universal_condition_check,
)
from ratebound.region_catalog import (
    EXACT,
    evaluate_discrete,
    evaluate_factors,
    gaussian_rows,
    gaussian_vertices,
    get_region,
    merge_results,
    product_input_tables,
    sum_rate_capacity,
    worst_violation,
)
from ratebound.scheme_graph import builtin_graph, covering_constraints, derive_region, packing_constraints
from ratebound.typicality import bound_audit


def cap(x):
    """Gaussian capacity in bits, written out independently of the library."""
    return 0.5 * math.log2(1 + x)


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@contextlib.contextmanager
def criterion(capsys, number, title, budget=None, shortfalls=()):
    """Time a criterion and print its line.

    ``shortfalls`` lists ledgered parts that cannot be met; they are checked
    in separate strict-xfail tests and turn a pass into PARTIAL here.
    """
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        took = time.perf_counter() - start
        if ok and budget is not None and took >= budget:
            ok = False
        with capsys.disabled():
            status = ("PARTIAL" if shortfalls else "PASS") if ok else "FAIL"
            limit = f" (limit {budget:g} s)" if budget else ""
            print(f"\ncriterion {number}: {status} {title} [{took:.2f} s{limit}]")
            for note in shortfalls:
                print(f"criterion {number} shortfall: {note}")
    if budget is not None:
        assert took < budget, f"criterion {number} took {took:.2f} s"


FIG10 = GaussianBcParams(math.sqrt(5), math.sqrt(50), 15.0)
FIG12 = GaussianIcParams(math.sqrt(2), math.sqrt(2.5), 80.0, 10.0)
FIG15 = GaussianIcParams(math.sqrt(5), 1 / math.sqrt(5), 5.0, 7.0)


def fig13(power):
    return GaussianIcParams(math.sqrt(2.5), math.sqrt(0.25), power, power)


def test_criterion_01_strong_cic_corners(capsys):
    with criterion(capsys, 1, "Gaussian strong-CIC corners at the figure-12 parameters", budget=1.0):
        v = gaussian_vertices("gaussian-strong-CIC-III-24", FIG12)
        r1 = max(p[0] for p in v)
        r2 = max(p[1] for p in v)
        s = max(p[0] + p[1] for p in v)
        for got, frozen, oracle in (
            (r1, 3.1699, cap(80)),
            (r2, 1.7297, cap(10)),
            (s, 3.3291, min(cap(80 + 2 * 10), cap(2.5 * 80 + 10))),
        ):
            assert abs(got - frozen) <= 1e-4
            assert abs(got - oracle) <= 1e-12


SHORTFALL_2 = ("frozen 2.7036 is 1.2e-4 from the closed form 2.703482 (test_criterion_02_frozen_literal, xfail); "
               "at P = 1 both sum-rates tie at 0.923998, so strictness holds only at P = 5, 10, 20")
SHORTFALL_3 = ("frozen 3.1241 is 1.4e-4 from the closed form psi(75) = 3.123964 "
               "(test_criterion_03_frozen_literal, xfail)")


def _sum_rates(power):
    q = fig13(power)
    v = gaussian_cic_regime(q)
    return (sum_rate_capacity("mixed-sum-gaussian-III-28", v, q).value,
            sum_rate_capacity("OSRSI-CIC-weak-sum-gaussian-III-118", v, q).value)


def test_criterion_02_mixed_vs_side_information(capsys):
    with criterion(capsys, 2, "mixed sum-rate 2.5850 vs side-information sum-rate at P = 10, strict gain",
                   budget=1.0, shortfalls=(SHORTFALL_2,)):
        mixed, side = _sum_rates(10.0)
        assert abs(mixed - 2.5850) <= 1e-4
        assert abs(mixed - min(cap(10 + 2.5 * 10), cap(10) + cap(10 / (0.25 * 10 + 1)))) <= 1e-12
        assert abs(side - (cap(10) + cap(10 / (0.25 * 10 + 1)))) <= 1e-12
        for power in (5.0, 10.0, 20.0):
            mixed, side = _sum_rates(power)
            assert side > mixed + 1e-6
        mixed, side = _sum_rates(1.0)
        assert abs(side - mixed) < 1e-12 and abs(side - 0.9240) < 1e-4


@pytest.mark.xfail(strict=True, reason="ledgered: closed form gives 2.703482, outside 2.7036 +- 1e-4")
def test_criterion_02_frozen_literal():
    assert abs(_sum_rates(10.0)[1] - 2.7036) <= 1e-4


@pytest.mark.xfail(strict=True, reason="ledgered: mixed and side-information sum-rates tie at P = 1")
def test_criterion_02_strict_at_unit_power():
    mixed, side = _sum_rates(1.0)
    assert side > mixed


def test_criterion_03_side_information_bc(capsys):
    with criterion(capsys, 3, "side-information BC corners and strict improvement over the degraded BC", budget=1.0,
                   shortfalls=(SHORTFALL_3,)):
        v = gaussian_vertices("OSRSI-BC-gaussian-III-111", FIG10)
        r1 = max(p[0] for p in v)
        s = max(p[0] + p[1] for p in v)
        assert abs(r1 - cap(5 * 15)) <= 1e-12
        assert abs(s - 4.7764) <= 1e-4 and abs(s - cap(50 * 15)) <= 1e-12
        at_max = max(p[1] for p in v if p[0] >= r1 - 1e-9)
        assert abs(at_max - 1.6523) <= 1e-4
        assert abs(at_max - (cap(750) - cap(75))) <= 1e-12
        degraded = gaussian_vertices("gaussian-BC-swapped-III-9", FIG10)
        assert max(p[0] for p in degraded) == pytest.approx(r1, abs=1e-9)
        assert max(p[1] for p in degraded if p[0] >= r1 - 1e-9) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.xfail(strict=True, reason="ledgered: psi(75) = 3.123964, outside 3.1241 +- 1e-4")
def test_criterion_03_frozen_literal():
    v = gaussian_vertices("OSRSI-BC-gaussian-III-111", FIG10)
    assert abs(max(p[0] for p in v) - 3.1241) <= 1e-4


def test_criterion_04_degraded_crc_side_information(capsys):
    with criterion(capsys, 4, "degraded-CRC side-information bounds at alpha = 0"):
        rows = {tuple(sorted(c)): v for c, v in gaussian_rows("gaussian-case2-III-133", FIG15, alpha=0.0)}
        r2, total = rows[("R2",)], rows[("R1", "R2")]
        a, b, p1, p2 = math.sqrt(5), 1 / math.sqrt(5), 5.0, 7.0
        assert abs(r2 - 1.9185) <= 1e-3
        assert abs(total - 3.0379) <= 1e-3
        assert abs(r2 - cap(b * b * p1 + 2 * b * math.sqrt(p1 * p2) + p2)) <= 1e-12
        assert abs(total - cap(p1 + 2 * a * math.sqrt(p1 * p2) + a * a * p2)) <= 1e-12


def test_criterion_05_noisy_interference(capsys):
    with criterion(capsys, 5, "noisy-interference certification and sum-rate 0.9720"):
        p = GaussianIcParams(0.2, 0.2, 1.0, 1.0)
        verdicts = gaussian_cic_regime(p)
        assert verdicts["labels"]["noisy"].holds
        assert verdicts["labels"]["noisy"].status == "ExactHolds"
        res = sum_rate_capacity("noisy-sum-gaussian-III-30", verdicts, p)
        assert abs(res.value - 0.9720) <= 1e-4
        assert abs(res.value - 2 * cap(1 / (0.04 + 1))) <= 1e-12
        assert res.stamp == EXACT


def _channel_joint(rng, aux, structured):
    names = [n for n, _ in aux] + ["X2", "X1"]
    shape = [c for _, c in aux] + [2, 2]
    alpha = 0.3 if structured else 1.0
    t = rng.dirichlet(np.full(int(np.prod(shape)), alpha)).reshape(shape)
    ch = rng.dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2)  # [x1, x2, y1, y2]
    return JointPmf(names + ["Y1", "Y2"], np.einsum("...ab,baij->...abij", t, ch))


def _template(rid, valuation):
    spec = get_region(rid)
    rows = [(c.coeffs, c.rel, c.rhs.evaluate(valuation)) for c in spec.constraints]
    return normalize(RatePolyhedron.from_constraints(spec.rates, rows, nonneg=True), closure=True)


def test_criterion_06_fm_equivalence(capsys):
    with criterion(capsys, 6, "lifted systems project onto their templates on 2 x 100 exact valuations", budget=30.0):
        rng = np.random.default_rng(20261016)
        for i in range(100):
            j = _channel_joint(rng, [("V", 2)], i % 2 == 0)
            val = EntropyValuation(j, inputs=("X1", "X2"), outputs=("Y1", "Y2"))
            lifted = normalize(derive_region(builtin_graph("thm39"), val, closure=True).polyhedron, closure=True)
            template = _template("OSRSI-CRC-case1-III-125", val)
            assert lifted.rows == template.rows
            assert same_set(lifted, template)
        for i in range(100):
            j = _channel_joint(rng, [("W2", 2), ("W1", 2)], i % 2 == 0)
            val = EntropyValuation(j, inputs=("X1", "X2"), outputs=("Y1", "Y2"))
            # the graph's V2, V1 codewords are the channel inputs X2, X1
            graph_val = EntropyValuation(j.rename({"X2": "V2", "X1": "V1"}), inputs=("V1", "V2"),
                                         outputs=("Y1", "Y2"))
            lifted = normalize(derive_region(builtin_graph("fig16"), graph_val, closure=True).polyhedron,
                               closure=True)
            template = _template("OSRSI-CRC-case2-inner-III-129", val)
            assert lifted.rows == template.rows
            assert same_set(lifted, template)


def _canon(lhs, rel, rhs):
    coeffs = parse_linear(lhs)
    return tuple(sorted((k, v) for k, v in coeffs.items() if v)), rel, str(InfoExpr.parse(rhs))


def _canon_constraint(c):
    text = str(c)
    for rel in (" >= ", " < ", " <= "):
        if rel in text:
            lhs, rhs = text.split(rel, 1)
            return _canon(lhs, rel.strip(), rhs)
    raise AssertionError(text)


def test_criterion_07_scheme_graph_sets(capsys):
    with criterion(capsys, 7, "shipped scheme graph reproduces the covering and packing sets symbolically"):
        g = builtin_graph("fig16")
        covering = {_canon_constraint(c) for c in covering_constraints(g)}
        assert covering == {_canon("B1", ">=", "I(V2;W1|W2)")}
        first = {_canon_constraint(c) for c in packing_constraints(g, "Y1")}
        assert first == {
            _canon("R1 + B1", "<", "I(W1;Y1|W2)"),
            _canon("R20 + R1 + B1", "<", "I(W2,W1;Y1)"),
        }
        second = {_canon_constraint(c) for c in packing_constraints(g, "Y2")}
        assert second == {
            _canon("R22", "<", "I(V2,V1;Y2|W2,W1) + I(V2;W1|W2)"),
            _canon("R22 + B1", "<", "I(V2,W1,V1;Y2|W2) + I(V2;W1|W2)"),
            _canon("R20 + R22 + B1", "<", "I(W2,V2,W1,V1;Y2) + I(V2;W1|W2)"),
        }


DETERMINISTIC = ("typical-sequence-probability", "typical-set-size", "conditional-sequence-probability",
                 "conditional-set-size")
MONTE_CARLO = ("typical-set-probability", "conditional-set-probability", "independent-cross-probability",
               "conditional-cross-probability")


def test_criterion_08_typicality_audit(capsys):
    with criterion(capsys, 8, "typicality brackets for the (0.75, 0.25) source at n = 8, 12, 16", budget=60.0):
        p = JointPmf(("X",), [0.75, 0.25])
        for n in (8, 12, 16):
            report = bound_audit(p, n, 0.1, 0.2, trials=100_000, seed=12345)
            names = {c.name for c in report.checks}
            assert set(DETERMINISTIC) | set(MONTE_CARLO) <= names
            for name in DETERMINISTIC + MONTE_CARLO:
                assert report.check(name).passed, (n, name)


def _mac_oracle_support(net, directions, steps=40):
    """Support function of the compound-MAC region from a grid over product inputs."""
    t = net.transition
    best = np.full(len(directions), 0.0)
    for i in range(steps + 1):
        for j in range(steps + 1):
            p1 = np.array([1 - i / steps, i / steps])
            p2 = np.array([1 - j / steps, j / steps])
            joint = JointPmf(("X1", "X2", "Y1", "Y2"), p1[:, None, None, None] * p2[None, :, None, None] * t)
            a = mutual_information(joint, "X1", "Y1", given="X2")
            b = mutual_information(joint, "X2", "Y2", given="X1")
            c = min(mutual_information(joint, ("X1", "X2"), "Y1"), mutual_information(joint, ("X1", "X2"), "Y2"))
            a, b = min(a, c), min(b, c)
            corners = np.array([(0, 0), (a, 0), (a, min(b, c - a)), (min(a, c - b), b), (0, b)])
            best = np.maximum(best, (corners @ directions.T).max(axis=0))
    return best


def _noisy_adder(flip):
    out = np.zeros((2, 2, 3))
    for x1 in range(2):
        for x2 in range(2):
            s = x1 + x2
            out[x1, x2, s] += 1 - flip
            out[x1, x2, (s + 1) % 3] += flip
    return out


def _xor_through(p):
    return np.array([[bsc(p)[x1 ^ x2] for x2 in range(2)] for x1 in range(2)])


def _pair_output(p):
    """Y = (X1, X2 seen through BSC(p)) as a four-letter output."""
    out = np.zeros((2, 2, 4))
    for x1 in range(2):
        for x2 in range(2):
            for y in range(2):
                out[x1, x2, 2 * x1 + y] = bsc(p)[x2][y]
    return out


def test_criterion_09_discrete_capacity_oracles(capsys):
    with criterion(capsys, 9, "degraded-CIC sum-rate 1.5310 and strong-CIC region vs compound-MAC oracle",
                   budget=300.0):
        y1 = deterministic_table(lambda a, b: 2 * a + b, (2, 2), 4)
        y2 = np.array([[bsc(0.1)[b] for b in range(2)] for _ in range(2)])
        net = product_net(y1, y2)
        verdict = universal_condition_check(net, "CIC-mixed", seed=0)
        assert verdict.holds
        res = sum_rate_capacity("degraded-CIC-sum-III-93", verdict, net, grid={"seed": 0})
        assert abs(res.value - 1.5310) <= 5e-3
        # oracle: H(X1) <= 1 plus the BSC(0.1) capacity seen by X2
        assert abs(res.value - (1 + 1 - h2(0.1))) <= 5e-3

        channels = [
            product_net(_noisy_adder(0.0), _noisy_adder(0.0)),
            product_net(_noisy_adder(0.1), _noisy_adder(0.05)),
            product_net(_xor_through(0.1), _xor_through(0.2)),
            product_net(_pair_output(0.1), _pair_output(0.2)),
            random_net(11, (2, 2, 3, 3)),
        ]
        angles = np.linspace(0, math.pi / 2, 64)
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        for net in channels:
            region = evaluate_discrete("strong-CIC-III-23", net, grid={"seed": 0})
            verts = np.array(region.vertices, dtype=float)
            ours = (verts @ directions.T).max(axis=0)
            oracle = _mac_oracle_support(net, directions)
            assert np.abs(ours - oracle).max() <= 5e-3


def test_criterion_10_property_suites(capsys):
    with criterion(capsys, 10, "HK inside Sato on 50 nets, counterexamples re-verify, prob_core on 1000 joints"):
        worst = -math.inf
        for seed in range(50):
            net = random_net(seed)
            grid = {"seed": seed, "k": 0, "random_samples": 600}
            hk = evaluate_discrete("HK-III-18", net, grid=grid)
            sato = evaluate_discrete("Sato-III-20", net, grid=grid)
            shared = evaluate_factors("Sato-III-20", net, product_input_tables(hk))
            _, outer = merge_results([sato, shared])
            worst = max(worst, worst_violation(hk.points, outer))
        assert worst <= 1e-6

        found = 0
        for seed in range(20):
            net = random_net(100 + seed)
            for cond in ("CIC-strong", "CIC-mixed", "ZIC-strong", "CRC-strong", "CRC-less-noisy"):
                v = universal_condition_check(net, cond, budget={"k": 4, "random_samples": 200, "descent_steps": 50},
                                              seed=seed)
                if v.status == COUNTEREXAMPLE:
                    found += 1
                    assert recheck_witness(net, v) < -v.tol / 2
        assert found > 0

        rng = np.random.default_rng(7)
        for i in range(1000):
            alpha = 0.3 if i % 2 else 1.0
            t = rng.dirichlet(np.full(12, alpha)).reshape(2, 3, 2)
            p = JointPmf(("A", "B", "C"), t)
            chain = entropy(p, "A") + entropy(p, "B", given="A") + entropy(p, "C", given=("A", "B"))
            assert abs(entropy(p, ("A", "B", "C")) - chain) < 1e-10
            assert mutual_information(p, "A", "B") >= -1e-12
            assert mutual_information(p, "A", "C", given="B") >= -1e-12
            # Markov chain A -> B -> C' built from the first two axes
            pab = t.sum(axis=2)
            kernel = rng.dirichlet(np.ones(2), size=3)
            m = JointPmf(("A", "B", "C"), pab[:, :, None] * kernel[None, :, :])
            assert mutual_information(m, "A", "C") <= mutual_information(m, "A", "B") + 1e-12
