"""Property-based checks of the invariants each module promises."""

from fractions import Fraction as Q

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from ratebound.channels import random_net
from ratebound.polyhedra import Inequality, RatePolyhedron, fm_eliminate, hull, is_subset, normalize, same_set, vertices
from ratebound.prob_core import JointPmf, entropy, mutual_information, psi
from ratebound.regimes import COUNTEREXAMPLE, recheck_witness, universal_condition_check

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def random_joint(seed, names=("A", "B", "C"), sizes=(2, 3, 2), sparse=False):
    rng = np.random.default_rng(seed)
    alpha = 0.3 if sparse else 1.0
    t = rng.dirichlet(np.full(int(np.prod(sizes)), alpha)).reshape(sizes)
    return JointPmf(names, t)


class TestInformationMeasures:
    @given(seeds, st.booleans())
    def test_chain_rule(self, seed, sparse):
        p = random_joint(seed, sparse=sparse)
        lhs = entropy(p, ("A", "B", "C"))
        rhs = entropy(p, "A") + entropy(p, "B", given="A") + entropy(p, "C", given=("A", "B"))
        assert abs(lhs - rhs) < 1e-10

    @given(seeds, st.booleans())
    def test_mutual_information_nonnegative(self, seed, sparse):
        p = random_joint(seed, sparse=sparse)
        assert mutual_information(p, "A", "B") >= -1e-12
        assert mutual_information(p, "A", "C", given="B") >= -1e-12

    @given(seeds)
    def test_data_processing(self, seed):
        # A -> B -> C built explicitly as a Markov chain
        rng = np.random.default_rng(seed)
        pa = rng.dirichlet(np.ones(3))
        pba = rng.dirichlet(np.ones(3), size=3)
        pcb = rng.dirichlet(np.ones(2), size=3)
        t = pa[:, None, None] * pba[:, :, None] * pcb[None, :, :]
        p = JointPmf(("A", "B", "C"), t)
        assert mutual_information(p, "A", "C") <= mutual_information(p, "A", "B") + 1e-12
        assert mutual_information(p, "A", "C", given="B") < 1e-10

    @given(st.floats(min_value=0, max_value=1e4), st.floats(min_value=0, max_value=1e4))
    def test_psi_monotone(self, x, y):
        lo, hi = sorted((x, y))
        assert psi(lo) <= psi(hi)

    @given(st.floats(min_value=0, max_value=1e3), st.floats(min_value=0, max_value=1e3),
           st.floats(min_value=0, max_value=1))
    def test_psi_concave(self, x, y, t):
        assert psi(t * x + (1 - t) * y) >= t * psi(x) + (1 - t) * psi(y) - 1e-12


small = st.integers(min_value=-3, max_value=3)


@st.composite
def lifted_systems(draw):
    """Bounded systems over (R1, R2, T1, T2) with small integer rows."""
    n_rows = draw(st.integers(min_value=2, max_value=6))
    rows = []
    for _ in range(n_rows):
        coeffs = tuple(Q(draw(small)) for _ in range(4))
        rows.append(Inequality(coeffs, Q(draw(st.integers(min_value=0, max_value=8))), draw(st.booleans())))
    for i in range(4):
        unit = [Q(0)] * 4
        unit[i] = Q(1)
        rows.append(Inequality(tuple(unit), Q(10)))
    return RatePolyhedron(("R1", "R2", "T1", "T2"), rows, ("R1", "R2", "T1", "T2"))


def lift_feasible(p: RatePolyhedron, r1: float, r2: float) -> bool:
    rows = p.closure().rows
    A = np.array([[float(c) for c in r.coeffs[2:]] for r in rows])
    b = np.array([float(r.rhs) - float(r.coeffs[0]) * r1 - float(r.coeffs[1]) * r2 for r in rows])
    res = linprog(np.zeros(2), A_ub=A, b_ub=b + 1e-9, bounds=[(0, None)] * 2, method="highs")
    return res.status == 0


def inside(p: RatePolyhedron, pt) -> bool:
    if p.infeasible:
        return False
    return all(sum(c * x for c, x in zip(r.coeffs, pt)) <= r.rhs for r in p.closure().all_rows())


class TestFourierMotzkin:
    @settings(max_examples=200, suppress_health_check=[HealthCheck.too_slow])
    @given(lifted_systems())
    def test_projection_matches_lp_feasibility(self, p):
        # the LP oracle sees the closure, so project the closure too
        proj = normalize(fm_eliminate(p.closure(), ["T1", "T2"]), closure=True)
        for r1 in range(0, 11, 2):
            for r2 in range(0, 11, 2):
                pt = (Q(r1, 2), Q(r2, 2))
                assert inside(proj, pt) == lift_feasible(p, float(pt[0]), float(pt[1]))

    @settings(max_examples=60)
    @given(lifted_systems())
    def test_normalize_idempotent(self, p):
        once = normalize(p)
        assert normalize(once).rows == once.rows
        assert normalize(once).infeasible == once.infeasible

    @settings(max_examples=60)
    @given(lifted_systems())
    def test_normalize_preserves_set(self, p):
        q = normalize(p, closure=True)
        if q.infeasible:
            rows = p.closure().rows
            res = linprog(np.zeros(4), A_ub=np.array([[float(c) for c in r.coeffs] for r in rows]),
                          b_ub=np.array([float(r.rhs) for r in rows]), bounds=[(0, None)] * 4, method="highs")
            assert res.status == 2
        else:
            assert same_set(q, p.closure())

    @settings(max_examples=60)
    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=3, max_size=12))
    def test_hull_vertices_round_trip(self, pts):
        poly = hull(pts, ("R1", "R2"))
        verts = vertices(poly)
        assert is_subset([(Q(a), Q(b)) for a, b in pts], poly, 0.0)[0]
        assert set(verts) <= {(Q(a), Q(b)) for a, b in pts} | {(Q(0), Q(0))} | {
            (Q(a), Q(0)) for a, _ in pts} | {(Q(0), Q(b)) for _, b in pts}


class TestRegimeWitnesses:
    @settings(max_examples=15)
    @given(st.integers(min_value=0, max_value=10_000), st.sampled_from(["CIC-strong", "CIC-mixed", "ZIC-strong"]))
    def test_counterexamples_recheck(self, seed, cond):
        net = random_net(seed)
        v = universal_condition_check(net, cond, budget={"k": 4, "random_samples": 100, "descent_steps": 20},
                                      seed=seed)
        if v.status == COUNTEREXAMPLE:
            assert recheck_witness(net, v) < -v.tol / 2
