"""Interference-regime decisions.

Gaussian channels are classified by exact parameter tests. Discrete channels
are checked against universally quantified mutual-information conditions by
bounded search: a negative gap found anywhere is re-evaluated through an
independent route and reported as a certified counterexample, while "holds"
only means no counterexample turned up within the search budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._batch import (
    BatchJoint,
    attach_channel,
    dirichlet_mix,
    outer_blocks,
    product_grid,
    simplex_grid,
    simplex_grid_size,
)
from ._parallel import ordered_map
from .channels import DmNet, GaussianIcParams
from .errors import ArgumentError, ResourceError, StateError
from .infoexpr import InfoExpr
from .prob_core import JointPmf, entropy, mutual_information

HOLDS = "HoldsOnSearch"
COUNTEREXAMPLE = "CounterexampleFound"
EXACT_HOLDS = "ExactHolds"
EXACT_FAILS = "ExactFails"

DEFAULT_TOL = 1e-7
GRID_CAP = 40000
CHUNK = 4096


# ---------------------------------------------------------------------------
# condition table


@dataclass(frozen=True)
class ConditionSpec:
    """``lhs <= rhs`` for every listed pair, over a product of joint blocks."""

    cid: str
    blocks: tuple[tuple[str, ...], ...]
    pairs: tuple[tuple[str, str], ...]
    description: str

    @property
    def aux(self) -> tuple[str, ...]:
        return tuple(v for b in self.blocks for v in b if v not in ("X1", "X2"))

    def exprs(self) -> list[tuple[InfoExpr, InfoExpr]]:
        return [(InfoExpr.parse(a), InfoExpr.parse(b)) for a, b in self.pairs]


def _c(cid, blocks, pairs, description):
    return ConditionSpec(cid, tuple(tuple(b) for b in blocks), tuple(pairs), description)


_JOINT = [("X1", "X2")]
_PRODUCT = [("X1",), ("X2",)]

CONDITIONS: dict[str, ConditionSpec] = {
    c.cid: c
    for c in [
        _c("BC-less-noisy", [("U", "X1", "X2")], [("I(U;Y2)", "I(U;Y1)")],
           "receiver 1 less noisy than receiver 2 (BC input X = (X1, X2))"),
        _c("BC-more-capable", _JOINT, [("I(X1,X2;Y2)", "I(X1,X2;Y1)")],
           "receiver 1 more capable than receiver 2"),
        _c("BC-equal-capable", _JOINT, [("I(X1,X2;Y2)", "I(X1,X2;Y1)"), ("I(X1,X2;Y1)", "I(X1,X2;Y2)")],
           "both receivers equally capable (two one-sided checks)"),
        _c("CIC-strong", _PRODUCT, [("I(X1;Y1|X2)", "I(X1;Y2|X2)"), ("I(X2;Y2|X1)", "I(X2;Y1|X1)")],
           "strong interference at both receivers"),
        _c("CRC-strong", _JOINT, [("I(X1,X2;Y2)", "I(X1,X2;Y1)"), ("I(X1;Y1|X2)", "I(X1;Y2|X2)")],
           "cognitive channel with strong interference"),
        _c("CRC-less-noisy", [("U", "X1", "X2")], [("I(U,X2;Y2)", "I(U,X2;Y1)")],
           "cognitive receiver less noisy"),
        _c("CIC-mixed", [("V", "X1"), ("X2",)], [("I(X2;Y2|X1)", "I(X2;Y1|X1)"), ("I(V;Y2|X2)", "I(V;Y1|X2)")],
           "strong interference at receiver 1, weak at receiver 2"),
        _c("ZIC-strong", _PRODUCT, [("I(X2;Y2)", "I(X2;Y1|X1)")],
           "one-sided channel with strong interference"),
        _c("ZIC-noisy", [("X1",), ("U", "X2")], [("I(U;Y1|X1)", "I(U;Y2|X1)")],
           "one-sided channel with noisy interference"),
        _c("CRC-more-capable-a", _JOINT, [("I(X1,X2;Y2)", "I(X1,X2;Y1)")],
           "cognitive receiver more capable"),
        _c("CRC-more-capable-b", _JOINT, [("I(X1,X2;Y1)", "I(X1,X2;Y2)")],
           "primary receiver more capable"),
        _c("CRC-strong-primary", _PRODUCT, [("I(X1;Y1|X2)", "I(X1;Y2|X2)")],
           "cognitive channel with strong interference at the primary receiver"),
        _c("OSRSI-CIC-strong-Y2", _PRODUCT, [("I(X1;Y1|X2)", "I(X1;Y2|X2)")],
           "side-information channel with strong interference at receiver 2"),
        _c("OSRSI-CIC-weak-Y2", [("V", "X1"), ("X2",)], [("I(V;Y2|X2)", "I(V;Y1|X2)")],
           "side-information channel with weak interference at receiver 2"),
        _c("OSRSI-mixed-1", [("X1",), ("U", "X2")], [("I(X1;Y1|X2)", "I(X1;Y2|X2)"), ("I(U;Y1|X1)", "I(U;Y2|X1)")],
           "side-information channel, weak at receiver 1 and strong at receiver 2"),
        _c("OSRSI-mixed-2", [("V", "X1"), ("X2",)], [("I(X2;Y2|X1)", "I(X2;Y1|X1)"), ("I(V;Y2|X2)", "I(V;Y1|X2)")],
           "side-information channel, strong at receiver 1 and weak at receiver 2"),
    ]
}


def condition(cid: str) -> ConditionSpec:
    try:
        return CONDITIONS[cid]
    except KeyError:
        raise ArgumentError(f"unknown condition {cid!r}; known: {', '.join(CONDITIONS)}") from None


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class RegimeVerdict:
    regime: str
    status: str
    min_gap: float | None = None
    gap: float | None = None
    witness: dict | None = None
    component_gaps: tuple[float, ...] = ()
    budget: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def holds(self) -> bool:
        return self.status in (HOLDS, EXACT_HOLDS)

    def to_dict(self) -> dict:
        d = {"regime": self.regime, "status": self.status, "tol": self.tol, "budget": self.budget}
        if self.min_gap is not None:
            d["min_gap"] = self.min_gap
        if self.gap is not None:
            d["gap"] = self.gap
        if self.component_gaps:
            d["component_gaps"] = list(self.component_gaps)
        if self.witness is not None:
            d["witness"] = self.witness
        if self.status == HOLDS:
            d["note"] = "no counterexample under the search budget; not a proof"
        return d


def _exact(label: str, ok: bool) -> RegimeVerdict:
    return RegimeVerdict(label, EXACT_HOLDS if ok else EXACT_FAILS, budget={"kind": "parameter test"})


# ---------------------------------------------------------------------------
# Gaussian tests


def _noisy_test_value(p: GaussianIcParams) -> float:
    return abs(p.a * (p.b**2 * p.p1 + 1)) + abs(p.b * (p.a**2 * p.p2 + 1))


def gaussian_cic_regime(p: GaussianIcParams) -> dict:
    """Exact regime labels of the standard-form Gaussian interference channel."""
    a, b = abs(p.a), abs(p.b)
    strong = a >= 1 and b >= 1
    side = 1 if (b < 1 <= a) else 2 if (a < 1 <= b) else None
    noisy = _noisy_test_value(p) <= 1
    labels = {
        "strong": _exact("gaussian-CIC-strong", strong),
        "mixed": _exact("gaussian-CIC-mixed", side is not None),
        "noisy": _exact("gaussian-CIC-noisy", noisy),
    }
    zic_strong = zic_noisy = None
    if p.b == 0 and p.a != 0:
        zic_strong, zic_noisy = a >= 1, a < 1
    elif p.a == 0 and p.b != 0:
        zic_strong, zic_noisy = b >= 1, b < 1
    # receiver 1 knows message 2: only the cross gain into receiver 2 matters
    labels["osrsi_strong"] = _exact("gaussian-OSRSI-strong", b >= 1)
    labels["osrsi_weak"] = _exact("gaussian-OSRSI-weak", b < 1)
    if zic_strong is not None:
        labels["zic_strong"] = _exact("gaussian-ZIC-strong", zic_strong)
        labels["zic_noisy"] = _exact("gaussian-ZIC-noisy", zic_noisy)
    if strong:
        regime = "strong"
    elif side is not None:
        regime = "mixed"
    elif noisy:
        regime = "noisy"
    else:
        regime = "weak"
    return {
        "regime": regime,
        "strong_side": side,
        "noisy_sum": _noisy_test_value(p),
        "labels": labels,
    }


def gaussian_crc_regime(p: GaussianIcParams, require_strong_test: bool = True) -> dict:
    """Exact regime labels of the Gaussian cognitive channel (transmitter 1 cognitive)."""
    a, b = p.a, p.b
    labels = {
        "weak_primary": _exact("gaussian-CRC-weak-primary", abs(b) <= 1),
        "strong_primary": _exact("gaussian-CRC-strong-primary", abs(b) > 1),
        "degraded_mc": _exact(
            "gaussian-CRC-degraded-more-capable",
            abs(b) <= 1 <= abs(a) and math.isclose(a * b, 1.0, rel_tol=1e-12, abs_tol=1e-12),
        ),
    }
    if p.p2 == 0:
        if require_strong_test:
            raise ArgumentError("the strong-interference test needs P2 > 0 (alpha = sqrt(P1/P2))")
    else:
        al = math.sqrt(p.p1 / p.p2)
        strong = abs(1 + a * al) >= abs(b + al) and abs(1 - a * al) >= abs(b - al) and abs(b) >= 1
        labels["strong"] = _exact("gaussian-CRC-strong", strong)
    regime = next((k for k in ("strong", "degraded_mc", "strong_primary", "weak_primary") if k in labels and labels[k].holds), "none")
    return {"regime": regime, "labels": labels}


# ---------------------------------------------------------------------------
# discrete search


@dataclass
class _Family:
    spec: ConditionSpec
    sizes: dict[str, int]

    @property
    def variables(self) -> tuple[str, ...]:
        aux = self.spec.aux
        return aux + ("X1", "X2")

    def block_dims(self) -> list[int]:
        return [int(np.prod([self.sizes[v] for v in blk])) for blk in self.spec.blocks]

    def block_shapes(self) -> list[tuple[int, ...]]:
        return [tuple(self.sizes[v] for v in blk) for blk in self.spec.blocks]

    def order(self) -> list[int]:
        flat = [v for blk in self.spec.blocks for v in blk]
        return [flat.index(v) for v in self.variables]

    def assemble(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        return outer_blocks(blocks, self.block_shapes(), self.order())


def _gaps(fam: _Family, net: DmNet, blocks: Sequence[np.ndarray], exprs) -> np.ndarray:
    """Gap matrix (batch, pairs) = rhs - lhs."""
    joint = attach_channel(fam.variables, fam.assemble(blocks), net.transition)
    return np.stack([joint.evaluate(r) - joint.evaluate(l) for l, r in exprs], axis=1)


def _chunked_gaps(fam, net, blocks, exprs) -> np.ndarray:
    n = blocks[0].shape[0]
    starts = list(range(0, n, CHUNK))
    parts = ordered_map(lambda s: _gaps(fam, net, [b[s:s + CHUNK] for b in blocks], exprs), starts)
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, len(exprs)))


def _grid_blocks(dims: list[int], k: int, cap: int) -> tuple[list[np.ndarray], list[int]]:
    ks = [k] * len(dims)
    while math.prod(simplex_grid_size(d, kk) for d, kk in zip(dims, ks)) > cap:
        i = max(range(len(dims)), key=lambda j: simplex_grid_size(dims[j], ks[j]) if ks[j] > 1 else -1)
        if ks[i] <= 1:
            break
        ks[i] -= 1
    grids = [simplex_grid(d, kk) for d, kk in zip(dims, ks)]
    return product_grid(grids), ks


def _descent(fam, net, exprs, start: list[np.ndarray], steps: int) -> tuple[list[np.ndarray], float]:
    cur = [b.copy() for b in start]
    cur_gap = float(_gaps(fam, net, [b[None] for b in cur], exprs).min())
    delta = 0.25
    for _ in range(steps):
        cands = []
        for bi, vec in enumerate(cur):
            d = len(vec)
            for i in range(d):
                if vec[i] <= 0:
                    continue
                for j in range(d):
                    if i == j:
                        continue
                    mv = min(delta, vec[i])
                    nv = vec.copy()
                    nv[i] -= mv
                    nv[j] += mv
                    cands.append((bi, nv))
        if not cands:
            break
        blocks = [np.repeat(b[None], len(cands), axis=0) for b in cur]
        for row, (bi, nv) in enumerate(cands):
            blocks[bi][row] = nv
        g = _gaps(fam, net, blocks, exprs).min(axis=1)
        best = int(np.argmin(g))
        if g[best] < cur_gap - 1e-15:
            bi, nv = cands[best]
            cur[bi] = nv
            cur_gap = float(g[best])
        else:
            delta /= 2
            if delta < 1e-7:
                break
    return cur, cur_gap


def _direct_gaps(fam: _Family, net: DmNet, blocks: Sequence[np.ndarray], spec: ConditionSpec) -> tuple[list[float], JointPmf]:
    """Independent re-evaluation through the scalar prob_core routines."""
    inputs = fam.assemble([b[None] for b in blocks])[0]
    table = np.einsum("...ij,ijkl->...ijkl", inputs, net.transition)
    table = table / table.sum()
    pmf = JointPmf(fam.variables + ("Y1", "Y2"), table)
    out = []
    for lhs, rhs in spec.exprs():
        out.append(_scalar(pmf, rhs) - _scalar(pmf, lhs))
    return out, pmf


def _scalar(pmf: JointPmf, expr: InfoExpr) -> float:
    total = float(expr.constant)
    for atom, k in expr.terms.items():
        if atom[0] == "I":
            total += float(k) * mutual_information(pmf, sorted(atom[1]), sorted(atom[2]), sorted(atom[3]))
        else:
            total += float(k) * entropy(pmf, sorted(atom[1]), sorted(atom[2]))
    return total


def _witness(fam: _Family, blocks: Sequence[np.ndarray], pmf: JointPmf) -> dict:
    return {
        "variables": list(fam.variables),
        "blocks": {"+".join(blk): np.asarray(b).reshape(s).tolist() for blk, b, s in zip(fam.spec.blocks, blocks, fam.block_shapes())},
        "joint_inputs": pmf.marginal(list(fam.variables)).table.tolist(),
    }


def universal_condition_check(
    net: DmNet,
    cond: str,
    budget: Mapping | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    aux_card: int | None = None,
) -> RegimeVerdict:
    """Search the condition's distribution family for a negative gap.

    ``budget`` keys: ``k`` (grid denominator), ``random_samples``,
    ``descent_steps``, ``grid_cap``.
    """
    spec = condition(cond)
    x1, x2 = net.sizes[:2]
    binary = x1 <= 2 and x2 <= 2
    b = dict(budget or {})
    k = int(b.get("k", 8 if binary else 4))
    samples = int(b.get("random_samples", 2000))
    steps = int(b.get("descent_steps", 200))
    cap = int(b.get("grid_cap", GRID_CAP))
    if k <= 0 and samples <= 0:
        raise ResourceError("search budget allows no distribution evaluations")
    card = aux_card if aux_card is not None else x1 * x2 + 1
    sizes = {"X1": x1, "X2": x2}
    for a in spec.aux:
        sizes[a] = card
    fam = _Family(spec, sizes)
    exprs = spec.exprs()
    dims = fam.block_dims()

    pools: list[list[np.ndarray]] = []
    ks: list[int] = []
    if k > 0:
        grid, ks = _grid_blocks(dims, k, cap)
        pools.append(grid)
    if samples > 0:
        rng = np.random.default_rng(seed)
        pools.append([dirichlet_mix(rng, d, samples) for d in dims])
    blocks = [np.concatenate([p[i] for p in pools], axis=0) for i in range(len(dims))]
    gaps = _chunked_gaps(fam, net, blocks, exprs)
    worst_rows = gaps.min(axis=1)
    evaluated = len(worst_rows)

    # descent from the worst point (and the worst random point if distinct)
    starts = [int(np.argmin(worst_rows))]
    if samples > 0 and k > 0:
        n_grid = len(pools[0][0])
        if evaluated > n_grid:
            starts.append(n_grid + int(np.argmin(worst_rows[n_grid:])))
    best_blocks = [blk[starts[0]] for blk in blocks]
    best_gap = float(worst_rows[starts[0]])
    if steps > 0:
        for s in starts:
            cand, g = _descent(fam, net, exprs, [blk[s] for blk in blocks], steps)
            if g < best_gap:
                best_blocks, best_gap = cand, g
    comp = tuple(float(v) for v in gaps.min(axis=0))
    desc = {
        "k": k,
        "effective_k": ks,
        "grid_points": len(pools[0][0]) if k > 0 else 0,
        "random_samples": samples,
        "descent_steps": steps,
        "aux_card": card if spec.aux else None,
        "seed": seed,
        "evaluations": evaluated,
    }

    if best_gap < -tol:
        direct, pmf = _direct_gaps(fam, net, best_blocks, spec)
        dgap = min(direct)
        if dgap < -tol:
            return RegimeVerdict(cond, COUNTEREXAMPLE, min_gap=best_gap, gap=dgap,
                                 witness=_witness(fam, best_blocks, pmf), component_gaps=tuple(direct),
                                 budget=desc, tol=tol)
    return RegimeVerdict(cond, HOLDS, min_gap=min(best_gap, float(worst_rows.min())), component_gaps=comp,
                         budget=desc, tol=tol)


def recheck_witness(net: DmNet, verdict: RegimeVerdict) -> float:
    """Recompute a counterexample's gap from its stored blocks."""
    if verdict.status != COUNTEREXAMPLE or verdict.witness is None:
        raise StateError("verdict carries no counterexample witness")
    spec = condition(verdict.regime)
    sizes = {"X1": net.sizes[0], "X2": net.sizes[1]}
    for a in spec.aux:
        sizes[a] = verdict.budget["aux_card"]
    fam = _Family(spec, sizes)
    blocks = [np.asarray(verdict.witness["blocks"]["+".join(blk)], dtype=float).reshape(-1) for blk in spec.blocks]
    return min(_direct_gaps(fam, net, blocks, spec)[0])


# ---------------------------------------------------------------------------
# correlated-input audit


def _extended_pairs(spec: ConditionSpec) -> list[tuple[str, InfoExpr, InfoExpr]]:
    """Conditioned forms expected to survive correlated inputs plus a free variable T."""
    out = []
    for lhs_s, rhs_s in spec.pairs:
        lhs, rhs = InfoExpr.parse(lhs_s), InfoExpr.parse(rhs_s)
        if spec.cid == "ZIC-strong":
            lhs = InfoExpr.parse("I(X2;Y2|X1)")
        out.append((f"{lhs} <= {rhs} given T", _given(lhs, "T"), _given(rhs, "T")))
        joint_in = InfoExpr.parse("I(X1,X2;Y2)"), InfoExpr.parse("I(X1,X2;Y1)")
        if spec.cid in ("CRC-strong", "CRC-more-capable-a") and (lhs, rhs) == joint_in:
            for a, b in (("X1", "X2"), ("X2", "X1")):
                l2 = InfoExpr.mi(a, "Y2", b)
                r2 = InfoExpr.mi(a, "Y1", b)
                out.append((f"{l2} <= {r2}", l2, r2))
        if spec.cid == "CRC-more-capable-b" and (rhs, lhs) == joint_in:
            for a, b in (("X1", "X2"), ("X2", "X1")):
                l2 = InfoExpr.mi(a, "Y1", b)
                r2 = InfoExpr.mi(a, "Y2", b)
                out.append((f"{l2} <= {r2}", l2, r2))
    return out


def _given(expr: InfoExpr, var: str) -> InfoExpr:
    terms = {}
    for atom, k in expr.terms.items():
        if atom[0] == "I":
            terms[("I", atom[1], atom[2], atom[3] | {var})] = k
        else:
            terms[("H", atom[1], atom[2] | {var})] = k
    return InfoExpr(terms, expr.constant)


@dataclass
class ExtensionReport:
    condition: str
    min_gap: float
    per_inequality: dict[str, float]
    samples: int
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "min_gap": self.min_gap,
            "per_inequality": self.per_inequality,
            "samples": self.samples,
            "passed": self.passed,
            "tol": self.tol,
        }


def extension_audit(
    net: DmNet,
    cond: str,
    verdict: RegimeVerdict | None,
    samples: int = 2000,
    seed: int = 0,
    tol: float = 1e-9,
    aux_card: int | None = None,
) -> ExtensionReport:
    """Check the condition's correlated-input extensions at sampled joints.

    Every inequality is re-evaluated conditioned on an extra variable T under
    fully correlated joints P(T, aux, X1, X2); for the cognitive joint-MI
    conditions the derived single-input inequalities are added as well.
    """
    spec = condition(cond)
    if verdict is None or verdict.regime != cond or verdict.status != HOLDS:
        raise StateError(f"extension audit needs a {HOLDS} verdict for {cond}")
    x1, x2 = net.sizes[:2]
    card = aux_card if aux_card is not None else x1 * x2 + 1
    names = ("T",) + spec.aux + ("X1", "X2")
    shape = (card,) + tuple(card for _ in spec.aux) + (x1, x2)
    rng = np.random.default_rng(seed)
    flat = dirichlet_mix(rng, int(np.prod(shape)), samples)
    joint = attach_channel(names, flat.reshape((samples,) + shape), net.transition)
    per = {}
    worst = math.inf
    for label, lhs, rhs in _extended_pairs(spec):
        g = float((joint.evaluate(rhs) - joint.evaluate(lhs)).min())
        per[label] = g
        worst = min(worst, g)
    return ExtensionReport(cond, worst, per, samples, worst >= -tol, tol)
