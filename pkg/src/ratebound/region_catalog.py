"""Catalog of two-user rate regions and their evaluators.

Every region is a ``RegionSpec``: rate variables, linear constraints whose
right-hand sides are information expressions, the distribution family the
union runs over, and an evaluation tier:

* ``G`` closed-form Gaussian evaluator (optionally swept over a power split),
* ``D`` discrete brute force: sample the family, attach the channel, collect
  per-distribution vertices and take the convex hull of their union (the hull
  realizes time sharing),
* ``S`` symbolic template only (some also allow small discrete evaluation).

Outputs carry a stamp: ``EXACT`` for Gaussian closed forms and for capacity
formulas whose hypothesis has been checked, ``BEST-EFFORT`` otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from ._batch import BatchJoint, attach_channel, dirichlet_mix, simplex_grid, simplex_grid_size
from ._parallel import ordered_map
from .channels import DmNet, GaussianBcParams, GaussianIcParams, is_one_sided, is_semideterministic, marginal_channel
from .errors import ArgumentError, PreconditionError, ResourceError, StateError
from .infoexpr import Constraint, InfoExpr
from .polyhedra import Inequality, RatePolyhedron, hull as exact_hull, hull_2d, is_subset
from .prob_core import psi
from .regimes import RegimeVerdict, gaussian_cic_regime, gaussian_crc_regime

EXACT = "EXACT"
BEST_EFFORT = "BEST-EFFORT"

DEFAULT_SAMPLES = 3000
DEFAULT_LIFTED_SAMPLES = 200
GRID_CAP = 20000
CHUNK = 1024
MAX_CELLS = 4_000_000  # joint cells per evaluation chunk budget
VERTEX_TOL = 1e-10


# ---------------------------------------------------------------------------
# region descriptors


@dataclass(frozen=True)
class Factor:
    """One factor of a family: ``var`` given ``parents``; ``det`` for a function."""

    var: str
    parents: tuple[str, ...] = ()
    det: bool = False

    def __str__(self):
        if self.det:
            return f"{self.var}=f({','.join(self.parents)})"
        return f"P({self.var}|{','.join(self.parents)})" if self.parents else f"P({self.var})"


def _factors(text: str) -> tuple[Factor, ...]:
    """``"W; U|W; X=f(U,W)"`` -> factors in generation order."""
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            var, rest = part.split("=", 1)
            rest = rest.strip()
            inner = rest[rest.index("(") + 1 : rest.rindex(")")]
            out.append(Factor(var.strip(), tuple(x.strip() for x in inner.split(",") if x.strip()), True))
        elif "|" in part:
            var, rest = part.split("|", 1)
            out.append(Factor(var.strip(), tuple(x.strip() for x in rest.split(",") if x.strip())))
        else:
            out.append(Factor(part))
    return tuple(out)


def _joint(names: Sequence[str]) -> str:
    """Unrestricted joint over ``names`` as a chain of conditionals."""
    return "; ".join(n if i == 0 else f"{n}|{','.join(names[:i])}" for i, n in enumerate(names))


@dataclass(frozen=True)
class GaussianForm:
    """Closed-form evaluator.

    ``rows(params, alpha)`` returns ``[(coeffs, value)]``; ``value(params)``
    returns a scalar for sum-rate formulas.
    """

    params: str  # "ic" or "bc"
    rows: Callable | None = None
    value: Callable | None = None
    sweep: bool = False
    regime: str | None = None  # exact label required for a sum-rate claim
    check: Callable | None = None  # params -> error message or None


@dataclass(frozen=True)
class RegionSpec:
    rid: str
    title: str
    anchor: str
    tier: str
    bound: str  # inner | outer | capacity | sum-rate
    channel: str
    rates: tuple[str, ...]
    constraints: tuple[Constraint, ...] = ()
    family: tuple[Factor, ...] = ()
    objective: tuple[InfoExpr, ...] = ()
    regime: str | None = None
    requires: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    gaussian: GaussianForm | None = None
    discrete_ok: bool = True
    default_aux: int | None = None
    notes: str = ""

    @property
    def projected(self) -> tuple[str, ...]:
        return self.outputs or self.rates

    @property
    def lifted(self) -> bool:
        return bool(self.outputs) and self.outputs != self.rates

    @property
    def family_vars(self) -> tuple[str, ...]:
        return tuple(f.var for f in self.family)

    @property
    def aux(self) -> tuple[str, ...]:
        return tuple(v for v in self.family_vars if v not in ("X", "X1", "X2"))

    def roster(self) -> dict[str, str]:
        roles = {}
        for v in self.family_vars:
            roles[v] = "input" if v in ("X", "X1", "X2") else "auxiliary"
        if self.family:
            roles["Y1"] = "output"
            roles["Y2"] = "output"
            roles["Q"] = "time-sharing (convex hull)"
        return roles

    def symbols(self) -> set[str]:
        out = set()
        for c in self.constraints:
            out |= set(c.rhs.variables())
        for e in self.objective:
            out |= set(e.variables())
        return out

    def stamp(self, hypothesis_checked: bool = False) -> str:
        if self.tier == "G":
            return EXACT
        if self.bound in ("capacity", "sum-rate") and hypothesis_checked:
            return EXACT
        return BEST_EFFORT

    def metadata(self) -> dict:
        return {
            "id": self.rid,
            "title": self.title,
            "anchor": self.anchor,
            "tier": self.tier,
            "bound": self.bound,
            "channel": self.channel,
            "rates": list(self.projected),
            "roster": self.roster(),
            "family": " ".join(str(f) for f in self.family) if self.family else None,
            "regime": self.regime,
            "requires": list(self.requires),
            "discrete": self.tier != "G" and self.discrete_ok,
            "gaussian": self.gaussian is not None,
        }


def _rows(*lines: str) -> tuple[Constraint, ...]:
    out = []
    for line in lines:
        for rel in ("<=", ">=", "="):
            if rel in line:
                lhs, rhs = line.split(rel, 1)
                out.append(Constraint.make(lhs.strip(), rel, InfoExpr.parse(rhs.strip())))
                break
        else:
            raise ArgumentError(f"constraint without relation: {line!r}")
    return tuple(out)


def _min_rows(lhs: str, *terms: str) -> list[str]:
    return [f"{lhs} <= {t}" for t in terms]


# ---------------------------------------------------------------------------
# Gaussian closed forms


def _ic(p) -> GaussianIcParams:
    if not isinstance(p, GaussianIcParams):
        raise ArgumentError("region needs interference-channel parameters (a, b, P1, P2)")
    return p


def _bc(p) -> GaussianBcParams:
    if not isinstance(p, GaussianBcParams):
        raise ArgumentError("region needs broadcast-channel parameters (a, b, P)")
    return p


def _g_bc_degraded(p, al):
    p = _bc(p)
    rest = 1 - al
    return [({"R1": 1}, psi(p.a**2 * rest * p.p)), ({"R2": 1}, psi(p.b**2 * al * p.p / (p.b**2 * rest * p.p + 1)))]


def _g_bc_degraded_swapped(p, al):
    p = _bc(p)
    rest = 1 - al
    return [({"R2": 1}, psi(p.b**2 * rest * p.p)), ({"R1": 1}, psi(p.a**2 * al * p.p / (p.a**2 * rest * p.p + 1)))]


def _g_osrsi_bc(p, _al):
    p = _bc(p)
    return [({"R1": 1}, psi(p.a**2 * p.p)), ({"R1": 1, "R2": 1}, psi(p.b**2 * p.p))]


def _g_strong_cic(p, _al):
    p = _ic(p)
    return [
        ({"R1": 1}, psi(p.p1)),
        ({"R2": 1}, psi(p.p2)),
        ({"R1": 1, "R2": 1}, min(psi(p.p1 + p.a**2 * p.p2), psi(p.b**2 * p.p1 + p.p2))),
    ]


def _g_mixed_sum(p):
    p = _ic(p)
    return min(psi(p.p1 + p.a**2 * p.p2), psi(p.p1) + psi(p.p2 / (p.b**2 * p.p1 + 1)))


def _g_noisy_sum(p):
    p = _ic(p)
    return psi(p.p1 / (p.a**2 * p.p2 + 1)) + psi(p.p2 / (p.b**2 * p.p1 + 1))


def _g_zic_strong(p, _al):
    p = _ic(p)
    return [({"R1": 1}, psi(p.p1)), ({"R2": 1}, psi(p.p2)), ({"R1": 1, "R2": 1}, psi(p.p1 + p.a**2 * p.p2))]


def _g_zic_weak_sum(p):
    p = _ic(p)
    return psi(p.p1 / (p.a**2 * p.p2 + 1)) + psi(p.p2)


def _g_crc_dpc_sum(p, al):
    p = _ic(p)
    rest = 1 - al
    b = abs(p.b)
    return [
        ({"R1": 1}, psi(al * p.p1)),
        ({"R1": 1, "R2": 1}, psi(p.b**2 * p.p1 + p.p2 + 2 * b * math.sqrt(rest * p.p1 * p.p2))),
    ]


def _g_crc_weak(p, al):
    p = _ic(p)
    rest = 1 - al
    b = abs(p.b)
    num = rest * p.b**2 * p.p1 + 2 * b * math.sqrt(rest * p.p1 * p.p2) + p.p2
    return [({"R1": 1}, psi(al * p.p1)), ({"R2": 1}, psi(num / (1 + al * p.b**2 * p.p1)))]


def _g_crc_primary_sum(p):
    p = _ic(p)
    return psi(p.b**2 * p.p1 + p.p2 + 2 * abs(p.b) * math.sqrt(p.p1 * p.p2))


def _g_osrsi_weak_sum(p):
    p = _ic(p)
    return psi(p.p1) + psi(p.p2 / (p.b**2 * p.p1 + 1))


def _g_osrsi_strong(p, _al):
    p = _ic(p)
    return [({"R1": 1}, psi(p.p1)), ({"R2": 1}, psi(p.p2)), ({"R1": 1, "R2": 1}, psi(p.b**2 * p.p1 + p.p2))]


def _g_case2(p, al):
    p = _ic(p)
    rest = 1 - al
    root = math.sqrt(rest * p.p1 * p.p2)
    return [
        ({"R1": 1}, psi(al * p.p1)),
        ({"R2": 1}, psi(p.b**2 * p.p1 + 2 * abs(p.b) * root + p.p2)),
        ({"R1": 1, "R2": 1}, psi(p.p1 + 2 * abs(p.a) * root + p.a**2 * p.p2)),
    ]


def _need_strong_b(p):
    return None if abs(p.b) >= 1 else "closed form covers |b| >= 1 only (use the sum-rate form for |b| < 1)"


def _need_mixed_side1(p):
    info = gaussian_cic_regime(p)
    return None if info["strong_side"] == 1 else "formula is stated for |b| < 1 <= |a|"


# ---------------------------------------------------------------------------
# the catalog

_CATALOG: dict[str, RegionSpec] = {}


def _add(**kw) -> None:
    kw.setdefault("constraints", ())
    if isinstance(kw.get("constraints"), list):
        kw["constraints"] = _rows(*kw["constraints"])
    if isinstance(kw.get("family"), str):
        kw["family"] = _factors(kw["family"])
    if isinstance(kw.get("objective"), list):
        kw["objective"] = tuple(InfoExpr.parse(e) for e in kw["objective"])
    spec = RegionSpec(**kw)
    if spec.rid in _CATALOG:
        raise AssertionError(f"duplicate region id {spec.rid}")
    _CATALOG[spec.rid] = spec


R012 = ("R0", "R1", "R2")
R12 = ("R1", "R2")
RSUM = ("R1", "R2")

# broadcast channel (the input X stands for the pair (X1, X2))
_add(rid="Marton-III-2", title="Marton region with common message", anchor="III-2", tier="D", bound="inner",
     channel="BC", rates=R012, family="W; U|W; V|W,U; X|W,U,V",
     constraints=["R0 + R1 <= I(W,U;Y1)", "R0 + R2 <= I(W,V;Y2)",
                  "R0 + R1 + R2 <= I(W,U;Y1) + I(V;Y2|W) - I(U;V|W)",
                  "R0 + R1 + R2 <= I(U;Y1|W) + I(W,V;Y2) - I(U;V|W)",
                  "2R0 + R1 + R2 <= I(W,U;Y1) + I(W,V;Y2) - I(U;V|W)"])
_add(rid="superposition-BC-III-8", title="superposition coding region", anchor="III-8", tier="D", bound="inner",
     channel="BC", rates=R012, family="W; X|W",
     constraints=["R1 <= I(X;Y1|W)", "R0 + R2 <= I(W;Y2)"])
_add(rid="gaussian-BC-III-9", title="Gaussian degraded BC, receiver 1 stronger", anchor="III-9", tier="G",
     bound="capacity", channel="BC", rates=R12,
     gaussian=GaussianForm("bc", rows=_g_bc_degraded, sweep=True),
     notes="private rates only (common rate set to zero); alpha is the power share of the cloud codeword")
_add(rid="gaussian-BC-swapped-III-9", title="Gaussian degraded BC, receiver 2 stronger", anchor="III-9", tier="G",
     bound="capacity", channel="BC", rates=R12,
     gaussian=GaussianForm("bc", rows=_g_bc_degraded_swapped, sweep=True),
     notes="roles of the receivers exchanged")
_add(rid="more-capable-BC-III-10", title="more-capable BC capacity", anchor="III-10", tier="D", bound="capacity",
     channel="BC", rates=R012, family="W; X|W", regime="BC-more-capable",
     constraints=["R0 + R2 <= I(W;Y2)", "R0 + R1 + R2 <= I(X;Y1|W) + I(W;Y2)", "R0 + R1 + R2 <= I(X;Y1)"])
_add(rid="semidet-BC-III-11", title="semi-deterministic BC capacity", anchor="III-11", tier="D", bound="capacity",
     channel="BC", rates=R012, family="W; V|W; X|W,V", requires=("Y1-deterministic",),
     constraints=["R0 <= I(W;Y1)", "R0 <= I(W;Y2)", "R0 + R1 <= H(Y1)", "R0 + R2 <= I(W,V;Y2)",
                  "R0 + R1 + R2 <= H(Y1|W,V) + I(W,V;Y2)",
                  "R0 + R1 + R2 <= I(W;Y1) + H(Y1|W,V) + I(V;Y2|W)"])
_UVW_M = "min"
_add(rid="UVW-outer-III-12", title="UVW outer bound", anchor="III-12", tier="D", bound="outer", channel="BC",
     rates=R012, family="W; U|W; V|W,U; X|W,U,V",
     constraints=[*_min_rows("R0", "I(W;Y1)", "I(W;Y2)"),
                  *_min_rows("R0 + R1", "I(U;Y1|W) + I(W;Y1)", "I(U;Y1|W) + I(W;Y2)"),
                  *_min_rows("R0 + R2", "I(V;Y2|W) + I(W;Y1)", "I(V;Y2|W) + I(W;Y2)"),
                  *_min_rows("R0 + R1 + R2", "I(X;Y1|V,W) + I(V;Y2|W) + I(W;Y1)",
                             "I(X;Y1|V,W) + I(V;Y2|W) + I(W;Y2)"),
                  *_min_rows("R0 + R1 + R2", "I(X;Y2|U,W) + I(U;Y1|W) + I(W;Y1)",
                             "I(X;Y2|U,W) + I(U;Y1|W) + I(W;Y2)")])
_add(rid="UV-BC-III-13", title="UV outer bound for the BC", anchor="III-13", tier="D", bound="outer", channel="BC",
     rates=R12, family="U; V|U; X|U,V",
     constraints=["R1 <= I(U;Y1)", "R2 <= I(V;Y2)", "R1 + R2 <= I(X;Y1|V) + I(V;Y2)",
                  "R1 + R2 <= I(X;Y2|U) + I(U;Y1)"])
_add(rid="both-decode-BC-III-14", title="BC where both receivers decode everything", anchor="III-14", tier="D",
     bound="capacity", channel="BC", rates=R012, family="X", regime="BC-equal-capable",
     constraints=["R0 + R1 + R2 <= I(X;Y1)", "R0 + R1 + R2 <= I(X;Y2)"])

# interference channel
_add(rid="HK-III-18", title="Han-Kobayashi region (compact form)", anchor="III-18", tier="D", bound="inner",
     channel="CIC", rates=R12, family="W1; W2; X1|W1; X2|W2",
     constraints=["R1 <= I(X1;Y1|W2)", "R2 <= I(X2;Y2|W1)",
                  "R1 + R2 <= I(X1,W2;Y1) + I(X2;Y2|W1,W2)",
                  "R1 + R2 <= I(X1;Y1|W1,W2) + I(X2,W1;Y2)",
                  "R1 + R2 <= I(X1,W2;Y1|W1) + I(X2,W1;Y2|W2)",
                  "2R1 + R2 <= I(X1,W2;Y1) + I(X1;Y1|W1,W2) + I(X2,W1;Y2|W2)",
                  "R1 + 2R2 <= I(X2;Y2|W1,W2) + I(X2,W1;Y2) + I(X1,W2;Y1|W1)"])
_add(rid="Sato-III-20", title="Sato outer bound (identity coupling)", anchor="III-20", tier="D", bound="outer",
     channel="CIC", rates=R12, family="X1; X2",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(X2;Y2|X1)", "R1 + R2 <= I(X1,X2;Y1,Y2)"],
     notes="evaluated at the given output coupling only, which can only enlarge the bound")
_add(rid="strong-CIC-III-23", title="strong-interference CIC capacity", anchor="III-23", tier="D",
     bound="capacity", channel="CIC", rates=R12, family="X1; X2", regime="CIC-strong",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(X2;Y2|X1)", "R1 + R2 <= I(X1,X2;Y1)", "R1 + R2 <= I(X1,X2;Y2)"])
_add(rid="gaussian-strong-CIC-III-24", title="Gaussian strong-interference CIC capacity", anchor="III-24",
     tier="G", bound="capacity", channel="CIC", rates=R12, gaussian=GaussianForm("ic", rows=_g_strong_cic))
_add(rid="mixed-sum-gaussian-III-28", title="Gaussian mixed-interference sum-rate capacity", anchor="III-28",
     tier="G", bound="sum-rate", channel="CIC", rates=RSUM,
     gaussian=GaussianForm("ic", value=_g_mixed_sum, regime="gaussian-CIC-mixed", check=_need_mixed_side1))
_add(rid="noisy-sum-gaussian-III-30", title="Gaussian noisy-interference sum-rate capacity", anchor="III-30",
     tier="G", bound="sum-rate", channel="CIC", rates=RSUM,
     gaussian=GaussianForm("ic", value=_g_noisy_sum, regime="gaussian-CIC-noisy"))
_add(rid="ZIC-strong-gaussian-III-33", title="Gaussian ZIC capacity, strong interference", anchor="III-33",
     tier="G", bound="capacity", channel="ZIC", rates=R12, gaussian=GaussianForm("ic", rows=_g_zic_strong))
_add(rid="ZIC-weak-sum-gaussian-III-34", title="Gaussian ZIC sum-rate capacity, weak interference",
     anchor="III-34", tier="G", bound="sum-rate", channel="ZIC", rates=RSUM,
     gaussian=GaussianForm("ic", value=_g_zic_weak_sum, regime="gaussian-ZIC-noisy"))

# cognitive channel
_RTD_FAMILY = "U2c; X2|U2c; U1c|U2c,X2; U1pb|U2c,X2,U1c; U2pb|U2c,X2,U1c,U1pb; X1|U2c,X2,U1c,U1pb,U2pb"
_add(rid="RTD-III-35", title="rate-splitting and binning region with eight auxiliary rates", anchor="III-35",
     tier="S", bound="inner", channel="CRC",
     rates=("R1", "R2", "Rh1c", "Rh1pb", "Rh2pb", "R1c", "R1pb", "R2c", "R2pa", "R2pb"), outputs=R12,
     family=_RTD_FAMILY, default_aux=2,
     constraints=["R1 - R1c - R1pb = 0", "R2 - R2c - R2pa - R2pb = 0",
                  "Rh1c >= I(X2;U1c|U2c)",
                  "Rh1c + Rh1pb >= I(X2;U1c|U2c) + I(X2;U1pb|U2c,U1c)",
                  "Rh1c + Rh1pb + Rh2pb >= I(X2;U1c|U2c) + I(X2;U1pb|U2c,U1c) + I(U1pb;U2pb|U2c,X2,U1c)",
                  "R1pb + Rh1pb <= I(U1pb;Y1|U2c,U1c)",
                  "R1c + Rh1c + R1pb + Rh1pb <= I(U1c,U1pb;Y1|U2c)",
                  "R2c + R1c + Rh1c + R1pb + Rh1pb <= I(U2c,U1c,U1pb;Y1)",
                  "R2pb + Rh2pb <= I(U2pb;Y2|U1c,X2,U2c)",
                  "R2pa + R2pb + Rh2pb <= I(X2,U2pb;Y2|U2c,U1c) + I(X2;U1c|U2c)",
                  "R1c + Rh1c + R2pb + Rh2pb <= I(U2pb,U1c;Y2|X2,U2c) + I(X2;U1c|U2c)",
                  "R2pa + R1c + Rh1c + R2pb + Rh2pb <= I(X2,U1c,U2pb;Y2|U2c) + I(X2;U1c|U2c)",
                  "R2c + R2pa + R1c + Rh1c + R2pb + Rh2pb <= I(U2c,X2,U1c,U2pb;Y2) + I(X2;U1c|U2c)"],
     notes="symbolic template; discrete evaluation at binary auxiliaries projects per distribution by LP")
_add(rid="MGKS-outer-III-37", title="outer bound with independent auxiliaries", anchor="III-37", tier="D",
     bound="outer", channel="CRC", rates=R12, family="U1; U2; V|U1,U2; X2=f(U2,V); X1=f(U1,U2,V)",
     constraints=["R1 <= I(V,U1;Y1)", "R2 <= I(V,U2,X2;Y2)",
                  "R1 + R2 <= I(X1;Y1|X2,U2,V) + I(V,U2,X2;Y2)",
                  "R1 + R2 <= I(X1,X2;Y2|U1,V) + I(V,U1;Y1)"])
_add(rid="CRC-strong-III-41", title="strong-interference CRC capacity", anchor="III-41", tier="D",
     bound="capacity", channel="CRC", rates=R12, family="X1; X2|X1", regime="CRC-strong",
     constraints=["R1 <= I(X1;Y1|X2)", "R1 + R2 <= I(X1,X2;Y2)"])
_add(rid="gaussian-CRC-strong-III-42", title="Gaussian strong-interference CRC capacity", anchor="III-42",
     tier="G", bound="capacity", channel="CRC", rates=R12, gaussian=GaussianForm("ic", rows=_g_crc_dpc_sum, sweep=True))
_add(rid="gaussian-CRC-weak-III-47", title="Gaussian CRC capacity for |b| <= 1", anchor="III-47", tier="G",
     bound="capacity", channel="CRC", rates=R12, gaussian=GaussianForm("ic", rows=_g_crc_weak, sweep=True))
_add(rid="gaussian-CRC-outer-III-48", title="Gaussian CRC outer bound for |b| > 1", anchor="III-48", tier="G",
     bound="outer", channel="CRC", rates=R12, gaussian=GaussianForm("ic", rows=_g_crc_dpc_sum, sweep=True))
_add(rid="semidet-CRC-III-49", title="semi-deterministic CRC capacity", anchor="III-49", tier="D",
     bound="capacity", channel="CRC", rates=R12, family=_joint(["V", "X2", "X1"]), requires=("Y1-deterministic",),
     constraints=["R1 <= H(Y1|X2)", "R2 <= I(V,X2;Y2)", "R1 + R2 <= I(V,X2;Y2) + H(Y1|V,X2)"])
_add(rid="less-noisy-CRC-III-52", title="less-noisy CRC capacity", anchor="III-52", tier="D", bound="capacity",
     channel="CRC", rates=R12, family=_joint(["V", "X2", "X1"]), regime="CRC-less-noisy",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(V,X2;Y2)", "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)"])
_add(rid="strong-primary-simplified-III-58", title="simplified CRC region for strong primary interference",
     anchor="III-58", tier="D", bound="inner", channel="CRC", rates=R12, family=_joint(["W2", "W1", "X2", "X1"]),
     constraints=["R1 <= I(X1,X2;Y2|W2)", "R1 <= I(W1;Y1|W2) - I(W1;X2|W2)",
                  "R1 + R2 <= I(X1,X2;Y2|W2,W1) + I(W2,W1;Y1)", "R1 + R2 <= I(X1,X2;Y2)",
                  "2R1 + R2 <= I(X1,X2;Y2|W2) + I(W2,W1;Y1) - I(W1;X2|W2)"])

_UNIFIED = [
    *_min_rows("R1", "I(M1,Z;Y1)", "I(M1,Z;Y1|M2)", "I(M1;Y1|Z) + I(Z;Y2)", "I(M1;Y1|Z,M2) + I(Z;Y2|M2)"),
    *_min_rows("R2", "I(M2,Z;Y2)", "I(M2,Z;Y2|M1)", "I(M2;Y2|Z) + I(Z;Y1)", "I(M2;Y2|Z,M1) + I(Z;Y1|M1)"),
    "R1 + R2 <= I(M1;Y1|Z,M2) + I(M2,Z;Y2)",
    "R1 + R2 <= I(M2;Y2|Z,M1) + I(M1,Z;Y1)",
    "R1 + R2 <= I(M1;Y1|Z,M2) + I(M2;Y2|Z) + I(Z;Y1)",
    "R1 + R2 <= I(M2;Y2|Z,M1) + I(M1;Y1|Z) + I(Z;Y2)",
]
_add(rid="unified-III-70", title="unified outer-bound template over messages and a common variable",
     anchor="III-70", tier="S", bound="outer", channel="any", rates=R12, constraints=_UNIFIED,
     discrete_ok=False, notes="template over message variables M1, M2 and Z; instantiated by the UV bounds")
_add(rid="UV-CIC-III-76", title="UV outer bound for the CIC", anchor="III-76", tier="D", bound="outer",
     channel="CIC", rates=R12, family="X1; X2; U|X1,X2; V|X1,X2,U",
     constraints=[*_min_rows("R1", "I(U,X1;Y1)", "I(X1;Y1|X2)", "I(X1;Y1|V,X2) + I(V;Y2|X2)"),
                  *_min_rows("R2", "I(V,X2;Y2)", "I(X2;Y2|X1)", "I(X2;Y2|U,X1) + I(U;Y1|X1)"),
                  "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)", "R1 + R2 <= I(X2;Y2|U,X1) + I(U,X1;Y1)"])
_add(rid="UV-CRC-III-80", title="UV outer bound for the CRC", anchor="III-80", tier="D", bound="outer",
     channel="CRC", rates=R12, family="U; V|U; X2=f(V); X1=f(U,V)",
     constraints=[*_min_rows("R1", "I(U;Y1)", "I(X1;Y1|X2)", "I(X1;Y1|V,X2) + I(V;Y2|X2)"),
                  "R2 <= I(V,X2;Y2)", "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)",
                  "R1 + R2 <= I(X1,X2;Y2|U) + I(U;Y1)"])
_add(rid="CRC-outer-III-82", title="simplified CRC outer bound", anchor="III-82", tier="D", bound="outer",
     channel="CRC", rates=R12, family=_joint(["V", "X2", "X1"]),
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(V,X2;Y2)", "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)"])
_ONESIDED_ROW = "R1 <= I(M1;Y1|Z) - I(M1;Y2|Z)"
_add(rid="ZIC-outer-III-84", title="one-sided CIC outer bound with the extra single-rate constraint",
     anchor="III-84", tier="D", bound="outer", channel="ZIC", rates=R12, requires=("one-sided",),
     family="M1; M2; Z|M1,M2; X1=f(M1); X2=f(M2)", constraints=[*_UNIFIED, _ONESIDED_ROW], default_aux=2)
_add(rid="CRC-onesided-outer-III-84", title="one-sided CRC outer bound with the extra single-rate constraint",
     anchor="III-84", tier="D", bound="outer", channel="CRC", rates=R12, requires=("one-sided",),
     family="M1; M2; Z|M1,M2; X2=f(M2); X1=f(M1,M2)", constraints=[*_UNIFIED, _ONESIDED_ROW], default_aux=2)

# sum-rate and capacity results for the CIC / ZIC / CRC
_add(rid="mixed-sum-III-91", title="mixed-interference sum-rate capacity", anchor="III-91", tier="D",
     bound="sum-rate", channel="CIC", rates=RSUM, family="X1; X2", regime="CIC-mixed",
     objective=["I(X1,X2;Y1)", "I(X1;Y1|X2) + I(X2;Y2)"])
_add(rid="degraded-CIC-sum-III-93", title="degraded CIC sum-rate capacity", anchor="III-93", tier="D",
     bound="sum-rate", channel="CIC", rates=RSUM, family="X1; X2", regime="CIC-mixed",
     objective=["I(X1;Y1|X2) + I(X2;Y2)"])
_add(rid="ZIC-strong-III-95", title="ZIC capacity, strong interference", anchor="III-95", tier="D",
     bound="capacity", channel="ZIC", rates=R12, family="X1; X2", regime="ZIC-strong",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(X2;Y2)", "R1 + R2 <= I(X1,X2;Y1)"])
_add(rid="ZIC-noisy-sum-III-97", title="ZIC sum-rate capacity, noisy interference", anchor="III-97", tier="D",
     bound="sum-rate", channel="ZIC", rates=RSUM, family="X1; X2", regime="ZIC-noisy",
     objective=["I(X2;Y2) + I(X1;Y1)"])
_add(rid="more-capable-CRC-III-99", title="more-capable CRC capacity", anchor="III-99", tier="D",
     bound="capacity", channel="CRC", rates=R12, family=_joint(["V", "X2", "X1"]), regime="CRC-more-capable-a",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(V,X2;Y2)", "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)",
                  "R1 + R2 <= I(X1,X2;Y1)"])
_add(rid="CRC-strong-primary-sum-III-101", title="CRC sum-rate capacity, strong primary interference",
     anchor="III-101", tier="D", bound="sum-rate", channel="CRC", rates=RSUM, family="X1; X2|X1",
     regime="CRC-strong-primary", objective=["I(X1,X2;Y2)"])
_add(rid="gaussian-CRC-strong-primary-sum-III-102", title="Gaussian CRC sum-rate, strong primary interference",
     anchor="III-102", tier="G", bound="sum-rate", channel="CRC", rates=RSUM,
     gaussian=GaussianForm("ic", value=_g_crc_primary_sum, regime="gaussian-CRC-strong-primary"))
_add(rid="onesided-CRC-III-103", title="one-sided CRC capacity with a noiseless primary link", anchor="III-103",
     tier="D", bound="capacity", channel="CRC", rates=R12, family=_joint(["W", "U", "X2", "X1"]),
     requires=("one-sided", "Y2-equals-X2"),
     constraints=["R1 <= I(U;Y1|W) - I(U;X2|W)", "R2 <= H(X2)", "R2 <= H(X2|W) + I(W;Y1)"])
_add(rid="onesided-CRC-inner-III-104", title="one-sided CRC achievable region", anchor="III-104", tier="D",
     bound="inner", channel="CRC", rates=R12, family=_joint(["W", "U", "X2", "X1"]),
     constraints=["R1 <= I(U;Y1|W) - I(U;X2|W)", "R2 <= I(X2,W;Y2)",
                  "R1 + R2 <= I(U,W;Y1) + I(X2;Y2|W) - I(U;X2|W)"])

# one-sided receiver side information (receiver 1 knows message 2, or as stated)
_add(rid="OSRSI-BC-III-109", title="BC capacity, receiver 1 knows message 2", anchor="III-109", tier="D",
     bound="capacity", channel="BC", rates=R12, family="V; X|V",
     constraints=["R1 <= I(X;Y1)", "R2 <= I(V;Y2)", "R1 + R2 <= I(X;Y1|V) + I(V;Y2)"])
_add(rid="OSRSI-BC-swapped-III-110", title="BC capacity, receiver 2 knows message 1", anchor="III-110",
     tier="D", bound="capacity", channel="BC", rates=R12, family="U; X|U",
     constraints=["R1 <= I(U;Y1)", "R2 <= I(X;Y2)", "R1 + R2 <= I(X;Y2|U) + I(U;Y1)"])
_add(rid="OSRSI-BC-gaussian-III-111", title="Gaussian BC capacity with receiver side information",
     anchor="III-111", tier="G", bound="capacity", channel="BC", rates=R12, gaussian=GaussianForm("bc", rows=_g_osrsi_bc))
_add(rid="OSRSI-CIC-inner-III-112", title="CIC achievable region, receiver 1 knows message 2", anchor="III-112",
     tier="D", bound="inner", channel="CIC", rates=R12, family="X1; W1|X1; X2",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(X2;Y2|W1)", "R1 + R2 <= I(X1;Y1|X2,W1) + I(X2,W1;Y2)"])
_add(rid="OSRSI-CIC-outer-III-113", title="CIC outer bound, receiver 1 knows message 2", anchor="III-113",
     tier="D", bound="outer", channel="CIC", rates=R12, family="X1; X2; V|X1,X2",
     constraints=[*_min_rows("R1", "I(X1;Y1|X2)", "I(X1;Y1|V,X2) + I(V;Y2|X2)"),
                  *_min_rows("R2", "I(V,X2;Y2)", "I(X2;Y2|X1)"),
                  "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)"])
_add(rid="OSRSI-CIC-strong-III-116", title="CIC capacity with side information, strong at receiver 2",
     anchor="III-116", tier="D", bound="capacity", channel="CIC", rates=R12, family="X1; X2",
     regime="OSRSI-CIC-strong-Y2",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(X2;Y2|X1)", "R1 + R2 <= I(X1,X2;Y2)"])
_add(rid="OSRSI-CIC-weak-sum-III-118", title="CIC sum-rate with side information, weak at receiver 2",
     anchor="III-118", tier="D", bound="sum-rate", channel="CIC", rates=RSUM, family="X1; X2",
     regime="OSRSI-CIC-weak-Y2", objective=["I(X1;Y1|X2) + I(X2;Y2)"])
_add(rid="OSRSI-CIC-weak-sum-gaussian-III-118", title="Gaussian CIC sum-rate with side information",
     anchor="III-118", tier="G", bound="sum-rate", channel="CIC", rates=RSUM,
     gaussian=GaussianForm("ic", value=_g_osrsi_weak_sum, regime="gaussian-OSRSI-weak"))
_add(rid="OSRSI-mixed-sum-III-120", title="mixed-regime sum-rate with side information", anchor="III-120",
     tier="D", bound="sum-rate", channel="CIC", rates=RSUM, family="X1; X2", regime="OSRSI-mixed-1",
     objective=["I(X1,X2;Y2)", "I(X1;Y1|X2) + I(X2;Y2|X1)"])
_add(rid="mixed-sum-swapped-III-121", title="mixed-regime sum-rate without side information",
     anchor="III-121", tier="D", bound="sum-rate", channel="CIC", rates=RSUM, family="X1; X2",
     regime="OSRSI-mixed-1", objective=["I(X1,X2;Y2)", "I(X1;Y1) + I(X2;Y2|X1)"])
_add(rid="OSRSI-gaussian-III-123", title="Gaussian CIC capacity with side information (|b| >= 1)",
     anchor="III-123", tier="G", bound="capacity", channel="CIC", rates=R12,
     gaussian=GaussianForm("ic", rows=_g_osrsi_strong, check=_need_strong_b))
_add(rid="OSRSI-CRC-case1-III-125", title="CRC capacity, cognitive receiver knows the primary message",
     anchor="III-125", tier="D", bound="capacity", channel="CRC", rates=R12, family=_joint(["V", "X2", "X1"]),
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(V,X2;Y2)", "R1 + R2 <= I(X1;Y1|V,X2) + I(V,X2;Y2)"])
_add(rid="OSRSI-CRC-case2-inner-III-129", title="CRC achievable region, primary receiver knows message 1",
     anchor="III-129", tier="D", bound="inner", channel="CRC", rates=R12, family=_joint(["W2", "W1", "X2", "X1"]),
     constraints=["R1 <= I(W1;Y1|W2) - I(X2;W1|W2)", "R2 <= I(X1,X2;Y2)",
                  "R1 + R2 <= I(X1,X2;Y2|W2,W1) + I(W2,W1;Y1)",
                  "R1 + R2 <= I(X1,X2;Y2|W2) + I(W2,W1;Y1) - I(X2;W1|W2)"])
_add(rid="OSRSI-CRC-case2-outer-III-130", title="CRC outer bound, primary receiver knows message 1",
     anchor="III-130", tier="D", bound="outer", channel="CRC", rates=R12, family=_joint(["U", "X2", "X1"]),
     constraints=[*_min_rows("R1", "I(U;Y1)", "I(X1;Y1|X2)"), "R2 <= I(X1,X2;Y2)",
                  "R1 + R2 <= I(X1,X2;Y2|U) + I(U;Y1)"])
_add(rid="more-capable-case2-III-132", title="more-capable CRC capacity, primary receiver knows message 1",
     anchor="III-132", tier="D", bound="capacity", channel="CRC", rates=R12, family="X1; X2|X1",
     regime="CRC-more-capable-a",
     constraints=["R1 <= I(X1;Y1|X2)", "R2 <= I(X1,X2;Y2)", "R1 + R2 <= I(X1,X2;Y1)"])
_add(rid="gaussian-case2-III-133", title="Gaussian degraded CRC capacity, primary receiver knows message 1",
     anchor="III-133", tier="G", bound="capacity", channel="CRC", rates=R12, gaussian=GaussianForm("ic", rows=_g_case2, sweep=True))
_add(rid="semidet-case2-III-135", title="semi-deterministic CRC capacity, primary receiver knows message 1",
     anchor="III-135", tier="D", bound="capacity", channel="CRC", rates=R12, family="X1; X2|X1",
     requires=("Y1-deterministic",),
     constraints=["R1 <= H(Y1|X2)", "R2 <= I(X1,X2;Y2)", "R1 + R2 <= I(X1,X2;Y1,Y2)"])


def _graph_spec(rid, title, anchor, graph, family, default_aux, discrete_ok, notes):
    from .scheme_graph import builtin_graph, lifted_system

    system = lifted_system(builtin_graph(graph))
    rates = system.outputs + system.eliminate
    return RegionSpec(rid=rid, title=title, anchor=anchor, tier="S", bound="inner", channel="CRC", rates=rates,
                      constraints=tuple(Constraint(c.lhs, "<=" if c.rel == "<" else c.rel, c.rhs)
                                        for c in system.constraints),
                      family=_factors(family) if family else (), outputs=system.outputs,
                      default_aux=default_aux, discrete_ok=discrete_ok, notes=notes)


_LAZY = {
    "CRC-inner-III-54": lambda: _graph_spec(
        "CRC-inner-III-54", "CRC achievable region from the five-codeword scheme", "III-54", "fig7",
        "W2; V2|W2; W1|W2,V2; U1|W2,V2,W1; V1|W2,V2,W1,U1; X2|W2,V2; X1|W2,V2,W1,U1,V1,X2", 2, True,
        "lifted system compiled from the shipped fig7 scheme graph; binary auxiliaries by default"),
    "appendix-lifted-A-23": lambda: _graph_spec(
        "appendix-lifted-A-23", "lifted region of the side-information CRC scheme", "A-23", "fig16",
        None, None, False, "lifted system compiled from the shipped fig16 scheme graph; projects to OSRSI-CRC-case2-inner-III-129"),
}


def get_region(rid: str) -> RegionSpec:
    if rid in _CATALOG:
        return _CATALOG[rid]
    if rid in _LAZY:
        _CATALOG[rid] = _LAZY[rid]()
        return _CATALOG[rid]
    raise ArgumentError(f"unknown region id {rid!r}")


def region_ids() -> list[str]:
    return list(_CATALOG) + [r for r in _LAZY if r not in _CATALOG]


def list_regions() -> list[dict]:
    return [get_region(r).metadata() for r in region_ids()]


# ---------------------------------------------------------------------------
# float geometry helpers


def _vertex_cloud(A: np.ndarray, b: np.ndarray, nonneg: Sequence[bool]) -> np.ndarray:
    """Vertices of {x : A x <= b_i, x_j >= 0 where flagged} for every rhs row b_i.

    Returns an array (N, d) of all feasible basic solutions over the batch.
    """
    m, d = A.shape
    extra = [np.eye(d)[j] * -1 for j in range(d) if nonneg[j]]
    full_A = np.vstack([A] + extra) if extra else A
    full_b = np.hstack([b, np.zeros((b.shape[0], len(extra)))]) if extra else b
    pts = []
    for idx in itertools.combinations(range(full_A.shape[0]), d):
        sub = full_A[list(idx)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        inv = np.linalg.inv(sub)
        x = full_b[:, list(idx)] @ inv.T
        slack = x @ full_A.T - full_b
        ok = np.all(slack <= VERTEX_TOL * (1 + np.abs(full_b)), axis=1)
        if ok.any():
            pts.append(x[ok])
    if not pts:
        return np.zeros((0, d))
    return np.vstack(pts)


def _round_pts(pts: np.ndarray, digits: int = 12) -> list[tuple[float, ...]]:
    out = np.round(pts, digits) + 0.0
    return sorted({tuple(float(v) for v in row) for row in out})


def _frac(v: float) -> Fraction:
    return Fraction(repr(float(round(v, 12))))


def hull_of_points(points: np.ndarray, variables: Sequence[str]) -> tuple[list[tuple[float, ...]], RatePolyhedron]:
    """Float convex hull with its inequality system (nonnegative orthant assumed)."""
    variables = tuple(variables)
    d = len(variables)
    if len(points) == 0:
        return [], RatePolyhedron(variables, (), variables, True)
    pts = _round_pts(np.asarray(points, dtype=float).reshape(-1, d))
    if d == 2 and len(pts) >= 3:
        ring = hull_2d(pts)
        if len(ring) >= 3:
            rows = []
            for k in range(len(ring)):
                a, b = ring[k], ring[(k + 1) % len(ring)]
                nv = (b[1] - a[1], a[0] - b[0])
                scale = max(abs(nv[0]), abs(nv[1]))
                nv = (nv[0] / scale, nv[1] / scale)
                rows.append(Inequality((_frac(nv[0]), _frac(nv[1])), _frac(nv[0] * a[0] + nv[1] * a[1])))
            return ring, RatePolyhedron(variables, rows, variables)
    if d == 3 and len(pts) >= 4:
        from scipy.spatial import ConvexHull, QhullError

        arr = np.asarray(pts)
        try:
            h = ConvexHull(arr)
        except QhullError:
            h = None
        if h is not None:
            seen = {}
            for eq in h.equations:
                nv = eq[:3] / np.abs(eq[:3]).max()
                off = -eq[3] / np.abs(eq[:3]).max()
                key = tuple(np.round(np.append(nv, off), 9))
                seen[key] = Inequality(tuple(_frac(x) for x in nv), _frac(off))
            verts = sorted({tuple(arr[i]) for i in h.vertices})
            return verts, RatePolyhedron(variables, list(seen.values()), variables)
    poly = exact_hull([tuple(_frac(x) for x in p) for p in pts], variables)
    if d == 2:
        return hull_2d(pts), poly
    return pts, poly


def _max_min_over_hull(vals: np.ndarray) -> tuple[float, int]:
    """max over convex combinations of the pointwise minimum of the columns.

    Returns the value and the index of the best single distribution.
    """
    point_min = vals.min(axis=1)
    best_idx = int(np.argmax(point_min))
    best = float(point_min[best_idx])
    if vals.shape[1] == 1:
        return best, best_idx
    if vals.shape[1] == 2:
        ring = hull_2d(_round_pts(vals))
        for k in range(len(ring)):
            a, b = np.array(ring[k]), np.array(ring[(k + 1) % len(ring)])
            da, db = a[0] - a[1], b[0] - b[1]
            if da * db < 0:
                t = da / (da - db)
                p = a + t * (b - a)
                best = max(best, float(min(p)))
        return best, best_idx
    from scipy.optimize import linprog

    n, k = vals.shape
    c = np.zeros(n + 1)
    c[-1] = -1
    A = np.hstack([-vals.T, np.ones((k, 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(k), A_eq=np.append(np.ones(n), 0)[None], b_eq=[1],
                  bounds=[(0, None)] * n + [(None, None)], method="highs")
    return max(best, float(-res.fun)) if res.success else best, best_idx


# ---------------------------------------------------------------------------
# Gaussian evaluation


def _gaussian_polytope_vertices(spec: RegionSpec, rows: list[tuple[dict, float]]) -> np.ndarray:
    rates = spec.projected
    A = np.array([[float(c.get(r, 0)) for r in rates] for c, _ in rows])
    b = np.array([[v for _, v in rows]])
    return _vertex_cloud(A, b, [True] * len(rates))


def evaluate_gaussian(rid: str, params, alpha_grid_size: int = 201) -> RatePolyhedron:
    """Closed-form region as an inequality system.

    Swept regions are evaluated on a uniform grid of the power split and the
    convex hull of the union is returned; sum-rate formulas come back as the
    single constraint ``R1 + R2 <= value``.
    """
    spec = get_region(rid)
    g = spec.gaussian
    if g is None:
        raise ArgumentError(f"region {rid} has no Gaussian evaluator")
    (_ic if g.params == "ic" else _bc)(params)
    if g.check is not None:
        msg = g.check(params)
        if msg:
            raise ArgumentError(f"{rid}: {msg}")
    if g.value is not None:
        v = g.value(params)
        return RatePolyhedron(spec.projected, [Inequality((Fraction(1), Fraction(1)), Fraction(v))], spec.projected)
    if not g.sweep:
        rows = g.rows(params, 0.0)
        return RatePolyhedron.from_constraints(spec.projected, [(c, "<=", v) for c, v in rows])
    if alpha_grid_size < 2:
        raise ArgumentError("alpha grid needs at least two points")
    pts = [_gaussian_polytope_vertices(spec, g.rows(params, float(al))) for al in np.linspace(0, 1, alpha_grid_size)]
    return hull_of_points(np.vstack(pts), spec.projected)[1]


def gaussian_vertices(rid: str, params, alpha_grid_size: int = 201) -> list[tuple[float, ...]]:
    """Hull vertices of a Gaussian region in counter-clockwise order."""
    spec = get_region(rid)
    g = spec.gaussian
    if g is None or g.value is not None:
        raise ArgumentError(f"region {rid} has no Gaussian region evaluator")
    alphas = np.linspace(0, 1, alpha_grid_size) if g.sweep else [0.0]
    pts = np.vstack([_gaussian_polytope_vertices(spec, g.rows(params, float(al))) for al in alphas])
    return hull_of_points(pts, spec.projected)[0]


def gaussian_rows(rid: str, params, alpha: float = 0.0) -> list[tuple[dict, float]]:
    """Constraint values at one power split."""
    spec = get_region(rid)
    if spec.gaussian is None or spec.gaussian.rows is None:
        raise ArgumentError(f"region {rid} has no Gaussian row evaluator")
    if not 0 <= alpha <= 1:
        raise ArgumentError("alpha must lie in [0, 1]")
    return spec.gaussian.rows(params, alpha)


# ---------------------------------------------------------------------------
# discrete evaluation


@dataclass
class _Sampled:
    names: tuple[str, ...]
    factors: tuple[Factor, ...]
    sizes: dict[str, int]
    params: list[np.ndarray]  # per factor (B, cells, card)

    @property
    def batch(self) -> int:
        return self.params[0].shape[0] if self.params else 0

    def select(self, idx) -> "_Sampled":
        return _Sampled(self.names, self.factors, self.sizes, [p[idx] for p in self.params])


def _cells(f: Factor, sizes) -> int:
    return int(np.prod([sizes[p] for p in f.parents])) if f.parents else 1


def _grid_options(f: Factor, sizes, k: int) -> np.ndarray:
    """All grid tables for one factor, shape (n, cells, card)."""
    cells, card = _cells(f, sizes), sizes[f.var]
    if f.det:
        base = np.eye(card)
        opts = itertools.product(range(card), repeat=cells)
        return np.array([[base[i] for i in combo] for combo in opts])
    grid = simplex_grid(card, k)
    idx = np.array(list(itertools.product(range(len(grid)), repeat=cells)))
    return grid[idx]


def _grid_size(f: Factor, sizes, k: int) -> int:
    cells, card = _cells(f, sizes), sizes[f.var]
    per = card if f.det else simplex_grid_size(card, k)
    return per**cells


def _sample(spec: RegionSpec, sizes: dict[str, int], k: int | None, samples: int, seed: int,
            cap: int = GRID_CAP) -> tuple[_Sampled, dict]:
    factors = spec.family
    info = {"grid_k": None, "grid_points": 0, "random_samples": samples, "seed": seed}
    blocks: list[list[np.ndarray]] = []
    if k:
        kk = k
        while kk >= 1:
            total = math.prod(_grid_size(f, sizes, kk) for f in factors)
            if total <= cap:
                break
            kk -= 1
        if kk >= 1:
            opts = [_grid_options(f, sizes, kk) for f in factors]
            idx = np.array(list(itertools.product(*(range(len(o)) for o in opts))))
            blocks.append([o[idx[:, i]] for i, o in enumerate(opts)])
            info["grid_k"] = kk
            info["grid_points"] = len(idx)
    if samples > 0:
        rng = np.random.default_rng(seed)
        rnd = []
        for f in factors:
            cells, card = _cells(f, sizes), sizes[f.var]
            if f.det:
                pick = rng.integers(0, card, size=(samples, cells))
                rnd.append(np.eye(card)[pick])
            else:
                tab = dirichlet_mix(rng, card, samples * cells).reshape(samples, cells, card)
                rnd.append(_drop_parents(rng, tab, [sizes[p] for p in f.parents]))
        blocks.append(rnd)
    if not blocks:
        raise ResourceError("evaluation budget allows no distributions")
    params = [np.concatenate([b[i] for b in blocks], axis=0) for i in range(len(factors))]
    return _Sampled(spec.family_vars, factors, sizes, params), info


def _drop_parents(rng: np.random.Generator, tables: np.ndarray, parent_sizes: Sequence[int]) -> np.ndarray:
    """Make every other draw ignore a random subset of its parents.

    Generic draws rarely make binning penalties such as I(U;X2|W) small; draws
    where a factor is blind to some parents put mass on those faces.
    """
    if not parent_sizes:
        return tables
    n = tables.shape[0]
    npar = len(parent_sizes)
    cells = np.array(list(np.ndindex(*parent_sizes)))
    gathers = []
    for mask in range(2**npar):
        idx = cells.copy()
        for j in range(npar):
            if mask >> j & 1:
                idx[:, j] = 0
        gathers.append(np.ravel_multi_index(idx.T, parent_sizes))
    gathers = np.array(gathers)
    masks = rng.integers(0, 2**npar, size=n)
    masks[: n // 2] = 0
    return tables[np.arange(n)[:, None], gathers[masks]]


_LETTERS = "abcdefghijklmnopqrstuvwxy"


def _assemble(s: _Sampled) -> np.ndarray:
    """Joint tables (B, *sizes) in family order from the factor parameters."""
    bsz = s.batch
    table = np.ones((bsz,))
    names: list[str] = []
    for f, par in zip(s.factors, s.params):
        cond = par.reshape((bsz,) + tuple(s.sizes[p] for p in f.parents) + (s.sizes[f.var],))
        cur = "".join(_LETTERS[i] for i in range(len(names)))
        new = _LETTERS[len(names)]
        par_letters = "".join(_LETTERS[names.index(p)] for p in f.parents)
        table = np.einsum(f"z{cur},z{par_letters}{new}->z{cur}{new}", table, cond)
        names.append(f.var)
    return table


def _expand_expr(expr: InfoExpr, mapping: Mapping[str, tuple[str, ...]]) -> InfoExpr:
    if not mapping:
        return expr

    def ren(sset):
        out = set()
        for v in sset:
            out |= set(mapping.get(v, (v,)))
        return frozenset(out)

    return InfoExpr({(a[0],) + tuple(ren(x) for x in a[1:]): c for a, c in expr.terms.items()}, expr.constant)


def _batch_joint(spec: RegionSpec, s: _Sampled, net: DmNet) -> BatchJoint:
    table = _assemble(s)
    names = list(s.names)
    x1, x2 = net.sizes[:2]
    if "X" in names:
        i = names.index("X")
        table = table.reshape(table.shape[: i + 1] + (x1, x2) + table.shape[i + 2 :])
        names[i : i + 1] = ["X1", "X2"]
    order = [i for i, n in enumerate(names) if n not in ("X1", "X2")] + [names.index("X1"), names.index("X2")]
    table = np.transpose(table, [0] + [i + 1 for i in order])
    return attach_channel([names[i] for i in order], table, net.transition)


def _check_requirements(spec: RegionSpec, net: DmNet) -> None:
    for req in spec.requires:
        if req == "Y1-deterministic":
            if is_semideterministic(net, 1) is None:
                raise PreconditionError(f"{spec.rid} needs Y1 to be a deterministic function of the inputs")
        elif req == "one-sided":
            if not is_one_sided(net):
                raise PreconditionError(f"{spec.rid} needs receiver 2 to be unaffected by transmitter 1")
        elif req == "Y2-equals-X2":
            fmap = is_semideterministic(net, 2)
            if fmap is None or not np.all(fmap == fmap[:1]) or len(set(fmap[0].tolist())) != net.sizes[1]:
                raise PreconditionError(f"{spec.rid} needs Y2 to be a one-to-one function of X2")
    if spec.channel == "BC" and spec.family and net.sizes[1] != 1 and "X" in spec.family_vars:
        pass  # the pair (X1, X2) is the broadcast input


def _sizes(spec: RegionSpec, net: DmNet, aux_cards) -> dict[str, int]:
    x1, x2 = net.sizes[:2]
    default = spec.default_aux or (x1 * x2 + 1)
    sizes = {"X1": x1, "X2": x2, "X": x1 * x2}
    if isinstance(aux_cards, int):
        aux_cards = {a: aux_cards for a in spec.aux}
    aux_cards = dict(aux_cards or {})
    unknown = set(aux_cards) - set(spec.aux)
    if unknown:
        raise ArgumentError(f"{spec.rid} has no auxiliaries {sorted(unknown)}; roster: {list(spec.aux)}")
    for a in spec.aux:
        c = int(aux_cards.get(a, default))
        if c < 1:
            raise ArgumentError(f"auxiliary cardinality for {a} must be positive")
        sizes[a] = c
    return sizes


def _rhs_matrix(joint: BatchJoint, exprs: Sequence[InfoExpr]) -> np.ndarray:
    return np.stack([joint.evaluate(e) for e in exprs], axis=1)


def _evaluate_exprs(spec: RegionSpec, s: _Sampled, net: DmNet, exprs: Sequence[InfoExpr]) -> np.ndarray:
    mapping = {"X": ("X1", "X2")} if "X" in spec.family_vars else {}
    exprs = [_expand_expr(e, mapping) for e in exprs]
    cells = int(np.prod([s.sizes[v] for v in s.names])) * net.sizes[2] * net.sizes[3]
    chunk = max(1, min(CHUNK, MAX_CELLS // max(cells, 1)))
    starts = list(range(0, s.batch, chunk))

    def run(st):
        part = s.select(slice(st, st + chunk))
        return _rhs_matrix(_batch_joint(spec, part, net), exprs)

    return np.concatenate(ordered_map(run, starts), axis=0)


@dataclass
class DiscreteResult:
    region_id: str
    variables: tuple[str, ...]
    points: np.ndarray
    vertices: list[tuple[float, ...]]
    polyhedron: RatePolyhedron
    stamp: str
    budget: dict
    distributions: int
    point_count: int
    factor_tables: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "region": self.region_id,
            "variables": list(self.variables),
            "stamp": self.stamp,
            "vertices": [list(v) for v in self.vertices],
            "constraints": self.polyhedron.to_text().strip().splitlines(),
            "distributions": self.distributions,
            "points": self.point_count,
            "budget": self.budget,
        }


def _hypothesis_checked(spec: RegionSpec, verdict: RegimeVerdict | None) -> bool:
    if spec.regime is None:
        return True
    return verdict is not None and verdict.regime == spec.regime and verdict.holds


def _constraint_arrays(spec: RegionSpec) -> tuple[np.ndarray, list[InfoExpr], list[str]]:
    rates = list(spec.rates)
    rows, exprs, rels = [], [], []
    for c in spec.constraints:
        vec = np.array([float(c.coeffs.get(r, 0)) for r in rates])
        rows.append(vec)
        exprs.append(c.rhs)
        rels.append(c.rel)
    return np.array(rows), exprs, rels


def _discrete_spec(rid: str, net: DmNet) -> RegionSpec:
    spec = get_region(rid)
    if spec.tier == "G" or not spec.discrete_ok or not spec.family:
        raise ArgumentError(f"region {rid} has no discrete evaluator (tier {spec.tier})")
    if spec.objective:
        raise ArgumentError(f"{rid} is a sum-rate formula; use sum_rate_capacity")
    _check_requirements(spec, net)
    return spec


def _check_cells(spec: RegionSpec, sizes, net: DmNet) -> None:
    cells = int(np.prod([sizes[v] for v in spec.family_vars]))
    if cells * net.sizes[2] * net.sizes[3] > MAX_CELLS:
        raise ResourceError(f"joint table of {cells} input-side cells is over the evaluation budget")


def evaluate_discrete(
    rid: str,
    net: DmNet,
    aux_cards=None,
    grid: Mapping | None = None,
    fix: Mapping[str, float] | None = None,
    verdict: RegimeVerdict | None = None,
) -> DiscreteResult:
    """Union over the sampled family of the per-distribution regions, hulled.

    ``grid`` keys: ``k`` (simplex denominator, default 8 for binary alphabets
    and 4 otherwise), ``random_samples``, ``seed``, ``grid_cap``.
    ``fix`` pins rate variables (e.g. ``{"R0": 0}``) before hulling.
    """
    spec = _discrete_spec(rid, net)
    sizes = _sizes(spec, net, aux_cards)
    grid = dict(grid or {})
    binary = all(sizes[v] <= 2 for v in spec.family_vars if v != "X") and net.sizes[0] * net.sizes[1] <= 4
    k = grid.get("k", (8 if binary else 4) if not spec.lifted else 0)
    default_n = DEFAULT_LIFTED_SAMPLES if spec.lifted else DEFAULT_SAMPLES
    samples = int(grid.get("random_samples", default_n))
    seed = int(grid.get("seed", 0))
    _check_cells(spec, sizes, net)
    s, info = _sample(spec, sizes, k, samples, seed, int(grid.get("grid_cap", GRID_CAP)))
    return _evaluate_sampled(spec, s, net, fix, verdict, info)


def evaluate_factors(
    rid: str,
    net: DmNet,
    factor_tables: Sequence[np.ndarray],
    aux_cards=None,
    fix: Mapping[str, float] | None = None,
    verdict: RegimeVerdict | None = None,
) -> DiscreteResult:
    """Evaluate a region on explicit family members.

    ``factor_tables[i]`` has shape (B, parent cells, |var|) for the i-th factor
    of the region's family, so two regions can be compared on shared batches.
    """
    spec = _discrete_spec(rid, net)
    sizes = _sizes(spec, net, aux_cards)
    _check_cells(spec, sizes, net)
    if len(factor_tables) != len(spec.family):
        raise ArgumentError(f"{rid} has {len(spec.family)} factors, got {len(factor_tables)} tables")
    params = []
    for f, t in zip(spec.family, factor_tables):
        t = np.asarray(t, dtype=float)
        want = (_cells(f, sizes), sizes[f.var])
        if t.ndim != 3 or t.shape[1:] != want:
            raise ArgumentError(f"factor {f} needs tables of shape (B, {want[0]}, {want[1]})")
        if t.min() < -1e-12 or np.abs(t.sum(axis=2) - 1).max() > 1e-9:
            raise ArgumentError(f"factor {f} tables must be row-stochastic")
        params.append(t)
    if len({p.shape[0] for p in params}) != 1:
        raise ArgumentError("factor tables disagree on the batch size")
    s = _Sampled(spec.family_vars, spec.family, sizes, params)
    return _evaluate_sampled(spec, s, net, fix, verdict, {"supplied": s.batch})


def _evaluate_sampled(spec, s: _Sampled, net, fix, verdict, info) -> DiscreteResult:
    A, exprs, rels = _constraint_arrays(spec)
    rhs = _evaluate_exprs(spec, s, net, exprs)
    variables = list(spec.rates)
    fix = dict(fix or {})
    for v in fix:
        if v not in variables or v not in spec.projected:
            raise ArgumentError(f"cannot fix unknown rate {v!r}")
    if spec.lifted:
        pts = _lifted_points(spec, A, rhs, rels, fix)
    else:
        keep = [i for i, v in enumerate(variables) if v not in fix]
        shift = sum(A[:, variables.index(v)] * float(val) for v, val in fix.items()) if fix else 0.0
        b = rhs - shift
        A_red = A[:, keep]
        zero_rows = np.all(A_red == 0, axis=1)
        if zero_rows.any():
            ok = np.all(b[:, zero_rows] >= -VERTEX_TOL, axis=1)
            b = b[ok][:, ~zero_rows]
            A_red = A_red[~zero_rows]
        pts = _vertex_cloud(A_red, b, [True] * len(keep)) if len(b) else np.zeros((0, len(keep)))
    out_vars = tuple(v for v in spec.projected if v not in fix)
    verts, poly = hull_of_points(pts, out_vars)
    info.update({"aux_cards": {a: s.sizes[a] for a in spec.aux}, "fixed": {k2: float(v) for k2, v in fix.items()}})
    return DiscreteResult(spec.rid, out_vars, pts, verts, poly, spec.stamp(_hypothesis_checked(spec, verdict)), info,
                          s.batch, len(pts), list(s.params))


_DIRECTIONS = 16


def _lifted_points(spec: RegionSpec, A: np.ndarray, rhs: np.ndarray, rels: list[str], fix) -> np.ndarray:
    """Per-distribution LP support points of the projection onto the output rates."""
    from scipy.optimize import linprog

    variables = list(spec.rates)
    out_idx = [variables.index(v) for v in spec.projected if v not in fix]
    ub_rows = [i for i, r in enumerate(rels) if r in ("<=", "<")]
    lb_rows = [i for i, r in enumerate(rels) if r in (">=", ">")]
    eq_rows = [i for i, r in enumerate(rels) if r == "="]
    A_ub = np.vstack([A[ub_rows], -A[lb_rows]])
    A_eq = A[eq_rows] if eq_rows else None
    bounds = [(float(fix[v]), float(fix[v])) if v in fix else (0, None) for v in variables]
    angles = np.linspace(0, math.pi / 2, _DIRECTIONS)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1) if len(out_idx) == 2 else np.eye(len(out_idx))

    def solve(row):
        b_ub = np.concatenate([row[ub_rows], -row[lb_rows]])
        b_eq = row[eq_rows] if eq_rows else None
        found = []
        for w in dirs:
            c = np.zeros(len(variables))
            c[out_idx] = -w
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
            if res.status == 2:
                return []
            if res.success:
                found.append(res.x[out_idx])
        pts = []
        for p in found:
            pts.append(p)
            # rates can always be lowered: add the axis projections
            for j in range(len(out_idx)):
                q = np.array(p, dtype=float)
                q[j] = 0.0
                pts.append(q)
        if pts:
            pts.append(np.zeros(len(out_idx)))
        return pts

    results = ordered_map(solve, list(rhs))
    flat = [p for r in results for p in r]
    return np.array(flat) if flat else np.zeros((0, len(out_idx)))


# ---------------------------------------------------------------------------
# sum-rate capacity


@dataclass
class SumRateResult:
    region_id: str
    value: float
    stamp: str
    budget: dict = field(default_factory=dict)
    best_distribution: dict | None = None
    ascent_gain: float = 0.0

    def to_dict(self) -> dict:
        d = {"region": self.region_id, "sum_rate": self.value, "stamp": self.stamp, "budget": self.budget,
             "ascent_gain": self.ascent_gain}
        if self.best_distribution is not None:
            d["best_distribution"] = self.best_distribution
        return d


def _require_verdict(spec: RegionSpec, verdict, params=None) -> None:
    if verdict is None:
        raise StateError(f"{spec.rid} is a capacity formula only under its regime; supply the regime verdict")
    if isinstance(verdict, Mapping) and "labels" in verdict:
        labels = verdict["labels"].values()
        match = [v for v in labels if v.regime == (spec.gaussian.regime if spec.gaussian else spec.regime)]
        verdict = match[0] if match else None
        if verdict is None:
            raise StateError(f"{spec.rid}: supplied verdict set lacks the required regime label")
    if not isinstance(verdict, RegimeVerdict):
        raise StateError(f"{spec.rid}: regime verdict has the wrong type")
    need = spec.gaussian.regime if spec.gaussian else spec.regime
    if verdict.regime != need:
        raise StateError(f"{spec.rid} needs a verdict for {need}, got {verdict.regime}")
    if not verdict.holds:
        raise StateError(f"{spec.rid}: regime {need} does not hold ({verdict.status})")
    if params is not None:
        fresh = gaussian_crc_regime(params, require_strong_test=False) if "CRC" in need else gaussian_cic_regime(params)
        if not any(v.regime == need and v.holds for v in fresh["labels"].values()):
            raise StateError(f"{spec.rid}: verdict {need} does not match the supplied parameters")


def _ascend(spec: RegionSpec, s: _Sampled, net: DmNet, start: int, steps: int) -> tuple[_Sampled, float]:
    cur = s.select([start])
    cur_val = float(_evaluate_exprs(spec, cur, net, spec.objective).min(axis=1)[0])
    delta = 0.25
    for _ in range(steps):
        cands = []
        for fi, (f, par) in enumerate(zip(cur.factors, cur.params)):
            if f.det:
                continue
            table = par[0]
            for cell in range(table.shape[0]):
                for i in range(table.shape[1]):
                    if table[cell, i] <= 0:
                        continue
                    for j in range(table.shape[1]):
                        if i != j:
                            cands.append((fi, cell, i, j))
        if not cands:
            break
        params = [np.repeat(p, len(cands), axis=0) for p in cur.params]
        for row, (fi, cell, i, j) in enumerate(cands):
            mv = min(delta, params[fi][row, cell, i])
            params[fi][row, cell, i] -= mv
            params[fi][row, cell, j] += mv
        batch = _Sampled(cur.names, cur.factors, cur.sizes, params)
        vals = _evaluate_exprs(spec, batch, net, spec.objective).min(axis=1)
        best = int(np.argmax(vals))
        if vals[best] > cur_val + 1e-13:
            cur, cur_val = batch.select([best]), float(vals[best])
        else:
            delta /= 2
            if delta < 1e-6:
                break
    return cur, cur_val


def sum_rate_capacity(rid: str, verdict, net_or_params, grid: Mapping | None = None, aux_cards=None) -> SumRateResult:
    """Maximize a sum-rate formula over its family (requires the regime verdict)."""
    spec = get_region(rid)
    if spec.bound != "sum-rate":
        raise ArgumentError(f"{rid} is not a sum-rate formula")
    if spec.gaussian is not None:
        _require_verdict(spec, verdict, net_or_params)
        if spec.gaussian.check is not None:
            msg = spec.gaussian.check(net_or_params)
            if msg:
                raise ArgumentError(f"{rid}: {msg}")
        return SumRateResult(rid, float(spec.gaussian.value(net_or_params)), EXACT, {"kind": "closed form"})
    if not isinstance(net_or_params, DmNet):
        raise ArgumentError(f"{rid} needs a discrete channel")
    _require_verdict(spec, verdict)
    net = net_or_params
    _check_requirements(spec, net)
    sizes = _sizes(spec, net, aux_cards)
    grid = dict(grid or {})
    binary = net.sizes[0] * net.sizes[1] <= 4
    k = grid.get("k", 8 if binary else 4)
    samples = int(grid.get("random_samples", DEFAULT_SAMPLES))
    seed = int(grid.get("seed", 0))
    steps = int(grid.get("ascent_steps", 100))
    s, info = _sample(spec, sizes, k, samples, seed, int(grid.get("grid_cap", GRID_CAP)))
    vals = _evaluate_exprs(spec, s, net, spec.objective)
    value, best_idx = _max_min_over_hull(vals)
    gain = 0.0
    best = s.select([best_idx])
    if steps > 0:
        refined, rv = _ascend(spec, s, net, best_idx, steps)
        gain = max(0.0, rv - float(vals[best_idx].min()))
        if rv > value:
            value, best = rv, refined
    info["ascent_steps"] = steps
    dist = {f.var: p[0].tolist() for f, p in zip(best.factors, best.params)}
    return SumRateResult(rid, float(value), spec.stamp(True), info, dist, gain)


# ---------------------------------------------------------------------------
# figure data


FIGURE_PARAMS = {
    10: GaussianBcParams(math.sqrt(5), math.sqrt(50), 15.0),
    12: GaussianIcParams(math.sqrt(2), math.sqrt(2.5), 80.0, 10.0),
    13: (math.sqrt(2.5), math.sqrt(0.25)),
    15: GaussianIcParams(math.sqrt(5), 1 / math.sqrt(5), 5.0, 7.0),
}

FIG13_POWERS = (1.0, 2.0, 5.0, 10.0, 15.0, 20.0)


def figure_data(figure: int, alpha_grid_size: int = 101, powers: Sequence[float] = FIG13_POWERS) -> tuple[list[str], list[list]]:
    """Curves behind the comparison figures as CSV-ready rows."""
    if figure == 10:
        p = FIGURE_PARAMS[10]
        rows = []
        for al in np.linspace(0, 1, alpha_grid_size):
            vals = dict()
            for c, v in _g_bc_degraded_swapped(p, float(al)):
                vals[next(iter(c))] = v
            rows.append(["gaussian-BC-swapped-III-9", float(al), vals["R1"], vals["R2"]])
        for v in gaussian_vertices("OSRSI-BC-gaussian-III-111", p):
            rows.append(["OSRSI-BC-gaussian-III-111", "", v[0], v[1]])
        return ["series", "alpha", "R1", "R2"], rows
    if figure == 12:
        p = FIGURE_PARAMS[12]
        rows = [["gaussian-strong-CIC-III-24", v[0], v[1]] for v in gaussian_vertices("gaussian-strong-CIC-III-24", p)]
        rows += [["OSRSI-gaussian-III-123", v[0], v[1]] for v in gaussian_vertices("OSRSI-gaussian-III-123", p)]
        return ["series", "R1", "R2"], rows
    if figure == 13:
        a, b = FIGURE_PARAMS[13]
        rows = []
        for pw in powers:
            p = GaussianIcParams(a, b, float(pw), float(pw))
            rows.append(["mixed-sum-gaussian-III-28", float(pw), _g_mixed_sum(p)])
            rows.append(["OSRSI-CIC-weak-sum-gaussian-III-118", float(pw), _g_osrsi_weak_sum(p)])
        return ["series", "P", "R1+R2"], rows
    if figure == 15:
        p = FIGURE_PARAMS[15]
        rows = [["gaussian-CRC-weak-III-47", v[0], v[1]] for v in gaussian_vertices("gaussian-CRC-weak-III-47", p, alpha_grid_size)]
        rows += [["gaussian-case2-III-133", v[0], v[1]] for v in gaussian_vertices("gaussian-case2-III-133", p, alpha_grid_size)]
        return ["series", "R1", "R2"], rows
    raise ArgumentError("figure must be one of 10, 12, 13, 15")


# ---------------------------------------------------------------------------
# comparisons


def merge_results(results: Sequence[DiscreteResult]) -> tuple[list[tuple[float, ...]], RatePolyhedron]:
    """Hull of the union of several evaluations of regions over the same rates."""
    if not results:
        raise ArgumentError("nothing to merge")
    names = results[0].variables
    if any(r.variables != names for r in results):
        raise ArgumentError("evaluations disagree on the rate variables")
    return hull_of_points(np.vstack([r.points for r in results]), names)


def worst_violation(points: np.ndarray, poly: RatePolyhedron) -> float:
    """Largest amount by which any point breaks a row of ``poly`` (<= 0 means inside)."""
    pts = [tuple(float(x) for x in p) for p in np.asarray(points, dtype=float)]
    return is_subset(pts, poly, 0.0)[1]


def product_input_tables(result: DiscreteResult) -> list[np.ndarray]:
    """Factor tables (P(X1), P(X2)) of the input marginals of an evaluated batch.

    Only meaningful for families where X1 and X2 are independent.
    """
    spec = get_region(result.region_id)
    sizes = dict(zip(spec.family_vars, [t.shape[2] for t in result.factor_tables]))
    s = _Sampled(spec.family_vars, spec.family, sizes, result.factor_tables)
    table = _assemble(s)
    names = list(spec.family_vars)
    if "X1" not in names or "X2" not in names:
        raise ArgumentError(f"{spec.rid} family has no separate X1, X2")
    i1, i2 = names.index("X1") + 1, names.index("X2") + 1
    p1 = table.sum(axis=tuple(a for a in range(1, table.ndim) if a != i1))
    p2 = table.sum(axis=tuple(a for a in range(1, table.ndim) if a != i2))
    return [p1[:, None, :], p2[:, None, :]]
