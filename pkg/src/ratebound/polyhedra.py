"""Exact-rational inequality systems over named rate variables.

Rows are ``coeffs . x  (<= | <)  rhs``. Variables may carry an implicit
nonnegativity flag. Fourier-Motzkin projection, redundancy removal and
low-dimensional vertex/hull computations all run in Fraction arithmetic;
floats only appear when points are exported.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ._lp import lp_max
from .errors import ArgumentError, ResourceError

Q = Fraction


def _q(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


@dataclass(frozen=True)
class Inequality:
    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    strict: bool = False

    def scaled(self) -> "Inequality":
        """Positive rescaling to coprime integer coefficients."""
        nz = [c for c in self.coeffs if c != 0]
        if not nz:
            return self
        den = math.lcm(*(c.denominator for c in nz))
        ints = [int(c * den) for c in nz]
        g = math.gcd(*ints)
        k = Fraction(den, g)
        return Inequality(tuple(c * k for c in self.coeffs), self.rhs * k, self.strict)


class RatePolyhedron:
    """Immutable inequality system; ``infeasible`` marks a known-empty set."""

    __slots__ = ("variables", "rows", "nonneg", "infeasible")

    def __init__(
        self,
        variables: Sequence[str],
        rows: Iterable[Inequality] = (),
        nonneg: Iterable[str] = (),
        infeasible: bool = False,
    ):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ArgumentError("duplicate variable names")
        self.rows = tuple(rows)
        for r in self.rows:
            if len(r.coeffs) != len(self.variables):
                raise ArgumentError("row width does not match variables")
        nn = frozenset(nonneg)
        if not nn <= set(self.variables):
            raise ArgumentError(f"nonnegativity flags on unknown variables {sorted(nn - set(self.variables))}")
        self.nonneg = nn
        self.infeasible = infeasible

    # construction --------------------------------------------------------
    @staticmethod
    def from_constraints(
        variables: Sequence[str],
        constraints: Iterable[tuple[Mapping[str, object], str, object]],
        nonneg: Iterable[str] | bool = True,
    ) -> "RatePolyhedron":
        """Build from ``(coeff map, relation, rhs)``; '=' becomes two rows."""
        variables = tuple(variables)
        idx = {v: i for i, v in enumerate(variables)}
        rows = []
        for coeffs, rel, rhs in constraints:
            vec = [Q(0)] * len(variables)
            for k, c in coeffs.items():
                if k not in idx:
                    raise ArgumentError(f"unknown variable {k!r}")
                vec[idx[k]] += _q(c)
            rhs = _q(rhs)
            if rel in ("<=", "<"):
                rows.append(Inequality(tuple(vec), rhs, rel == "<"))
            elif rel in (">=", ">"):
                rows.append(Inequality(tuple(-c for c in vec), -rhs, rel == ">"))
            elif rel == "=":
                rows.append(Inequality(tuple(vec), rhs))
                rows.append(Inequality(tuple(-c for c in vec), -rhs))
            else:
                raise ArgumentError(f"unknown relation {rel!r}")
        nn = variables if nonneg is True else (() if nonneg is False else tuple(nonneg))
        return RatePolyhedron(variables, rows, nn)

    def with_rows(self, rows, infeasible: bool = False) -> "RatePolyhedron":
        return RatePolyhedron(self.variables, rows, self.nonneg, infeasible)

    def closure(self) -> "RatePolyhedron":
        return self.with_rows([Inequality(r.coeffs, r.rhs, False) for r in self.rows], self.infeasible)

    def all_rows(self) -> list[Inequality]:
        """Explicit rows plus the implicit nonnegativity rows."""
        out = list(self.rows)
        for i, v in enumerate(self.variables):
            if v in self.nonneg:
                vec = [Q(0)] * len(self.variables)
                vec[i] = Q(-1)
                out.append(Inequality(tuple(vec), Q(0)))
        return out

    def contains(self, point: Sequence, closure: bool = True) -> bool:
        pt = [_q(x) for x in point]
        if self.infeasible:
            return False
        for r in self.all_rows():
            lhs = sum((c * x for c, x in zip(r.coeffs, pt)), Q(0))
            if lhs > r.rhs or (r.strict and not closure and lhs == r.rhs):
                return False
        return True

    def key(self):
        return (self.variables, self.infeasible, self.nonneg, self.rows)

    def __eq__(self, other):
        if not isinstance(other, RatePolyhedron):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.infeasible:
            return f"RatePolyhedron({self.variables}, INFEASIBLE)"
        return f"RatePolyhedron({self.variables}, {len(self.rows)} rows)"

    def to_text(self) -> str:
        if self.infeasible:
            return "infeasible\n"
        lines = []
        if self.nonneg:
            lines.append("nonneg " + ", ".join(v for v in self.variables if v in self.nonneg))
        for r in self.rows:
            lhs = _fmt_row(r.coeffs, self.variables)
            lines.append(f"{lhs} {'<' if r.strict else '<='} {_fmt(r.rhs)}")
        return "\n".join(lines) + "\n"

    def describe(self) -> list[str]:
        return [ln for ln in self.to_text().splitlines() if not ln.startswith("nonneg")]


def _fmt_row(coeffs, variables) -> str:
    out = ""
    for c, v in zip(coeffs, variables):
        if c == 0:
            continue
        mag = abs(c)
        body = v if mag == 1 else f"{_fmt(mag)}*{v}"
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


_TERM = re.compile(r"([+-]?)\s*(?:(\d+(?:/\d+)?(?:\.\d+)?)\s*\*?\s*)?([A-Za-z][A-Za-z0-9_]*)")


def parse_system(text: str) -> RatePolyhedron:
    """Parse one inequality per line: ``<coeff>*<var> [+ ...] <= <rational>``.

    Also accepted: '<', '>=', '>', '=', comment lines starting with '#', and a
    ``nonneg R10, R11`` line declaring implicitly nonnegative variables.
    """
    rows: list[tuple[dict, str, Fraction]] = []
    order: list[str] = []
    nonneg: list[str] = []

    def note(v):
        if v not in order:
            order.append(v)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("nonneg"):
            for v in re.split(r"[,\s]+", line[6:].strip()):
                if v:
                    note(v)
                    nonneg.append(v)
            continue
        m = re.fullmatch(r"(.*?)(<=|>=|<|>|=)(.*)", line)
        if not m:
            raise ArgumentError(f"line {lineno}: no relation in {raw!r}")
        lhs_s, rel, rhs_s = m.group(1).strip(), m.group(2), m.group(3).strip()
        try:
            rhs = Fraction(rhs_s)
        except (ValueError, ZeroDivisionError):
            raise ArgumentError(f"line {lineno}: right side {rhs_s!r} is not a rational") from None
        coeffs: dict[str, Fraction] = {}
        pos = 0
        s = lhs_s.replace(" ", "")
        while pos < len(s):
            t = _TERM.match(s, pos)
            if not t or t.end() == pos:
                raise ArgumentError(f"line {lineno}: cannot parse {lhs_s!r}")
            sign, num, var = t.groups()
            k = Fraction(num) if num else Fraction(1)
            if sign == "-":
                k = -k
            coeffs[var] = coeffs.get(var, Fraction(0)) + k
            note(var)
            pos = t.end()
        rows.append((coeffs, rel, rhs))
    return RatePolyhedron.from_constraints(order, rows, nonneg)


# ---------------------------------------------------------------------------
# LP helpers


def _lp(sys_rows: Sequence[Inequality], nvars: int, nonneg_mask, objective) -> object:
    A = [r.coeffs for r in sys_rows]
    b = [r.rhs for r in sys_rows]
    return lp_max(objective, A, b, nonneg_mask)


def _mask(p: RatePolyhedron) -> list[bool]:
    return [v in p.nonneg for v in p.variables]


def _closure_feasible(p: RatePolyhedron, rows) -> bool:
    res = _lp(rows, len(p.variables), _mask(p), [Q(0)] * len(p.variables))
    return res.status != "infeasible"


def _strict_feasible(p: RatePolyhedron, rows) -> bool:
    """Feasibility honoring strict rows: maximize a common slack t."""
    strict = [r for r in rows if r.strict]
    if not strict:
        return _closure_feasible(p, rows)
    n = len(p.variables)
    ext = []
    for r in rows:
        ext.append(Inequality(r.coeffs + ((Q(1),) if r.strict else (Q(0),)), r.rhs))
    ext.append(Inequality((Q(0),) * n + (Q(1),), Q(1)))  # cap t <= 1
    res = lp_max([Q(0)] * n + [Q(1)], [r.coeffs for r in ext], [r.rhs for r in ext], _mask(p) + [False])
    return res.status == "optimal" and res.value > 0


# ---------------------------------------------------------------------------
# normalize


def _trivial(r: Inequality) -> bool:
    return all(c == 0 for c in r.coeffs)


def normalize(p: RatePolyhedron, closure: bool = False) -> RatePolyhedron:
    """Remove duplicate and implied rows; canonical order; flag infeasibility."""
    if p.infeasible:
        return p.with_rows((), True)
    rows = p.rows if not closure else tuple(Inequality(r.coeffs, r.rhs, False) for r in p.rows)
    best: dict[tuple, Inequality] = {}
    for r in rows:
        if _trivial(r):
            if r.rhs < 0 or (r.strict and r.rhs == 0):
                return p.with_rows((), True)
            continue
        s = r.scaled()
        cur = best.get(s.coeffs)
        if cur is None or s.rhs < cur.rhs or (s.rhs == cur.rhs and s.strict and not cur.strict):
            best[s.coeffs] = s
    cand = sorted(best.values(), key=lambda r: (r.coeffs, r.rhs, r.strict))
    tmp = p.with_rows(cand)
    feasible = _closure_feasible(tmp, tmp.all_rows()) if closure else _strict_feasible(tmp, tmp.all_rows())
    if not feasible:
        return p.with_rows((), True)
    nn_rows = tmp.all_rows()[len(cand):]
    kept = list(cand)
    i = 0
    while i < len(kept):
        r = kept[i]
        others = kept[:i] + kept[i + 1:] + nn_rows
        res = _lp(others, len(p.variables), _mask(p), r.coeffs)
        redundant = False
        if res.status == "optimal":
            if res.value < r.rhs:
                redundant = True
            elif res.value == r.rhs and not r.strict:
                redundant = True
        if redundant:
            kept.pop(i)
        else:
            i += 1
    return p.with_rows(kept)


def same_set(a: RatePolyhedron, b: RatePolyhedron) -> bool:
    """Set equality of closures by mutual implication of rows."""
    if a.variables != b.variables:
        raise ArgumentError("systems have different variables")
    a_empty = not _closure_feasible(a, a.all_rows()) if not a.infeasible else True
    b_empty = not _closure_feasible(b, b.all_rows()) if not b.infeasible else True
    if a_empty or b_empty:
        return a_empty == b_empty

    def implied(src: RatePolyhedron, dst: RatePolyhedron) -> bool:
        for r in dst.all_rows():
            res = _lp(src.all_rows(), len(src.variables), _mask(src), r.coeffs)
            if res.status != "optimal" or res.value > r.rhs:
                return False
        return True

    return implied(a, b) and implied(b, a)


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def fm_eliminate(p: RatePolyhedron, vars_: Sequence[str], reduce: bool = True) -> RatePolyhedron:
    """Exact projection eliminating ``vars_`` one at a time."""
    for v in vars_:
        if v not in p.variables:
            raise ArgumentError(f"cannot eliminate unknown variable {v!r}")
    cur = p
    for v in vars_:
        cur = _fm_step(cur, v)
        if reduce and not cur.infeasible:
            cur = normalize(cur)
    return cur


def _fm_step(p: RatePolyhedron, v: str) -> RatePolyhedron:
    if p.infeasible:
        return RatePolyhedron([x for x in p.variables if x != v], (), p.nonneg - {v}, True)
    j = p.variables.index(v)
    rows = list(p.rows)
    if v in p.nonneg:
        vec = [Q(0)] * len(p.variables)
        vec[j] = Q(-1)
        rows.append(Inequality(tuple(vec), Q(0)))
    pos = [r for r in rows if r.coeffs[j] > 0]
    neg = [r for r in rows if r.coeffs[j] < 0]
    zero = [r for r in rows if r.coeffs[j] == 0]
    new = list(zero)
    for rp in pos:
        for rn in neg:
            a, b = rp.coeffs[j], -rn.coeffs[j]
            coeffs = tuple(b * x + a * y for x, y in zip(rp.coeffs, rn.coeffs))
            new.append(Inequality(coeffs, b * rp.rhs + a * rn.rhs, rp.strict or rn.strict))
    keep = [i for i in range(len(p.variables)) if i != j]
    out = []
    for r in new:
        coeffs = tuple(r.coeffs[i] for i in keep)
        if all(c == 0 for c in coeffs):
            if r.rhs < 0 or (r.strict and r.rhs == 0):
                return RatePolyhedron([p.variables[i] for i in keep], (), p.nonneg - {v}, True)
            continue
        out.append(Inequality(coeffs, r.rhs, r.strict))
    return RatePolyhedron([p.variables[i] for i in keep], out, p.nonneg - {v})


# ---------------------------------------------------------------------------
# vertices and hulls


def _solve(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(mat)
    m = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def recession_ray(p: RatePolyhedron) -> tuple[Fraction, ...] | None:
    """A nonzero direction along which the closure is unbounded, if any."""
    n = len(p.variables)
    base = [Inequality(r.coeffs, Q(0)) for r in p.all_rows()]
    for i in range(n):
        for s in (1, -1):
            box = []
            for k in range(n):
                e = [Q(0)] * n
                e[k] = Q(1)
                box.append(Inequality(tuple(e), Q(1)))
                box.append(Inequality(tuple(-x for x in e), Q(1)))
            obj = [Q(0)] * n
            obj[i] = Q(s)
            res = _lp(base + box, n, _mask(p), obj)
            if res.status == "optimal" and res.value > 0:
                return res.x
    return None


def vertices(p: RatePolyhedron) -> list[tuple[Fraction, ...]]:
    """Exact vertices of the closure (dimension <= 3).

    Two-dimensional results run counter-clockwise from the lexicographically
    smallest vertex; other dimensions are sorted lexicographically.
    """
    n = len(p.variables)
    if n > 3:
        raise ArgumentError("vertex enumeration supports at most three variables")
    if p.infeasible:
        return []
    rows = p.closure().all_rows()
    if not _closure_feasible(p, rows):
        return []
    ray = recession_ray(p)
    if ray is not None:
        named = ", ".join(f"{v}={_fmt(x)}" for v, x in zip(p.variables, ray))
        raise ArgumentError(f"region is unbounded along recession ray ({named})")
    found = set()
    for combo in itertools.combinations(rows, n):
        sol = _solve([list(r.coeffs) for r in combo], [r.rhs for r in combo])
        if sol is None:
            continue
        if all(sum((c * x for c, x in zip(r.coeffs, sol)), Q(0)) <= r.rhs for r in rows):
            found.add(tuple(sol))
    if n == 2 and len(found) > 2:
        ring = hull_2d(found)
        start = ring.index(min(ring))
        return ring[start:] + ring[:start]
    return sorted(found)


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_2d(points: Iterable[Sequence]) -> list[tuple]:
    """Monotone-chain convex hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple] = []
    for pt in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: list[tuple] = []
    for pt in reversed(pts):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


def _affine_rows(pts: list[tuple[Fraction, ...]], n: int) -> list[Inequality]:
    """Rows describing the hull of points spanning a lower-dimensional flat."""
    rows: list[Inequality] = []
    base = pts[0]
    dirs = [tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]
    # orthogonal complement via exact elimination
    basis: list[list[Fraction]] = []
    for d in dirs:
        v = list(d)
        for bvec in basis:
            piv = next(i for i, x in enumerate(bvec) if x != 0)
            if v[piv] != 0:
                f = v[piv] / bvec[piv]
                v = [x - f * y for x, y in zip(v, bvec)]
        if any(x != 0 for x in v):
            basis.append(v)
    normals = []
    for e in range(n):
        cand = [Q(1) if i == e else Q(0) for i in range(n)]
        for bvec in basis:
            dot = sum((x * y for x, y in zip(cand, bvec)), Q(0))
            nrm = sum((y * y for y in bvec), Q(0))
            cand = [x - dot / nrm * y for x, y in zip(cand, bvec)]
        for nv in normals:
            dot = sum((x * y for x, y in zip(cand, nv)), Q(0))
            nrm = sum((y * y for y in nv), Q(0))
            cand = [x - dot / nrm * y for x, y in zip(cand, nv)]
        if any(x != 0 for x in cand):
            normals.append(cand)
    for nv in normals:
        val = sum((x * y for x, y in zip(nv, base)), Q(0))
        rows.append(Inequality(tuple(nv), val))
        rows.append(Inequality(tuple(-x for x in nv), -val))
    # within the flat, bound the extent along each spanning direction
    if len(basis) == 1:
        d = basis[0]
        proj = [sum((x * y for x, y in zip(d, p)), Q(0)) for p in pts]
        rows.append(Inequality(tuple(d), max(proj)))
        rows.append(Inequality(tuple(-x for x in d), -min(proj)))
    elif len(basis) == 2 and n == 3:
        # planar hull inside 3-space: reuse the 2-D chain in flat coordinates
        u, w = basis
        coords = {}
        for p in pts:
            c2 = (sum((x * y for x, y in zip(u, p)), Q(0)), sum((x * y for x, y in zip(w, p)), Q(0)))
            coords[c2] = p
        ring = hull_2d(coords)
        nrm = normals[0]
        for k in range(len(ring)):
            a3, b3 = coords[ring[k]], coords[ring[(k + 1) % len(ring)]]
            edge = [y - x for x, y in zip(a3, b3)]
            out = [edge[1] * nrm[2] - edge[2] * nrm[1], edge[2] * nrm[0] - edge[0] * nrm[2], edge[0] * nrm[1] - edge[1] * nrm[0]]
            val = sum((x * y for x, y in zip(out, a3)), Q(0))
            if any(sum((x * y for x, y in zip(out, p)), Q(0)) > val for p in pts):
                out = [-x for x in out]
                val = -val
            rows.append(Inequality(tuple(out), val))
    return rows


def hull(points: Iterable[Sequence], variables: Sequence[str], nonneg: Iterable[str] | bool = True) -> RatePolyhedron:
    """Convex hull of rational points as an inequality system (dimension <= 3)."""
    variables = tuple(variables)
    n = len(variables)
    pts = sorted({tuple(_q(x) for x in p) for p in points})
    nn = variables if nonneg is True else (() if nonneg is False else tuple(nonneg))
    if not pts:
        return RatePolyhedron(variables, (), nn, True)
    if any(len(p) != n for p in pts):
        raise ArgumentError("point dimension does not match variables")
    if n > 3:
        raise ArgumentError("hulls are supported up to three dimensions")
    rank = _rank([tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]])
    if rank < n:
        rows = _affine_rows(pts, n)
    elif n == 1:
        rows = [Inequality((Q(1),), pts[-1][0]), Inequality((Q(-1),), -pts[0][0])]
    elif n == 2:
        ring = hull_2d(pts)
        rows = []
        for k in range(len(ring)):
            a, b = ring[k], ring[(k + 1) % len(ring)]
            nv = (b[1] - a[1], a[0] - b[0])  # outward for a ccw ring
            rows.append(Inequality(nv, nv[0] * a[0] + nv[1] * a[1]))
    else:
        rows = _hull_3d(pts)
    return normalize(RatePolyhedron(variables, rows, nn))


def _rank(vecs: list[tuple[Fraction, ...]]) -> int:
    basis: list[list[Fraction]] = []
    for d in vecs:
        v = list(d)
        for bvec in basis:
            piv = next(i for i, x in enumerate(bvec) if x != 0)
            if v[piv] != 0:
                f = v[piv] / bvec[piv]
                v = [x - f * y for x, y in zip(v, bvec)]
        if any(x != 0 for x in v):
            basis.append(v)
    return len(basis)


_HULL3_EXACT_MAX = 60


def _hull_3d(pts: list[tuple[Fraction, ...]]) -> list[Inequality]:
    if len(pts) > _HULL3_EXACT_MAX:
        return _hull_3d_float(pts)
    rows = {}
    for a, b, c in itertools.combinations(pts, 3):
        u = [y - x for x, y in zip(a, b)]
        w = [y - x for x, y in zip(a, c)]
        nv = (u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0])
        if all(x == 0 for x in nv):
            continue
        val = sum((x * y for x, y in zip(nv, a)), Q(0))
        side = [sum((x * y for x, y in zip(nv, p)), Q(0)) - val for p in pts]
        if all(s <= 0 for s in side):
            r = Inequality(nv, val).scaled()
            rows[r.coeffs] = r
        elif all(s >= 0 for s in side):
            r = Inequality(tuple(-x for x in nv), -val).scaled()
            rows[r.coeffs] = r
    return list(rows.values())


def _hull_3d_float(pts: list[tuple[Fraction, ...]]) -> list[Inequality]:
    import numpy as np
    from scipy.spatial import ConvexHull

    arr = np.array([[float(x) for x in p] for p in pts])
    h = ConvexHull(arr)
    rows = []
    for eq in h.equations:
        nv = tuple(Fraction(float(x)) for x in eq[:3])
        rows.append(Inequality(nv, Fraction(float(-eq[3]))))
    return rows


def is_subset(a, b: RatePolyhedron, tol: float = 1e-9) -> tuple[bool, float]:
    """Every vertex/point of ``a`` satisfies every row of ``b`` within ``tol``.

    Returns the verdict and the worst violation (negative means strict slack).
    """
    if isinstance(a, RatePolyhedron):
        if a.variables != b.variables:
            raise ArgumentError("systems have different variables")
        pts = vertices(a)
    else:
        pts = [tuple(p) for p in a]
    if b.infeasible:
        return (not pts), (math.inf if pts else -math.inf)
    worst = -math.inf
    rows = b.closure().all_rows()
    for p in pts:
        fp = [float(x) for x in p]
        for r in rows:
            val = sum(float(c) * x for c, x in zip(r.coeffs, fp)) - float(r.rhs)
            worst = max(worst, val)
    if not pts:
        return True, -math.inf
    return worst <= tol, worst
