"""Dense two-phase simplex over Fractions with Bland's rule.

Solves max c.x subject to A x <= b, with each variable either free or
nonnegative. Sizes here are tiny (tens of rows), so clarity beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None


def _pivot(tab: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, c: int) -> None:
    row = tab[r]
    piv = row[c]
    if piv != 1:
        tab[r] = row = [v / piv for v in row]
    for i, other in enumerate(tab):
        if i != r and other[c] != 0:
            f = other[c]
            tab[i] = [a - f * b for a, b in zip(other, row)]
    if obj[c] != 0:
        f = obj[c]
        obj[:] = [a - f * b for a, b in zip(obj, row)]
    basis[r] = c


def _run(tab, obj, basis, allowed: int) -> str:
    """Maximize; ``obj`` holds reduced costs with the z-row sign convention."""
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i, row in enumerate(tab):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(tab, obj, basis, best[1], enter)


def lp_max(
    c: Sequence[Fraction],
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    nonneg: Sequence[bool] | None = None,
) -> LpResult:
    n = len(c)
    nonneg = list(nonneg) if nonneg is not None else [False] * n
    # split free variables into positive and negative parts
    cols: list[tuple[int, int]] = []
    for j in range(n):
        cols.append((j, 1))
        if not nonneg[j]:
            cols.append((j, -1))
    nv = len(cols)
    m = len(A)
    art_rows = [i for i in range(m) if b[i] < 0]
    na = len(art_rows)
    width = nv + m + na + 1
    tab: list[list[Fraction]] = []
    basis: list[int] = []
    art_col = {}
    for k, i in enumerate(art_rows):
        art_col[i] = nv + m + k
    for i in range(m):
        row = [ZERO] * width
        sgn = -1 if b[i] < 0 else 1
        for k, (j, s) in enumerate(cols):
            row[k] = Fraction(A[i][j]) * s * sgn
        row[nv + i] = Fraction(sgn)
        row[-1] = Fraction(b[i]) * sgn
        if i in art_col:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(nv + i)
        tab.append(row)

    if na:
        obj = [ZERO] * width
        for i in art_rows:
            obj[art_col[i]] = Fraction(1)
        for i in art_rows:
            obj = [a - v for a, v in zip(obj, tab[i])]
        _run(tab, obj, basis, nv + m)
        if obj[-1] != 0:
            return LpResult("infeasible")
        # drive artificials out of the basis
        for r in range(len(tab)):
            if basis[r] >= nv + m:
                c_in = next((j for j in range(nv + m) if tab[r][j] != 0), None)
                if c_in is not None:
                    _pivot(tab, obj, basis, r, c_in)
        keep = [r for r in range(len(tab)) if basis[r] < nv + m]
        tab = [tab[r][: nv + m] + [tab[r][-1]] for r in keep]
        basis = [basis[r] for r in keep]
        width = nv + m + 1

    obj = [ZERO] * width
    for k, (j, s) in enumerate(cols):
        obj[k] = -Fraction(c[j]) * s
    for r, bcol in enumerate(basis):
        if obj[bcol] != 0:
            f = obj[bcol]
            obj = [a - f * v for a, v in zip(obj, tab[r])]
    status = _run(tab, obj, basis, nv + m)
    if status == "unbounded":
        return LpResult("unbounded")
    vals = [ZERO] * nv
    for r, bcol in enumerate(basis):
        if bcol < nv:
            vals[bcol] = tab[r][-1]
    x = [ZERO] * n
    for k, (j, s) in enumerate(cols):
        x[j] += s * vals[k]
    return LpResult("optimal", obj[-1], tuple(x))
