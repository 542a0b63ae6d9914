"""Finite probability tables and the information measures built on them.

All logarithms are base 2, so every entropy and mutual information is in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, PreconditionError

SUM_TOL = 1e-12
MI_SLACK = 1e-9


def _as_names(vars_: str | Iterable[str] | None) -> tuple[str, ...]:
    if vars_ is None:
        return ()
    if isinstance(vars_, str):
        return (vars_,)
    return tuple(vars_)


@dataclass(frozen=True)
class FinitePmf:
    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise ArgumentError("empty pmf")
        if min(probs) < 0:
            raise ArgumentError("negative probability")
        if abs(sum(probs) - 1.0) > SUM_TOL:
            raise ArgumentError(f"probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    @property
    def p_min(self) -> float:
        return min(p for p in self.probs if p > 0)

    def to_joint(self, name: str = "X") -> "JointPmf":
        return JointPmf([name], np.array(self.probs))


class JointPmf:
    """Dense probability tensor over named finite random variables.

    ``values`` optionally attaches real numeric labels to the symbols of a
    variable (used by the conditional second-moment audit).
    """

    __slots__ = ("_names", "_table", "_values")

    def __init__(
        self,
        variables: Sequence[str],
        table,
        values: Mapping[str, Sequence[float]] | None = None,
        *,
        check: bool = True,
    ):
        names = tuple(variables)
        arr = np.array(table, dtype=float)
        if arr.ndim != len(names):
            raise ArgumentError(f"table has {arr.ndim} axes for {len(names)} variables")
        if len(set(names)) != len(names):
            raise ArgumentError(f"duplicate variable names in {names}")
        if check:
            if arr.size and arr.min() < 0:
                raise ArgumentError("negative probability in joint table")
            total = float(arr.sum())
            if abs(total - 1.0) > SUM_TOL:
                raise ArgumentError(f"joint table sums to {total!r}, not 1")
        arr.setflags(write=False)
        vals = {}
        for k, v in (values or {}).items():
            if k not in names:
                raise ArgumentError(f"value labels for unknown variable {k!r}")
            v = tuple(float(x) for x in v)
            if len(v) != arr.shape[names.index(k)]:
                raise ArgumentError(f"value labels for {k!r} do not match its alphabet")
            vals[k] = v
        self._names = names
        self._table = arr
        self._values = vals

    @property
    def variables(self) -> tuple[str, ...]:
        return self._names

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def sizes(self) -> dict[str, int]:
        return dict(zip(self._names, self._table.shape))

    @property
    def values(self) -> dict[str, tuple[float, ...]]:
        return dict(self._values)

    def axis(self, name: str) -> int:
        try:
            return self._names.index(name)
        except ValueError:
            raise ArgumentError(f"unknown variable {name!r}; have {self._names}") from None

    def marginal(self, vars_: str | Iterable[str]) -> "JointPmf":
        keep = _as_names(vars_)
        axes = [self.axis(v) for v in keep]
        drop = tuple(i for i in range(len(self._names)) if i not in axes)
        t = self._table.sum(axis=drop) if drop else self._table
        # reorder remaining axes to the requested order
        remaining = [i for i in range(len(self._names)) if i in axes]
        perm = [remaining.index(a) for a in axes]
        t = np.transpose(t, perm)
        vals = {k: v for k, v in self._values.items() if k in keep}
        return JointPmf(keep, t, vals, check=False)

    def p_min(self) -> float:
        pos = self._table[self._table > 0]
        return float(pos.min())

    def rename(self, mapping: Mapping[str, str]) -> "JointPmf":
        names = [mapping.get(n, n) for n in self._names]
        vals = {mapping.get(k, k): v for k, v in self._values.items()}
        return JointPmf(names, self._table, vals, check=False)

    def __repr__(self):
        return f"JointPmf({self._names}, shape={self._table.shape})"


def _h_array(t: np.ndarray) -> float:
    p = t[t > 0]
    return float(-(p * np.log2(p)).sum())


def _subset_entropy(p: JointPmf, names: tuple[str, ...]) -> float:
    if not names:
        return 0.0
    axes = {p.axis(v) for v in names}
    drop = tuple(i for i in range(len(p.variables)) if i not in axes)
    t = p.table.sum(axis=drop) if drop else p.table
    return _h_array(t)


def _check_disjoint(*groups: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for g in groups:
        s = set(g)
        if len(s) != len(g) or seen & s:
            raise ArgumentError(f"variable sets overlap: {groups}")
        seen |= s


def entropy(p: JointPmf, vars_, given=()) -> float:
    """H(vars | given) in bits."""
    a, g = _as_names(vars_), _as_names(given)
    for v in a + g:
        p.axis(v)
    _check_disjoint(a, g)
    return _subset_entropy(p, a + g) - _subset_entropy(p, g)


def mutual_information(p: JointPmf, a, b, given=()) -> float:
    """I(a; b | given) in bits, clamped at zero after a slack check."""
    a, b, g = _as_names(a), _as_names(b), _as_names(given)
    for v in a + b + g:
        p.axis(v)
    _check_disjoint(a, b, g)
    val = (
        _subset_entropy(p, a + g)
        + _subset_entropy(p, b + g)
        - _subset_entropy(p, a + b + g)
        - _subset_entropy(p, g)
    )
    if val < -MI_SLACK:
        raise AssertionError(f"mutual information {val} below numerical slack")
    return max(val, 0.0)


def psi(x: float) -> float:
    """Gaussian capacity function 0.5*log2(1+x)."""
    if x < 0 or math.isnan(x):
        raise ArgumentError(f"psi needs a nonnegative argument, got {x!r}")
    return 0.5 * math.log2(1.0 + x)


def fano_lower_bound(h_cond: float, cardinality: int) -> float:
    """Lower bound on error probability from a conditional entropy."""
    if cardinality < 2:
        raise ArgumentError("cardinality must be at least 2")
    if h_cond < 0:
        raise ArgumentError("conditional entropy must be nonnegative")
    return max(0.0, (h_cond - 1.0) / math.log2(cardinality))


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@dataclass(frozen=True)
class SecondMomentReport:
    identity_violation: float
    lhs: float
    rhs: float
    inequality_violation: float

    @property
    def max_violation(self) -> float:
        return max(self.identity_violation, self.inequality_violation)


def conditional_second_moment_audit(
    p: JointPmf, a: str = "A", b: str = "B", c: str = "C", tol: float = 1e-9
) -> SecondMomentReport:
    """Audit the conditional-variance additivity and the correlation bound
    for real-valued A, C that are conditionally independent given B."""
    for v in (a, c):
        if v not in p.values:
            raise ArgumentError(f"variable {v!r} needs numeric value labels")
    t = p.marginal([a, b, c]).table
    pab = t.sum(axis=2)
    pbc = t.sum(axis=0)
    pb = t.sum(axis=(0, 2))
    markov_gap = np.abs(t * pb[None, :, None] - pab[:, :, None] * pbc[None, :, :]).max()
    if markov_gap > tol:
        raise PreconditionError(f"A -> B -> C does not hold (factorization gap {markov_gap:.3g})")
    av = np.array(p.values[a])
    cv = np.array(p.values[c])
    worst = 0.0
    cond_mean_a = np.zeros(len(pb))
    cond_mean_c = np.zeros(len(pb))
    for j, w in enumerate(pb):
        if w <= 0:
            continue
        cond = t[:, j, :] / w
        # distribution of the sum computed directly from the conditional joint
        s = av[:, None] + cv[None, :]
        var_sum = float((cond * s**2).sum() - (cond * s).sum() ** 2)
        pa = cond.sum(axis=1)
        pc = cond.sum(axis=0)
        ma, mc = float(pa @ av), float(pc @ cv)
        var_a = float(pa @ av**2) - ma**2
        var_c = float(pc @ cv**2) - mc**2
        worst = max(worst, abs(var_sum - (var_a + var_c)))
        cond_mean_a[j], cond_mean_c[j] = ma, mc
    e_ac = float((t * av[:, None, None] * cv[None, None, :]).sum())
    lhs = abs(e_ac)
    rhs = math.sqrt(float(pb @ cond_mean_a**2)) * math.sqrt(float(pb @ cond_mean_c**2))
    return SecondMomentReport(worst, lhs, rhs, max(0.0, lhs - rhs))


def _gauss_h(var: float) -> float:
    return 0.5 * math.log2(2 * math.pi * math.e * var)


def _uniform_sum_h(w1: float, w2: float) -> float:
    # density of U(0,w1)+U(0,w2) is a trapezoid; integrate -f log2 f piecewise
    from scipy.integrate import quad

    lo, hi = min(w1, w2), max(w1, w2)
    peak = 1.0 / hi

    def f(z):
        if z < lo:
            return z / (w1 * w2)
        if z <= hi:
            return peak
        return (w1 + w2 - z) / (w1 * w2)

    def g(z):
        v = f(z)
        return -v * math.log2(v) if v > 0 else 0.0

    total = 0.0
    for x0, x1 in ((0.0, lo), (lo, hi), (hi, w1 + w2)):
        if x1 > x0:
            total += quad(g, x0, x1, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return total


def epi_gap(sigma_sq_x: float, sigma_sq_y: float, mode: str = "gaussian") -> float:
    """2^{2h(X+Y)} - 2^{2h(X)} - 2^{2h(Y)} for independent X, Y.

    ``mode='gaussian'`` uses the closed-form Gaussian entropy (gap is 0);
    ``mode='uniform'`` uses uniform densities of the given variances and a
    quadrature for the entropy of their sum.
    """
    if sigma_sq_x <= 0 or sigma_sq_y <= 0:
        raise ArgumentError("variances must be positive")
    if mode == "gaussian":
        hx, hy = _gauss_h(sigma_sq_x), _gauss_h(sigma_sq_y)
        hs = _gauss_h(sigma_sq_x + sigma_sq_y)
    elif mode == "uniform":
        w1, w2 = math.sqrt(12 * sigma_sq_x), math.sqrt(12 * sigma_sq_y)
        hx, hy = math.log2(w1), math.log2(w2)
        hs = _uniform_sum_h(w1, w2)
    else:
        raise ArgumentError(f"unknown epi mode {mode!r}")
    return 2 ** (2 * hs) - 2 ** (2 * hx) - 2 ** (2 * hy)
