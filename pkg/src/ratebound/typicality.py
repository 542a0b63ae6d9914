"""Letter-typical sets: membership, exhaustive enumeration and bound audits.

A tuple of n-sequences is typical for a pmf when every joint symbol's
empirical frequency is within a relative window ``eps * P(symbol)`` of its
probability. Enumeration walks all sequences in lexicographic chunks and is
capped at 2**26 candidates; larger configurations must use sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import ArgumentError, ResourceError
from .prob_core import JointPmf, entropy, mutual_information

ENUM_BUDGET_BITS = 26
_CHUNK = 1 << 16
_LOG_TOL = 1e-9
_COUNT_TOL = 1e-9


def _normalize_seqs(seq_tuple, p: JointPmf) -> list[tuple[int, ...]]:
    if isinstance(seq_tuple, str):
        seq_tuple = [seq_tuple]
    seqs = list(seq_tuple)
    if len(p.variables) == 1 and seqs and not isinstance(seqs[0], (str, Sequence, np.ndarray)):
        seqs = [seqs]
    out = []
    for s in seqs:
        if isinstance(s, str):
            s = [int(ch) for ch in s]
        out.append(tuple(int(v) for v in s))
    return out


def _typical_mask(counts: np.ndarray, probs: np.ndarray, n: int, eps: float) -> np.ndarray:
    dev = np.abs(counts - n * probs[None, :])
    return np.all(dev <= eps * n * probs[None, :] + _COUNT_TOL, axis=1)


def _symbol_counts(digits: np.ndarray, k: int) -> np.ndarray:
    counts = np.zeros((digits.shape[0], k), dtype=np.int64)
    for a in range(k):
        counts[:, a] = (digits == a).sum(axis=1)
    return counts


def is_typical(seq_tuple, p: JointPmf, eps: float) -> bool:
    """True iff the sequences (one per variable of ``p``) are eps-letter typical."""
    if eps < 0:
        raise ArgumentError("eps must be nonnegative")
    seqs = _normalize_seqs(seq_tuple, p)
    if len(seqs) != len(p.variables):
        raise ArgumentError(f"expected {len(p.variables)} sequences, got {len(seqs)}")
    n = len(seqs[0])
    if n == 0 or any(len(s) != n for s in seqs):
        raise ArgumentError("sequences must share a positive length")
    shape = p.table.shape
    for s, size in zip(seqs, shape):
        if min(s) < 0 or max(s) >= size:
            raise ArgumentError("symbol outside its alphabet")
    flat = np.ravel_multi_index(tuple(np.array(s) for s in seqs), shape)
    counts = np.bincount(flat, minlength=p.table.size)[None, :]
    return bool(_typical_mask(counts, p.table.ravel(), n, eps)[0])


def _check_budget(n: int, alphabet: int) -> None:
    bits = n * math.log2(alphabet) if alphabet > 1 else 0.0
    if bits > ENUM_BUDGET_BITS + 1e-12:
        raise ResourceError(
            f"enumeration needs {bits:.1f} bits > {ENUM_BUDGET_BITS}; use the Monte Carlo audit instead"
        )


def _chunks(k: int, n: int):
    total = k**n
    return [(s, min(total, s + _CHUNK)) for s in range(0, total, _CHUNK)]


def _digits(start: int, stop: int, k: int, n: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    d = np.empty((len(idx), n), dtype=np.int64)
    for t in range(n - 1, -1, -1):
        d[:, t] = idx % k
        idx //= k
    return d


def _enumerate_typical(probs: np.ndarray, n: int, eps: float) -> np.ndarray:
    """All typical sequences over a flat alphabet, lexicographic, as digit rows."""
    k = len(probs)
    _check_budget(n, k)

    def work(rng):
        d = _digits(rng[0], rng[1], k, n)
        return d[_typical_mask(_symbol_counts(d, k), probs, n, eps)]

    parts = ordered_map(work, _chunks(k, n))
    return np.concatenate(parts) if parts else np.empty((0, n), dtype=np.int64)


def typical_set_enumerate(p: JointPmf, n: int, eps: float, members: bool = False):
    """Exact cardinality of the typical set, optionally with its members."""
    if n <= 0:
        raise ArgumentError("n must be positive")
    rows = _enumerate_typical(p.table.ravel(), n, eps)
    if not members:
        return len(rows), None
    shape = p.table.shape
    out = []
    for r in rows:
        parts = np.unravel_index(r, shape)
        out.append(tuple(tuple(int(v) for v in part) for part in parts))
    return len(rows), out


@dataclass(frozen=True)
class _Split:
    """Joint pmf reshaped to a (x-flat, cond-flat) matrix."""

    matrix: np.ndarray
    x_vars: tuple[str, ...]
    c_vars: tuple[str, ...]


def _split(p: JointPmf, x_vars, c_vars) -> _Split:
    x_vars, c_vars = tuple(x_vars), tuple(c_vars)
    m = p.marginal(x_vars + c_vars).table
    kx = int(np.prod([p.sizes[v] for v in x_vars])) if x_vars else 1
    return _Split(m.reshape(kx, -1), x_vars, c_vars)


def _cond_flat(p: JointPmf, c_vars, c_seq) -> np.ndarray:
    if not c_vars:
        return None
    seqs = [np.asarray(s, dtype=np.int64) for s in c_seq]
    return np.ravel_multi_index(tuple(seqs), tuple(p.sizes[v] for v in c_vars))


def _conditional_members(sp: _Split, c_flat: np.ndarray | None, n: int, eps: float) -> np.ndarray:
    """Digit rows of x^n with (x^n, c^n) jointly typical."""
    kx, kc = sp.matrix.shape
    probs = sp.matrix.ravel()
    _check_budget(n, kx)
    cf = np.zeros(n, dtype=np.int64) if c_flat is None else c_flat
    # the fixed sequence must itself be typical, else the set is empty
    c_counts = np.bincount(cf, minlength=kc)[None, :]
    if not _typical_mask(c_counts, sp.matrix.sum(axis=0), n, eps)[0]:
        return np.empty((0, n), dtype=np.int64)

    def work(rng):
        d = _digits(rng[0], rng[1], kx, n)
        joint = d * kc + cf[None, :]
        return d[_typical_mask(_symbol_counts(joint, kx * kc), probs, n, eps)]

    parts = ordered_map(work, _chunks(kx, n))
    return np.concatenate(parts)


def conditional_typical_enumerate(p: JointPmf, y_seq, n: int, eps: float, x_vars=None, y_vars=None) -> int:
    """|T(P_XY | y^n)|; the last variable plays Y unless roles are given."""
    if y_vars is None:
        y_vars = p.variables[-1:]
    if x_vars is None:
        x_vars = tuple(v for v in p.variables if v not in y_vars)
    y_vars = tuple(y_vars)
    if len(y_vars) == 1 and len(y_seq) == n and not isinstance(y_seq[0], (Sequence, np.ndarray)):
        y_seq = [y_seq]
    if any(len(s) != n for s in y_seq):
        raise ArgumentError("conditioning sequence length differs from n")
    sp = _split(p, x_vars, y_vars)
    return len(_conditional_members(sp, _cond_flat(p, y_vars, y_seq), n, eps))


# ---------------------------------------------------------------------------
# bound audit


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    measured: tuple[float, ...]
    lower: float
    upper: float
    bracket: tuple[float, float]
    note: str = ""


@dataclass(frozen=True)
class BoundAuditReport:
    n: int
    eps1: float
    eps2: float
    trials: int
    seed: int
    checks: tuple[BoundCheck, ...]
    delta1: float
    delta12: float
    delta_cond: float
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "trials": self.trials,
            "seed": self.seed,
            "delta1": self.delta1,
            "delta12": self.delta12,
            "delta_cond": self.delta_cond,
            "passed": self.passed,
            "checks": [
                {
                    "bound": c.name,
                    "pass": c.passed,
                    "measured": list(c.measured),
                    "lower": c.lower,
                    "upper": c.upper,
                    "bracket": list(c.bracket),
                    "note": c.note,
                }
                for c in self.checks
            ],
        }


def _default_roles(p: JointPmf):
    v = p.variables
    if len(v) == 1:
        return (v[0],), (), ()
    if len(v) == 2:
        return (v[0],), (), (v[1],)
    return (v[0],), tuple(v[1:-1]), (v[-1],)


def _in_log_bracket(vals: np.ndarray, lo: float, hi: float) -> bool:
    if vals.size == 0:
        return True
    return bool(vals.min() >= lo - _LOG_TOL and vals.max() <= hi + _LOG_TOL)


def _mc_check(name: str, hits: int, trials: int, lo: float, hi: float, note: str = "") -> BoundCheck:
    est = hits / trials

    def margin(q):
        q = min(max(q, 0.0), 1.0)
        return 3.0 * math.sqrt(q * (1.0 - q) / trials)

    wl, wh = lo - margin(lo), hi + margin(hi)
    return BoundCheck(name, wl <= est <= wh, (est,), wl, wh, (lo, hi), note)


def bound_audit(
    p: JointPmf,
    n: int,
    eps1: float,
    eps2: float,
    trials: int = 100_000,
    seed: int = 0,
    roles: tuple[Sequence[str], Sequence[str], Sequence[str]] | None = None,
) -> BoundAuditReport:
    """Check the typical-sequence brackets by enumeration and sampling.

    Roles name the (X, U, Y) variable groups; U and Y may be empty. The
    pair lemmas use A = X+U against Y. Slack terms are taken as the exact
    probability deficits measured by enumeration, which makes the lower
    cardinality brackets deterministic.
    """
    pm = p.p_min()
    if not (0 < eps1 < eps2 <= pm + 1e-15):
        raise ArgumentError(f"need 0 < eps1 < eps2 <= p_min = {pm}; got {eps1}, {eps2}")
    if trials < 10_000:
        raise ArgumentError("Monte Carlo audits need at least 1e4 trials")
    xs, us, ys = (tuple(r) for r in (roles or _default_roles(p)))
    if set(xs + us + ys) != set(p.variables) or len(xs + us + ys) != len(p.variables):
        raise ArgumentError("roles must partition the pmf variables")
    if not xs:
        raise ArgumentError("the X role may not be empty")
    a_vars = xs + us
    rng = np.random.default_rng(seed)
    checks: list[BoundCheck] = []

    pay = _split(p, a_vars, ys)
    joint_probs = pay.matrix.ravel()
    ka, ky = pay.matrix.shape
    logp = np.where(joint_probs > 0, np.log2(np.where(joint_probs > 0, joint_probs, 1)), -np.inf)
    h_ay = entropy(p, a_vars + ys)
    py = pay.matrix.sum(axis=0)
    cond_a_y = np.divide(pay.matrix, py[None, :], out=np.zeros_like(pay.matrix), where=py[None, :] > 0)
    log_cond = np.log2(np.where(cond_a_y > 0, cond_a_y, 1)).ravel()
    h_a_given_y = entropy(p, a_vars, ys)

    # sequence probabilities and set size: enumerate the jointly typical set
    members = _enumerate_typical(joint_probs, n, eps1)
    counts = _symbol_counts(members, ka * ky) if len(members) else np.zeros((0, ka * ky))
    safe_logp = np.where(np.isfinite(logp), logp, 0.0)
    log_seq = counts @ safe_logp
    lo7, hi7 = -n * (1 + eps1) * h_ay, -n * (1 - eps1) * h_ay
    meas7 = (float(log_seq.min()), float(log_seq.max())) if len(members) else ()
    checks.append(BoundCheck("typical-sequence-probability", _in_log_bracket(log_seq, lo7, hi7), meas7, lo7, hi7, (lo7, hi7), "log2 probabilities"))

    prob_t = float(np.exp2(log_seq).sum())
    delta1 = max(0.0, 1.0 - prob_t)
    size = len(members)
    lo8 = (1 - delta1) * 2 ** (n * (1 - eps1) * h_ay)
    hi8 = 2 ** (n * (1 + eps1) * h_ay)
    ok8 = size <= hi8 * (1 + 1e-12) and size >= lo8 * (1 - 1e-12)
    checks.append(BoundCheck("typical-set-size", ok8, (float(size),), lo8, hi8, (lo8, hi8), "cardinality"))

    # probability of the typical set: sample joint sequences
    sample = rng.choice(ka * ky, size=(trials, n), p=joint_probs)
    hits = int(_typical_mask(_symbol_counts(sample, ka * ky), joint_probs, n, eps1).sum())
    checks.append(_mc_check("typical-set-probability", hits, trials, 1 - delta1, 1.0, f"exact probability {prob_t:.6g}"))

    # conditional probabilities of typical pairs
    log_cond_seq = counts @ log_cond if len(members) else np.zeros(0)
    lo10, hi10 = -n * (1 + eps1) * h_a_given_y, -n * (1 - eps1) * h_a_given_y
    meas10 = (float(log_cond_seq.min()), float(log_cond_seq.max())) if len(members) else ()
    checks.append(
        BoundCheck("conditional-sequence-probability", _in_log_bracket(log_cond_seq, lo10, hi10), meas10, lo10, hi10, (lo10, hi10), "log2 probabilities")
    )

    extras: dict = {"typical_set_size": size, "typical_probability": prob_t}
    if not len(members):
        # no typical pair exists, so every bracket below is vacuous
        for name in ("conditional-set-size", "conditional-set-probability", "independent-cross-probability",
                     "conditional-cross-probability"):
            checks.append(BoundCheck(name, True, (), 0.0, 0.0, (0.0, 0.0), "vacuous: empty typical set"))
        return BoundAuditReport(n, eps1, eps2, trials, seed, tuple(checks), delta1, 1.0, 1.0, extras)

    first = members[0]
    y_flat = first % ky
    a_flat = first // ky

    # size of the conditional typical set given the fixed y^n
    cond_members = _conditional_members(pay, y_flat if ys else None, n, eps2)
    csize = len(cond_members)
    joint_idx = cond_members * ky + y_flat[None, :]
    p_given_y = float(np.exp2(_symbol_counts(joint_idx, ka * ky) @ log_cond).sum()) if csize else 0.0
    delta12 = max(0.0, 1.0 - p_given_y)
    lo11 = (1 - delta12) * 2 ** (n * (1 - eps2) * h_a_given_y)
    hi11 = 2 ** (n * (1 + eps2) * h_a_given_y)
    ok11 = csize <= hi11 * (1 + 1e-12) and csize >= lo11 * (1 - 1e-12)
    checks.append(BoundCheck("conditional-set-size", ok11, (float(csize),), lo11, hi11, (lo11, hi11), "cardinality"))

    # conditional typical-set probability: sample A^n from P(a|y_t)
    cond_cols = cond_a_y[:, y_flat]  # (ka, n)
    draws = _sample_columns(rng, cond_cols, trials)
    hits = int(_typical_mask(_symbol_counts(draws * ky + y_flat[None, :], ka * ky), joint_probs, n, eps2).sum())
    checks.append(_mc_check("conditional-set-probability", hits, trials, 1 - delta12, 1.0, f"exact probability {p_given_y:.6g}"))

    # cross probability: A^n drawn from the marginal, independent of y^n
    pa = pay.matrix.sum(axis=1)
    mi_ay = mutual_information(p, a_vars, ys) if ys else 0.0
    h_a = entropy(p, a_vars)
    lo13 = (1 - delta12) * 2 ** (-n * (mi_ay + 2 * eps2 * h_a))
    hi13 = 2 ** (-n * (mi_ay - 2 * eps2 * h_a))
    draws = rng.choice(ka, size=(trials, n), p=pa)
    hits = int(_typical_mask(_symbol_counts(draws * ky + y_flat[None, :], ka * ky), joint_probs, n, eps2).sum())
    log_pa = np.log2(np.where(pa > 0, pa, 1))
    exact13 = float(np.exp2(_symbol_counts(cond_members, ka) @ log_pa).sum()) if csize else 0.0
    checks.append(_mc_check("independent-cross-probability", hits, trials, lo13, min(hi13, 1.0), f"exact probability {exact13:.6g}"))
    extras["independent-cross-probability exact"] = exact13

    # conditional cross probability: X^n drawn from P(x|u_t) given a fixed typical (u^n, y^n)
    pxu = _split(p, xs, us + ys)
    kx, kuy = pxu.matrix.shape
    x_flat, uy_flat = _regroup(p, a_flat, y_flat, xs, us, ys)
    pu_x = _split(p, xs, us).matrix  # (kx, ku)
    pu = pu_x.sum(axis=0)
    cond_x_u = np.divide(pu_x, pu[None, :], out=np.zeros_like(pu_x), where=pu[None, :] > 0)
    ku = pu_x.shape[1]
    u_flat = uy_flat // (kuy // ku) if us else np.zeros(n, dtype=np.int64)
    probs_xuy = pxu.matrix.ravel()
    cm = _conditional_members(pxu, uy_flat if (us or ys) else None, n, eps2)
    puy = pxu.matrix.sum(axis=0)
    cond_x_uy = np.divide(pxu.matrix, puy[None, :], out=np.zeros_like(pxu.matrix), where=puy[None, :] > 0)
    log_cxuy = np.log2(np.where(cond_x_uy > 0, cond_x_uy, 1)).ravel()
    p_cond = float(np.exp2(_symbol_counts(cm * kuy + uy_flat[None, :], kx * kuy) @ log_cxuy).sum()) if len(cm) else 0.0
    delta_cond = max(0.0, 1.0 - p_cond)
    mi_xy_u = mutual_information(p, xs, ys, us) if ys else 0.0
    h_x_u = entropy(p, xs, us)
    lo14 = (1 - delta_cond) * 2 ** (-n * (mi_xy_u + 2 * eps2 * h_x_u))
    hi14 = 2 ** (-n * (mi_xy_u - 2 * eps2 * h_x_u))
    draws = _sample_columns(rng, cond_x_u[:, u_flat], trials)
    hits = int(_typical_mask(_symbol_counts(draws * kuy + uy_flat[None, :], kx * kuy), probs_xuy, n, eps2).sum())
    log_cxu = np.log2(np.where(cond_x_u > 0, cond_x_u, 1))
    exact14 = float(np.exp2(log_cxu[cm, u_flat[None, :]].sum(axis=1)).sum()) if len(cm) else 0.0
    checks.append(_mc_check("conditional-cross-probability", hits, trials, lo14, min(hi14, 1.0), f"exact probability {exact14:.6g}"))
    extras["conditional-cross-probability exact"] = exact14
    extras["conditioning_sequence"] = [int(v) for v in y_flat]
    return BoundAuditReport(n, eps1, eps2, trials, seed, tuple(checks), delta1, delta12, delta_cond, extras)


def _sample_columns(rng: np.random.Generator, cols: np.ndarray, trials: int) -> np.ndarray:
    """Draw ``trials`` sequences whose t-th symbol follows column t of ``cols``."""
    k, n = cols.shape
    cdf = np.cumsum(cols, axis=0)
    cdf[-1, :] = 1.0
    u = rng.random((trials, n))
    out = np.empty((trials, n), dtype=np.int64)
    for t in range(n):
        out[:, t] = np.searchsorted(cdf[:, t], u[:, t], side="right")
    return np.minimum(out, k - 1)


def _regroup(p: JointPmf, a_flat, y_flat, xs, us, ys):
    """Re-index a typical (a^n, y^n) pair as (x^n, (u,y)^n) flat symbols."""
    sizes = p.sizes
    a_shape = tuple(sizes[v] for v in xs + us)
    y_shape = tuple(sizes[v] for v in ys) or (1,)
    a_parts = np.unravel_index(a_flat, a_shape)
    y_parts = np.unravel_index(y_flat, y_shape) if ys else ()
    x_parts = a_parts[: len(xs)]
    u_parts = a_parts[len(xs):]
    x_flat = np.ravel_multi_index(x_parts, tuple(sizes[v] for v in xs))
    uy_parts = tuple(u_parts) + tuple(y_parts)
    if uy_parts:
        uy_flat = np.ravel_multi_index(uy_parts, tuple(sizes[v] for v in us + ys))
    else:
        uy_flat = np.zeros(len(a_flat), dtype=np.int64)
    return x_flat, uy_flat
