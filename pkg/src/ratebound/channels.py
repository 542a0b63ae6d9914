"""Two-transmitter, two-receiver memoryless networks and Gaussian parameter records."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ArgumentError

ROW_TOL = 1e-12
EXACT_TOL = 1e-9
FLOAT_TOL = 1e-6
_ENDPOINTS = ("x1", "x2", "y1", "y2")


def _default_messages() -> dict[str, tuple[str, ...]]:
    return {"x1": ("m1",), "x2": ("m2",), "y1": ("m1",), "y2": ("m2",)}


@dataclass(frozen=True)
class DmNet:
    """Transition tensor indexed [x1][x2][y1][y2] plus message assignment."""

    transition: np.ndarray
    messages: Mapping[str, tuple[str, ...]] = field(default_factory=_default_messages)
    degrading_stage: np.ndarray | None = None
    exact: bool = False

    def __post_init__(self):
        t = np.array(self.transition, dtype=float)
        if t.ndim != 4:
            raise ArgumentError("transition must have four axes [x1][x2][y1][y2]")
        if t.size == 0 or t.min() < 0:
            raise ArgumentError("transition entries must be nonnegative")
        rows = t.sum(axis=(2, 3))
        if np.abs(rows - 1).max() > ROW_TOL:
            raise ArgumentError(f"transition rows deviate from 1 by {np.abs(rows - 1).max():.3g}")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)
        msgs = {k: tuple(v) for k, v in dict(self.messages).items()}
        for k in _ENDPOINTS:
            msgs.setdefault(k, ())
        unknown = set(msgs) - set(_ENDPOINTS)
        if unknown:
            raise ArgumentError(f"unknown message endpoints {sorted(unknown)}")
        sent = set(msgs["x1"]) | set(msgs["x2"])
        decoded = set(msgs["y1"]) | set(msgs["y2"])
        if sent != decoded:
            raise ArgumentError(f"encoder messages {sorted(sent)} differ from decoder messages {sorted(decoded)}")
        object.__setattr__(self, "messages", msgs)
        if self.degrading_stage is not None:
            d = np.array(self.degrading_stage, dtype=float)
            d.setflags(write=False)
            object.__setattr__(self, "degrading_stage", d)

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return tuple(int(s) for s in self.transition.shape)

    @property
    def default_tol(self) -> float:
        return EXACT_TOL if self.exact else FLOAT_TOL

    def with_messages(self, messages) -> "DmNet":
        return DmNet(self.transition, messages, self.degrading_stage, self.exact)


@dataclass(frozen=True)
class GaussianIcParams:
    a: float
    b: float
    p1: float
    p2: float

    def __post_init__(self):
        if self.p1 < 0 or self.p2 < 0:
            raise ArgumentError("powers must be nonnegative")


@dataclass(frozen=True)
class GaussianBcParams:
    a: float
    b: float
    p: float

    def __post_init__(self):
        if self.p < 0:
            raise ArgumentError("power must be nonnegative")


def marginal_channel(net: DmNet, receiver: int) -> np.ndarray:
    """P(y_j | x1, x2) as an array indexed [x1][x2][yj]."""
    if receiver == 1:
        return net.transition.sum(axis=3)
    if receiver == 2:
        return net.transition.sum(axis=2)
    raise ArgumentError("receiver must be 1 or 2")


def _variation(m: np.ndarray, axis: int) -> float:
    return float((m.max(axis=axis) - m.min(axis=axis)).max())


def one_sided_deviation(net: DmNet) -> float:
    return _variation(marginal_channel(net, 2), axis=0)


def is_one_sided(net: DmNet, tol: float | None = None) -> bool:
    """Receiver 2 unaffected by transmitter 1."""
    tol = net.default_tol if tol is None else tol
    return one_sided_deviation(net) <= tol


def is_semideterministic(net: DmNet, receiver: int) -> np.ndarray | None:
    """The map (x1, x2) -> y_j when receiver j is a deterministic function, else None."""
    m = marginal_channel(net, receiver)
    near_one = np.abs(m - 1) <= ROW_TOL
    near_zero = np.abs(m) <= ROW_TOL
    if not np.all(near_one | near_zero):
        return None
    return m.argmax(axis=2)


@dataclass(frozen=True)
class Connectivity:
    connected: dict[int, frozenset[int]]
    zero_rate: frozenset[str]
    messages: dict[str, tuple[str, ...]]


def connectivity(net: DmNet, tol: float | None = None) -> Connectivity:
    """Connected transmitters per receiver and the messages forced to rate zero."""
    tol = net.default_tol if tol is None else tol
    connected = {}
    for j in (1, 2):
        m = marginal_channel(net, j)
        conn = set()
        if _variation(m, axis=0) > tol:
            conn.add(1)
        if _variation(m, axis=1) > tol:
            conn.add(2)
        connected[j] = frozenset(conn)
    msgs = net.messages
    zero = set()
    for j in (1, 2):
        for m in msgs[f"y{j}"]:
            senders = {i for i in (1, 2) if m in msgs[f"x{i}"]}
            if not senders & connected[j]:
                zero.add(m)
    reduced = {k: tuple(m for m in v if m not in zero) for k, v in msgs.items()}
    return Connectivity(connected, frozenset(zero), reduced)


def _stochastic(m, name: str) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim < 2 or a.min() < 0 or np.abs(a.sum(axis=-1) - 1).max() > ROW_TOL:
        raise ArgumentError(f"{name} must be row-stochastic")
    return a


def bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def bc_messages() -> dict[str, tuple[str, ...]]:
    return {"x1": ("m1", "m2"), "x2": (), "y1": ("m1",), "y2": ("m2",)}


def crc_messages() -> dict[str, tuple[str, ...]]:
    return {"x1": ("m1", "m2"), "x2": ("m2",), "y1": ("m1",), "y2": ("m2",)}


def cascade_bc(stage1, stage2) -> DmNet:
    """Physically degraded broadcast channel X -> Y1 -> Y2 (|X2| = 1)."""
    s1 = _stochastic(stage1, "stage1")
    s2 = _stochastic(stage2, "stage2")
    if s1.ndim != 2 or s2.ndim != 2 or s1.shape[1] != s2.shape[0]:
        raise ArgumentError("cascade stages have mismatched dimensions")
    t = s1[:, None, :, None] * s2[None, None, :, :]
    return DmNet(t, bc_messages(), degrading_stage=s2)


def zic_from_components(p_y1, p_y2) -> DmNet:
    """Z interference channel: Y1 ~ P(y1|x1,x2), Y2 ~ P(y2|x2) independently."""
    a = _stochastic(p_y1, "P(y1|x1,x2)")
    b = _stochastic(p_y2, "P(y2|x2)")
    if a.ndim != 3 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ArgumentError("ZIC components have mismatched dimensions")
    t = a[:, :, :, None] * b[None, :, None, :]
    return DmNet(t)


def product_net(p_y1, p_y2, messages=None) -> DmNet:
    """Outputs conditionally independent given the inputs."""
    a = _stochastic(p_y1, "P(y1|x1,x2)")
    b = _stochastic(p_y2, "P(y2|x1,x2)")
    if a.ndim != 3 or b.ndim != 3 or a.shape[:2] != b.shape[:2]:
        raise ArgumentError("marginal tables have mismatched input dimensions")
    return DmNet(a[:, :, :, None] * b[:, :, None, :], messages or _default_messages())


def degraded_cic(p_y1, stage) -> DmNet:
    """CIC whose second output is a degraded copy of the first."""
    a = _stochastic(p_y1, "P(y1|x1,x2)")
    d = _stochastic(stage, "degrading stage")
    if a.ndim != 3 or d.ndim != 2 or a.shape[2] != d.shape[0]:
        raise ArgumentError("degrading stage does not match the output alphabet")
    t = a[:, :, :, None] * d[None, None, :, :]
    return DmNet(t, degrading_stage=d)


def random_net(seed: int, sizes: Sequence[int] = (2, 2, 2, 2), messages=None) -> DmNet:
    rng = np.random.default_rng(seed)
    x1, x2, y1, y2 = sizes
    rows = rng.dirichlet(np.ones(y1 * y2), size=(x1, x2))
    return DmNet(rows.reshape(x1, x2, y1, y2), messages or _default_messages())


def deterministic_table(fn, sizes_in: Sequence[int], size_out: int) -> np.ndarray:
    """Point-mass conditional table from a function of (x1, x2)."""
    t = np.zeros(tuple(sizes_in) + (size_out,))
    for idx in np.ndindex(*sizes_in):
        t[idx + (fn(*idx),)] = 1.0
    return t


def quantized_gaussian_cic(params: GaussianIcParams, levels: int = 8, span: float = 4.0) -> DmNet:
    """Binary antipodal inputs through the standard-form Gaussian IC, each output
    quantized to ``levels`` equal-width cells (outer cells unbounded)."""
    from scipy.stats import norm

    if levels < 2:
        raise ArgumentError("need at least two quantization levels")
    xs1 = np.array([-1.0, 1.0]) * math.sqrt(params.p1)
    xs2 = np.array([-1.0, 1.0]) * math.sqrt(params.p2)

    def table(g_self, g_cross, own, other_axis_first):
        peak = abs(g_self) * max(abs(own)) + abs(g_cross) * max(abs(other_axis_first)) + span
        edges = np.linspace(-peak, peak, levels + 1)
        edges[0], edges[-1] = -np.inf, np.inf
        return edges

    e1 = table(1.0, params.a, xs1, xs2)
    e2 = table(1.0, params.b, xs2, xs1)
    t = np.zeros((2, 2, levels, levels))
    for i, x1 in enumerate(xs1):
        for j, x2 in enumerate(xs2):
            m1 = x1 + params.a * x2
            m2 = params.b * x1 + x2
            c1 = np.diff(norm.cdf(e1 - m1))
            c2 = np.diff(norm.cdf(e2 - m2))
            c1 /= c1.sum()
            c2 /= c2.sum()
            t[i, j] = np.outer(c1, c2)
    return DmNet(t)


# ---------------------------------------------------------------------------
# JSON files


def _real(v) -> float:
    """Number, rational string "p/q", or "sqrt(<rational>)" for irrational gains."""
    if isinstance(v, str):
        text = v.strip()
        root = text.startswith("sqrt(") and text.endswith(")")
        try:
            x = Fraction(text[5:-1] if root else text)
        except ValueError:
            raise ArgumentError(f"expected a real number, got {v!r}") from None
        if root:
            if x < 0:
                raise ArgumentError(f"square root of a negative number: {v!r}")
            return math.sqrt(x)
        return float(x)
    if isinstance(v, (int, float)):
        return float(v)
    raise ArgumentError(f"expected a real number, got {v!r}")


def _nested(v):
    if isinstance(v, list):
        return [_nested(x) for x in v]
    return _real(v)


def channel_from_dict(d: Mapping):
    model = d.get("model")
    try:
        if model == "gaussian-cic":
            return GaussianIcParams(_real(d["a"]), _real(d["b"]), _real(d["p1"]), _real(d["p2"]))
        if model == "gaussian-bc":
            return GaussianBcParams(_real(d["a"]), _real(d["b"]), _real(d["p"]))
        if model not in (None, "discrete"):
            raise ArgumentError(f"unknown channel model {model!r}")
        alph = d["alphabets"]
        sizes = tuple(int(alph[k]) for k in _ENDPOINTS)
        t = np.array(_nested(d["transition"]), dtype=float)
    except KeyError as exc:
        raise ArgumentError(f"channel file missing field {exc}") from None
    if t.shape != sizes:
        raise ArgumentError(f"transition shape {t.shape} does not match alphabets {sizes}")
    msgs = d.get("messages") or _default_messages()
    exact = all(isinstance(x, str) for x in np.array(d["transition"], dtype=object).ravel())
    return DmNet(t, {k: tuple(v) for k, v in msgs.items()}, exact=exact)


def load_channel(path: str | Path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ArgumentError(f"cannot read channel file {path}: {exc}") from None
    return channel_from_dict(data)


def channel_to_dict(net: DmNet) -> dict:
    x1, x2, y1, y2 = net.sizes
    return {
        "alphabets": {"x1": x1, "x2": x2, "y1": y1, "y2": y2},
        "transition": [[[[repr(float(v)) for v in row] for row in blk] for blk in plane] for plane in net.transition],
        "messages": {k: list(v) for k, v in net.messages.items()},
    }
