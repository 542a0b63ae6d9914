"""Batched entropy evaluation over many joint distributions at once.

A ``BatchJoint`` holds an array of shape (B, n_1, ..., n_k): B joint pmfs over
the same named variables. Entropies of variable subsets are computed for the
whole batch in one numpy pass and memoized per subset.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError
from .infoexpr import InfoExpr


class BatchJoint:
    def __init__(self, names: Sequence[str], table: np.ndarray):
        self.names = tuple(names)
        if table.ndim != len(self.names) + 1:
            raise ArgumentError("table rank does not match variable names")
        self.table = table
        self._cache: dict[frozenset, np.ndarray] = {}

    @property
    def batch(self) -> int:
        return self.table.shape[0]

    def h(self, subset: Iterable[str]) -> np.ndarray:
        s = frozenset(subset)
        if not s:
            return np.zeros(self.batch)
        if s not in self._cache:
            missing = s - set(self.names)
            if missing:
                raise ArgumentError(f"batch lacks variables {sorted(missing)}")
            drop = tuple(i + 1 for i, n in enumerate(self.names) if n not in s)
            m = self.table.sum(axis=drop) if drop else self.table
            flat = m.reshape(self.batch, -1)
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = np.where(flat > 0, -flat * np.log2(np.where(flat > 0, flat, 1.0)), 0.0)
            self._cache[s] = terms.sum(axis=1)
        return self._cache[s]

    def mi(self, a, b, c=()) -> np.ndarray:
        a, b, c = set(_names(a)), set(_names(b)), set(_names(c))
        return self.h(a | c) + self.h(b | c) - self.h(a | b | c) - self.h(c)

    def evaluate(self, expr: InfoExpr) -> np.ndarray:
        out = np.full(self.batch, float(expr.constant))
        for s, k in expr.entropy_form().items():
            out = out + float(k) * self.h(s)
        return out

    def select(self, idx) -> "BatchJoint":
        return BatchJoint(self.names, self.table[idx])


def _names(v) -> tuple[str, ...]:
    if isinstance(v, str):
        return tuple(x.strip() for x in v.split(",") if x.strip())
    return tuple(v)


def attach_channel(names: Sequence[str], inputs: np.ndarray, transition: np.ndarray) -> BatchJoint:
    """Append outputs (Y1, Y2) to input-side joints whose last two axes are (X1, X2)."""
    names = tuple(names)
    if names[-2:] != ("X1", "X2"):
        raise ArgumentError("input-side variables must end with X1, X2")
    t = np.einsum("b...ij,ijkl->b...ijkl", inputs, transition)
    return BatchJoint(names + ("Y1", "Y2"), t)


# ---------------------------------------------------------------------------
# simplex sampling


def simplex_grid(dim: int, k: int) -> np.ndarray:
    """All points of the probability simplex with coordinates in (1/k)Z."""
    if dim == 1:
        return np.ones((1, 1))
    pts = []
    for bars in itertools.combinations(range(k + dim - 1), dim - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(k + dim - 2 - prev)
        pts.append(row)
    return np.asarray(pts, dtype=float) / k


def simplex_grid_size(dim: int, k: int) -> int:
    return comb(k + dim - 1, dim - 1)


def dirichlet_mix(rng: np.random.Generator, dim: int, n: int) -> np.ndarray:
    """Half flat Dirichlet draws, half sparse ones that reach the faces."""
    if dim == 1:
        return np.ones((n, 1))
    half = n // 2
    a = rng.dirichlet(np.ones(dim), size=half)
    b = rng.dirichlet(np.full(dim, 0.25), size=n - half)
    return np.concatenate([a, b], axis=0)


def outer_blocks(blocks: Sequence[np.ndarray], shapes: Sequence[tuple[int, ...]], order: Sequence[int]) -> np.ndarray:
    """Combine independent blocks (B, prod(shape_i)) into one joint tensor.

    ``order`` permutes the concatenated block axes into the final variable order.
    """
    b = blocks[0].shape[0]
    out = blocks[0].reshape((b,) + tuple(shapes[0]))
    for blk, shp in zip(blocks[1:], shapes[1:]):
        nd = out.ndim - 1
        out = out.reshape(out.shape + (1,) * len(shp)) * blk.reshape((b,) + (1,) * nd + tuple(shp))
    return np.transpose(out, (0,) + tuple(i + 1 for i in order))


def product_grid(grids: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Cartesian product of per-block grids, returned block by block."""
    idx = np.array(list(itertools.product(*(range(len(g)) for g in grids))), dtype=int)
    if idx.size == 0:
        return [g[:0] for g in grids]
    return [g[idx[:, i]] for i, g in enumerate(grids)]


def as_float_dict(d: Mapping[str, np.ndarray]) -> dict:
    return {k: np.asarray(v).tolist() for k, v in d.items()}
