"""Superposition/binning coding schemes compiled into rate constraints.

A scheme is a DAG of codewords in generation order. Each node may carry
message parts (rate symbols) and a bin index (bin-rate symbol). Edges point
from a cloud center to its satellite. Each decoder lists the nodes it
decodes and the nodes or message parts it already knows.

Covering constraints bound the bin rates from below; packing constraints
bound, for every decoding error event, the total rate of the wrongly decoded
components. Splitting equalities tie output rates to their parts, and the
parts and bins are then removed by Fourier-Motzkin elimination.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ArgumentError, SpecificationError
from .infoexpr import Constraint, EntropyValuation, InfoExpr
from .polyhedra import RatePolyhedron, fm_eliminate, normalize
from .prob_core import JointPmf


@dataclass(frozen=True)
class SchemeNode:
    name: str
    messages: tuple[str, ...] = ()
    bin: str | None = None
    encoder: str | None = None

    @property
    def is_input(self) -> bool:
        return not self.messages and self.bin is None


@dataclass(frozen=True)
class Decoder:
    receiver: str
    decodes: tuple[str, ...]
    knows: tuple[str, ...] = ()
    wants: tuple[str, ...] | None = None


@dataclass
class SchemeGraph:
    nodes: tuple[SchemeNode, ...]
    edges: tuple[tuple[str, str], ...]
    decoders: tuple[Decoder, ...]
    splits: dict[str, tuple[str, ...]] = field(default_factory=dict)
    rates: tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        self._validate()

    # structure -----------------------------------------------------------
    @property
    def order(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    def node(self, name: str) -> SchemeNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise SpecificationError(f"unknown node {name!r}")

    def parents(self, name: str) -> set[str]:
        return {a for a, b in self.edges if b == name}

    def ancestors(self, name: str) -> set[str]:
        out: set[str] = set()
        stack = list(self.parents(name))
        while stack:
            a = stack.pop()
            if a not in out:
                out.add(a)
                stack.extend(self.parents(a))
        return out

    def descendants(self, name: str) -> set[str]:
        return {n for n in self.order if name in self.ancestors(n)}

    def _sorted(self, names: Iterable[str]) -> list[str]:
        pos = {n: i for i, n in enumerate(self.order)}
        return sorted(names, key=lambda n: pos[n])

    def symbols(self) -> set[str]:
        out = set(self.rates) | set(self.splits)
        for n in self.nodes:
            out |= set(n.messages)
            if n.bin:
                out.add(n.bin)
        for parts in self.splits.values():
            out |= set(parts)
        return out

    def _validate(self) -> None:
        names = self.order
        if len(set(names)) != len(names):
            raise SpecificationError("duplicate node names")
        pos = {n: i for i, n in enumerate(names)}
        for a, b in self.edges:
            if a not in pos or b not in pos:
                raise SpecificationError(f"edge {a}->{b} names an unknown node")
            if pos[a] >= pos[b]:
                raise SpecificationError(f"edge {a}->{b}: cloud centers must precede their satellites (acyclic order)")
        carried = [m for n in self.nodes for m in n.messages]
        if len(set(carried)) != len(carried):
            raise SpecificationError("a message part is carried by two nodes")
        for d in self.decoders:
            for n in d.decodes:
                if n not in pos:
                    raise SpecificationError(f"decoder {d.receiver} decodes unknown node {n!r}")
            known_nodes = {k for k in d.knows if k in pos}
            for k in d.knows:
                if k not in pos and k not in carried:
                    raise SpecificationError(f"decoder {d.receiver} knows unknown item {k!r}")
            for n in d.decodes:
                for a in self.ancestors(n):
                    if a not in d.decodes and a not in known_nodes:
                        raise SpecificationError(
                            f"decoder {d.receiver} decodes satellite {n} but neither decodes nor knows its cloud center {a}"
                        )
            for w in d.wants or ():
                if w not in carried:
                    raise SpecificationError(f"decoder {d.receiver} wants unknown message part {w!r}")

    def decoder(self, receiver: str) -> Decoder:
        for d in self.decoders:
            if d.receiver == receiver:
                return d
        raise ArgumentError(f"graph has no decoder for receiver {receiver!r}")


# ---------------------------------------------------------------------------
# loading


def graph_from_dict(d: Mapping) -> SchemeGraph:
    try:
        nodes = tuple(
            SchemeNode(
                str(n["name"]),
                tuple(n.get("messages") or ()),
                n.get("bin") or None,
                None if n.get("encoder") is None else str(n.get("encoder")),
            )
            for n in d.get("nodes", [])
        )
        edges = tuple((str(a), str(b)) for a, b in d.get("edges", []))
        decoders = tuple(
            Decoder(
                str(x["receiver"]),
                tuple(x.get("decodes") or ()),
                tuple(x.get("knows") or ()),
                None if x.get("wants") is None else tuple(x["wants"]),
            )
            for x in d.get("decoders", [])
        )
        splits = {str(k): tuple(v) for k, v in (d.get("splits") or {}).items()}
        rates = tuple(d.get("rates") or ())
    except (KeyError, TypeError, ValueError) as e:
        raise SpecificationError(f"malformed scheme graph: {e}") from e
    return SchemeGraph(nodes, edges, decoders, splits, rates, str(d.get("name", "")))


def load_graph(path: str | Path) -> SchemeGraph:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ArgumentError(f"cannot read scheme graph {path}: {e}") from e
    return graph_from_dict(data)


def builtin_graph(name: str) -> SchemeGraph:
    """Shipped graphs: ``fig16``, ``fig7``, ``thm39``."""
    try:
        text = resources.files("ratebound").joinpath("data", f"{name}.json").read_text()
    except FileNotFoundError:
        raise ArgumentError(f"no shipped scheme graph named {name!r}") from None
    return graph_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# constraint generation


def _mi(a: Sequence[str], b: Sequence[str], c: Sequence[str]) -> InfoExpr:
    if not a or not b:
        return InfoExpr()
    return InfoExpr.mi(tuple(a), tuple(b), tuple(c))


def covering_constraints(g: SchemeGraph) -> list[Constraint]:
    """Cumulative bin-rate lower bounds, one per binned node in generation order.

    A binned node is covered against the earlier nodes that are not among its
    cloud centers, conditioned on its cloud centers.
    """
    out: list[Constraint] = []
    bins: list[str] = []
    total = InfoExpr()
    for pos, node in enumerate(g.nodes):
        if node.bin is None:
            continue
        anc = g.ancestors(node.name)
        targets = [m for m in g.order[:pos] if m not in anc]
        if not targets:
            raise SpecificationError(f"bin {node.bin} on node {node.name} has no covering target")
        bins.append(node.bin)
        total = total + _mi(targets, [node.name], g._sorted(anc))
        out.append(Constraint.make({b: 1 for b in bins}, ">=", total))
    return out


def _known_parts(g: SchemeGraph, d: Decoder) -> set[str]:
    known = set()
    for k in d.knows:
        if k in g.order:
            known |= set(g.node(k).messages)
        else:
            known.add(k)
    return known


def _own_unknown(g: SchemeGraph, name: str, known_parts: set[str]) -> list[str]:
    node = g.node(name)
    own = [m for m in node.messages if m not in known_parts]
    if node.bin:
        own.append(node.bin)
    return own


def error_events(g: SchemeGraph, receiver: str) -> list[tuple[str, ...]]:
    """Node sets that can be jointly wrong and whose error matters."""
    d = g.decoder(receiver)
    known_nodes = {k for k in d.knows if k in g.order}
    known_parts = _known_parts(g, d)
    decoded = [n for n in g.order if n in d.decodes and n not in known_nodes]
    if d.wants is not None:
        wanted = set(d.wants)
    else:
        wanted = {m for n in decoded for m in g.node(n).messages} - known_parts
    events = []
    for size in range(1, len(decoded) + 1):
        for combo in itertools.combinations(decoded, size):
            s = set(combo)
            if any((g.descendants(n) & set(decoded)) - s for n in s):
                continue
            realizable = all(
                any(_own_unknown(g, a, known_parts) for a in (g.ancestors(n) | {n}) & s) for n in s
            )
            if not realizable:
                continue
            if not any(set(g.node(n).messages) & wanted for n in s):
                continue
            events.append(tuple(combo))
    return events


def packing_constraints(g: SchemeGraph, receiver: str) -> list[Constraint]:
    """One strict rate-sum bound per error event at ``receiver``."""
    d = g.decoder(receiver)
    known_nodes = {k for k in d.knows if k in g.order}
    known_parts = _known_parts(g, d)
    decoded = [n for n in g.order if n in d.decodes and n not in known_nodes]
    out = []
    for event in error_events(g, receiver):
        s = list(event)
        correct = set(decoded) - set(s) | known_nodes
        bound = _mi(s, [receiver], g._sorted(correct))
        before: set[str] = set()
        for a in s:
            anc = g.ancestors(a)
            others = (correct | before) - anc
            bound = bound + _mi([a], g._sorted(others), g._sorted(anc))
            before.add(a)
        lhs: dict[str, int] = {}
        for a in s:
            for r in _own_unknown(g, a, known_parts):
                lhs[r] = lhs.get(r, 0) + 1
        out.append(Constraint.make(lhs, "<", bound))
    return out


def splitting_constraints(g: SchemeGraph) -> list[Constraint]:
    out = []
    for total, parts in g.splits.items():
        coeffs = {total: Fraction(1)}
        for p in parts:
            coeffs[p] = coeffs.get(p, Fraction(0)) - 1
        out.append(Constraint.make(coeffs, "=", 0))
    carried = {m for n in g.nodes for m in n.messages} | {p for ps in g.splits.values() for p in ps}
    for r in g.rates:
        if r not in g.splits and r not in carried:
            out.append(Constraint.make({r: 1}, "=", 0))
    return out


@dataclass
class SchemeSystem:
    """Lifted constraint system of a scheme and the variables to eliminate."""

    covering: list[Constraint]
    packing: dict[str, list[Constraint]]
    splitting: list[Constraint]
    variables: tuple[str, ...]
    eliminate: tuple[str, ...]
    outputs: tuple[str, ...]

    @property
    def constraints(self) -> list[Constraint]:
        out = list(self.covering)
        for rows in self.packing.values():
            out.extend(rows)
        out.extend(self.splitting)
        return out

    def lines(self) -> list[str]:
        return [str(c) for c in self.constraints]


def lifted_system(g: SchemeGraph) -> SchemeSystem:
    cov = covering_constraints(g)
    pack = {d.receiver: packing_constraints(g, d.receiver) for d in g.decoders}
    split = splitting_constraints(g)
    outputs = tuple(g.rates) if g.rates else tuple(
        sorted({m for n in g.nodes for m in n.messages} - {p for ps in g.splits.values() for p in ps})
    )
    used: list[str] = []
    for c in cov + [c for rows in pack.values() for c in rows] + split:
        for v in c.coeffs:
            if v not in used:
                used.append(v)
    elim = tuple(v for v in used if v not in outputs)
    return SchemeSystem(cov, pack, split, outputs + elim, elim, outputs)


def _as_valuation(v) -> Callable[[frozenset], object]:
    if isinstance(v, JointPmf):
        return EntropyValuation(v)
    if callable(v):
        return v
    raise ArgumentError("valuation must be a JointPmf or an entropy callable")


def evaluate_system(system: SchemeSystem, valuation) -> RatePolyhedron:
    """Numeric lifted polyhedron (exact when the valuation returns Fractions)."""
    val = _as_valuation(valuation)
    rows = []
    for c in system.constraints:
        rhs = c.rhs.evaluate(val)
        rows.append((c.coeffs, c.rel, rhs))
    return RatePolyhedron.from_constraints(system.variables, rows, nonneg=True)


@dataclass
class DerivedRegion:
    system: SchemeSystem
    polyhedron: RatePolyhedron | None = None

    @property
    def empty(self) -> bool:
        return self.polyhedron is not None and self.polyhedron.infeasible


def derive_region(g: SchemeGraph, valuation=None, closure: bool = False) -> DerivedRegion:
    """Assemble the lifted system; with a valuation also project it exactly.

    ``closure`` relaxes strict packing rows to non-strict before projecting.
    """
    system = lifted_system(g)
    if valuation is None:
        return DerivedRegion(system)
    lifted = evaluate_system(system, valuation)
    if closure:
        lifted = lifted.closure()
    projected = fm_eliminate(lifted, system.eliminate)
    return DerivedRegion(system, normalize(projected))
