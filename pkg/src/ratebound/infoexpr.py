"""Symbolic information expressions and rate constraints.

An ``InfoExpr`` is a rational combination of conditional mutual informations
and conditional entropies over named random variables. Expressions have a
canonical string form (sorted variable sets, sorted terms) so two
syntactically equivalent constraint sets compare equal as strings, and an
entropy-vector form used for exact numeric evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import ArgumentError
from .prob_core import JointPmf

Atom = tuple  # ("I", A, B, C) or ("H", A, C) with frozenset members

_NAME = r"[A-Za-z][A-Za-z0-9_']*"


def _natural(name: str):
    parts = re.split(r"(\d+)", name)
    return tuple(int(p) if p.isdigit() else p for p in parts)


def _sorted(vs: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(vs, key=_natural))


def _fmt_set(vs) -> str:
    return ",".join(_sorted(vs))


def _canon_atom(atom: Atom) -> list[tuple[Fraction, Atom]]:
    """Canonical atoms equal to ``atom`` (possibly several, possibly none)."""
    if atom[0] == "H":
        a, c = frozenset(atom[1]), frozenset(atom[2])
        a = a - c
        if not a:
            return []
        return [(Fraction(1), ("H", a, c))]
    a, b, c = (frozenset(x) for x in atom[1:])
    a, b = a - c, b - c
    if not a or not b:
        return []
    if a & b:
        # I(A;B|C) = H(A|C) + H(B|C) - H(A,B|C)
        return [
            (Fraction(1), ("H", a, c)),
            (Fraction(1), ("H", b, c)),
            (Fraction(-1), ("H", a | b, c)),
        ]
    if _sorted(b) < _sorted(a):
        a, b = b, a
    return [(Fraction(1), ("I", a, b, c))]


def _atom_str(atom: Atom) -> str:
    if atom[0] == "H":
        s = f"H({_fmt_set(atom[1])}"
        return s + (f"|{_fmt_set(atom[2])})" if atom[2] else ")")
    s = f"I({_fmt_set(atom[1])};{_fmt_set(atom[2])}"
    return s + (f"|{_fmt_set(atom[3])})" if atom[3] else ")")


def _atom_key(atom: Atom):
    return (atom[0], tuple(_sorted(x) for x in atom[1:]))


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class InfoExpr:
    """Immutable rational combination of information atoms plus a constant."""

    __slots__ = ("_terms", "_const")

    def __init__(self, terms: Mapping[Atom, Fraction] | None = None, const=0):
        acc: dict[Atom, Fraction] = {}
        for atom, coeff in (terms or {}).items():
            for k, a in _canon_atom(atom):
                acc[a] = acc.get(a, Fraction(0)) + Fraction(coeff) * k
        self._terms = {a: c for a, c in acc.items() if c != 0}
        self._const = Fraction(const)

    # construction ------------------------------------------------------
    @staticmethod
    def mi(a, b, c=()) -> "InfoExpr":
        return InfoExpr({("I", frozenset(_as_set(a)), frozenset(_as_set(b)), frozenset(_as_set(c))): 1})

    @staticmethod
    def h(a, c=()) -> "InfoExpr":
        return InfoExpr({("H", frozenset(_as_set(a)), frozenset(_as_set(c))): 1})

    @staticmethod
    def const(v) -> "InfoExpr":
        return InfoExpr(None, v)

    @staticmethod
    def parse(text: str) -> "InfoExpr":
        return _parse(text)

    # algebra -----------------------------------------------------------
    @property
    def terms(self) -> dict[Atom, Fraction]:
        return dict(self._terms)

    @property
    def constant(self) -> Fraction:
        return self._const

    def __add__(self, other):
        other = _coerce(other)
        t = dict(self._terms)
        for a, c in other._terms.items():
            t[a] = t.get(a, Fraction(0)) + c
        return InfoExpr(t, self._const + other._const)

    __radd__ = __add__

    def __neg__(self):
        return InfoExpr({a: -c for a, c in self._terms.items()}, -self._const)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, k):
        k = Fraction(k)
        return InfoExpr({a: c * k for a, c in self._terms.items()}, self._const * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, InfoExpr):
            return NotImplemented
        return self._terms == other._terms and self._const == other._const

    def __hash__(self):
        return hash(str(self))

    def is_zero(self) -> bool:
        return not self._terms and self._const == 0

    def variables(self) -> frozenset[str]:
        out: set[str] = set()
        for a in self._terms:
            for s in a[1:]:
                out |= s
        return frozenset(out)

    def substitute(self, mapping: Mapping[str, str | None]) -> "InfoExpr":
        """Rename variables; a ``None`` target removes the variable (constant)."""

        def ren(s):
            return frozenset(mapping.get(v, v) for v in s if mapping.get(v, v) is not None)

        t: dict[Atom, Fraction] = {}
        for a, c in self._terms.items():
            na = (a[0],) + tuple(ren(s) for s in a[1:])
            t[na] = t.get(na, Fraction(0)) + c
        return InfoExpr(t, self._const)

    def entropy_form(self) -> dict[frozenset, Fraction]:
        """Coefficients over unconditional joint entropies H(S)."""
        out: dict[frozenset, Fraction] = {}

        def add(s, k):
            if s:
                out[s] = out.get(s, Fraction(0)) + k

        for a, c in self._terms.items():
            if a[0] == "H":
                add(a[1] | a[2], c)
                add(a[2], -c)
            else:
                A, B, C = a[1:]
                add(A | C, c)
                add(B | C, c)
                add(A | B | C, -c)
                add(C, -c)
        return {s: k for s, k in out.items() if k != 0}

    def evaluate(self, valuation: Callable[[frozenset], object]):
        total = self._const
        for s, k in self.entropy_form().items():
            total = total + k * valuation(s)
        return total

    def __str__(self):
        items = sorted(self._terms.items(), key=lambda kv: _atom_key(kv[0]))
        parts = []
        for a, c in items:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = _atom_str(a) if mag == 1 else f"{_fmt_coeff(mag)}*{_atom_str(a)}"
            parts.append((sign, body))
        if self._const != 0 or not parts:
            parts.append(("-" if self._const < 0 else "+", _fmt_coeff(abs(self._const))))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"InfoExpr({str(self)!r})"


def _as_set(v) -> tuple[str, ...]:
    if isinstance(v, str):
        return tuple(x.strip() for x in v.split(",") if x.strip())
    return tuple(v)


def _coerce(v) -> InfoExpr:
    if isinstance(v, InfoExpr):
        return v
    if isinstance(v, str):
        return InfoExpr.parse(v)
    return InfoExpr.const(Fraction(v))


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?(?:\.\d+)?)|(?P<atom>[IH]\([^)]*\))|(?P<op>[+\-*]))")


def _parse_vars(s: str) -> frozenset[str]:
    names = [x.strip() for x in s.split(",") if x.strip()]
    for n in names:
        if not re.fullmatch(_NAME, n):
            raise ArgumentError(f"bad variable name {n!r}")
    return frozenset(names)


def _parse_atom(tok: str) -> Atom:
    kind, body = tok[0], tok[2:-1]
    cond = frozenset()
    if "|" in body:
        body, c = body.split("|", 1)
        cond = _parse_vars(c)
    if kind == "I":
        if ";" not in body:
            raise ArgumentError(f"mutual information needs ';': {tok}")
        a, b = body.split(";", 1)
        return ("I", _parse_vars(a), _parse_vars(b), cond)
    return ("H", _parse_vars(body), cond)


def _parse(text: str) -> InfoExpr:
    s = text.replace("−", "-").strip()
    if not s:
        raise ArgumentError("empty information expression")
    pos, sign, result = 0, 1, InfoExpr()
    coeff: Fraction | None = None
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ArgumentError(f"cannot parse expression near {s[pos:]!r}")
        pos = m.end()
        if m.group("op") == "*":
            if coeff is None:
                raise ArgumentError(f"dangling '*' in {text!r}")
        elif m.group("op"):
            if coeff is not None:
                result = result + InfoExpr.const(sign * coeff)
                coeff, sign = None, 1
            if m.group("op") == "-":
                sign = -sign
        elif m.group("num"):
            coeff = Fraction(m.group("num"))
        else:
            k = sign * (coeff if coeff is not None else 1)
            result = result + InfoExpr({_parse_atom(m.group("atom")): k})
            coeff, sign = None, 1
    if coeff is not None:
        result = result + InfoExpr.const(sign * coeff)
    return result


# ---------------------------------------------------------------------------
# rate constraints

_RELS = ("<=", "<", ">=", ">", "=")


@dataclass(frozen=True)
class Constraint:
    """``sum(lhs[v] * v)  rel  rhs`` with an information-expression bound."""

    lhs: tuple[tuple[str, Fraction], ...]
    rel: str
    rhs: InfoExpr

    @staticmethod
    def make(lhs: Mapping[str, object] | str, rel: str, rhs) -> "Constraint":
        if rel not in _RELS:
            raise ArgumentError(f"unknown relation {rel!r}")
        if isinstance(lhs, str):
            lhs = parse_linear(lhs)
        items = tuple(sorted(((k, Fraction(v)) for k, v in lhs.items() if Fraction(v) != 0), key=lambda kv: _natural(kv[0])))
        return Constraint(items, rel, _coerce(rhs))

    @property
    def coeffs(self) -> dict[str, Fraction]:
        return dict(self.lhs)

    def rate_vars(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.lhs)

    def substitute(self, mapping) -> "Constraint":
        return Constraint(self.lhs, self.rel, self.rhs.substitute(mapping))

    def __str__(self):
        return f"{format_linear(self.coeffs)} {self.rel} {self.rhs}"


def parse_linear(text: str) -> dict[str, Fraction]:
    s = text.replace(" ", "").replace("−", "-")
    if not s:
        return {}
    if s[0] not in "+-":
        s = "+" + s
    out: dict[str, Fraction] = {}
    for sign, num, var in re.findall(r"([+-])(\d+(?:/\d+)?)?\*?(" + _NAME + ")", s):
        k = Fraction(num) if num else Fraction(1)
        out[var] = out.get(var, Fraction(0)) + (-k if sign == "-" else k)
    rebuilt = "".join(re.findall(r"[+-](?:\d+(?:/\d+)?)?\*?" + _NAME, s))
    if rebuilt != s:
        raise ArgumentError(f"cannot parse linear form {text!r}")
    return out


def format_linear(coeffs: Mapping[str, Fraction]) -> str:
    parts = []
    for v in sorted(coeffs, key=_natural):
        c = coeffs[v]
        if c == 0:
            continue
        mag = abs(c)
        body = v if mag == 1 else f"{_fmt_coeff(mag)}*{v}"
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def constraint_key(c: Constraint) -> str:
    """String-normalized form used for symbolic comparisons."""
    return str(c)


# ---------------------------------------------------------------------------
# numeric valuation


class EntropyValuation:
    """Exact-rational joint entropies of a pmf, memoized per variable subset.

    When ``inputs`` and ``outputs`` are given the pmf is assumed to factor as
    P(others, inputs) * P(outputs | inputs); entropies are then rewritten so
    quantities equal under that Markov structure get identical values.
    """

    def __init__(self, pmf: JointPmf, inputs: Iterable[str] = (), outputs: Iterable[str] = (), exact: bool = True):
        self.pmf = pmf
        self.inputs = frozenset(inputs)
        self.outputs = frozenset(outputs)
        self.exact = exact
        self._cache: dict[frozenset, object] = {}

    def _raw(self, s: frozenset):
        if s not in self._cache:
            from .prob_core import entropy

            v = entropy(self.pmf, _sorted(s))
            self._cache[s] = Fraction(v) if self.exact else v
        return self._cache[s]

    def __call__(self, s: frozenset):
        s = frozenset(s)
        missing = s - set(self.pmf.variables)
        if missing:
            raise ArgumentError(f"valuation lacks variables {sorted(missing)}")
        outs = s & self.outputs
        rest = s - self.outputs
        if outs and self.inputs and self.inputs <= rest and rest != self.inputs:
            return self._raw(rest) + self._raw(outs | self.inputs) - self._raw(self.inputs)
        return self._raw(s)
