"""Exact distribution-transformer semantics.

Programs are loop-free, so running one means walking a finite tree of
probabilistic branches.  All weights are :class:`~fractions.Fraction`.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .dsl import (And, Assign, Cond, EqValue, EqVar, If, Not, Or, PChoice,
                  Program, Seq, Skip, Stmt)


class StateError(ValueError):
    """A state that does not fit the program it is used with."""


class State(Mapping[str, str]):
    """Immutable, hashable assignment of values to variable names."""

    __slots__ = ("_items", "_hash")

    def __init__(self, assignment: Mapping[str, str] | Iterable[tuple[str, str]] = (), **kw: str):
        d = dict(assignment)
        d.update(kw)
        self._items = tuple(sorted(d.items()))
        self._hash = hash(self._items)

    def __getitem__(self, name: str) -> str:
        for k, v in self._items:
            if k == name:
                return v
        raise KeyError(name)

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self._items == other._items
        if isinstance(other, Mapping):
            return dict(self._items) == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return "State(" + ", ".join(f"{k}={v}" for k, v in self._items) + ")"

    def set(self, name: str, value: str) -> "State":
        d = dict(self._items)
        d[name] = value
        return State(d)

    def project(self, names: Iterable[str]) -> "State":
        keep = set(names)
        return State((k, v) for k, v in self._items if k in keep)


class Distribution:
    """Finite distribution over states with exact rational weights.

    Only strictly positive weights are stored; they sum to exactly 1.
    """

    __slots__ = ("_support",)

    def __init__(self, support: Mapping[State, Fraction]):
        cleaned = {State(s): Fraction(p) for s, p in support.items() if p != 0}
        if any(p < 0 for p in cleaned.values()):
            raise ValueError("negative probability")
        total = sum(cleaned.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self._support = MappingProxyType(cleaned)

    @classmethod
    def point(cls, state: State) -> "Distribution":
        return cls({state: Fraction(1)})

    @property
    def support(self) -> Mapping[State, Fraction]:
        return self._support

    def __getitem__(self, state: Mapping[str, str]) -> Fraction:
        return self._support.get(State(state), Fraction(0))

    def __len__(self) -> int:
        return len(self._support)

    def __iter__(self):
        return iter(self._support)

    def items(self):
        return self._support.items()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return dict(self._support) == dict(other._support)

    def __repr__(self) -> str:
        body = ", ".join(f"{s!r}: {p}" for s, p in self._support.items())
        return f"Distribution({{{body}}})"


def check_state(program: Program, state: Mapping[str, str]) -> State:
    """Return ``state`` as a :class:`State` after checking totality and domains."""
    decls = program.variables
    missing = [n for n in decls if n not in state]
    if missing:
        raise StateError(f"state does not assign {', '.join(missing)}")
    extra = [n for n in state if n not in decls]
    if extra:
        raise StateError(f"state assigns undeclared {', '.join(extra)}")
    for name, value in state.items():
        if value not in decls[name].domain:
            raise StateError(f"{name}={value} is outside the domain of {name}")
    return State(state)


def holds(c: Cond, s: State) -> bool:
    if isinstance(c, EqValue):
        return s[c.var] == c.value
    if isinstance(c, EqVar):
        return s[c.left] == s[c.right]
    if isinstance(c, Not):
        return not holds(c.arg, s)
    if isinstance(c, And):
        return holds(c.left, s) and holds(c.right, s)
    if isinstance(c, Or):
        return holds(c.left, s) or holds(c.right, s)
    raise TypeError(f"not a condition: {c!r}")


def _exec(stmt: Stmt, s: State) -> dict[State, Fraction]:
    if isinstance(stmt, Skip):
        return {s: Fraction(1)}
    if isinstance(stmt, Assign):
        return {s.set(stmt.var, stmt.value): Fraction(1)}
    if isinstance(stmt, If):
        return _exec(stmt.then if holds(stmt.cond, s) else stmt.orelse, s)
    out: dict[State, Fraction] = defaultdict(Fraction)
    if isinstance(stmt, Seq):
        for mid, p in _exec(stmt.first, s).items():
            for end, q in _exec(stmt.second, mid).items():
                out[end] += p * q
        return out
    if isinstance(stmt, PChoice):
        for end, q in _exec(stmt.left, s).items():
            out[end] += stmt.prob * q
        for end, q in _exec(stmt.right, s).items():
            out[end] += (1 - stmt.prob) * q
        return out
    raise TypeError(f"not a statement: {stmt!r}")


def run(program: Program, initial: Mapping[str, str]) -> Distribution:
    """Exact distribution over final states from one initial state."""
    return Distribution(_exec(program.body, check_state(program, initial)))


def observe(dist: Distribution, observable: Iterable[str]) -> Distribution:
    """Marginalize ``dist`` onto the variables in ``observable``."""
    names = set(observable)
    if dist.support:
        known = set(next(iter(dist.support)))
        unknown = names - known
        if unknown:
            raise StateError(f"unknown variable(s) {', '.join(sorted(unknown))}")
    out: dict[State, Fraction] = defaultdict(Fraction)
    for s, p in dist.items():
        out[s.project(names)] += p
    return Distribution(out)


def observable_vars(program: Program) -> list[str]:
    """Default attacker view: the variables classed ``output``."""
    return [d.name for d in program.outputs]
