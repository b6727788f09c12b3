"""Attacker beliefs over joint high states and their Bayesian revision."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .dsl import Program, outputs_read_before_written
from .semantics import State, observable_vars, observe, run

HighState = tuple[str, ...]
Prob = Union[Fraction, float]

SUM_TOL = 1e-12


class ImpossibleObservation(ValueError):
    """The observation has zero probability under the prebelief."""


def as_high_state(key: str | Sequence[str]) -> HighState:
    return (key,) if isinstance(key, str) else tuple(key)


def joint_domain(program: Program) -> list[HighState]:
    """All joint high states, in declaration order of variables and values."""
    high = program.high
    if not high:
        raise ValueError("program declares no high variable")
    return list(itertools.product(*(d.domain for d in high)))


@dataclass(frozen=True)
class Belief:
    """Probability distribution over an ordered list of joint high states.

    Rational weights are kept exact (and must sum to exactly 1); float
    weights must sum to 1 within ``SUM_TOL``.
    """

    states: tuple[HighState, ...]
    probs: tuple[Prob, ...]

    def __post_init__(self):
        states = tuple(as_high_state(s) for s in self.states)
        probs = tuple(p if isinstance(p, (Fraction, float)) else Fraction(p) for p in self.probs)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)
        if len(states) != len(probs):
            raise ValueError("states and probabilities differ in length")
        if not states:
            raise ValueError("a belief needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError("duplicate state in belief")
        if any(not math.isfinite(p) or p < 0 for p in probs):
            raise ValueError("probabilities must be finite and nonnegative")
        total = sum(probs)
        if self.exact:
            if total != 1:
                raise ValueError(f"belief sums to {total}, not 1")
        elif abs(total - 1) > SUM_TOL:
            raise ValueError(f"belief sums to {float(total)!r}, not 1")

    @classmethod
    def from_mapping(cls, mapping: Mapping, states: Iterable | None = None) -> "Belief":
        """Build from ``{state: prob}``; states missing from the mapping get 0."""
        m = {as_high_state(k): v for k, v in mapping.items()}
        order = [as_high_state(s) for s in states] if states is not None else list(m)
        stray = set(m) - set(order)
        if stray:
            raise ValueError(f"states {sorted(stray)} are outside the domain")
        return cls(tuple(order), tuple(m.get(s, Fraction(0)) for s in order))

    @classmethod
    def uniform(cls, states: Iterable) -> "Belief":
        states = tuple(as_high_state(s) for s in states)
        return cls(states, (Fraction(1, len(states)),) * len(states))

    @classmethod
    def from_probs(cls, probs: Sequence[Prob], states: Iterable | None = None) -> "Belief":
        if states is None:
            states = [(f"s{i}",) for i in range(len(probs))]
        return cls(tuple(states), tuple(probs))

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.probs)

    def __getitem__(self, state) -> Prob:
        try:
            return self.probs[self.states.index(as_high_state(state))]
        except ValueError:
            raise KeyError(state) from None

    def get(self, state, default: Prob = Fraction(0)) -> Prob:
        try:
            return self[state]
        except KeyError:
            return default

    def items(self):
        return zip(self.states, self.probs)

    def __len__(self) -> int:
        return len(self.states)

    def floats(self) -> list[float]:
        return [float(p) for p in self.probs]

    def support(self) -> list[HighState]:
        return [s for s, p in self.items() if p > 0]


@dataclass(frozen=True)
class Reality:
    """The true joint high state."""

    point: HighState

    def __post_init__(self):
        object.__setattr__(self, "point", as_high_state(self.point))


def point_mass(reality: Reality, domain: Iterable) -> Belief:
    states = [as_high_state(s) for s in domain]
    if reality.point not in states:
        raise ValueError(f"reality {reality.point} is outside the domain")
    return Belief(tuple(states), tuple(Fraction(int(s == reality.point)) for s in states))


def shannon_entropy(b: Belief) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    h = 0.0
    for p in b.probs:
        if p > 0:
            p = float(p)
            h -= p * math.log2(p)
    return max(h, 0.0)


def belief_in_reality(b: Belief, r: Reality) -> Prob:
    return b[r.point]


def initial_state(program: Program, high: HighState, low_input: Mapping[str, str]) -> State:
    """Full initial state: ``high`` + ``low_input``, outputs at their first value."""
    high_decls = program.high
    if len(high) != len(high_decls):
        raise ValueError(f"high state {high} does not match {len(high_decls)} high variable(s)")
    missing = [d.name for d in program.low if d.name not in low_input]
    if missing:
        raise ValueError(f"low input does not assign {', '.join(missing)}")
    assignment = {d.name: v for d, v in zip(high_decls, high)}
    assignment.update(low_input)
    for d in program.outputs:
        assignment.setdefault(d.name, d.domain[0])
    return State(assignment)


def observation_distribution(program: Program, high: HighState, low_input: Mapping[str, str],
                             observable: Iterable[str] | None = None):
    names = observable_vars(program) if observable is None else list(observable)
    return observe(run(program, initial_state(program, high, low_input)), names)


def likelihood(program: Program, high: HighState, low_input: Mapping[str, str],
               observation: Mapping[str, str]) -> Fraction:
    """Pr(observation | high state, low input), exactly."""
    return observation_distribution(program, high, low_input, observation.keys())[observation]


def revise_belief(prebelief: Belief, program: Program, low_input: Mapping[str, str],
                  observation: Mapping[str, str]) -> Belief:
    """Bayesian postbelief after seeing ``observation`` from one run."""
    unset = outputs_read_before_written(program)
    if unset:
        warnings.warn(f"output(s) {', '.join(sorted(unset))} may be read before being written; "
                      "results depend on their fixed initial value", stacklevel=2)
    weights = [p * likelihood(program, s, low_input, observation) for s, p in prebelief.items()]
    total = sum(weights)
    if total == 0:
        raise ImpossibleObservation(
            f"observation {dict(observation)} has probability 0 under the prebelief"
        )
    post = [w / total for w in weights]
    if not prebelief.exact:
        post = [float(p) for p in post]
    return Belief(prebelief.states, tuple(post))

