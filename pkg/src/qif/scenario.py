"""Scenario files: one experiment per file, line-oriented ``key = value``.

::

    program = pwc.qif          # resolved relative to the scenario file
    reality = C                # joint high state; (A, x) for several variables
    low.g = A
    belief.A = 0.98            # unlisted states get probability 0
    belief.B = 1/100
    belief.C = 0.01
    observe.a = 0              # optional
    epsilon = 0.03             # optional

Probabilities are exact decimals or ``n/d`` rationals.  A prebelief whose
total is within 1e-9 of 1 is rescaled to sum to exactly 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .belief import Belief, HighState, Reality, joint_domain
from .dsl import Program, parse_program
from .metrics import Experiment

NORMALIZE_TOL = Fraction(1, 10**9)

_LINE_RE = re.compile(r"^\s*([A-Za-z_][\w.(), ]*?)\s*=\s*(.*?)\s*$")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def parse_tuple(text: str) -> HighState:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    parts = tuple(p.strip() for p in text.split(","))
    if not parts or any(not re.fullmatch(r"[A-Za-z0-9_]+", p) for p in parts):
        raise ValueError(f"malformed value tuple {text!r}")
    return parts


def format_tuple(t: HighState) -> str:
    return t[0] if len(t) == 1 else "(" + ", ".join(t) + ")"


def parse_probability(text: str) -> Fraction:
    if not re.fullmatch(r"\d+(\.\d+)?(/\d+)?|\.\d+", text):
        raise ValueError(f"malformed probability {text!r}")
    p = Fraction(text)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {text} is outside [0, 1]")
    return p


@dataclass
class Scenario:
    program: str
    prebelief: dict[HighState, Fraction]
    reality: HighState
    low_input: dict[str, str] = field(default_factory=dict)
    observation: Optional[dict[str, str]] = None
    epsilon: Optional[Fraction] = None
    base_dir: Path = field(default=Path("."), compare=False)

    @property
    def program_path(self) -> Path:
        return self.base_dir / self.program

    def load_program(self) -> Program:
        return parse_program(self.program_path.read_text(encoding="utf-8"))

    def experiment(self, program: Program | None = None) -> Experiment:
        """Validate against the program and build the experiment."""
        program = program or self.load_program()
        domain = joint_domain(program)
        width = len(program.high)
        for state in list(self.prebelief) + [self.reality]:
            if len(state) != width:
                raise ScenarioError(f"state {format_tuple(state)} does not have {width} value(s)")
            if state not in domain:
                raise ScenarioError(f"state {format_tuple(state)} is outside the high domain")
        total = sum(self.prebelief.values(), Fraction(0))
        if abs(total - 1) > NORMALIZE_TOL:
            raise ScenarioError(f"prebelief does not normalize (sums to {float(total):.12g})")
        probs = {s: p / total for s, p in self.prebelief.items()}
        pre = Belief.from_mapping(probs, domain)
        decls = program.variables
        for name, value in (self.observation or {}).items():
            if name not in decls:
                raise ScenarioError(f"observed variable {name!r} is not declared")
            if value not in decls[name].domain:
                raise ScenarioError(f"observed value {name}={value} is outside its domain")
        try:
            return Experiment(program, pre, Reality(self.reality), dict(self.low_input))
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None


def parse_scenario(text: str, base_dir: Path | str = ".") -> Scenario:
    program = reality = epsilon = None
    prebelief: dict[HighState, Fraction] = {}
    low: dict[str, str] = {}
    observation: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = m.group(1).strip(), m.group(2)
        try:
            if key == "program":
                program = value
            elif key == "reality":
                reality = parse_tuple(value)
            elif key == "epsilon":
                epsilon = Fraction(value)
                if epsilon <= 0:
                    raise ValueError("epsilon must be positive")
            elif key.startswith("belief."):
                state = parse_tuple(key[len("belief."):])
                if state in prebelief:
                    raise ValueError(f"belief for {format_tuple(state)} given twice")
                prebelief[state] = parse_probability(value)
            elif key.startswith("low."):
                low[_name(key, "low.")] = _value(value)
            elif key.startswith("observe."):
                observation[_name(key, "observe.")] = _value(value)
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno) from None
    if program is None:
        raise ScenarioError("missing 'program'")
    if reality is None:
        raise ScenarioError("missing 'reality'")
    if not prebelief:
        raise ScenarioError("no 'belief.<state>' lines")
    return Scenario(program, prebelief, reality, low, observation or None, epsilon, Path(base_dir))


def _name(key: str, prefix: str) -> str:
    name = key[len(prefix):]
    if not re.fullmatch(r"[A-Za-z_]\w*", name):
        raise ValueError(f"malformed variable name {name!r}")
    return name


def _value(text: str) -> str:
    if not re.fullmatch(r"[A-Za-z0-9_]+", text):
        raise ValueError(f"malformed value {text!r}")
    return text


def load_scenario(path: Path | str) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), path.parent)


def serialize_scenario(s: Scenario) -> str:
    lines = [f"program = {s.program}", f"reality = {format_tuple(s.reality)}"]
    lines += [f"low.{k} = {v}" for k, v in s.low_input.items()]
    lines += [f"belief.{format_tuple(k)} = {v}" for k, v in s.prebelief.items()]
    lines += [f"observe.{k} = {v}" for k, v in (s.observation or {}).items()]
    if s.epsilon is not None:
        lines.append(f"epsilon = {s.epsilon}")
    return "\n".join(lines) + "\n"
