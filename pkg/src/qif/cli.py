"""``qif`` command line.

Exit codes::

    0   success
    2   scenario invalid (bad syntax, does not fit the program, ...)
    3   observation impossible under the prebelief
    4   scenario or program file missing or unreadable
    5   program text rejected by the parser
    64  bad command-line usage
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

from . import metrics
from .belief import ImpossibleObservation, shannon_entropy
from .dsl import ProgramError
from .metrics import FlowReport, FlowRange, SearchEffort
from .scenario import Scenario, ScenarioError, format_tuple, load_scenario
from .sweep import KINDS, SweepConfig, to_csv

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_IMPOSSIBLE = 3
EXIT_FILE = 4
EXIT_PROGRAM = 5
EXIT_USAGE = 64


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---- rendering -----------------------------------------------------------


def _num(x: float | None, machine: bool) -> str | float | None:
    if x is None:
        return None if machine else "undefined"
    if math.isinf(x):
        return ("+inf" if x > 0 else "-inf")
    return x if machine else f"{x:.4f}"


def _prob(p) -> str:
    return str(p) if isinstance(p, Fraction) else repr(p)


def _belief_text(b) -> str:
    return ", ".join(f"{format_tuple(s)}={_prob(p)}" for s, p in b.items())


def _range(r: FlowRange, machine: bool):
    lo, hi = _num(r.lo, machine), _num(r.hi, machine)
    if machine:
        return [lo, hi]
    left = "(" if math.isinf(r.lo) else "["
    right = ")" if math.isinf(r.hi) else "]"
    return f"{left}{lo}, {hi}{right}"


def _search(s: SearchEffort, machine: bool):
    if machine:
        return {"residual_bits": s.residual_bits, "space": s.space, "diagnostic": s.diagnostic}
    if not s.defined:
        return f"undefined ({s.diagnostic})"
    return f"residual {_num(s.residual_bits, False)} bits, space 2^{_num(s.residual_bits, False)} = {_num(s.space, False)}"


def report_dict(rep: FlowReport) -> dict:
    """Machine-readable report; floats at full precision, infinities as strings."""
    m = True
    return {
        "eta": rep.eta,
        "reality": list(rep.reality.point),
        "observation": dict(rep.observation),
        "prebelief": {format_tuple(s): _prob(p) for s, p in rep.prebelief.items()},
        "postbelief": {format_tuple(s): _prob(p) for s, p in rep.postbelief.items()},
        "u_pre": rep.u_pre,
        "u_post": rep.u_post,
        "r": rep.r,
        "q": _num(rep.q, m),
        "q_prime": rep.q_prime,
        "q_double_prime": rep.q_double_prime,
        "range_r": _range(rep.range_r, m),
        "range_q": _range(rep.range_q, m),
        "range_q_double": _range(rep.range_q_double, m),
        "pre_distance": rep.pre_distance,
        "post_distance": rep.post_distance,
        "pre_distance_kl": _num(rep.pre_distance_kl, m),
        "post_distance_kl": _num(rep.post_distance_kl, m),
        "post_at_reality": rep.post_at_reality,
        "multiplier": _num(rep.multiplier, m),
        "search_q_double": _search(rep.search, m),
        "search_q": _search(rep.search_q, m),
        "size_consistent_r": rep.size_consistent_r,
        "size_consistent_q": rep.size_consistent_q,
        "size_consistent_q_double": rep.size_consistent_q_double,
    }


def _verdict(ok: bool) -> str:
    return "size-consistent" if ok else "NOT size-consistent"


def render_report(rep: FlowReport) -> str:
    f = lambda x: _num(x, False)  # noqa: E731
    obs = ", ".join(f"{k}={v}" for k, v in rep.observation.items()) or "(nothing)"
    rows = [
        ("true high state", format_tuple(rep.reality.point)),
        ("observation", obs),
        ("prebelief", _belief_text(rep.prebelief)),
        ("postbelief", _belief_text(rep.postbelief)),
        ("secret size eta", f"{f(rep.eta)} bits"),
        ("uncertainty before U", f"{f(rep.u_pre)} bits"),
        ("uncertainty after U'", f"{f(rep.u_post)} bits"),
        ("R   uncertainty reduction", f"{f(rep.r)} bits  range {_range(rep.range_r, False)}"),
        ("Q   accuracy gain (KL)", f"{f(rep.q)} bits  range {_range(rep.range_q, False)}"),
        ("Q'  accuracy gain (JS, normalized)", f"{f(rep.q_prime)}  range [-1, 1]"),
        ("Q'' refined accuracy gain", f"{f(rep.q_double_prime)} bits  range {_range(rep.range_q_double, False)}"),
        ("distance from reality before (refined)", f"{f(rep.pre_distance)} bits"),
        ("distance from reality after (refined)", f"{f(rep.post_distance)} bits"),
        ("distance from reality before (KL)", f"{f(rep.pre_distance_kl)} bits"),
        ("distance from reality after (KL)", f"{f(rep.post_distance_kl)} bits"),
        ("postbelief in true state from Q''", f(rep.post_at_reality)),
        ("correct-guess likelihood multiplier", f"x{f(rep.multiplier)}"),
        ("search effort after Q''", _search(rep.search, False)),
        ("search effort after Q", _search(rep.search_q, False)),
        ("R verdict", _verdict(rep.size_consistent_r)),
        ("Q verdict", _verdict(rep.size_consistent_q)),
        ("Q'' verdict", _verdict(rep.size_consistent_q_double)),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


# ---- commands ------------------------------------------------------------


def _load(path: str) -> tuple[Scenario, metrics.Experiment]:
    try:
        scenario = load_scenario(path)
    except OSError as exc:
        raise CLIError(f"cannot read scenario {path}: {exc.strerror or exc}", EXIT_FILE) from None
    except ScenarioError as exc:
        raise CLIError(f"{path}: {exc}", EXIT_SCENARIO) from None
    try:
        program = scenario.load_program()
    except OSError as exc:
        raise CLIError(f"cannot read program {scenario.program_path}: {exc.strerror or exc}",
                       EXIT_FILE) from None
    except ProgramError as exc:
        raise CLIError(f"{scenario.program_path}: {exc}", EXIT_PROGRAM) from None
    try:
        experiment = scenario.experiment(program)
    except ScenarioError as exc:
        raise CLIError(f"{path}: {exc}", EXIT_SCENARIO) from None
    return scenario, experiment


def cmd_analyze(path: str, machine: bool = False, enumerate_observations: bool = False) -> str:
    scenario, exp = _load(path)
    if enumerate_observations:
        cases = [(obs, p) for obs, p in metrics.observations(exp)]
    else:
        cases = [(scenario.observation, None)]
    reports = []
    for obs, p in cases:
        try:
            reports.append((p, metrics.analyze(exp, obs)))
        except ImpossibleObservation as exc:
            raise CLIError(str(exc), EXIT_IMPOSSIBLE) from None
    if machine:
        payload = []
        for p, rep in reports:
            d = report_dict(rep)
            if p is not None:
                d["observation_probability"] = str(p)
            payload.append(d)
        return json.dumps(payload if enumerate_observations else payload[0], indent=2) + "\n"
    chunks = []
    for p, rep in reports:
        head = "" if p is None else f"== observation with probability {p} under the true state\n"
        chunks.append(head + render_report(rep))
    return "\n".join(chunks)


def cmd_sweep(kind: str, steps: int) -> str:
    try:
        return to_csv(SweepConfig(kind, steps))
    except ValueError as exc:
        raise CLIError(str(exc), EXIT_USAGE) from None


def cmd_check(path: str, epsilon=None) -> str:
    scenario, exp = _load(path)
    if epsilon is None:
        epsilon = scenario.epsilon
    eta = exp.eta
    pre, r = exp.prebelief, exp.reality
    lines = [f"secret size eta: {eta:.4f} bits"]
    if eta > 0:
        ranges = [
            ("R", metrics.range_r(eta)),
            ("Q", metrics.range_q(pre, r)),
            ("Q''", metrics.range_q_double(pre, r, eta)),
        ]
        for name, rng in ranges:
            lines.append(f"{name}: {_verdict(metrics.size_consistent(rng, eta))} "
                         f"(range {_range(rng, False)})")
    else:
        lines.append("single-state secret: every flow is 0")
    if epsilon is None:
        lines.append("admissibility: not checked (no epsilon given)")
    else:
        try:
            ok = metrics.admissible(pre, epsilon)
        except ValueError as exc:
            raise CLIError(str(exc), EXIT_USAGE) from None
        bound = Fraction(epsilon) / len(pre)
        lines.append(f"admissibility (epsilon={epsilon}, min prebelief >= {bound}): "
                     f"{'admissible' if ok else 'NOT admissible'}")
    lines.append(f"prebelief uncertainty: {shannon_entropy(pre):.4f} bits")
    return "\n".join(lines) + "\n"


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qif", description="Belief-based quantitative information flow analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="report every flow metric for one scenario")
    a.add_argument("scenario")
    a.add_argument("--machine", action="store_true", help="JSON output at full precision")
    a.add_argument("--enumerate-observations", action="store_true",
                   help="report every observation the true high state can produce")

    s = sub.add_parser(
        "sweep",
        help="CSV curve data",
        description=(
            "disc: per-state discriminations with prebelief 1/2 and postbelief t in (0, 1]. "
            "div: D and D' from Bernoulli(t)=(t, 1-t) to the point mass on the first outcome. "
            "metric: Q and Q'' for prebelief 0.01 in the true password, eta=log2(3)."
        ),
    )
    s.add_argument("--kind", required=True, choices=KINDS)
    s.add_argument("--steps", required=True, type=int)

    c = sub.add_parser("check", help="size-consistency and admissibility verdicts")
    c.add_argument("scenario")
    c.add_argument("--epsilon", type=_fraction, help="admissibility factor (default: scenario's)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            out = cmd_analyze(args.scenario, args.machine, args.enumerate_observations)
        elif args.command == "sweep":
            out = cmd_sweep(args.kind, args.steps)
        else:
            out = cmd_check(args.scenario, args.epsilon)
    except CLIError as exc:
        print(f"qif: {exc}", file=sys.stderr)
        return exc.code
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
