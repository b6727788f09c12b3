"""Curve data comparing the original and refined constructs.

* ``disc``   per-state discrimination with the prebelief fixed at
  ``config.fixed_pre`` and the postbelief ``t`` on ``i/steps``, i = 1..steps;
* ``div``    ``D`` and ``D'`` from Bernoulli(t) = (t, 1 - t) to the point
  mass on the first outcome, ``t`` on ``i/(steps-1)``;
* ``metric`` ``Q`` and ``Q''`` for the password-checker prebelief in the
  true password (``config.pre_at_reality``) as the postbelief runs over
  ``i/(steps-1)``, alongside the +/- eta bounds.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from .belief import Belief
from .divergence import alt_disc, js_asym_divergence, js_disc, kl_disc, kl_divergence
from .metrics import q_double_from_scalars, q_from_scalars

KINDS = ("disc", "div", "metric")


@dataclass(frozen=True)
class SweepConfig:
    kind: str
    steps: int
    fixed_pre: Fraction = Fraction(1, 2)
    pre_at_reality: Fraction = Fraction(1, 100)
    eta: float = math.log2(3)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.steps < 2:
            raise ValueError("steps must be at least 2")


def _fmt(x: float | Fraction) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def rows(cfg: SweepConfig) -> tuple[list[str], list[list]]:
    if cfg.kind == "disc":
        header = ["t", "I_Dis", "I_Dis_half", "I'_Dis", "I''_Dis"]
        out = []
        for i in range(1, cfg.steps + 1):
            t = Fraction(i, cfg.steps)
            kl = kl_disc(cfg.fixed_pre, t)
            out.append([t, kl, kl / 2, js_disc(cfg.fixed_pre, t), alt_disc(cfg.fixed_pre, t)])
        return header, out
    if cfg.kind == "div":
        header = ["t", "D", "D'"]
        target = Belief.from_probs((Fraction(1), Fraction(0)))
        out = []
        for i in range(cfg.steps):
            t = Fraction(i, cfg.steps - 1)
            b = Belief.from_probs((t, 1 - t))
            out.append([t, kl_divergence(b, target), js_asym_divergence(b, target)])
        return header, out
    header = ["post", "Q", "Q''", "+eta", "-eta"]
    out = []
    for i in range(cfg.steps):
        post = Fraction(i, cfg.steps - 1)
        out.append([
            post,
            q_from_scalars(cfg.pre_at_reality, post),
            q_double_from_scalars(cfg.pre_at_reality, post, cfg.eta),
            cfg.eta,
            -cfg.eta,
        ])
    return header, out


def to_csv(cfg: SweepConfig) -> str:
    header, data = rows(cfg)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in data:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()
