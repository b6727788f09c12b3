"""Discrimination terms and divergences between beliefs, in bits.

Zero conventions: ``0 * log(0/q) = 0`` and ``p * log(p/0) = +inf`` for
``p > 0``.  Unbounded results are returned as ``math.inf`` / ``-math.inf``
on purpose, never through overflow.

Argument order follows the arrow notation ``D(b -> b2)``: the second
belief supplies the expectation weights.
"""

from __future__ import annotations

import math

from .belief import Belief, shannon_entropy

INF = math.inf


# ---- per-state discrimination on raw probabilities ---------------------


def kl_disc(p: float, p2: float) -> float:
    """log2(p2 / p), extended to the boundary."""
    p, p2 = float(p), float(p2)
    if p == 0 and p2 == 0:
        return 0.0
    if p == 0:
        return INF
    if p2 == 0:
        return -INF
    return math.log2(p2 / p)


def js_disc(p: float, p2: float) -> float:
    """log2(p2 / mean(p, p2)); at most 1 bit."""
    p, p2 = float(p), float(p2)
    if p2 == 0:
        return 0.0 if p == 0 else -INF
    return math.log2(2 * p2 / (p2 + p))


def alt_disc(p: float, p2: float) -> float:
    """log2((1 + p2) / (1 + p)); always within [-1, 1]."""
    return math.log2((1 + float(p2)) / (1 + float(p)))


# ---- belief-level wrappers -----------------------------------------------


def disc_kl(b: Belief, b2: Belief, state) -> float:
    return kl_disc(b[state], b2[state])


def disc_js(b: Belief, b2: Belief, state) -> float:
    return js_disc(b[state], b2[state])


def disc_alt(b: Belief, b2: Belief, state) -> float:
    return alt_disc(b[state], b2[state])


def _paired(b: Belief, b2: Belief):
    if b.states != b2.states:
        raise ValueError("beliefs are over different state domains")
    return [(float(p), float(q)) for p, q in zip(b.probs, b2.probs)]


def kl_divergence(b: Belief, b2: Belief) -> float:
    """Kullback-Leibler divergence ``sum b2 * log2(b2 / b)``."""
    total = 0.0
    for p, q in _paired(b, b2):
        if q == 0:
            continue
        if p == 0:
            return INF
        total += q * math.log2(q / p)
    return max(total, 0.0)


def js_asym_divergence(b: Belief, b2: Belief) -> float:
    """Asymmetric Jensen-Shannon divergence K: KL from the midpoint, in [0, 1]."""
    total = 0.0
    for p, q in _paired(b, b2):
        if q > 0:
            total += q * math.log2(2 * q / (q + p))
    return min(max(total, 0.0), 1.0)


def j_divergence(b: Belief, b2: Belief) -> float:
    """Symmetrized KL: ``sum (b2 - b) * log2(b2 / b)``."""
    total = 0.0
    for p, q in _paired(b, b2):
        if p == q:
            continue
        if p == 0 or q == 0:
            return INF
        total += (q - p) * math.log2(q / p)
    return max(total, 0.0)


def l_divergence(b: Belief, b2: Belief) -> float:
    """Symmetric Jensen-Shannon divergence ``2 S(mid) - S(b) - S(b2)``, in [0, 2]."""
    pairs = _paired(b, b2)
    mid = Belief(b.states, tuple((p + q) / 2 for p, q in pairs))
    value = 2 * shannon_entropy(mid) - shannon_entropy(b) - shannon_entropy(b2)
    return min(max(value, 0.0), 2.0)
