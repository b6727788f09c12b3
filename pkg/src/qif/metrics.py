"""Flow metrics for a single experiment.

Four quantities are computed from a prebelief, a postbelief and the true
high state:

* ``R``   entropy reduction, blind to which state is true;
* ``Q``   belief-accuracy gain, ``log2 post(true) - log2 pre(true)``;
* ``Q'``  the same gain measured with ``log2(1 + .)``, in [-1, 1];
* ``Q''`` ``eta * Q'``, bounded by the secret size ``eta`` in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from . import dsl
from .belief import (Belief, HighState, Prob, Reality, belief_in_reality, joint_domain,
                     observation_distribution, revise_belief, shannon_entropy)
from .dsl import Program
from .semantics import State, observable_vars

INF = math.inf

SEARCH_UNDEFINED = (
    "flow exceeds the secret size; the residual secret and the exhaustive "
    "search space cannot be established"
)


class UndefinedFlow(ValueError):
    """Q has no value: the true state has zero prebelief and zero postbelief."""


@dataclass(frozen=True)
class Experiment:
    program: Program
    prebelief: Belief
    reality: Reality
    low_input: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        domain = joint_domain(self.program)
        if self.reality.point not in domain:
            raise ValueError(f"reality {self.reality.point} is outside the high domain")
        stray = set(self.prebelief.states) - set(domain)
        if stray:
            raise ValueError(f"prebelief mentions states outside the high domain: {sorted(stray)}")
        if self.reality.point not in self.prebelief.states:
            raise ValueError("prebelief does not list the true high state")
        missing = [d.name for d in self.program.low if d.name not in self.low_input]
        if missing:
            raise ValueError(f"low input does not assign {', '.join(missing)}")
        for name, value in self.low_input.items():
            decl = self.program.variables.get(name)
            if decl is None or decl.cls != dsl.LOW:
                raise ValueError(f"{name!r} is not a low variable")
            if value not in decl.domain:
                raise ValueError(f"{name}={value} is outside the domain of {name}")

    @property
    def eta(self) -> float:
        return dsl.eta(self.program)


@dataclass(frozen=True)
class FlowRange:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


@dataclass(frozen=True)
class SearchEffort:
    """Residual secret bits after ``k`` bits of flow and the search space they imply.

    ``residual_bits`` and ``space`` are ``None`` when the flow exceeds the
    secret size; ``diagnostic`` then says why.
    """

    residual_bits: Optional[float]
    space: Optional[float]
    diagnostic: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.residual_bits is not None


@dataclass(frozen=True)
class FlowReport:
    eta: float
    prebelief: Belief
    postbelief: Belief
    reality: Reality
    observation: State
    u_pre: float
    u_post: float
    r: float
    q: Optional[float]  # None when undefined
    q_prime: float
    q_double_prime: float
    range_r: FlowRange
    range_q: FlowRange
    range_q_double: FlowRange
    pre_distance: float
    post_distance: float
    pre_distance_kl: float
    post_distance_kl: float
    post_at_reality: float
    multiplier: float
    search: SearchEffort
    search_q: SearchEffort
    size_consistent_r: bool
    size_consistent_q: bool
    size_consistent_q_double: bool


def _check_eta(eta: float) -> float:
    if not eta > 0:
        raise ValueError(f"secret size must be positive, got {eta}")
    return float(eta)


def _check_domains(pre: Belief, post: Belief) -> None:
    if pre.states != post.states:
        raise ValueError("prebelief and postbelief are over different state domains")


# ---- experiment ----------------------------------------------------------


def observations(e: Experiment) -> list[tuple[State, Fraction]]:
    """Every observation the true high state can produce, with its probability.

    Ordered by the declaration order of the observable variables' domains.
    """
    names = observable_vars(e.program)
    dist = observation_distribution(e.program, e.reality.point, e.low_input, names)
    decls = [e.program.variables[n] for n in names]

    def rank(s: State):
        return tuple(d.domain.index(s[d.name]) for d in decls)

    return sorted(dist.items(), key=lambda item: rank(item[0]))


def run_experiment(e: Experiment, observation: Mapping[str, str] | None = None
                   ) -> tuple[Belief, State]:
    """Revise the prebelief against one observation.

    Without an explicit observation the most probable one under the true
    high state is used, ties going to the earliest in domain order.
    """
    if observation is None:
        best, best_p = None, Fraction(-1)
        for obs, p in observations(e):
            if p > best_p:
                best, best_p = obs, p
        observation = best
    observation = State(observation)
    post = revise_belief(e.prebelief, e.program, e.low_input, observation)
    return post, observation


# ---- metrics -------------------------------------------------------------


def metric_r(pre: Belief, post: Belief) -> float:
    _check_domains(pre, post)
    return shannon_entropy(pre) - shannon_entropy(post)


def _at(b: Belief, r: Reality) -> float:
    return float(belief_in_reality(b, r))


def metric_q(pre: Belief, post: Belief, r: Reality) -> float:
    _check_domains(pre, post)
    return q_from_scalars(_at(pre, r), _at(post, r))


def q_from_scalars(pre: Prob, post: Prob) -> float:
    pre, post = float(pre), float(post)
    if pre == 0 and post == 0:
        raise UndefinedFlow("Q is undefined when the true state has zero pre- and postbelief")
    if pre == 0:
        return INF
    if post == 0:
        return -INF
    return math.log2(post) - math.log2(pre)


def metric_q_prime(pre: Belief, post: Belief, r: Reality) -> float:
    _check_domains(pre, post)
    return q_prime_from_scalars(_at(pre, r), _at(post, r))


def q_prime_from_scalars(pre: Prob, post: Prob) -> float:
    return math.log2(1 + float(post)) - math.log2(1 + float(pre))


def metric_q_double(pre: Belief, post: Belief, r: Reality, eta: float) -> float:
    eta = _check_eta(eta)
    return eta * metric_q_prime(pre, post, r)


def q_double_from_scalars(pre: Prob, post: Prob, eta: float) -> float:
    return _check_eta(eta) * q_prime_from_scalars(pre, post)


# ---- ranges --------------------------------------------------------------


def range_r(eta: float) -> FlowRange:
    eta = _check_eta(eta)
    return FlowRange(-eta, eta)


def range_q(pre: Belief, r: Reality) -> FlowRange:
    p = _at(pre, r)
    return FlowRange(-INF, INF if p == 0 else -math.log2(p))


def range_q_prime() -> FlowRange:
    return FlowRange(-1.0, 1.0)


def range_q_double(pre: Belief, r: Reality, eta: float) -> FlowRange:
    return range_q_double_at(_at(pre, r), eta)


def range_q_double_at(pre_at_reality: Prob, eta: float) -> FlowRange:
    eta = _check_eta(eta)
    shift = math.log2(1 + float(pre_at_reality))
    return FlowRange(-eta * shift, eta * (1 - shift))


def size_consistent(rng: FlowRange, eta: float) -> bool:
    eta = _check_eta(eta)
    return rng.hi <= eta and rng.lo >= -eta


def distance_from_reality(b_at_reality: Prob, eta: float) -> float:
    """Refined distance ``eta * (1 - log2(1 + b(true)))`` from the true state."""
    return _check_eta(eta) * (1 - math.log2(1 + float(b_at_reality)))


# ---- interpretation ------------------------------------------------------


def multiplier(q_double: float, eta: float, pre_at_reality: Prob,
               tol: float = 1e-12) -> tuple[float, float]:
    """Invert ``Q''``: the postbelief in the true state after ``q_double`` bits.

    Returns ``(post_at_reality, fold_increase)`` where ``fold_increase`` is
    ``post / pre`` (``inf`` from a zero prebelief, 1 when nothing moved).
    """
    eta = _check_eta(eta)
    pre = float(pre_at_reality)
    if not 0 <= pre <= 1:
        raise ValueError(f"prebelief {pre} is not a probability")
    scale = 2.0 ** (q_double / eta)
    post = scale * pre + scale - 1
    if not -tol <= post <= 1 + tol:
        rng = range_q_double_at(pre, eta)
        raise ValueError(
            f"flow {q_double} bits lies outside [{rng.lo}, {rng.hi}] for prebelief {pre}"
        )
    post = min(max(post, 0.0), 1.0)
    return post, _fold(pre, post)


def _fold(pre: float, post: float) -> float:
    if pre == 0:
        return INF if post > 0 else 1.0
    return post / pre


def search_effort(eta: float, k: float) -> SearchEffort:
    """Remaining exhaustive-search work after ``k`` bits of flow."""
    if k > eta:
        return SearchEffort(None, None, SEARCH_UNDEFINED)
    residual = eta - k
    return SearchEffort(residual, 2.0 ** residual)


def admissible(pre: Belief, epsilon) -> bool:
    """Whether every state keeps at least ``epsilon / |states|`` prebelief.

    Float ``epsilon`` is read through its decimal repr, so ``0.03`` means
    3/100 exactly.
    """
    eps = _exact(epsilon)
    if not eps > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    bound = eps / len(pre)
    return min(_exact(p, decimal=False) for p in pre.probs) >= bound


def _exact(x, decimal: bool = True) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x)) if decimal else Fraction(x)
    return Fraction(x)


# ---- bundle --------------------------------------------------------------


def analyze(e: Experiment, observation: Mapping[str, str] | None = None) -> FlowReport:
    post, obs = run_experiment(e, observation)
    pre = e.prebelief
    r = e.reality
    eta = e.eta
    pre_t, post_t = _at(pre, r), _at(post, r)

    try:
        q = q_from_scalars(pre_t, post_t)
    except UndefinedFlow:
        q = None
    q_double = q_double_from_scalars(pre_t, post_t, eta) if eta > 0 else 0.0
    rq = range_q(pre, r)
    # a single-state secret has eta = 0; every refined quantity collapses to 0
    if eta > 0:
        rqq = range_q_double_at(pre_t, eta)
        rr = range_r(eta)
        post_check, _ = multiplier(q_double, eta, pre_t)
        pre_d, post_d = distance_from_reality(pre_t, eta), distance_from_reality(post_t, eta)
    else:
        rqq = rr = FlowRange(0.0, 0.0)
        post_check = post_t
        pre_d = post_d = 0.0
    fold = _fold(pre_t, post_t)
    return FlowReport(
        eta=eta,
        prebelief=pre,
        postbelief=post,
        reality=r,
        observation=obs,
        u_pre=shannon_entropy(pre),
        u_post=shannon_entropy(post),
        r=metric_r(pre, post),
        q=q,
        q_prime=q_prime_from_scalars(pre_t, post_t),
        q_double_prime=q_double,
        range_r=rr,
        range_q=rq,
        range_q_double=rqq,
        pre_distance=pre_d,
        post_distance=post_d,
        pre_distance_kl=INF if pre_t == 0 else -math.log2(pre_t),
        post_distance_kl=INF if post_t == 0 else -math.log2(post_t),
        post_at_reality=post_check,
        multiplier=fold,
        search=search_effort(eta, q_double),
        search_q=search_effort(eta, q) if q is not None else SearchEffort(None, None, "Q is undefined"),
        size_consistent_r=rr.lo >= -eta and rr.hi <= eta,
        size_consistent_q=rq.lo >= -eta and rq.hi <= eta,
        size_consistent_q_double=rqq.lo >= -eta and rqq.hi <= eta,
    )

