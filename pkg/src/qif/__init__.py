"""Belief-based quantitative information flow for tiny probabilistic programs."""

from .belief import (Belief, ImpossibleObservation, Reality, belief_in_reality, joint_domain,
                     point_mass, revise_belief, shannon_entropy)
from .divergence import (disc_alt, disc_js, disc_kl, j_divergence, js_asym_divergence,
                         kl_divergence, l_divergence)
from .dsl import Program, ProgramError, eta, parse_program, pretty_print
from .metrics import (Experiment, FlowRange, FlowReport, SearchEffort, UndefinedFlow, admissible,
                      analyze, metric_q, metric_q_double, metric_q_prime, metric_r, multiplier,
                      range_q, range_q_double, run_experiment, search_effort, size_consistent)
from .semantics import Distribution, State, observe, run

__all__ = [
    "Belief", "Distribution", "Experiment", "FlowRange", "FlowReport", "ImpossibleObservation",
    "Program", "ProgramError", "Reality", "SearchEffort", "State", "UndefinedFlow", "admissible",
    "analyze", "belief_in_reality", "disc_alt", "disc_js", "disc_kl", "eta", "j_divergence",
    "joint_domain", "js_asym_divergence", "kl_divergence", "l_divergence", "metric_q",
    "metric_q_double", "metric_q_prime", "metric_r", "multiplier", "observe", "parse_program",
    "point_mass", "pretty_print", "range_q", "range_q_double", "revise_belief", "run",
    "run_experiment", "search_effort", "shannon_entropy", "size_consistent",
]
