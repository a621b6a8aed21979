"""Degree-greedy matchings and independent sets in random regular hypergraphs.

Two routes to the same constants: simulate the processes on the pairing model
(:mod:`.pairing`) or integrate the phase-blended rate equations (:mod:`.ode`).
"""
from .errors import (
    AttemptsExhausted, BudgetExhausted, ConsistencyError, DegenerateBlend, DegenerateState,
    HypergreedyError, InvalidParameters, InvariantViolation, ParseError, ProcessTerminated,
    StepFailure,
)
from .hypergraph import (
    ACYCLIC, Hypergraph, IncidenceGraph, decode, dual, encode, fano_plane,
    generate_configuration, generate_simple, girth, incidence_graph, is_simple,
)
from .ode import (
    CORRECTED, PAPER_LITERAL, PhaseOutcome, RateConfig, SolveResult, StateVec,
    blended_derivative, integrate_phase, moments, phase_coefficients, rate_independent,
    rate_matching, solve,
)
from .oracle import ExactResult, exact_max_independent, exact_max_matching, greedy_mean
from .pairing import (
    INDEPENDENT, MATCHING, PairingState, ReplicateSummary, SimResult, StepReport,
    init_pairing_state, replicate, run_process, simulate, step_independent, step_matching,
)
from .reference import run_reference

__version__ = "0.1.0"
