"""Exact solvers for restricted max-min fair allocation.

Players desire subsets of positively valued resources; the goal is an
assignment maximizing the least bundle value.  The package computes the
exact optimum of the configuration relaxation, runs a local search that
matches every player at a guaranteed fraction (6/23) of that optimum, and,
when a search at an over-ambitious threshold gets stuck, builds and audits
a dual witness proving the threshold unattainable.  All arithmetic is over
exact rationals.
"""

from .certificate import (
    ALPHA,
    BETA,
    AuditError,
    CertificateError,
    StuckAudit,
    audit_stuck_state,
    build_certificate,
    check_claim_feasibility,
    check_claim_negativity,
)
from .configlp import (
    Configuration,
    Counters,
    DualWitness,
    FeasibilityResult,
    WitnessCheck,
    enumerate_minimal_configs,
    feasible_at,
    opt_star,
    price_configuration,
    verify_unbounded_dual,
)
from .generator import GeneratorSpec, generate_instance
from .lp import LpOutcome, LpProblem, check_solution, solve_lp
from .model import (
    Allocation,
    GuardExceeded,
    Instance,
    ModelError,
    allocation_value,
    bundle_value,
    fingerprint,
    format_instance,
    format_rational,
    parse_instance,
    parse_rational,
    validate_allocation,
)
from .oracle import GapReport, brute_force_opt, brute_force_opt_star, integrality_gap
from .search import (
    Hyperedge,
    SearchState,
    SolveResult,
    Stuck,
    extend_matching,
    find_addable_edge,
    minimize_edge,
    signature,
    solve,
)

__all__ = [
    "ALPHA",
    "BETA",
    "Allocation",
    "AuditError",
    "CertificateError",
    "Configuration",
    "Counters",
    "DualWitness",
    "FeasibilityResult",
    "GapReport",
    "GeneratorSpec",
    "GuardExceeded",
    "Hyperedge",
    "Instance",
    "LpOutcome",
    "LpProblem",
    "ModelError",
    "SearchState",
    "SolveResult",
    "Stuck",
    "StuckAudit",
    "WitnessCheck",
    "allocation_value",
    "audit_stuck_state",
    "brute_force_opt",
    "brute_force_opt_star",
    "build_certificate",
    "bundle_value",
    "check_claim_feasibility",
    "check_claim_negativity",
    "check_solution",
    "enumerate_minimal_configs",
    "extend_matching",
    "feasible_at",
    "find_addable_edge",
    "fingerprint",
    "format_instance",
    "format_rational",
    "generate_instance",
    "integrality_gap",
    "minimize_edge",
    "opt_star",
    "parse_instance",
    "parse_rational",
    "price_configuration",
    "signature",
    "solve",
    "solve_lp",
    "validate_allocation",
    "verify_unbounded_dual",
]
