"""Coherent conditional probabilities from imprecise assessments, in exact arithmetic."""

from .coherence import (
    Assessment,
    Bounds,
    NotGCoherentError,
    build_system,
    check_g_coherence,
    compute_zero_set,
    correct_assessment,
    normalize_assessment,
    propagate_bounds,
    select_precise,
)
from .construction import (
    ConditionalProbabilityTable,
    Stage,
    build_stage,
    extend_stage,
    merge,
    query,
    synthesize,
    zero_layer_sequence,
)
from .events import (
    ConditionalEvent,
    Event,
    build_constituents,
    constituents_of,
    evaluate,
    event,
    extension,
    parent_constituent,
    parse_event,
)
from .lp import LinearProgram, optimize, solve_feasibility
from .verify import VerificationReport, verify_table

__version__ = "0.1.0"

__all__ = [
    "Assessment",
    "Bounds",
    "NotGCoherentError",
    "build_system",
    "check_g_coherence",
    "compute_zero_set",
    "correct_assessment",
    "normalize_assessment",
    "propagate_bounds",
    "select_precise",
    "ConditionalProbabilityTable",
    "Stage",
    "build_stage",
    "extend_stage",
    "merge",
    "query",
    "synthesize",
    "zero_layer_sequence",
    "ConditionalEvent",
    "Event",
    "build_constituents",
    "constituents_of",
    "evaluate",
    "event",
    "extension",
    "parent_constituent",
    "parse_event",
    "LinearProgram",
    "optimize",
    "solve_feasibility",
    "VerificationReport",
    "verify_table",
]
