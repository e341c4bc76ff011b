"""Trait-constraint solver with complete proof trees.

Pipeline: parse a `.tdl` program, validate it, solve each query into a proof
tree that records every candidate impl (failed head unifications included),
rank the unsatisfied bounds that make good debugging starting points, then
render the tree as text or serialize it to the version-1 interchange JSON
consumed by the bundled viewer.
"""

from .analysis import (
    PRUNE_POLICIES,
    DiagnosisEntry,
    candidate_progress,
    localize_roots,
    prune_tree,
)
from .export import FormatError, TreeDocument, build_document, export_json, import_json
from .parser import ParseError, parse_program
from .render import RenderOptions, render_ascii, render_diagnosis
from .solver import (
    BudgetExhausted,
    CandidateNode,
    GoalNode,
    ProofTree,
    SolverConfig,
    SolveResult,
    SummaryNode,
    assemble_candidates,
    combine_results,
    solve_query,
    verify_tree_consistency,
)
from .terms import (
    Bound,
    Ctor,
    FreshSource,
    Skolem,
    Substitution,
    Term,
    UnifyFailure,
    Var,
    instantiate_impl,
    skolemize_query,
    unify,
)
from .validate import ProgramInvalid, ValidatedProgram, ValidationError, validate_program

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "Bound",
    "CandidateNode",
    "Ctor",
    "DiagnosisEntry",
    "FormatError",
    "FreshSource",
    "GoalNode",
    "ParseError",
    "ProgramInvalid",
    "ProofTree",
    "PRUNE_POLICIES",
    "RenderOptions",
    "Skolem",
    "SolveResult",
    "SolverConfig",
    "Substitution",
    "SummaryNode",
    "Term",
    "TreeDocument",
    "UnifyFailure",
    "ValidatedProgram",
    "ValidationError",
    "Var",
    "assemble_candidates",
    "build_document",
    "candidate_progress",
    "combine_results",
    "export_json",
    "import_json",
    "instantiate_impl",
    "localize_roots",
    "parse_program",
    "prune_tree",
    "render_ascii",
    "render_diagnosis",
    "skolemize_query",
    "solve_query",
    "unify",
    "validate_program",
    "verify_tree_consistency",
]
