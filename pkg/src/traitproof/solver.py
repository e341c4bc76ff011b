"""Proof-tree solver for trait obligations.

A goal is proved against every candidate clause whose head names the same
trait — hypotheses from the query first, then impls in source order. Nothing
is skipped and nothing backtracks away: a candidate whose head fails to
unify is still a recorded branch, and once a subgoal of a candidate fails,
its later siblings are still solved (under the substitution accumulated
before the failure) so the tree shows every broken bound at once. The result
is an alternating AND/OR tree: a goal's candidates form an alternative group
(one must hold), a candidate's where-clause subgoals are mandatory (all must
hold).

Five-valued results with combination lattices:

    AND (over subgoals):   Disproven > Cycle > Overflow > Ambiguous > Proven
    OR  (over candidates): any Proven -> Proven if the goal was ground or all
                           proven solutions agree on the goal's existential
                           variables, else Ambiguous;
                           otherwise Ambiguous > Overflow > Cycle > Disproven
    empty AND -> Proven, empty OR -> Disproven

Cycles are detected by renaming-equivalence against the in-flight goal stack
(with the current substitution applied to both sides); recursion deeper than
max_depth yields Overflow. Both are results, not exceptions — only blowing
the max_nodes budget aborts, discarding the partial tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .syntax import ImplDecl, QueryDecl, Span, bound_to_source
from .terms import (
    EMPTY_SUBSTITUTION,
    Bound,
    FreshSource,
    Substitution,
    UnifyFailure,
    bound_display,
    bound_is_ground,
    canonical_bound,
    instantiate_impl,
    skolemize_query,
    unify_bounds,
)
from .validate import ValidatedProgram

PROVEN = "yes"
DISPROVEN = "no"
AMBIGUOUS = "amb"
OVERFLOW = "ovf"
CYCLE = "cyc"

RESULT_KINDS = (PROVEN, DISPROVEN, AMBIGUOUS, OVERFLOW, CYCLE)


@dataclass(frozen=True)
class SolveResult:
    kind: str
    substitution: Substitution | None = None  # kind == "yes"
    solution_count: int = 0  # kind == "amb", always >= 2

    def __post_init__(self) -> None:
        assert self.kind in RESULT_KINDS
        assert self.kind != AMBIGUOUS or self.solution_count >= 2


def proven(sub: Substitution) -> SolveResult:
    return SolveResult(PROVEN, substitution=sub)


def ambiguous(count: int) -> SolveResult:
    return SolveResult(AMBIGUOUS, solution_count=count)


DISPROVEN_RESULT = SolveResult(DISPROVEN)
OVERFLOW_RESULT = SolveResult(OVERFLOW)
CYCLE_RESULT = SolveResult(CYCLE)


@dataclass
class SolverConfig:
    max_depth: int = 32
    max_nodes: int = 100_000

    def __post_init__(self) -> None:
        if self.max_depth < 1 or self.max_nodes < 1:
            raise ValueError("max_depth and max_nodes must be >= 1")


class BudgetExhausted(Exception):
    def __init__(self, max_nodes: int):
        self.max_nodes = max_nodes
        super().__init__(f"proof tree exceeded the {max_nodes}-node budget")


@dataclass
class GoalNode:
    node_id: int
    bound: Bound  # as resolved at entry
    depth: int
    provenance: Span
    result: SolveResult = DISPROVEN_RESULT
    candidates: list[int] = field(default_factory=list)
    overlap: bool = False  # >= 2 proven candidates agreed
    collapsed: int = 0  # descendants removed by pruning

    @property
    def display(self) -> str:
        return bound_display(self.bound)


@dataclass
class CandidateNode:
    node_id: int
    impl_id: int | None  # None for a query hypothesis
    hyp_index: int | None
    depth: int  # inherited from the owning goal
    provenance: Span  # impl head / hypothesis bound
    display: str  # declared head, source syntax
    result: SolveResult = DISPROVEN_RESULT
    unify_kind: str = "ok"
    unify_failure: UnifyFailure | None = None
    subgoals: list[int] = field(default_factory=list)
    solution: Bound | None = None  # goal under the composed solution, if proven
    collapsed: int = 0


@dataclass
class SummaryNode:
    """Stand-in for a pruned-away region; never produced by solving."""

    node_id: int
    display: str
    result_kind: str
    replaced: int


ProofNode = Union[GoalNode, CandidateNode, SummaryNode]


@dataclass
class ProofTree:
    root: int
    nodes: dict[int, ProofNode]
    config: SolverConfig
    query_span: Span
    prune_policy: str = "none"

    def goal(self, node_id: int) -> GoalNode:
        node = self.nodes[node_id]
        assert isinstance(node, GoalNode)
        return node

    def candidate(self, node_id: int) -> CandidateNode:
        node = self.nodes[node_id]
        assert isinstance(node, CandidateNode)
        return node

    def children(self, node_id: int) -> list[int]:
        node = self.nodes[node_id]
        if isinstance(node, GoalNode):
            return node.candidates
        if isinstance(node, CandidateNode):
            return node.subgoals
        return []

    def subtree_ids(self, node_id: int) -> list[int]:
        out = [node_id]
        for c in self.children(node_id):
            out.extend(self.subtree_ids(c))
        return out


@dataclass(frozen=True)
class CandidateSource:
    """One entry of an alternative group, before instantiation."""

    impl: ImplDecl | None = None
    hyp_index: int | None = None
    hyp_fact: Bound | None = None


def assemble_candidates(
    goal: Bound, program: ValidatedProgram, hypotheses: Sequence[Bound]
) -> list[CandidateSource]:
    """All clauses whose head names the goal's trait: hypotheses first (query
    order), then impls in source order. Head unification is NOT attempted
    here — failed unifications must stay visible as recorded branches."""
    out: list[CandidateSource] = []
    for i, h in enumerate(hypotheses):
        if h.trait == goal.trait and len(h.args) == len(goal.args):
            out.append(CandidateSource(hyp_index=i, hyp_fact=h))
    for im in program.impls:
        if im.head.trait.name == goal.trait and len(im.head.trait.args) == len(goal.args):
            out.append(CandidateSource(impl=im))
    return out


def combine_results(
    kind: str,
    children: Sequence[SolveResult],
    *,
    threaded: Substitution = EMPTY_SUBSTITUTION,
    goal: Bound | None = None,
) -> SolveResult:
    """Pure AND/OR combination; `threaded` feeds the proven AND substitution,
    `goal` (entry form) drives the OR ground/agreement decision."""
    if kind == "and":
        return _combine_and(children, threaded)
    if kind == "or":
        assert goal is not None
        result, _ = _combine_or(goal, children)
        return result
    raise ValueError(f"kind must be 'and' or 'or', got {kind!r}")


def _combine_and(children: Sequence[SolveResult], threaded: Substitution) -> SolveResult:
    for dominant in (DISPROVEN, CYCLE, OVERFLOW, AMBIGUOUS):
        for c in children:
            if c.kind == dominant:
                return c
    return proven(threaded)


def _combine_or(goal: Bound, children: Sequence[SolveResult]) -> tuple[SolveResult, bool]:
    """Returns (result, overlap). `goal` must be the entry-resolved bound."""
    proven_children = [c for c in children if c.kind == PROVEN]
    if proven_children:
        overlap = len(proven_children) >= 2
        if bound_is_ground(goal):
            return proven_children[0], overlap
        distinct: list[tuple] = []
        for c in proven_children:
            assert c.substitution is not None
            form = canonical_bound(c.substitution.apply_bound(goal))
            if form not in distinct:
                distinct.append(form)
        if len(distinct) == 1:
            return proven_children[0], overlap
        return ambiguous(len(distinct)), False
    for dominant in (AMBIGUOUS, OVERFLOW, CYCLE):
        for c in children:
            if c.kind == dominant:
                return c, False
    return DISPROVEN_RESULT, False


class _Session:
    def __init__(self, program: ValidatedProgram, hypotheses: Sequence[Bound], config: SolverConfig):
        self.program = program
        self.hypotheses = list(hypotheses)
        self.config = config
        self.fresh = FreshSource()
        self.nodes: dict[int, ProofNode] = {}
        self._next_id = 1
        self._budget = config.max_nodes

    def _register(self, node: ProofNode) -> None:
        self._budget -= 1
        if self._budget < 0:
            raise BudgetExhausted(self.config.max_nodes)
        self.nodes[node.node_id] = node

    def _new_id(self) -> int:
        nid = self._next_id
        self._next_id += 1
        return nid

    def solve_goal(
        self, bound: Bound, sub: Substitution, depth: int, stack: tuple[Bound, ...]
    ) -> GoalNode:
        entry = sub.apply_bound(bound)
        node = GoalNode(self._new_id(), entry, depth, bound.origin)
        self._register(node)

        entry_form = canonical_bound(entry)
        if any(
            prior.trait == entry.trait
            and canonical_bound(sub.apply_bound(prior)) == entry_form
            for prior in stack
        ):
            node.result = CYCLE_RESULT
            return node
        if depth >= self.config.max_depth:
            node.result = OVERFLOW_RESULT
            return node

        inner_stack = stack + (entry,)
        outcomes: list[SolveResult] = []
        for source in assemble_candidates(entry, self.program, self.hypotheses):
            cand = self.solve_candidate(source, entry, sub, depth, inner_stack)
            node.candidates.append(cand.node_id)
            outcomes.append(cand.result)
        node.result, node.overlap = _combine_or(entry, outcomes)
        return node

    def solve_candidate(
        self,
        source: CandidateSource,
        goal: Bound,
        sub: Substitution,
        depth: int,
        stack: tuple[Bound, ...],
    ) -> CandidateNode:
        if source.impl is not None:
            head, body = instantiate_impl(source.impl, self.fresh)
            cand = CandidateNode(
                self._new_id(),
                impl_id=source.impl.impl_id,
                hyp_index=None,
                depth=depth,
                provenance=source.impl.head.span,
                display=bound_to_source(source.impl.head),
            )
        else:
            assert source.hyp_fact is not None
            head, body = source.hyp_fact, ()
            cand = CandidateNode(
                self._new_id(),
                impl_id=None,
                hyp_index=source.hyp_index,
                depth=depth,
                provenance=source.hyp_fact.origin,
                display=bound_display(source.hyp_fact),
            )
        self._register(cand)

        unified = unify_bounds(goal, head, sub)
        if isinstance(unified, UnifyFailure):
            cand.unify_kind = unified.kind
            cand.unify_failure = unified
            cand.result = DISPROVEN_RESULT
            return cand

        current = unified
        outcomes: list[SolveResult] = []
        for subgoal in body:
            child = self.solve_goal(subgoal, current, depth + 1, stack)
            cand.subgoals.append(child.node_id)
            outcomes.append(child.result)
            if child.result.kind == PROVEN:
                assert child.result.substitution is not None
                current = child.result.substitution
        cand.result = _combine_and(outcomes, current)
        if cand.result.kind == PROVEN:
            cand.solution = current.apply_bound(goal)
        return cand


def solve_query(
    query: QueryDecl, program: ValidatedProgram, config: SolverConfig | None = None
) -> ProofTree:
    """Solve one query to a complete proof tree.

    Deterministic: identical inputs produce identical trees, node ids
    included. Raises BudgetExhausted past config.max_nodes.
    """
    config = config or SolverConfig()
    session = _Session(program, [], config)
    goal, hypotheses = skolemize_query(query, session.fresh)
    session.hypotheses = list(hypotheses)
    root = session.solve_goal(goal, EMPTY_SUBSTITUTION, 0, ())
    return ProofTree(root.node_id, session.nodes, config, query.span)


def verify_tree_consistency(tree: ProofTree) -> None:
    """Recompute every stored result bottom-up; raises AssertionError on the
    first mismatch. Only meaningful for unpruned solver output."""
    assert tree.prune_policy == "none"
    order = sorted(tree.nodes)
    assert order and tree.root == order[0]
    for nid in reversed(order):
        node = tree.nodes[nid]
        if isinstance(node, CandidateNode):
            if node.unify_kind != "ok":
                assert node.result.kind == DISPROVEN and not node.subgoals
                continue
            kinds = [tree.nodes[s].result for s in node.subgoals]  # type: ignore[union-attr]
            recombined = _combine_and(kinds, EMPTY_SUBSTITUTION)
            assert recombined.kind == node.result.kind
            if node.result.kind == AMBIGUOUS:
                assert recombined.solution_count == node.result.solution_count
            assert (node.solution is not None) == (node.result.kind == PROVEN)
        elif isinstance(node, GoalNode):
            if node.result.kind in (CYCLE, OVERFLOW) and not node.candidates:
                continue
            children = [tree.nodes[c] for c in node.candidates]
            outcomes = []
            for c in children:
                assert isinstance(c, CandidateNode)
                if c.result.kind == PROVEN:
                    assert c.solution is not None
                    outcomes.append(proven(_solution_as_sub(node.bound, c.solution)))
                else:
                    outcomes.append(c.result)
            result, overlap = _combine_or(node.bound, outcomes)
            assert result.kind == node.result.kind, (result.kind, node.result.kind, nid)
            if node.result.kind == AMBIGUOUS:
                assert result.solution_count == node.result.solution_count
            assert overlap == node.overlap
        for child in tree.children(nid):
            assert child > nid, "node ids must be topologically ordered"


def _solution_as_sub(goal: Bound, solution: Bound) -> Substitution:
    """Reconstruct a substitution binding the goal's variables so that the
    goal maps onto the stored candidate solution (consistency checks only)."""
    out = unify_bounds(goal, solution, EMPTY_SUBSTITUTION)
    assert isinstance(out, Substitution)
    return out
