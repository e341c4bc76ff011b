"""Proof-tree post-processing: pruning and fault localization.

Pruning shrinks a tree without changing the verdict at the root or the top
starting point. Localization ranks the true dead ends — Disproven goals whose
every candidate failed head unification (or that had no candidates at all) —
deepest first, then by the best candidate progress seen along the path from
the root, then by source order of the bound that introduced the goal.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from fractions import Fraction

from .solver import (
    CYCLE,
    DISPROVEN,
    OVERFLOW,
    PROVEN,
    CandidateNode,
    GoalNode,
    ProofTree,
    SummaryNode,
)
from .syntax import Span
from .terms import bound_display

PRUNE_NONE = "none"
PRUNE_SUCCESS_COLLAPSE = "success-collapse"
PRUNE_FAILED_PATH = "failed-path"
PRUNE_BEST_ALTERNATIVE = "best-alternative"

PRUNE_POLICIES = (PRUNE_NONE, PRUNE_SUCCESS_COLLAPSE, PRUNE_FAILED_PATH, PRUNE_BEST_ALTERNATIVE)


@dataclass(frozen=True)
class DiagnosisEntry:
    node_id: int
    rendered_bound: str
    depth: int
    progress: Fraction  # best candidate progress on the root path
    source_order: int  # 1-based ordinal of the provenance span among dead ends
    path: tuple[int, ...]  # root -> leaf, goals and candidates interleaved
    provenance: Span


def _result_kind(node) -> str:
    if isinstance(node, SummaryNode):
        return node.result_kind
    return node.result.kind


def candidate_progress(node: CandidateNode, tree: ProofTree) -> Fraction:
    """How far a candidate got: proven subgoals over total subgoals; 0 on a
    head-unification failure, 1 for a fact whose head unified."""
    if node.unify_kind != "ok":
        return Fraction(0)
    if not node.subgoals:
        return Fraction(1)
    done = sum(1 for s in node.subgoals if _result_kind(tree.nodes[s]) == PROVEN)
    return Fraction(done, len(node.subgoals))


def _is_dead_end(node: GoalNode, tree: ProofTree) -> bool:
    if node.result.kind != DISPROVEN:
        return False
    for c in node.candidates:
        child = tree.nodes[c]
        # a summary child means a unifying candidate was kept elsewhere in
        # the group, so this cannot be a true dead end
        if not isinstance(child, CandidateNode) or child.unify_kind == "ok":
            return False
    return True


def localize_roots(tree: ProofTree, k: int, *, include_limits: bool = False) -> list[DiagnosisEntry]:
    """Top-k starting points for debugging a failed tree.

    Empty when the root is Proven. Overflow/Cycle goals count as dead ends
    only when include_limits is set — they point at configuration or
    recursion problems, not unsatisfied bounds.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if tree.nodes[tree.root].result.kind == PROVEN:
        return []

    leaves: list[tuple[GoalNode, tuple[int, ...]]] = []

    def walk(nid: int, path: tuple[int, ...]) -> None:
        node = tree.nodes[nid]
        path = path + (nid,)
        if isinstance(node, GoalNode):
            # limit results propagate upward; only the leaf where the limit
            # actually fired is a starting point
            if _is_dead_end(node, tree) or (
                include_limits
                and node.result.kind in (OVERFLOW, CYCLE)
                and not node.candidates
            ):
                leaves.append((node, path))
        for c in tree.children(nid):
            walk(c, path)

    walk(tree.root, ())

    span_order = {
        span: i + 1
        for i, span in enumerate(
            sorted(
                {n.provenance for n, _ in leaves},
                key=lambda s: (s.file, s.line_start, s.col_start, s.line_end, s.col_end),
            )
        )
    }

    entries = []
    for node, path in leaves:
        best = Fraction(0)
        for nid in path:
            pn = tree.nodes[nid]
            if isinstance(pn, CandidateNode):
                best = max(best, candidate_progress(pn, tree))
        entries.append(
            DiagnosisEntry(
                node_id=node.node_id,
                rendered_bound=bound_display(node.bound),
                depth=node.depth,
                progress=best,
                source_order=span_order[node.provenance],
                path=path,
                provenance=node.provenance,
            )
        )
    entries.sort(key=lambda e: (-e.depth, -e.progress, e.source_order))
    return entries[:k]


# -- pruning ---------------------------------------------------------------


def prune_tree(tree: ProofTree, policy: str) -> ProofTree:
    """Apply a pruning policy; the root result never changes and the top-1
    diagnosis is always retained. Summary/context nodes record how many
    nodes they replaced."""
    if policy not in PRUNE_POLICIES:
        raise ValueError(f"unknown prune policy {policy!r}")
    if policy == PRUNE_NONE:
        return tree
    if policy == PRUNE_SUCCESS_COLLAPSE:
        return _collapse_proven(tree, contextual=False)
    if policy == PRUNE_FAILED_PATH:
        return _collapse_proven(tree, contextual=True)
    return _best_alternative(tree)


class _Pruner:
    def __init__(self, tree: ProofTree, policy: str):
        self.tree = tree
        self.policy = policy
        self.nodes: dict[int, object] = {}
        self._next_summary = max(tree.nodes) + 1

    def keep(self, nid: int, children: list[int]) -> int:
        node = copy.copy(self.tree.nodes[nid])
        if isinstance(node, GoalNode):
            node.candidates = children
        elif isinstance(node, CandidateNode):
            node.subgoals = children
        self.nodes[nid] = node
        return nid

    def keep_collapsed(self, nid: int) -> int:
        """FailedPath context node: the node itself stays, subtree folded."""
        node = copy.copy(self.tree.nodes[nid])
        removed = len(self.tree.subtree_ids(nid)) - 1
        if isinstance(node, GoalNode):
            node.candidates = []
            node.collapsed = removed
        elif isinstance(node, CandidateNode):
            node.subgoals = []
            node.collapsed = removed
        self.nodes[nid] = node
        return nid

    def summary(self, display: str, result_kind: str, replaced: int) -> int:
        nid = self._next_summary
        self._next_summary += 1
        self.nodes[nid] = SummaryNode(nid, display, result_kind, replaced)
        return nid

    def build(self) -> ProofTree:
        return ProofTree(
            self.tree.root,
            dict(sorted(self.nodes.items())),  # type: ignore[arg-type]
            self.tree.config,
            self.tree.query_span,
            prune_policy=self.policy,
        )


def _dead_end_bearing(tree: ProofTree) -> set[int]:
    """Ids of nodes whose subtree contains a dead-end goal. Those subtrees
    never collapse: a dead end (and the path to it) must survive pruning."""
    bearing: set[int] = set()

    def walk(nid: int) -> bool:
        node = tree.nodes[nid]
        found = isinstance(node, GoalNode) and _is_dead_end(node, tree)
        for c in tree.children(nid):
            found |= walk(c)
        if found:
            bearing.add(nid)
        return found

    walk(tree.root)
    return bearing


def _collapse_proven(tree: ProofTree, *, contextual: bool) -> ProofTree:
    policy = PRUNE_FAILED_PATH if contextual else PRUNE_SUCCESS_COLLAPSE
    pruner = _Pruner(tree, policy)
    bearing = _dead_end_bearing(tree)

    def walk(nid: int, is_root: bool) -> int:
        node = tree.nodes[nid]
        if not is_root and node.result.kind == PROVEN and nid not in bearing:  # type: ignore[union-attr]
            if contextual:
                return pruner.keep_collapsed(nid)
            return pruner.summary("Proven", PROVEN, len(tree.subtree_ids(nid)))
        children = [walk(c, False) for c in tree.children(nid)]
        return pruner.keep(nid, children)

    walk(tree.root, True)
    return pruner.build()


def _best_alternative(tree: ProofTree) -> ProofTree:
    pruner = _Pruner(tree, PRUNE_BEST_ALTERNATIVE)
    top = localize_roots(tree, 1)
    protected = set(top[0].path) if top else set()

    def walk(nid: int) -> int:
        node = tree.nodes[nid]
        if not isinstance(node, GoalNode) or len(node.candidates) < 2:
            children = [walk(c) for c in tree.children(nid)]
            return pruner.keep(nid, children)
        progresses = {c: candidate_progress(tree.candidate(c), tree) for c in node.candidates}
        best = max(progresses.values())
        kept = [c for c in node.candidates if progresses[c] == best or c in protected]
        dropped = [c for c in node.candidates if c not in kept]
        children = [walk(c) for c in kept]
        if dropped:
            replaced = sum(len(tree.subtree_ids(c)) for c in dropped)
            label = f"{len(dropped)} more alternative{'s' if len(dropped) > 1 else ''}"
            children.append(pruner.summary(label, DISPROVEN, replaced))
        return pruner.keep(nid, children)

    walk(tree.root)
    return pruner.build()
