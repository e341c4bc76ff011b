"""Interchange format (version 1) for proof trees and diagnoses.

One self-contained JSON document per solved query. The program text is
referenced by path plus content hash, never embedded. Node labels carry both
a pre-rendered display string and the structured term, so a viewer needs no
pretty-printer while tests can still check structure. Export is
deterministic down to the byte; import validates the structural invariants
and rejects forward versions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

from .analysis import DiagnosisEntry
from .solver import (
    CandidateNode,
    GoalNode,
    ProofTree,
    SolveResult,
    SolverConfig,
    SummaryNode,
    ambiguous,
    proven,
)
from .syntax import Span
from .terms import EMPTY_SUBSTITUTION, Bound, Ctor, Skolem, Term, Var

FORMAT_VERSION = 1

UNKNOWN_VERSION = "UnknownVersion"
MISSING_FIELD = "MissingField"
DANGLING_NODE_ID = "DanglingNodeId"
CYCLE_DETECTED = "CycleDetected"


class FormatError(Exception):
    def __init__(self, kind: str, detail: str):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}")


@dataclass
class TreeDocument:
    tree: ProofTree
    diagnosis: list[DiagnosisEntry]
    program_file: str
    program_hash: str
    query_index: int  # 0-based position of the query in the program


def hash_program(source_bytes: bytes) -> str:
    return hashlib.sha256(source_bytes).hexdigest()


def build_document(
    tree: ProofTree,
    diagnosis: list[DiagnosisEntry],
    program_file: str,
    source_bytes: bytes,
    query_index: int,
) -> TreeDocument:
    return TreeDocument(tree, diagnosis, program_file, hash_program(source_bytes), query_index)


# -- export ----------------------------------------------------------------


def export_json(document: TreeDocument) -> bytes:
    tree = document.tree
    doc = {
        "format_version": FORMAT_VERSION,
        "program_file": document.program_file,
        "program_hash": document.program_hash,
        "query_index": document.query_index,
        "config": {"max_depth": tree.config.max_depth, "max_nodes": tree.config.max_nodes},
        "prune_policy": tree.prune_policy,
        "query_span": _span_json(tree.query_span),
        "root": tree.root,
        "nodes": [_node_json(tree.nodes[nid]) for nid in sorted(tree.nodes)],
        "diagnosis": _diagnosis_json(document.diagnosis, tree),
    }
    return (json.dumps(doc, indent=1, ensure_ascii=True) + "\n").encode("ascii")


def _span_json(span: Span) -> dict:
    return {
        "file": span.file,
        "line_start": span.line_start,
        "col_start": span.col_start,
        "line_end": span.line_end,
        "col_end": span.col_end,
    }


def _term_json(t: Term) -> dict:
    if isinstance(t, Var):
        return {"var": t.vid, "hint": t.hint}
    if isinstance(t, Skolem):
        return {"skolem": t.sid, "name": t.name}
    return {"ctor": t.name, "args": [_term_json(a) for a in t.args]}


def _bound_json(b: Bound) -> dict:
    return {
        "subject": _term_json(b.subject),
        "trait": b.trait,
        "args": [_term_json(a) for a in b.args],
    }


def _node_json(node) -> dict:
    if isinstance(node, GoalNode):
        out = {
            "id": node.node_id,
            "kind": "goal",
            "display": node.display,
            "result": node.result.kind,
            "depth": node.depth,
            "children": list(node.candidates),
            "span": _span_json(node.provenance),
            "bound": _bound_json(node.bound),
        }
        if node.overlap:
            out["overlap"] = True
        if node.collapsed:
            out["collapsed"] = node.collapsed
        return out
    if isinstance(node, CandidateNode):
        solution = None
        if node.solution is not None:
            from .terms import bound_display

            solution = {"display": bound_display(node.solution), "bound": _bound_json(node.solution)}
        out = {
            "id": node.node_id,
            "kind": "candidate",
            "impl_id": node.impl_id,
            "result": node.result.kind,
            "unify": node.unify_kind,
            "children": list(node.subgoals),
            "span": _span_json(node.provenance),
            "display": node.display,
            "solution": solution,
        }
        if node.hyp_index is not None:
            out["hypothesis"] = node.hyp_index
        if node.collapsed:
            out["collapsed"] = node.collapsed
        return out
    assert isinstance(node, SummaryNode)
    return {
        "id": node.node_id,
        "kind": "summary",
        "display": node.display,
        "result": node.result_kind,
        "replaced": node.replaced,
        "children": [],
    }


def _diagnosis_json(diagnosis: list[DiagnosisEntry], tree: ProofTree) -> list[dict]:
    # entries whose path was pruned away cannot be represented; the top-1
    # survives every policy by construction
    kept = [e for e in diagnosis if all(nid in tree.nodes for nid in e.path)]
    return [
        {
            "rank": rank,
            "node": e.node_id,
            "rendered_bound": e.rendered_bound,
            "score": {
                "depth": e.depth,
                "progress": f"{e.progress.numerator}/{e.progress.denominator}",
                "source_order": e.source_order,
            },
            "path": list(e.path),
            "span": _span_json(e.provenance),
        }
        for rank, e in enumerate(kept, start=1)
    ]


# -- import ----------------------------------------------------------------


def import_json(data: bytes) -> TreeDocument:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise FormatError(MISSING_FIELD, f"not a JSON document: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError(MISSING_FIELD, "top level must be an object")
    version = _need(doc, "format_version")
    if version != FORMAT_VERSION:
        raise FormatError(UNKNOWN_VERSION, f"unsupported format_version {version!r}")

    config = _need(doc, "config")
    tree = ProofTree(
        root=_need(doc, "root"),
        nodes={},
        config=SolverConfig(_need(config, "max_depth"), _need(config, "max_nodes")),
        query_span=_span_from(_need(doc, "query_span")),
        prune_policy=_need(doc, "prune_policy"),
    )
    for raw in _need(doc, "nodes"):
        node = _node_from(raw)
        if node.node_id in tree.nodes:
            raise FormatError(DANGLING_NODE_ID, f"duplicate node id {node.node_id}")
        tree.nodes[node.node_id] = node
    _check_structure(tree)

    diagnosis = [_entry_from(raw, tree) for raw in _need(doc, "diagnosis")]
    return TreeDocument(
        tree,
        diagnosis,
        program_file=_need(doc, "program_file"),
        program_hash=_need(doc, "program_hash"),
        query_index=_need(doc, "query_index"),
    )


def _need(obj: dict, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(MISSING_FIELD, f"missing field {key!r}")
    return obj[key]


def _span_from(raw: dict) -> Span:
    return Span(
        _need(raw, "file"),
        _need(raw, "line_start"),
        _need(raw, "col_start"),
        _need(raw, "line_end"),
        _need(raw, "col_end"),
    )


def _term_from(raw: dict) -> Term:
    if "var" in raw:
        return Var(raw["var"], _need(raw, "hint"))
    if "skolem" in raw:
        return Skolem(raw["skolem"], _need(raw, "name"))
    return Ctor(_need(raw, "ctor"), tuple(_term_from(a) for a in _need(raw, "args")))


def _bound_from(raw: dict, origin: Span) -> Bound:
    return Bound(
        _term_from(_need(raw, "subject")),
        _need(raw, "trait"),
        tuple(_term_from(a) for a in _need(raw, "args")),
        origin,
    )


def _result_from(kind: str) -> SolveResult:
    if kind == "yes":
        return proven(EMPTY_SUBSTITUTION)
    if kind == "amb":
        return ambiguous(2)
    if kind in ("no", "ovf", "cyc"):
        return SolveResult(kind)
    raise FormatError(MISSING_FIELD, f"unknown result kind {kind!r}")


def _node_from(raw: dict):
    kind = _need(raw, "kind")
    if kind == "goal":
        span = _span_from(_need(raw, "span"))
        _need(raw, "display")  # schema-required even though derivable
        return GoalNode(
            node_id=_need(raw, "id"),
            bound=_bound_from(_need(raw, "bound"), span),
            depth=_need(raw, "depth"),
            provenance=span,
            result=_result_from(_need(raw, "result")),
            candidates=list(_need(raw, "children")),
            overlap=raw.get("overlap", False),
            collapsed=raw.get("collapsed", 0),
        )
    if kind == "candidate":
        span = _span_from(_need(raw, "span"))
        raw_solution = _need(raw, "solution")
        solution = None
        if raw_solution is not None:
            solution = _bound_from(_need(raw_solution, "bound"), span)
        return CandidateNode(
            node_id=_need(raw, "id"),
            impl_id=_need(raw, "impl_id"),
            hyp_index=raw.get("hypothesis"),
            depth=0,  # recomputed below from the owning goal
            provenance=span,
            display=_need(raw, "display"),
            result=_result_from(_need(raw, "result")),
            unify_kind=_need(raw, "unify"),
            subgoals=list(_need(raw, "children")),
            solution=solution,
            collapsed=raw.get("collapsed", 0),
        )
    if kind == "summary":
        return SummaryNode(
            node_id=_need(raw, "id"),
            display=_need(raw, "display"),
            result_kind=_need(raw, "result"),
            replaced=_need(raw, "replaced"),
        )
    raise FormatError(MISSING_FIELD, f"unknown node kind {kind!r}")


def _entry_from(raw: dict, tree: ProofTree) -> DiagnosisEntry:
    score = _need(raw, "score")
    num, den = str(_need(score, "progress")).split("/")
    node_id = _need(raw, "node")
    if node_id not in tree.nodes:
        raise FormatError(DANGLING_NODE_ID, f"diagnosis references unknown node {node_id}")
    path = tuple(_need(raw, "path"))
    for nid in path:
        if nid not in tree.nodes:
            raise FormatError(DANGLING_NODE_ID, f"diagnosis path references unknown node {nid}")
    return DiagnosisEntry(
        node_id=node_id,
        rendered_bound=_need(raw, "rendered_bound"),
        depth=_need(score, "depth"),
        progress=Fraction(int(num), int(den)),
        source_order=_need(score, "source_order"),
        path=path,
        provenance=_span_from(_need(raw, "span")),
    )


def _check_structure(tree: ProofTree) -> None:
    if tree.root not in tree.nodes:
        raise FormatError(DANGLING_NODE_ID, f"root {tree.root} not in nodes")
    seen: set[int] = set()
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise FormatError(CYCLE_DETECTED, f"node {nid} reachable twice")
        seen.add(nid)
        for child in tree.children(nid):
            if child not in tree.nodes:
                raise FormatError(DANGLING_NODE_ID, f"node {nid} references unknown child {child}")
            if child <= nid:
                raise FormatError(
                    DANGLING_NODE_ID, f"child {child} does not follow its parent {nid}"
                )
            stack.append(child)
    unreachable = set(tree.nodes) - seen
    if unreachable:
        raise FormatError(DANGLING_NODE_ID, f"unreachable nodes {sorted(unreachable)}")
    _fix_candidate_depths(tree)


def _fix_candidate_depths(tree: ProofTree) -> None:
    def walk(nid: int) -> None:
        node = tree.nodes[nid]
        if isinstance(node, GoalNode):
            for c in node.candidates:
                child = tree.nodes[c]
                if isinstance(child, CandidateNode):
                    child.depth = node.depth
                    for s in child.subgoals:
                        walk(s)
                # summaries carry no depth

    walk(tree.root)
