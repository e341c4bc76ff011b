"""Textual proof-tree rendering.

One line per node. Goal lines start with a result glyph; goals under a
candidate carry the mandatory marker (`*`, or a filled circle in unicode
mode). A goal's candidates are labelled `alt i/n` — the textual stand-in for
the alternative-group arc. Everything prints in source syntax with source
locations; the top-1 diagnosis line is flagged as the likely root cause.
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass

from .analysis import DiagnosisEntry
from .solver import CandidateNode, GoalNode, ProofTree, SummaryNode
from .terms import OCCURS_CHECK

ASCII_GLYPHS = {"yes": "[ok]", "no": "[no]", "amb": "[amb]", "ovf": "[ovf]", "cyc": "[cyc]"}
UNICODE_GLYPHS = {"yes": "✓", "no": "✗", "amb": "?", "ovf": "↯", "cyc": "⟳"}

ROOT_CAUSE_MARK = "  <-- ROOT CAUSE?"


@dataclass(frozen=True)
class RenderOptions:
    unicode: bool = False
    max_width: int | None = None


def render_ascii(
    tree: ProofTree, diagnosis: list[DiagnosisEntry], options: RenderOptions = RenderOptions()
) -> str:
    """Deterministic plain-text rendering of a (possibly pruned) tree."""
    glyphs = UNICODE_GLYPHS if options.unicode else ASCII_GLYPHS
    bullet = "• " if options.unicode else "* "
    top = diagnosis[0].node_id if diagnosis else None
    lines: list[str] = []

    def emit(line: str) -> None:
        if options.max_width is not None and len(line) > options.max_width:
            line = line[: max(options.max_width - 3, 0)] + "..."
        lines.append(line)

    def walk(nid: int, indent: int, under_candidate: bool) -> None:
        node = tree.nodes[nid]
        if isinstance(node, GoalNode):
            prefix = " " * indent + (bullet if under_candidate else "")
            suffix = ROOT_CAUSE_MARK if nid == top else ""
            if node.collapsed:
                suffix += f"  (+{node.collapsed} nodes)"
            if node.overlap:
                suffix += "  -- overlapping impls"
            emit(f"{prefix}{glyphs[node.result.kind]} {node.display}{suffix}")
            glyph_col = indent + (len(bullet) if under_candidate else 0)
            total = len(node.candidates)
            for i, c in enumerate(node.candidates, start=1):
                child = tree.nodes[c]
                if isinstance(child, CandidateNode):
                    emit_candidate(child, glyph_col + 2, i, total)
                    for s in child.subgoals:
                        walk(s, glyph_col + 4, True)
                else:
                    emit_summary(child, glyph_col + 2)
        elif isinstance(node, SummaryNode):
            emit_summary(node, indent)
        else:
            raise AssertionError("candidates are rendered by their goal")

    def emit_candidate(node: CandidateNode, indent: int, i: int, total: int) -> None:
        origin = "hypothesis" if node.impl_id is None else "impl"
        where = f"@{_short(node.provenance.file)}:{node.provenance.line_start}"
        note = ""
        if node.unify_kind != "ok":
            note = "  -- occurs check" if node.unify_kind == OCCURS_CHECK else "  -- head mismatch"
        if node.collapsed:
            note += f"  (+{node.collapsed} nodes)"
        emit(f"{' ' * indent}alt {i}/{total} {origin} {where}{note}")

    def emit_summary(node: SummaryNode, indent: int) -> None:
        unit = "node" if node.replaced == 1 else "nodes"
        emit(f"{' ' * indent}{node.display} ({node.replaced} {unit})")

    walk(tree.root, 0, False)
    return "\n".join(lines) + "\n"


def render_diagnosis(diagnosis: list[DiagnosisEntry]) -> str:
    """The `starting points` block printed under a failed tree."""
    if not diagnosis:
        return ""
    lines = ["starting points:"]
    for rank, entry in enumerate(diagnosis, start=1):
        frac = f"{entry.progress.numerator}/{entry.progress.denominator}"
        where = f"@ {_short(entry.provenance.file)}:{entry.provenance.line_start}:{entry.provenance.col_start}"
        lines.append(
            f"  {rank}. {entry.rendered_bound}  (depth {entry.depth}, progress {frac})  {where}"
        )
    return "\n".join(lines) + "\n"


def _short(path: str) -> str:
    return posixpath.basename(path.replace("\\", "/")) or path
