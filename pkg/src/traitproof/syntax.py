"""AST for the trait-constraint surface language.

Every node carries a source span so that later stages (solver, diagnosis,
renderer) can always point back at the program text. Type terms distinguish
constructors from variables at parse time: an identifier is a variable iff it
is listed in the enclosing impl's generics or the enclosing query's `forall`
list; `?Name` marks an existential in queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Span:
    """1-based, inclusive source region; start <= end lexicographically."""

    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def merge(self, other: Span) -> Span:
        lo = min((self.line_start, self.col_start), (other.line_start, other.col_start))
        hi = max((self.line_end, self.col_end), (other.line_end, other.col_end))
        return Span(self.file, lo[0], lo[1], hi[0], hi[1])

    def location(self) -> str:
        return f"{self.file}:{self.line_start}:{self.col_start}"


@dataclass(frozen=True)
class CtorTerm:
    name: str
    args: tuple[TypeTerm, ...]
    span: Span


@dataclass(frozen=True)
class TupleTerm:
    elems: tuple[TypeTerm, ...]
    span: Span


@dataclass(frozen=True)
class FnTerm:
    params: tuple[TypeTerm, ...]
    span: Span


@dataclass(frozen=True)
class VarTerm:
    """A bound type variable: an impl generic or a query universal."""

    name: str
    span: Span


@dataclass(frozen=True)
class ExistTerm:
    """`?Name` — an existential variable, meaningful only in query goals."""

    name: str
    span: Span


TypeTerm = Union[CtorTerm, TupleTerm, FnTerm, VarTerm, ExistTerm]


@dataclass(frozen=True)
class TraitRef:
    name: str
    args: tuple[TypeTerm, ...]
    span: Span


@dataclass(frozen=True)
class BoundDecl:
    """`subject: Trait<args>` — the obligation the solver proves or refutes."""

    subject: TypeTerm
    trait: TraitRef
    span: Span


@dataclass(frozen=True)
class ImplDecl:
    generics: tuple[str, ...]
    head: BoundDecl
    where_clauses: tuple[BoundDecl, ...]
    span: Span
    impl_id: int  # source order, starting at 1

    @property
    def is_fact(self) -> bool:
        return not self.generics and not self.where_clauses


@dataclass(frozen=True)
class QueryDecl:
    universals: tuple[str, ...]
    hypotheses: tuple[BoundDecl, ...]
    goal: BoundDecl
    span: Span


@dataclass(frozen=True)
class DeclRecord:
    """A raw `type`/`trait` declaration, kept in source order for error
    reporting and source round-tripping (the name->arity maps drop order
    and duplicates)."""

    kind: str  # "type" | "trait"
    name: str
    arity: int
    span: Span


@dataclass(frozen=True)
class Program:
    type_decls: dict[str, int]
    trait_decls: dict[str, int]
    impls: tuple[ImplDecl, ...]
    queries: tuple[QueryDecl, ...]
    decls: tuple[DeclRecord, ...] = ()


def term_to_source(t: TypeTerm) -> str:
    if isinstance(t, CtorTerm):
        if not t.args:
            return t.name
        return f"{t.name}<{', '.join(term_to_source(a) for a in t.args)}>"
    if isinstance(t, TupleTerm):
        return f"({', '.join(term_to_source(e) for e in t.elems)})"
    if isinstance(t, FnTerm):
        return f"fn({', '.join(term_to_source(p) for p in t.params)})"
    if isinstance(t, VarTerm):
        return t.name
    if isinstance(t, ExistTerm):
        return f"?{t.name}"
    raise TypeError(f"not a type term: {t!r}")


def trait_ref_to_source(tr: TraitRef) -> str:
    if not tr.args:
        return tr.name
    return f"{tr.name}<{', '.join(term_to_source(a) for a in tr.args)}>"


def bound_to_source(b: BoundDecl) -> str:
    return f"{term_to_source(b.subject)}: {trait_ref_to_source(b.trait)}"


def impl_to_source(im: ImplDecl) -> str:
    generics = f"<{', '.join(im.generics)}>" if im.generics else ""
    where = ""
    if im.where_clauses:
        where = " where " + ", ".join(bound_to_source(w) for w in im.where_clauses)
    return (
        f"impl{generics} {trait_ref_to_source(im.head.trait)} "
        f"for {term_to_source(im.head.subject)}{where};"
    )


def query_to_source(q: QueryDecl) -> str:
    parts = ["query"]
    if q.universals:
        parts.append(f"forall<{', '.join(q.universals)}>")
    if q.hypotheses:
        parts.append(f"if ({', '.join(bound_to_source(h) for h in q.hypotheses)})")
    parts.append(f"{{ {bound_to_source(q.goal)} }};")
    return " ".join(parts)


def program_to_source(p: Program) -> str:
    """Pretty-print a program; re-parsing the result gives a structurally
    equal program (spans aside)."""
    lines: list[str] = []
    for d in p.decls:
        params = f"<{', '.join(f'T{i}' for i in range(d.arity))}>" if d.arity else ""
        lines.append(f"{d.kind} {d.name}{params};")
    for im in p.impls:
        lines.append(impl_to_source(im))
    for q in p.queries:
        lines.append(query_to_source(q))
    return "\n".join(lines) + "\n"


def strip_spans(node):
    """Structural copy with every Span replaced by a fixed placeholder, for
    span-insensitive equality in tests."""
    blank = Span("", 1, 1, 1, 1)
    if isinstance(node, Span):
        return blank
    if isinstance(node, tuple):
        return tuple(strip_spans(x) for x in node)
    if isinstance(node, dict):
        return {k: strip_spans(v) for k, v in node.items()}
    if isinstance(
        node,
        (CtorTerm, TupleTerm, FnTerm, VarTerm, ExistTerm, TraitRef, BoundDecl, ImplDecl, QueryDecl, DeclRecord, Program),
    ):
        fields = {k: strip_spans(v) for k, v in vars(node).items()}
        return type(node)(**fields)
    return node
