"""Canonical term representation and first-order unification.

Terms are constructor applications (tuples and function types use the
reserved constructors `#tuple` and `#fn`, which no source identifier can
spell), numbered variables, and skolems. Substitutions map variable ids to
fully-resolved terms and stay idempotent by construction: binding a variable
rewrites every existing range term, so no domain variable ever survives in a
range. The occurs check runs at every extension; there are no rational trees
here — a cyclic binding is a unification failure, full stop.

Skolems stand for universally quantified query variables. They unify only
with themselves and with variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .syntax import (
    BoundDecl,
    CtorTerm,
    ExistTerm,
    FnTerm,
    ImplDecl,
    QueryDecl,
    Span,
    TupleTerm,
    TypeTerm,
    VarTerm,
)

TUPLE_CTOR = "#tuple"
FN_CTOR = "#fn"

UNIFY_OK = "ok"
CTOR_CLASH = "ctor_clash"
ARITY_CLASH = "arity_clash"
OCCURS_CHECK = "occurs_check"
SKOLEM_CLASH = "skolem_clash"


@dataclass(frozen=True)
class Ctor:
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Var:
    vid: int
    hint: str = field(default="", compare=False)


@dataclass(frozen=True)
class Skolem:
    sid: int
    name: str


Term = Union[Ctor, Var, Skolem]


@dataclass(frozen=True)
class Bound:
    """An obligation `subject: trait<args>` over solver terms.

    `origin` is the span of the source bound that introduced the obligation
    (the query goal, a where-clause, or a hypothesis).
    """

    subject: Term
    trait: str
    args: tuple[Term, ...]
    origin: Span


@dataclass(frozen=True)
class UnifyFailure:
    kind: str  # ctor_clash | arity_clash | occurs_check | skolem_clash
    left: Term
    right: Term

    def describe(self) -> str:
        return f"{self.kind}: {term_display(self.left)} vs {term_display(self.right)}"


@dataclass(frozen=True)
class Substitution:
    bindings: Mapping[int, Term]
    # vids occurring in any range term, so bind() can skip the normalizing
    # rewrite when the newly bound var appears nowhere (the common case)
    range_vars: frozenset[int] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.range_vars is None:
            rv: set[int] = set()
            for r in self.bindings.values():
                _collect_vars(r, rv)
            object.__setattr__(self, "range_vars", frozenset(rv))

    def apply(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self.bindings.get(t.vid, t)
        if isinstance(t, Ctor) and t.args:
            args = tuple(self.apply(a) for a in t.args)
            if all(a is b for a, b in zip(args, t.args)):
                return t
            return Ctor(t.name, args)
        return t

    def apply_bound(self, b: Bound) -> Bound:
        return Bound(self.apply(b.subject), b.trait, tuple(self.apply(a) for a in b.args), b.origin)

    def bind(self, v: Var, t: Term) -> Substitution | UnifyFailure:
        """Extend with v -> t, keeping idempotence; occurs check enforced."""
        t = self.apply(t)
        if isinstance(t, Var) and t.vid == v.vid:
            return self
        if _occurs(v.vid, t):
            return UnifyFailure(OCCURS_CHECK, v, t)
        t_vars: set[int] = set()
        _collect_vars(t, t_vars)
        assert self.range_vars is not None
        if v.vid in self.range_vars:
            new = {w: _replace(r, v.vid, t) for w, r in self.bindings.items()}
            ranges = (self.range_vars - {v.vid}) | t_vars
        else:
            new = dict(self.bindings)
            ranges = self.range_vars | t_vars
        new[v.vid] = t
        return Substitution(new, frozenset(ranges))

    def __len__(self) -> int:
        return len(self.bindings)


EMPTY_SUBSTITUTION = Substitution({})


def _occurs(vid: int, t: Term) -> bool:
    if isinstance(t, Var):
        return t.vid == vid
    if isinstance(t, Ctor):
        return any(_occurs(vid, a) for a in t.args)
    return False


def _collect_vars(t: Term, out: set[int]) -> None:
    if isinstance(t, Var):
        out.add(t.vid)
    elif isinstance(t, Ctor):
        for a in t.args:
            _collect_vars(a, out)


def _replace(t: Term, vid: int, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.vid == vid else t
    if isinstance(t, Ctor) and t.args:
        args = tuple(_replace(a, vid, repl) for a in t.args)
        if all(a is b for a, b in zip(args, t.args)):
            return t
        return Ctor(t.name, args)
    return t


def unify(a: Term, b: Term, sub: Substitution) -> Substitution | UnifyFailure:
    """Most general unifier of a and b extending sub, or the failure.

    The returned substitution is idempotent and makes a and b syntactically
    equal under apply. Failures report the offending subterm pair.
    """
    a = sub.apply(a)
    b = sub.apply(b)
    if isinstance(a, Var):
        if isinstance(b, Var) and a.vid == b.vid:
            return sub
        return sub.bind(a, b)
    if isinstance(b, Var):
        return sub.bind(b, a)
    if isinstance(a, Skolem) or isinstance(b, Skolem):
        if isinstance(a, Skolem) and isinstance(b, Skolem) and a.sid == b.sid:
            return sub
        return UnifyFailure(SKOLEM_CLASH, a, b)
    # both Ctor
    if a.name != b.name:
        return UnifyFailure(CTOR_CLASH, a, b)
    if len(a.args) != len(b.args):
        return UnifyFailure(ARITY_CLASH, a, b)
    for x, y in zip(a.args, b.args):
        out = unify(x, y, sub)
        if isinstance(out, UnifyFailure):
            return out
        sub = out
    return sub


def unify_bounds(goal: Bound, head: Bound, sub: Substitution) -> Substitution | UnifyFailure:
    """Unify a goal against a clause head: same trait, subject and each
    trait argument pairwise."""
    if goal.trait != head.trait or len(goal.args) != len(head.args):
        raise ValueError("candidate assembly must pre-filter by trait name and arity")
    out = unify(goal.subject, head.subject, sub)
    if isinstance(out, UnifyFailure):
        return out
    for g, h in zip(goal.args, head.args):
        nxt = unify(g, h, out)
        if isinstance(nxt, UnifyFailure):
            return nxt
        out = nxt
    return out


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Ctor):
        return all(is_ground(a) for a in t.args)
    return True


def bound_is_ground(b: Bound) -> bool:
    return is_ground(b.subject) and all(is_ground(a) for a in b.args)


class FreshSource:
    """Monotone id source for one solving session; never reused."""

    def __init__(self) -> None:
        self._next_var = 0
        self._next_skolem = 0

    def var(self, hint: str = "") -> Var:
        v = Var(self._next_var, hint)
        self._next_var += 1
        return v

    def skolem(self, name: str) -> Skolem:
        s = Skolem(self._next_skolem, name)
        self._next_skolem += 1
        return s


# -- AST lowering --------------------------------------------------------


def ast_to_term(t: TypeTerm, env: Mapping[str, Term]) -> Term:
    """Lower a validated AST term; env carries generic/universal/existential
    bindings (every VarTerm/ExistTerm name must be present)."""
    if isinstance(t, CtorTerm):
        return Ctor(t.name, tuple(ast_to_term(a, env) for a in t.args))
    if isinstance(t, TupleTerm):
        return Ctor(TUPLE_CTOR, tuple(ast_to_term(e, env) for e in t.elems))
    if isinstance(t, FnTerm):
        return Ctor(FN_CTOR, tuple(ast_to_term(p, env) for p in t.params))
    if isinstance(t, VarTerm):
        return env[t.name]
    if isinstance(t, ExistTerm):
        return env[t.name]
    raise TypeError(f"not a type term: {t!r}")


def ast_to_bound(b: BoundDecl, env: Mapping[str, Term]) -> Bound:
    return Bound(
        ast_to_term(b.subject, env),
        b.trait.name,
        tuple(ast_to_term(a, env) for a in b.trait.args),
        b.span,
    )


def instantiate_impl(impl: ImplDecl, fresh: FreshSource) -> tuple[Bound, tuple[Bound, ...]]:
    """Instantiate an impl clause with fresh variables for its generics.

    Distinct invocations share no variable ids. Head and body keep the spans
    of the head bound and of each where-clause.
    """
    env = {g: fresh.var(g) for g in impl.generics}
    head = ast_to_bound(impl.head, env)
    body = tuple(ast_to_bound(w, env) for w in impl.where_clauses)
    return head, body


def skolemize_query(q: QueryDecl, fresh: FreshSource) -> tuple[Bound, tuple[Bound, ...]]:
    """Lower a query: universals become distinct skolems, hypotheses become
    ground local facts, `?`-variables become fresh vars named after their
    source spelling."""
    env: dict[str, Term] = {u: fresh.skolem(u) for u in q.universals}
    hypotheses = tuple(ast_to_bound(h, env) for h in q.hypotheses)
    for name in _goal_exist_names(q):
        env[name] = fresh.var(name)
    goal = ast_to_bound(q.goal, env)
    return goal, hypotheses


def _goal_exist_names(q: QueryDecl) -> list[str]:
    names: list[str] = []

    def walk(t: TypeTerm) -> None:
        if isinstance(t, ExistTerm):
            if t.name not in names:
                names.append(t.name)
        elif isinstance(t, CtorTerm):
            for a in t.args:
                walk(a)
        elif isinstance(t, TupleTerm):
            for e in t.elems:
                walk(e)
        elif isinstance(t, FnTerm):
            for p in t.params:
                walk(p)

    walk(q.goal.subject)
    for a in q.goal.trait.args:
        walk(a)
    return names


# -- display -------------------------------------------------------------


def term_display(t: Term) -> str:
    """Source-syntax rendering; variables print as `?Name`, skolems as their
    source name."""
    if isinstance(t, Var):
        return f"?{t.hint}" if t.hint else f"?_{t.vid}"
    if isinstance(t, Skolem):
        return t.name
    if t.name == TUPLE_CTOR:
        return f"({', '.join(term_display(a) for a in t.args)})"
    if t.name == FN_CTOR:
        return f"fn({', '.join(term_display(a) for a in t.args)})"
    if not t.args:
        return t.name
    return f"{t.name}<{', '.join(term_display(a) for a in t.args)}>"


def bound_display(b: Bound) -> str:
    if b.args:
        return f"{term_display(b.subject)}: {b.trait}<{', '.join(term_display(a) for a in b.args)}>"
    return f"{term_display(b.subject)}: {b.trait}"


# -- canonical forms ------------------------------------------------------


def canonical_term(t: Term, mapping: dict[int, int]) -> tuple:
    """Hashable form with variables renumbered by first occurrence, for
    renaming-insensitive comparison."""
    if isinstance(t, Var):
        if t.vid not in mapping:
            mapping[t.vid] = len(mapping)
        return ("v", mapping[t.vid])
    if isinstance(t, Skolem):
        return ("s", t.sid)
    return ("c", t.name, tuple(canonical_term(a, mapping) for a in t.args))


def canonical_bound(b: Bound) -> tuple:
    mapping: dict[int, int] = {}
    return (
        b.trait,
        canonical_term(b.subject, mapping),
        tuple(canonical_term(a, mapping) for a in b.args),
    )


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Ctor):
        for a in t.args:
            yield from iter_subterms(a)
