"""Static checks over a parsed program.

A ValidatedProgram is structurally the same Program plus the guarantee that
every referenced name is declared, every constructor/trait application has
the declared arity, variables are bound, and declarations are unique. The
solver only accepts validated programs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    BoundDecl,
    CtorTerm,
    ExistTerm,
    FnTerm,
    ImplDecl,
    Program,
    QueryDecl,
    Span,
    TraitRef,
    TupleTerm,
    TypeTerm,
    VarTerm,
)

UNKNOWN_TRAIT = "UnknownTrait"
UNKNOWN_TYPE = "UnknownType"
ARITY_MISMATCH = "ArityMismatch"
UNBOUND_VAR = "UnboundVar"
DUPLICATE_NAME = "DuplicateName"


@dataclass(frozen=True)
class ValidationError:
    code: str
    message: str
    span: Span

    def __str__(self) -> str:
        return f"{self.span.location()}: {self.code}: {self.message}"


@dataclass(frozen=True)
class ValidatedProgram:
    program: Program

    @property
    def impls(self) -> tuple[ImplDecl, ...]:
        return self.program.impls

    @property
    def queries(self) -> tuple[QueryDecl, ...]:
        return self.program.queries

    def impls_for_trait(self, trait: str) -> tuple[ImplDecl, ...]:
        return tuple(im for im in self.program.impls if im.head.trait.name == trait)


class ProgramInvalid(Exception):
    """Raised by validate_program when any check fails."""

    def __init__(self, errors: list[ValidationError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


def validate_program(program: Program) -> ValidatedProgram:
    errors = collect_errors(program)
    if errors:
        raise ProgramInvalid(errors)
    return ValidatedProgram(program)


def collect_errors(program: Program) -> list[ValidationError]:
    """Idempotent, side-effect free check; returns all problems found."""
    errors: list[ValidationError] = []

    seen: dict[tuple[str, str], Span] = {}
    for d in program.decls:
        key = (d.kind, d.name)
        if key in seen:
            errors.append(
                ValidationError(DUPLICATE_NAME, f"{d.kind} `{d.name}` declared more than once", d.span)
            )
        else:
            seen[key] = d.span

    for im in program.impls:
        _check_generics(im.generics, im.span, errors)
        scope = set(im.generics)
        _check_bound(im.head, program, scope, errors, allow_exist=False, where="impl head")
        for w in im.where_clauses:
            _check_bound(w, program, scope, errors, allow_exist=False, where="where-clause")

    for q in program.queries:
        _check_generics(q.universals, q.span, errors)
        scope = set(q.universals)
        for h in q.hypotheses:
            _check_bound(h, program, scope, errors, allow_exist=False, where="query hypothesis")
        _check_bound(q.goal, program, scope, errors, allow_exist=True, where="query goal")
        for name in _exist_names(q.goal):
            if name in scope:
                errors.append(
                    ValidationError(
                        DUPLICATE_NAME,
                        f"existential `?{name}` shadows the universal `{name}`",
                        q.span,
                    )
                )
    return errors


def _check_generics(names: tuple[str, ...], span: Span, errors: list[ValidationError]) -> None:
    dup = {n for n in names if names.count(n) > 1}
    for n in sorted(dup):
        errors.append(ValidationError(DUPLICATE_NAME, f"generic parameter `{n}` repeated", span))


def _check_bound(
    b: BoundDecl,
    program: Program,
    scope: set[str],
    errors: list[ValidationError],
    *,
    allow_exist: bool,
    where: str,
) -> None:
    _check_trait_ref(b.trait, program, scope, errors, allow_exist=allow_exist, where=where)
    _check_term(b.subject, program, scope, errors, allow_exist=allow_exist, where=where)


def _check_trait_ref(
    tr: TraitRef,
    program: Program,
    scope: set[str],
    errors: list[ValidationError],
    *,
    allow_exist: bool,
    where: str,
) -> None:
    arity = program.trait_decls.get(tr.name)
    if arity is None:
        errors.append(ValidationError(UNKNOWN_TRAIT, f"trait `{tr.name}` is not declared", tr.span))
    elif arity != len(tr.args):
        errors.append(
            ValidationError(
                ARITY_MISMATCH,
                f"trait `{tr.name}` takes {arity} argument(s), got {len(tr.args)}",
                tr.span,
            )
        )
    for a in tr.args:
        _check_term(a, program, scope, errors, allow_exist=allow_exist, where=where)


def _check_term(
    t: TypeTerm,
    program: Program,
    scope: set[str],
    errors: list[ValidationError],
    *,
    allow_exist: bool,
    where: str,
) -> None:
    if isinstance(t, VarTerm):
        # the parser only emits VarTerm for in-scope names
        return
    if isinstance(t, ExistTerm):
        if not allow_exist:
            errors.append(
                ValidationError(
                    UNBOUND_VAR,
                    f"existential `?{t.name}` is only allowed in a query goal, not a {where}",
                    t.span,
                )
            )
        return
    if isinstance(t, (TupleTerm, FnTerm)):
        elems = t.elems if isinstance(t, TupleTerm) else t.params
        for e in elems:
            _check_term(e, program, scope, errors, allow_exist=allow_exist, where=where)
        return
    if isinstance(t, CtorTerm):
        if t.name in scope:
            # only reachable with args: bare in-scope names parse as VarTerm
            errors.append(
                ValidationError(
                    ARITY_MISMATCH,
                    f"generic parameter `{t.name}` cannot take type arguments",
                    t.span,
                )
            )
        else:
            arity = program.type_decls.get(t.name)
            if arity is None:
                if t.args:
                    errors.append(
                        ValidationError(UNKNOWN_TYPE, f"type `{t.name}` is not declared", t.span)
                    )
                else:
                    # bare undeclared ident: most likely a forgotten generic
                    errors.append(
                        ValidationError(
                            UNBOUND_VAR,
                            f"`{t.name}` is neither a declared type nor a generic in scope",
                            t.span,
                        )
                    )
            elif arity != len(t.args):
                errors.append(
                    ValidationError(
                        ARITY_MISMATCH,
                        f"type `{t.name}` takes {arity} argument(s), got {len(t.args)}",
                        t.span,
                    )
                )
        for a in t.args:
            _check_term(a, program, scope, errors, allow_exist=allow_exist, where=where)
        return
    raise TypeError(f"not a type term: {t!r}")


def _exist_names(t: TypeTerm | BoundDecl | TraitRef) -> set[str]:
    if isinstance(t, BoundDecl):
        return _exist_names(t.subject) | _exist_names(t.trait)
    if isinstance(t, TraitRef):
        out: set[str] = set()
        for a in t.args:
            out |= _exist_names(a)
        return out
    if isinstance(t, ExistTerm):
        return {t.name}
    if isinstance(t, CtorTerm):
        out = set()
        for a in t.args:
            out |= _exist_names(a)
        return out
    if isinstance(t, TupleTerm):
        out = set()
        for e in t.elems:
            out |= _exist_names(e)
        return out
    if isinstance(t, FnTerm):
        out = set()
        for p in t.params:
            out |= _exist_names(p)
        return out
    return set()
