import random

import pytest

from traitproof import gen
from traitproof.parser import ParseError, parse_program
from traitproof.syntax import (
    CtorTerm,
    ExistTerm,
    FnTerm,
    TupleTerm,
    VarTerm,
    program_to_source,
    strip_spans,
)

from conftest import load_corpus


def test_smallest_program():
    prog = parse_program("trait ToString; type i32; impl ToString for i32;")
    assert prog.trait_decls == {"ToString": 0}
    assert prog.type_decls == {"i32": 0}
    assert len(prog.impls) == 1
    assert prog.impls[0].is_fact


def test_tostring_corpus_impl_ids():
    source, _ = load_corpus("tostring.tdl")
    prog = parse_program(source, "corpus/tostring.tdl")
    assert [im.impl_id for im in prog.impls] == [1, 2]
    first, second = prog.impls
    assert isinstance(first.head.subject, TupleTerm)
    assert first.head.trait.name == "ToString"
    assert not first.generics
    assert second.generics == ("T",)
    assert isinstance(second.head.subject, CtorTerm)
    assert second.head.subject.name == "Vec"
    assert isinstance(second.head.subject.args[0], VarTerm)
    assert len(second.where_clauses) == 1


def test_missing_type_term_is_parse_error():
    with pytest.raises(ParseError) as exc:
        parse_program("impl Foo for;")
    assert exc.value.span.line_start == 1
    assert "expected" in str(exc.value)


def test_error_span_stays_inside_input():
    with pytest.raises(ParseError) as exc:
        parse_program("trait T; impl T for")
    span = exc.value.span
    assert span.line_start == 1
    assert span.col_start <= len("trait T; impl T for") + 1


def test_unicode_identifier_rejected():
    with pytest.raises(ParseError) as exc:
        parse_program("trait Té;")
    assert "ASCII" in exc.value.message


def test_comments_and_whitespace():
    prog = parse_program("// header\ntrait T; // trailing\n\n  type  X ;\n")
    assert prog.trait_decls == {"T": 0}
    assert prog.type_decls == {"X": 0}


def test_fn_and_tuple_terms():
    prog = parse_program("trait P; type A; impl P for fn((), (A, A), fn(A));")
    subject = prog.impls[0].head.subject
    assert isinstance(subject, FnTerm)
    unit, pair, inner = subject.params
    assert isinstance(unit, TupleTerm) and unit.elems == ()
    assert isinstance(pair, TupleTerm) and len(pair.elems) == 2
    assert isinstance(inner, FnTerm)


def test_existential_only_in_queries():
    prog = parse_program("trait P; query { ?X: P };")
    goal = prog.queries[0].goal
    assert isinstance(goal.subject, ExistTerm)
    assert goal.subject.name == "X"


def test_query_forall_if():
    prog = parse_program("trait P; type A; query forall<T, U> if (T: P, U: P) { (T, U): P };")
    q = prog.queries[0]
    assert q.universals == ("T", "U")
    assert len(q.hypotheses) == 2
    assert isinstance(q.hypotheses[0].subject, VarTerm)


def test_generic_scope_is_per_impl():
    prog = parse_program("trait P; type T; impl<T> P for T; impl P for T;")
    assert isinstance(prog.impls[0].head.subject, VarTerm)
    assert isinstance(prog.impls[1].head.subject, CtorTerm)


def test_spans_point_at_source():
    source, _ = load_corpus("tostring.tdl")
    prog = parse_program(source, "corpus/tostring.tdl")
    impl2 = prog.impls[1]
    assert impl2.span.line_start == 4
    where = impl2.where_clauses[0]
    line = source.splitlines()[where.span.line_start - 1]
    assert line[where.span.col_start - 1 : where.span.col_end] == "T: ToString"


@pytest.mark.parametrize("name", ["tostring.tdl", "bevy_mini.tdl", "overflow_loop.tdl", "cycle_odd.tdl"])
def test_pretty_print_round_trip_corpus(name):
    source, _ = load_corpus(name)
    prog = parse_program(source, name)
    printed = program_to_source(prog)
    reparsed = parse_program(printed, name)
    assert strip_spans(reparsed) == strip_spans(prog)
    assert program_to_source(reparsed) == printed


def test_pretty_print_round_trip_generated():
    rng = random.Random(11)
    for _ in range(60):
        source = gen.random_program(rng)
        prog = parse_program(source, "<gen>")
        printed = program_to_source(prog)
        assert strip_spans(parse_program(printed, "<gen>")) == strip_spans(prog)
