"""Recursive-descent parser for `.tdl` files.

Grammar (whitespace-insensitive, `;`-terminated items, `//` line comments,
ASCII identifiers only):

    program     := item* ;
    item        := type_decl | trait_decl | impl_decl | query_decl
    type_decl   := "type" IDENT ["<" IDENT {"," IDENT} ">"] ";"
    trait_decl  := "trait" IDENT ["<" IDENT {"," IDENT} ">"] ";"
    impl_decl   := "impl" ["<" IDENT {"," IDENT} ">"] trait_ref "for" type_term
                   ["where" bound {"," bound}] ";"
    query_decl  := "query" ["forall" "<" IDENT {"," IDENT} ">"]
                   ["if" "(" bound {"," bound} ")"] "{" bound "}" ";"
    bound       := type_term ":" trait_ref
    trait_ref   := IDENT ["<" type_term {"," type_term} ">"]
    type_term   := IDENT ["<" type_term {"," type_term} ">"]
                 | "(" [type_term {"," type_term}] ")"
                 | "fn" "(" [type_term {"," type_term}] ")"
                 | "?" IDENT
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    BoundDecl,
    CtorTerm,
    DeclRecord,
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

KEYWORDS = frozenset({"type", "trait", "impl", "where", "for", "query", "forall", "if", "fn"})
_PUNCT = frozenset("<>(){},;:?")


class ParseError(Exception):
    def __init__(self, message: str, span: Span, expected: str | None = None):
        self.message = message
        self.span = span
        self.expected = expected
        detail = f" (expected {expected})" if expected else ""
        super().__init__(f"{span.location()}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "kw" | "punct" | "eof"
    text: str
    span: Span


def _lex(source: str, file: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        start = Span(file, line, col, line, col)
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, start))
            col += 1
            i += 1
            continue
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i
            while j < n and source[j].isascii() and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            span = Span(file, line, col, line, col + (j - i) - 1)
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, span))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} (ASCII identifiers and punctuation only)", start)
    tokens.append(Token("eof", "", Span(file, line, col, line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def at_kw(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "kw" and tok.text == text

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if not self.at_punct(text):
            raise ParseError(f"unexpected {self._describe(tok)}", tok.span, expected=f"'{text}'")
        return self.next()

    def expect_kw(self, text: str) -> Token:
        tok = self.peek()
        if not self.at_kw(text):
            raise ParseError(f"unexpected {self._describe(tok)}", tok.span, expected=f"'{text}'")
        return self.next()

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"unexpected {self._describe(tok)}", tok.span, expected=what)
        return self.next()

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.kind == "eof":
            return "end of input"
        return f"{tok.kind} '{tok.text}'"

    # -- items ---------------------------------------------------------

    def program(self, file: str) -> Program:
        type_decls: dict[str, int] = {}
        trait_decls: dict[str, int] = {}
        decls: list[DeclRecord] = []
        impls: list[ImplDecl] = []
        queries: list[QueryDecl] = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if self.at_kw("type") or self.at_kw("trait"):
                rec = self.simple_decl(tok.text)
                decls.append(rec)
                target = type_decls if rec.kind == "type" else trait_decls
                target.setdefault(rec.name, rec.arity)
            elif self.at_kw("impl"):
                impls.append(self.impl_decl(len(impls) + 1))
            elif self.at_kw("query"):
                queries.append(self.query_decl())
            else:
                raise ParseError(
                    f"unexpected {self._describe(tok)}",
                    tok.span,
                    expected="'type', 'trait', 'impl' or 'query'",
                )
        return Program(type_decls, trait_decls, tuple(impls), tuple(queries), tuple(decls))

    def simple_decl(self, kind: str) -> DeclRecord:
        start = self.expect_kw(kind)
        name = self.expect_ident(f"{kind} name")
        params = self.ident_list() if self.at_punct("<") else []
        end = self.expect_punct(";")
        return DeclRecord(kind, name.text, len(params), start.span.merge(end.span))

    def ident_list(self) -> list[str]:
        self.expect_punct("<")
        names = [self.expect_ident("parameter name").text]
        while self.at_punct(","):
            self.next()
            names.append(self.expect_ident("parameter name").text)
        self.expect_punct(">")
        return names

    def impl_decl(self, impl_id: int) -> ImplDecl:
        start = self.expect_kw("impl")
        generics = tuple(self.ident_list()) if self.at_punct("<") else ()
        scope = frozenset(generics)
        trait = self.trait_ref(scope)
        self.expect_kw("for")
        subject = self.type_term(scope)
        head = BoundDecl(subject, trait, trait.span.merge(subject.span))
        wheres: list[BoundDecl] = []
        if self.at_kw("where"):
            self.next()
            wheres.append(self.bound(scope))
            while self.at_punct(","):
                self.next()
                wheres.append(self.bound(scope))
        end = self.expect_punct(";")
        return ImplDecl(generics, head, tuple(wheres), start.span.merge(end.span), impl_id)

    def query_decl(self) -> QueryDecl:
        start = self.expect_kw("query")
        universals: tuple[str, ...] = ()
        if self.at_kw("forall"):
            self.next()
            universals = tuple(self.ident_list())
        scope = frozenset(universals)
        hypotheses: list[BoundDecl] = []
        if self.at_kw("if"):
            self.next()
            self.expect_punct("(")
            hypotheses.append(self.bound(scope))
            while self.at_punct(","):
                self.next()
                hypotheses.append(self.bound(scope))
            self.expect_punct(")")
        self.expect_punct("{")
        goal = self.bound(scope)
        self.expect_punct("}")
        end = self.expect_punct(";")
        return QueryDecl(universals, tuple(hypotheses), goal, start.span.merge(end.span))

    # -- terms ---------------------------------------------------------

    def bound(self, scope: frozenset[str]) -> BoundDecl:
        subject = self.type_term(scope)
        self.expect_punct(":")
        trait = self.trait_ref(scope)
        return BoundDecl(subject, trait, subject.span.merge(trait.span))

    def trait_ref(self, scope: frozenset[str]) -> TraitRef:
        name = self.expect_ident("trait name")
        args: list[TypeTerm] = []
        span = name.span
        if self.at_punct("<"):
            self.next()
            args.append(self.type_term(scope))
            while self.at_punct(","):
                self.next()
                args.append(self.type_term(scope))
            close = self.expect_punct(">")
            span = span.merge(close.span)
        return TraitRef(name.text, tuple(args), span)

    def type_term(self, scope: frozenset[str]) -> TypeTerm:
        tok = self.peek()
        if self.at_punct("?"):
            q = self.next()
            name = self.expect_ident("existential variable name")
            return ExistTerm(name.text, q.span.merge(name.span))
        if self.at_punct("("):
            open_ = self.next()
            elems: list[TypeTerm] = []
            if not self.at_punct(")"):
                elems.append(self.type_term(scope))
                while self.at_punct(","):
                    self.next()
                    elems.append(self.type_term(scope))
            close = self.expect_punct(")")
            return TupleTerm(tuple(elems), open_.span.merge(close.span))
        if self.at_kw("fn"):
            fn = self.next()
            self.expect_punct("(")
            params: list[TypeTerm] = []
            if not self.at_punct(")"):
                params.append(self.type_term(scope))
                while self.at_punct(","):
                    self.next()
                    params.append(self.type_term(scope))
            close = self.expect_punct(")")
            return FnTerm(tuple(params), fn.span.merge(close.span))
        if tok.kind == "ident":
            name = self.next()
            if self.at_punct("<"):
                self.next()
                args = [self.type_term(scope)]
                while self.at_punct(","):
                    self.next()
                    args.append(self.type_term(scope))
                close = self.expect_punct(">")
                # a generic used with arguments stays a ctor node; validation
                # flags it (first-order language, no higher-kinded vars)
                return CtorTerm(name.text, tuple(args), name.span.merge(close.span))
            if name.text in scope:
                return VarTerm(name.text, name.span)
            return CtorTerm(name.text, (), name.span)
        raise ParseError(f"unexpected {self._describe(tok)}", tok.span, expected="a type term")


def parse_program(source_text: str, file_name: str = "<input>") -> Program:
    """Parse source text into an unvalidated Program.

    Total: every input yields a Program or raises ParseError with a span
    inside the input. Impl ids are assigned in source order starting at 1.
    """
    return _Parser(_lex(source_text, file_name)).program(file_name)
