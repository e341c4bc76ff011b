"""Brute-force reference evaluator, used only to cross-check the solver.

Deliberately shares no code with the solver: terms are plain nested tuples
built straight from the AST, substitutions are triangular dicts resolved by
walking chains on demand, and the five-valued result is computed by counting
outcomes rather than folding a dominance order. Only the *semantics* is the
same by contract: candidates are hypotheses first then impls in source
order, subgoals are evaluated left to right threading the first proven
solution, nothing short-circuits, cycles are renaming-equivalent stack hits,
depth max_depth is an overflow, and one budget unit is spent per goal
entered plus one per candidate attempted.
"""

from __future__ import annotations

from .syntax import (
    BoundDecl,
    CtorTerm,
    ExistTerm,
    FnTerm,
    Program,
    QueryDecl,
    TupleTerm,
    TypeTerm,
    VarTerm,
)
from .validate import ValidatedProgram

# term encodings: ("c", name, (args...)) | ("v", number) | ("k", universal name)


class OracleBudgetExhausted(Exception):
    pass


def _lower(t: TypeTerm, scope: dict[str, tuple]) -> tuple:
    if isinstance(t, CtorTerm):
        return ("c", t.name, tuple(_lower(a, scope) for a in t.args))
    if isinstance(t, TupleTerm):
        return ("c", "#tuple", tuple(_lower(e, scope) for e in t.elems))
    if isinstance(t, FnTerm):
        return ("c", "#fn", tuple(_lower(p, scope) for p in t.params))
    if isinstance(t, (VarTerm, ExistTerm)):
        return scope[t.name]
    raise TypeError(f"not a type term: {t!r}")


def _lower_bound(b: BoundDecl, scope: dict[str, tuple]) -> tuple:
    # a bound is just a pseudo-term headed by the trait name
    args = tuple(_lower(a, scope) for a in b.trait.args)
    return ("c", "trait " + b.trait.name, (_lower(b.subject, scope),) + args)


def _walk(t: tuple, sub: dict[int, tuple]) -> tuple:
    while t[0] == "v" and t[1] in sub:
        t = sub[t[1]]
    return t


def _resolve(t: tuple, sub: dict[int, tuple]) -> tuple:
    t = _walk(t, sub)
    if t[0] == "c":
        return ("c", t[1], tuple(_resolve(a, sub) for a in t[2]))
    return t


def _occurs(vnum: int, t: tuple, sub: dict[int, tuple]) -> bool:
    t = _walk(t, sub)
    if t[0] == "v":
        return t[1] == vnum
    if t[0] == "c":
        return any(_occurs(vnum, a, sub) for a in t[2])
    return False


def _unify(a: tuple, b: tuple, sub: dict[int, tuple]) -> dict[int, tuple] | None:
    a = _walk(a, sub)
    b = _walk(b, sub)
    if a == b:
        return sub
    if a[0] == "v":
        if _occurs(a[1], b, sub):
            return None
        new = dict(sub)
        new[a[1]] = b
        return new
    if b[0] == "v":
        return _unify(b, a, sub)
    if a[0] == "c" and b[0] == "c" and a[1] == b[1] and len(a[2]) == len(b[2]):
        for x, y in zip(a[2], b[2]):
            sub = _unify(x, y, sub)
            if sub is None:
                return None
        return sub
    return None


def _rename(t: tuple, numbering: dict[int, int]) -> tuple:
    if t[0] == "v":
        if t[1] not in numbering:
            numbering[t[1]] = len(numbering)
        return ("v", numbering[t[1]])
    if t[0] == "c":
        return ("c", t[1], tuple(_rename(a, numbering) for a in t[2]))
    return t


def _canon(t: tuple, sub: dict[int, tuple]) -> tuple:
    return _rename(_resolve(t, sub), {})


class _Eval:
    def __init__(self, program: Program, max_depth: int, max_nodes: int):
        self.program = program
        self.max_depth = max_depth
        self.max_nodes = max_nodes
        self.spent = 0
        self.counter = 1000  # fresh var numbers; query vars sit below this
        self.hypotheses: list[tuple] = []

    def charge(self) -> None:
        self.spent += 1
        if self.spent > self.max_nodes:
            raise OracleBudgetExhausted()

    def fresh(self) -> tuple:
        self.counter += 1
        return ("v", self.counter)

    def clauses_for(self, goal: tuple) -> list[tuple[tuple, list]]:
        """(head, body) pairs whose head trait matches; hypotheses first."""
        name = goal[1]
        arity = len(goal[2])
        out: list[tuple[tuple, list]] = []
        for h in self.hypotheses:
            if h[1] == name and len(h[2]) == arity:
                out.append((h, []))
        for im in self.program.impls:
            if ("trait " + im.head.trait.name) == name and len(im.head.trait.args) + 1 == arity:
                scope = {g: self.fresh() for g in im.generics}
                head = _lower_bound(im.head, scope)
                body = [_lower_bound(w, scope) for w in im.where_clauses]
                out.append((head, body))
        return out

    def eval_goal(
        self, goal: tuple, sub: dict[int, tuple], depth: int, stack: list[tuple]
    ) -> tuple:
        """Returns ("yes", sub) | ("amb", n) | ("no",) | ("ovf",) | ("cyc",)."""
        self.charge()
        here = _canon(goal, sub)
        if any(g[1] == goal[1] and _canon(g, sub) == here for g in stack):
            return ("cyc",)
        if depth >= self.max_depth:
            return ("ovf",)

        outcomes: list[tuple] = []
        solutions: list[tuple[tuple, dict[int, tuple]]] = []  # (canon form, sub)
        for head, body in self.clauses_for(goal):
            self.charge()
            unified = _unify(goal, head, sub)
            if unified is None:
                outcomes.append(("no",))
                continue
            current = unified
            tally = {"no": 0, "cyc": 0, "ovf": 0, "amb": []}
            for subgoal in body:
                res = self.eval_goal(subgoal, current, depth + 1, stack + [goal])
                if res[0] == "yes":
                    current = res[1]
                elif res[0] == "amb":
                    tally["amb"].append(res[1])
                else:
                    tally[res[0]] += 1
            if tally["no"]:
                outcomes.append(("no",))
            elif tally["cyc"]:
                outcomes.append(("cyc",))
            elif tally["ovf"]:
                outcomes.append(("ovf",))
            elif tally["amb"]:
                outcomes.append(("amb", tally["amb"][0]))
            else:
                outcomes.append(("yes",))
                solutions.append((_canon(goal, current), current))

        if solutions:
            ground = "v" not in _kinds_in(_resolve(goal, sub))
            distinct: list[tuple] = []
            for form, _ in solutions:
                if form not in distinct:
                    distinct.append(form)
            if ground or len(distinct) == 1:
                return ("yes", solutions[0][1])
            return ("amb", len(distinct))
        for kind in ("amb", "ovf", "cyc"):
            for o in outcomes:
                if o[0] == kind:
                    return o
        return ("no",)


def _kinds_in(t: tuple) -> set[str]:
    if t[0] == "c":
        out = {"c"}
        for a in t[2]:
            out |= _kinds_in(a)
        return out
    return {t[0]}


def solve_exhaustive_oracle(
    query: QueryDecl, program: ValidatedProgram, max_depth: int = 32, max_nodes: int = 100_000
) -> tuple:
    """Root result for one query: ("yes",) | ("amb", n) | ("no",) | ("ovf",)
    | ("cyc",), or raises OracleBudgetExhausted. Used only by tests and the
    compare-oracle harness."""
    ev = _Eval(program.program, max_depth, max_nodes)
    scope: dict[str, tuple] = {u: ("k", u) for u in query.universals}
    ev.hypotheses = [_lower_bound(h, scope) for h in query.hypotheses]
    exist = 0
    goal_scope = dict(scope)
    for name in _exist_in_goal(query):
        goal_scope[name] = ("v", exist)
        exist += 1
    goal = _lower_bound(query.goal, goal_scope)
    result = ev.eval_goal(goal, {}, 0, [])
    if result[0] == "yes":
        return ("yes",)
    return result


def _exist_in_goal(q: QueryDecl) -> list[str]:
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
