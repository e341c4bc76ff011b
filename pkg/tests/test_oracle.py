"""Solver vs brute-force evaluator agreement, and a mutation check proving
the harness can actually catch a broken lattice."""

import random

from traitproof import gen, solver
from traitproof.cli import main
from traitproof.oracle import OracleBudgetExhausted, solve_exhaustive_oracle
from traitproof.parser import parse_program
from traitproof.solver import BudgetExhausted, SolverConfig, solve_query
from traitproof.validate import validate_program

from conftest import load_corpus


def both_results(query, program, max_depth=12, max_nodes=5000):
    try:
        tree = solve_query(query, program, SolverConfig(max_depth, max_nodes))
        root = tree.nodes[tree.root].result
        mine = (root.kind, root.solution_count)
    except BudgetExhausted:
        mine = ("budget", 0)
    try:
        res = solve_exhaustive_oracle(query, program, max_depth, max_nodes)
        theirs = (res[0], res[1] if res[0] == "amb" else 0)
    except OracleBudgetExhausted:
        theirs = ("budget", 0)
    return mine, theirs


def test_corpus_agreement():
    for name in ("tostring.tdl", "bevy_mini.tdl", "overflow_loop.tdl", "cycle_odd.tdl"):
        _, prog = load_corpus(name)
        for q in prog.queries:
            mine, theirs = both_results(q, prog, max_depth=32, max_nodes=100_000)
            assert mine == theirs, name


def test_empty_or_agreement():
    prog = validate_program(parse_program("trait P; type A; query { A: P };", "<t>"))
    mine, theirs = both_results(prog.queries[0], prog)
    assert mine == theirs == ("no", 0)


def test_random_agreement_sample():
    rng = random.Random(2024)
    for case in range(150):
        source = gen.random_program(rng)
        prog = validate_program(parse_program(source, f"<case {case}>"))
        for q in prog.queries:
            mine, theirs = both_results(q, prog)
            assert mine == theirs, f"case {case}:\n{source}"


def test_compare_oracle_cli_zero_cases(capsys):
    assert main(["compare-oracle", "--cases", "0"]) == 0


def test_compare_oracle_cli_small(capsys):
    assert main(["compare-oracle", "--seed", "3", "--cases", "40"]) == 0
    assert "40 cases agree" in capsys.readouterr().out


def test_flipped_and_lattice_is_caught(monkeypatch, capsys):
    """Mutation check: break the AND combination (any proven subgoal proves
    the candidate) and the harness must find a counterexample."""
    real = solver._combine_and

    def flipped(children, threaded):
        if not children or any(c.kind == solver.PROVEN for c in children):
            return solver.proven(threaded)
        return real(children, threaded)

    monkeypatch.setattr(solver, "_combine_and", flipped)
    assert main(["compare-oracle", "--seed", "42", "--cases", "300"]) == 1
    assert "MISMATCH" in capsys.readouterr().out
