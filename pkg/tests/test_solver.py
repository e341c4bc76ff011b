"""Solver behavior: corpus derivations, result lattice, exploration
completeness, termination limits, determinism."""

import pytest

from traitproof.parser import parse_program
from traitproof.solver import (
    AMBIGUOUS,
    CYCLE,
    DISPROVEN,
    DISPROVEN_RESULT,
    OVERFLOW,
    PROVEN,
    BudgetExhausted,
    GoalNode,
    SolverConfig,
    ambiguous,
    assemble_candidates,
    combine_results,
    proven,
    solve_query,
    verify_tree_consistency,
)
from traitproof.syntax import Span
from traitproof.terms import (
    EMPTY_SUBSTITUTION,
    Bound,
    Ctor,
    FreshSource,
    Var,
    skolemize_query,
    unify,
)
from traitproof.validate import validate_program

from conftest import load_corpus

SPAN = Span("<test>", 1, 1, 1, 1)


def solve_source(source: str, query_index: int = 0, config: SolverConfig | None = None):
    prog = validate_program(parse_program(source, "<test>"))
    return solve_query(prog.queries[query_index], prog, config)


def goal_nodes(tree):
    return [n for n in tree.nodes.values() if isinstance(n, GoalNode)]


def find_goal(tree, display: str) -> GoalNode:
    matches = [n for n in goal_nodes(tree) if n.display == display]
    assert matches, f"no goal renders as {display!r}"
    return matches[0]


class TestToStringCorpus:
    def test_success_derivation_shape(self, tostring_trees):
        tree = tostring_trees[0]
        root = tree.goal(tree.root)
        assert root.result.kind == PROVEN
        first, second = [tree.candidate(c) for c in root.candidates]
        # impl 1 fails head unification at the root and stays recorded
        assert first.impl_id == 1
        assert first.unify_kind == "ctor_clash"
        assert first.result.kind == DISPROVEN
        # impl 2 binds T and proves via the tuple fact
        assert second.impl_id == 2
        assert second.unify_kind == "ok"
        (sub,) = second.subgoals
        subgoal = tree.goal(sub)
        assert subgoal.display == "(i32, i32): ToString"
        inner_first = tree.candidate(subgoal.candidates[0])
        assert inner_first.impl_id == 1 and inner_first.result.kind == PROVEN

    def test_failure_has_unique_deepest_dead_end(self, tostring_trees):
        tree = tostring_trees[1]
        assert tree.goal(tree.root).result.kind == DISPROVEN
        leaf = find_goal(tree, "i32: ToString")
        assert all(tree.candidate(c).unify_kind != "ok" for c in leaf.candidates)

    def test_consistency(self, tostring_trees):
        for tree in tostring_trees:
            verify_tree_consistency(tree)


class TestBevyCorpus:
    def test_root_disproven(self, bevy_tree):
        assert bevy_tree.goal(bevy_tree.root).result.kind == DISPROVEN
        verify_tree_consistency(bevy_tree)

    def test_into_system_alternative_group_of_two(self, bevy_tree):
        goal = find_goal(bevy_tree, "fn(Query<Entity>, Timer): IntoSystem<?M>")
        assert len(goal.candidates) == 2

    def test_intended_branch_progress(self, bevy_tree):
        goal = find_goal(bevy_tree, "fn(Query<Entity>, Timer): SystemParamFunction")
        (cand_id,) = goal.candidates
        cand = bevy_tree.candidate(cand_id)
        sub_results = [bevy_tree.goal(s) for s in cand.subgoals]
        assert [g.display for g in sub_results] == [
            "Query<Entity>: SystemParam",
            "Timer: SystemParam",
        ]
        assert [g.result.kind for g in sub_results] == [PROVEN, DISPROVEN]

    def test_timer_fails_with_ctor_clash_on_res(self, bevy_tree):
        timer = find_goal(bevy_tree, "Timer: SystemParam")
        kinds = [bevy_tree.candidate(c).unify_kind for c in timer.candidates]
        assert kinds == ["ctor_clash", "ctor_clash"]

    def test_sibling_after_failure_still_solved(self, bevy_tree):
        # the exclusive route: the first subgoal fails, the second is still
        # a full recorded subtree
        goal = find_goal(bevy_tree, "fn(Query<Entity>, Timer): ExclusiveSystemParamFunction")
        (cand_id,) = goal.candidates
        cand = bevy_tree.candidate(cand_id)
        assert len(cand.subgoals) == 2
        first, second = [bevy_tree.goal(s) for s in cand.subgoals]
        assert first.result.kind == DISPROVEN
        assert second.result.kind == DISPROVEN
        assert second.candidates == []  # a trait with zero impls: empty OR


class TestHereditaryHarrop:
    HARROP = (
        "trait ToString; type i32; type Vec<T>;\n"
        "impl ToString for (i32, i32);\n"
        "impl<T> ToString for Vec<T> where T: ToString;\n"
        "query forall<T> if (T: ToString) {{ Vec<T>: ToString }};\n"
    )

    def test_proven_via_hypothesis(self):
        tree = solve_source(self.HARROP.format())
        root = tree.goal(tree.root)
        assert root.result.kind == PROVEN
        subgoal = find_goal(tree, "T: ToString")
        first = tree.candidate(subgoal.candidates[0])
        assert first.hyp_index == 0 and first.impl_id is None
        assert first.result.kind == PROVEN

    def test_disproven_without_hypothesis(self):
        tree = solve_source(self.HARROP.replace("if (T: ToString) ", "").format())
        assert tree.goal(tree.root).result.kind == DISPROVEN

    def test_hypotheses_precede_impls(self):
        prog = validate_program(parse_program(self.HARROP.format(), "<t>"))
        fresh = FreshSource()
        goal, hyps = skolemize_query(prog.queries[0], fresh)
        sources = assemble_candidates(goal, prog, hyps)
        assert sources[0].hyp_index == 0
        assert [s.impl.impl_id for s in sources[1:]] == [1, 2]


class TestLimits:
    def test_overflow_at_max_depth(self):
        source, prog = load_corpus("overflow_loop.tdl")
        for depth in (4, 32):
            tree = solve_query(prog.queries[0], prog, SolverConfig(max_depth=depth))
            assert tree.goal(tree.root).result.kind == OVERFLOW
            deepest = max(n.depth for n in goal_nodes(tree))
            assert deepest == depth
            leaf = [n for n in goal_nodes(tree) if n.depth == depth]
            assert len(leaf) == 1 and leaf[0].result.kind == OVERFLOW
            assert not leaf[0].candidates
            assert len(tree.nodes) <= tree.config.max_nodes

    def test_cycle_detected_at_inner_occurrence(self):
        source, prog = load_corpus("cycle_odd.tdl")
        tree = solve_query(prog.queries[0], prog)
        root = tree.goal(tree.root)
        assert root.result.kind == CYCLE
        inner = tree.goal(tree.candidate(root.candidates[0]).subgoals[0])
        assert inner.result.kind == CYCLE
        assert inner.candidates == []
        assert len(tree.nodes) == 3

    def test_budget_exhausted_aborts(self):
        source, prog = load_corpus("overflow_loop.tdl")
        with pytest.raises(BudgetExhausted):
            solve_query(prog.queries[0], prog, SolverConfig(max_depth=32, max_nodes=10))


class TestLattice:
    def test_or_empty_is_disproven(self):
        goal = Bound(Ctor("Timer"), "SystemParam", (), SPAN)
        assert combine_results("or", [], goal=goal).kind == DISPROVEN

    def test_and_proven_then_disproven(self):
        assert combine_results("and", [proven(EMPTY_SUBSTITUTION), DISPROVEN_RESULT]).kind == DISPROVEN

    def test_and_empty_is_proven(self):
        out = combine_results("and", [])
        assert out.kind == PROVEN and out.substitution is EMPTY_SUBSTITUTION

    def test_and_dominance_order(self):
        from traitproof.solver import CYCLE_RESULT, OVERFLOW_RESULT

        assert combine_results("and", [OVERFLOW_RESULT, CYCLE_RESULT]).kind == CYCLE
        assert combine_results("and", [ambiguous(2), OVERFLOW_RESULT]).kind == OVERFLOW
        assert combine_results("and", [proven(EMPTY_SUBSTITUTION), ambiguous(3)]).kind == AMBIGUOUS

    def test_or_dominance_order(self):
        from traitproof.solver import CYCLE_RESULT, OVERFLOW_RESULT

        goal = Bound(Ctor("A"), "P", (), SPAN)
        assert combine_results("or", [CYCLE_RESULT, OVERFLOW_RESULT], goal=goal).kind == OVERFLOW
        assert combine_results("or", [DISPROVEN_RESULT, CYCLE_RESULT], goal=goal).kind == CYCLE
        assert combine_results("or", [ambiguous(2), OVERFLOW_RESULT], goal=goal).kind == AMBIGUOUS

    def test_or_proven_beats_disproven(self):
        m = Var(0, "M")
        goal = Bound(Ctor("A"), "IntoSystem", (m,), SPAN)
        sub = unify(m, Ctor("SystemMarker"), EMPTY_SUBSTITUTION)
        out = combine_results("or", [DISPROVEN_RESULT, proven(sub)], goal=goal)
        assert out.kind == PROVEN
        assert out.substitution.apply(m) == Ctor("SystemMarker")

    def test_or_two_distinct_solutions_ambiguous(self):
        m = Var(0, "M")
        goal = Bound(Ctor("X"), "Marker", (m,), SPAN)
        s1 = unify(m, Ctor("A"), EMPTY_SUBSTITUTION)
        s2 = unify(m, Ctor("B"), EMPTY_SUBSTITUTION)
        out = combine_results("or", [proven(s1), proven(s2)], goal=goal)
        assert out.kind == AMBIGUOUS
        assert out.solution_count == 2


class TestAmbiguityAndOverlap:
    TWO_MARKERS = (
        "trait Marker<M>; type A; type B; type X;\n"
        "impl Marker<A> for X;\n"
        "impl Marker<B> for X;\n"
        "query { X: Marker<?M> };\n"
    )

    def test_existential_with_two_solutions_is_ambiguous(self):
        tree = solve_source(self.TWO_MARKERS)
        root = tree.goal(tree.root)
        assert root.result.kind == AMBIGUOUS
        assert root.result.solution_count == 2
        verify_tree_consistency(tree)

    def test_agreeing_solutions_stay_proven(self):
        tree = solve_source(self.TWO_MARKERS.replace("impl Marker<B> for X;", "impl Marker<A> for X;"))
        root = tree.goal(tree.root)
        assert root.result.kind == PROVEN
        assert root.overlap

    def test_ground_overlap_is_proven_with_note(self):
        tree = solve_source("trait T; type i32; impl T for i32; impl T for i32; query { i32: T };")
        root = tree.goal(tree.root)
        assert root.result.kind == PROVEN
        assert root.overlap
        verify_tree_consistency(tree)


class TestCompleteness:
    def test_every_goal_keeps_all_candidates(self, bevy_tree, bevy_program):
        fresh_hyps = ()
        for node in goal_nodes(bevy_tree):
            if node.result.kind in (CYCLE, OVERFLOW):
                assert node.candidates == []
                continue
            expected = assemble_candidates(node.bound, bevy_program, fresh_hyps)
            assert len(node.candidates) == len(expected)

    def test_depths_are_monotone(self, bevy_tree):
        for node in goal_nodes(bevy_tree):
            for cid in node.candidates:
                cand = bevy_tree.candidate(cid)
                assert cand.depth == node.depth
                for sid in cand.subgoals:
                    assert bevy_tree.goal(sid).depth == node.depth + 1

    def test_node_ids_topological_and_dense(self, bevy_tree):
        ids = sorted(bevy_tree.nodes)
        assert ids == list(range(1, len(ids) + 1))
        for nid in ids:
            for child in bevy_tree.children(nid):
                assert child > nid


def test_determinism_same_tree_twice(bevy_program):
    t1 = solve_query(bevy_program.queries[0], bevy_program)
    t2 = solve_query(bevy_program.queries[0], bevy_program)
    assert [(n.node_id, type(n).__name__, n.result.kind) for n in t1.nodes.values()] == [
        (n.node_id, type(n).__name__, n.result.kind) for n in t2.nodes.values()
    ]
    assert [n.display for n in goal_nodes(t1)] == [n.display for n in goal_nodes(t2)]
