"""Text rendering: golden output, glyph modes, span fidelity."""

from traitproof.analysis import localize_roots, prune_tree
from traitproof.render import ASCII_GLYPHS, UNICODE_GLYPHS, RenderOptions, render_ascii, render_diagnosis
from traitproof.solver import solve_query

from conftest import CORPUS, GOLDEN, load_corpus


def test_tostring_failure_golden(tostring_trees):
    tree = tostring_trees[1]
    text = render_ascii(tree, localize_roots(tree, 3))
    assert text == (GOLDEN / "tostring_q2.txt").read_text()


def test_bevy_golden(bevy_tree):
    text = render_ascii(bevy_tree, localize_roots(bevy_tree, 3))
    assert text == (GOLDEN / "bevy_mini.txt").read_text()


def test_bevy_failed_path_golden(bevy_tree):
    diagnosis = localize_roots(bevy_tree, 3)
    text = render_ascii(prune_tree(bevy_tree, "failed-path"), diagnosis)
    assert text == (GOLDEN / "bevy_mini_failed_path.txt").read_text()
    assert "alt 1/2" in text and "alt 2/2" in text
    assert "Timer: SystemParam  <-- ROOT CAUSE?" in text


def test_proven_fact_tree_two_lines():
    from traitproof.parser import parse_program
    from traitproof.validate import validate_program

    prog = validate_program(parse_program("trait T; type A; impl T for A; query { A: T };", "<t>"))
    tree = solve_query(prog.queries[0], prog)
    lines = render_ascii(tree, []).splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("[ok] A: T")
    assert lines[1].strip().startswith("alt 1/1 impl")


def test_root_cause_marker_only_on_top1(tostring_trees):
    text = render_ascii(tostring_trees[1], localize_roots(tostring_trees[1], 3))
    assert text.count("<-- ROOT CAUSE?") == 1
    proven_text = render_ascii(tostring_trees[0], localize_roots(tostring_trees[0], 3))
    assert "ROOT CAUSE" not in proven_text


def test_unicode_differs_only_in_glyphs(bevy_tree):
    diagnosis = localize_roots(bevy_tree, 3)
    plain = render_ascii(bevy_tree, diagnosis, RenderOptions(unicode=False))
    fancy = render_ascii(bevy_tree, diagnosis, RenderOptions(unicode=True))
    plain_lines = plain.splitlines()
    fancy_lines = fancy.splitlines()
    assert len(plain_lines) == len(fancy_lines)
    back = fancy
    for code, glyph in UNICODE_GLYPHS.items():
        back = back.replace(f"{glyph} ", f"{ASCII_GLYPHS[code]} ")
    back = back.replace("• ", "* ")
    # glyph widths differ, so compare after normalizing runs of spaces per line
    normalize = lambda s: [" ".join(line.split()) for line in s.splitlines()]
    assert normalize(back) == normalize(plain)


def test_max_width_truncates_but_keeps_lines(bevy_tree):
    diagnosis = localize_roots(bevy_tree, 3)
    full = render_ascii(bevy_tree, diagnosis)
    narrow = render_ascii(bevy_tree, diagnosis, RenderOptions(max_width=30))
    assert len(full.splitlines()) == len(narrow.splitlines())
    assert all(len(line) <= 30 for line in narrow.splitlines())
    assert any(line.endswith("...") for line in narrow.splitlines())


def test_every_printed_span_resolves_into_the_file(bevy_tree):
    source = (CORPUS / "bevy_mini.tdl").read_text()
    lines = source.splitlines()
    for node in bevy_tree.nodes.values():
        span = node.provenance
        assert 1 <= span.line_start <= len(lines)
        assert 1 <= span.col_start <= len(lines[span.line_start - 1]) + 1
        assert 1 <= span.line_end <= len(lines)
        assert span.col_end <= len(lines[span.line_end - 1])
        assert (span.line_start, span.col_start) <= (span.line_end, span.col_end)


def test_goal_lines_print_source_syntax(bevy_tree):
    text = render_ascii(bevy_tree, [])
    assert "fn(Query<Entity>, Timer): IntoSystemConfigs<?M>" in text
    assert "#fn" not in text and "#tuple" not in text


def test_diagnosis_block(bevy_tree):
    block = render_diagnosis(localize_roots(bevy_tree, 3))
    lines = block.splitlines()
    assert lines[0] == "starting points:"
    assert lines[1].startswith("  1. Timer: SystemParam  (depth 3, progress 1/2)")
    assert len(lines) == 4
    assert render_diagnosis([]) == ""


def test_overflow_and_cycle_glyphs():
    for name, glyph in (("overflow_loop.tdl", "[ovf]"), ("cycle_odd.tdl", "[cyc]")):
        _, prog = load_corpus(name)
        tree = solve_query(prog.queries[0], prog)
        text = render_ascii(tree, [])
        assert text.startswith(glyph)
