"""Command-line entry point.

`traitproof check FILE` parses, validates and solves the queries embedded in
a `.tdl` file, prints each proof tree with its ranked starting points (or
the interchange JSON with --format json / --out), and exits 0 when every
query is proven, 1 when any is disproven, 2 when the worst outcome is
ambiguity or a depth/recursion limit, 3 on parse, validation or usage
errors. `traitproof compare-oracle` cross-checks the solver against the
brute-force evaluator on randomly generated programs.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import gen
from .analysis import PRUNE_POLICIES, localize_roots, prune_tree
from .export import build_document, export_json
from .oracle import OracleBudgetExhausted, solve_exhaustive_oracle
from .parser import ParseError, parse_program
from .render import RenderOptions, render_ascii, render_diagnosis
from .solver import BudgetExhausted, SolverConfig, solve_query
from .validate import ProgramInvalid, validate_program

EXIT_OK = 0
EXIT_DISPROVEN = 1
EXIT_INDETERMINATE = 2
EXIT_ERROR = 3


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="traitproof", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="solve the queries in a .tdl file")
    check.add_argument("file", help="program file")
    check.add_argument("--query", type=int, metavar="N", help="solve only query N (1-based)")
    check.add_argument("--goal", metavar="BOUND", help="solve this bound instead of the file's queries")
    check.add_argument("--prune", choices=PRUNE_POLICIES, default="none")
    check.add_argument("--top-k", type=int, default=3, metavar="K", help="diagnosis entries to rank")
    check.add_argument("--format", choices=("ascii", "json"), default="ascii")
    check.add_argument("--out", metavar="FILE", help="write the interchange document here")
    check.add_argument("--max-depth", type=int, default=32)
    check.add_argument("--max-nodes", type=int, default=100_000)
    check.add_argument("--ascii", action="store_true", help="force ASCII glyphs")
    check.add_argument("--include-limits", action="store_true",
                       help="rank overflow/cycle leaves in the diagnosis too")

    compare = sub.add_parser("compare-oracle", help="cross-check solver vs brute force")
    compare.add_argument("--seed", type=int, default=0)
    compare.add_argument("--cases", type=int, default=100)
    compare.add_argument("--max-depth", type=int, default=12)
    compare.add_argument("--max-nodes", type=int, default=3_000)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK

    if args.command == "check":
        return run_check(args)
    return run_compare_oracle(args)


def run_check(args: argparse.Namespace) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            original_source = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR
    except UnicodeDecodeError:
        print(f"error: {args.file} is not a text file", file=sys.stderr)
        return EXIT_ERROR

    source = original_source
    if args.goal is not None:
        # synthesize an anonymous query with a pseudo-span past the file end
        source = source + f"\nquery {{ {args.goal} }};\n"

    try:
        program = validate_program(parse_program(source, args.file))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ProgramInvalid as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR

    queries = list(enumerate(program.queries))  # (0-based index, decl)
    if args.goal is not None:
        queries = queries[-1:]
    elif args.query is not None:
        if not 1 <= args.query <= len(queries):
            print(
                f"error: --query {args.query} out of range (file has {len(queries)} queries)",
                file=sys.stderr,
            )
            return EXIT_ERROR
        queries = [queries[args.query - 1]]
    if not queries:
        print(f"error: {args.file} contains no queries", file=sys.stderr)
        return EXIT_ERROR
    if args.format == "json" and len(queries) > 1:
        print("error: --format json describes one query; pass --query N", file=sys.stderr)
        return EXIT_ERROR

    config = SolverConfig(args.max_depth, args.max_nodes)
    unicode_ok = not args.ascii and sys.stdout.isatty()
    out_chunks: list[str] = []
    kinds: list[str] = []
    document_bytes: bytes | None = None

    for index, query in queries:
        try:
            tree = solve_query(query, program, config)
        except BudgetExhausted as exc:
            print(f"error: query {index + 1}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        diagnosis = localize_roots(tree, args.top_k, include_limits=args.include_limits)
        pruned = prune_tree(tree, args.prune)
        kinds.append(tree.nodes[tree.root].result.kind)

        if args.format == "json" or args.out:
            document = build_document(
                pruned, diagnosis, args.file, original_source.encode("utf-8"), index
            )
            document_bytes = export_json(document)
        if args.format == "json":
            out_chunks.append(document_bytes.decode("ascii"))
        else:
            glyph = render_ascii(pruned, diagnosis, RenderOptions(unicode=unicode_ok))
            chunk = f"query {index + 1} @ {query.span.location()}\n{glyph}"
            points = render_diagnosis(diagnosis)
            if points:
                chunk += points
            out_chunks.append(chunk)

    sys.stdout.write("\n".join(out_chunks))
    if args.out:
        assert document_bytes is not None
        with open(args.out, "wb") as fh:
            fh.write(document_bytes)

    if any(k == "no" for k in kinds):
        return EXIT_DISPROVEN
    if all(k == "yes" for k in kinds):
        return EXIT_OK
    return EXIT_INDETERMINATE


def run_compare_oracle(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    config = SolverConfig(args.max_depth, args.max_nodes)
    for case in range(args.cases):
        source = gen.random_program(rng)
        program = validate_program(parse_program(source, f"<case {case}>"))
        for index, query in enumerate(program.queries):
            solver_result: tuple
            try:
                tree = solve_query(query, program, config)
                root = tree.nodes[tree.root].result
                solver_result = (root.kind, root.solution_count)
            except BudgetExhausted:
                solver_result = ("budget", 0)
            try:
                oracle = solve_exhaustive_oracle(query, program, args.max_depth, args.max_nodes)
                oracle_result = (oracle[0], oracle[1] if oracle[0] == "amb" else 0)
            except OracleBudgetExhausted:
                oracle_result = ("budget", 0)
            if solver_result != oracle_result:
                print(
                    f"MISMATCH on case {case} query {index + 1}: "
                    f"solver={solver_result} oracle={oracle_result}\n"
                    f"--- program ---\n{source}",
                )
                return EXIT_DISPROVEN
    print(f"{args.cases} cases agree (seed {args.seed})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
