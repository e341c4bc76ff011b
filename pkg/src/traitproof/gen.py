"""Random well-formed program generator for solver/oracle cross-checking.

Emits source text (so the parser is exercised too) that always validates:
every name is declared, arities line up, and existentials appear only in the
query goal. Bounds mirror the cross-check harness: at most 5 traits, 8
impls, 3 generics per impl, term depth 3.
"""

from __future__ import annotations

import random


def random_program(rng: random.Random) -> str:
    type_arities = [0] + [rng.randint(0, 2) for _ in range(rng.randint(1, 3))]
    types = {f"K{i}": a for i, a in enumerate(type_arities)}
    trait_arities = [rng.randint(0, 1) for _ in range(rng.randint(1, 5))]
    traits = {f"P{i}": a for i, a in enumerate(trait_arities)}

    lines = [f"type {name}{_params(a)};" for name, a in types.items()]
    lines += [f"trait {name}{_params(a)};" for name, a in traits.items()]

    def term(depth: int, scope: list[str], exist: list[str]) -> str:
        pool = ["ctor"] * 4
        if scope:
            pool += ["var"] * 3
        if exist:
            pool += ["exist"] * 2
        if depth > 0:
            pool += ["tuple", "fn"]
        pick = rng.choice(pool)
        if pick == "var":
            return rng.choice(scope)
        if pick == "exist":
            return f"?{rng.choice(exist)}"
        if pick == "tuple":
            return f"({', '.join(term(depth - 1, scope, exist) for _ in range(rng.randint(0, 2)))})"
        if pick == "fn":
            return f"fn({', '.join(term(depth - 1, scope, exist) for _ in range(rng.randint(0, 2)))})"
        name = rng.choice([n for n, a in types.items() if a == 0 or depth > 0])
        arity = types[name]
        if arity == 0:
            return name
        return f"{name}<{', '.join(term(depth - 1, scope, exist) for _ in range(arity))}>"

    def bound(scope: list[str], exist: list[str]) -> str:
        trait = rng.choice(list(traits))
        args = ""
        if traits[trait]:
            args = f"<{', '.join(term(2, scope, exist) for _ in range(traits[trait]))}>"
        return f"{term(2, scope, exist)}: {trait}{args}"

    for _ in range(rng.randint(0, 8)):
        generics = [f"G{i}" for i in range(rng.randint(0, 3))]
        head_trait = rng.choice(list(traits))
        head_args = ""
        if traits[head_trait]:
            head_args = f"<{', '.join(term(2, generics, []) for _ in range(traits[head_trait]))}>"
        subject = term(3, generics, [])
        wheres = [bound(generics, []) for _ in range(rng.randint(0, 2))]
        where = f" where {', '.join(wheres)}" if wheres else ""
        gen = f"<{', '.join(generics)}>" if generics else ""
        lines.append(f"impl{gen} {head_trait}{head_args} for {subject}{where};")

    universals = [f"U{i}" for i in range(rng.choice([0, 0, 1, 2]))]
    exist = [f"X{i}" for i in range(rng.choice([0, 0, 1, 1, 2]))]
    parts = ["query"]
    if universals:
        parts.append(f"forall<{', '.join(universals)}>")
    if universals and rng.random() < 0.6:
        hyps = [bound(universals, []) for _ in range(rng.randint(1, 2))]
        parts.append(f"if ({', '.join(hyps)})")
    parts.append(f"{{ {bound(universals, exist)} }};")
    lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _params(arity: int) -> str:
    if not arity:
        return ""
    return f"<{', '.join(f'T{i}' for i in range(arity))}>"
