"""Size-ordered enumeration of grammar terms, used for minimal-program
seeding when a query has no atoms (and by tests as a building block)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from recsynth.grammar import Grammar
from recsynth.lang import exprs as E
from recsynth.lang.typecheck import typechecks
from recsynth.lang.types import TypeExpr, type_key


@dataclass(frozen=True)
class TermNode:
    symbol: object
    children: tuple


def typed_terms(grammar: Grammar, ty: TypeExpr, size: int) -> list[TermNode]:
    """All grammar terms of exactly the given result type and node count,
    in deterministic order. No guard filtering; callers typecheck."""
    syms_by_result: dict = {}
    for s in grammar.all_symbols():
        syms_by_result.setdefault(s.result_type, []).append(s)

    cache: dict[tuple, list[TermNode]] = {}

    def go(t: TypeExpr, n: int) -> list[TermNode]:
        key = (type_key(t), n)
        if key in cache:
            return cache[key]
        out: list[TermNode] = []
        if n >= 1:
            for sym in syms_by_result.get(t, ()):
                if sym.arity == 0:
                    if n == 1:
                        out.append(TermNode(sym, ()))
                    continue
                for split in _splits(n - 1, sym.arity):
                    parts = [go(at, sz) for at, sz in zip(sym.arg_types, split)]
                    if any(not p for p in parts):
                        continue
                    _product(out, sym, parts)
        cache[key] = out
        return out

    return go(ty, size)


def _product(out, sym, parts):
    def rec(i, acc):
        if i == len(parts):
            out.append(TermNode(sym, tuple(acc)))
            return
        for p in parts[i]:
            acc.append(p)
            rec(i + 1, acc)
            acc.pop()

    rec(0, [])


@lru_cache(maxsize=None)
def _splits(total: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Ways to split ``total`` into k positive parts."""
    if k == 1:
        return ((total,),) if total >= 1 else ()
    out = []
    for first in range(1, total - k + 2):
        for rest in _splits(total - first, k - 1):
            out.append((first,) + rest)
    return tuple(out)


def iter_programs(grammar: Grammar, max_size: int, well_typed_only: bool = True):
    """Programs of the grammar in nondecreasing size order."""
    comps = grammar.component_signatures()
    for size in range(1, max_size + 1):
        for term in typed_terms(grammar, grammar.output_type, size):
            prog = grammar.term_to_program(term)
            if not well_typed_only or typechecks(prog, grammar.env, comps):
                yield prog


def minimal_program(grammar: Grammar, max_size: int = 12) -> E.Program | None:
    for prog in iter_programs(grammar, max_size):
        return prog
    return None
