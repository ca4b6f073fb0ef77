"""Per-task grammar: the typed alphabet the synthesizer builds programs from.

The alphabet uses constructor and match symbols for named ADTs, projections
for products, guarded unwraps for two-constructor ADTs, the recursion symbol,
and declared context components. Symbol instances are monomorphic; the type
universe is the subterm closure of the task's types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from recsynth.fta import AlphabetSymbol, RunNode
from recsynth.lang import exprs as E
from recsynth.lang.types import AdtEnv, Fn, Named, Prod, Sum, TypeExpr, Unit, type_key


@dataclass(frozen=True)
class ComponentDef:
    """A named context function, interpreted by its core-language program."""

    name: str
    program: E.Program
    in_grammar: bool = True


@lru_cache(maxsize=None)
def _sym(label: str, result_type: TypeExpr, arg_types: tuple[TypeExpr, ...]) -> AlphabetSymbol:
    return AlphabetSymbol(label, len(arg_types), result_type, arg_types)


class Grammar:
    def __init__(
        self,
        env: AdtEnv,
        input_type: TypeExpr,
        output_type: TypeExpr,
        fname: str = "f",
        components: dict[str, ComponentDef] | None = None,
    ):
        self.env = env
        self.input_type = input_type
        self.output_type = output_type
        self.fname = fname
        self.components = components or {}
        self._universe: tuple[TypeExpr, ...] | None = None
        self._symbols: tuple[AlphabetSymbol, ...] | None = None

    # -- type universe -----------------------------------------------------

    def type_universe(self) -> tuple[TypeExpr, ...]:
        if self._universe is not None:
            return self._universe
        seen: set[TypeExpr] = set()
        queue = [self.input_type, self.output_type, Unit()]
        for comp in self.components.values():
            queue.append(comp.program.input_type)
            queue.append(comp.program.output_type)
        while queue:
            ty = queue.pop()
            if ty in seen:
                continue
            seen.add(ty)
            if isinstance(ty, (Prod, Sum)):
                queue.append(ty.left)
                queue.append(ty.right)
            elif isinstance(ty, Fn):
                queue.append(ty.arg)
                queue.append(ty.res)
            elif isinstance(ty, Named):
                for c in self.env.ctors(ty.name):
                    if c.arg is not None:
                        queue.append(c.arg)
        self._universe = tuple(sorted(seen, key=type_key))
        return self._universe

    def adts(self) -> tuple[str, ...]:
        return tuple(
            t.name for t in self.type_universe() if isinstance(t, Named)
        )

    # -- symbols -----------------------------------------------------------

    def sym_var(self) -> AlphabetSymbol:
        return _sym("var", self.input_type, ())

    def sym_unit(self) -> AlphabetSymbol:
        return _sym("unit", Unit(), ())

    def sym_app(self) -> AlphabetSymbol:
        return _sym("app:" + self.fname, self.output_type, (self.input_type,))

    def sym_comp(self, name: str) -> AlphabetSymbol:
        p = self.components[name].program
        return _sym("comp:" + name, p.output_type, (p.input_type,))

    def sym_ctor(self, ctor_name: str) -> AlphabetSymbol:
        adt, _ = self.env.ctor_site(ctor_name)
        payload = self.env.payload_type(ctor_name)
        args = () if payload is None else (payload,)
        return _sym("ctor:" + ctor_name, Named(adt), args)

    def sym_match(self, adt: str, result: TypeExpr) -> AlphabetSymbol:
        n = len(self.env.ctors(adt))
        return _sym("match:" + adt, result, (Named(adt),) + (result,) * n)

    def sym_unl_adt(self, adt: str) -> AlphabetSymbol:
        payload = self.env.ctors(adt)[0].arg or Unit()
        return _sym("unl:" + adt, payload, (Named(adt),))

    def sym_unr_adt(self, adt: str) -> AlphabetSymbol:
        payload = self.env.ctors(adt)[1].arg or Unit()
        return _sym("unr:" + adt, payload, (Named(adt),))

    def sym_fst(self, prod: Prod) -> AlphabetSymbol:
        return _sym("fst", prod.left, (prod,))

    def sym_snd(self, prod: Prod) -> AlphabetSymbol:
        return _sym("snd", prod.right, (prod,))

    def sym_pair(self, prod: Prod) -> AlphabetSymbol:
        return _sym("pair", prod, (prod.left, prod.right))

    def sym_inl(self, s: Sum) -> AlphabetSymbol:
        return _sym("inl", s, (s.left,))

    def sym_inr(self, s: Sum) -> AlphabetSymbol:
        return _sym("inr", s, (s.right,))

    def sym_unl_sum(self, s: Sum) -> AlphabetSymbol:
        return _sym("unl", s.left, (s,))

    def sym_unr_sum(self, s: Sum) -> AlphabetSymbol:
        return _sym("unr", s.right, (s,))

    def sym_switch(self, s: Sum, result: TypeExpr) -> AlphabetSymbol:
        return _sym("switch", result, (s, result, result))

    def sym_callfn(self, fn: Fn) -> AlphabetSymbol:
        return _sym("callfn", fn.res, (fn, fn.arg))

    def all_symbols(self) -> tuple[AlphabetSymbol, ...]:
        """Every symbol instance this grammar can use (for the bottom
        closure and enumeration oracles)."""
        if self._symbols is not None:
            return self._symbols
        out = [self.sym_var(), self.sym_app()]
        tu = self.type_universe()
        if Unit() in tu:
            out.append(self.sym_unit())
        for name, comp in sorted(self.components.items()):
            if comp.in_grammar:
                out.append(self.sym_comp(name))
        for adt in self.adts():
            ctors = self.env.ctors(adt)
            for c in ctors:
                out.append(self.sym_ctor(c.name))
            if len(ctors) >= 2:
                for t in tu:
                    if not isinstance(t, Fn):
                        out.append(self.sym_match(adt, t))
            if len(ctors) == 2:
                out.append(self.sym_unl_adt(adt))
                out.append(self.sym_unr_adt(adt))
        for t in tu:
            if isinstance(t, Prod):
                out.append(self.sym_fst(t))
                out.append(self.sym_snd(t))
                out.append(self.sym_pair(t))
            elif isinstance(t, Sum):
                out.append(self.sym_inl(t))
                out.append(self.sym_inr(t))
                out.append(self.sym_unl_sum(t))
                out.append(self.sym_unr_sum(t))
                for r in tu:
                    if not isinstance(r, Fn):
                        out.append(self.sym_switch(t, r))
            elif isinstance(t, Fn):
                out.append(self.sym_callfn(t))
        uniq = sorted(set(out), key=lambda s: s.key())
        self._symbols = tuple(uniq)
        return self._symbols

    # -- terms to expressions ----------------------------------------------

    def term_to_expr(self, node: RunNode) -> E.Expr:
        label = node.symbol.label
        kids = node.children
        if label == "var":
            return E.Var()
        if label == "unit":
            return E.UnitE()
        if label.startswith("app:"):
            return E.App(label[4:], self.term_to_expr(kids[0]))
        if label.startswith("comp:"):
            return E.App(label[5:], self.term_to_expr(kids[0]))
        if label.startswith("ctor:"):
            name = label[5:]
            arg = self.term_to_expr(kids[0]) if kids else None
            return E.CtorE(name, arg)
        if label.startswith("match:"):
            adt = label[6:]
            return E.MatchE(
                self.term_to_expr(kids[0]),
                adt,
                tuple(self.term_to_expr(k) for k in kids[1:]),
            )
        if label.startswith("unl"):
            return E.Unl(self.term_to_expr(kids[0]))
        if label.startswith("unr"):
            return E.Unr(self.term_to_expr(kids[0]))
        if label == "fst":
            return E.Fst(self.term_to_expr(kids[0]))
        if label == "snd":
            return E.Snd(self.term_to_expr(kids[0]))
        if label == "pair":
            return E.Pair(self.term_to_expr(kids[0]), self.term_to_expr(kids[1]))
        if label == "inl":
            return E.Inl(self.term_to_expr(kids[0]))
        if label == "inr":
            return E.Inr(self.term_to_expr(kids[0]))
        if label == "switch":
            return E.Switch(
                self.term_to_expr(kids[0]),
                self.term_to_expr(kids[1]),
                self.term_to_expr(kids[2]),
            )
        if label == "callfn":
            return E.CallFn(self.term_to_expr(kids[0]), self.term_to_expr(kids[1]))
        raise ValueError(f"unknown symbol label {label!r}")

    def term_to_program(self, node: RunNode) -> E.Program:
        return E.Program(
            self.fname, self.term_to_expr(node), self.input_type, self.output_type
        )

    def component_signatures(self) -> dict[str, tuple[TypeExpr, TypeExpr]]:
        return {
            name: (c.program.input_type, c.program.output_type)
            for name, c in self.components.items()
        }

    def component_programs(self) -> dict[str, E.Program]:
        return {name: c.program for name, c in self.components.items()}
