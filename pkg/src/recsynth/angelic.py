"""Set-valued angelic semantics: recursive calls may return any
clause-consistent candidate output instead of re-entering the body."""

from __future__ import annotations

from typing import Callable

from recsynth.errors import CandidateExplosion
from recsynth.formulas import Clause, SpecContext, _group_admits, clause_sat
from recsynth.lang import exprs as E
from recsynth.lang import values as V
from recsynth.lang.eval import EvalContext, _sum_headed, _through_single_ctor
from recsynth.lang.values import Value

DEFAULT_ANGELIC_CAP = 20_000

CandidateOracleFn = Callable[[Value], "set[Value] | frozenset[Value]"]


def angelic_eval(
    program: E.Program,
    inp: Value,
    clause: Clause,
    candidates: CandidateOracleFn,
    ectx: EvalContext,
    spec_ctx: SpecContext,
    cap: int = DEFAULT_ANGELIC_CAP,
) -> frozenset[Value]:
    """All values the program can angelically produce on ``inp``.

    A recursive call on argument value a may return any w in candidates(a)
    with clause ∧ f(a)=w satisfiable. Subexpressions that get stuck on some
    angelic branch simply contribute no values on that branch.
    """
    if not clause_sat(clause, spec_ctx):
        return frozenset()

    env = ectx.env

    def check(s: frozenset[Value]) -> frozenset[Value]:
        if len(s) > cap:
            raise CandidateExplosion(f"angelic value set exceeded {cap}")
        return s

    def ev(e: E.Expr) -> frozenset[Value]:
        if isinstance(e, E.Var):
            return frozenset([inp])
        if isinstance(e, E.UnitE):
            return frozenset([V.mk_unit()])
        if isinstance(e, E.Pair):
            return check(
                frozenset(
                    V.mk_pair(a, b) for a in ev(e.e1) for b in ev(e.e2)
                )
            )
        if isinstance(e, E.Fst):
            out = set()
            for v in ev(e.e):
                v = _through_single_ctor(v, env)
                if isinstance(v, V.PairV):
                    out.add(v.first)
            return check(frozenset(out))
        if isinstance(e, E.Snd):
            out = set()
            for v in ev(e.e):
                v = _through_single_ctor(v, env)
                if isinstance(v, V.PairV):
                    out.add(v.second)
            return check(frozenset(out))
        if isinstance(e, E.Inl):
            return check(frozenset(V.mk_inl(v) for v in ev(e.e)))
        if isinstance(e, E.Inr):
            return check(frozenset(V.mk_inr(v) for v in ev(e.e)))
        if isinstance(e, E.Unl):
            out = set()
            for v in ev(e.e):
                v = _sum_headed(v, env)
                if isinstance(v, V.InlV):
                    out.add(v.inner)
            return check(frozenset(out))
        if isinstance(e, E.Unr):
            out = set()
            for v in ev(e.e):
                v = _sum_headed(v, env)
                if isinstance(v, V.InrV):
                    out.add(v.inner)
            return check(frozenset(out))
        if isinstance(e, E.Switch):
            out = set()
            scruts = ev(e.scrutinee)
            lefts = rights = None
            for v in scruts:
                v = _sum_headed(v, env)
                if isinstance(v, V.InlV):
                    if lefts is None:
                        lefts = ev(e.left)
                    out |= lefts
                elif isinstance(v, V.InrV):
                    if rights is None:
                        rights = ev(e.right)
                    out |= rights
            return check(frozenset(out))
        if isinstance(e, E.CtorE):
            if e.arg is None:
                return frozenset([V.mk_ctor(e.name)])
            return check(frozenset(V.mk_ctor(e.name, v) for v in ev(e.arg)))
        if isinstance(e, E.MatchE):
            out: set[Value] = set()
            branch_sets: dict[int, frozenset[Value]] = {}
            for v in ev(e.scrutinee):
                if not isinstance(v, V.CtorV) or not env.has_ctor(v.name):
                    continue
                adt, idx = env.ctor_site(v.name)
                if adt != e.adt:
                    continue
                if idx not in branch_sets:
                    branch_sets[idx] = ev(e.branches[idx])
                out |= branch_sets[idx]
            return check(frozenset(out))
        if isinstance(e, E.App):
            if e.callee == program.fname:
                out = set()
                for a in ev(e.arg):
                    group = clause.group(a)
                    for w in candidates(a):
                        if _group_admits(group, a, w, spec_ctx):
                            out.add(w)
                return check(frozenset(out))
            comp = ectx.components.get(e.callee)
            if comp is None:
                return frozenset()
            from recsynth.lang.eval import eval_program
            from recsynth.errors import FuelExhausted, StuckError

            out = set()
            for a in ev(e.arg):
                try:
                    out.add(eval_program(comp, a, ectx))
                except (StuckError, FuelExhausted):
                    pass
            return check(frozenset(out))
        if isinstance(e, E.CallFn):
            out = set()
            for fn in ev(e.fn):
                if not isinstance(fn, V.OpaqueFn):
                    continue
                table = ectx.opaque_tables.get(fn.fn_id, {})
                for a in ev(e.arg):
                    if a in table:
                        out.add(table[a])
            return check(frozenset(out))
        raise TypeError(f"not an Expr: {e!r}")

    return ev(program.body)
