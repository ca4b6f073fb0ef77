"""Standard big-step semantics for the core language.

Deterministic and pure. Nontermination is cut off by a reduction-step fuel
and a recursion-depth cap, both reported as FuelExhausted (distinct from
StuckError, which means no evaluation rule applies).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from recsynth.errors import FuelExhausted, StuckError
from recsynth.lang import exprs as E
from recsynth.lang import values as V
from recsynth.lang.types import AdtEnv

DEFAULT_FUEL = 10_000
DEFAULT_MAX_CALL_DEPTH = 400


@dataclass
class EvalContext:
    env: AdtEnv
    components: dict[str, E.Program] = field(default_factory=dict)
    opaque_tables: dict[str, dict[V.Value, V.Value]] = field(default_factory=dict)
    fuel: int = DEFAULT_FUEL
    max_call_depth: int = DEFAULT_MAX_CALL_DEPTH


class _Budget:
    __slots__ = ("steps",)

    def __init__(self, steps: int):
        self.steps = steps

    def tick(self):
        self.steps -= 1
        if self.steps <= 0:
            raise FuelExhausted("out of fuel")


def eval_program(
    program: E.Program, inp: V.Value, ctx: EvalContext, fuel: int | None = None
) -> V.Value:
    budget = _Budget(fuel if fuel is not None else ctx.fuel)
    return _eval(program.body, inp, program, ctx, budget, 0)


def _eval(
    e: E.Expr,
    x: V.Value,
    program: E.Program,
    ctx: EvalContext,
    budget: _Budget,
    depth: int,
) -> V.Value:
    budget.tick()
    if isinstance(e, E.Var):
        return x
    if isinstance(e, E.UnitE):
        return V.mk_unit()
    if isinstance(e, E.Pair):
        return V.mk_pair(
            _eval(e.e1, x, program, ctx, budget, depth),
            _eval(e.e2, x, program, ctx, budget, depth),
        )
    if isinstance(e, E.Fst):
        v = _eval(e.e, x, program, ctx, budget, depth)
        v = _through_single_ctor(v, ctx.env)
        if not isinstance(v, V.PairV):
            raise StuckError(f"fst of non-pair {v!r}")
        return v.first
    if isinstance(e, E.Snd):
        v = _eval(e.e, x, program, ctx, budget, depth)
        v = _through_single_ctor(v, ctx.env)
        if not isinstance(v, V.PairV):
            raise StuckError(f"snd of non-pair {v!r}")
        return v.second
    if isinstance(e, E.Inl):
        return V.mk_inl(_eval(e.e, x, program, ctx, budget, depth))
    if isinstance(e, E.Inr):
        return V.mk_inr(_eval(e.e, x, program, ctx, budget, depth))
    if isinstance(e, E.Unl):
        v = _sum_headed(_eval(e.e, x, program, ctx, budget, depth), ctx.env)
        if not isinstance(v, V.InlV):
            raise StuckError(f"unl of non-inl {v!r}")
        return v.inner
    if isinstance(e, E.Unr):
        v = _sum_headed(_eval(e.e, x, program, ctx, budget, depth), ctx.env)
        if not isinstance(v, V.InrV):
            raise StuckError(f"unr of non-inr {v!r}")
        return v.inner
    if isinstance(e, E.Switch):
        v = _sum_headed(_eval(e.scrutinee, x, program, ctx, budget, depth), ctx.env)
        if isinstance(v, V.InlV):
            return _eval(e.left, x, program, ctx, budget, depth)
        if isinstance(v, V.InrV):
            return _eval(e.right, x, program, ctx, budget, depth)
        raise StuckError(f"switch on non-sum {v!r}")
    if isinstance(e, E.CtorE):
        if not ctx.env.has_ctor(e.name):
            raise StuckError(f"unknown constructor {e.name}")
        arg = None if e.arg is None else _eval(e.arg, x, program, ctx, budget, depth)
        return V.mk_ctor(e.name, arg)
    if isinstance(e, E.MatchE):
        v = _eval(e.scrutinee, x, program, ctx, budget, depth)
        if not isinstance(v, V.CtorV) or not ctx.env.has_ctor(v.name):
            raise StuckError(f"match on non-constructor {v!r}")
        adt, idx = ctx.env.ctor_site(v.name)
        if adt != e.adt or idx >= len(e.branches):
            raise StuckError(f"match branch mismatch for {v!r}")
        return _eval(e.branches[idx], x, program, ctx, budget, depth)
    if isinstance(e, E.App):
        arg = _eval(e.arg, x, program, ctx, budget, depth)
        if e.callee == program.fname:
            if depth + 1 > ctx.max_call_depth:
                raise FuelExhausted("recursion depth cap")
            return _eval(program.body, arg, program, ctx, budget, depth + 1)
        comp = ctx.components.get(e.callee)
        if comp is None:
            raise StuckError(f"unknown function {e.callee}")
        if depth + 1 > ctx.max_call_depth:
            raise FuelExhausted("recursion depth cap")
        return _eval(comp.body, arg, comp, ctx, budget, depth + 1)
    if isinstance(e, E.CallFn):
        fn = _eval(e.fn, x, program, ctx, budget, depth)
        if not isinstance(fn, V.OpaqueFn):
            raise StuckError(f"application of non-function {fn!r}")
        arg = _eval(e.arg, x, program, ctx, budget, depth)
        table = ctx.opaque_tables.get(fn.fn_id)
        if table is None or arg not in table:
            raise StuckError(f"opaque callable {fn.fn_id} undefined on {arg!r}")
        return table[arg]
    raise TypeError(f"not an Expr: {e!r}")


def _sum_headed(v: V.Value, env: AdtEnv) -> V.Value:
    """View constructor values of multi-constructor ADTs as sums."""
    if isinstance(v, V.CtorV) and env.has_ctor(v.name):
        adt, _ = env.ctor_site(v.name)
        if len(env.ctors(adt)) >= 2:
            return V.sum_view(v, env)
    return v


def _through_single_ctor(v: V.Value, env: AdtEnv) -> V.Value:
    if isinstance(v, V.CtorV) and env.has_ctor(v.name):
        adt, _ = env.ctor_site(v.name)
        if len(env.ctors(adt)) == 1:
            return V.sum_view(v, env)
    return v
