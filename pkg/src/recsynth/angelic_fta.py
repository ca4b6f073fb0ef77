"""Construction of the angelic FTA for one (input value, clause) pair, the
candidate oracle for recursive-call outputs, and witness extraction from runs.

Axiom rules (input variable, unit, nullary constructors, typed bottoms) seed
round 0; k rounds of value-producing rules grow the state set; transitions
are then closed over the final state set. Recursive-call edges f(q_a) -> q_w
exist for a strictly below the input, with w drawn from the candidate oracle
(the final states of a's own automaton) filtered by clause consistency and,
when present, the original logical specification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from recsynth.budget import NO_DEADLINE, Deadline
from recsynth.errors import InconsistentRun
from recsynth.formulas import Clause, SpecContext, _group_admits, clause_sat
from recsynth.fta import Fta, FtaBuilder, FtaState, Run, RunNode, reduce_fta
from recsynth.grammar import Grammar
from recsynth.formulas import Witness
from recsynth.lang import values as V
from recsynth.lang.eval import EvalContext, eval_program
from recsynth.lang.types import Fn, Named, Prod, Sum, TypeExpr, Unit, type_key
from recsynth.lang.values import Value, precedes, value_key
from recsynth.errors import FuelExhausted, StuckError

DEFAULT_K = 4
VALUE_SIZE_SLACK = 3


@dataclass
class BuildParams:
    grammar: Grammar
    k: int = DEFAULT_K
    max_value_size: int | None = None  # None: largest spec value + slack
    original_predicate: Callable[[Value, Value], bool] | None = None
    state_cap: int = 200_000


class FtaCache:
    """Memo for built automata, keyed by (input value, the clause restricted
    to arguments at or below it, value bound). The restriction is sound:
    the construction only consults literals on the input itself and on
    values strictly below it."""

    def __init__(self):
        self.store: dict = {}
        self.builds = 0
        self.hits = 0

    def key(self, v_in: Value, clause: Clause, bound: int):
        restricted = clause.restrict(lambda a: a is v_in or precedes(a, v_in))
        return (value_key(v_in), restricted.key, bound)


def clause_value_bound(clause: Clause, v_in: Value, slack: int = VALUE_SIZE_SLACK) -> int:
    sizes = [v_in.size]
    for lit in clause.literals:
        sizes.append(lit.atom.arg.size)
        rel = lit.atom.rel
        if hasattr(rel, "const"):
            sizes.append(rel.const.size)
    return max(sizes) + slack


def build_angelic_fta(
    v_in: Value,
    clause: Clause,
    params: BuildParams,
    spec_ctx: SpecContext,
    ectx: EvalContext,
    cache: FtaCache | None = None,
    deadline: Deadline = NO_DEADLINE,
    bound: int | None = None,
) -> Fta:
    if bound is None:
        bound = (
            params.max_value_size
            if params.max_value_size is not None
            else clause_value_bound(clause, v_in)
        )
    if cache is not None:
        key = cache.key(v_in, clause, bound)
        hit = cache.store.get(key)
        if hit is not None:
            cache.hits += 1
            return hit
        cache.builds += 1
    fta = _build(v_in, clause, params, spec_ctx, ectx, cache, deadline, bound)
    if cache is not None:
        cache.store[key] = fta
    return fta


def _build(v_in, clause, params, spec_ctx, ectx, cache, deadline, bound) -> Fta:
    g = params.grammar
    env = g.env
    tu = g.type_universe()
    builder = FtaBuilder(1, state_cap=params.state_cap)
    globally_sat = clause_sat(clause, spec_ctx)

    bots: dict[TypeExpr, int] = {}
    for t in tu:
        bots[t] = builder.state_id(FtaState((None,), t))

    by_type: dict[TypeExpr, list[tuple[Value, int]]] = {t: [] for t in tu}
    value_ids: dict[tuple[Value, TypeExpr], int] = {}

    def add_value(v: Value, t: TypeExpr) -> int | None:
        if v.size > bound:
            return None
        key = (v, t)
        sid = value_ids.get(key)
        if sid is None:
            sid = builder.state_id(FtaState((v,), t))
            value_ids[key] = sid
            by_type[t].append((v, sid))
        return sid

    # round 0: axioms
    in_id = add_value(v_in, g.input_type)
    if in_id is None:
        in_id = builder.state_id(FtaState((v_in,), g.input_type))
        value_ids[(v_in, g.input_type)] = in_id
        by_type[g.input_type].append((v_in, in_id))
    builder.add_transition(g.sym_var(), (), in_id)
    if Unit() in bots:
        uid = add_value(V.mk_unit(), Unit())
        if uid is not None:
            builder.add_transition(g.sym_unit(), (), uid)
    for adt in g.adts():
        for c in env.ctors(adt):
            if c.arg is None:
                cid = add_value(V.mk_ctor(c.name), Named(adt))
                if cid is not None:
                    builder.add_transition(g.sym_ctor(c.name), (), cid)

    def oracle(a: Value) -> tuple[Value, ...]:
        sub = build_angelic_fta(
            a, clause, params, spec_ctx, ectx, cache, deadline, bound
        )
        return tuple(
            sorted({s.payload[0] for s in sub.final_states}, key=value_key)
        )

    comp_progs = g.component_programs()

    def recursion_targets(a: Value) -> list[Value]:
        group = clause.group(a)
        out = []
        for w in oracle(a):
            if not _group_admits(group, a, w, spec_ctx):
                continue
            if params.original_predicate is not None and not params.original_predicate(a, w):
                continue
            out.append(w)
        return out

    # k rounds of state growth (frontier-driven; transitions come later)
    frontier: list[tuple[Value, TypeExpr]] = [
        (v, t) for t in tu for (v, sid) in by_type[t]
    ]
    for _ in range(params.k):
        deadline.check()
        if not frontier:
            break
        new: list[tuple[Value, TypeExpr]] = []

        def emit(v: Value, t: TypeExpr):
            if (v, t) not in value_ids and v.size <= bound and t in bots:
                sid = builder.state_id(FtaState((v,), t))
                value_ids[(v, t)] = sid
                by_type[t].append((v, sid))
                new.append((v, t))

        frontier_set = set(frontier)
        for (v, t) in frontier:
            # constructor applications
            for adt in g.adts():
                for c in env.ctors(adt):
                    if c.arg is not None and c.arg == t:
                        emit(V.mk_ctor(c.name, v), Named(adt))
            # projections / unwraps
            if isinstance(t, Prod) and isinstance(v, V.PairV):
                emit(v.first, t.left)
                emit(v.second, t.right)
            if isinstance(t, Sum):
                if isinstance(v, V.InlV):
                    emit(v.inner, t.left)
                elif isinstance(v, V.InrV):
                    emit(v.inner, t.right)
            if isinstance(t, Named) and len(env.ctors(t.name)) == 2:
                if isinstance(v, V.CtorV):
                    _, idx = env.ctor_site(v.name)
                    payload = v.arg if v.arg is not None else V.mk_unit()
                    payload_t = env.ctors(t.name)[idx].arg or Unit()
                    emit(payload, payload_t)
            # injections into sum types in the universe
            for s in tu:
                if isinstance(s, Sum):
                    if s.left == t:
                        emit(V.mk_inl(v), s)
                    if s.right == t:
                        emit(V.mk_inr(v), s)
            # components
            for name, comp in sorted(comp_progs.items()):
                if g.components[name].in_grammar and comp.input_type == t:
                    try:
                        emit(eval_program(comp, v, ectx), comp.output_type)
                    except (StuckError, FuelExhausted):
                        pass
            # recursion on strictly smaller input-typed values
            if t == g.input_type and precedes(v, v_in):
                for w in recursion_targets(v):
                    emit(w, g.output_type)
        # opaque application: combinations touching the frontier
        for ft in tu:
            if not isinstance(ft, Fn):
                continue
            fns = tuple(by_type.get(ft, ()))
            args = tuple(by_type.get(ft.arg, ()))
            for (fnv, _) in fns:
                if not isinstance(fnv, V.OpaqueFn):
                    continue
                table = ectx.opaque_tables.get(fnv.fn_id, {})
                for (a, _) in args:
                    if a in table and (
                        (fnv, ft) in frontier_set or (a, ft.arg) in frontier_set
                    ):
                        emit(table[a], ft.res)
        # pairs: combinations touching the frontier
        for p in tu:
            if not isinstance(p, Prod):
                continue
            lefts = by_type[p.left]
            rights = by_type[p.right]
            for (lv, _) in lefts:
                for (rv, _) in rights:
                    if (lv, p.left) in frontier_set or (rv, p.right) in frontier_set:
                        if lv.size + rv.size + 1 <= bound:
                            emit(V.mk_pair(lv, rv), p)
        frontier = new

    # transition closure over the final state set
    deadline.check()
    _close_transitions(
        builder, g, env, tu, bots, by_type, value_ids, v_in, in_id,
        recursion_targets, comp_progs, ectx, bound,
    )

    # finals
    if globally_sat:
        in_group = clause.group(v_in)
        for (v, sid) in by_type.get(g.output_type, ()):
            if _group_admits(in_group, v_in, v, spec_ctx):
                builder.set_final(sid)

    return reduce_fta(builder.build())


def _close_transitions(
    builder, g, env, tu, bots, by_type, value_ids, v_in, in_id,
    recursion_targets, comp_progs, ectx, bound,
):
    def vid(v, t):
        return value_ids.get((v, t))

    # bottom closure: every symbol maps bottoms to its result bottom
    for sym in g.all_symbols():
        if sym.result_type in bots and all(t in bots for t in sym.arg_types):
            builder.add_transition(
                sym, tuple(bots[t] for t in sym.arg_types), bots[sym.result_type]
            )

    for t in tu:
        for (v, sid) in by_type[t]:
            # constructor applications
            for adt in g.adts():
                for c in env.ctors(adt):
                    if c.arg is not None and c.arg == t:
                        rid = vid(V.mk_ctor(c.name, v), Named(adt))
                        if rid is not None:
                            builder.add_transition(g.sym_ctor(c.name), (sid,), rid)
            if isinstance(t, Prod) and isinstance(v, V.PairV):
                rid = vid(v.first, t.left)
                if rid is not None:
                    builder.add_transition(g.sym_fst(t), (sid,), rid)
                rid = vid(v.second, t.right)
                if rid is not None:
                    builder.add_transition(g.sym_snd(t), (sid,), rid)
            if isinstance(t, Sum):
                if isinstance(v, V.InlV):
                    rid = vid(v.inner, t.left)
                    if rid is not None:
                        builder.add_transition(g.sym_unl_sum(t), (sid,), rid)
                elif isinstance(v, V.InrV):
                    rid = vid(v.inner, t.right)
                    if rid is not None:
                        builder.add_transition(g.sym_unr_sum(t), (sid,), rid)
                # switch wiring
                taken = 1 if isinstance(v, V.InlV) else 2 if isinstance(v, V.InrV) else 0
                if taken:
                    for r in tu:
                        if isinstance(r, Fn):
                            continue
                        sym = g.sym_switch(t, r)
                        for (bv, bid) in by_type[r]:
                            args = [sid, bots[r], bots[r]]
                            args[taken] = bid
                            builder.add_transition(sym, tuple(args), bid)
            if isinstance(t, Named):
                ctors = env.ctors(t.name)
                if isinstance(v, V.CtorV):
                    _, idx = env.ctor_site(v.name)
                    if len(ctors) == 2:
                        payload = v.arg if v.arg is not None else V.mk_unit()
                        payload_t = ctors[idx].arg or Unit()
                        rid = vid(payload, payload_t)
                        if rid is not None:
                            sym = g.sym_unl_adt(t.name) if idx == 0 else g.sym_unr_adt(t.name)
                            builder.add_transition(sym, (sid,), rid)
                    if len(ctors) >= 2:
                        for r in tu:
                            if isinstance(r, Fn):
                                continue
                            sym = g.sym_match(t.name, r)
                            for (bv, bid) in by_type[r]:
                                args = [sid] + [bots[r]] * len(ctors)
                                args[1 + idx] = bid
                                builder.add_transition(sym, tuple(args), bid)
            for s in tu:
                if isinstance(s, Sum):
                    if s.left == t:
                        rid = vid(V.mk_inl(v), s)
                        if rid is not None:
                            builder.add_transition(g.sym_inl(s), (sid,), rid)
                    if s.right == t:
                        rid = vid(V.mk_inr(v), s)
                        if rid is not None:
                            builder.add_transition(g.sym_inr(s), (sid,), rid)
            for name in sorted(comp_progs):
                comp = comp_progs[name]
                if g.components[name].in_grammar and comp.input_type == t:
                    try:
                        out = eval_program(comp, v, ectx)
                    except (StuckError, FuelExhausted):
                        continue
                    rid = vid(out, comp.output_type)
                    if rid is not None:
                        builder.add_transition(g.sym_comp(name), (sid,), rid)
            if t == g.input_type and precedes(v, v_in):
                for w in recursion_targets(v):
                    rid = vid(w, g.output_type)
                    if rid is not None:
                        builder.add_transition(g.sym_app(), (sid,), rid)
            if isinstance(t, Fn) and isinstance(v, V.OpaqueFn):
                table = ectx.opaque_tables.get(v.fn_id, {})
                sym = g.sym_callfn(t)
                for (a, aid) in by_type.get(t.arg, ()):
                    if a in table:
                        rid = vid(table[a], t.res)
                        if rid is not None:
                            builder.add_transition(sym, (sid, aid), rid)

    # pair construction over all states
    for p in tu:
        if not isinstance(p, Prod):
            continue
        sym = g.sym_pair(p)
        for (lv, lid) in by_type[p.left]:
            for (rv, rid_) in by_type[p.right]:
                pid = vid(V.mk_pair(lv, rv), p)
                if pid is not None:
                    builder.add_transition(sym, (lid, rid_), pid)


# --------------------------------------------------------------------------
# Candidate oracle (public wrapper) and witness extraction


def build_candidate_oracle(
    spec_clause: Clause,
    inputs: set[Value],
    params: BuildParams,
    spec_ctx: SpecContext,
    ectx: EvalContext,
    cache: FtaCache | None = None,
    deadline: Deadline = NO_DEADLINE,
) -> dict[Value, frozenset[Value]]:
    """Admissible recursive-call outputs for every value strictly below some
    input, in increasing size order (memoised through the shared cache)."""
    cache = cache if cache is not None else FtaCache()
    out: dict[Value, frozenset[Value]] = {}
    for v_in in sorted(inputs, key=value_key):
        bound = (
            params.max_value_size
            if params.max_value_size is not None
            else clause_value_bound(spec_clause, v_in)
        )
        fta = build_angelic_fta(
            v_in, spec_clause, params, spec_ctx, ectx, cache, deadline, bound
        )
        for st in fta.states:
            v = st.payload[0]
            if v is None or st.stype != params.grammar.input_type:
                continue
            if v not in out and precedes(v, v_in):
                sub = build_angelic_fta(
                    v, spec_clause, params, spec_ctx, ectx, cache, deadline, bound
                )
                out[v] = frozenset(s.payload[0] for s in sub.final_states)
    return out


def get_witness(run: Run, fname: str = "f", require_functional: bool = False) -> Witness:
    """Recursive-call assumptions of an accepting run: for every node labeled
    with the recursion symbol, bind f(child value) = node value per non-bottom
    payload component."""
    label = "app:" + fname
    pairs: list[tuple[Value, Value]] = []

    def walk(node: RunNode):
        if node.symbol.label == label:
            (child,) = node.children
            for a, b in zip(child.state.payload, node.state.payload):
                if a is not None and b is not None:
                    pairs.append((a, b))
        for c in node.children:
            walk(c)

    walk(run.root)
    w = Witness(pairs)
    if require_functional and not w.is_consistent:
        raise InconsistentRun(f"conflicting recursion assumptions: {w!r}")
    return w
