"""Synthesis engine: angelic synthesis over clause automata, the
backtracking strengthening search, the optimality-guaranteeing priority
queue variant, and the plain enumerative ablation.

All three modes share one run-local context holding the anti-specification,
the per-(value, clause) automaton cache, the per-prefix intersection cache,
and the structured trace.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from recsynth.angelic_fta import (
    BuildParams,
    FtaCache,
    build_angelic_fta,
    clause_value_bound,
    get_witness,
)
from recsynth.budget import NO_DEADLINE, Deadline
from recsynth.errors import (
    DepthExceeded,
    DnfExplosion,
    StateBlowup,
    SynthesisTimeout,
)
from recsynth.formulas import (
    AntiSpec,
    Clause,
    GroundFormula,
    SpecContext,
    Witness,
    and_,
    clause_sat,
    conjoin_witness,
    dnf,
    negate_witness,
    render_formula,
    satisfies,
)
from recsynth.fta import Fta, intersect, is_empty, iter_runs
from recsynth.grammar import Grammar
from recsynth.lang import exprs as E
from recsynth.lang.eval import EvalContext
from recsynth.lang.typecheck import typechecks
from recsynth.lang.exprs import expr_size
from recsynth.termenum import minimal_program


@dataclass
class EngineConfig:
    k: int = 4
    max_value_size: int | None = None
    budget_s: float | None = 120.0
    depth_cap: int = 64
    dnf_cap: int = 512
    state_cap: int = 200_000
    extraction_cap: int = 20_000
    auto_k: bool = False
    trace: bool = False


@dataclass
class AngelicSuccess:
    program: E.Program
    witness: Witness
    clause: Clause
    run: object = None


@dataclass
class AngelicFailure:
    cores: tuple[Clause, ...]
    diagnostic: str | None = None  # resource failure, distinct from semantic


class SynthesisContext:
    """Run-local mutable search state (single-threaded by design)."""

    def __init__(
        self,
        grammar: Grammar,
        spec_ctx: SpecContext,
        ectx: EvalContext,
        config: EngineConfig | None = None,
        deadline: Deadline | None = None,
        original_predicate=None,
    ):
        self.grammar = grammar
        self.spec_ctx = spec_ctx
        self.ectx = ectx
        self.config = config or EngineConfig()
        self.deadline = deadline or (
            Deadline(self.config.budget_s) if self.config.budget_s else NO_DEADLINE
        )
        self.params = BuildParams(
            grammar=grammar,
            k=self.config.k,
            max_value_size=self.config.max_value_size,
            original_predicate=original_predicate,
            state_cap=self.config.state_cap,
        )
        self.omega = AntiSpec()
        self.fta_cache = FtaCache()
        self.prefix_cache: dict = {}
        self.failed_queries: set = set()
        self.trace: list[dict] = []
        self.resource_failures: list[str] = []
        self.candidates_seen = 0

    def emit(self, kind: str, **data) -> None:
        if len(self.trace) < 200_000:
            self.trace.append({"kind": kind, **data})

    def comp_sigs(self):
        return self.grammar.component_signatures()


def _query_key(clauses: tuple[Clause, ...]):
    return frozenset(c.key for c in clauses)


def synthesize_angelic(
    chi: GroundFormula, ctx: SynthesisContext, clauses: tuple[Clause, ...] | None = None
) -> AngelicSuccess | AngelicFailure:
    """One angelic synthesis call: DNF clauses in order, per-clause left-fold
    automaton intersection with prefix caching, minimal well-typed program
    extraction, witness from its run; prefix cores on failure."""
    if clauses is None:
        try:
            clauses = dnf(chi, ctx.config.dnf_cap)
        except DnfExplosion as e:
            return AngelicFailure((), diagnostic=f"dnf-explosion: {e}")
    kappa: list[Clause] = []
    resource: str | None = None
    for ci, clause in enumerate(clauses):
        ctx.deadline.check()
        if not clause_sat(clause, ctx.spec_ctx):
            # no assignment satisfies the clause, so no program does;
            # the whole clause is a (vacuous) unsynthesizable core
            kappa.append(clause)
            ctx.emit("clause-unsat", clause=render_formula(clause.formula()))
            continue
        args = clause.args()
        if not args:
            prog = minimal_program(ctx.grammar)
            if prog is None:
                kappa.append(clause)
                continue
            return AngelicSuccess(prog, Witness(()), clause)
        bound = (
            ctx.params.max_value_size
            if ctx.params.max_value_size is not None
            else max(clause_value_bound(clause, a) for a in args)
        )
        a_star: Fta | None = None
        prefix_keys: list = []
        psi: list = []
        empty = False
        try:
            for arg in args:
                psi.extend(clause.group(arg))
                prefix_keys.append(ctx.fta_cache.key(arg, clause, bound))
                pk = tuple(prefix_keys)
                cached = ctx.prefix_cache.get(pk)
                if cached is not None:
                    a_star = cached
                else:
                    fta = build_angelic_fta(
                        arg,
                        clause,
                        ctx.params,
                        ctx.spec_ctx,
                        ctx.ectx,
                        ctx.fta_cache,
                        ctx.deadline,
                        bound,
                    )
                    a_star = (
                        fta
                        if a_star is None
                        else intersect(
                            a_star, fta, ctx.config.state_cap, ctx.deadline
                        )
                    )
                    ctx.prefix_cache[pk] = a_star
                ctx.emit(
                    "automaton",
                    clause_index=ci,
                    arg=repr(arg),
                    **a_star.stats(),
                )
                if is_empty(a_star):
                    empty = True
                    break
        except StateBlowup as e:
            resource = f"state-blowup: {e}"
            ctx.emit("clause-blowup", clause_index=ci)
            continue
        if empty:
            kappa.append(Clause(psi))
            ctx.emit("clause-empty", clause_index=ci)
            continue
        # minimal well-typed accepted term
        found = None
        sigs = ctx.comp_sigs()
        for n, run in enumerate(iter_runs(a_star, ctx.deadline)):
            if n >= ctx.config.extraction_cap:
                break
            prog = ctx.grammar.term_to_program(run.root)
            if typechecks(prog, ctx.grammar.env, sigs):
                found = (prog, run)
                break
        if found is None:
            resource = "extraction-cap"
            ctx.emit("clause-extraction-cap", clause_index=ci)
            continue
        prog, run = found
        witness = get_witness(run, ctx.grammar.fname)
        ctx.candidates_seen += 1
        ctx.emit(
            "angelic-success",
            clause_index=ci,
            program=prog,
            size=expr_size(prog.body),
            witness=witness,
            clause=clause,
        )
        return AngelicSuccess(prog, witness, clause, run)
    if resource is not None:
        ctx.resource_failures.append(resource)
    return AngelicFailure(tuple(kappa), resource)


def synthesize(chi: GroundFormula, ctx: SynthesisContext) -> E.Program | None:
    """Depth-first strengthening search (witness branch, then its negation),
    threading the growing anti-specification through every query."""

    def go(node_chi: GroundFormula, depth: int) -> E.Program | None:
        ctx.deadline.check()
        if depth > ctx.config.depth_cap:
            raise DepthExceeded(f"strengthening depth {depth}")
        query = ctx.omega.conjoin_negations(node_chi)
        try:
            clauses = dnf(query, ctx.config.dnf_cap)
        except DnfExplosion:
            ctx.resource_failures.append("dnf-explosion")
            return None
        qkey = _query_key(clauses)
        if qkey in ctx.failed_queries:
            return None
        res = synthesize_angelic(query, ctx, clauses)
        if isinstance(res, AngelicFailure):
            ctx.omega.add_all(res.cores)
            if res.diagnostic is None:
                ctx.failed_queries.add(qkey)
            return None
        if satisfies(res.program, node_chi, ctx.ectx, ctx.spec_ctx):
            ctx.emit("verified", program=res.program)
            return res.program
        ctx.emit(
            "strengthen",
            witness=res.witness,
            clause=res.clause,
            program=res.program,
            depth=depth,
        )
        left = go(conjoin_witness(node_chi, res.witness), depth + 1)
        if left is not None:
            return left
        ctx.emit("backtrack", witness=res.witness, depth=depth)
        return go(and_(node_chi, negate_witness(res.witness)), depth + 1)

    return go(chi, 0)


def synthesize_optimal(chi: GroundFormula, ctx: SynthesisContext) -> E.Program | None:
    """Best-first variant: specifications are explored in order of their
    minimal angelic-program size, so the first verified pop is a
    minimum-size solution within the bounded space. Ties pop FIFO."""
    seq = itertools.count()
    heap: list = []
    queued: set = set()

    def make_qe(node_chi: GroundFormula, depth: int) -> None:
        if depth > ctx.config.depth_cap:
            raise DepthExceeded(f"strengthening depth {depth}")
        query = ctx.omega.conjoin_negations(node_chi)
        try:
            clauses = dnf(query, ctx.config.dnf_cap)
        except DnfExplosion:
            ctx.resource_failures.append("dnf-explosion")
            return
        qkey = _query_key(clauses)
        if qkey in queued or qkey in ctx.failed_queries:
            return
        queued.add(qkey)
        res = synthesize_angelic(query, ctx, clauses)
        if isinstance(res, AngelicFailure):
            ctx.omega.add_all(res.cores)
            if res.diagnostic is None:
                ctx.failed_queries.add(qkey)
            return
        pri = expr_size(res.program.body)
        heapq.heappush(
            heap, (pri, next(seq), res.program, res.witness, res.clause, node_chi, depth)
        )

    make_qe(chi, 0)
    while heap:
        ctx.deadline.check()
        pri, _, prog, witness, clause, node_chi, depth = heapq.heappop(heap)
        if satisfies(prog, node_chi, ctx.ectx, ctx.spec_ctx):
            ctx.emit("verified", program=prog)
            return prog
        ctx.emit(
            "strengthen", witness=witness, clause=clause, program=prog, depth=depth
        )
        make_qe(conjoin_witness(node_chi, witness), depth + 1)
        make_qe(and_(node_chi, negate_witness(witness)), depth + 1)
    return None


def synthesize_enumerative(chi: GroundFormula, ctx: SynthesisContext) -> E.Program | None:
    """Ablation baseline: build each clause automaton once, stream accepted
    terms in cost order, and test each against the full specification.
    No strengthening, no anti-specification."""
    try:
        clauses = dnf(chi, ctx.config.dnf_cap)
    except DnfExplosion:
        ctx.resource_failures.append("dnf-explosion")
        return None
    automata: list[Fta] = []
    for clause in clauses:
        ctx.deadline.check()
        if not clause_sat(clause, ctx.spec_ctx):
            continue
        args = clause.args()
        if not args:
            prog = minimal_program(ctx.grammar)
            if prog is not None and satisfies(prog, chi, ctx.ectx, ctx.spec_ctx):
                return prog
            continue
        bound = (
            ctx.params.max_value_size
            if ctx.params.max_value_size is not None
            else max(clause_value_bound(clause, a) for a in args)
        )
        a_star = None
        try:
            for arg in args:
                fta = build_angelic_fta(
                    arg, clause, ctx.params, ctx.spec_ctx, ctx.ectx,
                    ctx.fta_cache, ctx.deadline, bound,
                )
                a_star = (
                    fta
                    if a_star is None
                    else intersect(a_star, fta, ctx.config.state_cap, ctx.deadline)
                )
                if is_empty(a_star):
                    a_star = None
                    break
        except StateBlowup:
            ctx.resource_failures.append("state-blowup")
            a_star = None
        if a_star is not None:
            automata.append(a_star)
    if not automata:
        return None

    # cost-ordered merge across clause streams
    heads: list = []
    iters = {}
    for i, fta in enumerate(automata):
        iters[i] = iter_runs(fta, ctx.deadline)
        run = next(iters[i], None)
        if run is not None:
            heads.append((run.cost, i, run))
    heapq.heapify(heads)
    sigs = ctx.comp_sigs()
    seen_terms: set = set()
    tested = 0
    while heads:
        ctx.deadline.check()
        cost, i, run = heapq.heappop(heads)
        nxt = next(iters[i], None)
        if nxt is not None:
            heapq.heappush(heads, (nxt.cost, i, nxt))
        tkey = run.term_key()
        if tkey in seen_terms:
            continue
        seen_terms.add(tkey)
        prog = ctx.grammar.term_to_program(run.root)
        if not typechecks(prog, ctx.grammar.env, sigs):
            continue
        tested += 1
        ctx.candidates_seen += 1
        if satisfies(prog, chi, ctx.ectx, ctx.spec_ctx):
            ctx.emit("verified", program=prog, tested=tested)
            return prog
    return None


MODES = {
    "dfs": synthesize,
    "optimal": synthesize_optimal,
    "enumerate": synthesize_enumerative,
}


def run_mode(mode: str, chi: GroundFormula, ctx: SynthesisContext) -> E.Program | None:
    return MODES[mode](chi, ctx)
