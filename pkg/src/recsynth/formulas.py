"""Ground specifications: atoms over f(v), DNF clauses, witnesses, anti-specs.

Atoms constrain single ground terms f(v), so satisfiability decomposes by
argument: a clause is satisfiable iff every per-argument literal group is.
Pure-Neq groups are treated as satisfiable (output domains here are the
inductive ADTs, which are infinite; unit-typed outputs are the one inexact
corner and are documented as such).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from recsynth.errors import DnfExplosion, FuelExhausted, InconsistentRun, StuckError
from recsynth.lang import exprs as E
from recsynth.lang import values as V
from recsynth.lang.eval import EvalContext, eval_program
from recsynth.lang.types import AdtEnv, TypeExpr
from recsynth.lang.values import Value, value_key

DEFAULT_DNF_CAP = 512


# --------------------------------------------------------------------------
# Atoms and formulas


class Rel:
    __slots__ = ()


@dataclass(frozen=True)
class EqRel(Rel):
    const: Value


@dataclass(frozen=True)
class NeqRel(Rel):
    const: Value


@dataclass(frozen=True)
class PredRel(Rel):
    pred_id: str


@dataclass(frozen=True)
class Atom:
    arg: Value
    rel: Rel


class GroundFormula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(GroundFormula):
    __slots__ = ()


@dataclass(frozen=True)
class FalseF(GroundFormula):
    __slots__ = ()


@dataclass(frozen=True)
class AtomF(GroundFormula):
    atom: Atom


@dataclass(frozen=True)
class NotF(GroundFormula):
    inner: GroundFormula


@dataclass(frozen=True)
class AndF(GroundFormula):
    parts: tuple[GroundFormula, ...]


@dataclass(frozen=True)
class OrF(GroundFormula):
    parts: tuple[GroundFormula, ...]


TRUE = TrueF()
FALSE = FalseF()


def atom_eq(arg: Value, const: Value) -> GroundFormula:
    return AtomF(Atom(arg, EqRel(const)))


def atom_neq(arg: Value, const: Value) -> GroundFormula:
    return AtomF(Atom(arg, NeqRel(const)))


def atom_pred(arg: Value, pred_id: str) -> GroundFormula:
    return AtomF(Atom(arg, PredRel(pred_id)))


def and_(*parts: GroundFormula) -> GroundFormula:
    flat = []
    for p in parts:
        if isinstance(p, AndF):
            flat.extend(p.parts)
        elif not isinstance(p, TrueF):
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return AndF(tuple(flat))


def or_(*parts: GroundFormula) -> GroundFormula:
    flat = []
    for p in parts:
        if isinstance(p, OrF):
            flat.extend(p.parts)
        elif not isinstance(p, FalseF):
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return OrF(tuple(flat))


def not_(p: GroundFormula) -> GroundFormula:
    return NotF(p)


def formula_atoms(f: GroundFormula) -> list[Atom]:
    out: list[Atom] = []

    def walk(g):
        if isinstance(g, AtomF):
            out.append(g.atom)
        elif isinstance(g, NotF):
            walk(g.inner)
        elif isinstance(g, (AndF, OrF)):
            for p in g.parts:
                walk(p)

    walk(f)
    seen = set()
    uniq = []
    for a in out:
        if a not in seen:
            seen.add(a)
            uniq.append(a)
    return uniq


def formula_args(f: GroundFormula) -> list[Value]:
    args = {a.arg for a in formula_atoms(f)}
    return sorted(args, key=value_key)


# --------------------------------------------------------------------------
# Literals and clauses


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True


def _rel_key(rel: Rel):
    if isinstance(rel, EqRel):
        return (0, value_key(rel.const))
    if isinstance(rel, NeqRel):
        return (1, value_key(rel.const))
    return (2, rel.pred_id)


def literal_key(lit: Literal):
    return (
        lit.atom.arg.size,
        value_key(lit.atom.arg),
        _rel_key(lit.atom.rel),
        0 if lit.positive else 1,
    )


def prop_var(lit: Literal) -> tuple[tuple, bool]:
    """Propositional variable and phase of a literal (Neq(c) is the negation
    of Eq(c) on the same argument)."""
    a = lit.atom
    if isinstance(a.rel, EqRel):
        return ((value_key(a.arg), 0, value_key(a.rel.const)), lit.positive)
    if isinstance(a.rel, NeqRel):
        return ((value_key(a.arg), 0, value_key(a.rel.const)), not lit.positive)
    return ((value_key(a.arg), 1, a.rel.pred_id), lit.positive)


class Clause:
    """Canonical conjunction of literals: deduplicated and sorted."""

    __slots__ = ("literals", "_key", "_hash")

    def __init__(self, literals: Iterable[Literal]):
        lits = sorted(set(literals), key=literal_key)
        self.literals: tuple[Literal, ...] = tuple(lits)
        self._key = tuple(literal_key(l) for l in self.literals)
        self._hash = hash(self._key)

    @property
    def key(self):
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Clause) and self._key == other._key

    def __len__(self):
        return len(self.literals)

    def __repr__(self):
        return f"Clause({render_formula(self.formula())})"

    def args(self) -> list[Value]:
        seen = []
        done = set()
        for lit in self.literals:
            if lit.atom.arg not in done:
                done.add(lit.atom.arg)
                seen.append(lit.atom.arg)
        return seen  # already in ascending (size, structure) order

    def group(self, arg: Value) -> tuple[Literal, ...]:
        return tuple(l for l in self.literals if l.atom.arg is arg)

    def restrict(self, keep: Callable[[Value], bool]) -> "Clause":
        return Clause(l for l in self.literals if keep(l.atom.arg))

    def formula(self) -> GroundFormula:
        parts = []
        for lit in self.literals:
            f: GroundFormula = AtomF(lit.atom)
            if not lit.positive:
                f = NotF(f)
            parts.append(f)
        return and_(*parts)

    def is_prop_false(self) -> bool:
        phases: dict[tuple, bool] = {}
        for lit in self.literals:
            var, phase = prop_var(lit)
            if var in phases and phases[var] != phase:
                return True
            phases[var] = phase
        return False


def _normalize_literal(atom: Atom, positive: bool) -> Literal:
    if not positive:
        if isinstance(atom.rel, EqRel):
            return Literal(Atom(atom.arg, NeqRel(atom.rel.const)), True)
        if isinstance(atom.rel, NeqRel):
            return Literal(Atom(atom.arg, EqRel(atom.rel.const)), True)
    return Literal(atom, positive)


def dnf(formula: GroundFormula, cap: int = DEFAULT_DNF_CAP) -> tuple[Clause, ...]:
    """Equivalent disjunction of canonical clauses, deterministically ordered.

    Propositionally false clauses are dropped and subsumed clauses absorbed;
    raises DnfExplosion past ``cap`` clauses.
    """

    def go(f: GroundFormula, positive: bool) -> list[frozenset[Literal]]:
        if isinstance(f, TrueF):
            return [frozenset()] if positive else []
        if isinstance(f, FalseF):
            return [] if positive else [frozenset()]
        if isinstance(f, AtomF):
            return [frozenset([_normalize_literal(f.atom, positive)])]
        if isinstance(f, NotF):
            return go(f.inner, not positive)
        parts = f.parts
        conj = isinstance(f, AndF) == positive
        if not conj:  # disjunction
            out: list[frozenset[Literal]] = []
            for p in parts:
                out.extend(go(p, positive))
                if len(out) > cap * 4:
                    raise DnfExplosion(f"more than {cap} DNF clauses")
            return out
        # conjunction: distribute
        acc: list[frozenset[Literal]] = [frozenset()]
        for p in parts:
            branches = go(p, positive)
            nxt = []
            for left in acc:
                for right in branches:
                    nxt.append(left | right)
            if len(nxt) > cap * 4:
                raise DnfExplosion(f"more than {cap} DNF clauses")
            acc = nxt
        return acc

    raw = go(formula, True)
    clauses = []
    seen = set()
    for lits in raw:
        c = Clause(lits)
        if c.is_prop_false() or c in seen:
            continue
        seen.add(c)
        clauses.append(c)
    # absorption: drop any clause containing another clause's literal set
    sets = [set(c.literals) for c in clauses]
    kept = []
    for i, c in enumerate(clauses):
        if any(
            j != i and sets[j] <= sets[i] and (sets[j] != sets[i] or j < i)
            for j in range(len(clauses))
        ):
            continue
        kept.append(c)
    kept.sort(key=lambda c: (len(c), c.key))
    if len(kept) > cap:
        raise DnfExplosion(f"{len(kept)} DNF clauses exceed cap {cap}")
    return tuple(kept)


# --------------------------------------------------------------------------
# Satisfiability of clauses over the ground-atom language


@dataclass
class SpecContext:
    """Semantic context for deciding atoms: the ADT environment, the output
    type of f, executable predicates, and the enumeration bound for
    Pred-only groups."""

    env: AdtEnv
    output_type: TypeExpr
    predicates: dict[str, Callable[[Value, Value], bool]] = field(default_factory=dict)
    value_bound: int = 8
    diagnostics: list[str] = field(default_factory=list)

    def pred(self, pred_id: str, arg: Value, out: Value) -> bool:
        fn = self.predicates[pred_id]
        try:
            return bool(fn(arg, out))
        except (StuckError, FuelExhausted):
            return False


def _group_admits(
    group: tuple[Literal, ...], arg: Value, out: Value, ctx: SpecContext
) -> bool:
    for lit in group:
        rel = lit.atom.rel
        if isinstance(rel, EqRel):
            if out is not rel.const:
                return False
        elif isinstance(rel, NeqRel):
            if out is rel.const:
                return False
        else:
            if ctx.pred(rel.pred_id, arg, out) != lit.positive:
                return False
    return True


def group_sat(group: tuple[Literal, ...], arg: Value, ctx: SpecContext) -> bool:
    eqs = {l.atom.rel.const for l in group if isinstance(l.atom.rel, EqRel)}
    if len(eqs) > 1:
        return False
    if eqs:
        (c,) = eqs
        return _group_admits(group, arg, c, ctx)
    if any(isinstance(l.atom.rel, PredRel) for l in group):
        for w in V.iter_values(ctx.output_type, ctx.env, ctx.value_bound):
            if _group_admits(group, arg, w, ctx):
                return True
        ctx.diagnostics.append(
            f"pred-only group on f({V.render_value(arg)}) exhausted bound "
            f"{ctx.value_bound}"
        )
        return False
    return True  # Neq-only: infinite complement


def clause_sat(clause: Clause, ctx: SpecContext) -> bool:
    """Exact for Eq/Neq; Pred-only groups decided by bounded enumeration.
    Arguments are independent, so the clause is SAT iff every group is."""
    return all(group_sat(clause.group(arg), arg, ctx) for arg in clause.args())


def admissible_outputs(
    clause: Clause, argument: Value, pool: Iterable[Value], ctx: SpecContext
) -> set[Value]:
    """Pool members w for which clause ∧ f(argument)=w stays satisfiable."""
    if not clause_sat(clause, ctx):
        return set()
    group = clause.group(argument)
    return {w for w in pool if _group_admits(group, argument, w, ctx)}


# --------------------------------------------------------------------------
# Program satisfaction (standard semantics)


def satisfies(
    program: E.Program,
    formula: GroundFormula,
    ectx: EvalContext,
    spec_ctx: SpecContext,
) -> bool:
    """P |= formula: evaluate each distinct f(v) once and fold evaluation
    failures into false."""
    outputs: dict[Value, Value] = {}
    for arg in formula_args(formula):
        try:
            outputs[arg] = eval_program(program, arg, ectx)
        except (StuckError, FuelExhausted):
            return False

    def ev(f: GroundFormula) -> bool:
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, AtomF):
            a = f.atom
            out = outputs[a.arg]
            if isinstance(a.rel, EqRel):
                return out is a.rel.const
            if isinstance(a.rel, NeqRel):
                return out is not a.rel.const
            return spec_ctx.pred(a.rel.pred_id, a.arg, out)
        if isinstance(f, NotF):
            return not ev(f.inner)
        if isinstance(f, AndF):
            return all(ev(p) for p in f.parts)
        if isinstance(f, OrF):
            return any(ev(p) for p in f.parts)
        raise TypeError(f"not a GroundFormula: {f!r}")

    return ev(formula)


# --------------------------------------------------------------------------
# Witnesses and anti-specifications


class Witness:
    """Conjunction of recursive-call equalities f(arg) = result.

    Normally functional (one binding per argument); a run whose components
    assume different outputs for the same argument yields an inconsistent
    witness, which as a formula is simply unsatisfiable.
    """

    __slots__ = ("bindings", "_key")

    def __init__(self, bindings: Iterable[tuple[Value, Value]]):
        pairs = sorted(set(bindings), key=lambda p: (value_key(p[0]), value_key(p[1])))
        self.bindings: tuple[tuple[Value, Value], ...] = tuple(pairs)
        self._key = tuple(
            (value_key(a), value_key(b)) for a, b in self.bindings
        )

    @property
    def is_consistent(self) -> bool:
        seen: dict[Value, Value] = {}
        for a, b in self.bindings:
            if a in seen and seen[a] is not b:
                return False
            seen[a] = b
        return True

    def mapping(self) -> dict[Value, Value]:
        """Argument-to-result map; raises InconsistentRun on conflicts."""
        out: dict[Value, Value] = {}
        for a, b in self.bindings:
            if a in out and out[a] is not b:
                raise InconsistentRun(
                    f"f({V.render_value(a)}) bound to both "
                    f"{V.render_value(out[a])} and {V.render_value(b)}"
                )
            out[a] = b
        return out

    def __len__(self):
        return len(self.bindings)

    def __eq__(self, other):
        return isinstance(other, Witness) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        inner = " ∧ ".join(
            f"f({V.render_value(a)}) = {V.render_value(b)}" for a, b in self.bindings
        )
        return f"Witness({inner or 'true'})"


def conjoin_witness(formula: GroundFormula, witness: Witness) -> GroundFormula:
    return and_(formula, *(atom_eq(a, b) for a, b in witness.bindings))


def negate_witness(witness: Witness) -> GroundFormula:
    return or_(*(atom_neq(a, b) for a, b in witness.bindings))


class AntiSpec:
    """Monotonically growing set of unsynthesizable cores."""

    def __init__(self):
        self._cores: list[Clause] = []
        self._seen: set[Clause] = set()

    def add(self, core: Clause) -> None:
        if core not in self._seen:
            self._seen.add(core)
            self._cores.append(core)

    def add_all(self, cores: Iterable[Clause]) -> None:
        for c in cores:
            self.add(c)

    @property
    def cores(self) -> tuple[Clause, ...]:
        return tuple(self._cores)

    def __len__(self):
        return len(self._cores)

    def conjoin_negations(self, formula: GroundFormula) -> GroundFormula:
        return and_(formula, *(not_(c.formula()) for c in self._cores))


# --------------------------------------------------------------------------
# Rendering (used by --trace)


def render_atom(atom: Atom) -> str:
    arg = V.render_value(atom.arg)
    if isinstance(atom.rel, EqRel):
        return f"f({arg}) = {V.render_value(atom.rel.const)}"
    if isinstance(atom.rel, NeqRel):
        return f"f({arg}) ≠ {V.render_value(atom.rel.const)}"
    return f"{atom.rel.pred_id}(f({arg}))"


def render_formula(f: GroundFormula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, AtomF):
        return render_atom(f.atom)
    if isinstance(f, NotF):
        return f"¬({render_formula(f.inner)})"
    if isinstance(f, AndF):
        return " ∧ ".join(_paren(p) for p in f.parts)
    if isinstance(f, OrF):
        return " ∨ ".join(_paren(p) for p in f.parts)
    raise TypeError(f"not a GroundFormula: {f!r}")


def _paren(f: GroundFormula) -> str:
    if isinstance(f, (AndF, OrF)):
        return f"({render_formula(f)})"
    return render_formula(f)
