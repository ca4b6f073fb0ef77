"""Expression and program ASTs for the single-variable recursive core language."""

from __future__ import annotations

from dataclasses import dataclass, field

from recsynth.lang.types import AdtEnv, TypeExpr
from recsynth.lang import values as V


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    """The single bound variable x (the function input)."""

    __slots__ = ()


@dataclass(frozen=True)
class UnitE(Expr):
    __slots__ = ()


@dataclass(frozen=True)
class App(Expr):
    """Application of the recursive function (callee == fname) or a named
    context component."""

    callee: str
    arg: Expr


@dataclass(frozen=True)
class Pair(Expr):
    e1: Expr
    e2: Expr


@dataclass(frozen=True)
class Fst(Expr):
    e: Expr


@dataclass(frozen=True)
class Snd(Expr):
    e: Expr


@dataclass(frozen=True)
class Inl(Expr):
    e: Expr


@dataclass(frozen=True)
class Inr(Expr):
    e: Expr


@dataclass(frozen=True)
class Unl(Expr):
    e: Expr


@dataclass(frozen=True)
class Unr(Expr):
    e: Expr


@dataclass(frozen=True)
class Switch(Expr):
    scrutinee: Expr
    left: Expr
    right: Expr


@dataclass(frozen=True)
class CtorE(Expr):
    name: str
    arg: Expr | None = None


@dataclass(frozen=True)
class MatchE(Expr):
    """Per-constructor branches, in declaration order; branches do not bind."""

    scrutinee: Expr
    adt: str
    branches: tuple[Expr, ...]


@dataclass(frozen=True)
class CallFn(Expr):
    """Application of an opaque callable value to an argument."""

    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Program:
    fname: str
    body: Expr
    input_type: TypeExpr
    output_type: TypeExpr


def expr_children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Var, UnitE)):
        return ()
    if isinstance(e, App):
        return (e.arg,)
    if isinstance(e, Pair):
        return (e.e1, e.e2)
    if isinstance(e, (Fst, Snd, Inl, Inr, Unl, Unr)):
        return (e.e,)
    if isinstance(e, Switch):
        return (e.scrutinee, e.left, e.right)
    if isinstance(e, CtorE):
        return () if e.arg is None else (e.arg,)
    if isinstance(e, MatchE):
        return (e.scrutinee,) + e.branches
    if isinstance(e, CallFn):
        return (e.fn, e.arg)
    raise TypeError(f"not an Expr: {e!r}")


def expr_size(e: Expr) -> int:
    """Node count on the sugared AST (Ctor/Match count as one node)."""
    return 1 + sum(expr_size(c) for c in expr_children(e))


def desugar_expr(e: Expr, env: AdtEnv) -> Expr:
    """Rewrite Ctor/Match into inl/inr/switch chains over the ADT encoding."""
    if isinstance(e, CtorE):
        adt, idx = env.ctor_site(e.name)
        n = len(env.ctors(adt))
        payload = desugar_expr(e.arg, env) if e.arg is not None else UnitE()
        out = payload if idx == n - 1 else Inl(payload)
        for _ in range(idx):
            out = Inr(out)
        return out
    if isinstance(e, MatchE):
        branches = [desugar_expr(b, env) for b in e.branches]
        return _desugar_match(desugar_expr(e.scrutinee, env), branches)
    if isinstance(e, (Var, UnitE)):
        return e
    if isinstance(e, App):
        return App(e.callee, desugar_expr(e.arg, env))
    if isinstance(e, Pair):
        return Pair(desugar_expr(e.e1, env), desugar_expr(e.e2, env))
    if isinstance(e, Fst):
        return Fst(desugar_expr(e.e, env))
    if isinstance(e, Snd):
        return Snd(desugar_expr(e.e, env))
    if isinstance(e, Inl):
        return Inl(desugar_expr(e.e, env))
    if isinstance(e, Inr):
        return Inr(desugar_expr(e.e, env))
    if isinstance(e, Unl):
        return Unl(desugar_expr(e.e, env))
    if isinstance(e, Unr):
        return Unr(desugar_expr(e.e, env))
    if isinstance(e, Switch):
        return Switch(
            desugar_expr(e.scrutinee, env),
            desugar_expr(e.left, env),
            desugar_expr(e.right, env),
        )
    if isinstance(e, CallFn):
        return CallFn(desugar_expr(e.fn, env), desugar_expr(e.arg, env))
    raise TypeError(f"not an Expr: {e!r}")


def _desugar_match(scrut_base: Expr, branches: list[Expr]) -> Expr:
    if len(branches) == 1:
        return branches[0]
    # switch s on inl -> b0 | inr -> (switch (unr s) on inl -> b1 | ...)
    scrut = scrut_base
    rest = branches
    chains: list[tuple[Expr, Expr]] = []
    while len(rest) > 2:
        chains.append((scrut, rest[0]))
        rest = rest[1:]
        scrut = Unr(scrut)
    out = Switch(scrut, rest[0], rest[1])
    for s, b in reversed(chains):
        out = Switch(s, b, out)
    return out


def desugar_program(p: Program, env: AdtEnv) -> Program:
    return Program(p.fname, desugar_expr(p.body, env), p.input_type, p.output_type)
