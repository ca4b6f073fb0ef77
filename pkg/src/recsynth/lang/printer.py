"""Stable ML-like concrete syntax for programs and types."""

from __future__ import annotations

from recsynth.lang import exprs as E
from recsynth.lang.types import AdtEnv, render_type


def render_expr(e: E.Expr, env: AdtEnv) -> str:
    if isinstance(e, E.Var):
        return "x"
    if isinstance(e, E.UnitE):
        return "unit"
    if isinstance(e, E.App):
        return f"{e.callee} {_atom(e.arg, env)}"
    if isinstance(e, E.Pair):
        return f"({render_expr(e.e1, env)}, {render_expr(e.e2, env)})"
    if isinstance(e, E.Fst):
        return f"fst {_atom(e.e, env)}"
    if isinstance(e, E.Snd):
        return f"snd {_atom(e.e, env)}"
    if isinstance(e, E.Inl):
        return f"inl {_atom(e.e, env)}"
    if isinstance(e, E.Inr):
        return f"inr {_atom(e.e, env)}"
    if isinstance(e, E.Unl):
        return f"unl {_atom(e.e, env)}"
    if isinstance(e, E.Unr):
        return f"unr {_atom(e.e, env)}"
    if isinstance(e, E.Switch):
        return (
            f"(switch {_atom(e.scrutinee, env)} on inl -> {render_expr(e.left, env)}"
            f" | inr -> {render_expr(e.right, env)})"
        )
    if isinstance(e, E.CtorE):
        if e.arg is None:
            return e.name
        return f"{e.name} {_atom(e.arg, env)}"
    if isinstance(e, E.MatchE):
        parts = [f"(match {_atom(e.scrutinee, env)} with"]
        for ctor, b in zip(env.ctors(e.adt), e.branches):
            parts.append(f"| {ctor.name} -> {render_expr(b, env)}")
        return " ".join(parts) + ")"
    if isinstance(e, E.CallFn):
        return f"apply {_atom(e.fn, env)} {_atom(e.arg, env)}"
    raise TypeError(f"not an Expr: {e!r}")


def _atom(e: E.Expr, env: AdtEnv) -> str:
    if isinstance(
        e, (E.Var, E.UnitE, E.Pair, E.MatchE, E.Switch)
    ) or (isinstance(e, E.CtorE) and e.arg is None):
        return render_expr(e, env)
    return f"({render_expr(e, env)})"


def render_program(p: E.Program, env: AdtEnv) -> str:
    return (
        f"rec {p.fname} (x : {render_type(p.input_type)})"
        f" : {render_type(p.output_type)} = {render_expr(p.body, env)}"
    )


def render_program_pretty(p: E.Program, env: AdtEnv) -> str:
    """Multi-line rendering of a top-level match, for human output."""
    head = (
        f"rec {p.fname} (x : {render_type(p.input_type)})"
        f" : {render_type(p.output_type)} ="
    )
    body = p.body
    if isinstance(body, E.MatchE):
        lines = [head, f"  match {_atom(body.scrutinee, env)} with"]
        for ctor, b in zip(env.ctors(body.adt), body.branches):
            lines.append(f"  | {ctor.name} -> {render_expr(b, env)}")
        return "\n".join(lines)
    return f"{head} {render_expr(body, env)}"
