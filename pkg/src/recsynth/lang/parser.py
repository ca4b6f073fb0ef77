"""Recursive-descent parser for the concrete program/type syntax.

Accepts exactly what the printer emits, plus integer sugar for Peano
naturals (``2`` parses as ``S (S O)`` when the environment declares S/O).
"""

from __future__ import annotations

import re

from recsynth.errors import TaskParseError
from recsynth.lang import exprs as E
from recsynth.lang.types import AdtEnv, Fn, Named, Prod, Sum, TypeExpr, Unit

_TOKEN = re.compile(
    r"\s*(->|[()*+,:=|]|[A-Za-z_][A-Za-z0-9_']*|\d+)", re.S
)

_KEYWORDS = {
    "rec", "match", "with", "switch", "on", "inl", "inr", "unl", "unr",
    "fst", "snd", "unit", "apply", "x",
}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise TaskParseError(
                        f"lexical error at offset {pos}: {text[pos:pos+20]!r}"
                    )
                break
            self.toks.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self) -> str:
        if self.i >= len(self.toks):
            raise TaskParseError("unexpected end of input")
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise TaskParseError(f"expected {tok!r}, got {got!r} in {self.text!r}")

    def done(self) -> bool:
        return self.i >= len(self.toks)


def parse_type(text: str) -> TypeExpr:
    toks = _Tokens(text)
    ty = _type(toks)
    if not toks.done():
        raise TaskParseError(f"trailing tokens in type {text!r}")
    return ty


def _type(toks: _Tokens) -> TypeExpr:
    left = _type_atom(toks)
    op = toks.peek()
    if op in ("*", "+", "->"):
        toks.next()
        right = _type_atom(toks)
        if op == "*":
            return Prod(left, right)
        if op == "+":
            return Sum(left, right)
        return Fn(left, right)
    return left


def _type_atom(toks: _Tokens) -> TypeExpr:
    tok = toks.next()
    if tok == "unit":
        return Unit()
    if tok == "(":
        ty = _type(toks)
        toks.expect(")")
        return ty
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
        return Named(tok)
    raise TaskParseError(f"bad type token {tok!r}")


def parse_program(text: str, env: AdtEnv) -> E.Program:
    toks = _Tokens(text)
    toks.expect("rec")
    fname = toks.next()
    toks.expect("(")
    toks.expect("x")
    toks.expect(":")
    in_ty = _type(toks)
    toks.expect(")")
    toks.expect(":")
    out_ty = _type(toks)
    toks.expect("=")
    body = _expr(toks, env)
    if not toks.done():
        raise TaskParseError(f"trailing tokens after program body: {toks.peek()!r}")
    return E.Program(fname, body, in_ty, out_ty)


def parse_expr(text: str, env: AdtEnv) -> E.Expr:
    toks = _Tokens(text)
    e = _expr(toks, env)
    if not toks.done():
        raise TaskParseError(f"trailing tokens after expression: {toks.peek()!r}")
    return e


def _expr(toks: _Tokens, env: AdtEnv) -> E.Expr:
    tok = toks.peek()
    if tok == "match":
        toks.next()
        scrut = _atom(toks, env)
        toks.expect("with")
        branches: dict[str, E.Expr] = {}
        adt = None
        while toks.peek() == "|":
            toks.next()
            cname = toks.next()
            if not env.has_ctor(cname):
                raise TaskParseError(f"unknown constructor {cname!r} in match")
            site_adt, _ = env.ctor_site(cname)
            if adt is None:
                adt = site_adt
            elif adt != site_adt:
                raise TaskParseError("match branches mix ADTs")
            toks.expect("->")
            branches[cname] = _expr(toks, env)
        if adt is None:
            raise TaskParseError("match with no branches")
        ctors = env.ctors(adt)
        missing = [c.name for c in ctors if c.name not in branches]
        if missing:
            raise TaskParseError(f"match missing branches for {missing}")
        ordered = tuple(branches[c.name] for c in ctors)
        return E.MatchE(scrut, adt, ordered)
    if tok == "switch":
        toks.next()
        scrut = _atom(toks, env)
        toks.expect("on")
        toks.expect("inl")
        toks.expect("->")
        left = _expr(toks, env)
        toks.expect("|")
        toks.expect("inr")
        toks.expect("->")
        right = _expr(toks, env)
        return E.Switch(scrut, left, right)
    return _app(toks, env)


_PREFIX = {
    "fst": E.Fst, "snd": E.Snd, "inl": E.Inl, "inr": E.Inr,
    "unl": E.Unl, "unr": E.Unr,
}


def _app(toks: _Tokens, env: AdtEnv) -> E.Expr:
    tok = toks.peek()
    if tok in _PREFIX:
        toks.next()
        return _PREFIX[tok](_atom(toks, env))
    if tok == "apply":
        toks.next()
        fn = _atom(toks, env)
        arg = _atom(toks, env)
        return E.CallFn(fn, arg)
    if tok is not None and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
        if env.has_ctor(tok):
            toks.next()
            if env.payload_type(tok) is None:
                return E.CtorE(tok)
            return E.CtorE(tok, _atom(toks, env))
        if tok not in _KEYWORDS:
            toks.next()
            return E.App(tok, _atom(toks, env))
    return _atom(toks, env)


def _atom(toks: _Tokens, env: AdtEnv) -> E.Expr:
    tok = toks.next()
    if tok == "x":
        return E.Var()
    if tok == "unit":
        return E.UnitE()
    if tok.isdigit():
        return _nat_expr(int(tok), env)
    if tok == "(":
        if toks.peek() == ")":
            toks.next()
            return E.UnitE()
        e1 = _expr(toks, env)
        if toks.peek() == ",":
            toks.next()
            e2 = _expr(toks, env)
            toks.expect(")")
            return E.Pair(e1, e2)
        toks.expect(")")
        return e1
    if env.has_ctor(tok) and env.payload_type(tok) is None:
        return E.CtorE(tok)
    raise TaskParseError(f"unexpected token {tok!r}")


def _nat_expr(n: int, env: AdtEnv) -> E.Expr:
    if not (env.has_ctor("O") and env.has_ctor("S")):
        raise TaskParseError("integer sugar needs O/S constructors")
    e: E.Expr = E.CtorE("O")
    for _ in range(n):
        e = E.CtorE("S", e)
    return e
