"""Bidirectional type checker with scrutinee-guarded eliminators.

unl/unr (and fst/snd through single-constructor ADTs) are only well-typed
under a match/switch branch on the syntactically identical scrutinee whose
branch establishes the matching head. Well-typed programs therefore never
get stuck on well-typed inputs: every partial eliminator is evaluated only
when its operand has the guarded shape.
"""

from __future__ import annotations

from recsynth.errors import TypeCheckError
from recsynth.lang import exprs as E
from recsynth.lang.types import AdtEnv, Fn, Named, Prod, Sum, TypeExpr, Unit

# guard context: scrutinee expr -> (adt name | None for raw sums, branch index)
Guards = dict


def typecheck(
    program: E.Program,
    env: AdtEnv,
    components: dict[str, tuple[TypeExpr, TypeExpr]] | None = None,
) -> tuple[TypeExpr, TypeExpr]:
    """Returns (input type, output type), or raises TypeCheckError."""
    comps = components or {}
    _check(program.body, program.output_type, {}, program, env, comps)
    return (program.input_type, program.output_type)


def typechecks(program, env, components=None) -> bool:
    try:
        typecheck(program, env, components)
        return True
    except TypeCheckError:
        return False


def _payload_or_unit(env: AdtEnv, adt: str, idx: int) -> TypeExpr:
    arg = env.ctors(adt)[idx].arg
    return arg if arg is not None else Unit()


def _check(e, expected, guards, program, env, comps) -> None:
    if isinstance(e, E.Inl):
        if not isinstance(expected, Sum):
            raise TypeCheckError(f"inl at non-sum type {expected!r}", e)
        _check(e.e, expected.left, guards, program, env, comps)
        return
    if isinstance(e, E.Inr):
        if not isinstance(expected, Sum):
            raise TypeCheckError(f"inr at non-sum type {expected!r}", e)
        _check(e.e, expected.right, guards, program, env, comps)
        return
    if isinstance(e, E.Pair):
        if isinstance(expected, Prod):
            _check(e.e1, expected.left, guards, program, env, comps)
            _check(e.e2, expected.right, guards, program, env, comps)
            return
        raise TypeCheckError(f"pair at non-product type {expected!r}", e)
    if isinstance(e, E.Switch):
        _check_switch(e, expected, guards, program, env, comps, checking=True)
        return
    if isinstance(e, E.MatchE):
        _check_match(e, expected, guards, program, env, comps, checking=True)
        return
    got = _infer(e, guards, program, env, comps)
    if got != expected:
        raise TypeCheckError(f"expected {expected!r}, got {got!r}", e)


def _infer(e, guards, program, env, comps) -> TypeExpr:
    if isinstance(e, E.Var):
        return program.input_type
    if isinstance(e, E.UnitE):
        return Unit()
    if isinstance(e, E.Pair):
        return Prod(
            _infer(e.e1, guards, program, env, comps),
            _infer(e.e2, guards, program, env, comps),
        )
    if isinstance(e, E.CtorE):
        if not env.has_ctor(e.name):
            raise TypeCheckError(f"unknown constructor {e.name}", e)
        adt, idx = env.ctor_site(e.name)
        payload = env.ctors(adt)[idx].arg
        if payload is None:
            if e.arg is not None:
                raise TypeCheckError(f"{e.name} takes no argument", e)
        else:
            if e.arg is None:
                raise TypeCheckError(f"{e.name} requires an argument", e)
            _check(e.arg, payload, guards, program, env, comps)
        return Named(adt)
    if isinstance(e, E.Fst):
        t = _prod_view(_infer(e.e, guards, program, env, comps), env, e)
        return t.left
    if isinstance(e, E.Snd):
        t = _prod_view(_infer(e.e, guards, program, env, comps), env, e)
        return t.right
    if isinstance(e, E.Unl):
        return _elim_sum(e.e, 0, guards, program, env, comps, e)
    if isinstance(e, E.Unr):
        return _elim_sum(e.e, 1, guards, program, env, comps, e)
    if isinstance(e, E.App):
        if e.callee == program.fname:
            _check(e.arg, program.input_type, guards, program, env, comps)
            return program.output_type
        if e.callee in comps:
            arg_t, res_t = comps[e.callee]
            _check(e.arg, arg_t, guards, program, env, comps)
            return res_t
        raise TypeCheckError(f"unknown function {e.callee}", e)
    if isinstance(e, E.CallFn):
        fn_t = _infer(e.fn, guards, program, env, comps)
        if not isinstance(fn_t, Fn):
            raise TypeCheckError(f"application of non-function type {fn_t!r}", e)
        _check(e.arg, fn_t.arg, guards, program, env, comps)
        return fn_t.res
    if isinstance(e, E.Switch):
        return _check_switch(e, None, guards, program, env, comps, checking=False)
    if isinstance(e, E.MatchE):
        return _check_match(e, None, guards, program, env, comps, checking=False)
    if isinstance(e, (E.Inl, E.Inr)):
        raise TypeCheckError("inl/inr needs a checking context", e)
    raise TypeCheckError(f"cannot type {e!r}", e)


def _prod_view(t: TypeExpr, env: AdtEnv, at) -> Prod:
    if isinstance(t, Prod):
        return t
    if isinstance(t, Named) and len(env.ctors(t.name)) == 1:
        payload = env.ctors(t.name)[0].arg
        if isinstance(payload, Prod):
            return payload
    raise TypeCheckError(f"projection from non-product type {t!r}", at)


def _elim_sum(scrut, side, guards, program, env, comps, at) -> TypeExpr:
    t = _infer(scrut, guards, program, env, comps)
    fact = guards.get(scrut)
    if isinstance(t, Sum):
        if fact != (None, side):
            raise TypeCheckError("unguarded unl/unr on sum", at)
        return t.left if side == 0 else t.right
    if isinstance(t, Named):
        ctors = env.ctors(t.name)
        if len(ctors) < 2:
            raise TypeCheckError(f"unl/unr on {t!r}", at)
        if len(ctors) > 2:
            # Deeper residue chains are not guard-trackable; match instead.
            raise TypeCheckError(f"unl/unr on {len(ctors)}-constructor ADT", at)
        if fact is None or fact[0] != t.name or (fact[1] != side):
            raise TypeCheckError("unguarded unl/unr on ADT scrutinee", at)
        return _payload_or_unit(env, t.name, side)
    raise TypeCheckError(f"unl/unr on non-sum type {t!r}", at)


def _check_switch(e, expected, guards, program, env, comps, checking):
    t = _infer(e.scrutinee, guards, program, env, comps)
    if isinstance(t, Sum):
        tag = None
    elif isinstance(t, Named) and len(env.ctors(t.name)) == 2:
        tag = t.name
    else:
        raise TypeCheckError(f"switch on non-sum type {t!r}", e)
    gl = dict(guards)
    gl[e.scrutinee] = (tag, 0)
    gr = dict(guards)
    gr[e.scrutinee] = (tag, 1)
    if checking:
        _check(e.left, expected, gl, program, env, comps)
        _check(e.right, expected, gr, program, env, comps)
        return None
    lt = _infer(e.left, gl, program, env, comps)
    rt = _infer(e.right, gr, program, env, comps)
    if lt != rt:
        raise TypeCheckError(f"switch branches disagree: {lt!r} vs {rt!r}", e)
    return lt


def _check_match(e, expected, guards, program, env, comps, checking):
    t = _infer(e.scrutinee, guards, program, env, comps)
    if not isinstance(t, Named) or t.name != e.adt:
        raise TypeCheckError(f"match on {t!r}, expected {e.adt}", e)
    ctors = env.ctors(e.adt)
    if len(e.branches) != len(ctors):
        raise TypeCheckError(
            f"match has {len(e.branches)} branches, ADT has {len(ctors)}", e
        )
    branch_types = []
    for i, b in enumerate(e.branches):
        g = dict(guards)
        g[e.scrutinee] = (e.adt, i)
        if checking:
            _check(b, expected, g, program, env, comps)
        else:
            branch_types.append(_infer(b, g, program, env, comps))
    if checking:
        return None
    first = branch_types[0]
    for bt in branch_types[1:]:
        if bt != first:
            raise TypeCheckError("match branches disagree", e)
    return first
