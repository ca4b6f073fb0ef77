"""First-order values: unit, pairs, tagged sums, constructor terms, opaque callables.

Values are hash-consed: the ``mk_*`` constructors intern nodes so structural
equality is pointer equality and sizes/hashes are computed once.
"""

from __future__ import annotations

from typing import Iterator

from recsynth.lang.types import AdtEnv, Fn, Named, Prod, Sum, TypeExpr, Unit


class Value:
    __slots__ = ("size", "_hash")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other  # interning makes identity == structural equality

    def __repr__(self):
        return render_value(self)


class UnitV(Value):
    __slots__ = ()

    def __init__(self):
        self.size = 1
        self._hash = hash(("unit",))


class PairV(Value):
    __slots__ = ("first", "second")

    def __init__(self, first: Value, second: Value):
        self.first = first
        self.second = second
        self.size = 1 + first.size + second.size
        self._hash = hash(("pair", first._hash, second._hash))


class InlV(Value):
    __slots__ = ("inner",)

    def __init__(self, inner: Value):
        self.inner = inner
        self.size = 1 + inner.size
        self._hash = hash(("inl", inner._hash))


class InrV(Value):
    __slots__ = ("inner",)

    def __init__(self, inner: Value):
        self.inner = inner
        self.size = 1 + inner.size
        self._hash = hash(("inr", inner._hash))


class CtorV(Value):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Value | None):
        self.name = name
        self.arg = arg
        self.size = 1 + (arg.size if arg is not None else 0)
        self._hash = hash(("ctor", name, arg._hash if arg is not None else 0))


class OpaqueFn(Value):
    """Callable leaf for function-typed inputs; applied, never constructed."""

    __slots__ = ("fn_id",)

    def __init__(self, fn_id: str):
        self.fn_id = fn_id
        self.size = 1
        self._hash = hash(("opaque", fn_id))


_UNIT = UnitV()
_pair_cache: dict[tuple[int, int], PairV] = {}
_inl_cache: dict[int, InlV] = {}
_inr_cache: dict[int, InrV] = {}
_ctor_cache: dict[tuple[str, int], CtorV] = {}
_opaque_cache: dict[str, OpaqueFn] = {}


def mk_unit() -> UnitV:
    return _UNIT


def mk_pair(first: Value, second: Value) -> PairV:
    key = (id(first), id(second))
    v = _pair_cache.get(key)
    if v is None:
        v = _pair_cache[key] = PairV(first, second)
    return v


def mk_inl(inner: Value) -> InlV:
    v = _inl_cache.get(id(inner))
    if v is None:
        v = _inl_cache[id(inner)] = InlV(inner)
    return v


def mk_inr(inner: Value) -> InrV:
    v = _inr_cache.get(id(inner))
    if v is None:
        v = _inr_cache[id(inner)] = InrV(inner)
    return v


def mk_ctor(name: str, arg: Value | None = None) -> CtorV:
    key = (name, id(arg))
    v = _ctor_cache.get(key)
    if v is None:
        v = _ctor_cache[key] = CtorV(name, arg)
    return v


def mk_opaque(fn_id: str) -> OpaqueFn:
    v = _opaque_cache.get(fn_id)
    if v is None:
        v = _opaque_cache[fn_id] = OpaqueFn(fn_id)
    return v


def value_size(v: Value) -> int:
    """Node count of a value; compositional (node = 1 + children)."""
    return v.size


_key_cache: dict[int, tuple] = {}


def value_key(v: Value):
    """Deterministic total ordering key: by size first, then structure."""
    k = _key_cache.get(id(v))
    if k is not None:
        return k
    if isinstance(v, UnitV):
        k = (1, 0)
    elif isinstance(v, OpaqueFn):
        k = (1, 1, v.fn_id)
    elif isinstance(v, CtorV):
        k = (v.size, 2, v.name) + (() if v.arg is None else (value_key(v.arg),))
    elif isinstance(v, PairV):
        k = (v.size, 3, value_key(v.first), value_key(v.second))
    elif isinstance(v, InlV):
        k = (v.size, 4, value_key(v.inner))
    elif isinstance(v, InrV):
        k = (v.size, 5, value_key(v.inner))
    else:
        raise TypeError(f"not a Value: {v!r}")
    _key_cache[id(v)] = k
    return k


def children(v: Value) -> tuple[Value, ...]:
    if isinstance(v, PairV):
        return (v.first, v.second)
    if isinstance(v, (InlV, InrV)):
        return (v.inner,)
    if isinstance(v, CtorV) and v.arg is not None:
        return (v.arg,)
    return ()


def is_subterm(v: Value, w: Value) -> bool:
    """Reflexive subterm relation on value trees."""
    if v is w:
        return True
    if v.size >= w.size:
        return False
    return any(is_subterm(v, c) for c in children(w))


def precedes(v: Value, w: Value) -> bool:
    """Well-founded order used to restrict recursive calls.

    Pairs compare componentwise (recursively), anything else by proper
    subterm. Deliberately does not relate e.g. ([2],[1]) below ([1;2],[]).
    """
    if v is w:
        return False
    if isinstance(v, PairV) and isinstance(w, PairV):
        le1 = v.first is w.first or precedes(v.first, w.first)
        le2 = v.second is w.second or precedes(v.second, w.second)
        return le1 and le2
    return v.size < w.size and any(is_subterm(v, c) for c in children(w))


def iter_values(ty: TypeExpr, env: AdtEnv, max_size: int) -> Iterator[Value]:
    """All values of ``ty`` with size <= max_size, in (size, structure) order."""
    out = []
    for n in range(1, max_size + 1):
        out.extend(_values_exact(ty, env, n))
    out.sort(key=value_key)
    seen = set()
    for v in out:
        if id(v) not in seen:
            seen.add(id(v))
            yield v


def _values_exact(ty: TypeExpr, env: AdtEnv, n: int) -> list[Value]:
    if n < 1:
        return []
    if isinstance(ty, Unit):
        return [mk_unit()] if n == 1 else []
    if isinstance(ty, Fn):
        return []  # opaque callables are not enumerable
    if isinstance(ty, Prod):
        out = []
        for i in range(1, n - 1):
            for a in _values_exact(ty.left, env, i):
                for b in _values_exact(ty.right, env, n - 1 - i):
                    out.append(mk_pair(a, b))
        return out
    if isinstance(ty, Sum):
        return [mk_inl(v) for v in _values_exact(ty.left, env, n - 1)] + [
            mk_inr(v) for v in _values_exact(ty.right, env, n - 1)
        ]
    if isinstance(ty, Named):
        out = []
        for c in env.ctors(ty.name):
            if c.arg is None:
                if n == 1:
                    out.append(mk_ctor(c.name))
            else:
                for a in _values_exact(c.arg, env, n - 1):
                    out.append(mk_ctor(c.name, a))
        return out
    raise TypeError(f"not a TypeExpr: {ty!r}")


def sum_view(v: CtorV, env: AdtEnv) -> Value:
    """View a constructor value through its ADT's sum-of-products encoding,
    one level deep: the payload wrapped in the inl/inr spine for its index.
    Inner constructor values stay sugared."""
    adt, idx = env.ctor_site(v.name)
    n = len(env.ctors(adt))
    payload = v.arg if v.arg is not None else mk_unit()
    if n == 1:
        return payload
    out = payload if idx == n - 1 else mk_inl(payload)
    for _ in range(idx):
        out = mk_inr(out)
    return out


def desugar_value(v: Value, env: AdtEnv) -> Value:
    """Fully expand constructor values into raw sums/products."""
    if isinstance(v, CtorV):
        adt, idx = env.ctor_site(v.name)
        n = len(env.ctors(adt))
        payload = desugar_value(v.arg, env) if v.arg is not None else mk_unit()
        out = payload if idx == n - 1 else mk_inl(payload)
        for _ in range(idx):
            out = mk_inr(out)
        return out
    if isinstance(v, PairV):
        return mk_pair(desugar_value(v.first, env), desugar_value(v.second, env))
    if isinstance(v, InlV):
        return mk_inl(desugar_value(v.inner, env))
    if isinstance(v, InrV):
        return mk_inr(desugar_value(v.inner, env))
    return v


def infer_value_type(v: Value, env: AdtEnv) -> TypeExpr | None:
    """Type of a value when determined by its structure (constructor heads).

    Raw inl/inr values have ambiguous types and return None.
    """
    if isinstance(v, UnitV):
        return Unit()
    if isinstance(v, CtorV):
        adt, _ = env.ctor_site(v.name)
        return Named(adt)
    if isinstance(v, PairV):
        lt = infer_value_type(v.first, env)
        rt = infer_value_type(v.second, env)
        if lt is None or rt is None:
            return None
        return Prod(lt, rt)
    return None


def type_checks(v: Value, ty: TypeExpr, env: AdtEnv) -> bool:
    if isinstance(ty, Unit):
        return isinstance(v, UnitV)
    if isinstance(ty, Prod):
        return (
            isinstance(v, PairV)
            and type_checks(v.first, ty.left, env)
            and type_checks(v.second, ty.right, env)
        )
    if isinstance(ty, Sum):
        if isinstance(v, InlV):
            return type_checks(v.inner, ty.left, env)
        if isinstance(v, InrV):
            return type_checks(v.inner, ty.right, env)
        return False
    if isinstance(ty, Named):
        if not isinstance(v, CtorV) or not env.has_ctor(v.name):
            return False
        adt, _ = env.ctor_site(v.name)
        if adt != ty.name:
            return False
        payload = env.payload_type(v.name)
        if payload is None:
            return v.arg is None
        return v.arg is not None and type_checks(v.arg, payload, env)
    if isinstance(ty, Fn):
        return isinstance(v, OpaqueFn)
    raise TypeError(f"not a TypeExpr: {ty!r}")


def render_value(v: Value) -> str:
    """Compact stable rendering; Peano nats print as integers and
    Cons/Nil lists print as [a; b; ...] when the spine is regular."""
    n = _as_nat(v)
    if n is not None:
        return str(n)
    items = _as_list(v)
    if items is not None:
        return "[" + "; ".join(render_value(x) for x in items) + "]"
    if isinstance(v, UnitV):
        return "unit"
    if isinstance(v, PairV):
        return f"({render_value(v.first)}, {render_value(v.second)})"
    if isinstance(v, InlV):
        return f"inl {render_value(v.inner)}"
    if isinstance(v, InrV):
        return f"inr {render_value(v.inner)}"
    if isinstance(v, OpaqueFn):
        return f"<fn {v.fn_id}>"
    if isinstance(v, CtorV):
        if v.arg is None:
            return v.name
        args = _spine(v.arg)
        return f"{v.name}({', '.join(render_value(a) for a in args)})"
    raise TypeError(f"not a Value: {v!r}")


def _spine(v: Value) -> list[Value]:
    # Right-nested pair spine, for printing multi-argument constructors.
    out = []
    while isinstance(v, PairV):
        out.append(v.first)
        v = v.second
    out.append(v)
    return out


def _as_nat(v: Value) -> int | None:
    n = 0
    while isinstance(v, CtorV) and v.name == "S" and v.arg is not None:
        n += 1
        v = v.arg
    if isinstance(v, CtorV) and v.name == "O" and v.arg is None:
        return n
    return None


def _as_list(v: Value) -> list[Value] | None:
    items = []
    while True:
        if isinstance(v, CtorV) and v.name == "Nil" and v.arg is None:
            return items
        if (
            isinstance(v, CtorV)
            and v.name == "Cons"
            and isinstance(v.arg, PairV)
        ):
            items.append(v.arg.first)
            v = v.arg.second
            continue
        return None
