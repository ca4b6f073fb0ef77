"""Stock ADT declarations (Peano nat, list, tree, bool) and value helpers.

Task files declare their own ADTs; these are the conventional shapes used
by the shipped benchmarks and the test suite.
"""

from __future__ import annotations

from recsynth.lang.types import AdtEnv, Ctor, Named, Prod
from recsynth.lang import values as V

NAT = Named("nat")
LIST = Named("list")
TREE = Named("tree")
BOOL = Named("bool")

NAT_DEF = ("nat", (Ctor("O"), Ctor("S", NAT)))
LIST_DEF = ("list", (Ctor("Nil"), Ctor("Cons", Prod(NAT, LIST))))
TREE_DEF = ("tree", (Ctor("Leaf"), Ctor("Node", Prod(TREE, Prod(NAT, TREE)))))
BOOL_DEF = ("bool", (Ctor("False"), Ctor("True")))


def make_env(*defs) -> AdtEnv:
    return AdtEnv(dict(defs))


def standard_env() -> AdtEnv:
    return make_env(NAT_DEF, LIST_DEF, TREE_DEF, BOOL_DEF)


def nat_value(n: int) -> V.Value:
    v = V.mk_ctor("O")
    for _ in range(n):
        v = V.mk_ctor("S", v)
    return v


def nat_of_value(v: V.Value) -> int:
    n = 0
    while isinstance(v, V.CtorV) and v.name == "S":
        n += 1
        v = v.arg
    if not (isinstance(v, V.CtorV) and v.name == "O"):
        raise ValueError(f"not a nat: {v!r}")
    return n


def list_value(items) -> V.Value:
    out = V.mk_ctor("Nil")
    for item in reversed(list(items)):
        if isinstance(item, int):
            item = nat_value(item)
        out = V.mk_ctor("Cons", V.mk_pair(item, out))
    return out


def list_of_value(v: V.Value) -> list[V.Value]:
    items = []
    while isinstance(v, V.CtorV) and v.name == "Cons":
        items.append(v.arg.first)
        v = v.arg.second
    if not (isinstance(v, V.CtorV) and v.name == "Nil"):
        raise ValueError(f"not a list: {v!r}")
    return items


def leaf() -> V.Value:
    return V.mk_ctor("Leaf")


def node(left: V.Value, val, right: V.Value) -> V.Value:
    if isinstance(val, int):
        val = nat_value(val)
    return V.mk_ctor("Node", V.mk_pair(left, V.mk_pair(val, right)))


def bool_value(b: bool) -> V.Value:
    return V.mk_ctor("True" if b else "False")


def truthy(v: V.Value) -> bool:
    return isinstance(v, V.CtorV) and v.name == "True"
