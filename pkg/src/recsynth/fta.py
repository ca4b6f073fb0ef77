"""Bottom-up finite tree automata over program syntax.

States are tuples of typed values (one component per intersected base
automaton) with a typed bottom element per component for never-evaluated
branches. Provides reachability reduction, emptiness, intersection,
minimum-cost accepting-run extraction, and cost-ordered run enumeration.
All operations are deterministic: states carry a canonical sort order and
ties break on (symbol label, child order).
"""

from __future__ import annotations

import heapq
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterator

from recsynth.errors import StateBlowup
from recsynth.lang import values as V
from recsynth.lang.types import TypeExpr, render_type, type_key
from recsynth.lang.values import Value, value_key

DEFAULT_STATE_CAP = 200_000


@dataclass(frozen=True)
class AlphabetSymbol:
    label: str
    arity: int
    result_type: TypeExpr
    arg_types: tuple[TypeExpr, ...]

    def __post_init__(self):
        assert self.arity == len(self.arg_types)

    def key(self):
        return (self.label, type_key(self.result_type), tuple(type_key(t) for t in self.arg_types))

    def __repr__(self):
        return self.label


class FtaState:
    """Payload is a tuple of Value-or-None components (None is the typed
    bottom for unevaluated branches); all components share one type."""

    __slots__ = ("payload", "stype", "_hash", "_key")

    def __init__(self, payload: tuple[Value | None, ...], stype: TypeExpr):
        self.payload = payload
        self.stype = stype
        self._hash = hash((payload, type_key(stype)))
        self._key = None

    @property
    def width(self) -> int:
        return len(self.payload)

    @property
    def is_all_bottom(self) -> bool:
        return all(c is None for c in self.payload)

    def key(self):
        if self._key is None:
            self._key = (
                type_key(self.stype),
                tuple((0,) if c is None else (1, value_key(c)) for c in self.payload),
            )
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, FtaState)
            and self.payload == other.payload
            and self.stype == other.stype
        )

    def __repr__(self):
        inner = ",".join("⊥" if c is None else V.render_value(c) for c in self.payload)
        return f"({inner})" if self.width > 1 else inner or "()"


class Fta:
    """Immutable automaton; build through FtaBuilder."""

    __slots__ = (
        "states",
        "finals",
        "transitions",
        "width",
        "_by_result",
        "_by_symbol",
        "_index_of",
    )

    def __init__(
        self,
        states: tuple[FtaState, ...],
        finals: frozenset[int],
        transitions: tuple[tuple[AlphabetSymbol, tuple[int, ...], int], ...],
        width: int,
    ):
        self.states = states
        self.finals = finals
        self.transitions = transitions
        self.width = width
        self._by_result = None
        self._by_symbol = None
        self._index_of = None

    def index_of(self, state: FtaState) -> int | None:
        if self._index_of is None:
            self._index_of = {s: i for i, s in enumerate(self.states)}
        return self._index_of.get(state)

    def by_result(self) -> dict[int, list[tuple[AlphabetSymbol, tuple[int, ...], int]]]:
        if self._by_result is None:
            idx = defaultdict(list)
            for t in self.transitions:
                idx[t[2]].append(t)
            self._by_result = dict(idx)
        return self._by_result

    def by_symbol(self) -> dict[AlphabetSymbol, list[tuple[AlphabetSymbol, tuple[int, ...], int]]]:
        if self._by_symbol is None:
            idx = defaultdict(list)
            for t in self.transitions:
                idx[t[0]].append(t)
            self._by_symbol = dict(idx)
        return self._by_symbol

    @property
    def final_states(self) -> tuple[FtaState, ...]:
        return tuple(self.states[i] for i in sorted(self.finals))

    def stats(self) -> dict:
        return {
            "states": len(self.states),
            "transitions": len(self.transitions),
            "finals": len(self.finals),
            "recursion_edges": sum(
                1 for t in self.transitions if t[0].label.startswith("app:")
            ),
        }

    def dump(self) -> str:
        lines = []
        for sym, args, res in self.transitions:
            arg_s = ",".join(repr(self.states[a]) for a in args)
            mark = " [final]" if res in self.finals else ""
            lines.append(f"{sym.label}({arg_s}) -> {self.states[res]!r}{mark}")
        return "\n".join(lines)


class FtaBuilder:
    def __init__(self, width: int = 1, state_cap: int = DEFAULT_STATE_CAP):
        self.width = width
        self.state_cap = state_cap
        self._states: list[FtaState] = []
        self._ids: dict[FtaState, int] = {}
        self._transitions: set[tuple[AlphabetSymbol, tuple[int, ...], int]] = set()
        self._finals: set[int] = set()

    def state_id(self, state: FtaState) -> int:
        sid = self._ids.get(state)
        if sid is None:
            if len(self._states) >= self.state_cap:
                raise StateBlowup(f"state count exceeded cap {self.state_cap}")
            sid = len(self._states)
            self._states.append(state)
            self._ids[state] = sid
        return sid

    def has_state(self, state: FtaState) -> bool:
        return state in self._ids

    def add_transition(self, sym: AlphabetSymbol, args: tuple[int, ...], result: int):
        self._transitions.add((sym, args, result))

    def set_final(self, sid: int):
        self._finals.add(sid)

    def build(self) -> Fta:
        # canonical order: sort states, remap ids
        order = sorted(range(len(self._states)), key=lambda i: self._states[i].key())
        remap = {old: new for new, old in enumerate(order)}
        states = tuple(self._states[i] for i in order)
        transitions = sorted(
            (
                (sym, tuple(remap[a] for a in args), remap[res])
                for sym, args, res in self._transitions
            ),
            key=lambda t: (t[0].key(), t[1], t[2]),
        )
        finals = frozenset(remap[i] for i in self._finals)
        return Fta(states, finals, tuple(transitions), self.width)


# --------------------------------------------------------------------------
# Reachability, emptiness, reduction


def derivable_set(fta: Fta) -> set[int]:
    """States derivable bottom-up."""
    waiting = defaultdict(list)  # state -> transition indexes needing it
    derivable: set[int] = set()
    queue: deque[int] = deque()
    remaining: dict[int, int] = {}
    for i, (sym, args, res) in enumerate(fta.transitions):
        remaining[i] = len(args)
        for a in args:
            waiting[a].append(i)
        if len(args) == 0 and res not in derivable:
            derivable.add(res)
            queue.append(res)
    while queue:
        q = queue.popleft()
        for ti in waiting.get(q, ()):  # each occurrence decrements once
            remaining[ti] -= 1
        # re-scan zero-count transitions lazily
        for ti in waiting.get(q, ()):
            if remaining[ti] == 0:
                res = fta.transitions[ti][2]
                if res not in derivable:
                    derivable.add(res)
                    queue.append(res)
                remaining[ti] = -1  # fired
    return derivable


def is_empty(fta: Fta) -> bool:
    if not fta.finals:
        return True
    return not (derivable_set(fta) & fta.finals)


def reduce_fta(fta: Fta) -> Fta:
    """Language-preserving removal of non-derivable and non-co-reachable
    states (and transitions touching them)."""
    fwd = derivable_set(fta)
    live_transitions = [
        t for t in fta.transitions if t[2] in fwd and all(a in fwd for a in t[1])
    ]
    co: set[int] = set(f for f in fta.finals if f in fwd)
    by_result = defaultdict(list)
    for t in live_transitions:
        by_result[t[2]].append(t)
    queue = deque(co)
    while queue:
        q = queue.popleft()
        for sym, args, res in by_result.get(q, ()):
            for a in args:
                if a not in co:
                    co.add(a)
                    queue.append(a)
    keep = fwd & co
    builder = FtaBuilder(fta.width, state_cap=DEFAULT_STATE_CAP * 4)
    newid = {}
    for i in sorted(keep):
        newid[i] = builder.state_id(fta.states[i])
    for sym, args, res in live_transitions:
        if res in keep and all(a in keep for a in args):
            builder.add_transition(sym, tuple(newid[a] for a in args), newid[res])
    for f in fta.finals:
        if f in keep:
            builder.set_final(newid[f])
    return builder.build()


# --------------------------------------------------------------------------
# Intersection


def intersect(
    a: Fta,
    b: Fta,
    state_cap: int = DEFAULT_STATE_CAP,
    deadline=None,
) -> Fta:
    """Product automaton accepting L(a) ∩ L(b); result is reduced.

    Only reachable state pairs are materialised; payloads concatenate.
    """
    ta_by_sym = a.by_symbol()
    tb_by_sym = b.by_symbol()
    common = sorted(set(ta_by_sym) & set(tb_by_sym), key=lambda s: s.key())

    # per-symbol positional indexes
    ia: dict[AlphabetSymbol, dict[tuple[int, int], list]] = {}
    ib: dict[AlphabetSymbol, dict[tuple[int, int], list]] = {}
    for sym in common:
        da = defaultdict(list)
        for t in ta_by_sym[sym]:
            for p, arg in enumerate(t[1]):
                da[(p, arg)].append(t)
        ia[sym] = dict(da)
        db = defaultdict(list)
        for t in tb_by_sym[sym]:
            for p, arg in enumerate(t[1]):
                db[(p, arg)].append(t)
        ib[sym] = dict(db)

    builder = FtaBuilder(a.width + b.width, state_cap=state_cap)
    discovered: dict[tuple[int, int], int] = {}
    queue: deque[tuple[int, int]] = deque()
    emitted: set[tuple[AlphabetSymbol, int, int]] = set()

    def product_state(pa: int, pb: int) -> int:
        key = (pa, pb)
        sid = discovered.get(key)
        if sid is None:
            sa, sb = a.states[pa], b.states[pb]
            if sa.stype != sb.stype:
                raise StateBlowup("intersect: component state types disagree")
            st = FtaState(sa.payload + sb.payload, sa.stype)
            sid = builder.state_id(st)
            discovered[key] = sid
            if pa in a.finals and pb in b.finals:
                builder.set_final(sid)
            queue.append(key)
        return sid

    def try_pair(sym, t_a, t_b, ready: set[tuple[int, int]]):
        key = (sym, id(t_a), id(t_b))
        if key in emitted:
            return
        args_a, args_b = t_a[1], t_b[1]
        pairs = tuple(zip(args_a, args_b))
        if all(p in discovered for p in pairs):
            emitted.add(key)
            arg_ids = tuple(discovered[p] for p in pairs)
            res = product_state(t_a[2], t_b[2])
            builder.add_transition(sym, arg_ids, res)

    # seed from nullary transitions
    for sym in common:
        if sym.arity != 0:
            continue
        for t_a in ta_by_sym[sym]:
            for t_b in tb_by_sym[sym]:
                emitted.add((sym, id(t_a), id(t_b)))
                res = product_state(t_a[2], t_b[2])
                builder.add_transition(sym, (), res)

    while queue:
        if deadline is not None:
            deadline.check()
        pa, pb = queue.popleft()
        for sym in common:
            if sym.arity == 0:
                continue
            da = ia[sym]
            db = ib[sym]
            for p in range(sym.arity):
                la = da.get((p, pa))
                if not la:
                    continue
                lb = db.get((p, pb))
                if not lb:
                    continue
                for t_a in la:
                    for t_b in lb:
                        try_pair(sym, t_a, t_b, discovered.keys())

    return reduce_fta(builder.build())


# --------------------------------------------------------------------------
# Runs


class RunNode:
    __slots__ = ("symbol", "state", "children", "_cost", "_tkey")

    def __init__(self, symbol: AlphabetSymbol, state: FtaState, children: tuple):
        self.symbol = symbol
        self.state = state
        self.children = children
        self._cost = 1 + sum(c._cost for c in children)
        self._tkey = (symbol.key(),) + tuple(c._tkey for c in children)

    @property
    def cost(self) -> int:
        return self._cost

    def term_key(self):
        return self._tkey

    def __repr__(self):
        if not self.children:
            return self.symbol.label
        return f"{self.symbol.label}({','.join(map(repr, self.children))})"


@dataclass(frozen=True)
class Run:
    root: RunNode

    @property
    def cost(self) -> int:
        return self.root.cost

    def term_key(self):
        return self.root.term_key()


def _min_costs(fta: Fta) -> dict[int, tuple[int, tuple]]:
    """Per state: (min derivation cost, deterministic best-transition key)."""
    best: dict[int, tuple[int, tuple]] = {}
    remaining = {}
    waiting = defaultdict(list)
    heap: list[tuple[int, tuple, int, int]] = []
    for i, (sym, args, res) in enumerate(fta.transitions):
        remaining[i] = len(args)
        for arg in args:
            waiting[arg].append(i)
        if not args:
            heapq.heappush(heap, (1, (sym.key(), ()), res, i))
    settled: set[int] = set()
    choice: dict[int, int] = {}
    while heap:
        cost, tie, q, ti = heapq.heappop(heap)
        if q in settled:
            continue
        settled.add(q)
        best[q] = (cost, tie)
        choice[q] = ti
        for tj in waiting.get(q, ()):
            remaining[tj] -= 1
        for tj in waiting.get(q, ()):
            if remaining[tj] == 0:
                remaining[tj] = -1
                sym, args, res = fta.transitions[tj]
                if res in settled:
                    continue
                c = 1 + sum(best[a][0] for a in args)
                tie2 = (sym.key(), tuple(fta.states[a].key() for a in args))
                heapq.heappush(heap, (c, tie2, res, tj))
    fta._min_choice = choice  # type: ignore[attr-defined]
    return best


def min_cost_run(fta: Fta) -> Run | None:
    """A minimum-node-count accepting run, or None if the language is empty.
    Ties break on (symbol label, child state order)."""
    best = _min_costs(fta)
    finals = [f for f in fta.finals if f in best]
    if not finals:
        return None
    root_state = min(finals, key=lambda f: (best[f][0], fta.states[f].key()))
    choice = fta._min_choice  # type: ignore[attr-defined]

    def build(q: int) -> RunNode:
        sym, args, res = fta.transitions[choice[q]]
        return RunNode(sym, fta.states[q], tuple(build(a) for a in args))

    return Run(build(root_state))


class _Partial:
    """Partial term for best-first enumeration: a tree whose leaves may be
    state-holes; f = built cost + admissible remaining estimate."""

    __slots__ = ("f", "tie", "seq", "nodes")

    def __init__(self, f, tie, seq, nodes):
        self.f = f
        self.tie = tie
        self.seq = seq
        self.nodes = nodes

    def __lt__(self, other):
        return (self.f, self.tie, self.seq) < (other.f, other.tie, other.seq)


def iter_runs(fta: Fta, deadline=None) -> Iterator[Run]:
    """Accepting runs in nondecreasing cost, without duplicate terms.

    Best-first search over partial terms with the exact min-cost table as
    heuristic, so terms surface in true cost order.
    """
    best = _min_costs(fta)
    finals = sorted(
        (f for f in fta.finals if f in best),
        key=lambda f: (best[f][0], fta.states[f].key()),
    )
    if not finals:
        return
    by_result = fta.by_result()

    # A partial term is a nested structure: ("hole", state_id) or
    # (sym, state_id, tuple(children)). Expansion replaces the leftmost hole.
    seq = 0
    heap: list[_Partial] = []

    def hole(q):
        return ("hole", q)

    def cost_of(node) -> int:
        if node[0] == "hole":
            return best[node[1]][0]
        return 1 + sum(cost_of(c) for c in node[2])

    def tie_of(node):
        # flat preorder key; elements tagged so holes and symbols compare
        out = []

        def walk(n):
            if n[0] == "hole":
                out.append((0, fta.states[n[1]].key()))
            else:
                out.append((1, n[0].key()))
                for c in n[2]:
                    walk(c)

        walk(node)
        return tuple(out)

    for f in finals:
        p = _Partial(best[f][0], tie_of(hole(f)), seq, hole(f))
        seq += 1
        heapq.heappush(heap, p)

    emitted: set = set()

    def find_hole(node, path):
        if node[0] == "hole":
            return path
        for i, c in enumerate(node[2]):
            r = find_hole(c, path + (i,))
            if r is not None:
                return r
        return None

    def replace(node, path, repl):
        if not path:
            return repl
        i = path[0]
        kids = node[2]
        return (
            node[0],
            node[1],
            kids[:i] + (replace(kids[i], path[1:], repl),) + kids[i + 1 :],
        )

    def to_run(node) -> RunNode:
        return RunNode(node[0], fta.states[node[1]], tuple(to_run(c) for c in node[2]))

    while heap:
        if deadline is not None:
            deadline.check()
        p = heapq.heappop(heap)
        path = find_hole(p.nodes, ())
        if path is None:
            root = to_run(p.nodes)
            key = root.term_key()
            if key in emitted:
                continue
            emitted.add(key)
            yield Run(root)
            continue
        # expand leftmost hole
        node = p.nodes
        for step in path:
            node = node[2][step]
        q = node[1]
        for sym, args, res in by_result.get(q, ()):
            if any(a not in best for a in args):
                continue
            new_sub = (sym, q, tuple(hole(a) for a in args))
            nodes = replace(p.nodes, path, new_sub)
            np = _Partial(cost_of(nodes), tie_of(nodes), seq, nodes)
            seq += 1
            heapq.heappush(heap, np)


def enumerate_runs(fta: Fta, max_count: int, deadline=None) -> list[Run]:
    out = []
    for run in iter_runs(fta, deadline=deadline):
        out.append(run)
        if len(out) >= max_count:
            break
    return out
