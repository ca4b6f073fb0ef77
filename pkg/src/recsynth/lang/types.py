"""Type expressions and algebraic data type environments.

Types are finite trees over unit, binary products, binary sums, named ADT
references, and first-order function types (the latter only for opaque
callable inputs; programs never construct function values).
"""

from __future__ import annotations

from dataclasses import dataclass

from recsynth.errors import AdtDeclarationError


class TypeExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Unit(TypeExpr):
    __slots__ = ()

    def __repr__(self):
        return "unit"


@dataclass(frozen=True)
class Prod(TypeExpr):
    left: TypeExpr
    right: TypeExpr

    def __repr__(self):
        return f"({self.left!r} * {self.right!r})"


@dataclass(frozen=True)
class Sum(TypeExpr):
    left: TypeExpr
    right: TypeExpr

    def __repr__(self):
        return f"({self.left!r} + {self.right!r})"


@dataclass(frozen=True)
class Named(TypeExpr):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Fn(TypeExpr):
    arg: TypeExpr
    res: TypeExpr

    def __repr__(self):
        return f"({self.arg!r} -> {self.res!r})"


UNIT = Unit()


@dataclass(frozen=True)
class Ctor:
    """One constructor of an ADT; ``arg`` is None for nullary constructors."""

    name: str
    arg: TypeExpr | None = None


class AdtEnv:
    """Immutable map from ADT name to its constructor sequence.

    Constructor names are globally unique so values can be typed from their
    head constructor alone.
    """

    def __init__(self, definitions: dict[str, tuple[Ctor, ...]]):
        self._defs = {name: tuple(ctors) for name, ctors in definitions.items()}
        self._ctor_index: dict[str, tuple[str, int]] = {}
        for adt, ctors in self._defs.items():
            if not ctors:
                raise AdtDeclarationError(f"ADT {adt} has no constructors")
            for i, c in enumerate(ctors):
                if c.name in self._ctor_index:
                    raise AdtDeclarationError(f"duplicate constructor name {c.name}")
                self._ctor_index[c.name] = (adt, i)
        for adt in self._defs:
            self._check_resolves(Named(adt))
        dead = set(self._defs) - self._inhabited()
        if dead:
            raise AdtDeclarationError(f"uninhabited ADTs: {sorted(dead)}")

    def _check_resolves(self, ty: TypeExpr) -> None:
        if isinstance(ty, Named):
            if ty.name not in self._defs:
                raise AdtDeclarationError(f"unknown ADT {ty.name}")
            return
        if isinstance(ty, (Prod, Sum)):
            self._check_resolves(ty.left)
            self._check_resolves(ty.right)
        elif isinstance(ty, Fn):
            self._check_resolves(ty.arg)
            self._check_resolves(ty.res)

    def _inhabited(self) -> set[str]:
        # Fixpoint: an ADT is inhabited once some constructor's argument
        # type is inhabited (nullary constructors seed the set).
        done: set[str] = set()

        def ty_ok(ty: TypeExpr) -> bool:
            if isinstance(ty, Named):
                return ty.name in done
            if isinstance(ty, (Prod, Sum)):
                ok_l = ty_ok(ty.left)
                ok_r = ty_ok(ty.right)
                return ok_l and ok_r if isinstance(ty, Prod) else ok_l or ok_r
            return True

        changed = True
        while changed:
            changed = False
            for adt, ctors in self._defs.items():
                if adt in done:
                    continue
                if any(c.arg is None or ty_ok(c.arg) for c in ctors):
                    done.add(adt)
                    changed = True
        return done

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._defs)

    def ctors(self, adt: str) -> tuple[Ctor, ...]:
        return self._defs[adt]

    def ctor_site(self, ctor_name: str) -> tuple[str, int]:
        """(adt name, constructor index) for a constructor name."""
        return self._ctor_index[ctor_name]

    def has_ctor(self, ctor_name: str) -> bool:
        return ctor_name in self._ctor_index

    def payload_type(self, ctor_name: str) -> TypeExpr | None:
        adt, i = self._ctor_index[ctor_name]
        return self._defs[adt][i].arg

    def unfold(self, adt: str) -> TypeExpr:
        """Sum-of-products view of an ADT: right-nested sum of payloads."""
        payloads = [c.arg if c.arg is not None else UNIT for c in self._defs[adt]]
        out = payloads[-1]
        for p in reversed(payloads[:-1]):
            out = Sum(p, out)
        return out

    def residue_type(self, adt: str, skip: int) -> TypeExpr:
        """Sum view of the constructors after the first ``skip`` ones."""
        payloads = [c.arg if c.arg is not None else UNIT for c in self._defs[adt]][skip:]
        out = payloads[-1]
        for p in reversed(payloads[:-1]):
            out = Sum(p, out)
        return out

    def definitions_dict(self) -> dict[str, tuple[Ctor, ...]]:
        return dict(self._defs)

    def __eq__(self, other):
        return isinstance(other, AdtEnv) and self._defs == other._defs

    def __hash__(self):
        return hash(tuple(sorted((k, v) for k, v in self._defs.items())))


_TYPE_RANK = {Unit: 0, Named: 1, Prod: 2, Sum: 3, Fn: 4}


def type_key(ty: TypeExpr):
    """Total deterministic ordering key for type expressions."""
    if isinstance(ty, Unit):
        return (0,)
    if isinstance(ty, Named):
        return (1, ty.name)
    if isinstance(ty, Prod):
        return (2, type_key(ty.left), type_key(ty.right))
    if isinstance(ty, Sum):
        return (3, type_key(ty.left), type_key(ty.right))
    if isinstance(ty, Fn):
        return (4, type_key(ty.arg), type_key(ty.res))
    raise TypeError(f"not a TypeExpr: {ty!r}")


def render_type(ty: TypeExpr) -> str:
    if isinstance(ty, Unit):
        return "unit"
    if isinstance(ty, Named):
        return ty.name
    if isinstance(ty, Prod):
        return f"({render_type(ty.left)} * {render_type(ty.right)})"
    if isinstance(ty, Sum):
        return f"({render_type(ty.left)} + {render_type(ty.right)})"
    if isinstance(ty, Fn):
        return f"({render_type(ty.arg)} -> {render_type(ty.res)})"
    raise TypeError(f"not a TypeExpr: {ty!r}")
