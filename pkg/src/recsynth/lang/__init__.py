from recsynth.lang.types import AdtEnv, Ctor, Fn, Named, Prod, Sum, TypeExpr, Unit
from recsynth.lang.values import (
    CtorV,
    InlV,
    InrV,
    OpaqueFn,
    PairV,
    UnitV,
    Value,
    mk_ctor,
    mk_inl,
    mk_inr,
    mk_opaque,
    mk_pair,
    mk_unit,
    precedes,
    value_size,
)
from recsynth.lang.exprs import (
    App,
    CallFn,
    CtorE,
    Expr,
    Fst,
    Inl,
    Inr,
    MatchE,
    Pair,
    Program,
    Snd,
    Switch,
    UnitE,
    Unl,
    Unr,
    Var,
    expr_size,
)
from recsynth.lang.eval import EvalContext, eval_program
from recsynth.lang.typecheck import typecheck, typechecks

__all__ = [name for name in dir() if not name.startswith("_")]
