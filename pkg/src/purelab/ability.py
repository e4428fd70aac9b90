"""Binary ability discipline: judgments say whether a result may carry a resource.

A term is pure when its result carries no ability and none of its free
variables does (the ambient ability is ⊥).
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Optional

from .syntax import (
    Abs, App, Bin, Cst, Get, Hole, Put, QualAnnot, Ref, SBool, SRef, SurfaceType,
    Term, Var, as_let, free_vars,
)
from .types import (
    BOOL, BOT, REF, TOP, AbilFun, AbilType, BoolType, Mark, Qual, RefType, TypeCheckError,
)

AbilCtx = Mapping[str, tuple[AbilType, Mark]]
AnnotReader = Callable[[SurfaceType, Optional[QualAnnot]], tuple[AbilType, Mark]]


def _mark(ty: SurfaceType, q: Optional[QualAnnot]) -> Mark:
    if q is None:
        return BOT if isinstance(ty, SBool) else TOP
    if isinstance(q, Qual):
        raise TypeCheckError(f"pair qualifier {q.keyword} is not an ability")
    return q


def read_annot_a(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> tuple[AbilType, Mark]:
    """Interpret an annotation. Missing qualifiers default to ⊥ on Bool and ⊤ otherwise."""
    if isinstance(ty, SBool):
        return BOOL, _mark(ty, qual)
    if isinstance(ty, SRef):
        return REF, _mark(ty, qual)
    param, pa = read_annot_a(ty.param, ty.param_qual)
    result, ra = read_annot_a(ty.result, ty.result_qual)
    return AbilFun(param, pa, result, ra), _mark(ty, qual)


def ambient(ctx: AbilCtx, names: Iterable[str]) -> Mark:
    """Join of the abilities bound to ``names``."""
    out = BOT
    for name in names:
        if name not in ctx:
            raise TypeCheckError(f"unbound variable {name}")
        out = out | ctx[name][1]
    return out


def subtype_a(t1: AbilType, t2: AbilType) -> bool:
    if isinstance(t1, AbilFun) and isinstance(t2, AbilFun):
        return (
            subtype_a(t2.param, t1.param)
            and t2.param_abil <= t1.param_abil
            and subtype_a(t1.result, t2.result)
            and t1.result_abil <= t2.result_abil
        )
    return t1 == t2 and isinstance(t1, (BoolType, RefType))


def typecheck_a(
    ctx: AbilCtx, term: Term, read_annot: AnnotReader = read_annot_a
) -> tuple[AbilType, Mark]:
    """Synthesize the least type and ability of ``term``."""

    def expect(t: Term, want: AbilType, env: AbilCtx) -> Mark:
        got, abil = go(t, env)
        if not subtype_a(got, want):
            raise TypeCheckError(f"expected {want}, got {got}")
        return abil

    def go(t: Term, env: AbilCtx) -> tuple[AbilType, Mark]:
        let = as_let(t)
        if let is not None:
            name, bound, body = let
            binding = go(bound, env)
            return go(body, {**env, name: binding})
        if isinstance(t, Cst):
            return BOOL, BOT
        if isinstance(t, Var):
            if t.name not in env:
                raise TypeCheckError(f"unbound variable {t.name}")
            return env[t.name]
        if isinstance(t, Abs):
            if t.annot is None:
                raise TypeCheckError(f"parameter {t.param} needs a type annotation")
            param, pa = read_annot(t.annot, t.qual)
            result, ra = go(t.body, {**env, t.param: (param, pa)})
            captured = ambient(env, free_vars(t.body) - {t.param})
            return AbilFun(param, pa, result, ra), captured
        if isinstance(t, App):
            fn_ty, _ = go(t.fn, env)
            if not isinstance(fn_ty, AbilFun):
                raise TypeCheckError(f"applying a non-function of type {fn_ty}")
            arg_abil = expect(t.arg, fn_ty.param, env)
            if not arg_abil <= fn_ty.param_abil:
                raise TypeCheckError(
                    f"argument ability {arg_abil} exceeds declared {fn_ty.param_abil}"
                )
            return fn_ty.result, fn_ty.result_abil
        if isinstance(t, Ref):
            expect(t.init, BOOL, env)
            return REF, TOP
        if isinstance(t, Get):
            expect(t.target, REF, env)
            return BOOL, BOT
        if isinstance(t, Put):
            expect(t.target, REF, env)
            expect(t.value, BOOL, env)
            return BOOL, BOT
        if isinstance(t, Bin):
            expect(t.lhs, BOOL, env)
            expect(t.rhs, BOOL, env)
            return BOOL, BOT
        if isinstance(t, Hole):
            raise TypeCheckError("a context hole has no type")
        raise TypeError(f"not a term: {t!r}")

    return go(term, dict(ctx))


def is_pure_a(ctx: AbilCtx, term: Term, read_annot: AnnotReader = read_annot_a) -> bool:
    _, abil = typecheck_a(ctx, term, read_annot)
    return abil is BOT and ambient(ctx, free_vars(term)) is BOT
