"""Binary effect discipline: every judgment carries an effect, ⊥ (pure) or ⊤."""

from __future__ import annotations

from typing import Callable, Mapping, Optional

from .syntax import (
    Abs, App, Bin, Cst, Get, Hole, Put, QualAnnot, Ref, SBool, SRef, SurfaceType,
    Term, Var, as_let,
)
from .types import BOOL, BOT, REF, TOP, BoolType, EffFun, EffType, Mark, RefType, TypeCheckError

EffCtx = Mapping[str, EffType]
AnnotReader = Callable[[SurfaceType, Optional[QualAnnot]], EffType]


def compose(e1: Mark, e2: Mark) -> Mark:
    """Sequential composition of effects is their join."""
    return e1 | e2


def read_annot_e(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> EffType:
    """Interpret a surface annotation; qualifiers mean nothing here and are ignored."""
    if isinstance(ty, SBool):
        return BOOL
    if isinstance(ty, SRef):
        return REF
    latent = TOP if ty.effect is None else ty.effect
    return EffFun(read_annot_e(ty.param), read_annot_e(ty.result), latent)


def subtype_e(t1: EffType, t2: EffType) -> bool:
    if isinstance(t1, EffFun) and isinstance(t2, EffFun):
        return (
            subtype_e(t2.param, t1.param)
            and subtype_e(t1.result, t2.result)
            and t1.latent <= t2.latent
        )
    return t1 == t2 and isinstance(t1, (BoolType, RefType))


def typecheck_e(
    ctx: EffCtx, term: Term, read_annot: AnnotReader = read_annot_e
) -> tuple[EffType, Mark]:
    """Synthesize the least type and effect of ``term``."""

    def expect(t: Term, want: EffType, env: EffCtx) -> Mark:
        got, eff = go(t, env)
        if not subtype_e(got, want):
            raise TypeCheckError(f"expected {want}, got {got}")
        return eff

    def go(t: Term, env: EffCtx) -> tuple[EffType, Mark]:
        let = as_let(t)
        if let is not None:
            name, bound, body = let
            bound_ty, e1 = go(bound, env)
            body_ty, e2 = go(body, {**env, name: bound_ty})
            return body_ty, compose(e1, e2)
        if isinstance(t, Cst):
            return BOOL, BOT
        if isinstance(t, Var):
            if t.name not in env:
                raise TypeCheckError(f"unbound variable {t.name}")
            return env[t.name], BOT
        if isinstance(t, Abs):
            if t.annot is None:
                raise TypeCheckError(f"parameter {t.param} needs a type annotation")
            param = read_annot(t.annot, t.qual)
            result, latent = go(t.body, {**env, t.param: param})
            return EffFun(param, result, latent), BOT
        if isinstance(t, App):
            fn_ty, ef = go(t.fn, env)
            if not isinstance(fn_ty, EffFun):
                raise TypeCheckError(f"applying a non-function of type {fn_ty}")
            e1 = expect(t.arg, fn_ty.param, env)
            return fn_ty.result, compose(compose(ef, e1), fn_ty.latent)
        if isinstance(t, Ref):
            expect(t.init, BOOL, env)
            return REF, TOP
        if isinstance(t, Get):
            expect(t.target, REF, env)
            return BOOL, TOP
        if isinstance(t, Put):
            expect(t.target, REF, env)
            expect(t.value, BOOL, env)
            return BOOL, TOP
        if isinstance(t, Bin):
            e1 = expect(t.lhs, BOOL, env)
            e2 = expect(t.rhs, BOOL, env)
            return BOOL, compose(e1, e2)
        if isinstance(t, Hole):
            raise TypeCheckError("a context hole has no type")
        raise TypeError(f"not a term: {t!r}")

    return go(term, dict(ctx))


def is_pure_e(ctx: EffCtx, term: Term, read_annot: AnnotReader = read_annot_e) -> bool:
    return typecheck_e(ctx, term, read_annot)[1] is BOT
