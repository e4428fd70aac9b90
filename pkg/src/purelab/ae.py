"""The combined discipline: ⟨fresh, stored⟩ abilities together with a binary effect.

Effects on cells that are only reachable as fresh are masked, which is what
lets a locally allocated and never escaping reference count as pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .syntax import (
    Abs, App, Bin, Cst, Get, Hole, Put, QualAnnot, Ref, SBool, SRef, SurfaceType,
    Term, Var, as_let, count_holes, free_vars,
)
from .types import (
    BOOL, BOT, QBOT, QTOP, REF, TOP, AEFun, AEType, BoolType, Mark, Qual, RefType,
    TypeCheckError,
)

AECtx = Mapping[str, tuple[AEType, Qual]]
AnnotReader = Callable[[SurfaceType, Optional[QualAnnot]], tuple[AEType, Qual]]

FRESH_REF = Qual(TOP, BOT)


def _qual(ty: SurfaceType, q: Optional[QualAnnot]) -> Qual:
    if q is None:
        return QBOT if isinstance(ty, SBool) else QTOP
    if isinstance(q, Mark):
        return Qual(q, q)
    return q


def read_annot_ae(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> tuple[AEType, Qual]:
    """Interpret an annotation; a single mark ``m`` abbreviates ``⟨m,m⟩``."""
    if isinstance(ty, SBool):
        return BOOL, _qual(ty, qual)
    if isinstance(ty, SRef):
        return REF, _qual(ty, qual)
    param, pq = read_annot_ae(ty.param, ty.param_qual)
    result, rq = read_annot_ae(ty.result, ty.result_qual)
    latent = TOP if ty.effect is None else ty.effect
    return AEFun(param, pq, result, rq, latent), _qual(ty, qual)


def ambient_ae(ctx: AECtx, names: Iterable[str]) -> Qual:
    out = QBOT
    for name in names:
        if name not in ctx:
            raise TypeCheckError(f"unbound variable {name}")
        out = out | ctx[name][1]
    return out


def abs_qualifier(captured: Qual, result: Qual, latent: Mark) -> Qual:
    """Qualifier of an abstraction from what it captures and what its body yields.

    The closure is a resource only if it captures one and either returns
    something reaching the store or has a latent effect.
    """
    captures = captured.fresh | captured.stored
    return Qual(BOT, captures & (result.stored | latent))


def app_qualifier(
    fn_qual: Qual, fn_eff: Mark, arg_qual: Qual, arg_eff: Mark, result: Qual, latent: Mark
) -> tuple[Qual, Mark]:
    """Qualifier and effect of an application.

    The latent effect survives only if the function or its argument reaches
    stored locations; otherwise it can only touch cells nobody else can see.
    """
    fresh = result.fresh | (result.stored & (fn_qual.fresh | arg_qual.fresh))
    stored = result.stored & (fn_qual.stored | arg_qual.stored)
    eff = fn_eff | arg_eff | (latent & (fn_qual.stored | arg_qual.stored))
    return Qual(fresh, stored), eff


def sub_qual(q1: Qual, q2: Qual) -> bool:
    return q1 <= q2


def sub_eff(e1: Mark, e2: Mark) -> bool:
    return e1 <= e2


def subtype_ae(t1: AEType, t2: AEType) -> bool:
    """Function types are contravariant in the parameter and covariant in the
    result and latent effect."""
    if isinstance(t1, AEFun) and isinstance(t2, AEFun):
        return (
            subtype_ae(t2.param, t1.param)
            and sub_qual(t2.param_qual, t1.param_qual)
            and subtype_ae(t1.result, t2.result)
            and sub_qual(t1.result_qual, t2.result_qual)
            and sub_eff(t1.latent, t2.latent)
        )
    return t1 == t2 and isinstance(t1, (BoolType, RefType))


@dataclass(frozen=True, slots=True)
class Judgment:
    type: AEType
    qual: Qual
    effect: Mark

    def __str__(self) -> str:
        return f"{self.type} {self.qual} {self.effect}"

    def __le__(self, other: Judgment) -> bool:
        return (
            subtype_ae(self.type, other.type)
            and sub_qual(self.qual, other.qual)
            and sub_eff(self.effect, other.effect)
        )


@dataclass(frozen=True, slots=True)
class HoleSpec:
    """What a context's hole stands for: a judgment plus the free variables of
    whatever fills it."""

    judgment: Judgment
    free: frozenset[str] = frozenset()


def _free(t: Term, hole: Optional[HoleSpec]) -> frozenset[str]:
    fv = free_vars(t)
    if hole is not None and count_holes(t):
        fv |= hole.free
    return fv


def typecheck_ae(
    ctx: AECtx,
    term: Term,
    read_annot: AnnotReader = read_annot_ae,
    hole: Optional[HoleSpec] = None,
) -> Judgment:
    """Synthesize the least judgment of ``term``.

    With ``hole`` given, ``term`` may be a context whose holes are typed by
    that judgment, which yields the typing of contexts.
    """

    def expect(t: Term, want: AEType, env: AECtx) -> Judgment:
        j = go(t, env)
        if not subtype_ae(j.type, want):
            raise TypeCheckError(f"expected {want}, got {j.type}")
        return j

    def abstraction(param: str, pty: AEType, pq: Qual, body: Term, env: AECtx) -> Judgment:
        r = go(body, {**env, param: (pty, pq)})
        captured = ambient_ae(env, _free(body, hole) - {param})
        fn_ty = AEFun(pty, pq, r.type, r.qual, r.effect)
        return Judgment(fn_ty, abs_qualifier(captured, r.qual, r.effect), BOT)

    def apply(fn: Judgment, arg: Judgment) -> Judgment:
        fty = fn.type
        if not isinstance(fty, AEFun):
            raise TypeCheckError(f"applying a non-function of type {fty}")
        if not subtype_ae(arg.type, fty.param):
            raise TypeCheckError(f"expected {fty.param}, got {arg.type}")
        if not sub_qual(arg.qual, fty.param_qual):
            raise TypeCheckError(
                f"argument qualifier {arg.qual} exceeds declared {fty.param_qual}"
            )
        q, e = app_qualifier(fn.qual, fn.effect, arg.qual, arg.effect, fty.result_qual, fty.latent)
        return Judgment(fty.result, q, e)

    def go(t: Term, env: AECtx) -> Judgment:
        let = as_let(t)
        if let is not None:
            name, bound, body = let
            b = go(bound, env)
            fn = abstraction(name, b.type, b.qual, body, env)
            return apply(fn, b)
        if isinstance(t, Cst):
            return Judgment(BOOL, QBOT, BOT)
        if isinstance(t, Var):
            if t.name not in env:
                raise TypeCheckError(f"unbound variable {t.name}")
            ty, q = env[t.name]
            return Judgment(ty, Qual(BOT, q.fresh | q.stored), BOT)
        if isinstance(t, Abs):
            if t.annot is None:
                raise TypeCheckError(f"parameter {t.param} needs a type annotation")
            pty, pq = read_annot(t.annot, t.qual)
            return abstraction(t.param, pty, pq, t.body, env)
        if isinstance(t, App):
            return apply(go(t.fn, env), go(t.arg, env))
        if isinstance(t, Ref):
            j = expect(t.init, BOOL, env)
            return Judgment(REF, FRESH_REF, j.effect)
        if isinstance(t, Get):
            j = expect(t.target, REF, env)
            return Judgment(BOOL, QBOT, j.effect | j.qual.stored)
        if isinstance(t, Put):
            j1 = expect(t.target, REF, env)
            j2 = expect(t.value, BOOL, env)
            return Judgment(BOOL, QBOT, j1.effect | j2.effect | j1.qual.stored)
        if isinstance(t, Bin):
            j1 = expect(t.lhs, BOOL, env)
            j2 = expect(t.rhs, BOOL, env)
            return Judgment(BOOL, QBOT, j1.effect | j2.effect)
        if isinstance(t, Hole):
            if hole is None:
                raise TypeCheckError("a context hole has no type")
            return hole.judgment
        raise TypeError(f"not a term: {t!r}")

    return go(term, dict(ctx))


def is_pure_ae(
    ctx: AECtx, term: Term, read_annot: AnnotReader = read_annot_ae, *, strict: bool = False
) -> bool:
    """Effect ⊥ and no fresh ability. ``strict`` also demands a ⊥ ambient qualifier."""
    j = typecheck_ae(ctx, term, read_annot)
    pure = j.effect is BOT and j.qual.fresh is BOT
    if strict:
        pure = pure and ambient_ae(ctx, free_vars(term)) == QBOT
    return pure
