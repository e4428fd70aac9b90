"""Simple types: the common skeleton of the three disciplines, used by the oracle."""

from __future__ import annotations

from typing import Mapping, Optional

from .syntax import (
    Abs, App, Bin, Cst, Get, Hole, Put, QualAnnot, Ref, SBool, SFun, SRef,
    SurfaceType, Term, Var, as_let,
)
from .types import BOOL, REF, Arrow, SimpleType, TypeCheckError

SimpleCtx = Mapping[str, SimpleType]


def read_annot_simple(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> SimpleType:
    if isinstance(ty, SBool):
        return BOOL
    if isinstance(ty, SRef):
        return REF
    return Arrow(read_annot_simple(ty.param), read_annot_simple(ty.result))


def to_surface(ty: SimpleType) -> SurfaceType:
    if ty == BOOL:
        return SBool()
    if ty == REF:
        return SRef()
    assert isinstance(ty, Arrow)
    return SFun(to_surface(ty.dom), None, to_surface(ty.cod), None, None)


def typecheck_simple(
    ctx: SimpleCtx, term: Term, hole: Optional[SimpleType] = None
) -> SimpleType:
    """Type ``term`` ignoring every qualifier and effect annotation.

    Holes are allowed when ``hole`` gives their type.
    """

    def expect(t: Term, want: SimpleType, env: SimpleCtx) -> None:
        got = go(t, env)
        if got != want:
            raise TypeCheckError(f"expected {want}, got {got}")

    def go(t: Term, env: SimpleCtx) -> SimpleType:
        let = as_let(t)
        if let is not None:
            name, bound, body = let
            return go(body, {**env, name: go(bound, env)})
        if isinstance(t, Cst):
            return BOOL
        if isinstance(t, Var):
            if t.name not in env:
                raise TypeCheckError(f"unbound variable {t.name}")
            return env[t.name]
        if isinstance(t, Abs):
            if t.annot is None:
                raise TypeCheckError(f"parameter {t.param} needs a type annotation")
            dom = read_annot_simple(t.annot)
            return Arrow(dom, go(t.body, {**env, t.param: dom}))
        if isinstance(t, App):
            fn = go(t.fn, env)
            if not isinstance(fn, Arrow):
                raise TypeCheckError(f"applying a non-function of type {fn}")
            expect(t.arg, fn.dom, env)
            return fn.cod
        if isinstance(t, Ref):
            expect(t.init, BOOL, env)
            return REF
        if isinstance(t, Get):
            expect(t.target, REF, env)
            return BOOL
        if isinstance(t, Put):
            expect(t.target, REF, env)
            expect(t.value, BOOL, env)
            return BOOL
        if isinstance(t, Bin):
            expect(t.lhs, BOOL, env)
            expect(t.rhs, BOOL, env)
            return BOOL
        if isinstance(t, Hole):
            if hole is None:
                raise TypeCheckError("a context hole has no type")
            return hole
        raise TypeError(f"not a term: {t!r}")

    return go(term, dict(ctx))


def strip_annotations(t: Term) -> Term:
    """Erase qualifier and effect annotations, keeping the simple parameter types."""
    if isinstance(t, Abs):
        annot = None if t.annot is None else to_surface(read_annot_simple(t.annot))
        return Abs(t.param, annot, strip_annotations(t.body))
    if isinstance(t, App):
        return App(strip_annotations(t.fn), strip_annotations(t.arg))
    if isinstance(t, Ref):
        return Ref(strip_annotations(t.init))
    if isinstance(t, Get):
        return Get(strip_annotations(t.target))
    if isinstance(t, Put):
        return Put(strip_annotations(t.target), strip_annotations(t.value))
    if isinstance(t, Bin):
        return Bin(t.op, strip_annotations(t.lhs), strip_annotations(t.rhs))
    return t
