"""Embedding the effect-only and ability-only disciplines into the combined one.

Effect judgments are translated with every qualifier pessimistically set to
⟨⊤,⊤⟩; ability judgments keep their ability in both components and assume
effect ⊤. Terms are shared by all three disciplines, so only the types in
annotations and environments are translated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .ability import AbilCtx, read_annot_a, typecheck_a
from .ae import AECtx, Judgment, typecheck_ae
from .effect import EffCtx, read_annot_e, typecheck_e
from .systems import ABILITY, EFFECT
from .syntax import QualAnnot, SurfaceType, Term, print_term
from .types import (
    QTOP, TOP, AbilType, AEFun, AEType, BoolType, EffType, Qual, RefType, TypeCheckError,
)


def encode_type_e(ty: EffType) -> AEType:
    if isinstance(ty, (BoolType, RefType)):
        return ty
    return AEFun(encode_type_e(ty.param), QTOP, encode_type_e(ty.result), QTOP, ty.latent)


def encode_type_a(ty: AbilType) -> AEType:
    if isinstance(ty, (BoolType, RefType)):
        return ty
    return AEFun(
        encode_type_a(ty.param),
        Qual(ty.param_abil, ty.param_abil),
        encode_type_a(ty.result),
        Qual(ty.result_abil, ty.result_abil),
        TOP,
    )


def encode_env(ctx: Union[EffCtx, AbilCtx], system: str) -> AECtx:
    if system == EFFECT:
        return {name: (encode_type_e(ty), QTOP) for name, ty in ctx.items()}
    if system == ABILITY:
        return {name: (encode_type_a(ty), Qual(a, a)) for name, (ty, a) in ctx.items()}
    raise ValueError(f"no encoding from {system!r}")


def _reader(system: str):
    if system == EFFECT:
        def read(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> tuple[AEType, Qual]:
            return encode_type_e(read_annot_e(ty, qual)), QTOP
    else:
        def read(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> tuple[AEType, Qual]:
            src, a = read_annot_a(ty, qual)
            return encode_type_a(src), Qual(a, a)
    return read


@dataclass(frozen=True)
class EncodingReport:
    source_system: str
    term: Term
    source_judgment: Optional[str]
    target_judgment: Optional[Judgment]  # the least judgment synthesized in the target
    prescribed: Optional[Judgment]  # what the embedding promises
    holds: Optional[bool]
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "sourceSystem": self.source_system,
            "term": print_term(self.term),
            "sourceJudgment": self.source_judgment,
            "targetJudgment": None if self.target_judgment is None else str(self.target_judgment),
            "prescribed": None if self.prescribed is None else str(self.prescribed),
            "holds": self.holds,
            "note": self.note,
        }


def check_encoding(system: str, ctx: Mapping, term: Term) -> EncodingReport:
    """Type ``term`` in the source discipline and check the translated judgment.

    The target check accepts any synthesized judgment that subsumes into the
    prescribed one.
    """
    try:
        if system == EFFECT:
            ty, eff = typecheck_e(ctx, term)
            source = f"{ty} ; {eff}"
            prescribed = Judgment(encode_type_e(ty), QTOP, eff)
        elif system == ABILITY:
            ty, abil = typecheck_a(ctx, term)
            source = f"{ty} ; {abil}"
            prescribed = Judgment(encode_type_a(ty), Qual(abil, abil), TOP)
        else:
            raise ValueError(f"no encoding from {system!r}")
    except TypeCheckError as exc:
        return EncodingReport(system, term, None, None, None, None, f"source ill-typed: {exc}")
    try:
        target = typecheck_ae(encode_env(ctx, system), term, _reader(system))
    except TypeCheckError as exc:
        return EncodingReport(system, term, source, None, prescribed, False, f"target ill-typed: {exc}")
    return EncodingReport(system, term, source, target, prescribed, target <= prescribed)
