"""One interface over the three disciplines, keyed by name."""

from __future__ import annotations

from dataclasses import dataclass

from .ability import ambient, is_pure_a, typecheck_a
from .ae import is_pure_ae, typecheck_ae
from .effect import is_pure_e, typecheck_e
from .environment import EnvSpec
from .syntax import Term, free_vars

EFFECT = "effect"
ABILITY = "ability"
AE = "ae"
SYSTEMS = (EFFECT, ABILITY, AE)


@dataclass(frozen=True)
class Verdict:
    """A discipline's view of one term: its judgment and whether it deems it pure."""

    system: str
    judgment: str
    pure: bool


def judge(system: str, env: EnvSpec, term: Term) -> Verdict:
    """Typecheck ``term`` under ``env``; raises ``TypeCheckError`` when it has no type."""
    ctx = env.context_for(system)
    if system == EFFECT:
        ty, eff = typecheck_e(ctx, term)
        return Verdict(system, f"{ty} ; {eff}", is_pure_e(ctx, term))
    if system == ABILITY:
        ty, abil = typecheck_a(ctx, term)
        amb = ambient(ctx, free_vars(term))
        return Verdict(system, f"{ty} ; {abil} ; {amb}", is_pure_a(ctx, term))
    if system == AE:
        j = typecheck_ae(ctx, term)
        return Verdict(system, f"{j.type} ; {j.qual} ; {j.effect}", is_pure_ae(ctx, term))
    raise ValueError(f"unknown system {system!r}")


def is_pure(system: str, env: EnvSpec, term: Term) -> bool:
    return judge(system, env, term).pure
