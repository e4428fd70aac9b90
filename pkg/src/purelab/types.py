"""Qualifier lattices and the type languages of the three disciplines.

All three systems share the two base types ``Bool`` and ``Ref``; only their
function types differ in which annotations they carry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union


class TypeCheckError(Exception):
    """Raised by every checker when a term has no derivation."""


class Mark(enum.Enum):
    """A two-point lattice element, used for effects and abilities alike.

    ``BOT`` and ``TOP`` are conflated with ``False``/``True`` so the qualifier
    formulas can be written with ``|`` and ``&``.
    """

    BOT = False
    TOP = True

    @classmethod
    def of(cls, flag: bool) -> Mark:
        return cls.TOP if flag else cls.BOT

    def __bool__(self) -> bool:
        return self.value

    def __or__(self, other: Mark) -> Mark:
        return Mark.of(self.value or other.value)

    def __and__(self, other: Mark) -> Mark:
        return Mark.of(self.value and other.value)

    def __le__(self, other: Mark) -> bool:
        return (not self.value) or other.value

    def __lt__(self, other: Mark) -> bool:
        return self <= other and self is not other

    def __str__(self) -> str:
        return "⊤" if self.value else "⊥"

    @property
    def keyword(self) -> str:
        return "top" if self.value else "bot"


BOT = Mark.BOT
TOP = Mark.TOP


@dataclass(frozen=True, slots=True)
class Qual:
    """A ``⟨fresh, stored⟩`` ability pair."""

    fresh: Mark
    stored: Mark

    def __or__(self, other: Qual) -> Qual:
        return Qual(self.fresh | other.fresh, self.stored | other.stored)

    def __le__(self, other: Qual) -> bool:
        return self.fresh <= other.fresh and self.stored <= other.stored

    def __str__(self) -> str:
        if not self.fresh and not self.stored:
            return "⟨⊥⟩"
        return f"⟨{self.fresh},{self.stored}⟩"

    @property
    def keyword(self) -> str:
        return f"<{self.fresh.keyword},{self.stored.keyword}>"


QBOT = Qual(BOT, BOT)
QTOP = Qual(TOP, TOP)
ALL_QUALS = (Qual(BOT, BOT), Qual(BOT, TOP), Qual(TOP, BOT), Qual(TOP, TOP))


@dataclass(frozen=True, slots=True)
class BoolType:
    def __str__(self) -> str:
        return "Bool"


@dataclass(frozen=True, slots=True)
class RefType:
    def __str__(self) -> str:
        return "Ref"


BOOL = BoolType()
REF = RefType()


@dataclass(frozen=True, slots=True)
class Arrow:
    """Simple (annotation-free) function type, used by the oracle."""

    dom: SimpleType
    cod: SimpleType

    def __str__(self) -> str:
        return f"({self.dom} -> {self.cod})"


@dataclass(frozen=True, slots=True)
class EffFun:
    param: EffType
    result: EffType
    latent: Mark

    def __str__(self) -> str:
        return f"({self.param} ->^{self.latent} {self.result})"


@dataclass(frozen=True, slots=True)
class AbilFun:
    param: AbilType
    param_abil: Mark
    result: AbilType
    result_abil: Mark

    def __str__(self) -> str:
        return f"({self.param} {self.param_abil} -> {self.result} {self.result_abil})"


@dataclass(frozen=True, slots=True)
class AEFun:
    param: AEType
    param_qual: Qual
    result: AEType
    result_qual: Qual
    latent: Mark

    def __str__(self) -> str:
        return (
            f"({self.param} {self.param_qual} =>^{self.latent} "
            f"{self.result} {self.result_qual})"
        )


SimpleType = Union[BoolType, RefType, Arrow]
EffType = Union[BoolType, RefType, EffFun]
AbilType = Union[BoolType, RefType, AbilFun]
AEType = Union[BoolType, RefType, AEFun]


def erase(ty) -> SimpleType:
    """Drop every qualifier and effect, leaving the simple type."""
    if isinstance(ty, (BoolType, RefType)):
        return ty
    if isinstance(ty, (EffFun, AbilFun, AEFun)):
        return Arrow(erase(ty.param), erase(ty.result))
    if isinstance(ty, Arrow):
        return ty
    raise TypeError(f"not a type: {ty!r}")


def type_size(ty) -> int:
    if isinstance(ty, (BoolType, RefType)):
        return 1
    return 1 + type_size(ty.param if not isinstance(ty, Arrow) else ty.dom) + type_size(
        ty.result if not isinstance(ty, Arrow) else ty.cod
    )
