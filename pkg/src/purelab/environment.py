"""Ambient environments: named Booleans and pre-allocated cells."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .evaluator import LocV, Value, bool_value
from .types import (
    BOOL, BOT, QBOT, REF, TOP, AbilType, AEType, EffType, Mark, Qual, SimpleType,
)

BOOL_VAL = "boolVal"
REF_CELL = "refCell"

# binder names used by enumerated contexts
BINDERS = ("x0", "x1")


@dataclass(frozen=True)
class EnvSpec:
    """The ambient variables: each is a Boolean or an allocated cell."""

    entries: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("environment names must be distinct")
        for name, kind in self.entries:
            if kind not in (BOOL_VAL, REF_CELL):
                raise ValueError(f"unknown binding kind {kind!r} for {name}")
            if name in BINDERS:
                raise ValueError(f"{name} is reserved for context binders")

    @classmethod
    def of(cls, **kinds: str) -> EnvSpec:
        return cls(tuple(kinds.items()))

    @classmethod
    def parse(cls, text: str) -> EnvSpec:
        """Read ``a=ref, y=bool``."""
        entries = []
        for item in filter(None, (s.strip() for s in text.split(","))):
            name, _, kind = item.partition("=")
            kind = {"ref": REF_CELL, "bool": BOOL_VAL}.get(kind.strip(), kind.strip())
            entries.append((name.strip(), kind))
        return cls(tuple(entries))

    def __str__(self) -> str:
        short = {REF_CELL: "ref", BOOL_VAL: "bool"}
        return ", ".join(f"{n}={short[k]}" for n, k in self.entries)

    @property
    def names(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.entries)

    def simple_ctx(self) -> dict[str, SimpleType]:
        return {n: (REF if k == REF_CELL else BOOL) for n, k in self.entries}

    def effect_ctx(self) -> dict[str, EffType]:
        return dict(self.simple_ctx())

    def ability_ctx(self) -> dict[str, tuple[AbilType, Mark]]:
        """Cells are resources (⊤); Booleans are not."""
        return {n: ((REF, TOP) if k == REF_CELL else (BOOL, BOT)) for n, k in self.entries}

    def ae_ctx(self) -> dict[str, tuple[AEType, Qual]]:
        """Cells exist before the term runs, so they are typed ``Ref ⟨⊤,⊥⟩``."""
        return {
            n: ((REF, Qual(TOP, BOT)) if k == REF_CELL else (BOOL, QBOT))
            for n, k in self.entries
        }

    def context_for(self, system: str) -> dict:
        if system == "effect":
            return self.effect_ctx()
        if system == "ability":
            return self.ability_ctx()
        if system == "ae":
            return self.ae_ctx()
        raise ValueError(f"unknown system {system!r}")

    def configs(self, bound: int) -> list[tuple[bool, ...]]:
        """Boolean contents for every entry, lexicographic, at most ``bound`` of them."""
        combos = itertools.product((False, True), repeat=len(self.entries))
        return list(itertools.islice(combos, max(1, bound)))

    def instantiate(self, config: Sequence[bool]) -> tuple[dict[str, Value], tuple[Value, ...]]:
        env: dict[str, Value] = {}
        store: list[Value] = []
        for (name, kind), bit in zip(self.entries, config):
            if kind == REF_CELL:
                env[name] = LocV(len(store))
                store.append(bool_value(bit))
            else:
                env[name] = bool_value(bit)
        return env, tuple(store)

    def describe(self, config: Sequence[bool]) -> dict[str, bool]:
        return {name: bit for (name, _), bit in zip(self.entries, config)}


EMPTY_ENV = EnvSpec()
