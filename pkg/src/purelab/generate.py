"""Seeded random generation of annotated, simply typed terms.

Terms are grown top-down from a target simple type. Parameter annotations get
random qualifiers and latent effects in the style of the requested
discipline; whether the result is well typed there is decided afterwards by
the discipline's own checker, so the generator never has to know its rules.
"""

from __future__ import annotations

import random
from typing import Callable, Iterator, Optional, Sequence

from .syntax import (
    AND, OR, Abs, App, Bin, Cst, Get, Put, QualAnnot, Ref, SBool, SFun, SRef,
    SurfaceType, Term, Var, desugar_let, size,
)
from .systems import ABILITY, EFFECT
from .types import (
    ALL_QUALS, BOOL, BOT, REF, TOP, AbilFun, AEFun, Arrow, EffFun, Mark, SimpleType, TypeCheckError,
)

PARAM_NAMES = ("p", "q", "r", "s")

TOP_TYPES: tuple[SimpleType, ...] = (
    BOOL, BOOL, BOOL, REF, Arrow(BOOL, BOOL), Arrow(REF, BOOL), Arrow(BOOL, REF),
)
PARAM_TYPES: tuple[SimpleType, ...] = (BOOL, BOOL, REF, REF, Arrow(BOOL, BOOL), Arrow(REF, BOOL))


def _mark(rng: random.Random) -> Mark:
    return TOP if rng.random() < 0.5 else BOT


def random_qual(rng: random.Random, system: str, ty: SimpleType) -> Optional[QualAnnot]:
    if system == EFFECT:
        return None
    if system == ABILITY:
        # Bool slots are almost always ⊥ in practice
        if ty == BOOL and rng.random() < 0.8:
            return BOT
        return _mark(rng)
    if ty == BOOL and rng.random() < 0.8:
        return ALL_QUALS[0]
    return rng.choice(ALL_QUALS)


def random_annot(rng: random.Random, system: str, ty: SimpleType) -> SurfaceType:
    """A surface type erasing to ``ty`` with random qualifiers for ``system``."""
    if ty == BOOL:
        return SBool()
    if ty == REF:
        return SRef()
    assert isinstance(ty, Arrow)
    return SFun(
        random_annot(rng, system, ty.dom),
        random_qual(rng, system, ty.dom),
        random_annot(rng, system, ty.cod),
        random_qual(rng, system, ty.cod),
        None if system == ABILITY else _mark(rng),
    )


class TermGenerator:
    """Random terms over a fixed environment of ``(name, simple type)`` pairs."""

    def __init__(
        self,
        rng: random.Random,
        system: str,
        env: Sequence[tuple[str, SimpleType]] = (),
        max_size: int = 8,
    ) -> None:
        self.rng = rng
        self.system = system
        self.env = tuple(env)
        self.max_size = max_size

    def term(self, ty: Optional[SimpleType] = None) -> Term:
        """A term of simple type ``ty`` (random when omitted) within the size limit."""
        while True:
            target = ty if ty is not None else self.rng.choice(TOP_TYPES)
            budget = self.rng.randint(1, self.max_size)
            t = self._gen(target, budget, self.env, 0)
            if size(t) <= self.max_size:
                return t

    # budget is a soft cap on node count; the minimal builder may overshoot it
    def _gen(self, ty: SimpleType, budget: int, scope, depth: int) -> Term:
        rng = self.rng
        vars_ = [Var(n) for n, vty in scope if vty == ty]
        if budget <= 1 or (budget <= 3 and rng.random() < 0.4):
            return self._small(ty, scope, depth)
        choices: list[Callable[[], Term]] = []
        if ty == BOOL:
            choices += [
                lambda: Get(self._gen(REF, budget - 1, scope, depth)),
                lambda: self._binary(lambda l, r: Put(l, r), REF, BOOL, budget, scope, depth),
                lambda: self._binary(lambda l, r: Bin(AND, l, r), BOOL, BOOL, budget, scope, depth),
                lambda: self._binary(lambda l, r: Bin(OR, l, r), BOOL, BOOL, budget, scope, depth),
            ]
        if ty == REF:
            choices.append(lambda: Ref(self._gen(BOOL, budget - 1, scope, depth)))
        if isinstance(ty, Arrow) and depth < len(PARAM_NAMES):
            choices.append(lambda: self._abs(ty, budget, scope, depth))
        if budget >= 3:
            choices.append(lambda: self._app(ty, budget, scope, depth))
            if depth < len(PARAM_NAMES):
                choices.append(lambda: self._let(ty, budget, scope, depth))
        if vars_:
            choices.append(lambda: rng.choice(vars_))
        if not choices:
            return self._small(ty, scope, depth)
        return rng.choice(choices)()

    def _binary(self, make, lty, rty, budget, scope, depth) -> Term:
        left_budget = self.rng.randint(1, max(1, budget - 2))
        lhs = self._gen(lty, left_budget, scope, depth)
        rhs = self._gen(rty, max(1, budget - 1 - size(lhs)), scope, depth)
        return make(lhs, rhs)

    def _abs(self, ty: Arrow, budget: int, scope, depth: int) -> Term:
        name = PARAM_NAMES[depth]
        body = self._gen(ty.cod, budget - 1, scope + ((name, ty.dom),), depth + 1)
        annot = random_annot(self.rng, self.system, ty.dom)
        return Abs(name, annot, body, random_qual(self.rng, self.system, ty.dom))

    def _app(self, ty: SimpleType, budget: int, scope, depth: int) -> Term:
        dom = self.rng.choice(PARAM_TYPES)
        fn_budget = self.rng.randint(2, max(2, budget - 2))
        fn = self._gen(Arrow(dom, ty), fn_budget, scope, depth)
        arg = self._gen(dom, max(1, budget - 1 - size(fn)), scope, depth)
        return App(fn, arg)

    def _let(self, ty: SimpleType, budget: int, scope, depth: int) -> Term:
        name = PARAM_NAMES[depth]
        bty = self.rng.choice((BOOL, REF, REF))
        bound = self._gen(bty, self.rng.randint(1, max(1, budget - 2)), scope, depth)
        body = self._gen(ty, max(1, budget - 1 - size(bound)), scope + ((name, bty),), depth + 1)
        return desugar_let(name, bound, body)

    def _small(self, ty: SimpleType, scope, depth: int) -> Term:
        rng = self.rng
        vars_ = [Var(n) for n, vty in scope if vty == ty]
        if ty == BOOL:
            leaves: list[Term] = [Cst(True), Cst(False)] + vars_
            return rng.choice(leaves)
        if ty == REF:
            if vars_ and rng.random() < 0.7:
                return rng.choice(vars_)
            return Ref(Cst(rng.random() < 0.5))
        assert isinstance(ty, Arrow)
        if vars_ and rng.random() < 0.5:
            return rng.choice(vars_)
        if depth >= len(PARAM_NAMES):
            raise _TooDeep()
        return self._abs(ty, 2, scope, depth)


class _TooDeep(Exception):
    pass


def typed_terms(
    seed: int,
    system: str,
    env: Sequence[tuple[str, SimpleType]],
    accept: Callable[[Term], bool],
    count: int,
    max_size: int = 8,
    ty: Optional[SimpleType] = None,
    max_tries: int = 1_000_000,
) -> Iterator[Term]:
    """Yield ``count`` generated terms for which ``accept`` holds.

    ``accept`` usually runs a checker; a ``TypeCheckError`` counts as rejection.
    """
    gen = TermGenerator(random.Random(seed), system, env, max_size)
    made = 0
    for _ in range(max_tries):
        if made >= count:
            return
        try:
            t = gen.term(ty)
        except _TooDeep:
            continue
        try:
            ok = accept(t)
        except TypeCheckError:
            ok = False
        if ok:
            made += 1
            yield t
    raise RuntimeError(f"only {made} of {count} terms accepted after {max_tries} tries")


def random_type(rng: random.Random, system: str, depth: int):
    """A checker-level type of ``system`` with at most ``depth`` nested arrows."""
    if depth <= 0 or rng.random() < 0.3:
        return BOOL if rng.random() < 0.5 else REF
    param = random_type(rng, system, depth - 1)
    result = random_type(rng, system, depth - 1)
    if system == EFFECT:
        return EffFun(param, result, _mark(rng))
    if system == ABILITY:
        return AbilFun(param, _mark(rng), result, _mark(rng))
    return AEFun(param, rng.choice(ALL_QUALS), result, rng.choice(ALL_QUALS), _mark(rng))


def requalify(rng: random.Random, ty):
    """The same shape as ``ty`` with every qualifier and latent effect redrawn."""
    if isinstance(ty, EffFun):
        return EffFun(requalify(rng, ty.param), requalify(rng, ty.result), _mark(rng))
    if isinstance(ty, AbilFun):
        return AbilFun(requalify(rng, ty.param), _mark(rng), requalify(rng, ty.result), _mark(rng))
    if isinstance(ty, AEFun):
        return AEFun(
            requalify(rng, ty.param), rng.choice(ALL_QUALS),
            requalify(rng, ty.result), rng.choice(ALL_QUALS), _mark(rng),
        )
    return ty
