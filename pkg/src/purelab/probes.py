"""Semantic classification of function values by probing them with the oracle.

Two questions are asked of a function ``f``:

* Is it a pure function? It is not if one application of ``f`` to some pure
  argument is impure, or if applying it all the way produces effects that
  come from its arguments (impure with some arguments, pure with arguments
  that hold no resources).
* Does its value carry an impure ability? It does if some way of using it
  with resource-free arguments (applying it, reading or writing what it
  returns) is impure.

Arguments are drawn from a small fixed pool. Resource-free ones are
constants, freshly allocated cells and closures over nothing; the general
pool adds the environment's variables and closures that use its cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .environment import BOOL_VAL, REF_CELL, EnvSpec
from .oracle import IMPURE, PURE, Bounds, purity_of
from .simple import to_surface, typecheck_simple
from .syntax import FALSE, TRUE, Abs, App, Get, Put, Ref, Term, Var, desugar_let, print_term
from .types import BOOL, REF, Arrow, SimpleType

# Names for bound cells. Source identifiers start with a letter, so these
# never clash with anything in the probed term.
_CELL_NAMES = ("_r0", "_r1", "_r2", "_r3")
_PARAM = "_z"


@dataclass(frozen=True)
class _Arg:
    """A probe argument: either a term, or a fresh cell bound around the use."""

    term: Optional[Term] = None
    fresh_cell: bool = False


def _fun(dom: SimpleType, body: Term) -> Term:
    return Abs(_PARAM, to_surface(dom), body)


def _clean_value(ty: SimpleType) -> Term:
    if ty == BOOL:
        return TRUE
    if ty == REF:
        return Ref(TRUE)
    assert isinstance(ty, Arrow)
    return _fun(ty.dom, _clean_value(ty.cod))


def clean_args(ty: SimpleType, env: EnvSpec) -> list[_Arg]:
    if ty == BOOL:
        return [_Arg(TRUE), _Arg(FALSE)]
    if ty == REF:
        return [_Arg(fresh_cell=True)]
    assert isinstance(ty, Arrow)
    out = [_Arg(_clean_value(ty))]
    if ty.cod == BOOL and ty.dom == BOOL:
        out.append(_Arg(_fun(BOOL, Var(_PARAM))))
    if ty.cod == BOOL and ty.dom == REF:
        out.append(_Arg(_fun(REF, Get(Var(_PARAM)))))
    return out


def any_args(ty: SimpleType, env: EnvSpec) -> list[_Arg]:
    out = clean_args(ty, env)
    cells = [Var(n) for n, kind in env.entries if kind == REF_CELL]
    bools = [Var(n) for n, kind in env.entries if kind == BOOL_VAL]
    if ty == BOOL:
        out += [_Arg(v) for v in bools]
    elif ty == REF:
        out += [_Arg(v) for v in cells]
    else:
        assert isinstance(ty, Arrow)
        if ty.cod == BOOL:
            out += [_Arg(_fun(ty.dom, Get(c))) for c in cells]
            out += [_Arg(_fun(ty.dom, Put(c, TRUE))) for c in cells]
        elif ty.cod == REF:
            out += [_Arg(_fun(ty.dom, c)) for c in cells]
    return out


def _apply(f: Term, args: list[_Arg]) -> tuple[Term, list[str]]:
    """``f`` applied to ``args``, with fresh cells bound outside the application."""
    t, cells = f, []
    for arg in args:
        if arg.fresh_cell:
            name = _CELL_NAMES[len(cells)]
            cells.append(name)
            t = App(t, Var(name))
        else:
            t = App(t, arg.term)
    return t, cells


def _bind_cells(t: Term, cells: list[str]) -> Term:
    for name in reversed(cells):
        t = desugar_let(name, Ref(TRUE), t)
    return t


def _arity(ty: SimpleType) -> list[SimpleType]:
    doms = []
    while isinstance(ty, Arrow):
        doms.append(ty.dom)
        ty = ty.cod
    return doms


def _result(ty: SimpleType, n: int) -> SimpleType:
    for _ in range(n):
        assert isinstance(ty, Arrow)
        ty = ty.cod
    return ty


def _applications(f: Term, ty: SimpleType, env: EnvSpec, pool, depth: int) -> Iterator[tuple]:
    """``f`` applied to ``depth`` arguments from ``pool``, with bound cells and result type."""
    doms = _arity(ty)[:depth]
    choices: list[list[_Arg]] = [[]]
    for dom in doms:
        choices = [c + [a] for c in choices for a in pool(dom, env)]
    for chosen in choices:
        app, cells = _apply(f, chosen)
        yield app, cells, _result(ty, len(doms))


def _uses(t: Term, ty: SimpleType) -> list[Term]:
    """Ways to consume a value of non-function type ``ty``."""
    if ty == REF:
        return [t, Get(t), Put(t, TRUE)]
    return [t]


@dataclass(frozen=True)
class Probe:
    term: Term
    status: str

    def as_dict(self) -> dict:
        return {"probe": print_term(self.term), "status": self.status}


@dataclass(frozen=True)
class FunctionClass:
    function: str  # PURE or IMPURE
    value_ability: str
    function_witness: Optional[Probe] = None
    ability_witness: Optional[Probe] = None

    def as_dict(self) -> dict:
        out: dict = {"function": self.function, "valueAbility": self.value_ability}
        if self.function_witness is not None:
            out["functionWitness"] = self.function_witness.as_dict()
        if self.ability_witness is not None:
            out["abilityWitness"] = self.ability_witness.as_dict()
        return out


def _first_impure(candidates, env: EnvSpec, bounds: Bounds) -> Optional[Probe]:
    for term, hole in candidates:
        if not purity_of(term, env, bounds, hole).pure:
            return Probe(term, IMPURE)
    return None


def classify_function(
    f: Term, env: EnvSpec, bounds: Bounds = Bounds(), fn_type: Optional[SimpleType] = None
) -> FunctionClass:
    if fn_type is None:
        fn_type = typecheck_simple(env.simple_ctx(), f)
    if not isinstance(fn_type, Arrow):
        raise ValueError(f"not a function type: {fn_type}")
    full = len(_arity(fn_type))

    def probes(pool, depth, consume=False):
        for app, cells, res in _applications(f, fn_type, env, pool, depth):
            for use in (_uses(app, res) if consume else [app]):
                yield _bind_cells(use, cells), (BOOL if use is not app else res)

    witness = _first_impure(probes(any_args, 1), env, bounds)
    if witness is None and full > 1:
        dirty = _first_impure(probes(any_args, full), env, bounds)
        if dirty is not None and _first_impure(probes(clean_args, full), env, bounds) is None:
            witness = dirty
    ability = None
    for depth in range(1, full + 1):
        ability = _first_impure(probes(clean_args, depth, consume=depth == full), env, bounds)
        if ability is not None:
            break
    return FunctionClass(
        IMPURE if witness else PURE,
        IMPURE if ability else PURE,
        witness,
        ability,
    )
