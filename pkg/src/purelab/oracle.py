"""Semantic ground truth by brute force.

Two terms are operationally equivalent when, from every pre-state, they agree
on termination and on Boolean results. A term ``t`` is observationally pure
when ``let x = t in C[x]`` and ``C[t]`` are equivalent for every context
``C``; here contexts are enumerated exhaustively up to a node budget, so a
``pureUpToBounds`` verdict is evidence, while ``impure`` comes with a
concrete counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional

from .evaluator import (
    TIMEOUT, BoolV, ClosV, Done, Err, Outcome, SharedRuns, Timeout, bool_value, evaluate, evaluate_counted,
)
from .syntax import (
    AND, HOLE, OR, Abs, App, Bin, FALSE, Get, Put, Ref, SBool, SRef, TRUE, Term, Var,
    count_holes, desugar_let, free_vars, print_term, replace_holes, size, substitute,
)
from .environment import BINDERS, EMPTY_ENV, REF_CELL, EnvSpec
from .ae import HoleSpec, typecheck_ae
from .simple import strip_annotations, typecheck_simple
from .systems import AE, judge
from .types import BOOL, REF, Arrow, SimpleType, TypeCheckError

DEFAULT_MAX_NODES = 5
DEFAULT_FUEL = 10_000
DEFAULT_STORE_BOUND = 8

# Name bound by the let-form of the purity check. It cannot be written in
# source text (identifiers start with a letter), so nothing can capture it.
LET_VAR = "_x"


def observe(out: Outcome) -> str:
    """What a program context can see of an outcome."""
    if isinstance(out, Done):
        v = out.value
        if v is bool_value(True) or v is bool_value(False):
            return str(v)
        return "value"
    if isinstance(out, Timeout):
        return "timeout"
    return f"error({out.kind})"


EQUIV = "equiv"
DISTINGUISHED = "distinguished"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Equivalence:
    status: str
    config: Optional[dict[str, bool]] = None
    left: Optional[str] = None
    right: Optional[str] = None
    alarm: bool = False  # both sides raised the same dynamic error somewhere


def _disagree(o1: Outcome, o2: Outcome) -> bool:
    if isinstance(o1, Done) and isinstance(o2, Done):
        return observe(o1) != observe(o2)
    return type(o1) is not type(o2)


def op_equiv(
    t1: Term,
    t2: Term,
    env: EnvSpec = EMPTY_ENV,
    fuel: int = DEFAULT_FUEL,
    store_bound: int = DEFAULT_STORE_BOUND,
) -> Equivalence:
    """Compare two terms from every enumerated pre-state."""
    timed_out = alarm = False
    for config in env.configs(store_bound):
        values, store = env.instantiate(config)
        o1 = evaluate(values, store, t1, fuel)
        o2 = evaluate(values, store, t2, fuel)
        if _disagree(o1, o2):
            return Equivalence(DISTINGUISHED, env.describe(config), observe(o1), observe(o2), alarm)
        if isinstance(o1, Timeout):
            timed_out = True
        elif isinstance(o1, Err):
            alarm = True
    return Equivalence(INCONCLUSIVE if timed_out else EQUIV, alarm=alarm)


# ------------------------------------------------------------------ contexts


def context_size(c: Term) -> int:
    """Node count of a context, not counting its holes."""
    return size(c) - count_holes(c)


def plug(context: Term, t: Term) -> Term:
    return replace_holes(context, t)


def _annot(ty: SimpleType):
    return SBool() if ty == BOOL else SRef()


def _domains(ty: SimpleType) -> list[SimpleType]:
    out: list[SimpleType] = []
    while isinstance(ty, Arrow):
        out.extend(_domains(ty.dom))
        out.append(ty.dom)
        ty = ty.cod
    return out


def _split(n: int) -> Iterator[tuple[int, int]]:
    for k in range(n + 1):
        yield k, n - k


class _Space:
    """Memoized enumeration keyed by (type, size, binder types in scope)."""

    def __init__(self, hole_type: SimpleType, env: EnvSpec) -> None:
        self.hole_type = hole_type
        arg_types: list[SimpleType] = [BOOL, REF]
        for d in _domains(hole_type):
            if d not in arg_types:
                arg_types.append(d)
        self.arg_types = tuple(arg_types)
        self.env_scope = tuple(env.simple_ctx().items())
        self.memo: dict[tuple, tuple[Term, ...]] = {}
        self.left_runs: dict[tuple, tuple[Outcome, int]] = {}
        self._let_bodies: dict[int, Term] = {}

    def with_let_var(self, c: Term) -> Term:
        body = self._let_bodies.get(id(c))
        if body is None:
            body = plug(c, Var(LET_VAR))
            self._let_bodies[id(c)] = body
        return body

    def get(self, ty: SimpleType, n: int, binders: tuple[SimpleType, ...]) -> tuple[Term, ...]:
        key = (ty, n, binders)
        hit = self.memo.get(key)
        if hit is None:
            hit = tuple(self._build(ty, n, binders))
            self.memo[key] = hit
        return hit

    def _build(self, ty: SimpleType, n: int, binders: tuple[SimpleType, ...]) -> Iterator[Term]:
        if n == 0:
            if ty == self.hole_type:
                yield HOLE
            return
        if n == 1:
            if ty == BOOL:
                yield TRUE
                yield FALSE
            for name, vty in self.env_scope:
                if vty == ty:
                    yield Var(name)
            for name, vty in zip(BINDERS, binders):
                if vty == ty:
                    yield Var(name)
        rest = n - 1
        # application
        for k, m in _split(rest):
            for dom in self.arg_types:
                fns = self.get(Arrow(dom, ty), k, binders)
                if not fns:
                    continue
                args = self.get(dom, m, binders)
                for f in fns:
                    for a in args:
                        yield App(f, a)
        # abstraction
        if isinstance(ty, Arrow) and ty.dom in (BOOL, REF) and len(binders) < len(BINDERS):
            name = BINDERS[len(binders)]
            for body in self.get(ty.cod, rest, binders + (ty.dom,)):
                yield Abs(name, _annot(ty.dom), body)
        if ty == REF:
            for init in self.get(BOOL, rest, binders):
                yield Ref(init)
        if ty == BOOL:
            for target in self.get(REF, rest, binders):
                yield Get(target)
            for k, m in _split(rest):
                targets = self.get(REF, k, binders)
                if not targets:
                    continue
                values = self.get(BOOL, m, binders)
                for target in targets:
                    for value in values:
                        yield Put(target, value)
            for op in (AND, OR):
                for k, m in _split(rest):
                    lhs = self.get(BOOL, k, binders)
                    rhs = self.get(BOOL, m, binders)
                    for l in lhs:
                        for r in rhs:
                            yield Bin(op, l, r)


@lru_cache(maxsize=64)
def _space(hole_type: SimpleType, env: EnvSpec) -> _Space:
    return _Space(hole_type, env)


def enumerate_contexts(
    hole_type: SimpleType, env: EnvSpec = EMPTY_ENV, max_nodes: int = DEFAULT_MAX_NODES
) -> Iterator[Term]:
    """Every Bool-typed context with at most ``max_nodes`` non-hole nodes, smallest first."""
    if max_nodes < 0:
        raise ValueError("max_nodes must be non-negative")
    space = _space(hole_type, env)
    for n in range(max_nodes + 1):
        yield from space.get(BOOL, n, ())


def count_contexts(hole_type: SimpleType, env: EnvSpec, max_nodes: int) -> list[int]:
    space = _space(hole_type, env)
    return [len(space.get(BOOL, n, ())) for n in range(max_nodes + 1)]


# -------------------------------------------------------------------- purity

PURE = "pureUpToBounds"
IMPURE = "impure"


@dataclass(frozen=True)
class Bounds:
    max_nodes: int = DEFAULT_MAX_NODES
    fuel: int = DEFAULT_FUEL
    store_bound: int = DEFAULT_STORE_BOUND

    def as_dict(self) -> dict:
        return {"maxNodes": self.max_nodes, "fuel": self.fuel, "storeBound": self.store_bound}


@dataclass(frozen=True)
class Witness:
    context: Term
    config: dict[str, bool]
    left: str
    right: str

    def as_dict(self) -> dict:
        return {
            "context": print_term(self.context),
            "store": self.config,
            "left": self.left,
            "right": self.right,
        }


@dataclass(frozen=True)
class PurityVerdict:
    status: str
    bounds: Bounds
    witness: Optional[Witness] = None
    contexts_checked: int = 0
    inconclusive: int = 0
    alarms: int = 0

    @property
    def pure(self) -> bool:
        return self.status == PURE

    def as_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.as_dict()
        out["bounds"] = self.bounds.as_dict()
        out["contextsChecked"] = self.contexts_checked
        out["inconclusive"] = self.inconclusive
        out["alarms"] = self.alarms
        return out


def hole_type_of(t: Term, env: EnvSpec) -> SimpleType:
    return typecheck_simple(env.simple_ctx(), t)


def purity_pair(context: Term, t: Term) -> tuple[Term, Term]:
    """``let x = t in C[x]`` and ``C[t]``."""
    return desugar_let(LET_VAR, t, plug(context, Var(LET_VAR))), plug(context, t)


def obs_purity(
    t: Term,
    env: EnvSpec = EMPTY_ENV,
    bounds: Bounds = Bounds(),
    hole_type: Optional[SimpleType] = None,
    contexts: Optional[Iterable[Term]] = None,
    *,
    replay: bool = True,
) -> PurityVerdict:
    """Search for a context telling ``let x = t in C[x]`` apart from ``C[t]``.

    The hole type defaults to the simple type of ``t``; pass it explicitly for
    terms without one, such as a self-application. ``contexts`` replaces the
    default enumeration, e.g. with a filtered one.

    With ``replay`` (the default) runs of ``t`` and of ``C[x]`` are recorded
    and replayed rather than repeated; this gives the same outcomes as
    evaluating both programs with :func:`op_equiv`, only faster. Passing
    ``replay=False`` does exactly that instead.
    """
    unknown = free_vars(t) - env.names
    if unknown:
        raise ValueError(f"term has free variables outside the environment: {sorted(unknown)}")
    if hole_type is None:
        hole_type = hole_type_of(t, env)
    space = _space(hole_type, env)
    if contexts is None:
        contexts = enumerate_contexts(hole_type, env, bounds.max_nodes)
    compare = _Replayer(t, env, bounds, space) if replay else None
    checked = inconclusive = alarms = 0
    for c in contexts:
        checked += 1
        if compare is not None:
            eq = compare(c)
        else:
            left, right = purity_pair(c, t)
            eq = op_equiv(left, right, env, bounds.fuel, bounds.store_bound)
        alarms += eq.alarm
        if eq.status == DISTINGUISHED:
            w = Witness(c, eq.config or {}, eq.left or "", eq.right or "")
            return PurityVerdict(IMPURE, bounds, w, checked, inconclusive, alarms)
        if eq.status == INCONCLUSIVE:
            inconclusive += 1
    return PurityVerdict(PURE, bounds, None, checked, inconclusive, alarms)


class _Replayer:
    """Outcomes of the purity pair for one term, computed by replaying shared runs.

    The let-form ``(fun x => C[x]) t`` spends one unit on the application and
    one on the abstraction, then runs ``t`` (the same for every context), then
    ``C[x]`` with ``x`` bound to the result. That last run does not depend on
    ``t`` beyond the value and store it left behind, so it is shared across
    terms through the context space.
    """

    def __init__(self, t: Term, env: EnvSpec, bounds: Bounds, space: _Space) -> None:
        self.t = t
        self.env = env
        self.fuel = bounds.fuel
        self.space = space
        self.cells = sum(1 for _, kind in env.entries if kind == REF_CELL)
        self.configs = []
        for config in env.configs(bounds.store_bound):
            values, store = env.instantiate(config)
            if self.fuel >= 2:
                head = evaluate_counted(values, store, t, self.fuel - 2)
            else:
                head = (TIMEOUT, 0)
            self.configs.append((config, values, store, head, SharedRuns(t)))

    def _left(self, c: Term, config, values, head) -> Outcome:
        out, used = head
        if self.fuel < 2 or not isinstance(out, Done):
            return out if self.fuel >= 2 else TIMEOUT
        left_fuel = self.fuel - 2 - used
        v = out.value
        body = self.space.with_let_var(c)
        if isinstance(v, ClosV):
            return evaluate_counted({**values, LET_VAR: v}, out.store, body, left_fuel)[0]
        start = out.store
        if isinstance(v, BoolV):
            # cells past the environment's are unreachable now, and locations
            # are never observable, so they cannot influence the outcome
            start = start[: self.cells]
        key = (id(c), config, v, start)
        hit = self.space.left_runs.get(key)
        if hit is None or (isinstance(hit[0], Timeout) and hit[1] < left_fuel):
            hit = evaluate_counted({**values, LET_VAR: v}, start, body, left_fuel)
            self.space.left_runs[key] = hit
        res, cost = hit
        if isinstance(res, Timeout) or cost > left_fuel:
            return TIMEOUT
        return res

    def __call__(self, c: Term) -> Equivalence:
        timed_out = alarm = False
        right_term = plug(c, self.t)
        for config, values, store, head, shared in self.configs:
            o1 = self._left(c, config, values, head)
            o2 = evaluate_counted(values, store, right_term, self.fuel, shared=shared)[0]
            if _disagree(o1, o2):
                return Equivalence(
                    DISTINGUISHED, self.env.describe(config), observe(o1), observe(o2), alarm
                )
            if isinstance(o1, Timeout):
                timed_out = True
            elif isinstance(o1, Err):
                alarm = True
        return Equivalence(INCONCLUSIVE if timed_out else EQUIV, alarm=alarm)


# ------------------------------------------------------------ theorem checks

_verdicts: dict[tuple, PurityVerdict] = {}


def purity_of(
    t: Term, env: EnvSpec, bounds: Bounds, hole_type: Optional[SimpleType] = None
) -> PurityVerdict:
    """:func:`obs_purity` memoized on the annotation-free term.

    Evaluation never looks at annotations, so terms differing only in their
    qualifiers share one verdict.
    """
    key = (strip_annotations(t), env, bounds, hole_type)
    hit = _verdicts.get(key)
    if hit is None:
        hit = obs_purity(key[0], env, bounds, hole_type)
        _verdicts[key] = hit
    return hit


def restricted_contexts(t: Term, env: EnvSpec, max_nodes: int) -> Iterator[Term]:
    """Contexts that are themselves well typed in the combined discipline when
    the hole is typed with ``t``'s judgment."""
    ctx = env.ae_ctx()
    hole = HoleSpec(typecheck_ae(ctx, t), free_vars(t))
    for c in enumerate_contexts(hole_type_of(t, env), env, max_nodes):
        try:
            typecheck_ae(ctx, c, hole=hole)
        except TypeCheckError:
            continue
        yield c


@dataclass(frozen=True)
class SafetyCase:
    term: Term
    judgment: Optional[str]
    system_pure: Optional[bool]
    verdict: Optional[PurityVerdict]
    error: str = ""

    @property
    def violation(self) -> bool:
        return bool(self.system_pure) and self.verdict is not None and not self.verdict.pure

    def as_dict(self) -> dict:
        out: dict = {
            "term": print_term(self.term),
            "judgment": self.judgment,
            "systemPure": self.system_pure,
            "semantic": None if self.verdict is None else self.verdict.as_dict(),
        }
        if self.error:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class SafetyReport:
    system: str
    env: EnvSpec
    bounds: Bounds
    cases: tuple[SafetyCase, ...]

    @property
    def violations(self) -> list[SafetyCase]:
        return [c for c in self.cases if c.violation]

    @property
    def checked(self) -> int:
        return sum(1 for c in self.cases if c.verdict is not None)

    def as_dict(self) -> dict:
        return {
            "system": self.system,
            "env": str(self.env),
            "bounds": self.bounds.as_dict(),
            "terms": len(self.cases),
            "systemPure": sum(1 for c in self.cases if c.system_pure),
            "violations": len(self.violations),
            "cases": [c.as_dict() for c in self.cases],
        }


def check_effect_safety(
    system: str,
    env: EnvSpec,
    corpus: Iterable[Term],
    bounds: Bounds = Bounds(),
    *,
    restrict: bool = False,
) -> SafetyReport:
    """Every term the discipline calls pure must survive the purity oracle.

    With ``restrict`` (combined discipline only) contexts are limited to those
    that are well typed around the term, as the safety theorem requires;
    by default all simply typed contexts are tried, a stronger test.
    """
    cases = []
    for t in corpus:
        try:
            v = judge(system, env, t)
        except TypeCheckError as exc:
            cases.append(SafetyCase(t, None, None, None, str(exc)))
            continue
        verdict = None
        if v.pure:
            if restrict and system == AE:
                verdict = obs_purity(
                    t, env, bounds, contexts=restricted_contexts(t, env, bounds.max_nodes)
                )
            else:
                verdict = purity_of(t, env, bounds)
        cases.append(SafetyCase(t, v.judgment, v.pure, verdict))
    return SafetyReport(system, env, bounds, tuple(cases))


HOLDS = "holds"
FAILS = "fails"
PRECONDITION = "precondition"


@dataclass(frozen=True)
class TheoremCheck:
    status: str
    detail: str = ""
    equivalence: Optional[Equivalence] = None

    def as_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.equivalence is not None and self.equivalence.status == DISTINGUISHED:
            eq = self.equivalence
            out["store"] = eq.config
            out["left"] = eq.left
            out["right"] = eq.right
        return out


def reorder_precondition(t1: Term, t2: Term, system: str, env: EnvSpec, op: str = AND) -> str:
    """Empty when the reordering theorem of ``system`` applies, else the reason."""
    try:
        if system == AE:
            ctx = env.ae_ctx()
            j1, j2 = typecheck_ae(ctx, t1), typecheck_ae(ctx, t2)
            typecheck_ae(ctx, Bin(op, t1, t2))
            if j1.effect and j2.effect:
                return "both operands have effect ⊤"
            return ""
        if not judge(system, env, Bin(op, t1, t2)).pure:
            return "composite is not pure"
        return ""
    except TypeCheckError as exc:
        return f"ill-typed: {exc}"


def check_reordering(
    t1: Term,
    t2: Term,
    system: str,
    env: EnvSpec = EMPTY_ENV,
    fuel: int = DEFAULT_FUEL,
    store_bound: int = DEFAULT_STORE_BOUND,
    op: str = AND,
) -> TheoremCheck:
    """``t1 op t2`` against ``t2 op t1`` when the discipline licenses swapping them."""
    why = reorder_precondition(t1, t2, system, env, op)
    if why:
        return TheoremCheck(PRECONDITION, why)
    eq = op_equiv(Bin(op, t1, t2), Bin(op, t2, t1), env, fuel, store_bound)
    return TheoremCheck(HOLDS if eq.status == EQUIV else FAILS, eq.status, eq)


def beta_precondition(name: str, body: Term, arg: Term, env: EnvSpec) -> str:
    ctx = env.ae_ctx()
    try:
        j = typecheck_ae(ctx, arg)
        typecheck_ae(ctx, desugar_let(name, arg, body))
    except TypeCheckError as exc:
        return f"ill-typed: {exc}"
    if j.effect:
        return "argument has effect ⊤"
    if j.qual.fresh:
        return "argument may return a fresh location"
    return ""


def check_beta(
    name: str,
    body: Term,
    arg: Term,
    env: EnvSpec = EMPTY_ENV,
    fuel: int = DEFAULT_FUEL,
    store_bound: int = DEFAULT_STORE_BOUND,
) -> TheoremCheck:
    """``(fun name => body) arg`` against ``body[arg/name]``."""
    why = beta_precondition(name, body, arg, env)
    if why:
        return TheoremCheck(PRECONDITION, why)
    eq = op_equiv(desugar_let(name, arg, body), substitute(body, name, arg), env, fuel, store_bound)
    return TheoremCheck(HOLDS if eq.status == EQUIV else FAILS, eq.status, eq)
