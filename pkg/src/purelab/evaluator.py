"""Fuel-bounded big-step evaluation.

The evaluator is written as an explicit-stack machine rather than a recursive
function so that deep derivations (a diverging term burning ten thousand units
of fuel, say) do not hit Python's recursion limit. It still computes exactly
the big-step relation: every node entered costs one unit of fuel, and a
``Done`` outcome means a complete derivation using at most ``fuel`` rule
applications exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

from .syntax import AND, Abs, App, Bin, Cst, Get, Hole, Put, Ref, Term, Var, free_vars, print_term


@dataclass(frozen=True, slots=True)
class BoolV:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True, slots=True)
class LocV:
    index: int

    def __str__(self) -> str:
        return f"loc{self.index}"


@dataclass(frozen=True, slots=True, eq=True)
class ClosV:
    env: Mapping[str, "Value"]
    param: str
    body: Term

    def __hash__(self) -> int:
        return hash((self.param, self.body))

    def __str__(self) -> str:
        return "<closure>"


Value = Union[BoolV, LocV, ClosV]

TRUE_V = BoolV(True)
FALSE_V = BoolV(False)


def bool_value(b: bool) -> BoolV:
    return TRUE_V if b else FALSE_V


@dataclass(frozen=True, slots=True)
class Done:
    store: tuple[Value, ...]
    value: Value


@dataclass(frozen=True, slots=True)
class Timeout:
    pass


UNBOUND_VAR = "unboundVar"
NOT_A_FUNCTION = "notAFunction"
NOT_A_LOCATION = "notALocation"
NOT_A_BOOL = "notABool"
DANGLING_LOC = "danglingLoc"
ERROR_KINDS = (UNBOUND_VAR, NOT_A_FUNCTION, NOT_A_LOCATION, NOT_A_BOOL, DANGLING_LOC)


@dataclass(frozen=True, slots=True)
class Err:
    kind: str


Outcome = Union[Done, Timeout, Err]
TIMEOUT = Timeout()

Tracer = Callable[[str, str, int], None]

_RULE = {
    Cst: "e-cst",
    Var: "e-var",
    Abs: "e-abs",
    App: "e-app",
    Ref: "e-ref",
    Get: "e-get",
    Put: "e-put",
    Bin: "e-bin",
}


# frame tags
_APP_FN, _APP_ARG, _BIN_LHS, _BIN_RHS, _GET, _PUT_TARGET, _PUT_VALUE, _REF = (
    "app-fn", "app-arg", "bin-lhs", "bin-rhs", "get", "put-target", "put-value", "ref"
)
_GET_FRAME = (_GET,)
_REF_FRAME = (_REF,)


def evaluate(
    env: Mapping[str, Value],
    store: Sequence[Value],
    term: Term,
    fuel: int,
    *,
    trace: Optional[Tracer] = None,
    write_log: Optional[list[int]] = None,
) -> Outcome:
    """Evaluate ``term`` under ``env`` and ``store`` with a budget of ``fuel`` rules.

    ``trace`` is called once per rule application with the rule name, the
    printed subterm and the current store size. ``write_log``, when given,
    collects the location of every ``:=``.
    """
    return evaluate_counted(env, store, term, fuel, trace=trace, write_log=write_log)[0]


class SharedRuns:
    """Replays evaluations of one closed-over subterm instead of redoing them.

    The oracle plugs the same term ``subject`` into many places of many
    contexts. Its free variables are never rebound by a context, so its
    outcome depends only on the store it starts from. Results are recorded
    per starting store together with the fuel they consumed, which keeps
    replays exact: a recorded run that needed more fuel than is left is a
    timeout.
    """

    def __init__(self, subject: Term) -> None:
        self.subject = subject
        self.runs: dict[tuple[Value, ...], tuple[Outcome, int]] = {}


def evaluate_counted(
    env: Mapping[str, Value],
    store: Sequence[Value],
    term: Term,
    fuel: int,
    *,
    trace: Optional[Tracer] = None,
    write_log: Optional[list[int]] = None,
    shared: Optional[SharedRuns] = None,
) -> tuple[Outcome, int]:
    """Like :func:`evaluate`, also returning how much fuel was used."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    heap = list(store)
    # A frame is a tuple whose first item says what to do with the next value.
    stack: list[tuple] = []
    push = stack.append
    t: Optional[Term] = term
    cur_env: Mapping[str, Value] = env
    value: Value = TRUE_V
    remaining = fuel
    subject = shared.subject if shared is not None else None
    while True:
        if t is not None:
            if t is subject:
                key = tuple(heap)
                hit = shared.runs.get(key)
                if hit is None or (isinstance(hit[0], Timeout) and hit[1] < remaining):
                    hit = evaluate_counted(cur_env, heap, t, remaining)
                    shared.runs[key] = hit
                out, used = hit
                if isinstance(out, Timeout) or used > remaining:
                    return TIMEOUT, fuel
                remaining -= used
                if isinstance(out, Err):
                    return out, fuel - remaining
                heap = list(out.store)
                value = out.value
                t = None
                continue
            if remaining == 0:
                return TIMEOUT, fuel
            remaining -= 1
            if trace is not None:
                trace(_RULE.get(type(t), "e-hole"), print_term(t), len(heap))
            tt = type(t)
            if tt is Var:
                value = cur_env.get(t.name)
                if value is None:
                    return Err(UNBOUND_VAR), fuel - remaining
                t = None
            elif tt is Cst:
                value = TRUE_V if t.value else FALSE_V
                t = None
            elif tt is App:
                push((_APP_FN, t.arg, cur_env))
                t = t.fn
            elif tt is Abs:
                value = ClosV(cur_env, t.param, t.body)
                t = None
            elif tt is Bin:
                push((_BIN_LHS, t.op, t.rhs, cur_env))
                t = t.lhs
            elif tt is Get:
                push(_GET_FRAME)
                t = t.target
            elif tt is Put:
                push((_PUT_TARGET, t.value, cur_env))
                t = t.target
            elif tt is Ref:
                push(_REF_FRAME)
                t = t.init
            elif tt is Hole:
                raise ValueError("cannot evaluate a term containing a hole")
            else:
                raise TypeError(f"not a term: {t!r}")
            continue

        # a value is ready: resume the innermost pending frame
        if not stack:
            return Done(tuple(heap), value), fuel - remaining
        frame = stack.pop()
        tag = frame[0]
        if tag is _APP_FN:
            if type(value) is not ClosV:
                return Err(NOT_A_FUNCTION), fuel - remaining
            push((_APP_ARG, value))
            t, cur_env = frame[1], frame[2]
        elif tag is _APP_ARG:
            clo = frame[1]
            new_env = dict(clo.env)
            new_env[clo.param] = value
            t, cur_env = clo.body, new_env
        elif tag is _BIN_LHS:
            if type(value) is not BoolV:
                return Err(NOT_A_BOOL), fuel - remaining
            push((_BIN_RHS, frame[1], value.value))
            t, cur_env = frame[2], frame[3]
        elif tag is _BIN_RHS:
            if type(value) is not BoolV:
                return Err(NOT_A_BOOL), fuel - remaining
            if frame[1] == AND:
                value = TRUE_V if frame[2] and value.value else FALSE_V
            else:
                value = TRUE_V if frame[2] or value.value else FALSE_V
        elif tag is _GET:
            if type(value) is not LocV:
                return Err(NOT_A_LOCATION), fuel - remaining
            if not 0 <= value.index < len(heap):
                return Err(DANGLING_LOC), fuel - remaining
            value = heap[value.index]
        elif tag is _PUT_TARGET:
            if type(value) is not LocV:
                return Err(NOT_A_LOCATION), fuel - remaining
            if not 0 <= value.index < len(heap):
                return Err(DANGLING_LOC), fuel - remaining
            push((_PUT_VALUE, value.index))
            t, cur_env = frame[1], frame[2]
        elif tag is _PUT_VALUE:
            heap[frame[1]] = value
            if write_log is not None:
                write_log.append(frame[1])
            value = TRUE_V
        elif tag is _REF:
            heap.append(value)
            value = LocV(len(heap) - 1)
        else:
            raise AssertionError(tag)


def run_closed(term: Term, fuel: int, **kwargs) -> Outcome:
    """Evaluate a closed term from the empty environment and store."""
    open_vars = free_vars(term)
    if open_vars:
        raise ValueError(f"term is not closed: free {sorted(open_vars)}")
    return evaluate({}, (), term, fuel, **kwargs)


def show_outcome(out: Outcome) -> str:
    if isinstance(out, Done):
        cells = ", ".join(f"{i}={v}" for i, v in enumerate(out.store))
        return f"{out.value} [{cells}]"
    if isinstance(out, Timeout):
        return "timeout"
    return f"error({out.kind})"
