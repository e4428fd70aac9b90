import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purelab.environment import EMPTY_ENV
from purelab.evaluator import (
    DANGLING_LOC, FALSE_V, NOT_A_BOOL, NOT_A_FUNCTION, NOT_A_LOCATION, TIMEOUT, TRUE_V,
    UNBOUND_VAR, BoolV, ClosV, Done, Err, LocV, Timeout, evaluate, run_closed, show_outcome,
)
from purelab.syntax import Cst, Get, Ref, Var, parse, size
from purelab.systems import SYSTEMS, judge
from purelab.types import TypeCheckError

from reference import naive_eval
from strategies import raw_terms, typed_terms

OMEGA = parse("(fun (x: Bool) => x x) (fun (x: Bool) => x x)")


def as_plain(v):
    if isinstance(v, BoolV):
        return v.value
    if isinstance(v, LocV):
        return ("loc", v.index)
    assert isinstance(v, ClosV)
    return ("clo", {k: as_plain(w) for k, w in v.env.items()}, v.param, v.body)


def as_naive(out):
    if isinstance(out, Done):
        return ("done", [as_plain(v) for v in out.store], as_plain(out.value))
    if isinstance(out, Timeout):
        return ("timeout",)
    return ("err", out.kind)


def test_constant():
    assert evaluate({}, (), Cst(True), 10) == Done((), TRUE_V)


def test_cell_update_then_read():
    out = evaluate({}, (), parse("let x = ref false in (x := true) && !x"), 100)
    assert out == Done((TRUE_V,), TRUE_V)


@pytest.mark.parametrize("fuel", [0, 1, 2, 3, 7, 50, 999, 10_000])
def test_omega_never_finishes(fuel):
    assert evaluate({}, (), OMEGA, fuel) == TIMEOUT


def test_omega_times_out_for_every_budget_up_to_ten_thousand():
    # fuel monotonicity lets a Done/Err at k show up at 10_000 as well, so
    # checking every k is redundant but cheap enough for a sparse sweep
    for k in range(0, 10_001, 97):
        assert isinstance(evaluate({}, (), OMEGA, k), Timeout)


def test_run_closed_examples():
    assert run_closed(Cst(False), 1) == Done((), FALSE_V)
    assert run_closed(Get(Ref(Cst(True))), 10) == Done((TRUE_V,), TRUE_V)
    with pytest.raises(ValueError):
        run_closed(Var("x"), 10)


@pytest.mark.parametrize(
    "text, kind",
    [
        ("x", UNBOUND_VAR),
        ("true false", NOT_A_FUNCTION),
        ("!true", NOT_A_LOCATION),
        ("true := false", NOT_A_LOCATION),
        ("(fun (x: Bool) => x) && true", NOT_A_BOOL),
        ("true && ref true", NOT_A_BOOL),
    ],
)
def test_error_kinds(text, kind):
    assert evaluate({}, (), parse(text), 100) == Err(kind)


def test_dangling_location():
    assert evaluate({"a": LocV(3)}, (TRUE_V,), parse("!a"), 10) == Err(DANGLING_LOC)
    assert evaluate({"a": LocV(1)}, (TRUE_V,), parse("a := false"), 10) == Err(DANGLING_LOC)


def test_fuel_counts_rules():
    t = parse("true && false")
    assert evaluate({}, (), t, 2) == TIMEOUT
    assert evaluate({}, (), t, 3) == Done((), FALSE_V)


def test_binary_operators_are_strict():
    out = evaluate({"a": LocV(0)}, (FALSE_V,), parse("true || (a := true)"), 100)
    assert out == Done((TRUE_V,), TRUE_V)


def test_shadowing_uses_latest_binding():
    out = evaluate({"x": TRUE_V}, (), parse("(fun (x: Bool) => x) false"), 20)
    assert out == Done((), FALSE_V)


def test_allocation_order():
    out = run_closed(parse("let x = ref true in let y = ref false in !y"), 100)
    assert out == Done((TRUE_V, FALSE_V), FALSE_V)


def test_trace_lists_every_rule():
    lines = []
    evaluate({}, (), parse("!(ref true)"), 10, trace=lambda rule, span, n: lines.append((rule, span, n)))
    assert [r for r, _, _ in lines] == ["e-get", "e-ref", "e-cst"]
    assert lines[0][1] == "!(ref true)"


def test_show_outcome():
    assert show_outcome(Done((TRUE_V,), FALSE_V)) == "false [0=true]"
    assert show_outcome(TIMEOUT) == "timeout"
    assert show_outcome(Err(UNBOUND_VAR)) == "error(unboundVar)"


def test_negative_fuel_is_rejected():
    with pytest.raises(ValueError):
        evaluate({}, (), Cst(True), -1)


ENV = {"a": LocV(0), "y": TRUE_V}
STORE = (FALSE_V,)
fuels = st.integers(0, 60)


@given(raw_terms(), fuels)
def test_agrees_with_recursive_reference(t, fuel):
    plain_env = {k: as_plain(v) for k, v in ENV.items()}
    expected = naive_eval(plain_env, [as_plain(v) for v in STORE], t, fuel)
    assert as_naive(evaluate(ENV, STORE, t, fuel)) == expected


@given(raw_terms(), fuels)
def test_deterministic(t, fuel):
    assert evaluate(ENV, STORE, t, fuel) == evaluate(ENV, STORE, t, fuel)


@given(raw_terms(), fuels, st.integers(0, 200))
def test_fuel_monotone(t, fuel, extra):
    out = evaluate(ENV, STORE, t, fuel)
    later = evaluate(ENV, STORE, t, fuel + extra)
    if isinstance(out, (Done, Err)):
        assert later == out


@given(raw_terms(), st.integers(0, 200))
def test_store_grows_and_changes_only_where_written(t, fuel):
    log: list[int] = []
    out = evaluate(ENV, STORE, t, fuel, write_log=log)
    if isinstance(out, Done):
        assert len(out.store) >= len(STORE)
        for i, v in enumerate(STORE):
            assert out.store[i] == v or i in log
        for v in [out.value, *out.store]:
            if isinstance(v, LocV):
                assert v.index < len(out.store)


def _typed_by_some_checker(env, t) -> bool:
    for system in SYSTEMS:
        try:
            judge(system, env, t)
            return True
        except TypeCheckError:
            pass
    return False


@settings(max_examples=300)
@given(typed_terms(max_size=10, env=EMPTY_ENV))
def test_typed_closed_terms_finish(case):
    env, t = case
    if not _typed_by_some_checker(env, t):
        return
    out = run_closed(t, 2 * size(t) * 2 ** size(t))
    assert isinstance(out, Done)
