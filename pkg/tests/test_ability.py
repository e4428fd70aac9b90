import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from purelab.ability import ambient, is_pure_a, subtype_a, typecheck_a
from purelab.environment import EnvSpec
from purelab.syntax import Abs, parse
from purelab.types import BOOL, BOT, REF, TOP, AbilFun, TypeCheckError

from reference import naive_free_vars
from strategies import type_pools, typed_terms

A_REF = {"a": (REF, TOP)}
A_Y = {"a": (REF, TOP), "y": (BOOL, BOT)}


@pytest.mark.parametrize(
    "ctx, names, out",
    [({}, set(), BOT), (A_REF, {"a"}, TOP), (A_Y, {"y"}, BOT), (A_Y, {"a", "y"}, TOP)],
)
def test_ambient_examples(ctx, names, out):
    assert ambient(ctx, names) is out


def test_ambient_rejects_unknown_names():
    with pytest.raises(TypeCheckError):
        ambient({}, {"z"})


def test_ambient_monotone():
    ctx = {"a": (REF, TOP), "b": (REF, BOT), "y": (BOOL, BOT)}
    subsets = [set(c) for r in range(4) for c in itertools.combinations(ctx, r)]
    for xs, ys in itertools.product(subsets, repeat=2):
        if xs <= ys:
            assert ambient(ctx, xs) <= ambient(ctx, ys)


@pytest.mark.parametrize(
    "ctx, text, expected",
    [
        (A_REF, "fun (x: Bool) => a", (AbilFun(BOOL, BOT, REF, TOP), TOP)),
        ({}, "fun (x: Ref^top) => !x", (AbilFun(REF, TOP, BOOL, BOT), BOT)),
        (A_REF, "fun (x: Ref^top) => true", (AbilFun(REF, TOP, BOOL, BOT), BOT)),
        ({}, "ref true", (REF, TOP)),
        (A_REF, "a", (REF, TOP)),
        (A_REF, "!a && true", (BOOL, BOT)),
        (A_REF, "a := true", (BOOL, BOT)),
        (A_REF, "(fun (x: Bool) => a) true", (REF, TOP)),
    ],
)
def test_typecheck_examples(ctx, text, expected):
    assert typecheck_a(ctx, parse(text)) == expected


def test_argument_ability_must_fit():
    with pytest.raises(TypeCheckError):
        typecheck_a(A_REF, parse("(fun (x: Ref^bot) => !x) a"))
    assert typecheck_a(A_REF, parse("(fun (x: Ref^top) => !x) a")) == (BOOL, BOT)


def test_pair_qualifier_is_rejected():
    with pytest.raises(TypeCheckError):
        typecheck_a({}, parse("fun (x: Ref<top,bot>) => x"))


@pytest.mark.parametrize(
    "t1, t2, out",
    [
        (REF, REF, True),
        (AbilFun(REF, BOT, BOOL, BOT), AbilFun(REF, TOP, BOOL, BOT), False),
        (AbilFun(REF, TOP, BOOL, BOT), AbilFun(REF, BOT, BOOL, TOP), True),
        (AbilFun(REF, TOP, BOOL, TOP), AbilFun(REF, TOP, BOOL, BOT), False),
    ],
)
def test_subtype_examples(t1, t2, out):
    assert subtype_a(t1, t2) is out


@pytest.mark.parametrize(
    "ctx, text, pure",
    [
        ({}, "let x = ref true in !x", True),
        (A_REF, "a", False),
        (A_REF, "(fun (x: Bool) => a) true", False),
        (A_REF, "!a", False),
        ({}, "ref true", False),
        (A_Y, "y && true", True),
    ],
)
def test_purity_examples(ctx, text, pure):
    assert is_pure_a(ctx, parse(text)) is pure


@given(type_pools("ability"))
def test_subtyping_reflexive_and_transitive(pool):
    for t in pool:
        assert subtype_a(t, t)
    for a, b, c in itertools.product(pool, repeat=3):
        if subtype_a(a, b) and subtype_a(b, c):
            assert subtype_a(a, c)


ABS_ENV = EnvSpec.parse("a=ref, y=bool")


@given(typed_terms("ability", max_size=8, env=ABS_ENV))
def test_abstraction_ability_is_join_of_captures(case):
    env, t = case
    if not isinstance(t, Abs):
        return
    ctx = env.ability_ctx()
    try:
        _, abil = typecheck_a(ctx, t)
    except TypeCheckError:
        return
    captured = naive_free_vars(t)
    expected = TOP if any(ctx[x][1] is TOP for x in captured) else BOT
    assert abil is expected


@given(st.sampled_from(["a", "y"]), st.sampled_from(["Bool", "Ref"]))
def test_capture_of_a_single_name(name, annot):
    t = parse(f"fun (z: {annot}) => {name}")
    _, abil = typecheck_a(A_Y, t)
    assert abil is A_Y[name][1]
