from hypothesis import given

from purelab.encode import check_encoding, encode_env, encode_type_a, encode_type_e
from purelab.environment import EnvSpec
from purelab.syntax import Cst, Var, parse
from purelab.types import (
    BOOL, BOT, QBOT, QTOP, REF, TOP, AbilFun, AEFun, EffFun, type_size,
)

from strategies import type_pools, typed_terms


def test_effect_types():
    assert encode_type_e(BOOL) == BOOL
    assert encode_type_e(REF) == REF
    assert encode_type_e(EffFun(BOOL, BOOL, TOP)) == AEFun(BOOL, QTOP, BOOL, QTOP, TOP)


def test_ability_types():
    assert encode_type_a(BOOL) == BOOL
    assert encode_type_a(AbilFun(REF, TOP, BOOL, BOT)) == AEFun(REF, QTOP, BOOL, QBOT, TOP)
    assert encode_type_a(AbilFun(BOOL, BOT, BOOL, BOT)) == AEFun(BOOL, QBOT, BOOL, QBOT, TOP)


def test_environments():
    assert encode_env({}, "effect") == {}
    assert encode_env({"a": REF}, "effect") == {"a": (REF, QTOP)}
    assert encode_env({"a": (REF, TOP)}, "ability") == {"a": (REF, QTOP)}
    assert encode_env({"y": (BOOL, BOT)}, "ability") == {"y": (BOOL, QBOT)}


def test_reports():
    r = check_encoding("effect", {}, parse("ref true"))
    assert r.holds and str(r.prescribed) == "Ref ⟨⊤,⊤⟩ ⊤"
    assert str(r.target_judgment) == "Ref ⟨⊤,⊥⟩ ⊥"
    r = check_encoding("ability", {"a": (REF, TOP)}, Var("a"))
    assert r.holds and str(r.prescribed) == "Ref ⟨⊤,⊤⟩ ⊤"
    r = check_encoding("effect", {}, Cst(True))
    assert r.holds and str(r.prescribed) == "Bool ⟨⊤,⊤⟩ ⊥"


def test_ill_typed_source_has_no_verdict():
    r = check_encoding("effect", {}, Var("x"))
    assert r.holds is None and r.note.startswith("source ill-typed")
    assert r.as_dict()["holds"] is None


@given(type_pools("effect", size=2))
def test_effect_translation_preserves_size(pool):
    for t in pool:
        assert type_size(encode_type_e(t)) == type_size(t)


@given(type_pools("ability", size=2))
def test_ability_translation_preserves_size(pool):
    for t in pool:
        assert type_size(encode_type_a(t)) == type_size(t)


ENV = EnvSpec.parse("a=ref, y=bool")


def _holds_when_typed(system, env, t):
    ctx = env.context_for(system)
    r = check_encoding(system, ctx, t)
    if r.holds is None:
        return
    assert r.holds, r.as_dict()


@given(typed_terms("effect", env=ENV))
def test_effect_embedding(case):
    _holds_when_typed("effect", *case)


@given(typed_terms("ability", env=ENV))
def test_ability_embedding(case):
    _holds_when_typed("ability", *case)


def test_pair_qualifiers_do_not_reach_the_ability_source():
    r = check_encoding("ability", {}, parse("fun (x: Ref<top,bot>) => x"))
    assert r.holds is None
