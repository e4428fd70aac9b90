import pytest

from purelab.corpus import GOLDEN_SETS, golden, load_dir, read_entry
from purelab.environment import EnvSpec
from purelab.oracle import PURE
from purelab.probes import classify_function, clean_args
from purelab.suites import compare, compare_entry
from purelab.syntax import ParseError, parse
from purelab.types import BOOL, REF, Arrow

from reference import naive_free_vars


def test_headers():
    e = read_entry("# name: demo\n# env: a=ref\n# hole: Bool\n# expect.oracle: pure\n!a\n", "x.lam")
    assert e.name == "demo"
    assert e.env == EnvSpec.parse("a=ref")
    assert e.hole == BOOL
    assert e.expect == {"oracle": "pure"}
    assert e.term == parse("!a")


def test_name_defaults_to_file_stem():
    assert read_entry("true", "dir/some-term.lam").name == "some-term"


def test_malformed_term_is_a_parse_error():
    with pytest.raises(ParseError):
        read_entry("# name: broken\nfun (x", "b.lam")


def test_load_dir(tmp_path):
    (tmp_path / "b.lam").write_text("false")
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "a.lam").write_text("true")
    (tmp_path / "notes.txt").write_text("ignored")
    assert [e.name for e in load_dir(tmp_path)] == ["b", "a"]
    assert load_dir(tmp_path / "sub")[0].term == parse("true")


def test_golden_sets_load():
    sizes = {name: len(golden(name)) for name in GOLDEN_SETS}
    assert sizes == {"terms": 8, "functions": 9, "annotated": 15, "crosscheck": 2}
    with pytest.raises(ValueError):
        golden("nope")


@pytest.mark.parametrize("entry", golden("terms", "crosscheck"), ids=lambda e: e.name)
def test_term_expectations(entry):
    row = compare_entry(entry)
    assert row["mismatches"] == []


@pytest.mark.parametrize("entry", golden("functions"), ids=lambda e: e.name)
def test_function_expectations(entry):
    row = compare_entry(entry)
    assert row["mismatches"] == []


def test_clean_arguments_never_touch_the_environment():
    env = EnvSpec.parse("a=ref, y=bool")
    for ty in (BOOL, REF, Arrow(BOOL, BOOL), Arrow(REF, BOOL)):
        for arg in clean_args(ty, env):
            assert not ({"a", "y"} & naive_free_vars(arg.term))


def test_classification_report():
    fc = classify_function(parse("fun (x: Bool) => !a"), EnvSpec.parse("a=ref"))
    d = fc.as_dict()
    assert d["function"] == "impure" and d["valueAbility"] == "impure"
    assert d["functionWitness"]["probe"].startswith("(fun (x: Bool) => !a)")
    fc = classify_function(parse("fun (x: Bool) => a"), EnvSpec.parse("a=ref"))
    assert fc.function == PURE and fc.function_witness is None


def test_compare_counts():
    report = compare(golden("crosscheck"))
    assert report["oraclePure"] == 2
    assert report["completeness"] == {"effect": 1, "ability": 1, "ae": 2}
    assert report["unsound"] == 0 and report["mismatches"] == 0


def test_compare_empty():
    report = compare([])
    assert report["perTerm"] == [] and report["oraclePure"] == 0
