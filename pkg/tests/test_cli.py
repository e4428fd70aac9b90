import json

import pytest

from purelab.cli import OK, SCHEMA, USAGE, VIOLATION, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_typecheck_all_systems(capsys):
    code, out, _ = run(capsys, "typecheck", "-e", "let x = ref true in !x")
    assert code == OK
    assert out.splitlines() == ["effect: Bool ; ⊤", "ability: Bool ; ⊥ ; ⊥", "ae: Bool ; ⟨⊥⟩ ; ⊥"]


def test_typecheck_failure_exits_one(capsys):
    code, report = run_json(capsys, "typecheck", "-e", "!true", "--system", "effect")
    assert code == VIOLATION
    assert report["judgments"] == {"effect": None} and "effect" in report["errors"]


def test_purity(capsys):
    code, out, _ = run(capsys, "purity", "--system", "ability", "-e", "(fun (x: Bool) => a) true", "--env", "a=ref")
    assert (code, out.strip()) == (OK, "ability: impure")


def test_file_input_with_headers(tmp_path, capsys):
    f = tmp_path / "t.lam"
    f.write_text("# env: a=ref\n!a\n")
    code, report = run_json(capsys, "typecheck", str(f), "--system", "ae")
    assert code == OK and report["judgments"]["ae"] == "Bool ; ⟨⊥⟩ ; ⊤"


def test_env_from_json_file(tmp_path, capsys):
    f = tmp_path / "env.json"
    f.write_text(json.dumps({"a": "refCell", "y": "boolVal"}))
    code, report = run_json(capsys, "typecheck", "-e", "!a && y", "--env", str(f), "--system", "effect")
    assert code == OK and report["env"] == "a=ref, y=bool"


def test_eval_and_trace(capsys):
    code, report = run_json(capsys, "eval", "-e", "!a", "--env", "a=ref", "--init", "a=false", "--trace")
    assert code == OK
    assert report["outcome"] == "false [0=false]"
    assert [s["rule"] for s in report["trace"]] == ["e-get", "e-var"]


def test_eval_rejects_unknown_init(capsys):
    code, _, err = run(capsys, "eval", "-e", "true", "--init", "q=true")
    assert code == USAGE and "q" in err


def test_encode_check(capsys):
    code, report = run_json(capsys, "encode", "--from", "effect", "-e", "ref true", "--check")
    assert code == OK and report["holds"] is True


def test_oracle_purity(capsys):
    code, report = run_json(capsys, "oracle", "purity", "-e", "ref true", "--max-nodes", "4")
    assert code == OK
    assert report["status"] == "impure"
    assert set(report["witness"]) == {"context", "store", "left", "right"}
    assert report["bounds"] == {"maxNodes": 4, "fuel": 10000, "storeBound": 8}


def test_oracle_purity_of_divergence_needs_a_hole_type(capsys):
    omega = "(fun (x: Bool) => x x) (fun (x: Bool) => x x)"
    code, _, _ = run(capsys, "oracle", "purity", "-e", omega)
    assert code == VIOLATION
    code, report = run_json(capsys, "oracle", "purity", "-e", omega, "--hole", "Bool", "--fuel", "200")
    assert code == OK and report["witness"]["context"] == "true"


def test_oracle_safety_on_a_directory(tmp_path, capsys):
    (tmp_path / "a.lam").write_text("# env: a=ref\n(fun (x: Bool) => a) true\n")
    (tmp_path / "b.lam").write_text("let x = ref true in !x\n")
    code, report = run_json(capsys, "oracle", "safety", "--system", "ae", "--corpus", str(tmp_path), "--max-nodes", "3")
    assert code == OK and report["violations"] == 0


def test_compare_empty_dir(tmp_path, capsys):
    code, report = run_json(capsys, "compare", str(tmp_path))
    assert code == OK and report["perTerm"] == []


def test_compare_reports_mismatches(tmp_path, capsys):
    (tmp_path / "x.lam").write_text("# expect.effect: pure\nref true\n")
    code, report = run_json(capsys, "compare", str(tmp_path))
    assert code == VIOLATION
    assert report["perTerm"][0]["mismatches"] == [{"check": "effect", "expected": "pure", "actual": "impure"}]


def test_compare_keeps_going_past_a_broken_file(tmp_path, capsys):
    (tmp_path / "a.lam").write_text("fun (x")
    (tmp_path / "b.lam").write_text("true")
    code, report = run_json(capsys, "compare", str(tmp_path), "--max-nodes", "2")
    assert code == USAGE
    assert [r["name"] for r in report["perTerm"]] == ["b"]
    assert report["parseErrors"][0]["path"].endswith("a.lam")


def test_compare_is_byte_identical_across_runs(tmp_path, capsys):
    (tmp_path / "x.lam").write_text("# env: a=ref\nfun (x: Bool) => !a\n")
    first = run(capsys, "compare", str(tmp_path), "--json", "--max-nodes", "3")
    second = run(capsys, "compare", str(tmp_path), "--json", "--max-nodes", "3")
    assert first == second and "wallTime" not in first[1]


def test_timing_is_opt_in(capsys):
    _, report = run_json(capsys, "typecheck", "-e", "true", "--timing")
    assert isinstance(report["wallTime"], float)


def test_suite(capsys):
    code, report = run_json(capsys, "suite", "algebra", "--count", "3", "--seed", "7")
    assert code == OK
    assert report["schema"] == SCHEMA and report["suite"] == "algebra"
    assert report["params"]["seed"] == 7 and report["violations"] == []


@pytest.mark.parametrize(
    "argv",
    [
        ["typecheck", "-e", "fun ("],
        ["typecheck"],
        ["compare", "/does/not/exist"],
        ["typecheck", "-e", "true", "--env", "a=frog"],
        ["oracle", "purity", "-e", "true", "--hole", "Nat"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == USAGE


def test_missing_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == USAGE


def test_stdin(monkeypatch, capsys):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("true && false"))
    code, out, _ = run(capsys, "typecheck", "-", "--system", "effect")
    assert (code, out.strip()) == (OK, "effect: Bool ; ⊥")
