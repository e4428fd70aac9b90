"""End-to-end acceptance checks at full size.

Each check records one PASS/FAIL line; the lines are printed together at the
end of the session (see ``conftest.py``) so they survive output capture.
"""

import time

from purelab.corpus import golden
from purelab.environment import EnvSpec
from purelab.oracle import Bounds, obs_purity
from purelab.simple import typecheck_simple
from purelab.suites import (
    algebra_suite, beta_suite, compare_entry, encode_suite, evaluator_suite, reorder_suite,
    safety_suite,
)
from purelab.syntax import parse
from purelab.systems import judge

RESULTS: dict[int, str] = {}

FULL = Bounds(max_nodes=5, fuel=10_000)
TERMS_BUDGET = 60.0
SAFETY_BUDGET = 600.0
SAFETY_COUNT = 1_000
ENCODE_COUNT = 500
REORDER_COUNT = 200
BETA_COUNT = 200
EVALUATOR_SAMPLES = 10_000


def record(n: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def test_1_purity_table():
    start = time.perf_counter()
    wrong = []
    entries = golden("terms")
    for e in entries:
        hole = e.hole or typecheck_simple(e.env.simple_ctx(), e.term)
        v = obs_purity(e.term, e.env, FULL, hole)
        got = "pure" if v.pure else "impure"
        if got != e.expect["oracle"]:
            wrong.append(f"{e.name}: expected {e.expect['oracle']}, got {got}")
    elapsed = time.perf_counter() - start
    ok = not wrong and elapsed < TERMS_BUDGET
    detail = f"{len(entries) - len(wrong)}/{len(entries)} rows match in {elapsed:.1f}s"
    record(1, "purity of the eight example terms", ok, detail + ("; " + "; ".join(wrong) if wrong else ""))


def test_2_annotated_judgments():
    entries = golden("annotated")
    wrong = []
    for e in entries:
        for m in compare_entry(e)["mismatches"]:
            wrong.append(f"{e.name}: expected {m['expected']!r}, got {m['actual']!r}")
    detail = f"{len(entries) - len({w.split(':')[0] for w in wrong})}/{len(entries)} lines match"
    record(2, "combined-discipline judgments", not wrong, detail + ("; " + "; ".join(wrong) if wrong else ""))


def test_3_effect_safety():
    start = time.perf_counter()
    res = safety_suite(seed=1, count=SAFETY_COUNT, bounds=FULL)
    elapsed = time.perf_counter() - start
    per = ", ".join(f"{s}: {d['systemPure']} pure of {d['terms']}" for s, d in res.details["systems"].items())
    ok = res.ok and elapsed < SAFETY_BUDGET
    record(3, "effect safety", ok, f"{len(res.violations)} violations ({per}) in {elapsed:.0f}s")


def test_4_incomparability():
    cell = parse("let x = ref true in !x")
    mention = parse("(fun (x: Bool) => a) true")
    a = EnvSpec.parse("a=ref")
    empty = EnvSpec()
    facts = {
        "masking is ability-pure": judge("ability", empty, cell).pure,
        "masking is combined-pure": judge("ae", empty, cell).pure,
        "masking is effect-impure": not judge("effect", empty, cell).pure,
        "mention is effect-pure": judge("effect", a, mention).pure,
        "mention is ability-impure": not judge("ability", a, mention).pure,
        "masking is semantically pure": obs_purity(cell, empty, FULL).pure,
        "mention is semantically pure": obs_purity(mention, a, FULL).pure,
    }
    failed = [k for k, v in facts.items() if not v]
    record(4, "incomparability witnesses", not failed, "all hold" if not failed else "fails: " + ", ".join(failed))


def test_5_encodings():
    res = encode_suite(seed=1, count=ENCODE_COUNT)
    record(5, "encodings", res.ok and res.checked == 2 * ENCODE_COUNT,
           f"{res.checked - len(res.violations)}/{res.checked} translated judgments derivable")


def test_6_reordering():
    res = reorder_suite(seed=1, count=REORDER_COUNT)
    per = ", ".join(f"{s}: {d['pairs']}" for s, d in res.details["systems"].items())
    enough = all(d["pairs"] >= REORDER_COUNT for d in res.details["systems"].values())
    record(6, "reordering", res.ok and enough, f"{len(res.violations)} failures over pairs ({per})")


def test_7_beta():
    res = beta_suite(seed=1, count=BETA_COUNT)
    record(7, "beta equivalence", res.ok and res.checked >= BETA_COUNT,
           f"{len(res.violations)} failures over {res.checked} pairs")


def test_8_evaluator():
    res = evaluator_suite(seed=1, samples=EVALUATOR_SAMPLES)
    record(8, "evaluator laws", res.ok and res.checked >= EVALUATOR_SAMPLES,
           f"{len(res.violations)} violations over {res.checked} samples")


def test_9_qualifier_algebra():
    res = algebra_suite(seed=1, depth=4)
    record(9, "qualifier algebra", res.ok, f"{len(res.violations)} violations over {res.checked} checks")
