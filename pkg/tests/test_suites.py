"""Each suite at a small size, so a broken law shows up quickly."""

from purelab.oracle import Bounds
from purelab.suites import (
    SUITES, algebra_suite, beta_suite, encode_suite, evaluator_suite, reorder_suite, safety_suite,
)

SMALL = Bounds(max_nodes=3, fuel=2_000)


def test_registry():
    assert set(SUITES) == {"safety", "reorder", "beta", "encode", "algebra", "evaluator"}


def test_safety_small():
    res = safety_suite(seed=2, count=15, bounds=SMALL)
    assert res.ok, res.violations
    assert res.checked > 0


def test_reorder_small():
    res = reorder_suite(seed=2, count=20)
    assert res.ok, res.violations
    assert res.checked == 60


def test_beta_small():
    res = beta_suite(seed=2, count=20)
    assert res.ok, res.violations
    assert res.checked == 20


def test_encode_small():
    res = encode_suite(seed=2, count=40)
    assert res.ok and res.checked == 80


def test_algebra_small():
    res = algebra_suite(seed=2, shapes=5)
    assert res.ok, res.violations[:3]


def test_evaluator_small():
    res = evaluator_suite(seed=2, samples=300)
    assert res.ok, res.violations[:3]


def test_results_are_reproducible():
    assert reorder_suite(seed=9, count=5).as_dict() == reorder_suite(seed=9, count=5).as_dict()
