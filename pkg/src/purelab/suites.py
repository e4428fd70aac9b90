"""Property suites over generated and golden terms, plus corpus comparison.

Every suite returns a :class:`SuiteResult`; ``violations`` lists each
counterexample found, so an empty list means the property held on everything
that was tried.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .ability import subtype_a
from .ae import abs_qualifier, app_qualifier, read_annot_ae, subtype_ae, typecheck_ae
from .corpus import CorpusEntry, golden
from .effect import compose, subtype_e
from .encode import check_encoding
from .environment import EnvSpec
from .evaluator import Err, Timeout, evaluate
from .generate import TermGenerator, _TooDeep, random_type, requalify, typed_terms
from .oracle import (
    HOLDS, PRECONDITION, Bounds, DEFAULT_FUEL, DEFAULT_STORE_BOUND, check_beta,
    check_effect_safety, check_reordering, purity_of,
)
from .probes import classify_function
from .simple import typecheck_simple
from .syntax import AND, OR, ParseError, parse_type, print_term
from .systems import ABILITY, AE, EFFECT, SYSTEMS, judge
from .types import ALL_QUALS, BOOL, BOT, REF, TOP, Mark, Qual, TypeCheckError

SAFETY_ENV = EnvSpec.parse("a=ref, y=bool")
REORDER_ENV = EnvSpec.parse("a=ref, b=ref, y=bool")
MAX_TERM_SIZE = 8


@dataclass
class SuiteResult:
    name: str
    params: dict
    checked: int = 0
    violations: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "params": self.params,
            "checked": self.checked,
            "violations": self.violations,
            **self.details,
        }


def _scope(env: EnvSpec):
    return tuple(env.simple_ctx().items())


def _typable(system: str, env: EnvSpec) -> Callable:
    return lambda t: judge(system, env, t) is not None


# ------------------------------------------------------------------ safety

def safety_suite(
    seed: int = 1,
    count: int = 1000,
    bounds: Bounds = Bounds(),
    env: EnvSpec = SAFETY_ENV,
    with_golden: bool = True,
    systems: Iterable[str] = SYSTEMS,
) -> SuiteResult:
    """Terms a discipline calls pure must not be found impure by the oracle."""
    systems = tuple(systems)
    res = SuiteResult(
        "safety",
        {"seed": seed, "count": count, "env": str(env), "bounds": bounds.as_dict(), "golden": with_golden},
    )
    per_system = {}
    golden_entries = [e for e in golden() if e.hole is None] if with_golden else []
    for system in systems:
        generated = list(typed_terms(seed, system, _scope(env), _typable(system, env), count, MAX_TERM_SIZE))
        reports = [check_effect_safety(system, env, generated, bounds)]
        for entry in golden_entries:
            reports.append(check_effect_safety(system, entry.env, [entry.term], bounds))
        typed = pure = 0
        for report in reports:
            for case in report.cases:
                typed += case.judgment is not None
                pure += bool(case.system_pure)
                if case.violation:
                    res.violations.append({"system": system, "env": str(report.env), **case.as_dict()})
        res.checked += pure
        per_system[system] = {"terms": typed, "systemPure": pure}
    res.details["systems"] = per_system
    return res


# -------------------------------------------------------------- reordering

def reorder_suite(
    seed: int = 1,
    count: int = 200,
    env: EnvSpec = REORDER_ENV,
    fuel: int = DEFAULT_FUEL,
    store_bound: int = DEFAULT_STORE_BOUND,
    systems: Iterable[str] = SYSTEMS,
    max_tries: int = 100_000,
) -> SuiteResult:
    """Operands meeting a discipline's side condition commute under && and ||."""
    res = SuiteResult(
        "reorder",
        {"seed": seed, "count": count, "env": str(env), "fuel": fuel, "storeBound": store_bound},
    )
    per_system = {}
    for system in systems:
        rng = random.Random(f"{seed}:{system}")
        gen = TermGenerator(rng, system, _scope(env), MAX_TERM_SIZE)
        met = skipped = 0
        for _ in range(max_tries):
            if met >= count:
                break
            try:
                t1, t2 = gen.term(BOOL), gen.term(BOOL)
            except _TooDeep:
                continue
            op = AND if rng.random() < 0.5 else OR
            verdict = check_reordering(t1, t2, system, env, fuel, store_bound, op)
            if verdict.status == PRECONDITION:
                skipped += 1
                continue
            met += 1
            if verdict.status != HOLDS:
                res.violations.append(
                    {"system": system, "op": op, "left": print_term(t1), "right": print_term(t2), **verdict.as_dict()}
                )
        res.checked += met
        per_system[system] = {"pairs": met, "preconditionFailed": skipped}
    res.details["systems"] = per_system
    return res


# -------------------------------------------------------------------- beta

BETA_VAR = "z"


def beta_suite(
    seed: int = 1,
    count: int = 200,
    env: EnvSpec = REORDER_ENV,
    fuel: int = DEFAULT_FUEL,
    store_bound: int = DEFAULT_STORE_BOUND,
    max_tries: int = 100_000,
) -> SuiteResult:
    """Applying an abstraction equals substituting a pure, non-fresh argument."""
    res = SuiteResult("beta", {"seed": seed, "count": count, "env": str(env), "fuel": fuel, "storeBound": store_bound})
    rng = random.Random(seed)
    skipped = 0
    for _ in range(max_tries):
        if res.checked >= count:
            break
        arg_type = rng.choice((BOOL, REF))
        body_type = rng.choice((BOOL, BOOL, REF))
        try:
            arg = TermGenerator(rng, AE, _scope(env), 6).term(arg_type)
            body = TermGenerator(rng, AE, _scope(env) + ((BETA_VAR, arg_type),), MAX_TERM_SIZE).term(body_type)
        except _TooDeep:
            continue
        verdict = check_beta(BETA_VAR, body, arg, env, fuel, store_bound)
        if verdict.status == PRECONDITION:
            skipped += 1
            continue
        res.checked += 1
        if verdict.status != HOLDS:
            res.violations.append({"body": print_term(body), "arg": print_term(arg), **verdict.as_dict()})
    res.details["preconditionFailed"] = skipped
    return res


# ---------------------------------------------------------------- encoding

def encode_suite(seed: int = 1, count: int = 500, env: EnvSpec = SAFETY_ENV) -> SuiteResult:
    """Effect-only and ability-only judgments translate into valid combined ones."""
    res = SuiteResult("encode", {"seed": seed, "count": count, "env": str(env)})
    for system in (EFFECT, ABILITY):
        ctx = env.context_for(system)
        for t in typed_terms(seed, system, _scope(env), _typable(system, env), count, MAX_TERM_SIZE):
            report = check_encoding(system, ctx, t)
            res.checked += 1
            if not report.holds:
                res.violations.append(report.as_dict())
    return res


# ----------------------------------------------------------------- algebra

def _bits(n: int, width: int) -> list[bool]:
    return [bool(n >> i & 1) for i in range(width)]


def algebra_suite(seed: int = 1, depth: int = 4, shapes: int = 60, variants: int = 8) -> SuiteResult:
    """Truth tables of the qualifier formulas, join laws and subtyping laws."""
    res = SuiteResult("algebra", {"seed": seed, "depth": depth, "shapes": shapes, "variants": variants})

    def expect(ok: bool, **what) -> None:
        res.checked += 1
        if not ok:
            res.violations.append(what)

    # abstraction qualifier: captured.f, captured.s, result.f, result.s, latent
    for n in range(2 ** 5):
        cf, cs, rf, rs, e = _bits(n, 5)
        want = (False, (cf or cs) and (rs or e))
        got = abs_qualifier(Qual(Mark.of(cf), Mark.of(cs)), Qual(Mark.of(rf), Mark.of(rs)), Mark.of(e))
        expect((bool(got.fresh), bool(got.stored)) == want, law="abs_qualifier", inputs=n)
    # application: fn qual, fn eff, arg qual, arg eff, result qual, latent
    for n in range(2 ** 8):
        ff, fs, fe, af, as_, ae, rf, rs = _bits(n, 8)
        for latent in (False, True):
            fresh = rf or (rs and (ff or af))
            stored = rs and (fs or as_)
            eff = fe or ae or (latent and (fs or as_))
            q, got_eff = app_qualifier(
                Qual(Mark.of(ff), Mark.of(fs)), Mark.of(fe), Qual(Mark.of(af), Mark.of(as_)),
                Mark.of(ae), Qual(Mark.of(rf), Mark.of(rs)), Mark.of(latent),
            )
            expect(
                (bool(q.fresh), bool(q.stored), bool(got_eff)) == (fresh, stored, eff),
                law="app_qualifier", inputs=n * 2 + latent,
            )
    # effect join
    marks = (BOT, TOP)
    for e1, e2 in itertools.product(marks, repeat=2):
        j = compose(e1, e2)
        expect(j == compose(e2, e1), law="join commutes", inputs=[str(e1), str(e2)])
        expect(e1 <= j and e2 <= j, law="join is an upper bound", inputs=[str(e1), str(e2)])
        expect(compose(e1, e1) == e1, law="join idempotent", inputs=[str(e1)])
        expect(compose(BOT, e1) == e1 and compose(TOP, e1) == TOP, law="join units", inputs=[str(e1)])
        for e3 in marks:
            expect(compose(compose(e1, e2), e3) == compose(e1, compose(e2, e3)), law="join associates")
    # qualifier order is a partial order
    for q1, q2 in itertools.product(ALL_QUALS, repeat=2):
        if q1 <= q2 and q2 <= q1:
            expect(q1 == q2, law="qualifier order antisymmetric", inputs=[str(q1), str(q2)])
        expect((q1 | q2) == (q2 | q1) and q1 <= (q1 | q2), law="qualifier join", inputs=[str(q1), str(q2)])
    # subtyping on generated types
    rng = random.Random(seed)
    for system, sub in ((EFFECT, subtype_e), (ABILITY, subtype_a), (AE, subtype_ae)):
        for _ in range(shapes):
            shape = random_type(rng, system, depth)
            pool = [shape] + [requalify(rng, shape) for _ in range(variants - 1)]
            for t in pool:
                expect(sub(t, t), law="subtyping reflexive", system=system, type=str(t))
            related = {(i, j) for i, j in itertools.product(range(len(pool)), repeat=2) if sub(pool[i], pool[j])}
            for (i, j), (k, m) in itertools.product(related, repeat=2):
                if j == k:
                    expect((i, m) in related, law="subtyping transitive", system=system,
                           chain=[str(pool[i]), str(pool[j]), str(pool[m])])
    return res


# --------------------------------------------------------------- evaluator

def evaluator_suite(seed: int = 1, samples: int = 10_000, env: EnvSpec = SAFETY_ENV) -> SuiteResult:
    """Determinism, fuel monotonicity and absence of stuck states on typed terms."""
    res = SuiteResult("evaluator", {"seed": seed, "samples": samples, "env": str(env)})
    rng = random.Random(seed)
    configs = list(env.configs(DEFAULT_STORE_BOUND))
    per_system = samples // len(SYSTEMS) + 1
    for system in SYSTEMS:
        for t in typed_terms(seed, system, _scope(env), _typable(system, env), per_system, MAX_TERM_SIZE):
            values, store = env.instantiate(rng.choice(configs))
            fuel = rng.randint(0, 40)
            more = fuel + rng.randint(1, 40)
            out = evaluate(values, store, t, fuel)
            res.checked += 1
            if evaluate(values, store, t, fuel) != out:
                res.violations.append({"law": "deterministic", "term": print_term(t), "fuel": fuel})
            bigger = evaluate(values, store, t, more)
            # a finished run, Done or Err, must not change with more fuel
            if not isinstance(out, Timeout) and bigger != out:
                res.violations.append({"law": "fuel monotone", "term": print_term(t), "fuel": fuel})
            final = evaluate(values, store, t, DEFAULT_FUEL)
            if isinstance(final, Err):
                res.violations.append({"law": "typed terms never err", "system": system,
                                       "term": print_term(t), "error": final.kind})
    return res


SUITES = {
    "safety": safety_suite,
    "reorder": reorder_suite,
    "beta": beta_suite,
    "encode": encode_suite,
    "algebra": algebra_suite,
    "evaluator": evaluator_suite,
}


# ------------------------------------------------------------- comparison

def _word(pure: bool) -> str:
    return "pure" if pure else "impure"


def compare_entry(entry: CorpusEntry, bounds: Bounds = Bounds()) -> dict:
    """All four verdicts for one corpus term, checked against its expectations."""
    row: dict = {"name": entry.name, "path": entry.path, "term": print_term(entry.term), "env": str(entry.env)}
    systems: dict = {}
    judgments: dict = {}
    for system in SYSTEMS:
        try:
            v = judge(system, entry.env, entry.term)
        except TypeCheckError as exc:
            systems[system] = "ill-typed"
            judgments[system] = str(exc)
            continue
        systems[system] = _word(v.pure)
        judgments[system] = v.judgment
    row["systems"] = systems
    row["judgments"] = judgments
    oracle_pure: Optional[bool] = None
    try:
        hole = entry.hole if entry.hole is not None else typecheck_simple(entry.env.simple_ctx(), entry.term)
        verdict = purity_of(entry.term, entry.env, bounds, hole)
        oracle_pure = verdict.pure
        row["oracle"] = verdict.as_dict()
    except TypeCheckError as exc:
        row["oracle"] = {"status": "ill-typed", "detail": str(exc)}
        hole = None
    row["flags"] = {
        s: ("unsound" if systems[s] == "pure" and oracle_pure is False
            else "incomplete" if systems[s] == "impure" and oracle_pure else "agree")
        for s in SYSTEMS
    }
    wants_function = "function" in entry.expect or "value-ability" in entry.expect
    observed: dict[str, str] = {"oracle": _word(oracle_pure) if oracle_pure is not None else "ill-typed", **systems}
    if wants_function and hole is not None:
        fc = classify_function(entry.term, entry.env, bounds, hole)
        row["function"] = fc.as_dict()
        observed["function"] = _word(fc.function == "pureUpToBounds")
        observed["value-ability"] = _word(fc.value_ability == "pureUpToBounds")
    if any(k.startswith("ae.") for k in entry.expect):
        try:
            j = typecheck_ae(entry.env.ae_ctx(), entry.term)
            observed["ae.type"] = f"{j.type} {j.qual}"
            observed["ae.judgment"] = str(j)
            observed["ae.subsumes"] = f"{j.type} {j.qual}"
        except TypeCheckError as exc:
            observed["ae.type"] = observed["ae.judgment"] = observed["ae.subsumes"] = f"ill-typed: {exc}"
    mismatches = []
    for key, want in entry.expect.items():
        got = observed.get(key)
        if key == "ae.subsumes":
            ok = _subsumed(entry, want)
        else:
            ok = got == want
        if not ok:
            mismatches.append({"check": key, "expected": want, "actual": got})
    row["mismatches"] = mismatches
    return row


def _subsumed(entry: CorpusEntry, want: str) -> bool:
    """Does the synthesized type-and-qualifier subsume into the printed one?"""
    try:
        j = typecheck_ae(entry.env.ae_ctx(), entry.term)
        ty, qual = read_annot_ae(*parse_type(_to_source_syntax(want)))
    except (TypeCheckError, ParseError):
        return False
    return subtype_ae(j.type, ty) and j.qual <= qual


def _to_source_syntax(printed: str) -> str:
    """Turn a printed type such as ``(Ref ⟨⊤,⊥⟩ =>^⊥ Bool ⟨⊥⟩) ⟨⊥⟩`` back into
    annotation syntax."""
    out = printed.replace("⊤", "top").replace("⊥", "bot").replace("⟨", "<").replace("⟩", ">")
    out = out.replace("<bot>", "<bot,bot>")
    return re.sub(r"=>\^(\w+)", r"-> [\1]", out)


def compare(entries: Iterable[CorpusEntry], bounds: Bounds = Bounds()) -> dict:
    rows = [compare_entry(e, bounds) for e in entries]
    oracle_pure = [r for r in rows if r["oracle"].get("status") == "pureUpToBounds"]
    completeness = {
        s: sum(1 for r in oracle_pure if r["systems"][s] == "pure") for s in SYSTEMS
    }
    return {
        "bounds": bounds.as_dict(),
        "perTerm": rows,
        "oraclePure": len(oracle_pure),
        "completeness": completeness,
        "unsound": sum(1 for r in rows for f in r["flags"].values() if f == "unsound"),
        "mismatches": sum(len(r["mismatches"]) for r in rows),
    }
