"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Criteria are exact (set equality, zero failures) unless a runtime bound is
stated; seeds are fixed so every run checks the same corpus.
"""

import time
from pathlib import Path

from mcsp.choice import Atom, InL, InR, named
from mcsp.kernel import Label, Terminated, defer, ext_choice, prefix, stop
from mcsp.lang import (
    CspSyntaxError,
    check_env,
    elaborate,
    parse,
    pretty_env,
)
from mcsp.laws import (
    GenConfig,
    gen_process,
    run_addtick_effect,
    run_ext_choice_comm,
    run_partial_order,
    run_prefix_closure,
    subject_name,
)
from mcsp.lts import ExploreLimits, build_lts, lts_trace_set
from mcsp.failures import Fails, divergences_of, refines_fdi1, refines_fdi2
from mcsp.traces import trace, trace_equiv, trace_set

BASE_SEED = 20260809
CORPUS = Path(__file__).parent / "corpus"

PAIR_SOURCE = (
    "PE : {u} + {w} = (a -> SKIP u) [] (b -> SKIP w)\n"
    "PI : {u} + {w} = (a -> SKIP u) |~| (b -> SKIP w)\n"
)


def report(criterion: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {criterion}: {status} — {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_distinguishing_pair():
    started = time.perf_counter()
    env = parse(PAIR_SOURCE)
    pe, pi = elaborate(env, "PE"), elaborate(env, "PI")
    pe_lts, pi_lts = build_lts(env, "PE"), build_lts(env, "PI")

    forward, backward = trace_equiv(pe, pi, 3)
    ok = forward.holds and backward.holds
    ok = ok and refines_fdi2(pi_lts, pe_lts, 3).holds
    verdict = refines_fdi2(pe_lts, pi_lts, 3)
    witness_ok = (
        isinstance(verdict, Fails)
        and verdict.witness.labels == ()
        and sorted(l.name for l in verdict.witness.witness_initials)
        in (["a"], ["b"])
    )
    elapsed = time.perf_counter() - started
    report(1, ok and witness_ok and elapsed < 1.0,
           f"trace-equivalent, failures distinguish with witness at ([], "
           f"{{a}} or {{b}}), {elapsed:.3f}s")


def test_criterion_2_terminate_clauses():
    u, w = named("u"), named("w")
    both = ext_choice(Terminated(u, Atom("u")), Terminated(w, Atom("w")))
    exact_both = trace_set(both, 1) == {
        trace(), trace(outcome=InL(Atom("u"))), trace(outcome=InR(Atom("w"))),
    }
    mixed = ext_choice(Terminated(u, Atom("u")),
                       prefix(Label("b"), defer(stop(w))))
    got = trace_set(mixed, 2)
    exact_mixed = got == {
        trace(), trace(outcome=InL(Atom("u"))), trace("b"),
    }
    excluded = trace("b", outcome=InL(Atom("u"))) not in trace_set(mixed, 4)
    report(2, exact_both and exact_mixed and excluded,
           "terminate□terminate is the two-tick set; the mixed clause "
           "drops the timed tick after the event")


def test_criterion_3_ext_choice_commutativity():
    result = run_ext_choice_comm(200, 4, base_seed=BASE_SEED)
    report(3, result.passed and result.trials == 200,
           f"{result.trials} seeded pairs at depth 4, "
           f"{len(result.failures)} failures")


def test_criterion_4_partial_order():
    result = run_partial_order(100, 50, 100, 4, base_seed=BASE_SEED)
    report(4, result.passed,
           f"reflexivity(100) + constructed chains(50) + mutual(100), "
           f"{len(result.failures)} failures")


def test_criterion_5_oracle_equivalence():
    started = time.perf_counter()
    failures = []
    for i in range(500):
        env = gen_process(GenConfig(seed=BASE_SEED + i))
        name = subject_name(env)
        lts = build_lts(env, name, ExploreLimits(max_states=4000, max_depth=400))
        if not lts.complete:
            failures.append((i, "incomplete"))
            continue
        if lts_trace_set(lts, 4) != trace_set(elaborate(env, name), 4):
            failures.append((i, "trace sets differ"))
    elapsed = time.perf_counter() - started
    report(5, not failures and elapsed < 30.0,
           f"500 seeded processes, direct rules vs complete transition "
           f"system at depth 4, {len(failures)} failures, {elapsed:.1f}s")


def test_criterion_6_closure_and_monotonicity():
    closure = run_prefix_closure(500, 4, base_seed=BASE_SEED)
    monotone_failures = 0
    for i in range(500):
        env = gen_process(GenConfig(seed=BASE_SEED + i))
        p = elaborate(env, subject_name(env))
        previous = frozenset()
        for d in range(5):
            current = trace_set(p, d)
            if not previous <= current:
                monotone_failures += 1
                break
            previous = current
    report(6, closure.passed and monotone_failures == 0,
           f"prefix closure on 500 seeds at depth 4 "
           f"({len(closure.failures)} failures); "
           f"monotonicity on the same corpus ({monotone_failures} failures)")


def test_criterion_7_divergence():
    env = parse("X : Empty = X |~| X\nIDLE : Empty = STOP")
    div_lts = build_lts(env, "X")
    idle_lts = build_lts(env, "IDLE")
    div_report = divergences_of(div_lts, 2)
    div_ok = ([d.to_json() for d in div_report.divergences]
              == [{"labels": [], "mode": "definitive"}])
    stop_ok = divergences_of(idle_lts, 3).divergences == ()

    from mcsp.lts import Tau
    tau_free_ok = True
    for i in range(200):
        genv = gen_process(GenConfig(seed=BASE_SEED + i))
        name = subject_name(genv)
        lts = build_lts(genv, name)
        if any(isinstance(act, Tau) for _, act, _ in lts.transitions):
            continue
        if divergences_of(lts, 3).divergences != ():
            tau_free_ok = False
            break

    fails = refines_fdi1(idle_lts, div_lts, 2)
    fdi1_ok = (isinstance(fails, Fails) and fails.witness.labels == ()
               and refines_fdi1(div_lts, idle_lts, 2).holds)
    report(7, div_ok and stop_ok and tau_free_ok and fdi1_ok,
           "divergent process reported definitively at []; STOP and τ-free "
           "corpus clean; divergence refinement fails exactly one way")


def test_criterion_8_addtick_trace_effect():
    result = run_addtick_effect(500, 4, base_seed=BASE_SEED)
    report(8, result.passed,
           f"{result.trials} seeded (process, value) pairs at depth 4, "
           f"{len(result.failures)} failures")


def test_criterion_9_dsl_round_trip():
    golden = sorted((CORPUS / "golden").glob("*.csp"))
    negative = sorted((CORPUS / "negative").glob("*.csp"))
    size_ok = len(golden) >= 30 and len(negative) >= 10

    golden_failures = []
    for path in golden:
        env = parse(path.read_text())
        if check_env(env) or parse(pretty_env(env)) != env:
            golden_failures.append(path.name)

    negative_failures = []
    for path in negative:
        text = path.read_text()
        expected = text.splitlines()[0].split("expect:")[1].strip()
        try:
            env = parse(text)
        except CspSyntaxError as exc:
            if exc.kind != expected:
                negative_failures.append(path.name)
            continue
        if expected not in {d.kind for d in check_env(env)}:
            negative_failures.append(path.name)

    report(9, size_ok and not golden_failures and not negative_failures,
           f"{len(golden)} golden files round-trip "
           f"({len(golden_failures)} failures); {len(negative)} negative "
           f"files give expected kinds ({len(negative_failures)} failures)")
