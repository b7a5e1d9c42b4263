from mcsp.choice import Atom, named
from mcsp.kernel import Label, defer, prefix, skip, stop
from mcsp.lang import check_env, elaborate, pretty_env
from mcsp.laws import (
    GenConfig,
    check_addtick_trace_effect,
    check_ext_choice_comm,
    check_partial_order,
    check_prefix_closure,
    count_constructors,
    gen_process,
    make_refinement_chain,
    run_addtick_effect,
    run_ext_choice_comm,
    run_lts_oracle_agreement,
    run_partial_order,
    run_prefix_closure,
    run_sf_comm,
    subject_name,
)

V = named("u", "w")
U = Atom("u")
A, B = Label("a"), Label("b")


def pref(label, p):
    return prefix(label, defer(p))


# --------------------------------------------------------------------------
# Generator

def test_generator_is_deterministic_in_seed():
    cfg = GenConfig(seed=123)
    assert pretty_env(gen_process(cfg)) == pretty_env(gen_process(cfg))


def test_generated_environments_pass_checking():
    for seed in range(1000):
        env = gen_process(GenConfig(seed=seed))
        assert check_env(env) == [], f"seed {seed}"


def test_generator_covers_all_constructors():
    total = count_constructors(gen_process(GenConfig(seed=0)))
    for seed in range(1, 1000):
        total += count_constructors(gen_process(GenConfig(seed=seed)))
    for ctor in ("Stop", "Skip", "Prefix", "ExtChoice", "IntChoice",
                 "Bind", "Fmap", "AddTick", "Ref"):
        assert total[ctor] > 0, ctor


def test_generated_subjects_elaborate():
    for seed in range(100):
        env = gen_process(GenConfig(seed=seed))
        elaborate(env, subject_name(env))


# --------------------------------------------------------------------------
# Single-instance law checks

def test_comm_check_on_the_worked_example():
    p = pref(A, skip(named("u"), Atom("u")))
    q = pref(B, skip(named("w"), Atom("w")))
    report = check_ext_choice_comm(p, q, 3)
    assert report.passed
    from mcsp.kernel import ext_choice
    from mcsp.traces import trace_set
    assert len(trace_set(ext_choice(p, q), 3)) == 5


def test_comm_check_trivial_on_stop():
    report = check_ext_choice_comm(stop(V), stop(V), 2)
    assert report.passed


def test_comm_check_on_two_terminated():
    from mcsp.kernel import Terminated
    report = check_ext_choice_comm(
        Terminated(named("u"), Atom("u")), Terminated(named("w"), Atom("w")), 1,
    )
    assert report.passed


def test_prefix_closure_check_examples():
    assert check_prefix_closure(pref(A, pref(B, stop(V))), 3).passed
    assert check_prefix_closure(stop(V), 2).passed


def test_addtick_check_examples():
    assert check_addtick_trace_effect(stop(V), U, 2).passed
    assert check_addtick_trace_effect(pref(B, stop(V)), U, 2).passed
    assert check_addtick_trace_effect(skip(V, Atom("w")), U, 2).passed


def test_partial_order_check_on_a_chain():
    env, p, q, r = make_refinement_chain(3)
    report = check_partial_order(env, p, q, r, 4)
    assert report.passed


def test_failure_reports_carry_replay_information():
    # a deliberately broken "law": compare two different processes
    from mcsp.kernel import ext_choice
    from mcsp.traces import trace_set, map_outcome
    from mcsp.choice import swap_union
    p, q = pref(A, stop(V)), pref(B, stop(V))
    lhs = trace_set(ext_choice(p, q), 2)
    rhs = map_outcome(swap_union, trace_set(ext_choice(q, q), 2))
    assert lhs != rhs  # sanity: the mismatch the harness would report


# --------------------------------------------------------------------------
# Seeded suites (small trial counts; acceptance runs the full sizes)

def test_suite_ext_choice_comm():
    assert run_ext_choice_comm(40, 4, base_seed=1).passed


def test_suite_partial_order():
    assert run_partial_order(15, 10, 15, 4, base_seed=1).passed


def test_suite_prefix_closure():
    assert run_prefix_closure(60, 4, base_seed=1).passed


def test_suite_addtick_effect():
    assert run_addtick_effect(60, 4, base_seed=1).passed


def test_suite_lts_oracle_agreement():
    assert run_lts_oracle_agreement(60, 4, base_seed=1).passed


def test_suite_stable_failures_comm():
    assert run_sf_comm(15, 3, base_seed=1).passed


def test_report_json_shape():
    report = run_prefix_closure(5, 3, base_seed=9)
    payload = report.to_json()
    assert payload["law"] == "prefix-closure"
    assert payload["trials"] == 5
    assert payload["passed"] is True
    assert payload["failures"] == []
