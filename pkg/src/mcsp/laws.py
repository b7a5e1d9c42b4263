"""Executable algebraic-law checks over seeded random processes.

Laws are checked at the trace/failure set level on generated corpora, so a
pass is bounded evidence (reported as such), never a proof. Every failure
is replayable from the law name and seed alone.

The generator is type-directed: it always produces environments that pass
checking, and it places recursive references only under prefix
continuations and bind branches. That restriction is deliberate: cycles
through choice operands accumulate retagging wrappers when unfolded, so
their canonical state spaces never close, and several suites need complete
transition systems.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from mcsp.choice import (
    BOOL,
    Choice,
    ChoiceElem,
    Fin,
    Union,
    cardinality,
    elements,
    named,
    swap_union,
)
from mcsp.kernel import Process, add_timed_tick, ext_choice
from mcsp.lang.check import choices_compatible
from mcsp.lang.elaborate import elaborate
from mcsp.lang.syntax import (
    AddTick,
    Ast,
    Bind,
    Definition,
    Env,
    ExtChoice,
    Fmap,
    IntChoice,
    Prefix,
    Ref,
    Skip,
    Stop,
)
from mcsp.lts import ExploreLimits, build_lts, lts_trace_set
from mcsp.failures import equiv_fdi, refines_fdi, stable_failures
from mcsp.traces import (
    Trace,
    map_outcome,
    sorted_traces,
    trace_set,
)

DEFAULT_VALUE_CHOICES: tuple[Choice, ...] = (
    named("u"),
    named("u", "w"),
    BOOL,
    Fin(2),
)


@dataclass(frozen=True)
class GenConfig:
    seed: int
    max_ast_nodes: int = 12
    label_alphabet: tuple[str, ...] = ("a", "b", "c")
    value_choices: tuple[Choice, ...] = DEFAULT_VALUE_CHOICES
    recursion_probability: float = 0.25

    def __post_init__(self):
        if self.max_ast_nodes < 1:
            raise ValueError("max_ast_nodes must be >= 1")
        if not self.label_alphabet:
            raise ValueError("label alphabet must be non-empty")


@dataclass(frozen=True)
class LawReport:
    law_name: str
    trials: int
    failures: tuple[tuple[str, str], ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "law": self.law_name,
            "trials": self.trials,
            "passed": self.passed,
            "failures": [
                {"inputs": inputs, "witness": witness}
                for inputs, witness in self.failures
            ],
        }

    def describe(self) -> str:
        status = "pass" if self.passed else f"FAIL ({len(self.failures)})"
        return f"{self.law_name}: {self.trials} trials, {status}"


# --------------------------------------------------------------------------
# Generator

class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.defs: dict[str, Definition] = {}

    def label(self) -> str:
        return self.rng.choice(self.cfg.label_alphabet)

    def base_choice(self) -> Choice:
        return self.rng.choice(self.cfg.value_choices)

    def annotation(self) -> Choice:
        if self.rng.random() < 0.45:
            return Union(self.base_choice(), self.base_choice())
        return self.base_choice()

    def value(self, c: Choice) -> ChoiceElem:
        return self.rng.choice(elements(c))

    def _refs_with(self, c: Choice) -> list[str]:
        return [n for n, d in self.defs.items()
                if choices_compatible(d.annotation, c)]

    def _bind_sources(self) -> list[str]:
        return [n for n, d in self.defs.items()
                if 1 <= cardinality(d.annotation) <= 4]

    def ast(self, c: Choice, budget: int) -> Ast:
        rng = self.rng
        options = ["stop"]
        if cardinality(c) >= 1:
            options.append("skip")
        if budget >= 1:
            options += ["prefix", "prefix", "fmap_id"]
            if cardinality(c) >= 1:
                options.append("addtick")
            if isinstance(c, Union):
                options += ["ext", "ext", "int", "fmap_inl", "fmap_inr",
                            "fmap_swap"]
            elif cardinality(c) == 0:
                options += ["ext", "int"]
            if self._bind_sources() and budget >= 2:
                options += ["bind", "bind"]
        if self._refs_with(c):
            options += ["ref", "ref"]
        kind = rng.choice(options)

        if kind == "stop":
            return Stop()
        if kind == "skip":
            return Skip(self.value(c))
        if kind == "ref":
            return Ref(rng.choice(self._refs_with(c)))
        if kind == "prefix":
            return Prefix(self.label(), self.ast(c, budget - 1))
        if kind == "addtick":
            return AddTick(self.value(c), self.ast(c, budget - 1))
        if kind == "fmap_id":
            return Fmap("id", self.ast(c, budget - 1))
        if kind in ("ext", "int"):
            left, right = (c.left, c.right) if isinstance(c, Union) else (c, c)
            node = ExtChoice if kind == "ext" else IntChoice
            half = max(budget // 2, 1) - 1
            return node(self.ast(left, half), self.ast(right, half))
        if kind == "fmap_inl":
            return Fmap("inl", self.ast(c.left, budget - 1))
        if kind == "fmap_inr":
            return Fmap("inr", self.ast(c.right, budget - 1))
        if kind == "fmap_swap":
            return Fmap("swap", self.ast(Union(c.right, c.left), budget - 1))
        if kind == "bind":
            source = rng.choice(self._bind_sources())
            scrut_c = self.defs[source].annotation
            per_branch = max(budget // max(cardinality(scrut_c), 1), 1) - 1
            branches = tuple(
                (e, self.ast(c, per_branch)) for e in elements(scrut_c)
            )
            return Bind(Ref(source), branches)
        raise AssertionError(kind)

    def loop_def(self, name: str, c: Choice) -> Definition:
        """A self-recursive definition; the cycle runs only through prefix
        continuations and bind branches so its state space closes."""
        rng = self.rng
        if rng.random() < 0.35 and self._bind_sources():
            source = rng.choice(self._bind_sources())
            scrut_c = self.defs[source].annotation
            elems = elements(scrut_c)
            loop_at = rng.randrange(len(elems))
            branches = tuple(
                (e, Ref(name) if i == loop_at else self.ast(c, 1))
                for i, e in enumerate(elems)
            )
            body: Ast = Bind(Ref(source), branches)
        else:
            body = Ref(name)
        for _ in range(rng.randint(1, 2)):
            body = Prefix(self.label(), body)
        return Definition(name, c, body)

    def env(self) -> Env:
        n_defs = self.rng.randint(1, 3)
        for i in range(n_defs):
            name = f"P{i}"
            if self.rng.random() < self.cfg.recursion_probability:
                annotation = self.base_choice()
                d = self.loop_def(name, annotation)
            else:
                annotation = self.annotation()
                budget = self.rng.randint(1, self.cfg.max_ast_nodes)
                d = Definition(name, annotation, self.ast(annotation, budget))
            self.defs[name] = d
        return Env(dict(self.defs))


def gen_process(cfg: GenConfig) -> Env:
    """Deterministic-in-seed random environment; always passes check_env."""
    return _Gen(cfg).env()


def subject_name(env: Env) -> str:
    """The definition a generated environment is 'about' (the last one,
    which may reference all the earlier ones)."""
    return env.names()[-1]


def count_constructors(env: Env) -> Counter:
    counts: Counter = Counter()

    def walk(ast: Ast) -> None:
        counts[type(ast).__name__] += 1
        if isinstance(ast, Prefix):
            walk(ast.cont)
        elif isinstance(ast, (ExtChoice, IntChoice)):
            walk(ast.left)
            walk(ast.right)
        elif isinstance(ast, (Fmap, AddTick)):
            walk(ast.operand)
        elif isinstance(ast, Bind):
            walk(ast.scrutinee)
            for _, body in ast.branches:
                walk(body)

    for d in env.defs.values():
        walk(d.body)
    return counts


# --------------------------------------------------------------------------
# Individual law checks

def check_ext_choice_comm(p: Process, q: Process, depth: int,
                          inputs: str = "") -> LawReport:
    """traceSet(p [] q) must equal traceSet(q [] p) with swapped outcomes."""
    lhs = trace_set(ext_choice(p, q), depth)
    rhs = map_outcome(swap_union, trace_set(ext_choice(q, p), depth))
    if lhs == rhs:
        return LawReport("ext-choice-commutativity", 1)
    witness = _first_diff(lhs, rhs)
    return LawReport("ext-choice-commutativity", 1,
                     ((inputs, witness),))


def check_prefix_closure(p: Process, depth: int, inputs: str = "") -> LawReport:
    """Every initial segment of a non-terminating trace is itself one."""
    traces = trace_set(p, depth)
    plain = {t.labels for t in traces if t.outcome is None}
    for labels in plain:
        for i in range(len(labels)):
            if labels[:i] not in plain:
                missing = Trace(labels[:i], None)
                return LawReport("prefix-closure", 1,
                                 ((inputs, f"missing {missing.to_json()}"),))
    return LawReport("prefix-closure", 1)


def check_addtick_trace_effect(p: Process, a: ChoiceElem, depth: int,
                               inputs: str = "") -> LawReport:
    """traceSet(addTick a p) = traceSet(p) ∪ {([], a)}, exactly."""
    expected = trace_set(p, depth) | {Trace((), a)}
    actual = trace_set(add_timed_tick(a, p), depth)
    if actual == expected:
        return LawReport("addtick-trace-effect", 1)
    return LawReport("addtick-trace-effect", 1,
                     ((inputs, _first_diff(actual, expected)),))


def check_partial_order(env: Env, p_name: str, q_name: str, r_name: str,
                        depth: int, inputs: str = "") -> LawReport:
    """Reflexivity on p; transitivity through the (p, q, r) chain when its
    premises hold; mutual refinement of (p, p) is equivalence."""
    procs = {n: elaborate(env, n) for n in (p_name, q_name, r_name)}
    ltss = {n: build_lts(env, n) for n in (p_name, q_name, r_name)}

    def fdi(a: str, b: str):
        return refines_fdi(procs[a], ltss[a], procs[b], ltss[b], depth)

    failures: list[tuple[str, str]] = []
    if not fdi(p_name, p_name).holds:
        failures.append((inputs, f"reflexivity failed on {p_name}"))
    pq, qr = fdi(p_name, q_name), fdi(q_name, r_name)
    if pq.holds and qr.holds and not fdi(p_name, r_name).holds:
        failures.append((inputs, "transitivity failed on the chain"))
    forward, backward = equiv_fdi(procs[p_name], ltss[p_name],
                                  procs[p_name], ltss[p_name], depth)
    if not (forward.holds and backward.holds):
        failures.append((inputs, "mutual refinement of (p, p) failed"))
    return LawReport("fdi-partial-order", 1, tuple(failures))


def _first_diff(actual: frozenset[Trace], expected: frozenset[Trace]) -> str:
    extra = sorted_traces(actual - expected)
    missing = sorted_traces(expected - actual)
    parts = []
    if extra:
        parts.append(f"unexpected {extra[0].to_json()}")
    if missing:
        parts.append(f"missing {missing[0].to_json()}")
    return "; ".join(parts)


# --------------------------------------------------------------------------
# Chains with refinement built in

def make_refinement_chain(seed: int) -> tuple[Env, str, str, str]:
    """(env, p, q, r) with p ⊑fdi q ⊑fdi r by construction: each link wraps
    the next with addTick, which only ever adds behaviour."""
    cfg = GenConfig(seed=seed)
    gen = _Gen(cfg)
    env = gen.env()
    r = subject_name(env)
    c = env.defs[r].annotation
    rng = random.Random(seed ^ 0x5EED)
    defs = dict(env.defs)
    if cardinality(c) == 0:
        # addTick needs a value; fall back to identity links
        defs["ChainQ"] = Definition("ChainQ", c, Ref(r))
        defs["ChainP"] = Definition("ChainP", c, Ref("ChainQ"))
    else:
        v, w = rng.choice(elements(c)), rng.choice(elements(c))
        defs["ChainQ"] = Definition("ChainQ", c, AddTick(v, Ref(r)))
        defs["ChainP"] = Definition("ChainP", c, AddTick(w, Ref("ChainQ")))
    return Env(defs), "ChainP", "ChainQ", r


# --------------------------------------------------------------------------
# Seeded suites

def run_ext_choice_comm(trials: int, depth: int, base_seed: int = 0) -> LawReport:
    failures: list[tuple[str, str]] = []
    for i in range(trials):
        env_p = gen_process(GenConfig(seed=base_seed + 2 * i))
        env_q = gen_process(GenConfig(seed=base_seed + 2 * i + 1))
        p = elaborate(env_p, subject_name(env_p))
        q = elaborate(env_q, subject_name(env_q))
        report = check_ext_choice_comm(p, q, depth, inputs=f"seed={base_seed + 2 * i}")
        failures.extend(report.failures)
    return LawReport("ext-choice-commutativity", trials, tuple(failures))


def run_partial_order(refl_trials: int, chain_trials: int, equiv_trials: int,
                      depth: int, base_seed: int = 0) -> LawReport:
    failures: list[tuple[str, str]] = []
    trials = 0
    for i in range(refl_trials):
        env = gen_process(GenConfig(seed=base_seed + i))
        name = subject_name(env)
        p = elaborate(env, name)
        lts = build_lts(env, name)
        trials += 1
        if not refines_fdi(p, lts, p, lts, depth).holds:
            failures.append((f"seed={base_seed + i}", f"reflexivity on {name}"))
    for i in range(chain_trials):
        env, p_name, q_name, r_name = make_refinement_chain(base_seed + 1000 + i)
        trials += 1
        report = check_partial_order(env, p_name, q_name, r_name, depth,
                                     inputs=f"seed={base_seed + 1000 + i}")
        # the chain is built to refine, so its premises must actually hold
        procs = {n: elaborate(env, n) for n in (p_name, q_name, r_name)}
        ltss = {n: build_lts(env, n) for n in (p_name, q_name, r_name)}
        pq = refines_fdi(procs[p_name], ltss[p_name], procs[q_name],
                         ltss[q_name], depth)
        qr = refines_fdi(procs[q_name], ltss[q_name], procs[r_name],
                         ltss[r_name], depth)
        if not (pq.holds and qr.holds):
            failures.append((f"seed={base_seed + 1000 + i}",
                             "constructed chain does not refine"))
        failures.extend(report.failures)
    for i in range(equiv_trials):
        env = gen_process(GenConfig(seed=base_seed + 2000 + i))
        name = subject_name(env)
        p = elaborate(env, name)
        lts = build_lts(env, name)
        trials += 1
        forward = refines_fdi(p, lts, p, lts, depth)
        backward = refines_fdi(p, lts, p, lts, depth)
        if not (forward.holds and backward.holds):
            failures.append((f"seed={base_seed + 2000 + i}",
                             "mutual refinement of (p, p) failed"))
    return LawReport("fdi-partial-order", trials, tuple(failures))


def run_prefix_closure(trials: int, depth: int, base_seed: int = 0) -> LawReport:
    failures: list[tuple[str, str]] = []
    for i in range(trials):
        env = gen_process(GenConfig(seed=base_seed + i))
        p = elaborate(env, subject_name(env))
        report = check_prefix_closure(p, depth, inputs=f"seed={base_seed + i}")
        failures.extend(report.failures)
    return LawReport("prefix-closure", trials, tuple(failures))


def run_addtick_effect(trials: int, depth: int, base_seed: int = 0) -> LawReport:
    failures: list[tuple[str, str]] = []
    for i in range(trials):
        env = gen_process(GenConfig(seed=base_seed + i))
        name = subject_name(env)
        c = env.defs[name].annotation
        if cardinality(c) == 0:
            continue
        p = elaborate(env, name)
        rng = random.Random(base_seed + i)
        a = rng.choice(elements(c))
        report = check_addtick_trace_effect(p, a, depth,
                                            inputs=f"seed={base_seed + i}")
        failures.extend(report.failures)
    return LawReport("addtick-trace-effect", trials, tuple(failures))


def run_lts_oracle_agreement(trials: int, depth: int,
                             base_seed: int = 0) -> LawReport:
    """Direct rule enumeration vs complete-LTS trace computation."""
    failures: list[tuple[str, str]] = []
    for i in range(trials):
        env = gen_process(GenConfig(seed=base_seed + i))
        name = subject_name(env)
        lts = build_lts(env, name, ExploreLimits(max_states=2000, max_depth=200))
        if not lts.complete:
            failures.append((f"seed={base_seed + i}", "state space did not close"))
            continue
        direct = trace_set(elaborate(env, name), depth)
        via_lts = lts_trace_set(lts, depth)
        if direct != via_lts:
            failures.append((f"seed={base_seed + i}", _first_diff(via_lts, direct)))
    return LawReport("lts-oracle-agreement", trials, tuple(failures))


def _rename_refs(ast: Ast, mapping: dict[str, str]) -> Ast:
    if isinstance(ast, Ref):
        return Ref(mapping.get(ast.name, ast.name))
    if isinstance(ast, Prefix):
        return Prefix(ast.label, _rename_refs(ast.cont, mapping))
    if isinstance(ast, (ExtChoice, IntChoice)):
        return type(ast)(_rename_refs(ast.left, mapping),
                         _rename_refs(ast.right, mapping))
    if isinstance(ast, Fmap):
        return Fmap(ast.fn, _rename_refs(ast.operand, mapping))
    if isinstance(ast, AddTick):
        return AddTick(ast.value, _rename_refs(ast.operand, mapping))
    if isinstance(ast, Bind):
        return Bind(_rename_refs(ast.scrutinee, mapping),
                    tuple((pat, _rename_refs(body, mapping))
                          for pat, body in ast.branches),
                    ast.scrut_choice)
    return ast


def run_sf_comm(trials: int, depth: int, base_seed: int = 0) -> LawReport:
    """Stable-failures commutativity of external choice, reported separately:
    failure sets mention labels only, so no outcome swap is needed."""
    failures: list[tuple[str, str]] = []
    for i in range(trials):
        env_p = gen_process(GenConfig(seed=base_seed + 2 * i))
        env_q = gen_process(GenConfig(seed=base_seed + 2 * i + 1))
        p_map = {n: f"L_{n}" for n in env_p.names()}
        q_map = {n: f"R_{n}" for n in env_q.names()}
        defs: dict[str, Definition] = {}
        for n, d in env_p.defs.items():
            defs[p_map[n]] = Definition(p_map[n], d.annotation,
                                        _rename_refs(d.body, p_map))
        for n, d in env_q.defs.items():
            defs[q_map[n]] = Definition(q_map[n], d.annotation,
                                        _rename_refs(d.body, q_map))
        pa = p_map[subject_name(env_p)]
        qa = q_map[subject_name(env_q)]
        ca = defs[pa].annotation
        cb = defs[qa].annotation
        defs["LHS"] = Definition("LHS", Union(ca, cb),
                                 ExtChoice(Ref(pa), Ref(qa)))
        defs["RHS"] = Definition("RHS", Union(cb, ca),
                                 ExtChoice(Ref(qa), Ref(pa)))
        combined = Env(defs)
        limits = ExploreLimits(max_states=2000, max_depth=200)
        lhs = stable_failures(build_lts(combined, "LHS", limits), depth)
        rhs = stable_failures(build_lts(combined, "RHS", limits), depth)
        as_pairs = lambda rep: {
            (f.labels, f.witness_initials) for f in rep.failures
        }
        if as_pairs(lhs) != as_pairs(rhs):
            failures.append((f"seed={base_seed + 2 * i}",
                             "stable-failure sets differ"))
    return LawReport("ext-choice-commutativity-sf", trials, tuple(failures))


@dataclass(frozen=True)
class SuiteConfig:
    base_seed: int = 20260809
    depth: int = 4
    comm_trials: int = 200
    refl_trials: int = 100
    chain_trials: int = 50
    equiv_trials: int = 100
    closure_trials: int = 500
    addtick_trials: int = 500
    oracle_trials: int = 500
    sf_comm_trials: int = 50


def run_suite(cfg: SuiteConfig = SuiteConfig()) -> list[LawReport]:
    return [
        run_ext_choice_comm(cfg.comm_trials, cfg.depth, cfg.base_seed),
        run_partial_order(cfg.refl_trials, cfg.chain_trials, cfg.equiv_trials,
                          cfg.depth, cfg.base_seed),
        run_prefix_closure(cfg.closure_trials, cfg.depth, cfg.base_seed),
        run_addtick_effect(cfg.addtick_trials, cfg.depth, cfg.base_seed),
        run_lts_oracle_agreement(cfg.oracle_trials, cfg.depth, cfg.base_seed),
        run_sf_comm(cfg.sf_comm_trials, cfg.depth, cfg.base_seed),
    ]
