"""Stable-failures and divergence semantics, with the three-part refinement.

A state is stable when it has no silent transition (tick events allowed).
A stable state refuses exactly the label sets disjoint from its initials,
so one (trace, witness-initials) pair compactly represents every refusal
set witnessed there. Divergence is the ability to take silent steps
forever, detected as τ-cycle reachability on a complete transition system.

Refinement is checked in three parts: traces, divergences (every divergence
of the candidate is one of the specification), and stable failures (every
failure of the candidate is one of the specification, i.e. each candidate
witness is dominated by a specification witness with smaller-or-equal
initials).
"""

from __future__ import annotations

from dataclasses import dataclass

from mcsp.kernel import Label, Process, Terminated, unfold
from mcsp.lts import (
    Lts,
    Tau,
    initials,
    is_stable_state,
    reachable_subsets,
)
from mcsp.traces import Fails, Holds, Verdict, _require_same_choice, trace_refines


# --------------------------------------------------------------------------
# Stability and refusal on processes

def is_stable(p: Process) -> bool:
    """Terminated processes are stable; a node is stable iff its internal
    choice index is empty (ticks and external choices permitted)."""
    obs = unfold(p)
    if isinstance(obs, Terminated):
        return True
    return not obs.int_cont


def process_initials(p: Process) -> frozenset[Label]:
    obs = unfold(p)
    if isinstance(obs, Terminated):
        return frozenset()
    return frozenset(obs.labels.values())


def refuses(p: Process, labels: frozenset[Label] | set[Label],
            tau_fuel: int) -> bool:
    """True iff some stable process reachable from p by at most tau_fuel
    silent steps has initials disjoint from `labels`."""
    if tau_fuel < 0:
        raise ValueError("tau_fuel must be >= 0")
    if is_stable(p):
        return not (process_initials(p) & frozenset(labels))
    if tau_fuel == 0:
        return False
    obs = unfold(p)
    return any(
        refuses(dp.force(), labels, tau_fuel - 1)
        for dp in obs.int_cont.values()
    )


# --------------------------------------------------------------------------
# Stable failures on a transition system

@dataclass(frozen=True)
class StableFailure:
    """A trace plus the initials of a stable witness reached after it; a
    label set X is refused here iff X is disjoint from the initials."""

    labels: tuple[Label, ...]
    witness_initials: frozenset[Label]
    witness: int

    def refuses(self, labels) -> bool:
        return not (self.witness_initials & frozenset(labels))

    def sort_key(self):
        return (len(self.labels), tuple(l.name for l in self.labels),
                sorted(l.name for l in self.witness_initials))

    def to_json(self, alphabet: frozenset[Label] = frozenset()) -> dict:
        return {
            "labels": [l.name for l in self.labels],
            "initials": sorted(l.name for l in self.witness_initials),
            "refusedExample": sorted(
                l.name for l in alphabet - self.witness_initials
            ),
        }


@dataclass(frozen=True)
class FailureReport:
    failures: tuple[StableFailure, ...]
    partial: bool


def stable_failures(lts: Lts, depth: int) -> FailureReport:
    """One StableFailure per (label list of length <= depth, stable state
    reachable after it); exhaustive when the system is complete."""
    found: list[StableFailure] = []
    for labels, subset in reachable_subsets(lts, depth):
        for s in sorted(subset):
            if is_stable_state(lts, s):
                found.append(StableFailure(labels, initials(lts, s), s))
    found.sort(key=StableFailure.sort_key)
    return FailureReport(tuple(found), partial=not lts.complete)


# --------------------------------------------------------------------------
# Divergence

@dataclass(frozen=True)
class Divergence:
    """A trace after which a divergent state is reachable. definitive means
    the divergence is witnessed by a τ-cycle of a complete system rather
    than by running out of exploration budget."""

    labels: tuple[Label, ...]
    definitive: bool

    def sort_key(self):
        return (len(self.labels), tuple(l.name for l in self.labels))

    def to_json(self) -> dict:
        return {
            "labels": [l.name for l in self.labels],
            "mode": "definitive" if self.definitive else "bounded",
        }


@dataclass(frozen=True)
class DivergenceReport:
    divergences: tuple[Divergence, ...]
    partial: bool

    def label_lists(self) -> frozenset[tuple[Label, ...]]:
        return frozenset(d.labels for d in self.divergences)


def _tau_successors(lts: Lts) -> dict[int, list[int]]:
    succ: dict[int, list[int]] = {s: [] for s in lts.states()}
    for frm, act, to in lts.transitions:
        if isinstance(act, Tau):
            succ[frm].append(to)
    return succ


def _tau_cycle_states(lts: Lts) -> frozenset[int]:
    """States lying on a τ-cycle (Tarjan SCCs of the τ-graph)."""
    succ = _tau_successors(lts)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = [0]
    cyclic: set[int] = set()

    def strongconnect(v: int) -> None:
        # iterative Tarjan to stay safe on deep τ-chains
        work = [(v, iter(succ[v]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.remove(w)
                    component.append(w)
                    if w == node:
                        break
                if len(component) > 1 or node in succ[node]:
                    cyclic.update(component)

    for s in lts.states():
        if s not in index:
            strongconnect(s)
    return frozenset(cyclic)


def divergent_states(lts: Lts) -> tuple[frozenset[int], frozenset[int]]:
    """(definitively divergent, possibly divergent) state sets: states that
    τ-reach a τ-cycle, and states that τ-reach an unexpanded frontier."""
    succ = _tau_successors(lts)
    pred: dict[int, list[int]] = {s: [] for s in lts.states()}
    for frm, tos in succ.items():
        for to in tos:
            pred[to].append(frm)

    def backward(seed: frozenset[int]) -> frozenset[int]:
        seen = set(seed)
        todo = list(seed)
        while todo:
            s = todo.pop()
            for q in pred[s]:
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    definitive = backward(_tau_cycle_states(lts))
    bounded = backward(frozenset(lts.unexpanded)) - definitive
    return definitive, bounded


def divergences_of(lts: Lts, depth: int) -> DivergenceReport:
    """Label lists (length <= depth) after which a divergent state is
    reachable. No extension closure is applied: a divergence is reported
    exactly at the traces that reach it."""
    definitive, bounded = divergent_states(lts)
    found: list[Divergence] = []
    for labels, subset in reachable_subsets(lts, depth):
        if subset & definitive:
            found.append(Divergence(labels, definitive=True))
        elif subset & bounded:
            found.append(Divergence(labels, definitive=False))
    found.sort(key=Divergence.sort_key)
    return DivergenceReport(tuple(found), partial=not lts.complete)


# --------------------------------------------------------------------------
# Refinement

def _definitive_pair(depth: int, p_lts: Lts, q_lts: Lts) -> bool:
    if not (p_lts.complete and q_lts.complete):
        return False
    dp, dq = p_lts.exhaustive_depth(), q_lts.exhaustive_depth()
    return dp is not None and dq is not None and depth >= max(dp, dq)


def refines_fdi1(p_lts: Lts, q_lts: Lts, depth: int) -> Verdict:
    """Divergence refinement: every divergence of q is a divergence of p."""
    _require_same_choice(p_lts.ret_choice, q_lts.ret_choice)
    q_divs = divergences_of(q_lts, depth)
    p_lists = divergences_of(p_lts, depth).label_lists()
    missing = [d for d in q_divs.divergences if d.labels not in p_lists]
    if missing:
        return Fails(min(missing, key=Divergence.sort_key))
    return Holds(definitive=_definitive_pair(depth, p_lts, q_lts),
                 depth_checked=depth)


def refines_fdi2(p_lts: Lts, q_lts: Lts, depth: int) -> Verdict:
    """Stable-failure refinement: for every stable failure of q there is a
    p-witness after the same trace whose initials are contained in the
    q-witness's (equivalently, every refusal of q is a refusal of p)."""
    _require_same_choice(p_lts.ret_choice, q_lts.ret_choice)
    q_failures = stable_failures(q_lts, depth).failures
    p_failures = stable_failures(p_lts, depth).failures
    p_by_trace: dict[tuple[Label, ...], list[frozenset[Label]]] = {}
    for f in p_failures:
        p_by_trace.setdefault(f.labels, []).append(f.witness_initials)
    for f in q_failures:
        dominated = any(
            wi <= f.witness_initials for wi in p_by_trace.get(f.labels, [])
        )
        if not dominated:
            return Fails(f)
    return Holds(definitive=_definitive_pair(depth, p_lts, q_lts),
                 depth_checked=depth)


@dataclass(frozen=True)
class FdiVerdict:
    """Conjunction of trace, divergence, and stable-failure refinement."""

    traces: Verdict
    divergences: Verdict
    failures: Verdict

    @property
    def holds(self) -> bool:
        return self.traces.holds and self.divergences.holds and self.failures.holds

    @property
    def first_failure(self) -> tuple[str, Verdict] | None:
        for part, verdict in (("traces", self.traces),
                              ("divergences", self.divergences),
                              ("failures", self.failures)):
            if not verdict.holds:
                return part, verdict
        return None

    def to_json(self) -> dict:
        out = {
            "holds": self.holds,
            "components": {
                "traces": self.traces.to_json(),
                "divergences": self.divergences.to_json(),
                "failures": self.failures.to_json(),
            },
        }
        failing = self.first_failure
        if failing:
            out["failedComponent"] = failing[0]
        return out


def refines_fdi(p: Process, p_lts: Lts, q: Process, q_lts: Lts,
                depth: int) -> FdiVerdict:
    return FdiVerdict(
        traces=trace_refines(p, q, depth, p_lts, q_lts),
        divergences=refines_fdi1(p_lts, q_lts, depth),
        failures=refines_fdi2(p_lts, q_lts, depth),
    )


def equiv_fdi(p: Process, p_lts: Lts, q: Process, q_lts: Lts,
              depth: int) -> tuple[FdiVerdict, FdiVerdict]:
    return (refines_fdi(p, p_lts, q, q_lts, depth),
            refines_fdi(q, q_lts, p, p_lts, depth))
