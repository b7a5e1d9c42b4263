"""Trace semantics: the trace predicate, a bounded enumerator, and trace
refinement/equality.

A trace is a list of visible labels plus an optional return value (present
exactly when a tick was performed). The derivation rules:

  * the empty trace (no termination) belongs to every process;
  * a terminated process also has the empty trace carrying its value;
  * an external choice prepends its label to any trace of the continuation;
  * an internal choice contributes the traces of its continuation, silently;
  * a tick event yields the empty trace carrying the tick's value.

``is_trace`` decides membership with a τ budget; ``trace_set`` enumerates
every trace derivable within a combined budget of visible and silent rule
applications, which keeps enumeration total even on divergent processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from mcsp.choice import (
    Choice,
    ChoiceElem,
    ChoiceTypeError,
    cardinality,
    element_index,
    render_choice,
    render_value,
)
from mcsp.kernel import Label, Process, Terminated, unfold


@dataclass(frozen=True)
class Trace:
    """A (labels, outcome) pair; outcome None means no tick was performed."""

    labels: tuple[Label, ...]
    outcome: ChoiceElem | None = None

    def to_json(self) -> dict:
        return {
            "labels": [l.name for l in self.labels],
            "outcome": None if self.outcome is None else render_value(self.outcome),
        }


def trace(*names: str, outcome: ChoiceElem | None = None) -> Trace:
    """Shorthand constructor used heavily in tests."""
    return Trace(tuple(Label(n) for n in names), outcome)


def trace_sort_key(t: Trace, ret_choice: Choice | None = None):
    """Canonical trace order: by length, then labels, then outcome (absent
    first, then by canonical element position when the choice is known)."""
    if t.outcome is None:
        outcome_key = (0, 0, "")
    elif ret_choice is not None:
        outcome_key = (1, element_index(ret_choice, t.outcome), "")
    else:
        outcome_key = (1, 0, render_value(t.outcome))
    return (len(t.labels), tuple(l.name for l in t.labels), outcome_key)


def sorted_traces(traces: Iterable[Trace],
                  ret_choice: Choice | None = None) -> list[Trace]:
    return sorted(traces, key=lambda t: trace_sort_key(t, ret_choice))


def map_outcome(f, traces: Iterable[Trace]) -> frozenset[Trace]:
    """Apply f to the outcome of every terminating trace."""
    return frozenset(
        Trace(t.labels, None if t.outcome is None else f(t.outcome))
        for t in traces
    )


# --------------------------------------------------------------------------
# Membership and enumeration

def is_trace(p: Process, t: Trace, tau_fuel: int) -> bool:
    """True iff t is derivable using at most tau_fuel silent steps along any
    single derivation branch. Visible steps are bounded by the trace itself."""
    if tau_fuel < 0:
        raise ValueError("tau_fuel must be >= 0")
    obs = unfold(p)
    if isinstance(obs, Terminated):
        return not t.labels and (t.outcome is None or t.outcome == obs.value)
    if not t.labels and t.outcome is None:
        return True
    if not t.labels and t.outcome is not None:
        if any(v == t.outcome for v in obs.tick_value.values()):
            return True
    if t.labels:
        head, rest = t.labels[0], Trace(t.labels[1:], t.outcome)
        for e, lab in obs.labels.items():
            if lab == head and is_trace(obs.ext_cont[e].force(), rest, tau_fuel):
                return True
    if tau_fuel > 0:
        for dp in obs.int_cont.values():
            if is_trace(dp.force(), t, tau_fuel - 1):
                return True
    return False


def trace_set(p: Process, depth: int) -> frozenset[Trace]:
    """All traces derivable with at most `depth` combined visible/silent rule
    applications along any derivation branch."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    obs = unfold(p)
    if isinstance(obs, Terminated):
        return frozenset({Trace((), None), Trace((), obs.value)})
    out = {Trace((), None)}
    out.update(Trace((), v) for v in obs.tick_value.values())
    if depth > 0:
        for e, lab in obs.labels.items():
            for t in trace_set(obs.ext_cont[e].force(), depth - 1):
                out.add(Trace((lab,) + t.labels, t.outcome))
        for dp in obs.int_cont.values():
            out.update(trace_set(dp.force(), depth - 1))
    return frozenset(out)


# --------------------------------------------------------------------------
# Refinement verdicts

@dataclass(frozen=True)
class Holds:
    """Refinement holds at the checked depth; definitive only when the
    checker could certify exhaustiveness."""

    definitive: bool
    depth_checked: int

    holds = True

    def to_json(self) -> dict:
        return {"holds": True, "definitive": self.definitive,
                "depth": self.depth_checked}


@dataclass(frozen=True)
class Fails:
    """Refinement fails, with a checkable witness behaviour."""

    witness: object

    holds = False

    def to_json(self) -> dict:
        w = self.witness
        payload = w.to_json() if hasattr(w, "to_json") else w
        return {"holds": False, "witness": payload}


Verdict = Holds | Fails


def _require_same_choice(c0: Choice, c1: Choice) -> None:
    if c0 != c1 and not (cardinality(c0) == 0 and cardinality(c1) == 0):
        raise ChoiceTypeError(
            f"refinement needs a shared return choice: "
            f"{render_choice(c0)} vs {render_choice(c1)}"
        )


def _definitive(depth: int, p_lts, q_lts) -> bool:
    """Exhaustiveness certificate: both transition systems are complete and
    acyclic in depth-consuming edges, and the depth covers their longest
    paths. Cyclic systems have unboundedly long behaviours, so a bounded
    check never certifies them."""
    if p_lts is None or q_lts is None:
        return False
    if not (p_lts.complete and q_lts.complete):
        return False
    dp, dq = p_lts.exhaustive_depth(), q_lts.exhaustive_depth()
    if dp is None or dq is None:
        return False
    return depth >= max(dp, dq)


def trace_refines(p: Process, q: Process, depth: int,
                  p_lts=None, q_lts=None) -> Verdict:
    """Does p trace-refine q, i.e. is every trace of q (up to depth) a trace
    of p? On failure, returns the least missing trace."""
    _require_same_choice(p.ret_choice, q.ret_choice)
    missing = trace_set(q, depth) - trace_set(p, depth)
    if missing:
        least = min(missing, key=lambda t: trace_sort_key(t, q.ret_choice))
        return Fails(least)
    return Holds(definitive=_definitive(depth, p_lts, q_lts),
                 depth_checked=depth)


def trace_equiv(p: Process, q: Process, depth: int,
                p_lts=None, q_lts=None) -> tuple[Verdict, Verdict]:
    """Both refinement directions; equivalence iff both hold."""
    return (trace_refines(p, q, depth, p_lts, q_lts),
            trace_refines(q, p, depth, q_lts, p_lts))
