"""One-step process representation and the core operators.

A process over a return Choice c either has terminated with a value of c,
or is a node offering three indexed families: external choices (labelled,
each continuing as a deferred process), internal choices (silent, each
continuing as a deferred process), and tick events (each carrying a return
value of c). The single primitive observation is ``unfold``; every operator
below is defined by how its result unfolds, and continuations are built as
memoized suspensions so recursive processes stay productive.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Mapping

from mcsp.choice import (
    BOOL,
    EMPTY,
    UNIT,
    BoolElem,
    Choice,
    ChoiceElem,
    ChoiceTypeError,
    InL,
    InR,
    Union,
    UnitElem,
    elements,
    render_choice,
    render_value,
    require_inhabits,
)


@dataclass(frozen=True, order=True)
class Label:
    """A visible event name; ordered lexicographically for canonical output."""

    name: str

    def __str__(self):
        return self.name


class DeferredProcess:
    """Memoized suspension of a process.

    Forcing is idempotent (every force returns the same Process object) and
    safe under concurrent forcing: the lock guarantees the thunk runs once.
    """

    __slots__ = ("ret_choice", "display", "_thunk", "_value", "_lock")

    def __init__(self, ret_choice: Choice, thunk: Callable[[], "Process"],
                 display: str = "..."):
        self.ret_choice = ret_choice
        self.display = display
        self._thunk = thunk
        self._value: Process | None = None
        self._lock = threading.Lock()

    def force(self) -> "Process":
        if self._value is None:
            with self._lock:
                if self._value is None:
                    value = self._thunk()
                    if value.ret_choice != self.ret_choice:
                        raise ChoiceTypeError(
                            f"deferred process forced to return choice "
                            f"{render_choice(value.ret_choice)}, expected "
                            f"{render_choice(self.ret_choice)}"
                        )
                    self._value = value
                    self._thunk = None
        return self._value

    def __repr__(self):
        state = "forced" if self._value is not None else "suspended"
        return f"<DeferredProcess {self.display!r} ({state})>"


class Process:
    """Base class; a process is Terminated or a NodeProcess."""

    ret_choice: Choice
    display: str


@dataclass(frozen=True)
class Terminated(Process):
    """A process that has terminated with a return value."""

    ret_choice: Choice
    value: ChoiceElem

    def __post_init__(self):
        require_inhabits(self.ret_choice, self.value, "terminated value")

    @property
    def display(self) -> str:
        return f"terminate {render_value(self.value)}"


class ProcessNode:
    """The seven observable fields of a progressing process.

    Each map is total on the enumeration of its index Choice; totality is
    validated at construction so a node can be trusted without re-checking.
    """

    __slots__ = ("ext_index", "labels", "ext_cont", "int_index", "int_cont",
                 "tick_index", "tick_value", "display")

    def __init__(self, *, ext_index: Choice, labels: Mapping[ChoiceElem, Label],
                 ext_cont: Mapping[ChoiceElem, DeferredProcess],
                 int_index: Choice, int_cont: Mapping[ChoiceElem, DeferredProcess],
                 tick_index: Choice, tick_value: Mapping[ChoiceElem, ChoiceElem],
                 display: str):
        _check_total("labels", labels, ext_index)
        _check_total("ext_cont", ext_cont, ext_index)
        _check_total("int_cont", int_cont, int_index)
        _check_total("tick_value", tick_value, tick_index)
        self.ext_index = ext_index
        self.labels = dict(labels)
        self.ext_cont = dict(ext_cont)
        self.int_index = int_index
        self.int_cont = dict(int_cont)
        self.tick_index = tick_index
        self.tick_value = dict(tick_value)
        self.display = display


def _check_total(what: str, mapping: Mapping, index: Choice) -> None:
    keys = set(mapping.keys())
    expected = set(elements(index))
    if keys != expected:
        raise ChoiceTypeError(
            f"{what} is not total on {render_choice(index)}: "
            f"missing {expected - keys}, extra {keys - expected}"
        )


class NodeProcess(Process):
    """Wrapper tagging a ProcessNode with its return Choice."""

    __slots__ = ("ret_choice", "node")

    def __init__(self, ret_choice: Choice, node: ProcessNode):
        for t, v in node.tick_value.items():
            require_inhabits(ret_choice, v, f"tick value at {render_value(t)}")
        self.ret_choice = ret_choice
        self.node = node

    @property
    def display(self) -> str:
        return self.node.display


def unfold(p: Process) -> Terminated | ProcessNode:
    """The one-step observation: the terminated value or the node fields."""
    if isinstance(p, Terminated):
        return p
    if isinstance(p, NodeProcess):
        return p.node
    raise TypeError(f"not a Process: {p!r}")


def defer(p: Process) -> DeferredProcess:
    """Wrap an already-computed process as a (pre-forced) suspension."""
    d = DeferredProcess(p.ret_choice, lambda: p, display=p.display)
    d.force()
    return d


def lazy(ret_choice: Choice, thunk: Callable[[], Process],
         display: str = "...") -> DeferredProcess:
    return DeferredProcess(ret_choice, thunk, display)


# --------------------------------------------------------------------------
# Basic constructors

def make_node(ret_choice: Choice, *, ext_index: Choice = EMPTY,
              labels: Mapping | None = None, ext_cont: Mapping | None = None,
              int_index: Choice = EMPTY, int_cont: Mapping | None = None,
              tick_index: Choice = EMPTY, tick_value: Mapping | None = None,
              display: str = "") -> NodeProcess:
    node = ProcessNode(
        ext_index=ext_index, labels=labels or {}, ext_cont=ext_cont or {},
        int_index=int_index, int_cont=int_cont or {},
        tick_index=tick_index, tick_value=tick_value or {},
        display=display,
    )
    return NodeProcess(ret_choice, node)


def stop(c: Choice) -> NodeProcess:
    """The process with no choices of any kind."""
    return make_node(c, display="STOP")


def skip(c: Choice, a: ChoiceElem) -> NodeProcess:
    """A single tick event returning a. Distinct from Terminated: SKIP still
    has to perform its tick, a terminated process already has."""
    require_inhabits(c, a, "skip value")
    return make_node(
        c, tick_index=UNIT, tick_value={UnitElem(): a},
        display=f"SKIP {render_value(a)}",
    )


def prefix(label: Label, cont: DeferredProcess) -> NodeProcess:
    """label -> cont: one external choice, then the continuation."""
    return make_node(
        cont.ret_choice,
        ext_index=UNIT, labels={UnitElem(): label}, ext_cont={UnitElem(): cont},
        display=f"{label.name} -> {cont.display}",
    )


def two_tick(c0: Choice, a: ChoiceElem, c1: Choice, b: ChoiceElem) -> NodeProcess:
    """Two tick events over the disjoint union: one returns inl a, one inr b."""
    require_inhabits(c0, a, "two_tick left value")
    require_inhabits(c1, b, "two_tick right value")
    c = Union(c0, c1)
    return make_node(
        c, tick_index=BOOL,
        tick_value={BoolElem(True): InL(a), BoolElem(False): InR(b)},
        display=f"2-tick {render_value(a)} {render_value(b)}",
    )


# --------------------------------------------------------------------------
# fmap

def fmap(f: Callable[[ChoiceElem], ChoiceElem], p: Process,
         target: Choice) -> Process:
    """Apply f to the return values of p, giving a process over target.

    Labels and all three index sets are unchanged; tick values are composed
    with f and continuations are mapped recursively (without forcing them).
    """
    for e in elements(p.ret_choice):
        require_inhabits(target, f(e), "fmap output")
    if isinstance(p, Terminated):
        return Terminated(target, f(p.value))
    node = p.node
    return make_node(
        target,
        ext_index=node.ext_index, labels=node.labels,
        ext_cont={e: fmap_deferred(f, dp, target)
                  for e, dp in node.ext_cont.items()},
        int_index=node.int_index,
        int_cont={i: fmap_deferred(f, dp, target)
                  for i, dp in node.int_cont.items()},
        tick_index=node.tick_index,
        tick_value={t: f(v) for t, v in node.tick_value.items()},
        display=f"fmap({p.display})",
    )


def fmap_deferred(f: Callable[[ChoiceElem], ChoiceElem], dp: DeferredProcess,
                  target: Choice) -> DeferredProcess:
    return lazy(target, lambda: fmap(f, dp.force(), target),
                display=f"fmap({dp.display})")


# --------------------------------------------------------------------------
# Timed tick and external choice

def add_timed_tick(a: ChoiceElem, p: Process) -> Process:
    """Add the possibility of terminating with a: kept across internal
    choices, lost once an external choice is performed."""
    if isinstance(p, Terminated):
        # Never reached from ext_choice; kept total by returning p unchanged.
        return p
    require_inhabits(p.ret_choice, a, "timed tick value")
    c = p.ret_choice
    node = p.node
    tick_index = Union(node.tick_index, UNIT)
    tick_value: dict[ChoiceElem, ChoiceElem] = {
        InL(t): v for t, v in node.tick_value.items()
    }
    tick_value[InR(UnitElem())] = a
    return make_node(
        c,
        ext_index=node.ext_index, labels=node.labels, ext_cont=node.ext_cont,
        int_index=node.int_index,
        int_cont={
            i: lazy(c, (lambda dp=dp: add_timed_tick(a, dp.force())),
                    display=f"addTick {render_value(a)} {dp.display}")
            for i, dp in node.int_cont.items()
        },
        tick_index=tick_index, tick_value=tick_value,
        display=f"addTick {render_value(a)} ({p.display})",
    )


def ext_choice(p: Process, q: Process) -> Process:
    """External choice over the disjoint union of the return choices.

    Both nodes: external/internal/tick families are the unions of the
    operands', with external continuations retagged by fmap inl/inr,
    internal continuations recursing against the unchanged other operand,
    and tick values injected. One side terminated: the other side keeps
    running (retagged), with a timed tick for the terminated value. Both
    terminated: the two-tick process.
    """
    c0, c1 = p.ret_choice, q.ret_choice
    c = Union(c0, c1)
    if isinstance(p, Terminated) and isinstance(q, Terminated):
        return two_tick(c0, p.value, c1, q.value)
    if isinstance(q, Terminated):
        return add_timed_tick(InR(q.value), fmap(InL, p, c))
    if isinstance(p, Terminated):
        return add_timed_tick(InL(p.value), fmap(InR, q, c))

    pn, qn = p.node, q.node
    labels = {InL(e): lab for e, lab in pn.labels.items()}
    labels.update({InR(e): lab for e, lab in qn.labels.items()})
    ext_cont = {InL(e): fmap_deferred(InL, dp, c)
                for e, dp in pn.ext_cont.items()}
    ext_cont.update({InR(e): fmap_deferred(InR, dp, c)
                     for e, dp in qn.ext_cont.items()})
    int_cont: dict[ChoiceElem, DeferredProcess] = {
        InL(i): lazy(c, (lambda dp=dp: ext_choice(dp.force(), q)),
                     display=f"({dp.display} [] {q.display})")
        for i, dp in pn.int_cont.items()
    }
    int_cont.update({
        InR(j): lazy(c, (lambda dp=dp: ext_choice(p, dp.force())),
                     display=f"({p.display} [] {dp.display})")
        for j, dp in qn.int_cont.items()
    })
    tick_value = {InL(t): InL(v) for t, v in pn.tick_value.items()}
    tick_value.update({InR(t): InR(v) for t, v in qn.tick_value.items()})
    return make_node(
        c,
        ext_index=Union(pn.ext_index, qn.ext_index), labels=labels,
        ext_cont=ext_cont,
        int_index=Union(pn.int_index, qn.int_index), int_cont=int_cont,
        tick_index=Union(pn.tick_index, qn.tick_index), tick_value=tick_value,
        display=f"({p.display} [] {q.display})",
    )


# --------------------------------------------------------------------------
# Internal choice and bind

def int_choice_deferred(dp: DeferredProcess, dq: DeferredProcess) -> NodeProcess:
    """Internal choice of two suspended operands; neither is forced here,
    which is what lets τ-guarded recursive definitions unfold one step at
    a time."""
    c = Union(dp.ret_choice, dq.ret_choice)
    return make_node(
        c,
        int_index=BOOL,
        int_cont={
            BoolElem(True): fmap_deferred(InL, dp, c),
            BoolElem(False): fmap_deferred(InR, dq, c),
        },
        display=f"({dp.display} |~| {dq.display})",
    )


def int_choice(p: Process, q: Process) -> NodeProcess:
    """Internal choice: a silent step into either operand (retagged)."""
    return int_choice_deferred(defer(p), defer(q))


def bind(p: Process, k: Callable[[ChoiceElem], DeferredProcess],
         target: Choice) -> Process:
    """Sequential composition: run p; on termination with a, continue as
    k(a). Tick events of p become silent steps into the continuation, so
    the composite's only termination signals are the continuation's."""
    for v in elements(p.ret_choice):
        cont = k(v)
        if cont.ret_choice != target:
            raise ChoiceTypeError(
                f"bind continuation at {render_value(v)} has return choice "
                f"{render_choice(cont.ret_choice)}, expected {render_choice(target)}"
            )
    if isinstance(p, Terminated):
        return k(p.value).force()
    node = p.node
    int_cont: dict[ChoiceElem, DeferredProcess] = {
        InL(i): lazy(target, (lambda dp=dp: bind(dp.force(), k, target)),
                     display=f"({dp.display} >>= ...)")
        for i, dp in node.int_cont.items()
    }
    int_cont.update({InR(t): k(v) for t, v in node.tick_value.items()})
    return make_node(
        target,
        ext_index=node.ext_index, labels=node.labels,
        ext_cont={
            e: lazy(target, (lambda dp=dp: bind(dp.force(), k, target)),
                    display=f"({dp.display} >>= ...)")
            for e, dp in node.ext_cont.items()
        },
        int_index=Union(node.int_index, node.tick_index), int_cont=int_cont,
        display=f"({p.display} >>= ...)",
    )
