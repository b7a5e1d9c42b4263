"""Explicit labelled transition systems extracted from DSL terms.

States are canonicalized terms; successors come from a one-step
interpretation of the term that mirrors the kernel operators clause by
clause, so the transition system is a second, independent route to the
semantics (the trace enumerator on elaborated processes being the first).
Exploration is breadth-first and budgeted; a budgeted-out system is marked
incomplete and downstream verdicts degrade to bounded claims.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mcsp.choice import (
    Choice,
    ChoiceElem,
    InL,
    InR,
    cardinality,
    render_value,
)
from mcsp.kernel import Label
from mcsp.lang.check import fmap_operand_choice, infer, union_parts
from mcsp.lang.elaborate import fn_semantics
from mcsp.lang.syntax import (
    AddTick,
    Ast,
    Bind,
    Env,
    ExtChoice,
    Fmap,
    IntChoice,
    Prefix,
    Ref,
    Skip,
    Stop,
    Term,
    pretty_ast,
)
from mcsp.traces import Trace


# --------------------------------------------------------------------------
# Actions

@dataclass(frozen=True)
class Visible:
    label: Label

    def sort_key(self):
        return (0, self.label.name, "")

    def to_json(self):
        return {"type": "visible", "label": self.label.name}


@dataclass(frozen=True)
class Tau:
    def sort_key(self):
        return (1, "", "")

    def to_json(self):
        return {"type": "tau"}


@dataclass(frozen=True)
class Tick:
    value: ChoiceElem

    def sort_key(self):
        return (2, "", render_value(self.value))

    def to_json(self):
        return {"type": "tick", "value": render_value(self.value)}


Action = Visible | Tau | Tick
TAU = Tau()


@dataclass(frozen=True)
class ExploreLimits:
    max_states: int = 512
    max_depth: int = 64

    def __post_init__(self):
        if self.max_states < 1 or self.max_depth < 1:
            raise ValueError("exploration limits must be >= 1")


# --------------------------------------------------------------------------
# One-step interpretation of terms

@dataclass(frozen=True)
class TerminatedView:
    value: ChoiceElem


@dataclass(frozen=True)
class NodeView:
    exts: tuple[tuple[Label, Ast], ...]
    taus: tuple[Ast, ...]
    ticks: tuple[ChoiceElem, ...]

    def is_empty(self) -> bool:
        return not (self.exts or self.taus or self.ticks)


def step(env: Env, ast: Ast, choice: Choice) -> TerminatedView | NodeView:
    """One-step successors of a term over `choice`, mirroring the kernel.

    Successor terms all denote processes over `choice` again; the stepped
    term must be well-typed (checked environments only).
    """
    if isinstance(ast, Term):
        return TerminatedView(ast.value)
    if isinstance(ast, Stop):
        return NodeView((), (), ())
    if isinstance(ast, Skip):
        return NodeView((), (), (ast.value,))
    if isinstance(ast, Prefix):
        return NodeView(((Label(ast.label), ast.cont),), (), ())
    if isinstance(ast, Ref):
        d = env.defs[ast.name]
        return step(env, d.body, d.annotation)
    if isinstance(ast, ExtChoice):
        left_c, right_c = union_parts(choice)
        va = step(env, ast.left, left_c)
        vb = step(env, ast.right, right_c)
        if isinstance(va, TerminatedView) and isinstance(vb, TerminatedView):
            return NodeView((), (), (InL(va.value), InR(vb.value)))
        if isinstance(vb, TerminatedView):
            # left keeps running retagged, plus a timed tick for b
            return NodeView(
                tuple((lab, Fmap("inl", t)) for lab, t in va.exts),
                tuple(AddTick(InR(vb.value), Fmap("inl", t)) for t in va.taus),
                tuple(InL(v) for v in va.ticks) + (InR(vb.value),),
            )
        if isinstance(va, TerminatedView):
            return NodeView(
                tuple((lab, Fmap("inr", t)) for lab, t in vb.exts),
                tuple(AddTick(InL(va.value), Fmap("inr", t)) for t in vb.taus),
                tuple(InR(v) for v in vb.ticks) + (InL(va.value),),
            )
        return NodeView(
            tuple((lab, Fmap("inl", t)) for lab, t in va.exts)
            + tuple((lab, Fmap("inr", t)) for lab, t in vb.exts),
            tuple(ExtChoice(t, ast.right) for t in va.taus)
            + tuple(ExtChoice(ast.left, t) for t in vb.taus),
            tuple(InL(v) for v in va.ticks) + tuple(InR(v) for v in vb.ticks),
        )
    if isinstance(ast, IntChoice):
        return NodeView(
            (), (Fmap("inl", ast.left), Fmap("inr", ast.right)), ()
        )
    if isinstance(ast, Fmap):
        operand_c = fmap_operand_choice(ast.fn, choice)
        f = fn_semantics(ast.fn)
        v = step(env, ast.operand, operand_c)
        if isinstance(v, TerminatedView):
            return TerminatedView(f(v.value))
        return NodeView(
            tuple((lab, Fmap(ast.fn, t)) for lab, t in v.exts),
            tuple(Fmap(ast.fn, t) for t in v.taus),
            tuple(f(x) for x in v.ticks),
        )
    if isinstance(ast, AddTick):
        v = step(env, ast.operand, choice)
        if isinstance(v, TerminatedView):
            return v
        return NodeView(
            v.exts,
            tuple(AddTick(ast.value, t) for t in v.taus),
            v.ticks + (ast.value,),
        )
    if isinstance(ast, Bind):
        scrut_c = ast.scrut_choice or infer(env, ast.scrutinee)
        bodies = dict(ast.branches)
        v = step(env, ast.scrutinee, scrut_c)
        if isinstance(v, TerminatedView):
            return step(env, bodies[v.value], choice)
        rebind = lambda t: Bind(t, ast.branches, scrut_c)
        return NodeView(
            tuple((lab, rebind(t)) for lab, t in v.exts),
            tuple(rebind(t) for t in v.taus)
            + tuple(bodies[x] for x in v.ticks),
            (),
        )
    raise TypeError(f"not an Ast: {ast!r}")


# --------------------------------------------------------------------------
# Canonicalization

_FMAP_COMPOSE = {("swap", "swap"): "id", ("swap", "inl"): "inr",
                 ("swap", "inr"): "inl"}


def canonical_typed(ast: Ast, choice: Choice | None,
                    env: Env) -> tuple[Ast, Choice | None]:
    """Normal form for state identity, with the result's choice.

    Rules: collapse fmap id; fuse fmap compositions within the four-function
    set; drop fmap wrappers entirely on empty-typed terms (any map between
    empty choices is vacuous — this is what closes the state space of
    empty-typed τ-recursion). References stay symbolic.
    """
    if isinstance(ast, (Stop, Skip, Ref, Term)):
        return ast, choice
    if isinstance(ast, Prefix):
        labels = []
        while isinstance(ast, Prefix):  # event chains can be long
            labels.append(ast.label)
            ast = ast.cont
        cont, _ = canonical_typed(ast, choice, env)
        for label in reversed(labels):
            cont = Prefix(label, cont)
        return cont, choice
    if isinstance(ast, (ExtChoice, IntChoice)):
        parts = union_parts(choice) if choice is not None else None
        left_c, right_c = parts if parts else (None, None)
        left, _ = canonical_typed(ast.left, left_c, env)
        right, _ = canonical_typed(ast.right, right_c, env)
        return type(ast)(left, right), choice
    if isinstance(ast, AddTick):
        operand, _ = canonical_typed(ast.operand, choice, env)
        return AddTick(ast.value, operand), choice
    if isinstance(ast, Bind):
        scrut_c = ast.scrut_choice or infer(env, ast.scrutinee)
        scrut, _ = canonical_typed(ast.scrutinee, scrut_c, env)
        branches = tuple(
            (pat, canonical_typed(body, choice, env)[0])
            for pat, body in ast.branches
        )
        return Bind(scrut, branches, scrut_c), choice
    if isinstance(ast, Fmap):
        operand_c = (fmap_operand_choice(ast.fn, choice)
                     if choice is not None else None)
        if choice is not None and cardinality(choice) == 0:
            return canonical_typed(ast.operand, operand_c, env)
        operand, oc = canonical_typed(ast.operand, operand_c, env)
        if ast.fn == "id":
            return operand, choice
        if isinstance(operand, Fmap):
            fused = _FMAP_COMPOSE.get((ast.fn, operand.fn))
            if fused == "id":
                inner_c = (fmap_operand_choice(operand.fn, oc)
                           if oc is not None else None)
                return operand.operand, inner_c if choice is None else choice
            if fused is not None:
                return Fmap(fused, operand.operand), choice
        return Fmap(ast.fn, operand), choice
    raise TypeError(f"not an Ast: {ast!r}")


def canonicalize(ast: Ast, env: Env, choice: Choice | None = None) -> Ast:
    """Public entry point; infers the term's choice when not supplied."""
    if choice is None:
        choice = infer(env, ast)
    return canonical_typed(ast, choice, env)[0]


# --------------------------------------------------------------------------
# The transition system

@dataclass
class Lts:
    name: str
    ret_choice: Choice
    initial: int
    num_states: int
    transitions: tuple[tuple[int, Action, int], ...]
    state_kind: dict[int, ChoiceElem | None]  # None = ordinary
    term_of: dict[int, Ast]
    choice_of: dict[int, Choice]
    complete: bool
    unexpanded: frozenset[int]
    _out: dict[int, list[tuple[Action, int]]] = field(default=None, repr=False)

    def states(self) -> range:
        return range(self.num_states)

    def out_edges(self, s: int) -> list[tuple[Action, int]]:
        if self._out is None:
            out: dict[int, list[tuple[Action, int]]] = {
                i: [] for i in range(self.num_states)
            }
            for frm, act, to in self.transitions:
                out[frm].append((act, to))
            self._out = out
        return self._out[s]

    def is_terminated_state(self, s: int) -> bool:
        return self.state_kind[s] is not None

    def exhaustive_depth(self) -> int | None:
        """Length of the longest visible/τ path when the depth-consuming
        edge graph is acyclic; None on cyclic graphs (no finite bound).
        Iterative so deep chains cannot exhaust the interpreter stack."""
        succ: dict[int, list[int]] = {i: [] for i in range(self.num_states)}
        for frm, act, to in self.transitions:
            if isinstance(act, (Visible, Tau)):
                succ[frm].append(to)
        WHITE, GREY, BLACK = 0, 1, 2
        colour = {i: WHITE for i in range(self.num_states)}
        longest: dict[int, int] = {}
        stack: list[tuple[int, int]] = [(self.initial, 0)]
        colour[self.initial] = GREY
        while stack:
            node, child = stack[-1]
            if child < len(succ[node]):
                stack[-1] = (node, child + 1)
                target = succ[node][child]
                if colour[target] == GREY:
                    return None
                if colour[target] == WHITE:
                    colour[target] = GREY
                    stack.append((target, 0))
            else:
                stack.pop()
                colour[node] = BLACK
                longest[node] = max(
                    (1 + longest[t] for t in succ[node]), default=0,
                )
        return longest[self.initial]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "initial": self.initial,
            "complete": self.complete,
            "states": [
                {
                    "id": s,
                    "term": pretty_ast(self.term_of[s]),
                    "kind": ("terminated" if self.state_kind[s] is not None
                             else "ordinary"),
                    **({"value": render_value(self.state_kind[s])}
                       if self.state_kind[s] is not None else {}),
                }
                for s in self.states()
            ],
            "edges": [
                {"from": frm, "action": act.to_json(), "to": to}
                for frm, act, to in self.transitions
            ],
        }

    def to_dot(self) -> str:
        lines = ["digraph lts {", "  rankdir=LR;",
                 '  __init [shape=point, label=""];',
                 f"  __init -> s{self.initial};"]
        for s in self.states():
            label = pretty_ast(self.term_of[s]).replace('"', '\\"')
            shape = ("doublecircle" if self.state_kind[s] is not None
                     else "ellipse")
            lines.append(f'  s{s} [label="{label}", shape={shape}];')
        for frm, act, to in self.transitions:
            if isinstance(act, Visible):
                attrs = f'label="{act.label.name}"'
            elif isinstance(act, Tau):
                attrs = 'label="τ", style=dashed'
            else:
                attrs = f'label="✓ {render_value(act.value)}"'
            lines.append(f"  s{frm} -> s{to} [{attrs}];")
        lines.append("}")
        return "\n".join(lines)


def build_lts(env: Env, name: str, limits: ExploreLimits = ExploreLimits()) -> Lts:
    """Breadth-first closure of the canonical initial term.

    complete is False iff a budget cut exploration short; every state that
    may be missing successors is recorded in `unexpanded`.
    """
    root_choice = env.defs[name].annotation
    term0, choice0 = canonical_typed(Ref(name), root_choice, env)

    ids: dict[Ast, int] = {}
    term_of: dict[int, Ast] = {}
    choice_of: dict[int, Choice] = {}
    state_kind: dict[int, ChoiceElem | None] = {}
    edges: list[tuple[int, Action, int]] = []
    seen_edges: set[tuple[int, Action, int]] = set()
    unexpanded: set[int] = set()
    complete = True
    queue: list[tuple[int, int]] = []  # (state id, depth); states enqueue once
    head = 0

    def intern(term: Ast, choice: Choice | None, depth: int) -> int | None:
        nonlocal complete
        if term in ids:
            return ids[term]
        if len(ids) >= limits.max_states:
            complete = False
            return None
        sid = len(ids)
        ids[term] = sid
        term_of[sid] = term
        choice_of[sid] = choice if choice is not None else root_choice
        state_kind[sid] = term.value if isinstance(term, Term) else None
        queue.append((sid, depth))
        return sid

    def add_edge(frm: int, act: Action, term: Ast, choice: Choice | None,
                 depth: int) -> None:
        to = intern(term, choice, depth + 1)
        if to is None:
            unexpanded.add(frm)
            return
        key = (frm, act, to)
        if key not in seen_edges:
            seen_edges.add(key)
            edges.append(key)

    intern(term0, choice0, 0)
    while head < len(queue):
        sid, depth = queue[head]
        head += 1
        if state_kind[sid] is not None:
            continue  # terminated states have no successors
        view = step(env, term_of[sid], choice_of[sid])
        if isinstance(view, TerminatedView):
            # A non-Term term denoting a terminated process cannot arise from
            # surface syntax; record it as terminated anyway.
            state_kind[sid] = view.value
            continue
        if depth >= limits.max_depth:
            if not view.is_empty():
                complete = False
                unexpanded.add(sid)
            continue
        c = choice_of[sid]
        for lab, t in view.exts:
            ct, cc = canonical_typed(t, c, env)
            add_edge(sid, Visible(lab), ct, cc, depth)
        for t in view.taus:
            ct, cc = canonical_typed(t, c, env)
            add_edge(sid, TAU, ct, cc, depth)
        for v in view.ticks:
            add_edge(sid, Tick(v), Term(v), c, depth)

    transitions = tuple(sorted(
        edges, key=lambda e: (e[0], e[1].sort_key(), e[2])
    ))
    return Lts(
        name=name, ret_choice=root_choice, initial=0, num_states=len(ids),
        transitions=transitions, state_kind=state_kind, term_of=term_of,
        choice_of=choice_of, complete=complete,
        unexpanded=frozenset(unexpanded),
    )


# --------------------------------------------------------------------------
# Queries

def initials(lts: Lts, s: int) -> frozenset[Label]:
    """Labels of visible transitions out of s."""
    if not 0 <= s < lts.num_states:
        raise ValueError(f"unknown state {s}")
    return frozenset(
        act.label for act, _ in lts.out_edges(s) if isinstance(act, Visible)
    )


def tau_closure(lts: Lts, states: frozenset[int]) -> frozenset[int]:
    todo = list(states)
    seen = set(states)
    while todo:
        s = todo.pop()
        for act, t in lts.out_edges(s):
            if isinstance(act, Tau) and t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def visible_step(lts: Lts, states: frozenset[int], label: Label) -> frozenset[int]:
    return frozenset(
        t for s in states for act, t in lts.out_edges(s)
        if isinstance(act, Visible) and act.label == label
    )


def states_after(lts: Lts, labels: tuple[Label, ...]) -> frozenset[int]:
    """All states reachable by spelling `labels` with free τ moves."""
    current = tau_closure(lts, frozenset({lts.initial}))
    for label in labels:
        current = tau_closure(lts, visible_step(lts, current, label))
        if not current:
            break
    return current


def is_stable_state(lts: Lts, s: int) -> bool:
    return not any(isinstance(act, Tau) for act, _ in lts.out_edges(s))


def stable_states_after(lts: Lts,
                        labels: tuple[Label, ...]) -> tuple[frozenset[int], bool]:
    """Stable states reachable after `labels`; second component flags a
    partial answer (incomplete exploration)."""
    stable = frozenset(
        s for s in states_after(lts, labels) if is_stable_state(lts, s)
    )
    return stable, not lts.complete


def reachable_subsets(lts: Lts, depth: int):
    """Yield (labels, τ-closed state set) for every label list of length
    <= depth that is actually reachable."""
    start = tau_closure(lts, frozenset({lts.initial}))
    queue: list[tuple[tuple[Label, ...], frozenset[int]]] = [((), start)]
    head = 0
    while head < len(queue):
        labels, subset = queue[head]
        head += 1
        yield labels, subset
        if len(labels) >= depth:
            continue
        next_labels = sorted(
            {act.label for s in subset for act, _ in lts.out_edges(s)
             if isinstance(act, Visible)}
        )
        for label in next_labels:
            nxt = tau_closure(lts, visible_step(lts, subset, label))
            if nxt:
                queue.append((labels + (label,), nxt))


def lts_trace_set(lts: Lts, depth: int) -> frozenset[Trace]:
    """Bounded traces computed from the explicit graph; on a complete system
    this agrees exactly with the direct rule enumerator."""
    memo: dict[tuple[int, int], frozenset[Trace]] = {}

    def rec(s: int, d: int) -> frozenset[Trace]:
        key = (s, d)
        if key in memo:
            return memo[key]
        out = {Trace((), None)}
        kind = lts.state_kind[s]
        if kind is not None:
            out.add(Trace((), kind))
        for act, t in lts.out_edges(s):
            if isinstance(act, Tick):
                out.add(Trace((), act.value))
            elif d > 0 and isinstance(act, Visible):
                for tr in rec(t, d - 1):
                    out.add(Trace((act.label,) + tr.labels, tr.outcome))
            elif d > 0 and isinstance(act, Tau):
                out.update(rec(t, d - 1))
        result = frozenset(out)
        memo[key] = result
        return result

    return rec(lts.initial, depth)


def env_alphabet(env: Env) -> frozenset[Label]:
    """All labels mentioned anywhere in an environment."""
    labels: set[Label] = set()

    def walk(ast: Ast) -> None:
        if isinstance(ast, Prefix):
            labels.add(Label(ast.label))
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
    return frozenset(labels)
