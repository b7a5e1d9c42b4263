"""Type and guardedness checking for the process DSL.

Checking is annotation-directed: each definition body is checked against
its declared return Choice, with external/internal choice and fmap inl/inr/
swap steering the expected Choice through disjoint-union shape. Inference
exists only where checking needs it (bind scrutinees, Ref annotations).

Two choices are considered interchangeable when structurally equal or both
empty (cardinality 0): any map out of an empty set is vacuously total, so
the elaborator can coerce between empty choices without observable effect.
This is what lets the canonical divergent process `X : Empty = X |~| X`
check although internal choice builds a disjoint union.

Guardedness: every cycle among definitions must pass through a deferred
position (a prefix continuation, an internal-choice operand — entered via a
silent step — or a bind branch). External-choice operands, bind scrutinees,
and fmap/addTick operands are examined eagerly when a definition unfolds,
so cycles running only through those positions would never produce a node.
"""

from __future__ import annotations

from dataclasses import dataclass

from mcsp.choice import (
    EMPTY,
    Choice,
    Union,
    cardinality,
    elements,
    inhabits,
    render_choice,
    render_value,
)
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
)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    definition: str
    line: int = 0
    col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}: [{self.kind}] in {self.definition}: {self.message}"


def choices_compatible(a: Choice, b: Choice) -> bool:
    return a == b or (cardinality(a) == 0 and cardinality(b) == 0)


def union_parts(c: Choice) -> tuple[Choice, Choice] | None:
    """Split an expected union into operand choices. A non-union empty
    choice splits into (Empty, Empty); anything else does not split."""
    if isinstance(c, Union):
        return (c.left, c.right)
    if cardinality(c) == 0:
        return (EMPTY, EMPTY)
    return None


def fmap_operand_choice(fn: str, expected: Choice) -> Choice | None:
    """Expected choice of `fmap fn`'s operand, given the result choice."""
    if fn == "id":
        return expected
    parts = union_parts(expected)
    if parts is None:
        return None
    left, right = parts
    if fn == "inl":
        return left
    if fn == "inr":
        return right
    return Union(right, left)  # swap


def infer(env: Env, ast: Ast) -> Choice | None:
    """Bottom-up inference; None where the DSL is not principal-typed
    (Stop, Skip, fmap inl/inr)."""
    if isinstance(ast, Ref):
        d = env.defs.get(ast.name)
        return d.annotation if d else None
    if isinstance(ast, Prefix):
        return infer(env, ast.cont)
    if isinstance(ast, (ExtChoice, IntChoice)):
        left, right = infer(env, ast.left), infer(env, ast.right)
        if left is None or right is None:
            return None
        return Union(left, right)
    if isinstance(ast, Fmap):
        inner = infer(env, ast.operand)
        if ast.fn == "id":
            return inner
        if ast.fn == "swap" and isinstance(inner, Union):
            return Union(inner.right, inner.left)
        return None
    if isinstance(ast, AddTick):
        return infer(env, ast.operand)
    if isinstance(ast, Bind):
        if ast.branches:
            inferred = [infer(env, body) for _, body in ast.branches]
            if all(c is not None for c in inferred) and len(set(inferred)) == 1:
                return inferred[0]
        return None
    return None  # Stop, Skip, Term


class _Checker:
    def __init__(self, env: Env):
        self.env = env
        self.diags: list[Diagnostic] = []

    def report(self, kind: str, message: str, defn: str) -> None:
        pos = self.env.defs[defn].pos if defn in self.env.defs else (0, 0)
        self.diags.append(Diagnostic(kind, message, defn, pos[0], pos[1]))

    def check(self, ast: Ast, expected: Choice, defn: str) -> None:
        if isinstance(ast, (Stop, Term)):
            if isinstance(ast, Term) and not inhabits(expected, ast.value):
                self.report("type-mismatch",
                            f"terminated value {render_value(ast.value)} not in "
                            f"{render_choice(expected)}", defn)
            return
        if isinstance(ast, Skip):
            if not inhabits(expected, ast.value):
                self.report("type-mismatch",
                            f"SKIP value {render_value(ast.value)} not in "
                            f"{render_choice(expected)}", defn)
            return
        if isinstance(ast, Prefix):
            while isinstance(ast, Prefix):  # event chains can be long
                ast = ast.cont
            self.check(ast, expected, defn)
            return
        if isinstance(ast, (ExtChoice, IntChoice)):
            parts = union_parts(expected)
            if parts is None:
                op = "[]" if isinstance(ast, ExtChoice) else "|~|"
                self.report("not-a-union",
                            f"{op} needs a disjoint-union annotation, got "
                            f"{render_choice(expected)}", defn)
                return
            self.check(ast.left, parts[0], defn)
            self.check(ast.right, parts[1], defn)
            return
        if isinstance(ast, Fmap):
            operand = fmap_operand_choice(ast.fn, expected)
            if operand is None:
                self.report("not-a-union",
                            f"fmap {ast.fn} needs a disjoint-union annotation, "
                            f"got {render_choice(expected)}", defn)
                return
            self.check(ast.operand, operand, defn)
            return
        if isinstance(ast, AddTick):
            if not inhabits(expected, ast.value):
                self.report("type-mismatch",
                            f"addTick value {render_value(ast.value)} not in "
                            f"{render_choice(expected)}", defn)
            self.check(ast.operand, expected, defn)
            return
        if isinstance(ast, Bind):
            scrut = ast.scrut_choice or infer(self.env, ast.scrutinee)
            if scrut is None:
                self.report("bind-uninferable",
                            "cannot infer the scrutinee's return choice; "
                            "factor it through a named definition", defn)
                return
            self.check(ast.scrutinee, scrut, defn)
            covered: set = set()
            for pattern, body in ast.branches:
                if not inhabits(scrut, pattern):
                    self.report("type-mismatch",
                                f"branch pattern {render_value(pattern)} not in "
                                f"{render_choice(scrut)}", defn)
                elif pattern in covered:
                    self.report("bind-overlap",
                                f"branch pattern {render_value(pattern)} "
                                "repeated", defn)
                covered.add(pattern)
                self.check(body, expected, defn)
            missing = [e for e in elements(scrut) if e not in covered]
            if missing:
                self.report("bind-nonexhaustive",
                            "branches do not cover "
                            + ", ".join(render_value(e) for e in missing), defn)
            return
        if isinstance(ast, Ref):
            target = self.env.defs.get(ast.name)
            if target is None:
                self.report("unknown-name", f"unknown process {ast.name!r}", defn)
                return
            if not choices_compatible(target.annotation, expected):
                self.report("type-mismatch",
                            f"{ast.name} has return choice "
                            f"{render_choice(target.annotation)}, expected "
                            f"{render_choice(expected)}", defn)
            return
        raise TypeError(f"not an Ast: {ast!r}")


def _reference_edges(ast: Ast, guarded: bool,
                     out: list[tuple[str, bool]]) -> None:
    """Collect (referenced name, occurrence is guarded) pairs."""
    if isinstance(ast, Ref):
        out.append((ast.name, guarded))
    elif isinstance(ast, Prefix):
        while isinstance(ast.cont, Prefix):  # event chains can be long
            ast = ast.cont
        _reference_edges(ast.cont, True, out)
    elif isinstance(ast, IntChoice):
        _reference_edges(ast.left, True, out)
        _reference_edges(ast.right, True, out)
    elif isinstance(ast, ExtChoice):
        _reference_edges(ast.left, guarded, out)
        _reference_edges(ast.right, guarded, out)
    elif isinstance(ast, (Fmap, AddTick)):
        _reference_edges(ast.operand, guarded, out)
    elif isinstance(ast, Bind):
        _reference_edges(ast.scrutinee, guarded, out)
        for _, body in ast.branches:
            _reference_edges(body, True, out)


def _check_guardedness(env: Env, diags: list[Diagnostic]) -> None:
    # A cycle is admissible iff at least one of its edges is guarded, so the
    # subgraph of unguarded edges must be acyclic.
    unguarded: dict[str, set[str]] = {name: set() for name in env.defs}
    for name, d in env.defs.items():
        edges: list[tuple[str, bool]] = []
        _reference_edges(d.body, False, edges)
        for target, is_guarded in edges:
            if not is_guarded and target in env.defs:
                unguarded[name].add(target)

    WHITE, GREY, BLACK = 0, 1, 2
    colour = {name: WHITE for name in env.defs}

    def visit(name: str, path: list[str]) -> list[str] | None:
        colour[name] = GREY
        path.append(name)
        for target in sorted(unguarded[name]):
            if colour[target] == GREY:
                return path[path.index(target):] + [target]
            if colour[target] == WHITE:
                cycle = visit(target, path)
                if cycle:
                    return cycle
        path.pop()
        colour[name] = BLACK
        return None

    for name in env.defs:
        if colour[name] == WHITE:
            cycle = visit(name, [])
            if cycle:
                pos = env.defs[cycle[0]].pos
                diags.append(Diagnostic(
                    "unguarded",
                    "recursion is not guarded by any event, silent step, or "
                    "bind branch: " + " -> ".join(cycle),
                    cycle[0], pos[0], pos[1],
                ))
                return


def check_env(env: Env) -> list[Diagnostic]:
    """All diagnostics for an Env; empty means well-typed and guarded."""
    checker = _Checker(env)
    for name, d in env.defs.items():
        checker.check(d.body, d.annotation, name)
    _check_guardedness(env, checker.diags)
    return checker.diags
