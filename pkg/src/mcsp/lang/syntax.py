"""Abstract syntax of the process DSL, plus the pretty-printer.

Surface forms mirror the kernel operators one to one. ``Term`` is internal
only: it denotes an already-terminated process, appears as a state label
during transition-system exploration, and has no surface syntax.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mcsp.choice import Choice, ChoiceElem, render_choice, render_value


@dataclass(frozen=True)
class Ast:
    """Base class for process expressions."""


@dataclass(frozen=True)
class Stop(Ast):
    pass


@dataclass(frozen=True)
class Skip(Ast):
    value: ChoiceElem


@dataclass(frozen=True)
class Prefix(Ast):
    label: str
    cont: Ast


@dataclass(frozen=True)
class ExtChoice(Ast):
    left: Ast
    right: Ast


@dataclass(frozen=True)
class IntChoice(Ast):
    left: Ast
    right: Ast


@dataclass(frozen=True)
class Bind(Ast):
    scrutinee: Ast
    branches: tuple[tuple[ChoiceElem, Ast], ...]
    # Scrutinee choice threaded by the explorer when it rewrites the
    # scrutinee into a non-inferable form; ignored for equality.
    scrut_choice: Choice | None = field(default=None, compare=False)


FMAP_FNS = ("id", "inl", "inr", "swap")


@dataclass(frozen=True)
class Fmap(Ast):
    fn: str
    operand: Ast

    def __post_init__(self):
        if self.fn not in FMAP_FNS:
            raise ValueError(f"unknown fmap function {self.fn!r}")


@dataclass(frozen=True)
class AddTick(Ast):
    value: ChoiceElem
    operand: Ast


@dataclass(frozen=True)
class Ref(Ast):
    name: str


@dataclass(frozen=True)
class Term(Ast):
    """Internal: a terminated process with its return value."""

    value: ChoiceElem


@dataclass(frozen=True)
class Definition:
    name: str
    annotation: Choice
    body: Ast
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass
class Env:
    """Ordered named definitions; the unit of parsing and checking."""

    defs: dict[str, Definition]

    def __getitem__(self, name: str) -> Definition:
        return self.defs[name]

    def __contains__(self, name: str) -> bool:
        return name in self.defs

    def names(self) -> list[str]:
        return list(self.defs.keys())

    def __eq__(self, other):
        return isinstance(other, Env) and self.defs == other.defs


# --------------------------------------------------------------------------
# Pretty-printing
#
# Binding strength, loosest to tightest: >>= , |~| , [] , -> , fmap/addTick,
# atoms. Binary operators are right-associative; parentheses are emitted
# only where re-parsing would otherwise change the tree.

_BIND, _INT, _EXT, _PREFIX, _UNARY, _ATOM = range(6)


def pretty_ast(ast: Ast, level: int = _BIND) -> str:
    text, mine = _pp(ast)
    if mine < level:
        return f"({text})"
    return text


def _pp(ast: Ast) -> tuple[str, int]:
    if isinstance(ast, Stop):
        return "STOP", _ATOM
    if isinstance(ast, Skip):
        return f"SKIP {render_value(ast.value)}", _ATOM
    if isinstance(ast, Ref):
        return ast.name, _ATOM
    if isinstance(ast, Term):
        return f"<terminated {render_value(ast.value)}>", _ATOM
    if isinstance(ast, Prefix):
        labels = []
        while isinstance(ast, Prefix):  # event chains can be long
            labels.append(ast.label)
            ast = ast.cont
        chain = " -> ".join(labels)
        return f"{chain} -> {pretty_ast(ast, _PREFIX)}", _PREFIX
    if isinstance(ast, ExtChoice):
        left = pretty_ast(ast.left, _PREFIX)
        right = pretty_ast(ast.right, _EXT)
        return f"{left} [] {right}", _EXT
    if isinstance(ast, IntChoice):
        left = pretty_ast(ast.left, _EXT)
        right = pretty_ast(ast.right, _INT)
        return f"{left} |~| {right}", _INT
    if isinstance(ast, Fmap):
        return f"fmap {ast.fn} {pretty_ast(ast.operand, _UNARY)}", _UNARY
    if isinstance(ast, AddTick):
        value = render_value(ast.value)
        return f"addTick {value} {pretty_ast(ast.operand, _UNARY)}", _UNARY
    if isinstance(ast, Bind):
        scrut = pretty_ast(ast.scrutinee, _INT)
        branches = "; ".join(
            f"{render_value(pat)} -> {pretty_ast(body)}"
            for pat, body in ast.branches
        )
        return f"{scrut} >>= {{{branches}}}", _BIND
    raise TypeError(f"not an Ast: {ast!r}")


def pretty_env(env: Env) -> str:
    lines = [
        f"{d.name} : {render_choice(d.annotation)} = {pretty_ast(d.body)}"
        for d in env.defs.values()
    ]
    return "\n".join(lines) + "\n"
