"""Recursive-descent parser for the process DSL.

Grammar (precedence loosest to tightest: >>=, |~|, [], ->, fmap/addTick):

    file   := def+
    def    := NAME ":" choice "=" proc
    choice := atom-choice ("+" choice)?
    atom-choice := "Empty" | "Unit" | "Bool" | "Fin" NAT
                 | "{" NAME ("," NAME)* "}" | "(" choice ")"
    proc   := proc ">>=" "{" branch (";" branch)* "}"   (postfix, loosest)
            | proc "|~|" proc | proc "[]" proc | NAME "->" proc
            | "fmap" fn proc | "addTick" value proc
            | "STOP" | "SKIP" value | NAME | "(" proc ")"
    branch := value "->" proc
    value  := "inl" value | "inr" value | "tt" | "true" | "false" | NAT | NAME
    fn     := "id" | "inl" | "inr" | "swap"

Comments run from "--" to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from mcsp.choice import (
    BOOL,
    EMPTY,
    UNIT,
    Atom,
    BoolElem,
    Choice,
    ChoiceElem,
    Fin,
    FinElem,
    InL,
    InR,
    Union,
    UnitElem,
    named,
)
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

RESERVED = frozenset({
    "STOP", "SKIP", "fmap", "addTick", "id", "inl", "inr", "swap",
    "tt", "true", "false", "Empty", "Unit", "Bool", "Fin",
})

# Deeply nested expression values break structural equality and hashing well
# before they stop being useful; reject them early with a real diagnostic.
MAX_NESTING = 400


def _ast_depth(root: Ast) -> int:
    deepest = 0
    stack: list[tuple[Ast, int]] = [(root, 1)]
    while stack:
        node, depth = stack.pop()
        deepest = max(deepest, depth)
        if isinstance(node, Prefix):
            stack.append((node.cont, depth + 1))
        elif isinstance(node, (ExtChoice, IntChoice)):
            stack.append((node.left, depth + 1))
            stack.append((node.right, depth + 1))
        elif isinstance(node, (Fmap, AddTick)):
            stack.append((node.operand, depth + 1))
        elif isinstance(node, Bind):
            stack.append((node.scrutinee, depth + 1))
            for _, body in node.branches:
                stack.append((body, depth + 1))
    return deepest

_PUNCT = ("->", "[]", "|~|", ">>=", ":", "=", "{", "}", "(", ")", ";", ",", "+")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NAT_RE = re.compile(r"[0-9]+")


class CspSyntaxError(Exception):
    """Parse failure with position; kind distinguishes duplicate names."""

    def __init__(self, message: str, line: int, col: int, kind: str = "syntax"):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.kind = kind


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "nat" | "punct" | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            m = _NAME_RE.match(text, i)
            if m:
                tokens.append(Token("name", m.group(), line, col))
                col += len(m.group())
                i = m.end()
                continue
            m = _NAT_RE.match(text, i)
            if m:
                tokens.append(Token("nat", m.group(), line, col))
                col += len(m.group())
                i = m.end()
                continue
            raise CspSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> None:
        tok = tok or self.peek()
        raise CspSyntaxError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def name(self, what: str) -> Token:
        tok = self.next()
        if tok.kind != "name":
            self.fail(f"expected {what}, found {tok.text or 'end of input'!r}", tok)
        if tok.text in RESERVED:
            self.fail(f"{tok.text!r} is reserved and cannot be used as {what}", tok)
        return tok

    # -- grammar ------------------------------------------------------------

    def parse_file(self) -> Env:
        defs: dict[str, Definition] = {}
        while self.peek().kind != "eof":
            d = self.parse_def()
            if d.name in defs:
                raise CspSyntaxError(
                    f"duplicate definition of {d.name!r}",
                    d.pos[0], d.pos[1], kind="duplicate-definition",
                )
            defs[d.name] = d
        if not defs:
            self.fail("expected at least one definition")
        return Env(defs)

    def parse_def(self) -> Definition:
        tok = self.name("a definition name")
        self.expect(":")
        annotation = self.parse_choice()
        self.expect("=")
        body = self.parse_proc()
        if _ast_depth(body) > MAX_NESTING:
            raise CspSyntaxError(
                f"definition {tok.text!r} nests deeper than {MAX_NESTING}; "
                "split it into named definitions",
                tok.line, tok.col,
            )
        return Definition(tok.text, annotation, body, pos=(tok.line, tok.col))

    def parse_choice(self) -> Choice:
        left = self.parse_choice_atom()
        if self.at("+"):
            self.next()
            return Union(left, self.parse_choice())
        return left

    def parse_choice_atom(self) -> Choice:
        tok = self.peek()
        if tok.text == "Empty":
            self.next()
            return EMPTY
        if tok.text == "Unit":
            self.next()
            return UNIT
        if tok.text == "Bool":
            self.next()
            return BOOL
        if tok.text == "Fin":
            self.next()
            nat = self.next()
            if nat.kind != "nat":
                self.fail("expected a size after Fin", nat)
            size = int(nat.text)
            if size < 1:
                self.fail("Fin size must be positive", nat)
            return Fin(size)
        if tok.text == "{":
            self.next()
            atoms = [self.name("an atom").text]
            while self.at(","):
                self.next()
                atoms.append(self.name("an atom").text)
            close = self.expect("}")
            if len(set(atoms)) != len(atoms):
                self.fail("duplicate atom in choice literal", close)
            return named(*atoms)
        if tok.text == "(":
            self.next()
            c = self.parse_choice()
            self.expect(")")
            return c
        self.fail(f"expected a choice, found {tok.text or 'end of input'!r}", tok)

    def parse_proc(self) -> Ast:
        return self.parse_bind_level()

    def parse_bind_level(self) -> Ast:
        node = self.parse_int_level()
        while self.at(">>="):
            self.next()
            self.expect("{")
            branches = [self.parse_branch()]
            while self.at(";"):
                self.next()
                branches.append(self.parse_branch())
            self.expect("}")
            node = Bind(node, tuple(branches))
        return node

    def parse_branch(self) -> tuple[ChoiceElem, Ast]:
        pattern = self.parse_value()
        self.expect("->")
        return (pattern, self.parse_proc())

    def parse_int_level(self) -> Ast:
        left = self.parse_ext_level()
        if self.at("|~|"):
            self.next()
            return IntChoice(left, self.parse_int_level())
        return left

    def parse_ext_level(self) -> Ast:
        left = self.parse_prefix_level()
        if self.at("[]"):
            self.next()
            return ExtChoice(left, self.parse_ext_level())
        return left

    def parse_prefix_level(self) -> Ast:
        # iterative on purpose: event chains can be long
        labels: list[str] = []
        while True:
            tok = self.peek()
            if (tok.kind == "name" and tok.text not in RESERVED
                    and self.peek(1).text == "->"):
                self.next()
                self.next()
                labels.append(tok.text)
            else:
                break
        node = self.parse_unary()
        for label in reversed(labels):
            node = Prefix(label, node)
        return node

    def parse_unary(self) -> Ast:
        if self.at("fmap"):
            self.next()
            fn = self.next()
            if fn.text not in ("id", "inl", "inr", "swap"):
                self.fail("expected one of id, inl, inr, swap", fn)
            return Fmap(fn.text, self.parse_unary())
        if self.at("addTick"):
            self.next()
            value = self.parse_value()
            return AddTick(value, self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Ast:
        tok = self.peek()
        if tok.text == "STOP":
            self.next()
            return Stop()
        if tok.text == "SKIP":
            self.next()
            return Skip(self.parse_value())
        if tok.text == "(":
            self.next()
            node = self.parse_proc()
            self.expect(")")
            return node
        if tok.kind == "name" and tok.text not in RESERVED:
            self.next()
            return Ref(tok.text)
        self.fail(f"expected a process, found {tok.text or 'end of input'!r}", tok)

    def parse_value(self) -> ChoiceElem:
        tok = self.next()
        if tok.text == "inl":
            return InL(self.parse_value())
        if tok.text == "inr":
            return InR(self.parse_value())
        if tok.text == "tt":
            return UnitElem()
        if tok.text == "true":
            return BoolElem(True)
        if tok.text == "false":
            return BoolElem(False)
        if tok.kind == "nat":
            return FinElem(int(tok.text))
        if tok.kind == "name" and tok.text not in RESERVED:
            return Atom(tok.text)
        self.fail(f"expected a value, found {tok.text or 'end of input'!r}", tok)


def parse(text: str) -> Env:
    """Parse a DSL source file into an Env; raises CspSyntaxError."""
    return _Parser(text).parse_file()


def parse_proc(text: str) -> Ast:
    """Parse a single process expression (convenience for tests/tools)."""
    p = _Parser(text)
    node = p.parse_proc()
    if p.peek().kind != "eof":
        p.fail("trailing input after process expression")
    return node
