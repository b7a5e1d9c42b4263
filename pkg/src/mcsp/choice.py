"""Finite choice universe shared by process indices and return values.

A ``Choice`` is a code for a finite set. Codes cover the empty set, the
one- and two-element sets, initial segments of the naturals, named atom
sets, and are closed under disjoint union. Every code supports enumeration
in a fixed canonical order, decidable element equality, and an injective
string rendering; reproducible set-valued output everywhere else in the
engine (trace sets, counterexamples, the simulator) leans on those three.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class ChoiceTypeError(TypeError):
    """An element was used at a Choice it does not inhabit."""


# --------------------------------------------------------------------------
# Codes

@dataclass(frozen=True)
class Choice:
    """Base class for set codes. Concrete codes are the subclasses below."""


@dataclass(frozen=True)
class Empty(Choice):
    pass


@dataclass(frozen=True)
class Unit(Choice):
    pass


@dataclass(frozen=True)
class Bool(Choice):
    pass


@dataclass(frozen=True)
class Fin(Choice):
    """The set {0, .., size-1}; size must be positive."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"Fin size must be positive, got {self.size}")


@dataclass(frozen=True)
class Union(Choice):
    """Disjoint union; elements are tagged InL/InR."""

    left: Choice
    right: Choice


@dataclass(frozen=True)
class Named(Choice):
    """A named set of distinct atoms, enumerated in declaration order."""

    name: str
    atoms: tuple[str, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("Named choice needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError(f"Named choice has duplicate atoms: {self.atoms}")


EMPTY = Empty()
UNIT = Unit()
BOOL = Bool()


def named(*atoms: str, name: str | None = None) -> Named:
    """Named set whose display name defaults to the atom-set literal."""
    atoms = tuple(atoms)
    return Named(name if name is not None else "{" + ", ".join(atoms) + "}", atoms)


# --------------------------------------------------------------------------
# Elements

@dataclass(frozen=True)
class ChoiceElem:
    """Base class for elements of a Choice."""


@dataclass(frozen=True)
class UnitElem(ChoiceElem):
    pass


@dataclass(frozen=True)
class BoolElem(ChoiceElem):
    value: bool


@dataclass(frozen=True)
class FinElem(ChoiceElem):
    index: int


@dataclass(frozen=True)
class InL(ChoiceElem):
    value: ChoiceElem


@dataclass(frozen=True)
class InR(ChoiceElem):
    value: ChoiceElem


@dataclass(frozen=True)
class Atom(ChoiceElem):
    name: str


# --------------------------------------------------------------------------
# Operations

def cardinality(c: Choice) -> int:
    if isinstance(c, Empty):
        return 0
    if isinstance(c, Unit):
        return 1
    if isinstance(c, Bool):
        return 2
    if isinstance(c, Fin):
        return c.size
    if isinstance(c, Union):
        return cardinality(c.left) + cardinality(c.right)
    if isinstance(c, Named):
        return len(c.atoms)
    raise TypeError(f"not a Choice: {c!r}")


@lru_cache(maxsize=None)
def elements(c: Choice) -> tuple[ChoiceElem, ...]:
    """All elements of c in canonical order.

    Order: false before true; ascending Fin index; left block before right
    block for unions; declaration order for named sets.
    """
    if isinstance(c, Empty):
        return ()
    if isinstance(c, Unit):
        return (UnitElem(),)
    if isinstance(c, Bool):
        return (BoolElem(False), BoolElem(True))
    if isinstance(c, Fin):
        return tuple(FinElem(i) for i in range(c.size))
    if isinstance(c, Union):
        return tuple(InL(x) for x in elements(c.left)) + tuple(
            InR(x) for x in elements(c.right)
        )
    if isinstance(c, Named):
        return tuple(Atom(a) for a in c.atoms)
    raise TypeError(f"not a Choice: {c!r}")


def inhabits(c: Choice, x: ChoiceElem) -> bool:
    if isinstance(c, Empty):
        return False
    if isinstance(c, Unit):
        return isinstance(x, UnitElem)
    if isinstance(c, Bool):
        return isinstance(x, BoolElem)
    if isinstance(c, Fin):
        return isinstance(x, FinElem) and 0 <= x.index < c.size
    if isinstance(c, Union):
        if isinstance(x, InL):
            return inhabits(c.left, x.value)
        if isinstance(x, InR):
            return inhabits(c.right, x.value)
        return False
    if isinstance(c, Named):
        return isinstance(x, Atom) and x.name in c.atoms
    raise TypeError(f"not a Choice: {c!r}")


def require_inhabits(c: Choice, x: ChoiceElem, what: str = "element") -> None:
    if not inhabits(c, x):
        raise ChoiceTypeError(
            f"{what} {render_value(x)} does not inhabit {render_choice(c)}"
        )


def eq_elem(c: Choice, x: ChoiceElem, y: ChoiceElem) -> bool:
    """Decidable equality of two elements of c; rejects foreign elements."""
    require_inhabits(c, x)
    require_inhabits(c, y)
    return x == y


def element_index(c: Choice, x: ChoiceElem) -> int:
    """Position of x in the canonical enumeration of c."""
    require_inhabits(c, x)
    return elements(c).index(x)


def render_value(x: ChoiceElem) -> str:
    """Structural rendering; coincides with the DSL value-literal syntax."""
    if isinstance(x, UnitElem):
        return "tt"
    if isinstance(x, BoolElem):
        return "true" if x.value else "false"
    if isinstance(x, FinElem):
        return str(x.index)
    if isinstance(x, InL):
        return f"inl {render_value(x.value)}"
    if isinstance(x, InR):
        return f"inr {render_value(x.value)}"
    if isinstance(x, Atom):
        return x.name
    raise TypeError(f"not a ChoiceElem: {x!r}")


def render_elem(c: Choice, x: ChoiceElem) -> str:
    """Rendering of an element of c; injective on elements(c)."""
    require_inhabits(c, x)
    return render_value(x)


def render_choice(c: Choice) -> str:
    if isinstance(c, Empty):
        return "Empty"
    if isinstance(c, Unit):
        return "Unit"
    if isinstance(c, Bool):
        return "Bool"
    if isinstance(c, Fin):
        return f"Fin {c.size}"
    if isinstance(c, Union):
        # + is right-associative in the DSL, so only the left side may need parens
        left = render_choice(c.left)
        if isinstance(c.left, Union):
            left = f"({left})"
        return f"{left} + {render_choice(c.right)}"
    if isinstance(c, Named):
        return "{" + ", ".join(c.atoms) + "}"
    raise TypeError(f"not a Choice: {c!r}")


def swap_union(x: ChoiceElem) -> ChoiceElem:
    """Swap the injection tags of a disjoint-union element (an involution)."""
    if isinstance(x, InL):
        return InR(x.value)
    if isinstance(x, InR):
        return InL(x.value)
    raise ChoiceTypeError(f"not a union element: {render_value(x)}")
