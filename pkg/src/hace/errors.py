"""Typed errors shared across the engine."""

from __future__ import annotations


class HaceError(Exception):
    """Base class for every error this package raises on purpose."""


class SizeCapExceeded(HaceError):
    """A set, table, or search space would exceed the configured cap."""

    def __init__(self, operation: str, size: int, cap: int):
        self.operation = operation
        self.size = size
        self.cap = cap
        super().__init__(f"{operation}: would materialize {size} > cap {cap}")


class MissingIdentity(HaceError):
    """An object of a category table has no identity morphism."""


class NonAssociative(HaceError):
    """A composition table violates associativity."""


class IllTypedComposite(HaceError):
    """A composite is declared between non-composable morphisms, or missing."""


class DanglingId(HaceError):
    """A morphism/object/element id is referenced but never declared."""


class CyclicGraph(HaceError):
    """A free category was requested on a graph with a directed cycle."""


class NotAPoset(HaceError):
    """An order relation fails antisymmetry."""


class NotAMonoid(HaceError):
    """A multiplication table fails unit or associativity laws."""


class NotALattice(HaceError):
    """A poset lacks the meets/joins (or top/bottom) an operation needs."""


class NotStrictMonoidal(HaceError):
    """Tensor data fails strict associativity/unit or functoriality."""


class InterchangeFailure(HaceError):
    """Per-slot actions do not commute, so no multivariant functor exists."""


class NonFunctorialSlot(HaceError):
    """A single slot's action table breaks identities or composition."""


class ShapeMismatch(HaceError):
    """Arities, variance signatures, or index shapes do not line up."""


class MethodUnavailable(HaceError):
    """An unknown computation method name was requested."""


class AnchorNotUnique(HaceError):
    """The square-category embedding needs singleton anchor hom-sets."""


class GenerationExhausted(HaceError):
    """The instance generator ran out of retry budget for a profile."""


class ParseError(HaceError):
    """A .cat text failed to parse; carries position and expectation."""

    def __init__(self, line: int, col: int, expected: str, got: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        self.got = got
        msg = f"line {line}, col {col}: expected {expected}"
        if got:
            msg += f", got {got!r}"
        super().__init__(msg)
