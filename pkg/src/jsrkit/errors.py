"""Exception types shared across the package.

Every error raised on bad user input derives from InputError, every error
raised when a computation refuses to proceed (guards, overflow, missing
exactness) derives from ComputeError.  The CLI maps the two branches to
distinct exit codes.
"""

from __future__ import annotations


class JsrkitError(Exception):
    """Base class for all package errors."""


class InputError(JsrkitError):
    """Invalid user-supplied data (matrices, files, parameters)."""


class NegativeEntry(InputError):
    def __init__(self, matrix: int, row: int, col: int, value: float):
        self.matrix = matrix
        self.row = row
        self.col = col
        self.value = value
        super().__init__(
            f"matrix {matrix} entry ({row},{col}) is negative: {value!r}"
        )


class NonFiniteEntry(InputError):
    def __init__(self, matrix: int, row: int, col: int, value: float):
        self.matrix = matrix
        self.row = row
        self.col = col
        self.value = value
        super().__init__(
            f"matrix {matrix} entry ({row},{col}) is not finite: {value!r}"
        )


class ShapeMismatch(InputError):
    pass


class MalformedInput(InputError):
    pass


class EmptySet(InputError):
    pass


class ComputeError(JsrkitError):
    """A computation refused to run (guard tripped, overflow, inexact data)."""


class GuardExceeded(ComputeError):
    """Enumeration size would exceed the safety guard."""

    def __init__(self, requested: int, limit: int, what: str = "products"):
        self.requested = requested
        self.limit = limit
        super().__init__(
            f"refusing to enumerate {requested} {what} (guard is {limit})"
        )


class PeriodOverflow(ComputeError):
    """The lcm of vertex periods does not fit in a signed 64-bit integer."""


class RequiresExact(ComputeError):
    """An upper bound was requested at a length where pruning lost exactness."""

    def __init__(self, k: int):
        self.k = k
        super().__init__(
            f"norm at length {k} is a lower estimate only (frontier was capped); "
            "certified upper bounds need exact norms"
        )


class NotSupermultiplicative(JsrkitError):
    """Witness pair (m, n) with a[m+n] < a[m] * a[n]."""

    def __init__(self, m: int, n: int, lhs: float, rhs: float):
        self.m = m
        self.n = n
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"a[{m + n}] = {lhs!r} < a[{m}] * a[{n}] = {rhs!r}"
        )


class InvariantViolation(JsrkitError):
    """An internal cross-check failed; indicates a bug, not bad input."""
