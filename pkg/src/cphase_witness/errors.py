"""Exception hierarchy and exit-code categorization for cphase-witness."""

from __future__ import annotations

from typing import Any

from .models import ExitCode


class WitnessError(Exception):
    """Base exception for all cphase-witness errors."""


class DomainError(WitnessError):
    """A string or state was used on the wrong qubit domain."""


class ShapeError(WitnessError):
    """Amplitude vector or coefficient array has the wrong shape."""


class NormalizationError(WitnessError):
    """A state is not unit-norm within tolerance."""

    def __init__(self, norm_sq: float, tolerance: float) -> None:
        super().__init__(
            f"squared norm {norm_sq:.12g} deviates from 1 by more than {tolerance:g}"
        )
        self.norm_sq = norm_sq
        self.tolerance = tolerance


class InvalidPhaseError(WitnessError):
    """The gate phase is (numerically) the identity."""


class NotSeparableError(WitnessError):
    """A factorization was requested across a split with Schmidt rank > 1."""

    def __init__(self, message: str, singular_values: list[float]) -> None:
        super().__init__(message)
        self.singular_values = singular_values


class ArgumentError(WitnessError):
    """Arguments violate an operation's precondition."""


class DegenerateFamilyError(WitnessError):
    """A generated state family left no support after zeroing."""


class InternalContradictionError(WitnessError):
    """A step that the theorem guarantees could not be carried out.

    Carries a diagnostics bundle for forensic analysis; this signals a
    tolerance or numerics problem, not a disproof.
    """

    def __init__(self, message: str, diagnostics: dict[str, Any]) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


class StateFileError(WitnessError):
    """A state file is malformed."""

    def __init__(self, message: str, line_no: int | None = None) -> None:
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}")
        self.line_no = line_no


class StateFileAccessError(WitnessError):
    """A state file could not be read or written."""


def categorize_error(exc: BaseException) -> ExitCode:
    """Map an exception to the CLI exit-code contract.

    Internal contradictions are 2, file access problems 66, argument errors 64,
    and every other library error is a data error (65).
    """
    if isinstance(exc, InternalContradictionError):
        return ExitCode.CONTRADICTION
    if isinstance(exc, (StateFileAccessError, OSError)):
        return ExitCode.FILE
    if isinstance(exc, ArgumentError):
        return ExitCode.USAGE
    return ExitCode.DATA
