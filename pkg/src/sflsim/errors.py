"""Diagnostic exception classes shared by the engine and the CLI."""

from __future__ import annotations


class SflError(Exception):
    """Base class for every user-facing simulation diagnostic."""

    category = "error"


class SflSyntaxError(SflError, ValueError):
    """Malformed SFL expression; `column` is 0-based within the source text."""

    category = "parse"

    def __init__(self, message: str, source: str = "", column: int | None = None) -> None:
        self.source = source
        self.column = column
        detail = message
        if column is not None:
            detail = f"{message} at column {column}"
        if source:
            detail = f"{detail} in {source!r}"
        super().__init__(detail)


class CaseFileError(SflError, ValueError):
    """Case file is not valid YAML or does not follow the case schema."""

    category = "parse"


class CaseAssemblyError(SflError, ValueError):
    """Symbols, equations or particles cannot be assembled into a case."""

    category = "assembly"


class TensorShapeError(SflError, ValueError):
    """Operands of an operator or equation have incompatible shapes."""

    category = "runtime"


class EvaluationError(SflError, ValueError):
    """An expression cannot be evaluated with the current particle state."""

    category = "runtime"


class NonFiniteValueError(SflError, ArithmeticError):
    """An equation produced NaN or infinity for some particle."""

    category = "runtime"

    def __init__(self, equation: str, particle: int, time: float | None = None) -> None:
        self.equation = equation
        self.particle = particle
        self.time = time
        where = f" at t={time!r}" if time is not None else ""
        super().__init__(f"equation '{equation}' produced a non-finite value for particle {particle}{where}")


class ResultFileError(SflError, OSError):
    """Points or result files cannot be read or written."""

    category = "io"
