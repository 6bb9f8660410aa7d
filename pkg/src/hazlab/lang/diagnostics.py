"""Diagnostic records shared by the lexer, parser and lowering pass."""

from __future__ import annotations

from dataclasses import dataclass, field

from hazlab.model import Severity


@dataclass(frozen=True)
class Span:
    """Source location: 1-based line and column plus character length."""

    line: int
    column: int
    length: int


EMPTY_SPAN = Span(1, 1, 0)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    span: Span
    path: str = "<input>"

    def __str__(self) -> str:
        return (f"{self.path}:{self.span.line}:{self.span.column}: "
                f"{self.severity.value} {self.code}: {self.message}")


def error(code: str, message: str, span: Span,
          path: str = "<input>") -> Diagnostic:
    return Diagnostic(code, Severity.ERROR, message, span, path)


def warning(code: str, message: str, span: Span,
            path: str = "<input>") -> Diagnostic:
    return Diagnostic(code, Severity.WARNING, message, span, path)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
