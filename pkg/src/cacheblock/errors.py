"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class CacheBlockError(Exception):
    """Base class for all package errors."""


class CapacityError(CacheBlockError):
    """A state would exceed the supported qubit count."""


class ConfigurationError(CacheBlockError):
    """Inconsistent chunk / space / tier configuration."""


class MalformedCircuitError(CacheBlockError):
    """Blocking markers are unbalanced or a section holds a non-local gate."""


class InfeasibleBlockingError(CacheBlockError):
    """A gate cannot fit inside one chunk."""


class UnsupportedGateError(CacheBlockError):
    """A gate has no OpenQASM spelling."""

    def __init__(self, index: int, message: str):
        super().__init__(f"gate {index}: {message}")
        self.index = index


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(CacheBlockError):
    """OpenQASM input rejected. ``kind`` is one of lex, syntax, semantic."""

    def __init__(self, span: SourceSpan, message: str, kind: str = "syntax"):
        super().__init__(f"line {span.line}, column {span.column}: {message}")
        self.span = span
        self.message = message
        self.kind = kind
