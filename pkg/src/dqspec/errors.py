"""Error types shared across the spec language front-end."""

from __future__ import annotations


class SpecError(ValueError):
    """Problem in a quality specification (syntax or semantics)."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            super().__init__(f"line {line}, col {col}: {message}")
        else:
            super().__init__(message)


class SpecSyntaxError(SpecError):
    pass


class SpecSemanticError(SpecError):
    pass
