"""Exception hierarchy for the safety-case engine.

Every exception carries a stable machine-readable ``code`` so that the CLI
and the HTTP service can surface failures uniformly.  Codes are documented
in ``docs/codes.md``.
"""

from __future__ import annotations


class ScaseError(Exception):
    """Base class for all engine errors."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class ParseError(ScaseError):
    """Syntactic or semantic error in a ``.scase``/``.schal``/``.smatrix`` file.

    ``line`` and ``column`` are 1-based and point at the first offending byte.
    """

    def __init__(self, code: str, message: str, line: int, column: int):
        super().__init__(code, message)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: [{self.code}] {self.message}"


class GraphError(ScaseError):
    """Structural violation detected while operating on a safety-case graph."""


class EvaluationError(ScaseError):
    """Probability aggregation could not run on the given case and overrides."""


class ModelError(ScaseError):
    """Invalid parameters or degenerate configuration of a risk model."""


class MatrixError(ScaseError):
    """Lookup failure against a risk matrix."""


class LintError(ScaseError):
    """Lint inputs do not resolve (unknown template ids, dangling targets...)."""
