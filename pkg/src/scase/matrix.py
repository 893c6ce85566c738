"""Severity x likelihood adjudication against an aviation-style risk matrix.

A probability maps to the first likelihood level whose upper bound covers
it; the (severity, likelihood) cell then yields the verdict.  Acceptable
cells are closed under "less severe and less likely"; unacceptable cells are
closed under "more severe and more likely" -- so a valid grid can never call
a riskier situation more acceptable.  ``review`` sits between the two as the
deliberation zone.

The default matrix ships as package data (``data/default.smatrix``) with
decade-spaced bounds and a five-by-five grid, and can be dumped via the CLI.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from importlib import resources

from .casefile import CellVerdict, RiskMatrix, _VERDICT_RANK, parse_matrix
from .errors import MatrixError
from .model import FindingSeverity, ValidationFinding


@dataclass(frozen=True)
class Assessment:
    severity: str
    probability: float
    likelihood: str
    verdict: CellVerdict


def classify_likelihood(p: float, matrix: RiskMatrix) -> str:
    """Name of the first likelihood level whose upper bound is >= p.

    Boundary equality is taken at 1e-12 relative precision: probabilities
    computed as complements of decimal inputs land sub-ulp above decimal
    bounds (1 - 0.999 vs 0.001) and still belong to the boundary level.
    """
    if not (0.0 <= p <= 1.0):
        raise MatrixError("PROB_RANGE", f"probability {p} is outside [0, 1]")
    for name, bound in matrix.likelihood_levels:
        if p <= bound or math.isclose(p, bound, rel_tol=1e-12, abs_tol=0.0):
            return name
    # Unreachable for a valid matrix: the last bound is 1 by invariant.
    return matrix.likelihood_levels[-1][0]


def assess(p: float, severity: str, matrix: RiskMatrix) -> Assessment:
    """Adjudicate a probability at a severity level against the grid."""
    if severity not in matrix.severity_levels:
        raise MatrixError("UNKNOWN_SEVERITY", f"severity {severity!r} is not in the matrix")
    likelihood = classify_likelihood(p, matrix)
    return Assessment(
        severity=severity,
        probability=p,
        likelihood=likelihood,
        verdict=matrix.grid[(severity, likelihood)],
    )


def validate_matrix(matrix: RiskMatrix) -> list[ValidationFinding]:
    """Completeness, bound monotonicity, and acceptability monotonicity."""
    findings: list[ValidationFinding] = []

    def err(code: str, message: str):
        findings.append(
            ValidationFinding(code=code, severity=FindingSeverity.ERROR, node=None, message=message)
        )

    bounds = [b for _, b in matrix.likelihood_levels]
    for i in range(1, len(bounds)):
        if bounds[i] <= bounds[i - 1]:
            err("NONMONOTONE_BOUNDS", f"bound {bounds[i]} does not exceed {bounds[i - 1]}")
    if not bounds:
        err("INCOMPLETE_GRID", "matrix has no likelihood levels")
    elif bounds[-1] != 1.0:
        err("LAST_BOUND", f"last likelihood bound is {bounds[-1]}, not 1")
    if not matrix.severity_levels:
        err("INCOMPLETE_GRID", "matrix has no severity levels")

    names = matrix.likelihood_names()
    for sev in matrix.severity_levels:
        for lname in names:
            if (sev, lname) not in matrix.grid:
                err("INCOMPLETE_GRID", f"missing cell ({sev}, {lname})")

    # Verdict rank must not decrease along rising likelihood or severity.
    for si, sev in enumerate(matrix.severity_levels):
        for li, lname in enumerate(names):
            cell = matrix.grid.get((sev, lname))
            if cell is None:
                continue
            if li > 0:
                left = matrix.grid.get((sev, names[li - 1]))
                if left is not None and _VERDICT_RANK[cell] < _VERDICT_RANK[left]:
                    err("NONMONOTONE_GRID", f"({sev}, {lname}) is milder than ({sev}, {names[li - 1]})")
            if si > 0:
                above = matrix.grid.get((matrix.severity_levels[si - 1], lname))
                if above is not None and _VERDICT_RANK[cell] < _VERDICT_RANK[above]:
                    err(
                        "NONMONOTONE_GRID",
                        f"({sev}, {lname}) is milder than ({matrix.severity_levels[si - 1]}, {lname})",
                    )

    findings.sort(key=ValidationFinding.sort_key)
    return findings


def default_matrix() -> RiskMatrix:
    """The built-in five-by-five matrix shipped with the package."""
    text = resources.files("scase").joinpath("data/default.smatrix").read_text(encoding="utf-8")
    return parse_matrix(text)
