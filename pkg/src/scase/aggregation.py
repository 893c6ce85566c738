"""Propagates claim-validity probabilities from evidence leaves to the root.

Two-variable rules
------------------

Vertical (conjunctive) composition:   P(A and B) = P(A|B) * P(B)
Horizontal (disjunctive) composition: P(A or B)  = 1 - [1 - P(A|not B)] * [1 - P(B)]

n-ary combination is an ordered left fold of these rules over a node's
support children.  Each child after the first contributes its declared
``cond-p`` (its probability conditional on the preceding fold state) when
present, and its unconditional validity otherwise -- i.e. independence is
the default and conditionals are opt-in.  At two children with no ``cond-p``
this reduces exactly to the formulas above.

Resolution order for one node's validity:

1. an evaluation-time override, if present;
2. 0 if the node is invalidated (revocation stays visible as risk);
3. its declared ``p`` for childless nodes, else the fold over children.

Context / assumption / justification annotations contribute no factor while
active.  An *invalidated* (or overridden) annotation gates every node it
annotates: the anchor's validity is multiplied by the annotation's resolved
value (1 while active, 0 once invalidated), so revoking an assumption shows
up as risk in everything that rested on it.  A declared ``p`` on an
annotation is display-only and never aggregated.

Caveat: the fold treats children as independent unless ``cond-p`` says
otherwise.  Children that share support sub-structure are not independent;
supply ``cond-p`` on the later child to model that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import EvaluationError, GraphError
from .model import (
    ANNOTATION_KINDS,
    FindingSeverity,
    GsnNode,
    Mode,
    NodeKind,
    NodeStatus,
    SafetyCase,
    ValidationFinding,
    topological_order,
    validate_graph,
)


def check_probability(value: float, what: str = "probability") -> float:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{what} {value} is outside [0, 1]")
    return float(value)


def conjoin(p_b: float, p_a_given_b: float) -> float:
    """P(A and B) from P(B) and P(A|B)."""
    check_probability(p_b, "p_b")
    check_probability(p_a_given_b, "p_a_given_b")
    return p_a_given_b * p_b


def disjoin(p_b: float, p_a_given_not_b: float) -> float:
    """P(A or B) from P(B) and P(A|not B)."""
    check_probability(p_b, "p_b")
    check_probability(p_a_given_not_b, "p_a_given_not_b")
    return 1.0 - (1.0 - p_a_given_not_b) * (1.0 - p_b)


class Verdict:
    PASS = "pass"
    FAIL = "fail"


def risk_within(risk: float, threshold: float) -> bool:
    """Non-strict comparison of a computed risk against a decimal threshold.

    Both sides are doubles rounded from decimal inputs (1 - 0.999 lands a
    hair above 0.001), so equality is taken at 1e-12 relative precision --
    far below any policy-meaningful difference.
    """
    return risk <= threshold or math.isclose(risk, threshold, rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True)
class OutcomeRisk:
    """Risk of one severity-tagged goal measured against the case threshold."""

    severity: str
    risk: float
    threshold: Optional[float]
    verdict: str


@dataclass(frozen=True)
class RiskEstimate:
    node_validity: dict[str, float]
    root_validity: float
    overall_risk: float
    outcome_risks: dict[str, OutcomeRisk]
    findings: list[ValidationFinding] = field(default_factory=list)


def _require_valid(case: SafetyCase) -> list[ValidationFinding]:
    findings = validate_graph(case)
    errors = [f for f in findings if f.severity is FindingSeverity.ERROR]
    if errors:
        raise GraphError(
            "INVALID_CASE",
            f"case has {len(errors)} validation error(s); first: {errors[0].code}: {errors[0].message}",
        )
    return findings


def _check_overrides(case: SafetyCase, overrides: Mapping[str, float]) -> dict[str, float]:
    clean: dict[str, float] = {}
    for nid in sorted(overrides):
        if nid not in case.nodes:
            raise EvaluationError("UNKNOWN_OVERRIDE", f"override names unknown node {nid!r}")
        value = float(overrides[nid])
        if not (0.0 <= value <= 1.0):
            raise EvaluationError("OVERRIDE_RANGE", f"override for {nid} is outside [0, 1]: {value}")
        clean[nid] = value
    return clean


def _annotation_gate(node: GsnNode, overrides: Mapping[str, float]) -> float:
    if node.id in overrides:
        return overrides[node.id]
    if node.status is NodeStatus.INVALIDATED:
        return 0.0
    return 1.0


def evaluate_case(case: SafetyCase, overrides: Optional[Mapping[str, float]] = None) -> RiskEstimate:
    """Aggregate node probabilities into a root validity and per-outcome risks.

    Preconditions: the case validates with no errors, and every solution leaf
    and childless goal carries ``p`` or an override.  Raises GraphError
    (INVALID_CASE), EvaluationError (MISSING_PROBABILITY, UNKNOWN_OVERRIDE,
    OVERRIDE_RANGE).  Deterministic: identical inputs yield bit-identical
    estimates.
    """
    findings = list(_require_valid(case))
    overrides = _check_overrides(case, overrides or {})

    order = topological_order(case)
    children = {nid: case.support_children(nid) for nid in order}

    missing = [
        nid
        for nid in order
        if case.nodes[nid].kind not in ANNOTATION_KINDS
        and not children[nid]
        and case.nodes[nid].leaf_p is None
        and nid not in overrides
        and case.nodes[nid].status is not NodeStatus.INVALIDATED
    ]
    if missing:
        raise EvaluationError("MISSING_PROBABILITY", f"node {missing[0]} has no p and no override")

    validity: dict[str, float] = {}
    # Annotation gates depend only on status and overrides, never on other
    # nodes, so they can be resolved before the support fold runs.
    for nid in order:
        node = case.nodes[nid]
        if node.kind in ANNOTATION_KINDS:
            validity[nid] = _annotation_gate(node, overrides)
    for nid in reversed(order):
        node = case.nodes[nid]
        if node.kind in ANNOTATION_KINDS:
            continue
        if nid in overrides:
            validity[nid] = overrides[nid]
            continue
        if node.status is NodeStatus.INVALIDATED:
            validity[nid] = 0.0
            continue
        kids = children[nid]
        if not kids:
            value = node.leaf_p
        else:
            value = None
            for kid in kids:
                child = case.nodes[kid]
                if value is None:
                    value = validity[kid]
                    continue
                factor = child.cond_p if child.cond_p is not None else validity[kid]
                if node.mode is Mode.CONJUNCTIVE:
                    value = conjoin(value, factor)
                else:
                    value = disjoin(value, factor)
        for annotation in case.annotations(nid):
            value = value * validity[annotation]
        validity[nid] = value

    root_validity = validity[case.root]
    overall_risk = 1.0 - root_validity

    outcome_risks: dict[str, OutcomeRisk] = {}
    for nid in order:
        node = case.nodes[nid]
        if node.kind is not NodeKind.GOAL or node.severity is None:
            continue
        risk = 1.0 - validity[nid]
        threshold = case.thresholds.get(node.severity)
        if threshold is None:
            findings.append(
                ValidationFinding(
                    code="MISSING_THRESHOLD",
                    severity=FindingSeverity.ERROR,
                    node=nid,
                    message=f"severity {node.severity!r} has no acceptable-risk threshold",
                )
            )
            verdict = Verdict.FAIL
        else:
            verdict = Verdict.PASS if risk_within(risk, threshold) else Verdict.FAIL
        outcome_risks[nid] = OutcomeRisk(severity=node.severity, risk=risk, threshold=threshold, verdict=verdict)

    findings.sort(key=ValidationFinding.sort_key)
    return RiskEstimate(
        node_validity=validity,
        root_validity=root_validity,
        overall_risk=overall_risk,
        outcome_risks=outcome_risks,
        findings=findings,
    )


def sensitivity(
    case: SafetyCase,
    overrides: Optional[Mapping[str, float]],
    node: str,
    delta: float,
) -> tuple[float, float]:
    """Overall risk with one node's validity perturbed to v-delta and v+delta.

    The perturbed values are clamped to [0, 1]; all other inputs are held
    fixed.  Returns (risk at v-delta, risk at v+delta).
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    overrides = dict(overrides or {})
    if node not in case.nodes:
        raise EvaluationError("UNKNOWN_OVERRIDE", f"sensitivity target {node!r} is not in the case")
    baseline = evaluate_case(case, overrides)
    if node not in baseline.node_validity:
        raise EvaluationError("MISSING_PROBABILITY", f"node {node} has no validity to perturb")
    v = baseline.node_validity[node]
    lo = evaluate_case(case, {**overrides, node: max(0.0, v - delta)})
    hi = evaluate_case(case, {**overrides, node: min(1.0, v + delta)})
    return (lo.overall_risk, hi.overall_risk)
