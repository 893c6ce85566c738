"""Versioned JSON document builders shared by the CLI and the HTTP service.

Both front ends call the same builders and the same encoder, so a risk
estimate serializes to identical numeric bytes whichever surface produced
it.  JSON Schemas for these documents ship under ``docs/schemas/``.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional

from .aggregation import RiskEstimate
from .casefile import ChallengeSet, RiskMatrix
from .catalog import ArgumentTemplate, LintFinding
from .matrix import Assessment
from .model import SafetyCase, ValidationFinding

SCHEMA_VERSION = 1


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _versioned(payload: dict) -> dict:
    payload["schema_version"] = SCHEMA_VERSION
    return payload


def finding_payload(finding: ValidationFinding) -> dict:
    return {
        "code": finding.code,
        "severity": finding.severity.value,
        "node": finding.node,
        "message": finding.message,
        "location": list(finding.location) if finding.location else None,
    }


def lint_finding_payload(finding: LintFinding) -> dict:
    return {
        "rule": finding.rule,
        "severity": finding.severity.value,
        "subject": finding.subject,
        "message": finding.message,
    }


def findings_payload(findings: Iterable[ValidationFinding]) -> dict:
    return _versioned({"findings": [finding_payload(f) for f in findings]})


def lint_payload(findings: Iterable[LintFinding]) -> dict:
    return _versioned({"findings": [lint_finding_payload(f) for f in findings]})


def estimate_payload(
    estimate: RiskEstimate,
    sensitivities: Optional[dict[str, tuple[float, float]]] = None,
) -> dict:
    payload = {
        "root_validity": estimate.root_validity,
        "overall_risk": estimate.overall_risk,
        "node_validity": dict(sorted(estimate.node_validity.items())),
        "outcome_risks": {
            nid: {
                "severity": outcome.severity,
                "risk": outcome.risk,
                "threshold": outcome.threshold,
                "verdict": outcome.verdict,
            }
            for nid, outcome in sorted(estimate.outcome_risks.items())
        },
        "findings": [finding_payload(f) for f in estimate.findings],
    }
    if sensitivities is not None:
        payload["sensitivities"] = {
            nid: {"risk_minus": lo, "risk_plus": hi}
            for nid, (lo, hi) in sorted(sensitivities.items())
        }
    return _versioned(payload)


def node_payload(case: SafetyCase, node_id: str) -> dict:
    node = case.nodes[node_id]
    return {
        "id": node.id,
        "kind": node.kind.value,
        "statement": node.statement,
        "p": node.leaf_p,
        "cond_p": node.cond_p,
        "mode": node.mode.value,
        "severity": node.severity,
        "step": node.step,
        "template": node.template,
        "status": node.status.value,
        "monitored": node.monitored,
        "prereq": list(node.prereqs),
        "waives": list(node.waives),
        "collective": list(node.collective),
        "fault_tolerant": node.fault_tolerant,
    }


def case_payload(case: SafetyCase) -> dict:
    return _versioned(
        {
            "title": case.title,
            "macrosystem": case.macrosystem,
            "deployment_window": case.deployment_window,
            "thresholds": dict(sorted(case.thresholds.items())),
            "root": case.root,
            "nodes": [node_payload(case, nid) for nid in case.nodes],
            "support_edges": [list(edge) for edge in case.support_edges],
            "context_edges": [list(edge) for edge in case.context_edges],
        }
    )


def matrix_payload(matrix: RiskMatrix) -> dict:
    return _versioned(
        {
            "name": matrix.name,
            "likelihood_levels": [{"name": n, "upper_bound": b} for n, b in matrix.likelihood_levels],
            "severity_levels": list(matrix.severity_levels),
            "grid": {
                sev: {lname: matrix.grid[(sev, lname)].value for lname in matrix.likelihood_names()}
                for sev in matrix.severity_levels
            },
        }
    )


def assessment_payload(assessments: Iterable[tuple[str, Assessment]]) -> dict:
    return _versioned(
        {
            "assessments": {
                nid: {
                    "severity": a.severity,
                    "probability": a.probability,
                    "likelihood": a.likelihood,
                    "verdict": a.verdict.value,
                }
                for nid, a in assessments
            }
        }
    )


def catalog_payload(templates: Iterable[ArgumentTemplate]) -> dict:
    return _versioned(
        {
            "templates": [
                {
                    "id": t.id,
                    "category": t.category.value,
                    "practicality": t.practicality.value,
                    "max_strength": t.max_strength.value,
                    "scalability": t.scalability.value,
                    "summary": t.summary,
                    "prerequisites": list(t.prerequisites),
                    "addresses_causes": list(t.addresses_causes),
                    "core": t.core,
                }
                for t in templates
            ]
        }
    )


def challenges_payload(challenge_sets: Iterable[ChallengeSet]) -> dict:
    return _versioned(
        {
            "challenge_sets": [
                {
                    "case_title": cs.case_title,
                    "challenges": [
                        {
                            "id": c.id,
                            "target": c.target,
                            "claim": c.claim,
                            "status": c.status.value,
                            "rebuttal": c.rebuttal,
                        }
                        for c in cs.challenges
                    ],
                }
                for cs in challenge_sets
            ]
        }
    )
