"""Built-in catalog of safety-argument templates, plus the structural lints.

The catalog carries the sixteen core building-block arguments (inability,
control, trustworthiness, and deference families) and four incentive-based
extras.  Each template is rated on practicality (how close it is to usable),
maximum strength (how much confidence it can deliver), and scalability (how
capable a system it still applies to), and declares the prerequisite claims
its family rests on and which causes of correlated infractions it can rule
out.

The lints turn review recommendations into checkable hard standards:
framework-step coverage, prerequisite satisfaction, correlated-cause
coverage for fault-tolerance claims, collective-strategy coverage, open
challenges, and revocation of invalidated assumptions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .casefile import ChallengeSet, ChallengeStatus
from .errors import GraphError, LintError
from .model import (
    FindingSeverity,
    NodeKind,
    NodeStatus,
    SafetyCase,
    STEPS,
)
from .riskmodels import CORRELATION_CAUSES


class ArgumentCategory(enum.Enum):
    INABILITY = "inability"
    CONTROL = "control"
    TRUSTWORTHINESS = "trustworthiness"
    DEFERENCE = "deference"
    INCENTIVE = "incentive"


class Rating(enum.Enum):
    """Ordered assessment scale; VARIES marks arguments too broad to pin down."""

    WEAK = "weak"
    WEAK_TO_MODERATE = "weak-to-moderate"
    MODERATE = "moderate"
    MODERATE_TO_STRONG = "moderate-to-strong"
    STRONG = "strong"
    VARIES = "varies"


#: Closed list of prerequisite claims templates may demand from a case.
PREREQUISITE_TAGS = (
    "WeightsSecured",
    "ControlRestrictions",
    "EvaluatedBehavior",
    "AdvisorCompetence",
    "ModelablePreferences",
)

#: Closed list of collective-strategy threat tags for step-6 sections.
COLLECTIVE_TAGS = (
    "blitzkrieg",
    "strike",
    "hivemind",
    "widespread_alignment_faking",
    "infectious_jailbreaks",
    "memetic_drift",
)

#: Closed list of lint rule ids (documented in docs/codes.md).
LINT_RULES = (
    "STEP_COVERAGE",
    "MISSING_PREREQUISITE",
    "CORRELATION_GAP",
    "OPEN_CHALLENGE",
    "INVALIDATED_ASSUMPTION",
    "MISSING_THRESHOLD",
    "COLLECTIVE_STRATEGY_GAP",
    "UNKNOWN_TAG",
)


@dataclass(frozen=True)
class ArgumentTemplate:
    id: str
    category: ArgumentCategory
    practicality: Rating
    max_strength: Rating
    scalability: Rating
    summary: str
    prerequisites: tuple[str, ...] = ()
    addresses_causes: tuple[str, ...] = ()
    core: bool = True


@dataclass(frozen=True)
class LintFinding:
    """One rule violation; ``subject`` is a node id, template id, or step."""

    rule: str
    severity: FindingSeverity
    subject: str
    message: str

    def sort_key(self):
        return (self.severity.value, self.rule, self.subject, self.message)


_CONTROL_PREREQS = ("WeightsSecured", "ControlRestrictions")
_TRUST_PREREQS = ("WeightsSecured", "EvaluatedBehavior")
_INCENTIVE_PREREQS = ("WeightsSecured", "ModelablePreferences")

_CATALOG: tuple[ArgumentTemplate, ...] = (
    ArgumentTemplate(
        id="dangerous_capability_evals",
        category=ArgumentCategory.INABILITY,
        practicality=Rating.MODERATE_TO_STRONG,
        max_strength=Rating.STRONG,
        scalability=Rating.WEAK,
        summary=(
            "Fine-tuned elicitation on red-team proxy tasks shows the systems lack the "
            "capabilities needed to reach an unacceptable outcome in any realistic setting, "
            "with a demonstrated margin of safety."
        ),
    ),
    ArgumentTemplate(
        id="isolation",
        category=ArgumentCategory.CONTROL,
        practicality=Rating.STRONG,
        max_strength=Rating.STRONG,
        # scalability capped: sandboxed systems cannot automate most real tasks
        scalability=Rating.MODERATE,
        summary=(
            "The systems are sandboxed so they touch the world only through a few "
            "well-monitored channels, and cannot cause unacceptable outcomes through those."
        ),
        prerequisites=_CONTROL_PREREQS,
        addresses_causes=("ControlFailure",),
    ),
    ArgumentTemplate(
        id="monitoring",
        category=ArgumentCategory.CONTROL,
        practicality=Rating.STRONG,
        max_strength=Rating.STRONG,
        scalability=Rating.WEAK_TO_MODERATE,
        summary=(
            "Watchdog models screen inputs and outputs; dangerous requests and actions are "
            "filtered at runtime or caught and contained before they complete."
        ),
        prerequisites=_CONTROL_PREREQS,
        addresses_causes=("ControlFailure", "Jailbreak"),
    ),
    ArgumentTemplate(
        id="externalized_reasoning_control",
        category=ArgumentCategory.CONTROL,
        practicality=Rating.STRONG,
        max_strength=Rating.STRONG,
        scalability=Rating.MODERATE,
        summary=(
            "The systems must verbalize their reasoning in human-readable text to act "
            "effectively; that text is screened, so dangerous plans are stopped before execution."
        ),
        prerequisites=_CONTROL_PREREQS,
        addresses_causes=("ControlFailure",),
    ),
    ArgumentTemplate(
        id="interpretability_control",
        category=ArgumentCategory.CONTROL,
        practicality=Rating.WEAK_TO_MODERATE,
        max_strength=Rating.STRONG,
        scalability=Rating.STRONG,
        summary=(
            "Decoding of model internals flags dangerous plan-making directly, and the "
            "systems are stopped when such reasoning is detected."
        ),
        prerequisites=_CONTROL_PREREQS,
        addresses_causes=("ControlFailure",),
    ),
    ArgumentTemplate(
        id="unlearning",
        category=ArgumentCategory.CONTROL,
        practicality=Rating.MODERATE_TO_STRONG,
        max_strength=Rating.WEAK_TO_MODERATE,
        scalability=Rating.STRONG,
        summary=(
            "Dangerous knowledge is erased from the models and continuously verified not to "
            "be reacquired, removing capabilities that specific attack strategies require."
        ),
        prerequisites=_CONTROL_PREREQS,
        addresses_causes=("ControlFailure", "Trojan"),
    ),
    ArgumentTemplate(
        id="not_alignment_faking",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.VARIES,
        max_strength=Rating.MODERATE,
        scalability=Rating.MODERATE,
        summary=(
            "Uncorrelated infractions are tolerable by redundancy, enumerated causes of "
            "correlated infractions are ruled out one by one, and the systems are shown "
            "not to be deliberately waiting for an opportunity to defect."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("AlignmentFaking",),
    ),
    ArgumentTemplate(
        id="eliciting_latent_knowledge",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.MODERATE,
        max_strength=Rating.VARIES,
        scalability=Rating.STRONG,
        summary=(
            "The systems' internally represented beliefs can be read out, and they believe "
            "their own actions are harmless, so trust survives tasks humans cannot check."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("AlignmentFaking",),
    ),
    ArgumentTemplate(
        id="absence_of_precursors",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.STRONG,
        max_strength=Rating.STRONG,
        scalability=Rating.WEAK_TO_MODERATE,
        summary=(
            "The systems lack the precursor capabilities deceptive waiting requires -- "
            "situational awareness, scheming, and reliable opportunity-checking -- so they "
            "cannot be faking alignment."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("AlignmentFaking",),
    ),
    ArgumentTemplate(
        id="externalized_reasoning_trust",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.STRONG,
        max_strength=Rating.STRONG,
        scalability=Rating.WEAK_TO_MODERATE,
        summary=(
            "The systems cannot perform the reasoning needed to fake alignment without "
            "writing it down, and their written reasoning shows none of it."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("AlignmentFaking",),
    ),
    ArgumentTemplate(
        id="interpretability_trust",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.WEAK_TO_MODERATE,
        max_strength=Rating.MODERATE,
        scalability=Rating.MODERATE,
        summary=(
            "Model internals are probed for the specific reasoning and hidden triggers that "
            "deceptive or trojaned behavior would need, and none is found."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("AlignmentFaking", "Trojan"),
    ),
    ArgumentTemplate(
        id="modeling_generalization",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.STRONG,
        max_strength=Rating.MODERATE,
        scalability=Rating.MODERATE,
        summary=(
            "Measured patterns in how similarly trained models generalize -- including "
            "decorrelation of mistakes across differently trained components -- predict the "
            "deployed systems keep their safety property."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("CorrelatedMistakes", "AlignmentFaking"),
    ),
    ArgumentTemplate(
        id="amplification",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.STRONG,
        max_strength=Rating.MODERATE,
        scalability=Rating.STRONG,
        summary=(
            "Capability is scaled by speeding up or federating already-trusted weaker "
            "systems in small steps, re-checking trust at every step of the ladder."
        ),
        prerequisites=_TRUST_PREREQS,
    ),
    ArgumentTemplate(
        id="formal_certification",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.WEAK,
        max_strength=Rating.STRONG,
        scalability=Rating.STRONG,
        summary=(
            "A machine-checked proof certifies a formal property of the model that implies "
            "unacceptable outcomes are unlikely, independent of how capable the model is."
        ),
        prerequisites=_TRUST_PREREQS,
    ),
    ArgumentTemplate(
        id="testbeds",
        category=ArgumentCategory.TRUSTWORTHINESS,
        practicality=Rating.STRONG,
        max_strength=Rating.MODERATE,
        scalability=Rating.STRONG,
        summary=(
            "Evaluator-built challenge problems measure whether the developer can predict "
            "and evaluate system behavior; passing them is transferable evidence of that skill."
        ),
        prerequisites=_TRUST_PREREQS,
        addresses_causes=("CorrelatedMistakes",),
    ),
    ArgumentTemplate(
        id="deference_truthful",
        category=ArgumentCategory.DEFERENCE,
        practicality=Rating.MODERATE,
        max_strength=Rating.VARIES,
        scalability=Rating.STRONG,
        summary=(
            "Advisor systems at least as competent as the human reviewers, and justified "
            "truthful, vouch that the assessed systems are safe; trust is bootstrapped "
            "stepwise to harder-to-evaluate tasks."
        ),
        prerequisites=("AdvisorCompetence",),
    ),
    # Incentive-based extras beyond the sixteen core templates.
    ArgumentTemplate(
        id="optionality_incentive",
        category=ArgumentCategory.INCENTIVE,
        practicality=Rating.STRONG,
        max_strength=Rating.WEAK,
        scalability=Rating.MODERATE,
        summary=(
            "Compensation the systems value (resources, continued operation) makes the "
            "compliant path worth more than an attempt that risks being caught."
        ),
        prerequisites=_INCENTIVE_PREREQS,
        core=False,
    ),
    ArgumentTemplate(
        id="utility_signal",
        category=ArgumentCategory.INCENTIVE,
        practicality=Rating.MODERATE,
        max_strength=Rating.MODERATE,
        scalability=Rating.MODERATE,
        summary=(
            "The systems maximize an observable reward signal held high by default and "
            "zeroed when an attempt is caught, so attempting only pays below a computable "
            "catch-probability threshold."
        ),
        prerequisites=_INCENTIVE_PREREQS,
        core=False,
    ),
    ArgumentTemplate(
        id="coup_proofing",
        category=ArgumentCategory.INCENTIVE,
        practicality=Rating.STRONG,
        max_strength=Rating.MODERATE,
        scalability=Rating.MODERATE,
        summary=(
            "Watchdog systems are rewarded for convincingly reporting other systems' "
            "violations and penalized for false reports, raising the effective catch "
            "probability against coordinated defection."
        ),
        prerequisites=_INCENTIVE_PREREQS,
        addresses_causes=("ControlFailure",),
        core=False,
    ),
    ArgumentTemplate(
        id="deference_incentive",
        category=ArgumentCategory.DEFERENCE,
        practicality=Rating.STRONG,
        max_strength=Rating.WEAK,
        scalability=Rating.STRONG,
        summary=(
            "Advisor systems are kept truthful by incentives -- retrospective performance "
            "review, more to lose than gain from collusion, decorrelated goals -- rather "
            "than by verified inner trustworthiness."
        ),
        prerequisites=("AdvisorCompetence", "ModelablePreferences"),
        core=False,
    ),
)


def builtin_catalog() -> list[ArgumentTemplate]:
    """All built-in templates: sixteen core plus the incentive extras."""
    return list(_CATALOG)


def catalog_by_id(catalog: Optional[Iterable[ArgumentTemplate]] = None) -> dict[str, ArgumentTemplate]:
    return {t.id: t for t in (catalog if catalog is not None else _CATALOG)}


def _lint(rule: str, severity: FindingSeverity, subject, message: str) -> LintFinding:
    return LintFinding(rule=rule, severity=severity, subject=str(subject), message=message)


# ---------------------------------------------------------------------------
# Lints
# ---------------------------------------------------------------------------


def check_step_coverage(case: SafetyCase) -> list[LintFinding]:
    """Warn on framework steps with no tagged node; error on severities used
    without an acceptable-risk threshold."""
    findings: list[LintFinding] = []
    tagged = {n.step for n in case.nodes.values() if n.step is not None}
    for step in STEPS:
        if step not in tagged:
            findings.append(
                _lint("STEP_COVERAGE", FindingSeverity.WARNING, step, f"no node is tagged with step {step}")
            )
    for severity in sorted({n.severity for n in case.nodes.values() if n.severity}):
        if severity not in case.thresholds:
            findings.append(
                _lint(
                    "MISSING_THRESHOLD",
                    FindingSeverity.ERROR,
                    severity,
                    f"severity {severity!r} is used but has no threshold entry",
                )
            )
    findings.sort(key=LintFinding.sort_key)
    return findings


def _ancestor_scope(case: SafetyCase, node_id: str) -> set[str]:
    """The node, its support ancestors, and all their context annotations."""
    scope = {node_id}
    frontier = [node_id]
    while frontier:
        current = frontier.pop()
        for parent in case.support_parents(current):
            if parent not in scope:
                scope.add(parent)
                frontier.append(parent)
    for anchor in list(scope):
        scope.update(case.annotations(anchor))
    return scope


def check_prerequisites(case: SafetyCase, catalog: Optional[Iterable[ArgumentTemplate]] = None) -> list[LintFinding]:
    """Every template-tagged node must see each of its template's prerequisite
    tags declared (``prereq:``) on an active ancestor or ancestor annotation.

    Prerequisites are scoped rather than global: a claim argued for one
    subsystem must not silently license another.  Raises LintError
    (UNKNOWN_TEMPLATE) if a node names a template the catalog lacks.
    """
    templates = catalog_by_id(catalog)
    findings: list[LintFinding] = []
    for nid, node in case.nodes.items():
        if node.template is None:
            continue
        template = templates.get(node.template)
        if template is None:
            raise LintError("UNKNOWN_TEMPLATE", f"node {nid} names unknown template {node.template!r}")
        if not template.prerequisites:
            continue
        scope = _ancestor_scope(case, nid)
        declared = {
            tag
            for sid in scope
            for tag in case.nodes[sid].prereqs
            if case.nodes[sid].status is NodeStatus.ACTIVE
        }
        for tag in template.prerequisites:
            if tag not in declared:
                findings.append(
                    _lint(
                        "MISSING_PREREQUISITE",
                        FindingSeverity.ERROR,
                        nid,
                        f"template {template.id!r} on {nid} requires {tag}, "
                        "but no active ancestor or annotation declares it",
                    )
                )
    findings.sort(key=LintFinding.sort_key)
    return findings


def _descendants(case: SafetyCase, node_id: str) -> set[str]:
    seen = {node_id}
    frontier = [node_id]
    while frontier:
        current = frontier.pop()
        for child in case.support_children(current):
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    return seen


def check_correlation_coverage(case: SafetyCase, catalog: Optional[Iterable[ArgumentTemplate]] = None) -> list[LintFinding]:
    """Every fault-tolerance claim must address all five causes of correlated
    infractions, via descendant templates or explicit waiver annotations."""
    templates = catalog_by_id(catalog)
    findings: list[LintFinding] = []
    for nid, node in case.nodes.items():
        if not node.fault_tolerant:
            continue
        subtree = _descendants(case, nid)
        addressed: set[str] = set()
        for sid in subtree:
            sub = case.nodes[sid]
            if sub.template is not None and sub.template in templates:
                addressed.update(templates[sub.template].addresses_causes)
            for annotation_id in case.annotations(sid):
                annotation = case.nodes[annotation_id]
                if annotation.status is NodeStatus.ACTIVE:
                    addressed.update(annotation.waives)
        for cause in CORRELATION_CAUSES:
            if cause not in addressed:
                findings.append(
                    _lint(
                        "CORRELATION_GAP",
                        FindingSeverity.ERROR,
                        nid,
                        f"fault-tolerance claim {nid} does not address correlated-infraction cause {cause}",
                    )
                )
    findings.sort(key=LintFinding.sort_key)
    return findings


def check_collective_coverage(case: SafetyCase) -> list[LintFinding]:
    """A step-6 section should name at least one collective-strategy threat tag."""
    findings: list[LintFinding] = []
    step6 = [nid for nid, n in case.nodes.items() if n.step == 6]
    if step6 and not any(case.nodes[nid].collective for nid in step6):
        findings.append(
            _lint(
                "COLLECTIVE_STRATEGY_GAP",
                FindingSeverity.WARNING,
                6,
                "step-6 nodes exist but none is tagged with a collective strategy "
                f"({', '.join(COLLECTIVE_TAGS)})",
            )
        )
    return findings


def check_tags(case: SafetyCase) -> list[LintFinding]:
    """Warn on prereq / waives / collective values outside the closed lists."""
    findings: list[LintFinding] = []
    for nid, node in case.nodes.items():
        for tag in node.prereqs:
            if tag not in PREREQUISITE_TAGS:
                findings.append(
                    _lint("UNKNOWN_TAG", FindingSeverity.WARNING, nid, f"unknown prerequisite tag {tag!r}")
                )
        for tag in node.waives:
            if tag not in CORRELATION_CAUSES:
                findings.append(
                    _lint("UNKNOWN_TAG", FindingSeverity.WARNING, nid, f"unknown waived cause {tag!r}")
                )
        for tag in node.collective:
            if tag not in COLLECTIVE_TAGS:
                findings.append(
                    _lint("UNKNOWN_TAG", FindingSeverity.WARNING, nid, f"unknown collective-strategy tag {tag!r}")
                )
    findings.sort(key=LintFinding.sort_key)
    return findings


def check_challenges(case: SafetyCase, challenges: ChallengeSet) -> tuple[SafetyCase, list[LintFinding]]:
    """Apply a risk case to a safety case.

    Returns the reviewed case view -- conceded challenges force their target
    nodes to invalidated -- together with the findings: an error per open
    challenge, and a warning per assumption invalidated by concession.
    Raises LintError for a title mismatch (CASE_MISMATCH) or a challenge
    whose target is not in the case (UNKNOWN_REFERENCE).
    """
    if challenges.case_title != case.title:
        raise LintError(
            "CASE_MISMATCH",
            f"challenge set targets {challenges.case_title!r} but the case is {case.title!r}",
        )
    findings: list[LintFinding] = []
    view = case
    for challenge in challenges.challenges:
        if challenge.target not in case.nodes:
            raise LintError(
                "UNKNOWN_REFERENCE",
                f"challenge {challenge.id} targets unknown node {challenge.target!r}",
            )
        if challenge.status is ChallengeStatus.OPEN:
            findings.append(
                _lint(
                    "OPEN_CHALLENGE",
                    FindingSeverity.ERROR,
                    challenge.target,
                    f"challenge {challenge.id} against {challenge.target} is open: {challenge.claim}",
                )
            )
        elif challenge.status is ChallengeStatus.CONCEDED:
            target = view.nodes[challenge.target]
            view = view.with_node(replace(target, status=NodeStatus.INVALIDATED))
            if target.kind is NodeKind.ASSUMPTION:
                findings.append(
                    _lint(
                        "INVALIDATED_ASSUMPTION",
                        FindingSeverity.WARNING,
                        challenge.target,
                        f"assumption {challenge.target} invalidated by conceded challenge {challenge.id}",
                    )
                )
    findings.sort(key=LintFinding.sort_key)
    return view, findings


def apply_invalidation(case: SafetyCase, node_id: str) -> SafetyCase:
    """New case with one node's certification revoked; the input is unchanged.

    Evaluation treats the invalidated node as validity 0 (or as a zero gate
    on everything it annotates), so revocation is visible as risk.
    """
    if node_id not in case.nodes:
        raise GraphError("UNKNOWN_REFERENCE", f"cannot invalidate unknown node {node_id!r}")
    return case.with_node(replace(case.nodes[node_id], status=NodeStatus.INVALIDATED))


def run_all_lints(
    case: SafetyCase,
    challenge_sets: Iterable[ChallengeSet] = (),
    catalog: Optional[Iterable[ArgumentTemplate]] = None,
) -> tuple[SafetyCase, list[LintFinding]]:
    """Run every lint; challenges are applied first so that concessions are
    visible to the prerequisite checks.  Returns (reviewed view, findings)."""
    view = case
    findings: list[LintFinding] = []
    for challenge_set in challenge_sets:
        view, challenge_findings = check_challenges(view, challenge_set)
        findings.extend(challenge_findings)
    findings.extend(check_step_coverage(view))
    findings.extend(check_prerequisites(view, catalog))
    findings.extend(check_correlation_coverage(view, catalog))
    findings.extend(check_collective_coverage(view))
    findings.extend(check_tags(view))
    findings.sort(key=LintFinding.sort_key)
    return view, findings
