from __future__ import annotations

import pytest

from scase.aggregation import evaluate_case
from scase.casefile import parse_case, parse_challenges
from scase.catalog import (
    COLLECTIVE_TAGS,
    LINT_RULES,
    PREREQUISITE_TAGS,
    ArgumentCategory,
    Rating,
    apply_invalidation,
    builtin_catalog,
    check_challenges,
    check_collective_coverage,
    check_correlation_coverage,
    check_prerequisites,
    check_step_coverage,
    run_all_lints,
)
from scase.errors import GraphError, LintError
from scase.model import FindingSeverity, NodeStatus
from scase.riskmodels import CORRELATION_CAUSES

from conftest import fixture_text


class TestBuiltinCatalog:
    def test_sixteen_core_templates(self):
        core = [t for t in builtin_catalog() if t.core]
        assert len(core) == 16

    def test_every_template_fully_rated(self):
        for t in builtin_catalog():
            assert isinstance(t.category, ArgumentCategory)
            assert isinstance(t.practicality, Rating)
            assert isinstance(t.max_strength, Rating)
            assert isinstance(t.scalability, Rating)
            assert t.summary

    def test_capability_evals_ratings(self):
        t = next(t for t in builtin_catalog() if t.id == "dangerous_capability_evals")
        assert t.category is ArgumentCategory.INABILITY
        assert t.practicality is Rating.MODERATE_TO_STRONG
        assert t.scalability is Rating.WEAK

    def test_formal_certification_ratings(self):
        t = next(t for t in builtin_catalog() if t.id == "formal_certification")
        assert t.practicality is Rating.WEAK
        assert t.max_strength is Rating.STRONG
        assert t.scalability is Rating.STRONG

    def test_self_consistent_tag_references(self):
        for t in builtin_catalog():
            assert set(t.prerequisites) <= set(PREREQUISITE_TAGS)
            assert set(t.addresses_causes) <= set(CORRELATION_CAUSES)

    def test_ids_unique(self):
        ids = [t.id for t in builtin_catalog()]
        assert len(ids) == len(set(ids))

    def test_every_cause_addressed_by_some_template(self):
        addressed = {c for t in builtin_catalog() for c in t.addresses_causes}
        assert addressed == set(CORRELATION_CAUSES)

    def test_shipped_example_templates_resolve(self, holistic_case):
        by_id = {t.id for t in builtin_catalog()}
        used = {n.template for n in holistic_case.nodes.values() if n.template}
        assert used <= by_id


class TestStepCoverage:
    def test_full_coverage_is_clean(self, holistic_case):
        assert check_step_coverage(holistic_case) == []

    def test_missing_steps_flagged(self):
        case = parse_case(fixture_text("steps.scase"))
        findings = check_step_coverage(case)
        flagged = {f.subject for f in findings if f.rule == "STEP_COVERAGE"}
        assert flagged == {"3", "6"}
        assert all(f.severity is FindingSeverity.WARNING for f in findings)

    def test_missing_threshold(self):
        src = (
            'case "T" { root: G1; } goal G1 "a" { supported-by: Sn1; severity: sev5; } '
            'solution Sn1 "e" { p: 0.9; }'
        )
        findings = check_step_coverage(parse_case(src))
        assert any(f.rule == "MISSING_THRESHOLD" and f.subject == "sev5" for f in findings)

    def test_lints_deterministic(self):
        case = parse_case(fixture_text("steps.scase"))
        assert check_step_coverage(case) == check_step_coverage(case)


class TestPrerequisites:
    def test_satisfied_by_ancestor_annotation(self):
        case = parse_case(fixture_text("prereq.scase"))
        assert check_prerequisites(case) == []

    def test_missing_prerequisite(self):
        case = parse_case(fixture_text("prereq_missing.scase"))
        findings = check_prerequisites(case)
        assert any(
            f.rule == "MISSING_PREREQUISITE" and f.subject == "G2" and "WeightsSecured" in f.message
            for f in findings
        )

    def test_unknown_template_raises(self):
        src = 'case "T" { root: G1; } goal G1 "a" { p: 0.5; template: bogus; }'
        with pytest.raises(LintError) as exc:
            check_prerequisites(parse_case(src))
        assert exc.value.code == "UNKNOWN_TEMPLATE"

    def test_invalidated_declaration_does_not_satisfy(self):
        case = parse_case(fixture_text("prereq.scase"))
        revoked = apply_invalidation(case, "A1")
        findings = check_prerequisites(revoked)
        assert any(f.rule == "MISSING_PREREQUISITE" for f in findings)

    def test_sibling_subtree_does_not_license(self):
        # The declaration sits under one branch; a template in the other
        # branch must not see it.
        src = (
            'case "T" { root: G1; } '
            'goal G1 "top" { supported-by: G2, G3; } '
            'goal G2 "guarded" { supported-by: Sn1; in-context-of: A1, A2; } '
            'assumption A1 "weights" { prereq: WeightsSecured; } '
            'assumption A2 "restrictions" { prereq: ControlRestrictions; } '
            'goal G3 "unguarded" { supported-by: Sn2; template: monitoring; } '
            'solution Sn1 "e1" { p: 0.9; } '
            'solution Sn2 "e2" { p: 0.9; }'
        )
        findings = check_prerequisites(parse_case(src))
        assert {f.subject for f in findings} == {"G3"}


class TestCorrelationCoverage:
    def test_all_causes_covered(self):
        case = parse_case(fixture_text("fault_tolerant.scase"))
        assert check_correlation_coverage(case) == []

    def test_one_gap_names_the_missing_cause(self):
        case = parse_case(fixture_text("fault_tolerant_gap.scase"))
        findings = check_correlation_coverage(case)
        assert len(findings) == 1
        assert findings[0].rule == "CORRELATION_GAP"
        assert "Trojan" in findings[0].message

    def test_no_fault_tolerant_claim_no_findings(self, single_leaf_case):
        assert check_correlation_coverage(single_leaf_case) == []

    def test_waiver_annotation_counts(self):
        case = parse_case(fixture_text("monitored.scase"))
        assert check_correlation_coverage(case) == []

    def test_invalidated_waiver_does_not_count(self):
        case = parse_case(fixture_text("monitored.scase"))
        revoked = apply_invalidation(case, "A1")
        findings = check_correlation_coverage(revoked)
        assert len(findings) == len(CORRELATION_CAUSES)


class TestCollectiveCoverage:
    def test_tagged_step6_is_clean(self, holistic_case):
        assert check_collective_coverage(holistic_case) == []

    def test_untagged_step6_warns(self):
        src = (
            'case "T" { root: G1; } goal G1 "a" { supported-by: Sn1; step: 6; } '
            'solution Sn1 "e" { p: 0.9; }'
        )
        findings = check_collective_coverage(parse_case(src))
        assert len(findings) == 1
        assert findings[0].rule == "COLLECTIVE_STRATEGY_GAP"

    def test_collective_tags_closed_list(self):
        assert "blitzkrieg" in COLLECTIVE_TAGS
        assert "strike" in COLLECTIVE_TAGS
        assert "hivemind" in COLLECTIVE_TAGS


class TestChallenges:
    def test_all_rebutted_is_clean(self, holistic_case):
        from conftest import DATA

        challenge_set = parse_challenges((DATA / "holistic.schal").read_text(encoding="utf-8"))
        view, findings = check_challenges(holistic_case, challenge_set)
        assert findings == []
        assert view == holistic_case

    def test_open_challenge_flagged(self, single_leaf_case):
        challenge_set = parse_challenges(fixture_text("three.schal"))
        view, findings = check_challenges(single_leaf_case, challenge_set)
        open_findings = [f for f in findings if f.rule == "OPEN_CHALLENGE"]
        assert len(open_findings) == 1
        assert open_findings[0].subject == "Sn1"
        assert open_findings[0].severity is FindingSeverity.ERROR

    def test_conceded_assumption_invalidates_and_raises_risk(self):
        case = parse_case(fixture_text("all_kinds.scase"))
        challenge_set = parse_challenges(fixture_text("conceded.schal"))
        baseline = evaluate_case(case).overall_risk
        view, findings = check_challenges(case, challenge_set)
        assert view.nodes["A1"].status is NodeStatus.INVALIDATED
        assert any(f.rule == "INVALIDATED_ASSUMPTION" and f.subject == "A1" for f in findings)
        reviewed = evaluate_case(view).overall_risk
        assert reviewed > baseline
        assert reviewed == 1.0  # the root's assumption gate went to zero

    def test_title_mismatch(self, holistic_case):
        challenge_set = parse_challenges(fixture_text("three.schal"))
        with pytest.raises(LintError) as exc:
            check_challenges(holistic_case, challenge_set)
        assert exc.value.code == "CASE_MISMATCH"

    def test_dangling_target(self, single_leaf_case):
        challenge_set = parse_challenges(
            'challenges "Single leaf" { } challenge R1 "x" { target: NOPE; }'
        )
        with pytest.raises(LintError) as exc:
            check_challenges(single_leaf_case, challenge_set)
        assert exc.value.code == "UNKNOWN_REFERENCE"


class TestApplyInvalidation:
    def test_certain_leaf_under_conjunction(self):
        case = parse_case(fixture_text("revocation_demo.scase"))
        revoked = apply_invalidation(case, "Sn1")
        assert evaluate_case(revoked).overall_risk == 1.0
        # The original case is untouched.
        assert case.nodes["Sn1"].status is NodeStatus.ACTIVE

    def test_detached_annotation_changes_nothing(self):
        case = parse_case(fixture_text("unreachable.scase"))
        baseline = evaluate_case(case).overall_risk
        revoked = apply_invalidation(case, "C9")
        assert evaluate_case(revoked).overall_risk == baseline

    def test_invalidate_then_override_restores_baseline(self):
        case = parse_case(fixture_text("revocation_demo.scase"))
        baseline = evaluate_case(case)
        revoked = apply_invalidation(case, "Sn1")
        restored = evaluate_case(revoked, {"Sn1": baseline.node_validity["Sn1"]})
        assert restored.overall_risk == baseline.overall_risk

    def test_unknown_node(self, single_leaf_case):
        with pytest.raises(GraphError) as exc:
            apply_invalidation(single_leaf_case, "ZZ")
        assert exc.value.code == "UNKNOWN_REFERENCE"

    def test_never_decreases_risk_on_participating_nodes(self, holistic_case):
        baseline = evaluate_case(holistic_case).overall_risk
        for nid in holistic_case.nodes:
            revoked = apply_invalidation(holistic_case, nid)
            assert evaluate_case(revoked).overall_risk >= baseline - 1e-15


class TestRunAllLints:
    def test_holistic_with_challenges_is_clean(self, holistic_case):
        from conftest import DATA

        challenge_set = parse_challenges((DATA / "holistic.schal").read_text(encoding="utf-8"))
        view, findings = run_all_lints(holistic_case, [challenge_set])
        assert findings == []

    def test_rules_are_documented(self):
        case = parse_case(fixture_text("steps.scase"))
        _, findings = run_all_lints(case)
        assert {f.rule for f in findings} <= set(LINT_RULES)

    def test_repeat_runs_identical(self, holistic_case):
        assert run_all_lints(holistic_case)[1] == run_all_lints(holistic_case)[1]
