from __future__ import annotations

import pytest

from scase.casefile import parse_case
from scase.catalog import apply_invalidation
from scase.errors import GraphError
from scase.render import render_dot

from conftest import corpus_paths, fixture_text
from dotcheck import check_dot

GOLDEN = """digraph safety_case {
  rankdir=TB;
  node [fontname="Helvetica"];
  "G1" [label="G1\\nDeployment does not cause a\\ncatastrophe", shape=box];
  "Sn1" [label="Sn1\\nEvaluation report", shape=circle];
  "G1" -> "Sn1";
}
"""


class TestRenderDot:
    def test_golden_single_leaf(self, single_leaf_case):
        assert render_dot(single_leaf_case) == GOLDEN

    def test_goal_is_box_strategy_is_parallelogram(self, holistic_case):
        text = render_dot(holistic_case)
        assert '"G01" [label="G01' in text
        assert "shape=box]" in text
        assert "shape=parallelogram]" in text
        assert "shape=circle]" in text

    def test_context_kinds_rounded_with_dashed_edges(self, holistic_case):
        text = render_dot(holistic_case)
        assert "style=rounded" in text
        assert "[style=dashed, arrowhead=none]" in text

    def test_deterministic(self, holistic_case):
        assert render_dot(holistic_case) == render_dot(holistic_case)

    def test_invalidated_marked(self):
        case = parse_case(fixture_text("revocation_demo.scase"))
        revoked = apply_invalidation(case, "Sn1")
        text = render_dot(revoked)
        assert "[invalidated]" in text
        assert "fillcolor" in text

    def test_invalid_case_rejected(self):
        case = parse_case(
            'case "T" { root: G1; } goal G1 "a" { supported-by: G2; } goal G2 "b" { supported-by: G1; }'
        )
        with pytest.raises(GraphError) as exc:
            render_dot(case)
        assert exc.value.code == "INVALID_CASE"

    @pytest.mark.parametrize("path", corpus_paths(".scase"), ids=lambda p: p.name)
    def test_corpus_renders_valid_dot(self, path):
        case = parse_case(path.read_text(encoding="utf-8"))
        check_dot(render_dot(case))

    def test_grammar_checker_rejects_garbage(self):
        with pytest.raises(ValueError):
            check_dot("digraph { -> }")
        with pytest.raises(ValueError):
            check_dot('digraph g { "a" [label= ]; }')

    def test_quotes_in_statements_escaped(self):
        case = parse_case(fixture_text("escape.scase"))
        text = render_dot(case)
        check_dot(text)
        assert '\\"quoted\\"' in text
