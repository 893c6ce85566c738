"""Graphviz DOT rendering of a safety case.

GSN shape conventions: goals are rectangles, strategies parallelograms,
solutions circles; context-kind annotations get rounded shapes and attach
with dashed edges.  Emission order is topological with node-id tie-break,
so the same case always renders to identical bytes.
"""

from __future__ import annotations

import textwrap

from .errors import GraphError
from .model import (
    FindingSeverity,
    NodeKind,
    NodeStatus,
    SafetyCase,
    canonical_order,
    validate_graph,
)

_SHAPES = {
    NodeKind.GOAL: 'shape=box',
    NodeKind.STRATEGY: 'shape=parallelogram',
    NodeKind.SOLUTION: 'shape=circle',
    NodeKind.CONTEXT: 'shape=box, style=rounded',
    NodeKind.ASSUMPTION: 'shape=ellipse',
    NodeKind.JUSTIFICATION: 'shape=note',
}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _label(node) -> str:
    lines = [node.id] + textwrap.wrap(node.statement, width=28)
    if node.status is NodeStatus.INVALIDATED:
        lines.append("[invalidated]")
    # "\n" inside a DOT label is the two-character escape, not a newline.
    return "\\n".join(_escape(line) for line in lines)


def render_dot(case: SafetyCase) -> str:
    """Deterministic DOT digraph for a validated case."""
    findings = validate_graph(case)
    if any(f.severity is FindingSeverity.ERROR for f in findings):
        first = next(f for f in findings if f.severity is FindingSeverity.ERROR)
        raise GraphError("INVALID_CASE", f"cannot render: {first.code}: {first.message}")

    order = canonical_order(case)
    lines = ["digraph safety_case {", "  rankdir=TB;", '  node [fontname="Helvetica"];']
    for nid in order:
        node = case.nodes[nid]
        attrs = _SHAPES[node.kind]
        if node.status is NodeStatus.INVALIDATED:
            attrs += ', style=filled, fillcolor="#f4cccc"'
        lines.append(f'  "{nid}" [label="{_label(node)}", {attrs}];')
    for parent in order:
        for child in case.support_children(parent):
            lines.append(f'  "{parent}" -> "{child}";')
    for anchor in order:
        for annotation in sorted(case.annotations(anchor)):
            lines.append(f'  "{anchor}" -> "{annotation}" [style=dashed, arrowhead=none];')
    lines.append("}")
    return "\n".join(lines) + "\n"
