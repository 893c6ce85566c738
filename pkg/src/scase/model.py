"""In-memory model of a GSN-structured safety case.

A safety case is a root-anchored DAG of Goal Structuring Notation nodes:
goals (claims), strategies (argument steps), solutions (evidence), plus
context / assumption / justification annotations.  Support edges carry the
argument; context edges attach annotations to the nodes they qualify.

Everything here is immutable after construction and all operations are pure
functions, so values can be shared freely between threads.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

from .errors import GraphError

ID_PATTERN = re.compile(r"^[A-Za-z][A-Za-z0-9_-]{0,63}$")

#: Framework step tags a node may carry (1 = define macrosystem, 2 = specify
#: unacceptable outcomes, 3 = justify deployment assumptions, 4 = decompose
#: into subsystems, 5 = assess subsystem risk, 6 = assess macrosystem risk).
STEPS = (1, 2, 3, 4, 5, 6)


class NodeKind(enum.Enum):
    GOAL = "goal"
    STRATEGY = "strategy"
    SOLUTION = "solution"
    CONTEXT = "context"
    ASSUMPTION = "assumption"
    JUSTIFICATION = "justification"


#: Kinds that participate in the support DAG and carry probabilities.
SUPPORT_KINDS = frozenset({NodeKind.GOAL, NodeKind.STRATEGY, NodeKind.SOLUTION})
#: Kinds that attach as annotations via context edges only.
ANNOTATION_KINDS = frozenset(
    {NodeKind.CONTEXT, NodeKind.ASSUMPTION, NodeKind.JUSTIFICATION}
)


class Mode(enum.Enum):
    """How a node's support children combine."""

    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


class NodeStatus(enum.Enum):
    ACTIVE = "active"
    INVALIDATED = "invalidated"


class FindingSeverity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


class SourceSpan(NamedTuple):
    """1-based (line, column) of the first offending byte."""

    line: int
    column: int


@dataclass(frozen=True)
class GsnNode:
    """One GSN element.

    ``leaf_p`` is the claim-validity probability supplied for evidence leaves
    (required on solutions).  ``cond_p`` is the probability of this claim
    conditional on the preceding sibling's claim state under the parent's
    combination mode; when absent, siblings are treated as independent.
    """

    id: str
    kind: NodeKind
    statement: str
    leaf_p: Optional[float] = None
    cond_p: Optional[float] = None
    mode: Mode = Mode.CONJUNCTIVE
    severity: Optional[str] = None
    step: Optional[int] = None
    template: Optional[str] = None
    status: NodeStatus = NodeStatus.ACTIVE
    monitored: bool = False
    prereqs: tuple[str, ...] = ()
    waives: tuple[str, ...] = ()
    collective: tuple[str, ...] = ()
    fault_tolerant: bool = False


@dataclass(frozen=True, eq=False)
class SafetyCase:
    """A complete safety case: metadata, thresholds, nodes, and edges.

    ``nodes`` preserves declaration order (used as the topological tie-break).
    ``support_edges`` order defines per-parent child order, which is semantic:
    conditional probabilities fold over children in this order.  Equality is
    structural: two cases are equal when they have the same nodes, the same
    per-parent child sequences, the same annotation sets, and the same
    metadata, regardless of declaration order.
    """

    title: str
    macrosystem: str = ""
    deployment_window: str = ""
    thresholds: dict[str, float] = field(default_factory=dict)
    nodes: dict[str, GsnNode] = field(default_factory=dict)
    support_edges: list[tuple[str, str]] = field(default_factory=list)
    context_edges: list[tuple[str, str]] = field(default_factory=list)
    root: str = ""

    def support_children(self, node_id: str) -> list[str]:
        return [c for p, c in self.support_edges if p == node_id]

    def support_parents(self, node_id: str) -> list[str]:
        return [p for p, c in self.support_edges if c == node_id]

    def annotations(self, node_id: str) -> list[str]:
        return [a for anchor, a in self.context_edges if anchor == node_id]

    def declaration_index(self, node_id: str) -> int:
        for i, nid in enumerate(self.nodes):
            if nid == node_id:
                return i
        raise KeyError(node_id)

    def _structural_key(self):
        children: dict[str, tuple[str, ...]] = {}
        for p, c in self.support_edges:
            children.setdefault(p, ())
            children[p] = children[p] + (c,)
        annotations: dict[str, frozenset[str]] = {}
        for anchor, a in self.context_edges:
            annotations[anchor] = annotations.get(anchor, frozenset()) | {a}
        return (
            self.title,
            self.macrosystem,
            self.deployment_window,
            tuple(sorted(self.thresholds.items())),
            dict(self.nodes),
            children,
            annotations,
            self.root,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SafetyCase):
            return NotImplemented
        return self._structural_key() == other._structural_key()

    def with_node(self, node: GsnNode) -> "SafetyCase":
        """Return a copy with one node replaced; declaration order is kept."""
        nodes = {nid: (node if nid == node.id else n) for nid, n in self.nodes.items()}
        return replace(self, nodes=nodes)


@dataclass(frozen=True)
class ValidationFinding:
    """One structural problem.  ``code`` values are documented in docs/codes.md."""

    code: str
    severity: FindingSeverity
    node: Optional[str]
    message: str
    location: Optional[SourceSpan] = None

    def sort_key(self):
        return (self.severity.value, self.node or "", self.code, self.message)


def _finding(code: str, severity: FindingSeverity, node: Optional[str], message: str):
    return ValidationFinding(code=code, severity=severity, node=node, message=message)


def _err(code: str, node: Optional[str], message: str) -> ValidationFinding:
    return _finding(code, FindingSeverity.ERROR, node, message)


def _warn(code: str, node: Optional[str], message: str) -> ValidationFinding:
    return _finding(code, FindingSeverity.WARNING, node, message)


def _find_cycle_node(case: SafetyCase) -> Optional[str]:
    """Return a node on some support cycle, or None.

    Iterative DFS in declaration order; the reported node is the target of the
    first back edge found, which is always on the cycle it closes.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in case.nodes}
    children = {nid: case.support_children(nid) for nid in case.nodes}
    for start in case.nodes:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GREY
        while stack:
            node, idx = stack[-1]
            kids = children[node]
            if idx < len(kids):
                stack[-1] = (node, idx + 1)
                child = kids[idx]
                if child not in color:
                    continue  # dangling edge; reported separately
                if color[child] == GREY:
                    return child
                if color[child] == WHITE:
                    color[child] = GREY
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return None


def validate_graph(case: SafetyCase) -> list[ValidationFinding]:
    """Check every structural invariant of a safety case.

    Returns a deterministic list sorted by (severity, node id, code); empty
    iff the case is well-formed.  Never raises: findings are the result.
    """
    findings: list[ValidationFinding] = []
    nodes = case.nodes

    for nid, node in nodes.items():
        if not ID_PATTERN.match(nid):
            findings.append(_err("BAD_ID", nid, f"node id {nid!r} is not a valid identifier"))
        if node.step is not None and node.step not in STEPS:
            findings.append(_err("BAD_STEP", nid, f"step {node.step} is outside 1..6"))
        for label, value in (("p", node.leaf_p), ("cond-p", node.cond_p)):
            if value is not None and not (0.0 <= value <= 1.0):
                findings.append(_err("PROB_RANGE", nid, f"{label} = {value} is outside [0, 1]"))

    for p, c in case.support_edges + case.context_edges:
        for ref in (p, c):
            if ref not in nodes:
                findings.append(_err("UNKNOWN_REFERENCE", ref, f"edge names undeclared node {ref!r}"))
    known_edges = [(p, c) for p, c in case.support_edges if p in nodes and c in nodes]
    known_context = [(p, c) for p, c in case.context_edges if p in nodes and c in nodes]

    # Root: declared, a goal, and without support parents.
    if case.root not in nodes:
        findings.append(_err("BAD_ROOT", case.root or None, "declared root does not exist"))
    else:
        root = nodes[case.root]
        if root.kind is not NodeKind.GOAL:
            findings.append(_err("BAD_ROOT", case.root, f"root must be a goal, not a {root.kind.value}"))
        if any(c == case.root for _, c in known_edges):
            findings.append(_err("BAD_ROOT", case.root, "root has an incoming support edge"))

    # Any other parentless goal is a competing root.
    supported = {c for _, c in known_edges}
    for nid, node in nodes.items():
        if node.kind is NodeKind.GOAL and nid != case.root and nid not in supported:
            findings.append(_err("MULTIPLE_ROOTS", nid, f"goal {nid} has no support parent and is not the root"))

    # Kind discipline on support edges.
    for p, c in known_edges:
        pk, ck = nodes[p].kind, nodes[c].kind
        if pk in ANNOTATION_KINDS or pk is NodeKind.SOLUTION:
            findings.append(_err("BAD_CHILD_KIND", p, f"{pk.value} {p} may not have support children"))
        elif ck in ANNOTATION_KINDS:
            findings.append(_err("BAD_CHILD_KIND", c, f"{ck.value} {c} may only attach via in-context-of"))
        elif pk is NodeKind.STRATEGY and ck is NodeKind.STRATEGY:
            findings.append(_err("BAD_CHILD_KIND", c, f"strategy {p} may not be supported by strategy {c}"))

    # Kind discipline on context edges.
    for anchor, a in known_context:
        if nodes[a].kind not in ANNOTATION_KINDS:
            findings.append(_err("BAD_ANNOTATION_KIND", a, f"{nodes[a].kind.value} {a} cannot be an annotation"))
        if nodes[anchor].kind in ANNOTATION_KINDS:
            findings.append(_err("BAD_ANNOTATION_KIND", anchor, f"annotation {anchor} cannot anchor other annotations"))

    # Strategies decompose a goal into further claims or evidence.
    for nid, node in nodes.items():
        if node.kind is not NodeKind.STRATEGY:
            continue
        parents = [p for p, c in known_edges if c == nid]
        if not any(nodes[p].kind is NodeKind.GOAL for p in parents):
            findings.append(_err("STRATEGY_PARENT", nid, f"strategy {nid} has no goal parent"))
        if not any(p == nid for p, _ in known_edges):
            findings.append(_err("EMPTY_STRATEGY", nid, f"strategy {nid} has no support children"))

    # Probability placement.
    parents_with_children = {p for p, _ in known_edges}
    for nid, node in nodes.items():
        if node.kind is NodeKind.SOLUTION and node.leaf_p is None:
            findings.append(_err("MISSING_LEAF_P", nid, f"solution {nid} must declare p"))
        if node.leaf_p is not None and nid in parents_with_children:
            findings.append(_err("LEAF_P_WITH_CHILDREN", nid, f"{nid} declares p but has support children"))

    cycle_node = _find_cycle_node(case)
    if cycle_node is not None:
        findings.append(_err("CYCLE", cycle_node, f"support edges form a cycle through {cycle_node}"))

    # Reachability from the root over support and context edges (warning only,
    # so work-in-progress cases stay evaluable).
    if case.root in nodes:
        reached = {case.root}
        frontier = [case.root]
        out: dict[str, list[str]] = {nid: [] for nid in nodes}
        for p, c in known_edges + known_context:
            out[p].append(c)
        while frontier:
            cur = frontier.pop()
            for nxt in out[cur]:
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        for nid in nodes:
            if nid not in reached:
                findings.append(_warn("UNREACHABLE", nid, f"{nid} is not reachable from the root"))

    findings.sort(key=ValidationFinding.sort_key)
    return findings


def _topological_order(case: SafetyCase, tie_key) -> list[str]:
    """Kahn's algorithm over support edges; ties broken by ``tie_key``."""
    indegree = {nid: 0 for nid in case.nodes}
    children: dict[str, list[str]] = {nid: [] for nid in case.nodes}
    for p, c in case.support_edges:
        if p in indegree and c in indegree:
            children[p].append(c)
            indegree[c] += 1
    ready = sorted((nid for nid, d in indegree.items() if d == 0), key=tie_key)
    order: list[str] = []
    while ready:
        nid = ready.pop(0)
        order.append(nid)
        released = []
        for c in children[nid]:
            indegree[c] -= 1
            if indegree[c] == 0:
                released.append(c)
        if released:
            ready = sorted(ready + released, key=tie_key)
    if len(order) != len(case.nodes):
        stuck = sorted(set(case.nodes) - set(order), key=tie_key)
        raise GraphError("CYCLE", f"support edges form a cycle involving {stuck[0]}")
    return order


def topological_order(case: SafetyCase) -> list[str]:
    """Every support parent before its children; ties in declaration order."""
    decl = {nid: i for i, nid in enumerate(case.nodes)}
    return _topological_order(case, lambda nid: decl[nid])


def canonical_order(case: SafetyCase) -> list[str]:
    """Topological order with node-id tie-break (serializer and renderer order)."""
    return _topological_order(case, lambda nid: nid)


def nodes_for_step(case: SafetyCase, step: int) -> list[str]:
    """Ids of all nodes tagged with the given framework step, sorted."""
    if step not in STEPS:
        raise GraphError("STEP_OUT_OF_RANGE", f"step {step} is outside 1..6")
    return sorted(nid for nid, node in case.nodes.items() if node.step == step)


def severities_in_use(case: SafetyCase) -> list[str]:
    """Severity names tagged on any node, sorted."""
    return sorted({n.severity for n in case.nodes.values() if n.severity is not None})
