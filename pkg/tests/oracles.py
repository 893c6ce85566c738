"""Independent oracles used to freeze expected values.

These deliberately avoid the code paths they check: the enumeration oracle
walks joint outcomes truth-table style instead of folding probabilities, and
the tree generator builds cases without the parser.
"""

from __future__ import annotations

import itertools
import random

from scase.model import (
    ANNOTATION_KINDS,
    GsnNode,
    Mode,
    NodeKind,
    SafetyCase,
)


def probability_leaves(case: SafetyCase) -> list[str]:
    """Support-kind nodes with no support children (the probability carriers)."""
    parents = {p for p, _ in case.support_edges}
    return [
        nid
        for nid, node in case.nodes.items()
        if node.kind not in ANNOTATION_KINDS and nid not in parents
    ]


def enumerate_root_validity(case: SafetyCase) -> float:
    """Exhaustive joint-outcome enumeration under leaf independence.

    Every probability-bearing leaf is an independent Bernoulli event; an
    internal node is true when all (conjunctive) or any (disjunctive) of its
    support children are true.  Only valid for cases without cond-p and
    without shared sub-structure (trees), where independence actually holds.
    """
    leaves = probability_leaves(case)
    children = {nid: case.support_children(nid) for nid in case.nodes}

    def truth(nid: str, assignment: dict[str, bool]) -> bool:
        node = case.nodes[nid]
        kids = children[nid]
        if not kids:
            return assignment[nid]
        values = [truth(k, assignment) for k in kids]
        return all(values) if node.mode is Mode.CONJUNCTIVE else any(values)

    total = 0.0
    for outcome in itertools.product((True, False), repeat=len(leaves)):
        assignment = dict(zip(leaves, outcome))
        weight = 1.0
        for nid, happened in assignment.items():
            p = case.nodes[nid].leaf_p
            weight *= p if happened else (1.0 - p)
        if truth(case.root, assignment):
            total += weight
    return total


def _split(total: int, parts: int, rng: random.Random) -> list[int]:
    """Partition ``total`` into ``parts`` positive integers."""
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    edges = [0] + cuts + [total]
    return [b - a for a, b in zip(edges, edges[1:])]


def random_tree_case(rng: random.Random, max_leaves: int = 12) -> SafetyCase:
    """A random valid tree-shaped case with <= max_leaves probability leaves."""
    nodes: dict[str, GsnNode] = {}
    support: list[tuple[str, str]] = []
    counter = itertools.count(1)

    def random_mode() -> Mode:
        return Mode.DISJUNCTIVE if rng.random() < 0.35 else Mode.CONJUNCTIVE

    def build_leaf() -> str:
        nid = f"E{next(counter):02d}"
        nodes[nid] = GsnNode(
            id=nid,
            kind=NodeKind.SOLUTION,
            statement=f"evidence {nid}",
            leaf_p=round(rng.random(), 6),
        )
        return nid

    def build(kind: NodeKind, depth: int, budget: int) -> str:
        """Build a goal or strategy consuming exactly ``budget`` leaves."""
        prefix = "G" if kind is NodeKind.GOAL else "S"
        nid = f"{prefix}{next(counter):02d}"
        nodes[nid] = GsnNode(id=nid, kind=kind, statement=f"node {nid}", mode=random_mode())
        if depth >= 6:
            for _ in range(budget):
                support.append((nid, build_leaf()))
            return nid
        if budget == 1 and (depth >= 3 or rng.random() < 0.6):
            support.append((nid, build_leaf()))
            return nid
        parts = rng.randint(1, min(3, budget))
        for share in _split(budget, parts, rng):
            if share == 1 and (depth >= 3 or rng.random() < 0.7):
                support.append((nid, build_leaf()))
            elif kind is NodeKind.GOAL and rng.random() < 0.5:
                support.append((nid, build(NodeKind.STRATEGY, depth + 1, share)))
            else:
                support.append((nid, build(NodeKind.GOAL, depth + 1, share)))
        return nid

    root = build(NodeKind.GOAL, 0, rng.randint(1, max_leaves))
    return SafetyCase(title="random tree", nodes=nodes, support_edges=support, root=root)
