"""Graph utilities: structural validation, topological order, node depth."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .scene import (
    ADJACENCIES,
    LAYOUT_NODE_IDS,
    LAYOUT_PREPOSITIONS,
    OBJECT_PREPOSITIONS,
    VALID_ROTATIONS,
    SceneGraph,
    is_layout_node,
)


class CyclicGraph(Exception):
    pass


class Unreachable(Exception):
    pass


@dataclass(frozen=True)
class ValidationError:
    code: str
    subject: str
    message: str


@dataclass
class ValidationReport:
    errors: List[ValidationError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def add(self, code: str, subject: str, message: str) -> None:
        self.errors.append(ValidationError(code, subject, message))

    def codes(self) -> List[str]:
        return [e.code for e in self.errors]


def validate_graph(graph: SceneGraph) -> ValidationReport:
    """Check every structural invariant; errors are data, not failures."""
    report = ValidationReport()
    seen = set()
    for node in graph.nodes:
        if node.id in seen:
            report.add("DuplicateId", node.id, f"duplicate node id {node.id!r}")
        seen.add(node.id)
        if is_layout_node(node.id):
            report.add("ReservedId", node.id, f"{node.id!r} is a reserved layout node id")
        if any(s <= 0 for s in node.size):
            report.add("NonPositiveSize", node.id, f"{node.id!r} has non-positive size {node.size}")
        if node.rotation not in VALID_ROTATIONS:
            report.add("InvalidRotation", node.id, f"{node.id!r} rotation {node.rotation} not cardinal")
        if node.cluster_extents is not None:
            hx, hy, _ = node.world_half_extents()
            mins = (hx, hx, hy, hy)
            for value, minimum, label in zip(node.cluster_extents, mins, ("x_neg", "x_pos", "y_neg", "y_pos")):
                if value < minimum - 1e-9:
                    report.add(
                        "ClusterExtentTooSmall",
                        node.id,
                        f"{node.id!r} cluster extent {label}={value} below half-extent {minimum}",
                    )

    known = set(seen) | set(LAYOUT_NODE_IDS)
    for edge in graph.edges:
        label = f"{edge.parent}->{edge.child}"
        if edge.parent == edge.child:
            report.add("SelfEdge", label, f"edge {label} has identical endpoints")
        for endpoint in (edge.parent, edge.child):
            if endpoint not in known:
                report.add("UnknownNode", label, f"edge {label} references unknown node {endpoint!r}")
        if is_layout_node(edge.child):
            report.add("LayoutNodeChild", label, f"edge {label} points into layout node {edge.child!r}")
        if is_layout_node(edge.parent):
            if edge.preposition not in LAYOUT_PREPOSITIONS:
                report.add(
                    "InvalidLayoutPreposition",
                    label,
                    f"layout edge {label} uses {edge.preposition!r}; allowed: on, in_the_corner",
                )
        else:
            if edge.preposition not in OBJECT_PREPOSITIONS:
                report.add(
                    "InvalidObjectPreposition",
                    label,
                    f"object edge {label} uses {edge.preposition!r}",
                )
        if edge.adjacency not in ADJACENCIES:
            report.add("InvalidAdjacency", label, f"edge {label} adjacency {edge.adjacency!r}")

    cycle = find_cycle(graph)
    if cycle:
        members = ", ".join(sorted(set(cycle)))
        report.add("CycleDetected", members, f"cycle through {{{members}}}")
    return report


def find_cycle(graph: SceneGraph) -> List[str]:
    """Return node ids on one cycle among object nodes, or [] if acyclic."""
    adjacency: Dict[str, List[str]] = {}
    for edge in graph.edges:
        if is_layout_node(edge.parent):
            continue
        adjacency.setdefault(edge.parent, []).append(edge.child)

    WHITE, GRAY, BLACK = 0, 1, 2
    color: Dict[str, int] = {}
    stack: List[str] = []

    def visit(u: str) -> List[str]:
        color[u] = GRAY
        stack.append(u)
        for v in sorted(adjacency.get(u, [])):
            state = color.get(v, WHITE)
            if state == GRAY:
                return stack[stack.index(v):]
            if state == WHITE:
                found = visit(v)
                if found:
                    return found
        stack.pop()
        color[u] = BLACK
        return []

    for start in sorted(adjacency):
        if color.get(start, WHITE) == WHITE:
            found = visit(start)
            if found:
                return found
    return []


def topological_order(graph: SceneGraph) -> List[str]:
    """Layout nodes first, then object nodes; ties broken by ascending id."""
    if find_cycle(graph):
        raise CyclicGraph("scene graph contains a cycle")

    indegree: Dict[str, int] = {n.id: 0 for n in graph.nodes}
    children: Dict[str, List[str]] = {}
    for edge in graph.edges:
        if edge.child in indegree:
            children.setdefault(edge.parent, []).append(edge.child)
            if not is_layout_node(edge.parent):
                indegree[edge.child] += 1

    order = list(LAYOUT_NODE_IDS)
    # (0, id) would let an orphan object precede a still-blocked one; all
    # layout nodes were already emitted so only object ids enter the heap.
    ready = [nid for nid, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    emitted = set()
    while ready:
        nid = heapq.heappop(ready)
        if nid in emitted:
            continue
        emitted.add(nid)
        order.append(nid)
        for child in children.get(nid, []):
            if child in indegree and not is_layout_node(nid):
                indegree[child] -= 1
                if indegree[child] == 0:
                    heapq.heappush(ready, child)
    # Edges from layout nodes never counted toward indegree, so every object
    # reachable only through layout roots is already ready at the start.
    return order


def compute_depths(graph: SceneGraph) -> Dict[str, int]:
    """Minimum edge-count from any layout node; layout nodes are depth 0."""
    depths: Dict[str, int] = {nid: 0 for nid in LAYOUT_NODE_IDS}
    children: Dict[str, List[str]] = {}
    for edge in graph.edges:
        children.setdefault(edge.parent, []).append(edge.child)
    queue = deque(LAYOUT_NODE_IDS)
    while queue:
        nid = queue.popleft()
        for child in children.get(nid, []):
            if child not in depths:
                depths[child] = depths[nid] + 1
                queue.append(child)
    return depths


def depth_of(graph: SceneGraph, node_id: str) -> int:
    depths = compute_depths(graph)
    if node_id not in depths:
        raise Unreachable(f"{node_id!r} is not reachable from any layout node")
    return depths[node_id]
