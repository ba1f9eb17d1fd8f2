"""Deterministic spatial-implausibility checks and graph repair.

Detection covers the three implausibility kinds (out-of-bounds children of
wall-flush parents, adjacency conflicts, parent/child size incompatibility)
plus orphaned objects. Resolution prefers backend-suggested re-edging when a
backend is available and otherwise applies a fixed fallback table, removing
nodes only as a last resort.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .graphops import find_cycle, topological_order
from .scene import (
    ABOVE,
    ADJACENT,
    BEHIND,
    CEILING,
    FLOOR,
    IN_FRONT,
    IN_THE_CORNER,
    LATERAL_PREPOSITIONS,
    LEFT_OF,
    MIDDLE_OF_ROOM,
    NOT_ADJACENT,
    ON,
    RIGHT_OF,
    UNDER,
    WALL_EAST,
    WALL_IDS,
    WALL_NORTH,
    WALL_OUTWARD,
    WALL_SOUTH,
    WALL_WEST,
    Edge,
    SceneGraph,
    is_layout_node,
    world_offset,
)

OUT_OF_BOUNDS = "OutOfBounds"
ADJACENCY_CONFLICT = "AdjacencyConflict"
SIZE_INCOMPATIBILITY = "SizeIncompatibility"
ORPHAN = "Orphan"

_OPPOSITE = {LEFT_OF: RIGHT_OF, RIGHT_OF: LEFT_OF, IN_FRONT: BEHIND, BEHIND: IN_FRONT}

# 90-degree rotation cycle used by the out-of-bounds fallback.
_ROTATE_PREP = {BEHIND: LEFT_OF, LEFT_OF: IN_FRONT, IN_FRONT: RIGHT_OF, RIGHT_OF: BEHIND}

# Deterministic corner choice: the minimum-coordinate end of the wall.
_CORNER_PARTNER = {
    WALL_NORTH: WALL_WEST,
    WALL_SOUTH: WALL_WEST,
    WALL_EAST: WALL_SOUTH,
    WALL_WEST: WALL_SOUTH,
    FLOOR: None,  # southwest corner
}


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    context: Tuple[str, ...]
    message: str


@dataclass
class ResolutionResult:
    graph: SceneGraph
    actions: List[str] = field(default_factory=list)
    removed: List[str] = field(default_factory=list)


def flush_directions(graph: SceneGraph, node_id: str) -> List[Tuple[float, float]]:
    """World directions in which the node sits flush against a room boundary."""
    dirs: List[Tuple[float, float]] = []
    for edge in graph.parents_of(node_id):
        if edge.parent in WALL_IDS and edge.preposition == ON:
            dirs.append(WALL_OUTWARD[edge.parent])
        elif edge.preposition == IN_THE_CORNER:
            if edge.parent in WALL_IDS:
                dirs.append(WALL_OUTWARD[edge.parent])
                dirs.append(WALL_OUTWARD[_CORNER_PARTNER[edge.parent]])
            elif edge.parent == FLOOR:
                dirs.append(WALL_OUTWARD[WALL_SOUTH])
                dirs.append(WALL_OUTWARD[WALL_WEST])
    return dirs


def _same_dir(a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    return abs(a[0] - b[0]) < 1e-9 and abs(a[1] - b[1]) < 1e-9


def _detect_out_of_bounds(graph: SceneGraph) -> List[Violation]:
    found = []
    for parent in graph.nodes:
        blocked = flush_directions(graph, parent.id)
        if not blocked:
            continue
        for edge in graph.children_of(parent.id):
            if edge.preposition not in LATERAL_PREPOSITIONS:
                continue
            direction = world_offset(edge.preposition, parent.rotation)
            if any(_same_dir(direction, d) for d in blocked):
                found.append(
                    Violation(
                        OUT_OF_BOUNDS,
                        edge.child,
                        (parent.id, edge.child),
                        f"{edge.child!r} placed {edge.preposition} of {parent.id!r}, "
                        f"which is flush against the room boundary in that direction",
                    )
                )
    return found


def _detect_adjacency_conflicts(graph: SceneGraph) -> List[Violation]:
    found = []
    edge_set = {(e.parent, e.child, e.preposition) for e in graph.edges}
    for edge in graph.edges:
        if edge.adjacency != ADJACENT or edge.preposition not in LATERAL_PREPOSITIONS:
            continue
        a, b, p = edge.parent, edge.child, edge.preposition
        for node in graph.nodes:
            c = node.id
            if c in (a, b):
                continue
            interposed = ((a, c, p) in edge_set and (c, b, p) in edge_set) or (
                (a, c, p) in edge_set and (b, c, _OPPOSITE[p]) in edge_set
            )
            if interposed:
                found.append(
                    Violation(
                        ADJACENCY_CONFLICT,
                        c,
                        (a, b),
                        f"{c!r} is interposed between {a!r} and {b!r}, "
                        f"which are declared adjacent ({p})",
                    )
                )
    return found


def _extent(graph: SceneGraph, node_id: str, axis: int) -> float:
    node = graph.get_node(node_id)
    return 2.0 * node.world_half_extents()[axis]


def _parent_capacity(graph: SceneGraph, parent_id: str, axis: int) -> Optional[float]:
    if parent_id in WALL_IDS:
        return graph.room.wall_span(parent_id)
    if is_layout_node(parent_id):
        return None
    return _extent(graph, parent_id, axis)


def _detect_size_incompatibilities(graph: SceneGraph) -> List[Violation]:
    found = []
    groups: Dict[Tuple[str, str], List[str]] = {}
    for edge in graph.edges:
        groups.setdefault((edge.parent, edge.preposition), []).append(edge.child)

    for (parent_id, prep), children in sorted(groups.items()):
        children = sorted(children)
        room = graph.room
        if prep in LATERAL_PREPOSITIONS and not is_layout_node(parent_id):
            direction = world_offset(prep, graph.get_node(parent_id).rotation)
            axis = 0 if direction[0] else 1
        elif prep == ON and parent_id in WALL_IDS:
            axis = 0 if parent_id in (WALL_NORTH, WALL_SOUTH) else 1
        elif prep in (ON, UNDER) and not is_layout_node(parent_id):
            axis = 0
        elif prep == ON and parent_id in (FLOOR, CEILING, MIDDLE_OF_ROOM):
            # No packing line on the floor; require each footprint to fit.
            for child in children:
                if (
                    _extent(graph, child, 0) > room.width_x + 1e-9
                    or _extent(graph, child, 1) > room.depth_y + 1e-9
                ):
                    found.append(
                        Violation(
                            SIZE_INCOMPATIBILITY,
                            parent_id,
                            tuple(children),
                            f"{child!r} footprint exceeds the floor of the room",
                        )
                    )
                    break
            continue
        else:
            continue

        capacity = _parent_capacity(graph, parent_id, axis)
        if capacity is None:
            continue
        required = sum(_extent(graph, c, axis) for c in children)
        cross_ok = True
        if prep in (ON, UNDER) and not is_layout_node(parent_id):
            cross = _extent(graph, parent_id, 1)
            cross_ok = all(_extent(graph, c, 1) <= cross + 1e-9 for c in children)
        if required > capacity + 1e-9 or not cross_ok:
            found.append(
                Violation(
                    SIZE_INCOMPATIBILITY,
                    parent_id,
                    tuple(children),
                    f"children {children} need {required:.3f} m along the "
                    f"{'xy'[axis]}-axis of {parent_id!r} but only {capacity:.3f} m is available",
                )
            )
    return found


def _detect_orphans(graph: SceneGraph) -> List[Violation]:
    with_parent = {e.child for e in graph.edges}
    return [
        Violation(ORPHAN, n.id, (n.id,), f"{n.id!r} has no inbound edge")
        for n in graph.nodes
        if n.id not in with_parent
    ]


def detect_violations(graph: SceneGraph) -> List[Violation]:
    found = []
    found.extend(_detect_out_of_bounds(graph))
    found.extend(_detect_adjacency_conflicts(graph))
    found.extend(_detect_size_incompatibilities(graph))
    found.extend(_detect_orphans(graph))
    return found


def _remove_node(graph: SceneGraph, node_id: str) -> SceneGraph:
    nodes = [n for n in graph.nodes if n.id != node_id]
    edges = [e for e in graph.edges if node_id not in (e.parent, e.child)]
    return graph.with_nodes(nodes).with_edges(edges)


def _apply_fallback(graph: SceneGraph, violation: Violation, result: ResolutionResult) -> SceneGraph:
    if violation.kind == ORPHAN:
        result.actions.append(f"attached orphan {violation.subject!r} to middle_of_room")
        return graph.with_edges(
            list(graph.edges) + [Edge(MIDDLE_OF_ROOM, violation.subject, ON, ADJACENT)]
        )

    if violation.kind == OUT_OF_BOUNDS:
        parent_id, child_id = violation.context
        parent = graph.get_node(parent_id)
        blocked = flush_directions(graph, parent_id)
        edges = list(graph.edges)
        for i, edge in enumerate(edges):
            if edge.parent == parent_id and edge.child == child_id and edge.preposition in _ROTATE_PREP:
                prep = edge.preposition
                for _ in range(3):
                    prep = _ROTATE_PREP[prep]
                    direction = world_offset(prep, parent.rotation)
                    if not any(_same_dir(direction, d) for d in blocked):
                        break
                edges[i] = Edge(parent_id, child_id, prep, NOT_ADJACENT)
                result.actions.append(
                    f"rewrote edge {parent_id}->{child_id} from {edge.preposition} to {prep}"
                )
                break
        return graph.with_edges(edges)

    if violation.kind == ADJACENCY_CONFLICT:
        a, b = violation.context
        edges = [
            Edge(e.parent, e.child, e.preposition, NOT_ADJACENT)
            if e.parent == a and e.child == b and e.adjacency == ADJACENT
            else e
            for e in graph.edges
        ]
        result.actions.append(f"demoted adjacency of edge {a}->{b} to not_adjacent")
        return graph.with_edges(edges)

    if violation.kind == SIZE_INCOMPATIBILITY:
        parent_id = violation.subject
        dropped = max(violation.context)
        inbound = sorted(graph.parents_of(parent_id), key=lambda e: e.parent)
        if inbound and not is_layout_node(inbound[0].parent):
            new_edge = Edge(inbound[0].parent, dropped, inbound[0].preposition, NOT_ADJACENT)
        elif inbound:
            new_edge = Edge(inbound[0].parent, dropped, inbound[0].preposition, inbound[0].adjacency)
        else:
            new_edge = Edge(MIDDLE_OF_ROOM, dropped, ON, ADJACENT)
        edges = [e for e in graph.edges if not (e.parent == parent_id and e.child == dropped)]
        edges.append(new_edge)
        result.actions.append(
            f"moved {dropped!r} off crowded parent {parent_id!r} to {new_edge.parent!r}"
        )
        return graph.with_edges(edges)

    raise ValueError(f"unknown violation kind {violation.kind!r}")


def resolve_violations(
    graph: SceneGraph,
    violations: List[Violation],
    backend=None,
    max_rounds: int = 200,
) -> ResolutionResult:
    """Repair until no violation of the detected kinds remains.

    A violation that keeps reappearing for the same subject gets its subject
    removed from the scene entirely.
    """
    result = ResolutionResult(graph=graph)
    attempts: Dict[Tuple[str, str], int] = {}
    current = violations
    for _ in range(max_rounds):
        if not current:
            break
        violation = current[0]
        key = (violation.kind, violation.subject)
        attempts[key] = attempts.get(key, 0) + 1
        if attempts[key] > 5:
            result.graph = _remove_node(result.graph, violation.subject)
            result.removed.append(violation.subject)
            result.actions.append(
                f"removed {violation.subject!r} after repeated {violation.kind} violations"
            )
        else:
            repaired = None
            if backend is not None:
                repaired = _backend_resolve(result.graph, violation, backend, result)
            if repaired is not None:
                result.graph = repaired
            else:
                result.graph = _apply_fallback(result.graph, violation, result)
        current = detect_violations(result.graph)
    return result


def _backend_resolve(graph, violation, backend, result) -> Optional[SceneGraph]:
    """Ask the backend for a replacement edge set for the offending object."""
    import json

    from . import document
    from .agents.backends import BackendError, DecodingParams
    from .agents.prompts import corrector_messages

    subject = violation.subject
    if is_layout_node(subject) or not graph.has_node(subject):
        return None
    doc = document.serialize_graph(graph)
    entry = next(e for e in doc["objects"] if e["new_object_id"] == subject)
    placed = [n.id for n in graph.nodes if n.id != subject]
    system, user = corrector_messages(entry, violation.message, placed)
    decoding = DecodingParams()
    for _ in range(3):
        try:
            raw = backend.generate("corrector", system, user, decoding)
        except BackendError:
            return None
        try:
            parsed = document.normalize_entry(json.loads(raw))
            document.validate_against("engineer_object", parsed)
        except Exception:
            continue
        if parsed.get("new_object_id") != subject:
            continue
        edges = [e for e in graph.edges if e.child != subject]
        edges.extend(document.edges_from_entry(parsed))
        candidate = graph.with_edges(edges)
        if not any(v.subject == subject and v.kind == violation.kind for v in detect_violations(candidate)):
            result.actions.append(f"backend re-edged {subject!r}")
            return candidate
    return None


_CHAIN_PREP = {ON: RIGHT_OF, UNDER: RIGHT_OF, ABOVE: RIGHT_OF, IN_THE_CORNER: RIGHT_OF}


def refine_siblings(graph: SceneGraph, backend=None) -> SceneGraph:
    """Add ordering edges so same-preposition siblings have a strict total order.

    The fallback orders siblings by ascending node id; existing ordering edges
    between group members are kept and only missing links are added.
    """
    groups: Dict[Tuple[str, str], List[str]] = {}
    for edge in graph.edges:
        groups.setdefault((edge.parent, edge.preposition), []).append(edge.child)

    new_edges = list(graph.edges)
    for (parent_id, prep), members in sorted(groups.items()):
        members = sorted(set(members))
        if len(members) < 2:
            continue
        chain_prep = _CHAIN_PREP.get(prep, prep if prep in LATERAL_PREPOSITIONS else RIGHT_OF)
        member_set = set(members)
        internal = [
            e
            for e in new_edges
            if e.parent in member_set and e.child in member_set and e.preposition in LATERAL_PREPOSITIONS
        ]
        order = _member_order(members, internal)
        if order is None:
            continue  # cyclic sibling edges; break_cycles runs afterwards
        connected = {(e.parent, e.child) for e in internal} | {(e.child, e.parent) for e in internal}
        for a, b in zip(order, order[1:]):
            if (a, b) not in connected:
                new_edges.append(Edge(a, b, chain_prep, NOT_ADJACENT))
    return graph.with_edges(new_edges)


def _member_order(members: List[str], internal: List[Edge]) -> Optional[List[str]]:
    indegree = {m: 0 for m in members}
    children: Dict[str, List[str]] = {m: [] for m in members}
    seen = set()
    for e in internal:
        if (e.parent, e.child) in seen:
            continue
        seen.add((e.parent, e.child))
        children[e.parent].append(e.child)
        indegree[e.child] += 1
    import heapq

    ready = [m for m in members if indegree[m] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        m = heapq.heappop(ready)
        order.append(m)
        for c in sorted(children[m]):
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(members):
        return None
    return order


def break_cycles(graph: SceneGraph) -> SceneGraph:
    """Remove the last-added edge of each detected cycle until acyclic."""
    current = graph
    while True:
        cycle = find_cycle(current)
        if not cycle:
            return current
        pairs = set(zip(cycle, cycle[1:] + cycle[:1]))
        last_index = max(
            i for i, e in enumerate(current.edges) if (e.parent, e.child) in pairs
        )
        edges = [e for i, e in enumerate(current.edges) if i != last_index]
        current = current.with_edges(edges)


def sibling_order_is_total(graph: SceneGraph) -> bool:
    """Every (parent, preposition) group of >=2 siblings is totally ordered."""
    groups: Dict[Tuple[str, str], List[str]] = {}
    for edge in graph.edges:
        groups.setdefault((edge.parent, edge.preposition), []).append(edge.child)
    reach: Dict[str, set] = {}

    def descendants(node: str) -> set:
        if node in reach:
            return reach[node]
        out = set()
        for e in graph.edges:
            if e.parent == node and e.preposition in LATERAL_PREPOSITIONS:
                out.add(e.child)
                out |= descendants(e.child)
        reach[node] = out
        return out

    for (_, _), members in groups.items():
        members = sorted(set(members))
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if b not in descendants(a) and a not in descendants(b):
                    return False
    return True
