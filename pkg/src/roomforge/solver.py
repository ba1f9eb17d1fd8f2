"""Depth-grouped randomized backtracking placement of a refined scene graph."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .geometry import Box, check_collision, inside_room, intersection_volume
from .graphops import compute_depths, topological_order
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
    ON,
    RIGHT_OF,
    UNDER,
    WALL_EAST,
    WALL_IDS,
    WALL_NORTH,
    WALL_OUTWARD,
    WALL_SOUTH,
    WALL_WEST,
    SceneGraph,
    is_layout_node,
    world_offset,
)

_EPS = 1e-9

SOLVED = "solved"
UNSAT = "unsat"


class ParentUnplaced(Exception):
    pass


@dataclass(frozen=True)
class SolverConfig:
    samples_per_object: int = 30
    max_backtracks: int = 200
    contact_tolerance: float = 1e-6
    adjacency_gap: float = 0.05
    nonadjacent_range: Tuple[float, float] = (0.3, 1.5)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.samples_per_object <= 0 or self.max_backtracks <= 0:
            raise ValueError("budgets must be positive")
        if self.contact_tolerance <= 0 or self.adjacency_gap <= 0:
            raise ValueError("tolerances must be positive")
        lo, hi = self.nonadjacent_range
        if not (0 < lo < hi):
            raise ValueError("nonadjacent_range must satisfy 0 < min < max")


@dataclass(frozen=True)
class FeasibleRegion:
    """Box of allowed center positions; empty when any interval is inverted."""

    lo: Tuple[float, float, float]
    hi: Tuple[float, float, float]

    @property
    def empty(self) -> bool:
        return any(l > h + _EPS for l, h in zip(self.lo, self.hi))

    def clamped(self) -> "FeasibleRegion":
        hi = tuple(max(l, h) for l, h in zip(self.lo, self.hi))
        return FeasibleRegion(self.lo, hi)


@dataclass
class BacktrackEvent:
    failed_node: str
    failed_depth: int
    resumed_depth: int


@dataclass
class Layout:
    status: str
    seed: int
    placements: Dict[str, Tuple[float, float, float]] = field(default_factory=dict)
    rotations: Dict[str, int] = field(default_factory=dict)
    samples_drawn: int = 0
    backtracks: int = 0
    duration_s: float = 0.0
    deepest_depth: int = 0
    failure_counts: Dict[str, int] = field(default_factory=dict)
    events: List[BacktrackEvent] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status == SOLVED

    def to_document(self) -> dict:
        """Stable, replayable form; wall-clock excluded on purpose."""
        return {
            "status": self.status,
            "seed": self.seed,
            "placements": {
                nid: {"position": list(pos), "rotation": self.rotations[nid]}
                for nid, pos in sorted(self.placements.items())
            },
            "stats": {
                "samples_drawn": self.samples_drawn,
                "backtracks": self.backtracks,
                "deepest_depth": self.deepest_depth,
                "failure_counts": dict(sorted(self.failure_counts.items())),
            },
        }


def _gap_range(adjacency: str, config: SolverConfig) -> Tuple[float, float]:
    if adjacency == ADJACENT:
        return (0.0, config.adjacency_gap)
    return config.nonadjacent_range


def _corner_intervals(wall_id: str, room, chx: float, chy: float, gap: float):
    w, d = room.width_x, room.depth_y
    if wall_id in (WALL_SOUTH, FLOOR, WALL_WEST):
        x = (chx, chx + gap)
        y = (chy, chy + gap)
    elif wall_id == WALL_NORTH:
        x = (chx, chx + gap)
        y = (d - chy - gap, d - chy)
    elif wall_id == WALL_EAST:
        x = (w - chx - gap, w - chx)
        y = (chy, chy + gap)
    else:
        raise ValueError(f"in_the_corner parent must be a wall or the floor, got {wall_id!r}")
    return x, y


def feasible_region(
    node_id: str,
    graph: SceneGraph,
    placements: Dict[str, Tuple[float, float, float]],
    config: SolverConfig,
) -> FeasibleRegion:
    """Intersect per-edge constraint boxes with the cluster-shrunk room."""
    node = graph.get_node(node_id)
    chx, chy, chz = node.world_half_extents()
    cs = node.cluster_extents or (chx, chx, chy, chy)
    room = graph.room
    lo = [cs[0], cs[2], chz]
    hi = [room.width_x - cs[1], room.depth_y - cs[3], room.height_z - chz]

    def clip(axis: int, low: float, high: float) -> None:
        lo[axis] = max(lo[axis], low)
        hi[axis] = min(hi[axis], high)

    for edge in graph.parents_of(node_id):
        prep = edge.preposition
        if is_layout_node(edge.parent):
            if prep == IN_THE_CORNER:
                (x0, x1), (y0, y1) = _corner_intervals(
                    edge.parent, room, chx, chy, config.adjacency_gap
                )
                clip(0, x0, x1)
                clip(1, y0, y1)
                clip(2, chz, chz)
            elif edge.parent == FLOOR:
                clip(2, chz, chz)
            elif edge.parent == MIDDLE_OF_ROOM:
                mx0, mx1, my0, my1 = room.middle_region()
                clip(0, mx0, mx1)
                clip(1, my0, my1)
                clip(2, chz, chz)
            elif edge.parent == CEILING:
                top = room.height_z
                clip(2, top - chz - config.adjacency_gap, top - chz)
            elif edge.parent in WALL_IDS:
                gmin, gmax = 0.0, config.adjacency_gap
                if edge.parent == WALL_SOUTH:
                    clip(1, chy + gmin, chy + gmax)
                elif edge.parent == WALL_NORTH:
                    clip(1, room.depth_y - chy - gmax, room.depth_y - chy - gmin)
                elif edge.parent == WALL_WEST:
                    clip(0, chx + gmin, chx + gmax)
                else:
                    clip(0, room.width_x - chx - gmax, room.width_x - chx - gmin)
            continue

        if edge.parent not in placements:
            raise ParentUnplaced(f"parent {edge.parent!r} of {node_id!r} is not placed")
        parent = graph.get_node(edge.parent)
        px, py, pz = placements[edge.parent]
        phx, phy, phz = parent.world_half_extents()

        if prep == ON:
            clip(2, pz + phz + chz, pz + phz + chz)
            clip(0, px - phx + chx, px + phx - chx)
            clip(1, py - phy + chy, py + phy - chy)
        elif prep == UNDER:
            if 2 * chz > pz - phz + _EPS:
                return FeasibleRegion((1.0, 1.0, 1.0), (0.0, 0.0, 0.0))
            clip(2, chz, chz)
            clip(0, px - phx + chx, px + phx - chx)
            clip(1, py - phy + chy, py + phy - chy)
        elif prep == ABOVE:
            clip(2, pz + phz + chz, room.height_z - chz)
            clip(0, px - phx - chx, px + phx + chx)
            clip(1, py - phy - chy, py + phy + chy)
        elif prep in LATERAL_PREPOSITIONS:
            dx, dy = world_offset(prep, parent.rotation)
            gmin, gmax = _gap_range(edge.adjacency, config)
            if dx:
                face = px + dx * phx
                near = face + dx * (gmin + chx)
                far = face + dx * (gmax + chx)
                clip(0, min(near, far), max(near, far))
                span = max(phy - chy, 0.0)
                clip(1, py - span, py + span)
            else:
                face = py + dy * phy
                near = face + dy * (gmin + chy)
                far = face + dy * (gmax + chy)
                clip(1, min(near, far), max(near, far))
                span = max(phx - chx, 0.0)
                clip(0, px - span, px + span)
            support = pz - phz + chz
            clip(2, support, support)

        # Keep the child's whole cluster inside the parent's reserved
        # clearance so placed subtrees stay within their cluster extents.
        pcs = parent.cluster_extents
        if pcs is not None:
            ccs = node.cluster_extents or (chx, chx, chy, chy)
            clip(0, px - pcs[0] + ccs[0], px + pcs[1] - ccs[1])
            clip(1, py - pcs[2] + ccs[2], py + pcs[3] - ccs[3])
    region = FeasibleRegion(tuple(lo), tuple(hi))
    return region if region.empty else region.clamped()


def sanctioned_pairs(graph: SceneGraph) -> Set[FrozenSet[str]]:
    return {
        frozenset((e.parent, e.child))
        for e in graph.edges
        if not is_layout_node(e.parent)
    }


def _box_for(graph: SceneGraph, node_id: str, pos: Tuple[float, float, float]) -> Box:
    return Box(center=pos, half=graph.get_node(node_id).world_half_extents())


def solve_layout(graph: SceneGraph, config: Optional[SolverConfig] = None) -> Layout:
    """Place object nodes depth group by depth group; backtrack on dead ends."""
    config = config or SolverConfig()
    start = time.perf_counter()
    rng = random.Random(config.seed)
    layout = Layout(status=UNSAT, seed=config.seed)
    layout.rotations = {n.id: n.rotation for n in graph.nodes}

    depths = compute_depths(graph)
    object_ids = [nid for nid in topological_order(graph) if not is_layout_node(nid)]
    for nid in object_ids:
        if nid not in depths:
            raise ParentUnplaced(f"{nid!r} is unreachable from the room layout")

    if not object_ids:
        layout.status = SOLVED
        layout.duration_s = time.perf_counter() - start
        return layout

    by_depth: Dict[int, List[str]] = {}
    for nid in object_ids:
        by_depth.setdefault(depths[nid], []).append(nid)
    max_depth = max(by_depth)
    sanctioned = sanctioned_pairs(graph)

    placements: Dict[str, Tuple[float, float, float]] = {}
    boxes: Dict[str, Box] = {}
    depth = 1

    while depth <= max_depth:
        failed_node = None
        for nid in by_depth.get(depth, []):
            region = feasible_region(nid, graph, placements, config)
            placed = False
            if not region.empty:
                for _ in range(config.samples_per_object):
                    layout.samples_drawn += 1
                    pos = tuple(
                        rng.uniform(l, h) if h > l else l
                        for l, h in zip(region.lo, region.hi)
                    )
                    box = _box_for(graph, nid, pos)
                    if not check_collision(
                        box, boxes, sanctioned, config.contact_tolerance, candidate_id=nid
                    ):
                        placements[nid] = pos
                        boxes[nid] = box
                        placed = True
                        break
            if not placed:
                failed_node = nid
                break

        if failed_node is None:
            layout.deepest_depth = max(layout.deepest_depth, depth)
            depth += 1
            continue

        layout.failure_counts[failed_node] = layout.failure_counts.get(failed_node, 0) + 1
        layout.backtracks += 1
        if layout.backtracks > config.max_backtracks:
            layout.placements = placements
            layout.duration_s = time.perf_counter() - start
            return layout

        resume = max(depth - 1, 1)
        layout.events.append(BacktrackEvent(failed_node, depth, resume))
        for nid in list(placements):
            if depths[nid] >= resume:
                del placements[nid]
                del boxes[nid]
        depth = resume

    layout.status = SOLVED
    layout.placements = placements
    layout.deepest_depth = max_depth
    layout.duration_s = time.perf_counter() - start
    return layout


def verify_layout(
    graph: SceneGraph,
    layout: Layout,
    config: Optional[SolverConfig] = None,
    tol: float = 1e-6,
) -> List[str]:
    """Independent soundness check of a solved layout.

    Re-checks room containment, pairwise collisions, and each edge's
    geometric predicate directly from the placements, without reusing the
    sampler's region construction.
    """
    config = config or SolverConfig()
    problems: List[str] = []
    room = graph.room
    room_dims = (room.width_x, room.depth_y, room.height_z)
    boxes: Dict[str, Box] = {}
    for nid, pos in layout.placements.items():
        boxes[nid] = _box_for(graph, nid, pos)
        if not inside_room(boxes[nid], room_dims, tol=1e-3):
            problems.append(f"{nid} outside room")

    ids = sorted(boxes)
    sanctioned = sanctioned_pairs(graph)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if frozenset((a, b)) in sanctioned:
                continue
            vol = intersection_volume(boxes[a], boxes[b])
            if vol > config.contact_tolerance:
                problems.append(f"{a} and {b} overlap by {vol:.3e} m^3")

    for edge in graph.edges:
        if edge.child not in boxes:
            if layout.solved:
                problems.append(f"{edge.child} missing from solved layout")
            continue
        problems.extend(_check_edge_predicate(graph, edge, boxes, config, tol))
    return problems


def _check_edge_predicate(graph, edge, boxes, config, tol) -> List[str]:
    child_box = boxes[edge.child]
    room = graph.room
    prep = edge.preposition
    label = f"{edge.parent}->{edge.child}({prep})"
    out: List[str] = []

    if is_layout_node(edge.parent):
        if prep == IN_THE_CORNER:
            node = graph.get_node(edge.child)
            chx, chy, _ = node.world_half_extents()
            (x0, x1), (y0, y1) = _corner_intervals(
                edge.parent, room, chx, chy, config.adjacency_gap
            )
            cx, cy, _ = child_box.center
            if not (x0 - tol <= cx <= x1 + tol and y0 - tol <= cy <= y1 + tol):
                out.append(f"{label}: not in the corner")
            if abs(child_box.min[2]) > tol:
                out.append(f"{label}: not resting on the floor")
        elif edge.parent in (FLOOR, MIDDLE_OF_ROOM):
            if abs(child_box.min[2]) > tol:
                out.append(f"{label}: not resting on the floor")
            if edge.parent == MIDDLE_OF_ROOM:
                mx0, mx1, my0, my1 = room.middle_region()
                cx, cy, _ = child_box.center
                if not (mx0 - tol <= cx <= mx1 + tol and my0 - tol <= cy <= my1 + tol):
                    out.append(f"{label}: center outside the middle region")
        elif edge.parent == CEILING:
            gap = room.height_z - child_box.max[2]
            if not (-tol <= gap <= config.adjacency_gap + tol):
                out.append(f"{label}: not against the ceiling")
        elif edge.parent in WALL_IDS:
            dx, dy = WALL_OUTWARD[edge.parent]
            if dx > 0:
                gap = room.width_x - child_box.max[0]
            elif dx < 0:
                gap = child_box.min[0]
            elif dy > 0:
                gap = room.depth_y - child_box.max[1]
            else:
                gap = child_box.min[1]
            if not (-tol <= gap <= config.adjacency_gap + tol):
                out.append(f"{label}: not against the wall")
        return out

    if edge.parent not in boxes:
        return [f"{label}: parent unplaced"]
    parent_box = boxes[edge.parent]
    parent = graph.get_node(edge.parent)

    if prep == ON:
        if abs(child_box.min[2] - parent_box.max[2]) > tol:
            out.append(f"{label}: child bottom not on parent top")
        for axis in range(2):
            if child_box.min[axis] < parent_box.min[axis] - tol or child_box.max[axis] > parent_box.max[axis] + tol:
                out.append(f"{label}: footprint off parent top face")
                break
    elif prep == UNDER:
        if child_box.max[2] > parent_box.min[2] + tol:
            out.append(f"{label}: child not fully below parent")
        if abs(child_box.min[2]) > tol:
            out.append(f"{label}: child not resting on the floor")
    elif prep == ABOVE:
        if child_box.min[2] < parent_box.max[2] - tol:
            out.append(f"{label}: child not above parent")
        for axis in range(2):
            if child_box.min[axis] > parent_box.max[axis] + tol or child_box.max[axis] < parent_box.min[axis] - tol:
                out.append(f"{label}: footprints not overlapping")
                break
    elif prep in LATERAL_PREPOSITIONS:
        dx, dy = world_offset(prep, parent.rotation)
        axis = 0 if dx else 1
        sign = dx if dx else dy
        if sign > 0:
            gap = child_box.min[axis] - parent_box.max[axis]
        else:
            gap = parent_box.min[axis] - child_box.max[axis]
        gmin, gmax = _gap_range(edge.adjacency, config)
        if not (gmin - tol <= gap <= gmax + tol):
            out.append(f"{label}: gap {gap:.3f} outside [{gmin}, {gmax}]")
        cross = 1 - axis
        if child_box.min[cross] < parent_box.min[cross] - tol or child_box.max[cross] > parent_box.max[cross] + tol:
            # Child may be wider than the parent; then centers must align.
            if abs(child_box.center[cross] - parent_box.center[cross]) > tol:
                out.append(f"{label}: child outside parent face span")
        if abs(child_box.min[2] - parent_box.min[2]) > tol:
            out.append(f"{label}: child not on parent support plane")
    return out
