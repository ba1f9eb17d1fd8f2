"""Exhaustive grid reference solver used to cross-check the randomized solver.

Candidate centers lie on a 0.05 m lattice. When every object size is a
multiple of 0.1 m, room dimensions are multiples of 0.1 m, and gap bounds are
multiples of 0.05 m, every feasibility interval has lattice-aligned endpoints;
a nonempty interval then always contains a lattice point, so the grid search
decides satisfiability exactly for such instances.

The interval construction below is written from the placement rules directly
and shares no region code with the production solver.
"""

import math

from roomforge.geometry import Box, intersection_volume
from roomforge.graphops import topological_order
from roomforge.scene import (
    ABOVE,
    ADJACENT,
    CEILING,
    FLOOR,
    IN_THE_CORNER,
    LATERAL_PREPOSITIONS,
    MIDDLE_OF_ROOM,
    ON,
    UNDER,
    WALL_EAST,
    WALL_IDS,
    WALL_NORTH,
    WALL_SOUTH,
    WALL_WEST,
    is_layout_node,
    world_offset,
)

STEP = 0.05

_DIR_INDEX = {(-1.0, 0.0): 0, (1.0, 0.0): 1, (0.0, -1.0): 2, (0.0, 1.0): 3}
_OPP = {0: 1, 1: 0, 2: 3, 3: 2}


def recursive_cluster_extents(graph, node_id, nonadjacent_min=0.3):
    """Direct recursive restatement of the clearance definition."""
    node = graph.get_node(node_id)
    whx, why, _ = node.world_half_extents()
    out = [whx, whx, why, why]
    for e in graph.children_of(node_id):
        child_cs = recursive_cluster_extents(graph, e.child, nonadjacent_min)
        if e.preposition in LATERAL_PREPOSITIONS:
            idx = _DIR_INDEX[world_offset(e.preposition, node.rotation)]
            gap = 0.0 if e.adjacency == ADJACENT else nonadjacent_min
            parent_half = whx if idx < 2 else why
            out[idx] = max(out[idx], parent_half + gap + child_cs[_OPP[idx]] + child_cs[idx])
            child = graph.get_node(e.child)
            chx, chy, _ = child.world_half_extents()
            halves = (whx, whx, why, why)
            child_halves = (chx, chx, chy, chy)
            for cross in (2, 3) if idx < 2 else (0, 1):
                slack = max(halves[cross] - child_halves[cross], 0.0)
                out[cross] = max(out[cross], slack + child_cs[cross])
        else:
            child = graph.get_node(e.child)
            chx, chy, _ = child.world_half_extents()
            halves = (whx, whx, why, why)
            child_halves = (chx, chx, chy, chy)
            for idx in range(4):
                out[idx] = max(
                    out[idx], max(halves[idx] - child_halves[idx], 0.0) + child_cs[idx]
                )
    return tuple(out)


def lattice(lo, hi, step=STEP):
    n0 = math.ceil(round(lo / step, 9) - 1e-9)
    n1 = math.floor(round(hi / step, 9) + 1e-9)
    return [round(n * step, 10) for n in range(n0, n1 + 1)]


def _meet(a, b):
    return (max(a[0], b[0]), min(a[1], b[1]))


def _edge_intervals(graph, e, placements, config, extents=None):
    """Axis intervals for the child's center implied by one edge."""
    room = graph.room
    child = graph.get_node(e.child)
    chx, chy, chz = child.world_half_extents()
    gap = config.adjacency_gap
    full = ((-math.inf, math.inf),) * 3

    if is_layout_node(e.parent):
        if e.preposition == IN_THE_CORNER:
            if e.parent in (FLOOR, WALL_SOUTH, WALL_WEST):
                x = (chx, chx + gap)
                y = (chy, chy + gap)
            elif e.parent == WALL_NORTH:
                x = (chx, chx + gap)
                y = (room.depth_y - chy - gap, room.depth_y - chy)
            elif e.parent == WALL_EAST:
                x = (room.width_x - chx - gap, room.width_x - chx)
                y = (chy, chy + gap)
            else:
                raise ValueError(e.parent)
            return (x, y, (chz, chz))
        if e.parent == FLOOR:
            return (full[0], full[1], (chz, chz))
        if e.parent == MIDDLE_OF_ROOM:
            w, d = room.width_x, room.depth_y
            return ((w / 4, 3 * w / 4), (d / 4, 3 * d / 4), (chz, chz))
        if e.parent == CEILING:
            top = room.height_z
            return (full[0], full[1], (top - chz - gap, top - chz))
        if e.parent in WALL_IDS:
            if e.parent == WALL_SOUTH:
                return (full[0], (chy, chy + gap), full[2])
            if e.parent == WALL_NORTH:
                return (full[0], (room.depth_y - chy - gap, room.depth_y - chy), full[2])
            if e.parent == WALL_WEST:
                return ((chx, chx + gap), full[1], full[2])
            return ((room.width_x - chx - gap, room.width_x - chx), full[1], full[2])
        raise ValueError(e.parent)

    parent = graph.get_node(e.parent)
    px, py, pz = placements[e.parent]
    phx, phy, phz = parent.world_half_extents()

    cluster = (full[0], full[1])
    if extents is not None:
        pcs = extents[e.parent]
        ccs = extents[e.child]
        cluster = (
            (px - pcs[0] + ccs[0], px + pcs[1] - ccs[1]),
            (py - pcs[2] + ccs[2], py + pcs[3] - ccs[3]),
        )

    if e.preposition == ON:
        base = (
            (px - phx + chx, px + phx - chx),
            (py - phy + chy, py + phy - chy),
            (pz + phz + chz, pz + phz + chz),
        )
    elif e.preposition == UNDER:
        base = (
            (px - phx + chx, px + phx - chx),
            (py - phy + chy, py + phy - chy),
            (chz, min(chz, pz - phz - chz)),
        )
    elif e.preposition == ABOVE:
        base = (
            (px - phx - chx, px + phx + chx),
            (py - phy - chy, py + phy + chy),
            (pz + phz + chz, math.inf),
        )
    elif e.preposition in LATERAL_PREPOSITIONS:
        dx, dy = world_offset(e.preposition, parent.rotation)
        gmin, gmax = (
            (0.0, config.adjacency_gap)
            if e.adjacency == ADJACENT
            else config.nonadjacent_range
        )
        z = (pz - phz + chz, pz - phz + chz)
        if dx:
            a = px + dx * (phx + gmin + chx)
            b = px + dx * (phx + gmax + chx)
            span = max(phy - chy, 0.0)
            base = ((min(a, b), max(a, b)), (py - span, py + span), z)
        else:
            a = py + dy * (phy + gmin + chy)
            b = py + dy * (phy + gmax + chy)
            span = max(phx - chx, 0.0)
            base = ((px - span, px + span), (min(a, b), max(a, b)), z)
    else:
        raise ValueError(e.preposition)
    return (_meet(base[0], cluster[0]), _meet(base[1], cluster[1]), base[2])


def candidate_positions(graph, node_id, placements, config, extents=None):
    room = graph.room
    chx, chy, chz = graph.get_node(node_id).world_half_extents()
    intervals = [
        (chx, room.width_x - chx),
        (chy, room.depth_y - chy),
        (chz, room.height_z - chz),
    ]
    if extents is not None:
        cs = extents[node_id]
        intervals[0] = _meet(intervals[0], (cs[0], room.width_x - cs[1]))
        intervals[1] = _meet(intervals[1], (cs[2], room.depth_y - cs[3]))
    for e in graph.parents_of(node_id):
        per_axis = _edge_intervals(graph, e, placements, config, extents)
        intervals = [_meet(have, new) for have, new in zip(intervals, per_axis)]
    axes = [lattice(lo, hi) for lo, hi in intervals]
    return [(x, y, z) for x in axes[0] for y in axes[1] for z in axes[2]]


def oracle_solve(graph, config):
    """Exhaustive DFS over lattice placements; returns True iff satisfiable."""
    order = [nid for nid in topological_order(graph) if not is_layout_node(nid)]
    annotated = any(graph.get_node(nid).cluster_extents is not None for nid in order)
    extents = (
        {
            nid: recursive_cluster_extents(graph, nid, config.nonadjacent_range[0])
            for nid in order
        }
        if annotated
        else None
    )
    sanctioned = {
        frozenset((e.parent, e.child))
        for e in graph.edges
        if not is_layout_node(e.parent)
    }
    halves = {nid: graph.get_node(nid).world_half_extents() for nid in order}
    object_parents = {
        nid: [e.parent for e in graph.parents_of(nid) if not is_layout_node(e.parent)]
        for nid in order
    }
    placements = {}
    boxes = {}

    def dfs():
        if len(placements) == len(order):
            return True
        # fail-first: expand the ready node with the fewest candidates
        ready = [
            (nid, candidate_positions(graph, nid, placements, config, extents))
            for nid in order
            if nid not in placements
            and all(p in placements for p in object_parents[nid])
        ]
        nid, candidates = min(ready, key=lambda pair: len(pair[1]))
        for pos in candidates:
            box = Box(center=pos, half=halves[nid])
            if any(
                intersection_volume(box, other) > config.contact_tolerance
                for oid, other in boxes.items()
                if frozenset((nid, oid)) not in sanctioned
            ):
                continue
            placements[nid] = pos
            boxes[nid] = box
            if dfs():
                return True
            del placements[nid]
            del boxes[nid]
        return False

    return dfs()
