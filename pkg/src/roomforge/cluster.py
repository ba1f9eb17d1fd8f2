"""Cluster-extent precomputation: per-node clearance for the whole subtree."""

from __future__ import annotations

from typing import Dict, Tuple

from .graphops import CyclicGraph, find_cycle, topological_order
from .scene import (
    ABOVE,
    ADJACENT,
    LATERAL_PREPOSITIONS,
    ON,
    UNDER,
    SceneGraph,
    is_layout_node,
    world_offset,
)

# cs component index per world direction: (x_neg, x_pos, y_neg, y_pos)
_DIR_INDEX = {(-1.0, 0.0): 0, (1.0, 0.0): 1, (0.0, -1.0): 2, (0.0, 1.0): 3}
_OPPOSITE_INDEX = {0: 1, 1: 0, 2: 3, 3: 2}


def compute_cluster_extents(graph: SceneGraph, nonadjacent_min: float = 0.3) -> SceneGraph:
    """Fill cluster_extents on every object node.

    Processing in reverse topological order, a node's extents cover its own
    half-extents plus each child's cluster box translated by the minimal
    offset its preposition requires. Extents are kept in world axes (every
    node's rotation is fixed before solving).
    """
    if find_cycle(graph):
        raise CyclicGraph("cannot compute cluster extents on a cyclic graph")

    order = [nid for nid in topological_order(graph) if not is_layout_node(nid)]
    cs: Dict[str, Tuple[float, float, float, float]] = {}

    for node_id in reversed(order):
        node = graph.get_node(node_id)
        whx, why, _ = node.world_half_extents()
        extents = [whx, whx, why, why]
        for edge in graph.children_of(node_id):
            child = graph.get_node(edge.child)
            chx, chy, _ = child.world_half_extents()
            child_cs = cs[edge.child]
            if edge.preposition in LATERAL_PREPOSITIONS:
                direction = world_offset(edge.preposition, node.rotation)
                idx = _DIR_INDEX[direction]
                parent_half = whx if idx in (0, 1) else why
                gap = 0.0 if edge.adjacency == ADJACENT else nonadjacent_min
                near = child_cs[_OPPOSITE_INDEX[idx]]
                far = child_cs[idx]
                extents[idx] = max(extents[idx], parent_half + gap + near + far)
                # cross axis: the child slides along the parent's face span,
                # so its cluster can reach span + its own cross clearance
                child_halves = (chx, chx, chy, chy)
                parent_halves = (whx, whx, why, why)
                for cross in (2, 3) if idx in (0, 1) else (0, 1):
                    slack = max(parent_halves[cross] - child_halves[cross], 0.0)
                    extents[cross] = max(extents[cross], slack + child_cs[cross])
            elif edge.preposition in (ON, UNDER, ABOVE):
                child_halves = (chx, chx, chy, chy)
                parent_halves = (whx, whx, why, why)
                for idx in range(4):
                    slack = max(parent_halves[idx] - child_halves[idx], 0.0)
                    extents[idx] = max(extents[idx], slack + child_cs[idx])
        cs[node_id] = tuple(extents)

    nodes = [
        n.with_cluster_extents(cs[n.id]) if n.id in cs else n for n in graph.nodes
    ]
    return graph.with_nodes(nodes)
