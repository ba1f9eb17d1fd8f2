"""Core domain types: rooms, objects, prepositional edges, scene graphs."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Tuple

# Preposition vocabulary. Object-to-object edges may use everything except
# IN_THE_CORNER; edges whose parent is a room layout node may use only ON and
# IN_THE_CORNER.
ON = "on"
LEFT_OF = "left_of"
RIGHT_OF = "right_of"
IN_FRONT = "in_front"
BEHIND = "behind"
UNDER = "under"
ABOVE = "above"
IN_THE_CORNER = "in_the_corner"

OBJECT_PREPOSITIONS = frozenset({ON, LEFT_OF, RIGHT_OF, IN_FRONT, BEHIND, UNDER, ABOVE})
LAYOUT_PREPOSITIONS = frozenset({ON, IN_THE_CORNER})
ALL_PREPOSITIONS = OBJECT_PREPOSITIONS | LAYOUT_PREPOSITIONS

# Lateral prepositions carry a horizontal offset in the parent's rotated frame.
LATERAL_PREPOSITIONS = frozenset({LEFT_OF, RIGHT_OF, IN_FRONT, BEHIND})

ADJACENT = "adjacent"
NOT_ADJACENT = "not_adjacent"
ADJACENCIES = frozenset({ADJACENT, NOT_ADJACENT})

VALID_ROTATIONS = (0, 90, 180, 270)

# Room layout node ids. Fixed set; geometry derives from room dimensions.
FLOOR = "floor"
CEILING = "ceiling"
WALL_NORTH = "wall_north"
WALL_SOUTH = "wall_south"
WALL_EAST = "wall_east"
WALL_WEST = "wall_west"
MIDDLE_OF_ROOM = "middle_of_room"

LAYOUT_NODE_IDS = (
    FLOOR,
    CEILING,
    WALL_NORTH,
    WALL_SOUTH,
    WALL_EAST,
    WALL_WEST,
    MIDDLE_OF_ROOM,
)
WALL_IDS = frozenset({WALL_NORTH, WALL_SOUTH, WALL_EAST, WALL_WEST})

# Outward unit direction of each wall, i.e. the direction in which the wall
# blocks movement (frame: origin at southwest floor corner, +x east, +y north).
WALL_OUTWARD = {
    WALL_NORTH: (0.0, 1.0),
    WALL_SOUTH: (0.0, -1.0),
    WALL_EAST: (1.0, 0.0),
    WALL_WEST: (-1.0, 0.0),
}

# At rotation 0 an object faces north (+y). "facing wall_X" maps to the
# rotation that points the local +y axis toward that wall.
FACING_TO_ROTATION = {
    "north_wall": 0,
    "east_wall": 90,
    "south_wall": 180,
    "west_wall": 270,
}
ROTATION_TO_FACING = {v: k for k, v in FACING_TO_ROTATION.items()}

# Horizontal offset direction of each lateral preposition in the parent's
# local frame (before rotation). "in front" is the side the parent faces
# (+y at rotation 0); "behind" is at its back.
LOCAL_OFFSET = {
    LEFT_OF: (-1.0, 0.0),
    RIGHT_OF: (1.0, 0.0),
    IN_FRONT: (0.0, 1.0),
    BEHIND: (0.0, -1.0),
}


def rotate_dir(direction: Tuple[float, float], rotation: int) -> Tuple[float, float]:
    """Rotate a horizontal direction by an object's rotation (clockwise steps).

    Chosen so that at rotation 90 the local +y axis points east (+x).
    """
    x, y = direction
    r = rotation % 360
    if r == 0:
        return (x, y)
    if r == 90:
        return (y, -x)
    if r == 180:
        return (-x, -y)
    if r == 270:
        return (-y, x)
    raise ValueError(f"rotation must be one of {VALID_ROTATIONS}, got {rotation}")


def world_offset(preposition: str, parent_rotation: int) -> Tuple[float, float]:
    """World-frame unit offset direction of a lateral preposition."""
    return rotate_dir(LOCAL_OFFSET[preposition], parent_rotation)


@dataclass(frozen=True)
class Room:
    """Room dimensions in meters. Implicit layout nodes derive from these."""

    width_x: float
    depth_y: float
    height_z: float

    def __post_init__(self) -> None:
        if self.width_x <= 0 or self.depth_y <= 0 or self.height_z <= 0:
            raise ValueError("room dimensions must be strictly positive")

    def middle_region(self) -> Tuple[float, float, float, float]:
        """(x_min, x_max, y_min, y_max) of the centered middle-50% floor region."""
        return (
            0.25 * self.width_x,
            0.75 * self.width_x,
            0.25 * self.depth_y,
            0.75 * self.depth_y,
        )

    def wall_span(self, wall_id: str) -> float:
        """Horizontal length of a wall."""
        if wall_id in (WALL_NORTH, WALL_SOUTH):
            return self.width_x
        if wall_id in (WALL_EAST, WALL_WEST):
            return self.depth_y
        raise ValueError(f"not a wall: {wall_id}")


@dataclass(frozen=True)
class ObjectNode:
    """One furniture instance.

    size is in the object's local frame; rotation is about +z in cardinal
    steps. cluster_extents, once computed, are (x_neg, x_pos, y_neg, y_pos)
    clearances measured from the object's center in world axes, inclusive of
    the object itself.
    """

    id: str
    name: str
    style_material: str
    size: Tuple[float, float, float]
    rotation: int = 0
    position: Optional[Tuple[float, float, float]] = None
    cluster_extents: Optional[Tuple[float, float, float, float]] = None

    def world_half_extents(self) -> Tuple[float, float, float]:
        """Half-extents along world axes after snapping rotation."""
        hx, hy, hz = self.size[0] / 2.0, self.size[1] / 2.0, self.size[2] / 2.0
        if self.rotation % 180 == 90:
            hx, hy = hy, hx
        return (hx, hy, hz)

    def with_position(self, position: Tuple[float, float, float]) -> "ObjectNode":
        return replace(self, position=position)

    def with_cluster_extents(self, cs: Tuple[float, float, float, float]) -> "ObjectNode":
        return replace(self, cluster_extents=cs)


@dataclass(frozen=True)
class Edge:
    """Directed prepositional relation from parent to child."""

    parent: str
    child: str
    preposition: str
    adjacency: str = ADJACENT


@dataclass(frozen=True)
class SceneGraph:
    room: Room
    nodes: Tuple[ObjectNode, ...]
    edges: Tuple[Edge, ...]

    def node_ids(self) -> Tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def get_node(self, node_id: str) -> ObjectNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    def children_of(self, node_id: str) -> Tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.parent == node_id)

    def parents_of(self, node_id: str) -> Tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.child == node_id)

    def with_nodes(self, nodes) -> "SceneGraph":
        return replace(self, nodes=tuple(nodes))

    def with_edges(self, edges) -> "SceneGraph":
        return replace(self, edges=tuple(edges))


def is_layout_node(node_id: str) -> bool:
    return node_id in LAYOUT_NODE_IDS


def make_graph(room: Room, nodes=(), edges=()) -> SceneGraph:
    return SceneGraph(room=room, nodes=tuple(nodes), edges=tuple(edges))
