"""Axis-aligned box primitives and collision tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Tuple


@dataclass(frozen=True)
class Box:
    """AABB given by center and half-extents, all in meters."""

    center: Tuple[float, float, float]
    half: Tuple[float, float, float]

    @property
    def min(self) -> Tuple[float, float, float]:
        return tuple(c - h for c, h in zip(self.center, self.half))

    @property
    def max(self) -> Tuple[float, float, float]:
        return tuple(c + h for c, h in zip(self.center, self.half))

    def volume(self) -> float:
        return 8.0 * self.half[0] * self.half[1] * self.half[2]


def intersection_volume(a: Box, b: Box) -> float:
    vol = 1.0
    for axis in range(3):
        lo = max(a.min[axis], b.min[axis])
        hi = min(a.max[axis], b.max[axis])
        if hi <= lo:
            return 0.0
        vol *= hi - lo
    return vol


def inside_room(box: Box, room_dims: Tuple[float, float, float], tol: float = 1e-3) -> bool:
    for axis in range(3):
        if box.min[axis] < -tol or box.max[axis] > room_dims[axis] + tol:
            return False
    return True


def check_collision(
    candidate: Box,
    placed: Dict[str, Box],
    sanctioned: Iterable[FrozenSet[str]] = (),
    tolerance: float = 1e-6,
    candidate_id: str = "",
) -> bool:
    """True iff the candidate overlaps any placed box by more than tolerance.

    Pairs listed in sanctioned (frozensets of ids) are skipped; they are
    allowed face contacts such as a child resting on its parent.
    """
    sanctioned = set(sanctioned)
    for other_id, box in placed.items():
        if candidate_id and frozenset((candidate_id, other_id)) in sanctioned:
            continue
        if intersection_volume(candidate, box) > tolerance:
            return True
    return False
