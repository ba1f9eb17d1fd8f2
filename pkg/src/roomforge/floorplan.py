"""Deterministic top-down SVG floor plans.

Scale is 100 px per meter with the y-axis flipped for screen coordinates, so
golden files and pixel comparisons stay stable.
"""

from __future__ import annotations

from typing import Dict

from .scene import SceneGraph, rotate_dir
from .solver import Layout

PX_PER_METER = 100.0


class UnsolvedLayout(ValueError):
    pass


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _to_px(x: float, y: float, depth_y: float) -> tuple:
    return (x * PX_PER_METER, (depth_y - y) * PX_PER_METER)


def render_floor_plan(layout: Layout, graph: SceneGraph) -> str:
    """Room outline plus one labeled rectangle and facing tick per object."""
    if not layout.solved:
        raise UnsolvedLayout("floor plans require a solved layout")
    room = graph.room
    width_px = room.width_x * PX_PER_METER
    height_px = room.depth_y * PX_PER_METER

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width_px)}" '
        f'height="{_fmt(height_px)}" viewBox="0 0 {_fmt(width_px)} {_fmt(height_px)}">',
        f'<rect class="room" x="0.00" y="0.00" width="{_fmt(width_px)}" '
        f'height="{_fmt(height_px)}" fill="none" stroke="black" stroke-width="2"/>',
    ]
    for node_id in sorted(layout.placements):
        node = graph.get_node(node_id)
        cx, cy, _ = layout.placements[node_id]
        hx, hy, _ = node.world_half_extents()
        left, top = _to_px(cx - hx, cy + hy, room.depth_y)
        parts.append(
            f'<rect class="object" data-id="{node_id}" x="{_fmt(left)}" y="{_fmt(top)}" '
            f'width="{_fmt(2 * hx * PX_PER_METER)}" height="{_fmt(2 * hy * PX_PER_METER)}" '
            f'fill="#dce6f2" stroke="#204060" stroke-width="1"/>'
        )
        ccx, ccy = _to_px(cx, cy, room.depth_y)
        dx, dy = rotate_dir((0.0, 1.0), node.rotation)
        tick_len = 0.6 * min(hx, hy) * PX_PER_METER
        tx, ty = ccx + dx * tick_len, ccy - dy * tick_len
        parts.append(
            f'<line class="facing" data-id="{node_id}" x1="{_fmt(ccx)}" y1="{_fmt(ccy)}" '
            f'x2="{_fmt(tx)}" y2="{_fmt(ty)}" stroke="#c03030" stroke-width="1"/>'
        )
        parts.append(
            f'<text class="label" data-id="{node_id}" x="{_fmt(ccx)}" y="{_fmt(ccy)}" '
            f'font-size="10" text-anchor="middle">{node.name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def parse_object_rects(svg: str) -> Dict[str, tuple]:
    """Read back object rectangles in pixels: id -> (x, y, width, height)."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    out = {}
    for rect in root.iter(f"{ns}rect"):
        if rect.get("class") != "object":
            continue
        out[rect.get("data-id")] = tuple(
            float(rect.get(key)) for key in ("x", "y", "width", "height")
        )
    return out
