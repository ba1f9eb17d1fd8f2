"""Scene-graph document parsing, serialization, and schema validation.

The on-disk format is the structured-output schema the Engineer stage emits:
one entry per object carrying new_object_id, style_and_material, size with
Length/Width/Height keys, a scene_graph placement list, and facing.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from typing import Any, Dict

import jsonschema

from .scene import (
    FACING_TO_ROTATION,
    ROTATION_TO_FACING,
    Edge,
    ObjectNode,
    Room,
    SceneGraph,
    make_graph,
)


class DocumentError(ValueError):
    pass


def load_schema(name: str) -> Dict[str, Any]:
    path = resources.files("roomforge.resources.schemas") / f"{name}.schema.json"
    return json.loads(path.read_text())


def _inline_refs(schema: Any) -> Any:
    # The schema set only cross-references whole files; inline them so a
    # single validator suffices.
    if isinstance(schema, dict):
        ref = schema.get("$ref", "")
        if ref.endswith(".schema.json"):
            return _inline_refs(load_schema(ref[: -len(".schema.json")]))
        return {k: _inline_refs(v) for k, v in schema.items() if k != "$id"}
    if isinstance(schema, list):
        return [_inline_refs(v) for v in schema]
    return schema


def _validator(name: str) -> jsonschema.Draft7Validator:
    return jsonschema.Draft7Validator(_inline_refs(load_schema(name)))


_VALIDATORS: Dict[str, jsonschema.Draft7Validator] = {}


def validate_against(name: str, doc: Any) -> None:
    """Raise jsonschema.ValidationError if doc does not match the named schema."""
    if name not in _VALIDATORS:
        _VALIDATORS[name] = _validator(name)
    _VALIDATORS[name].validate(doc)


def schema_errors(name: str, doc: Any) -> list:
    if name not in _VALIDATORS:
        _VALIDATORS[name] = _validator(name)
    return sorted(_VALIDATORS[name].iter_errors(doc), key=str)


_PREP_ALIASES = {
    "left of": "left_of",
    "right of": "right_of",
    "in front": "in_front",
    "in front of": "in_front",
    "in the corner": "in_the_corner",
}


def normalize_preposition(value: str) -> str:
    value = value.strip().lower()
    return _PREP_ALIASES.get(value, value.replace(" ", "_"))


def normalize_adjacency(value: str) -> str:
    value = value.strip().lower().replace(" ", "_")
    return value


def normalize_entry(entry: Dict[str, Any]) -> Dict[str, Any]:
    """Canonicalize free-text vocabulary before schema validation."""
    out = dict(entry)
    if isinstance(out.get("scene_graph"), list):
        links = []
        for link in out["scene_graph"]:
            if not isinstance(link, dict):
                links.append(link)
                continue
            link = dict(link)
            if isinstance(link.get("preposition"), str):
                link["preposition"] = normalize_preposition(link["preposition"])
            if isinstance(link.get("adjacency"), str):
                link["adjacency"] = normalize_adjacency(link["adjacency"])
            links.append(link)
        out["scene_graph"] = links
    return out


def name_from_id(object_id: str) -> str:
    return re.sub(r"_[0-9]+$", "", object_id)


def node_from_entry(entry: Dict[str, Any]) -> ObjectNode:
    size = entry["size_in_meters"]
    return ObjectNode(
        id=entry["new_object_id"],
        name=name_from_id(entry["new_object_id"]),
        style_material=entry["style_and_material"],
        size=(float(size["Length"]), float(size["Width"]), float(size["Height"])),
        rotation=FACING_TO_ROTATION[entry["facing"]],
    )


def edges_from_entry(entry: Dict[str, Any]) -> list:
    child = entry["new_object_id"]
    return [
        Edge(
            parent=link["parent_id"],
            child=child,
            preposition=link["preposition"],
            adjacency=link["adjacency"],
        )
        for link in entry["scene_graph"]
    ]


def parse_graph_document(doc: Dict[str, Any]) -> SceneGraph:
    try:
        validate_against("scene_graph", doc)
    except jsonschema.ValidationError as exc:
        raise DocumentError(f"scene graph document invalid: {exc.message}") from exc
    dims = doc["room_dimensions"]
    room = Room(width_x=dims["width_x"], depth_y=dims["depth_y"], height_z=dims["height_z"])
    nodes = [node_from_entry(entry) for entry in doc["objects"]]
    edges = [edge for entry in doc["objects"] for edge in edges_from_entry(entry)]
    return make_graph(room, nodes, edges)


def serialize_graph(graph: SceneGraph) -> Dict[str, Any]:
    entries = []
    for node in graph.nodes:
        entries.append(
            {
                "new_object_id": node.id,
                "style_and_material": node.style_material,
                "size_in_meters": {
                    "Length": node.size[0],
                    "Width": node.size[1],
                    "Height": node.size[2],
                },
                "scene_graph": [
                    {
                        "parent_id": e.parent,
                        "preposition": e.preposition,
                        "adjacency": e.adjacency,
                    }
                    for e in graph.edges
                    if e.child == node.id
                ],
                "facing": ROTATION_TO_FACING[node.rotation],
            }
        )
    return {
        "room_dimensions": {
            "width_x": graph.room.width_x,
            "depth_y": graph.room.depth_y,
            "height_z": graph.room.height_z,
        },
        "objects": entries,
    }
