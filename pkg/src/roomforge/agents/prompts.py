"""Prompt loading and message construction for every agent stage.

Builders are plain functions of their inputs so tests can precompute the
exact (system, user) pair a stage will send and key canned fixtures on it.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any, Dict, List, Sequence

from ..document import load_schema
from ..scene import Room

DESIGNER = "designer"
ARCHITECT = "architect"
ENGINEER = "engineer"
CORRECTOR = "corrector"
REFINER = "refiner"
EVALUATOR = "evaluator"


def load_prompt(name: str) -> str:
    path = resources.files("roomforge.resources.prompts") / f"{name}.txt"
    return path.read_text()


def _fill(template: str, **values: str) -> str:
    # The prompts embed literal JSON braces, so plain replace instead of format.
    for key, value in values.items():
        template = template.replace("{" + key + "}", value)
    return template


def _schema_text(name: str) -> str:
    return json.dumps(load_schema(name), indent=2, sort_keys=True)


def room_description(room: Room) -> str:
    return (
        f"The room is {room.width_x} meters wide (x, west to east), "
        f"{room.depth_y} meters deep (y, south to north), and "
        f"{room.height_z} meters high (z)."
    )


def designer_messages(user_text: str, room: Room, object_count: int):
    system = _fill(
        load_prompt(DESIGNER),
        n=str(object_count),
        json_schema=_schema_text("designer"),
    )
    user = f"User preference: {user_text}\n{room_description(room)}"
    return system, user


def architect_messages(user_text: str, room: Room, proposals: Sequence[Dict[str, Any]]):
    system = _fill(load_prompt(ARCHITECT), json_schema=_schema_text("architect"))
    user = (
        f"User preference: {user_text}\n{room_description(room)}\n"
        f"Objects suggested by the Interior Designer:\n"
        f"{json.dumps(list(proposals), indent=2, sort_keys=True)}"
    )
    return system, user


def engineer_messages(
    proposal: Dict[str, Any],
    instance_ids: Sequence[str],
    statements: Sequence[Dict[str, Any]],
    placed_ids: Sequence[str],
):
    system = _fill(load_prompt(ENGINEER), json_schema=_schema_text("engineer_object"))
    user = (
        f"Object to place:\n{json.dumps(proposal, indent=2, sort_keys=True)}\n"
        f"Assigned instance ids, in order: {json.dumps(list(instance_ids))}\n"
        f"Placement statements from the Interior Architect:\n"
        f"{json.dumps(list(statements), indent=2, sort_keys=True)}\n"
        f"IDs of objects already in the room: {json.dumps(sorted(placed_ids))}\n"
        f"Output one JSON object per response; this response is for "
        f"{instance_ids[0]!r}."
    )
    return system, user


def corrector_messages(entry: Dict[str, Any], violation_text: str, placed_ids: Sequence[str]):
    system = _fill(load_prompt(CORRECTOR), json_schema=_schema_text("engineer_object"))
    user = (
        f"The following object does not fit the room:\n"
        f"{json.dumps(entry, indent=2, sort_keys=True)}\n"
        f"Conflict: {violation_text}\n"
        f"IDs of objects already in the room: {json.dumps(sorted(placed_ids))}"
    )
    return system, user


def evaluator_messages(user_text: str):
    example = {
        "Realism and 3D Geometric Consistency": {"grade": 0, "comment": ""},
        "Functionality and Activity-based Alignment": {"grade": 0, "comment": ""},
        "Layout and furniture": {"grade": 0, "comment": ""},
        "Color Scheme and Material Choices": {"grade": 0, "comment": ""},
        "Overall Aesthetic and Atmosphere": {"grade": 0, "comment": ""},
    }
    system = _fill(
        load_prompt(EVALUATOR),
        prompt=user_text,
        example_json=json.dumps(example, indent=2),
    )
    return system, "Grade the attached room renderings."
