"""Regenerate the JSON/SVG fixtures under tests/fixtures.

Runs the roomforge CLI on a small study graph and on the same graph with the
chair's edge flipped from left_of to right_of, then exports the matching
manifests. The UI tests replay against these files, so the flipped variant is
exactly what a direct `roomforge solve` on the edited graph produces.
"""

import copy
import json
import shutil
import subprocess
import sys
from pathlib import Path

from roomforge import document
from roomforge.cluster import compute_cluster_extents
from roomforge.manifest import export_manifest
from roomforge.solver import SolverConfig, solve_layout

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SEED = 7

GRAPH = {
    "room_dimensions": {"width_x": 4.0, "depth_y": 3.0, "height_z": 2.6},
    "objects": [
        {
            "new_object_id": "table_1",
            "style_and_material": "oak dining table",
            "size_in_meters": {"Length": 1.2, "Width": 0.8, "Height": 0.75},
            "scene_graph": [
                {"parent_id": "middle_of_room", "preposition": "on", "adjacency": "not_adjacent"}
            ],
            "facing": "north_wall",
        },
        {
            "new_object_id": "chair_1",
            "style_and_material": "oak side chair",
            "size_in_meters": {"Length": 0.45, "Width": 0.5, "Height": 0.9},
            "scene_graph": [
                {"parent_id": "table_1", "preposition": "left_of", "adjacency": "adjacent"}
            ],
            "facing": "east_wall",
        },
        {
            "new_object_id": "lamp_1",
            "style_and_material": "brass table lamp",
            "size_in_meters": {"Length": 0.15, "Width": 0.15, "Height": 0.4},
            "scene_graph": [
                {"parent_id": "table_1", "preposition": "on", "adjacency": "adjacent"}
            ],
            "facing": "north_wall",
        },
    ],
}


def build(name, graph_doc):
    out = FIXTURES / name
    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)
    graph_path = out / "graph.json"
    graph_path.write_text(json.dumps(graph_doc, indent=2, sort_keys=True) + "\n")

    subprocess.run(
        [sys.executable, "-m", "roomforge.cli", "solve", str(graph_path),
         "--out", str(out), "--seed", str(SEED)],
        check=True,
        capture_output=True,
    )

    config = SolverConfig(seed=SEED)
    graph = compute_cluster_extents(document.parse_graph_document(graph_doc))
    layout = solve_layout(graph, config)
    assert layout.solved
    layout_doc = json.loads((out / "layout.json").read_text())
    assert {
        nid: entry["position"] for nid, entry in layout_doc["placements"].items()
    } == {
        nid: list(pos) for nid, pos in layout.placements.items()
    }, "library solve diverged from the CLI run"

    manifest = export_manifest(layout, graph, solver_config=config)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(name, "->", sorted(p.name for p in out.iterdir()))


def main():
    build("base", GRAPH)

    edited = copy.deepcopy(GRAPH)
    edge = edited["objects"][1]["scene_graph"][0]
    assert edge["preposition"] == "left_of"
    edge["preposition"] = "right_of"
    build("edited", edited)


if __name__ == "__main__":
    main()
