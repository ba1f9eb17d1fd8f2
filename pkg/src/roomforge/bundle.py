"""Versioned design bundles: every pipeline artifact plus per-stage replay.

A bundle root holds sibling version directories v001, v002, ... Replays
never mutate an existing version; they copy upstream artifacts byte for byte
into a new version and recompute everything downstream of the replayed stage.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import document, evaluation
from .cluster import compute_cluster_extents
from .floorplan import render_floor_plan
from .manifest import export_manifest
from .scene import Room, SceneGraph
from .solver import Layout, SolverConfig, solve_layout

STAGE_PIPELINE = "pipeline"
STAGE_SOLVE = "solve_layout"

# artifacts the solve stage copies from the source version untouched
_UPSTREAM_OF_SOLVE = ("prompt.txt", "request.json", "graph.json", "retrievals.json")


class UnknownStage(ValueError):
    pass


class MissingInput(ValueError):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, doc: Any) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def solver_config_document(config: SolverConfig) -> dict:
    return {
        "samples_per_object": config.samples_per_object,
        "max_backtracks": config.max_backtracks,
        "contact_tolerance": config.contact_tolerance,
        "adjacency_gap": config.adjacency_gap,
        "nonadjacent_range": list(config.nonadjacent_range),
        "seed": config.seed,
    }


def solver_config_from_document(doc: dict) -> SolverConfig:
    return SolverConfig(
        samples_per_object=doc["samples_per_object"],
        max_backtracks=doc["max_backtracks"],
        contact_tolerance=doc["contact_tolerance"],
        adjacency_gap=doc["adjacency_gap"],
        nonadjacent_range=tuple(doc["nonadjacent_range"]),
        seed=doc["seed"],
    )


def corner_views(room: Room) -> List[dict]:
    """Camera poses at two opposing upper corners, aimed at the room center."""
    center = [room.width_x / 2, room.depth_y / 2, room.height_z / 3]
    return [
        {"name": "corner_southwest", "position": [0.0, 0.0, room.height_z], "look_at": center},
        {
            "name": "corner_northeast",
            "position": [room.width_x, room.depth_y, room.height_z],
            "look_at": center,
        },
    ]


def next_version(root: Path) -> str:
    root = Path(root)
    existing = [
        int(p.name[1:])
        for p in root.glob("v[0-9][0-9][0-9]")
        if p.is_dir() and p.name[1:].isdigit()
    ]
    return f"v{(max(existing) + 1) if existing else 1:03d}"


def write_index(version_dir: Path) -> dict:
    version_dir = Path(version_dir)
    artifacts = {}
    for path in sorted(version_dir.rglob("*")):
        if path.is_file() and path.name != "index.json":
            artifacts[path.relative_to(version_dir).as_posix()] = _sha256(path)
    index = {"version": version_dir.name, "artifacts": artifacts}
    _write_json(version_dir / "index.json", index)
    return index


def read_index(version_dir: Path) -> dict:
    return json.loads((Path(version_dir) / "index.json").read_text())


def write_bundle(
    root: Path,
    prompt: str,
    request: dict,
    transcripts: Sequence,
    graph: SceneGraph,
    layout: Layout,
    solver_config: SolverConfig,
    retrievals: Optional[Dict[str, Tuple[str, Tuple[float, float, float]]]] = None,
) -> Path:
    """Write one new bundle version and return its directory."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    version_dir = root / next_version(root)
    version_dir.mkdir()
    (version_dir / "prompt.txt").write_text(prompt)
    _write_json(version_dir / "request.json", request)

    transcripts_dir = version_dir / "transcripts"
    transcripts_dir.mkdir()
    for i, transcript in enumerate(transcripts):
        doc = transcript.to_document() if hasattr(transcript, "to_document") else transcript
        _write_json(transcripts_dir / f"{i:02d}_{doc['stage']}.json", doc)

    retrievals = retrievals or {}
    _write_json(version_dir / "graph.json", document.serialize_graph(graph))
    _write_json(
        version_dir / "retrievals.json",
        {
            nid: {"asset_id": asset_id, "native_dims": list(dims)}
            for nid, (asset_id, dims) in sorted(retrievals.items())
        },
    )
    _write_json(version_dir / "solver.json", solver_config_document(solver_config))
    _write_json(version_dir / "layout.json", layout.to_document())
    _write_json(version_dir / "views.json", corner_views(graph.room))

    if layout.solved:
        manifest = export_manifest(layout, graph, retrievals, solver_config)
        _write_json(version_dir / "manifest.json", manifest)
        (version_dir / "floorplan.svg").write_text(render_floor_plan(layout, graph))
        _write_json(
            version_dir / "metrics.json", evaluation.compute_metrics([manifest])
        )
    write_index(version_dir)
    return version_dir


def _load_retrievals(version_dir: Path) -> Dict[str, Tuple[str, Tuple[float, float, float]]]:
    path = version_dir / "retrievals.json"
    if not path.exists():
        return {}
    doc = json.loads(path.read_text())
    return {
        nid: (meta["asset_id"], tuple(meta["native_dims"])) for nid, meta in doc.items()
    }


def solve_and_bundle(
    root: Path,
    prompt: str,
    request: dict,
    transcripts: Sequence,
    graph: SceneGraph,
    solver_config: SolverConfig,
    retrievals=None,
) -> Tuple[Path, Layout]:
    """Cluster extents, solve, and write the bundle in one step."""
    prepared = compute_cluster_extents(graph)
    layout = solve_layout(prepared, solver_config)
    version_dir = write_bundle(
        root, prompt, request, transcripts, prepared, layout, solver_config, retrievals
    )
    return version_dir, layout


def replay_stage(
    version_dir: Path,
    stage: str,
    overrides: Optional[dict] = None,
    backend=None,
) -> Path:
    """Re-run one stage plus everything downstream into a new sibling version."""
    version_dir = Path(version_dir)
    root = version_dir.parent
    overrides = dict(overrides or {})

    if stage == STAGE_PIPELINE:
        return _replay_pipeline(root, version_dir, overrides, backend)
    if stage == STAGE_SOLVE:
        return _replay_solve(root, version_dir, overrides)
    raise UnknownStage(stage)


def _require(version_dir: Path, name: str) -> Path:
    path = version_dir / name
    if not path.exists():
        raise MissingInput(f"{version_dir.name} has no {name}")
    return path


def _replay_solve(root: Path, source: Path, overrides: dict) -> Path:
    if "graph" in overrides:
        graph_doc = overrides["graph"]
        graph_bytes = None
    else:
        graph_path = _require(source, "graph.json")
        graph_doc = json.loads(graph_path.read_text())
        graph_bytes = graph_path.read_bytes()
    config = solver_config_from_document(
        json.loads(_require(source, "solver.json").read_text())
    )
    solver_overrides = dict(overrides.get("solver", {}))
    if "seed" in overrides:
        solver_overrides["seed"] = overrides["seed"]
    if solver_overrides:
        config = replace(config, **solver_overrides)

    retrievals = _load_retrievals(source)
    for nid, meta in overrides.get("asset_overrides", {}).items():
        retrievals[nid] = (meta["asset_id"], tuple(meta["native_dims"]))

    graph = compute_cluster_extents(document.parse_graph_document(graph_doc))
    layout = solve_layout(graph, config)

    new_dir = root / next_version(root)
    new_dir.mkdir()
    for name in _UPSTREAM_OF_SOLVE:
        path = source / name
        if name == "graph.json" and graph_bytes is None:
            _write_json(new_dir / name, graph_doc)
        elif name == "retrievals.json" and "asset_overrides" in overrides:
            _write_json(
                new_dir / name,
                {
                    nid: {"asset_id": a, "native_dims": list(d)}
                    for nid, (a, d) in sorted(retrievals.items())
                },
            )
        elif path.exists():
            shutil.copyfile(path, new_dir / name)
    if (source / "transcripts").exists():
        shutil.copytree(source / "transcripts", new_dir / "transcripts")

    _write_json(new_dir / "solver.json", solver_config_document(config))
    _write_json(new_dir / "layout.json", layout.to_document())
    _write_json(new_dir / "views.json", corner_views(graph.room))
    if layout.solved:
        manifest = export_manifest(layout, graph, retrievals, config)
        _write_json(new_dir / "manifest.json", manifest)
        (new_dir / "floorplan.svg").write_text(render_floor_plan(layout, graph))
        _write_json(new_dir / "metrics.json", evaluation.compute_metrics([manifest]))
    write_index(new_dir)
    return new_dir


def _replay_pipeline(root: Path, source: Path, overrides: dict, backend) -> Path:
    from .agents.pipeline import DesignRequest, run_pipeline

    if backend is None:
        raise MissingInput("pipeline replay needs a generation backend")
    request_doc = json.loads(_require(source, "request.json").read_text())
    request_doc.update(overrides.get("request", {}))
    request = DesignRequest(
        user_text=request_doc["user_text"],
        room=Room(**request_doc["room"]),
        object_count=request_doc["object_count"],
    )
    config = solver_config_from_document(
        json.loads(_require(source, "solver.json").read_text())
    )
    if "seed" in overrides:
        config = replace(config, seed=overrides["seed"])
    graph, transcripts = run_pipeline(request, backend)
    new_dir, _ = solve_and_bundle(
        root,
        (source / "prompt.txt").read_text() if (source / "prompt.txt").exists() else request.user_text,
        request_doc,
        transcripts,
        graph,
        config,
        _load_retrievals(source),
    )
    return new_dir
