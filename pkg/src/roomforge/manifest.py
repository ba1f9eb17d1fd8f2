"""Scene manifest export: the renderer boundary of the pipeline."""

from __future__ import annotations

import hashlib
import json
from typing import Dict, Optional, Tuple

from . import document
from .retrieval import fit_asset
from .scene import SceneGraph
from .solver import Layout, SolverConfig

PLACEHOLDER_ASSET = "placeholder"


class UnsolvedLayout(ValueError):
    pass


def config_hash(config: SolverConfig) -> str:
    payload = json.dumps(
        {
            "samples_per_object": config.samples_per_object,
            "max_backtracks": config.max_backtracks,
            "contact_tolerance": config.contact_tolerance,
            "adjacency_gap": config.adjacency_gap,
            "nonadjacent_range": list(config.nonadjacent_range),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def export_manifest(
    layout: Layout,
    graph: SceneGraph,
    retrievals: Optional[Dict[str, Tuple[str, Tuple[float, float, float]]]] = None,
    solver_config: Optional[SolverConfig] = None,
    created_at: Optional[str] = None,
) -> dict:
    """Build a schema-valid manifest document from a solved layout.

    retrievals maps node id to (asset_id, native_dims); nodes without a
    retrieval get the placeholder asset with unit scale.
    """
    if not layout.solved:
        raise UnsolvedLayout("manifests require a solved layout")
    retrievals = retrievals or {}
    entries = []
    for node_id in sorted(layout.placements):
        node = graph.get_node(node_id)
        if node_id in retrievals:
            asset_id, native_dims = retrievals[node_id]
            scale = fit_asset(native_dims, node.size).scale
        else:
            asset_id, scale = PLACEHOLDER_ASSET, (1.0, 1.0, 1.0)
        entries.append(
            {
                "id": node_id,
                "name": node.name,
                "asset_id": asset_id,
                "position": list(layout.placements[node_id]),
                "rotation": node.rotation,
                "scale": list(scale),
                "bbox": list(node.size),
            }
        )
    manifest = {
        "room": {
            "width_x": graph.room.width_x,
            "depth_y": graph.room.depth_y,
            "height_z": graph.room.height_z,
        },
        "objects": entries,
        "metadata": {
            "seed": layout.seed,
            "config_hash": config_hash(solver_config or SolverConfig()),
        },
    }
    if created_at:
        manifest["metadata"]["created_at"] = created_at
    document.validate_against("manifest", manifest)
    return manifest


def parse_manifest(doc: dict) -> dict:
    document.validate_against("manifest", doc)
    return doc
