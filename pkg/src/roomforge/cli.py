"""Command-line entry points. Exit codes: 0 solved, 2 unsat, 3 backend
failure, 4 configuration error."""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

import click
import yaml

from . import bundle as bundle_mod
from . import document, evaluation
from .agents.backends import BackendError, CannedBackend, RemoteChatBackend
from .agents.pipeline import DesignRequest, run_pipeline
from .cluster import compute_cluster_extents
from .floorplan import render_floor_plan
from .scene import Room
from .solver import SolverConfig, solve_layout

EXIT_SOLVED = 0
EXIT_UNSAT = 2
EXIT_BACKEND = 3
EXIT_CONFIG = 4


class ConfigError(ValueError):
    pass


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        loaded = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(str(exc)) from exc
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigError("config file must hold a mapping")
    return loaded


def solver_config_from(config: dict, seed: Optional[int] = None) -> SolverConfig:
    params = dict(config.get("solver", {}))
    if "nonadjacent_range" in params:
        params["nonadjacent_range"] = tuple(params["nonadjacent_range"])
    try:
        solver = SolverConfig(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver config: {exc}") from exc
    if seed is not None:
        solver = replace(solver, seed=seed)
    return solver


def backend_from(config: dict):
    import os

    kind = config.get("backend", "canned")
    if kind == "canned":
        fixtures = config.get("fixtures_dir")
        if not fixtures:
            raise ConfigError("canned backend requires fixtures_dir")
        return CannedBackend(Path(fixtures))
    if kind == "remote":
        remote = config.get("remote", {})
        base_url = remote.get("base_url")
        model = remote.get("model")
        if not base_url or not model:
            raise ConfigError("remote backend requires remote.base_url and remote.model")
        api_key = os.environ.get(remote.get("api_key_env", ""), "")
        return RemoteChatBackend(base_url, model, api_key)
    raise ConfigError(f"unknown backend {kind!r}")


def parse_room(text: str) -> Room:
    try:
        parts = [float(p) for p in text.lower().split("x")]
        width, depth, height = parts
        return Room(width, depth, height)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"room must look like 4x3x2.4, got {text!r}") from exc


@click.group()
def main() -> None:
    """Turn free-form room descriptions into solved 3D layouts."""


@main.command()
@click.option("--prompt", required=True, help="Free-form design request.")
@click.option("--room", "room_text", default="4x3x2.4", show_default=True,
              help="Room dimensions, WIDTHxDEPTHxHEIGHT in meters.")
@click.option("--count", "object_count", type=int, default=8, show_default=True,
              help="Number of objects the designer should propose.")
@click.option("--config", "config_path", type=click.Path(), help="YAML config file.")
@click.option("--bundle-root", type=click.Path(), help="Bundle output directory.")
@click.option("--seed", type=int, default=None, help="Solver seed override.")
def design(prompt, room_text, object_count, config_path, bundle_root, seed):
    """Run the full agent pipeline and write a design bundle."""
    try:
        config = load_config(config_path)
        room = parse_room(room_text)
        backend = backend_from(config)
        solver = solver_config_from(config, seed)
        root = Path(bundle_root or config.get("bundle_root", "bundles"))
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    request_doc = {
        "user_text": prompt,
        "room": {"width_x": room.width_x, "depth_y": room.depth_y, "height_z": room.height_z},
        "object_count": object_count,
    }
    request = DesignRequest(user_text=prompt, room=room, object_count=object_count)
    try:
        graph, transcripts = run_pipeline(request, backend)
    except BackendError as exc:
        partial = getattr(exc, "transcripts", [])
        version_dir = _write_failure_bundle(root, prompt, request_doc, partial, str(exc))
        click.echo(f"backend failure: {exc}", err=True)
        click.echo(str(version_dir))
        sys.exit(EXIT_BACKEND)

    version_dir, layout = bundle_mod.solve_and_bundle(
        root, prompt, request_doc, transcripts, graph, solver
    )
    click.echo(str(version_dir))
    sys.exit(EXIT_SOLVED if layout.solved else EXIT_UNSAT)


def _write_failure_bundle(root, prompt, request_doc, transcripts, error) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    version_dir = root / bundle_mod.next_version(root)
    version_dir.mkdir()
    (version_dir / "prompt.txt").write_text(prompt)
    (version_dir / "request.json").write_text(json.dumps(request_doc, indent=2, sort_keys=True) + "\n")
    transcripts_dir = version_dir / "transcripts"
    transcripts_dir.mkdir()
    for i, transcript in enumerate(transcripts):
        doc = transcript.to_document()
        (transcripts_dir / f"{i:02d}_{doc['stage']}.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n"
        )
    (version_dir / "error.json").write_text(json.dumps({"error": error}) + "\n")
    bundle_mod.write_index(version_dir)
    return version_dir


@main.command()
@click.argument("graph_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), required=True,
              help="Directory for layout.json and floorplan.svg.")
@click.option("--config", "config_path", type=click.Path(), help="YAML config file.")
@click.option("--seed", type=int, default=None, help="Solver seed override.")
def solve(graph_path, out_dir, config_path, seed):
    """Solve a pre-authored scene graph document."""
    try:
        config = load_config(config_path)
        solver = solver_config_from(config, seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        doc = json.loads(Path(graph_path).read_text())
        graph = document.parse_graph_document(doc)
    except (ValueError, document.DocumentError) as exc:
        click.echo(f"config error: bad graph document: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    graph = compute_cluster_extents(graph)
    layout = solve_layout(graph, solver)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "layout.json").write_text(
        json.dumps(layout.to_document(), indent=2, sort_keys=True) + "\n"
    )
    if layout.solved:
        (out / "floorplan.svg").write_text(render_floor_plan(layout, graph))
        click.echo(str(out / "floorplan.svg"))
        sys.exit(EXIT_SOLVED)
    click.echo("unsatisfiable", err=True)
    sys.exit(EXIT_UNSAT)


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), help="Where to write metrics.json.")
def evaluate(paths, out_path):
    """Compute NObj/OOB/BBL metrics over bundles or manifest files."""
    manifests = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            path = path / "manifest.json"
            if not path.exists():
                click.echo(f"config error: {raw} has no manifest.json", err=True)
                sys.exit(EXIT_CONFIG)
        try:
            manifests.append(json.loads(path.read_text()))
        except ValueError as exc:
            click.echo(f"config error: {path}: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
    report = evaluation.compute_metrics(manifests)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text, nl=False)
    sys.exit(EXIT_SOLVED)


@main.command()
@click.option("--config", "config_path", type=click.Path(), help="YAML config file.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    try:
        config = load_config(config_path)
        app = create_app(config)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
