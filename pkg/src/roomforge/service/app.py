"""HTTP service exposing the pipeline: async design jobs, bundle artifacts,
stage replay, and asset search."""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from pydantic import BaseModel, Field

from .. import bundle as bundle_mod
from .. import retrieval
from ..agents.backends import BackendError
from ..agents.pipeline import DesignRequest, run_pipeline
from ..bundle import MissingInput, UnknownStage, read_index, replay_stage
from ..scene import Room
from ..solver import SolverConfig


class RoomDims(BaseModel):
    width_x: float = Field(gt=0)
    depth_y: float = Field(gt=0)
    height_z: float = Field(gt=0)


class DesignIn(BaseModel):
    prompt: str
    room: RoomDims
    object_count: int = Field(default=8, ge=0)
    seed: Optional[int] = None


class ReplayIn(BaseModel):
    stage: str
    overrides: Dict[str, Any] = Field(default_factory=dict)


class _Job:
    def __init__(self) -> None:
        self.status = "pending"
        self.bundle_dir: Optional[Path] = None
        self.error: Optional[str] = None
        self.lock = threading.Lock()


def create_app(
    config: Optional[dict] = None,
    backend=None,
    asset_index: Optional[retrieval.AssetIndex] = None,
    embedder=None,
) -> FastAPI:
    from ..cli import backend_from, solver_config_from

    config = config or {}
    if backend is None:
        backend = backend_from(config)
    solver_default = solver_config_from(config)
    bundle_root = Path(config.get("bundle_root", "bundles"))
    if asset_index is None and config.get("index_path"):
        asset_index = retrieval.load_index(Path(config["index_path"]))
    if embedder is None and config.get("embedder_table_path"):
        embedder = retrieval.TableEmbedder.from_file(Path(config["embedder_table_path"]))

    app = FastAPI(title="roomforge")
    jobs: Dict[str, _Job] = {}
    executor = ThreadPoolExecutor(max_workers=int(config.get("workers", 2)))

    def run_job(job: _Job, body: DesignIn) -> None:
        with job.lock:
            job.status = "running"
        room = Room(body.room.width_x, body.room.depth_y, body.room.height_z)
        request = DesignRequest(body.prompt, room, body.object_count)
        request_doc = {
            "user_text": body.prompt,
            "room": body.room.model_dump(),
            "object_count": body.object_count,
        }
        solver = solver_default
        if body.seed is not None:
            from dataclasses import replace

            solver = replace(solver, seed=body.seed)
        try:
            graph, transcripts = run_pipeline(request, backend)
            version_dir, layout = bundle_mod.solve_and_bundle(
                bundle_root, body.prompt, request_doc, transcripts, graph, solver
            )
            with job.lock:
                job.bundle_dir = version_dir
                job.status = "solved" if layout.solved else "unsat"
        except BackendError as exc:
            with job.lock:
                job.status = "failed"
                job.error = str(exc)
        except Exception as exc:  # surface stage errors in the job record
            with job.lock:
                job.status = "failed"
                job.error = f"{type(exc).__name__}: {exc}"

    def get_job(job_id: str) -> _Job:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job")
        return job

    def artifact_path(job_id: str, name: str) -> Path:
        job = get_job(job_id)
        if job.bundle_dir is None:
            raise HTTPException(status_code=409, detail=f"job is {job.status}")
        path = job.bundle_dir / name
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no {name} in bundle")
        return path

    @app.post("/designs", status_code=202)
    def create_design(body: DesignIn):
        job_id = uuid.uuid4().hex
        job = _Job()
        jobs[job_id] = job
        executor.submit(run_job, job, body)
        return {"job_id": job_id}

    @app.get("/designs/{job_id}")
    def get_design(job_id: str):
        job = get_job(job_id)
        with job.lock:
            out = {"status": job.status, "error": job.error, "version": None, "index": None}
            if job.bundle_dir is not None:
                out["version"] = job.bundle_dir.name
                out["index"] = read_index(job.bundle_dir)
        return out

    @app.get("/designs/{job_id}/graph")
    def get_graph(job_id: str):
        return json.loads(artifact_path(job_id, "graph.json").read_text())

    @app.get("/designs/{job_id}/layout")
    def get_layout(job_id: str):
        return json.loads(artifact_path(job_id, "layout.json").read_text())

    @app.get("/designs/{job_id}/manifest")
    def get_manifest(job_id: str):
        return json.loads(artifact_path(job_id, "manifest.json").read_text())

    @app.get("/designs/{job_id}/floorplan")
    def get_floorplan(job_id: str):
        svg = artifact_path(job_id, "floorplan.svg").read_text()
        return Response(content=svg, media_type="image/svg+xml")

    @app.post("/designs/{job_id}/replay")
    def replay(job_id: str, body: ReplayIn):
        job = get_job(job_id)
        if job.bundle_dir is None:
            raise HTTPException(status_code=409, detail=f"job is {job.status}")
        try:
            new_dir = replay_stage(job.bundle_dir, body.stage, body.overrides, backend)
        except UnknownStage as exc:
            raise HTTPException(status_code=422, detail=f"unknown stage {exc}")
        except MissingInput as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        with job.lock:
            job.bundle_dir = new_dir
            layout = json.loads((new_dir / "layout.json").read_text())
            job.status = "solved" if layout["status"] == "solved" else "unsat"
        return {"version": new_dir.name, "index": read_index(new_dir)}

    @app.get("/assets/search")
    def search_assets(q: str, k: int = 3):
        if asset_index is None or embedder is None:
            raise HTTPException(status_code=503, detail="asset search not configured")
        try:
            query = embedder.embed([q])[0]
        except retrieval.UnknownDescription:
            raise HTTPException(status_code=400, detail=f"cannot embed {q!r}")
        ranked = retrieval.retrieve(asset_index, query, k=k)
        return {"results": [{"asset_id": aid, "score": score} for aid, score in ranked]}

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app
