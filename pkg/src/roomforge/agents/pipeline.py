"""Five-stage agent orchestration: Designer, Architect, Engineer, then the
rule-based corrector and refiner over the assembled scene graph."""

from __future__ import annotations

import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import jsonschema

from .. import document
from ..corrector import break_cycles, detect_violations, refine_siblings, resolve_violations
from ..graphops import validate_graph
from ..scene import Room, SceneGraph, is_layout_node, make_graph
from . import prompts
from .backends import BackendError, DecodingParams

MAX_RETRIES = 3

# objects the Designer must never propose
_BANNED_NAME_WORDS = ("door", "window", "curtain", "blind", "shutter")


class SchemaRetryExhausted(BackendError):
    pass


class PipelineError(BackendError):
    pass


@dataclass(frozen=True)
class DesignRequest:
    user_text: str
    room: Room
    object_count: int

    def __post_init__(self) -> None:
        if self.object_count < 0:
            raise ValueError("object_count must be >= 0")


@dataclass
class StageTranscript:
    stage: str
    prompts: List[Dict[str, str]] = field(default_factory=list)
    responses: List[str] = field(default_factory=list)
    retries: int = 0
    parsed: Any = None
    notes: List[str] = field(default_factory=list)
    duration_s: float = 0.0

    def to_document(self) -> dict:
        """Stable form for bundles; wall-clock excluded on purpose."""
        return {
            "stage": self.stage,
            "prompts": self.prompts,
            "responses": self.responses,
            "retries": self.retries,
            "parsed": self.parsed,
            "notes": self.notes,
        }


def _strip_fences(text: str) -> str:
    text = text.strip()
    match = re.match(r"^```(?:json)?\s*(.*?)\s*```$", text, re.DOTALL)
    return match.group(1) if match else text


def _call_validated(
    backend,
    stage: str,
    system: str,
    user: str,
    decoding: DecodingParams,
    transcript: StageTranscript,
    check,
    max_retries: int,
):
    """Call the backend until check(parsed) passes; retries resend verbatim."""
    last_error = ""
    for attempt in range(1 + max_retries):
        transcript.prompts.append({"system": system, "user": user})
        raw = backend.generate(stage, system, user, decoding)
        transcript.responses.append(raw)
        try:
            parsed = json.loads(_strip_fences(raw))
            check(parsed)
            transcript.retries += attempt
            return parsed
        except (ValueError, KeyError, jsonschema.ValidationError) as exc:
            last_error = str(exc)
            continue
    transcript.retries += max_retries
    raise SchemaRetryExhausted(f"{stage}: {last_error}")


def run_designer(
    request: DesignRequest,
    backend,
    decoding: Optional[DecodingParams] = None,
    max_retries: int = MAX_RETRIES,
) -> Tuple[List[Dict[str, Any]], StageTranscript]:
    decoding = decoding or DecodingParams()
    transcript = StageTranscript(stage=prompts.DESIGNER)
    start = time.perf_counter()
    if request.object_count == 0:
        transcript.parsed = []
        transcript.duration_s = time.perf_counter() - start
        return [], transcript

    system, user = prompts.designer_messages(
        request.user_text, request.room, request.object_count
    )

    def check(parsed):
        document.validate_against("designer", parsed)
        for proposal in parsed["objects"]:
            name = proposal["name"].lower()
            if any(word in name for word in _BANNED_NAME_WORDS):
                raise ValueError(f"forbidden object {proposal['name']!r}")

    parsed = _call_validated(
        backend, prompts.DESIGNER, system, user, decoding, transcript, check, max_retries
    )
    transcript.parsed = parsed["objects"]
    transcript.duration_s = time.perf_counter() - start
    return parsed["objects"], transcript


def run_architect(
    proposals: Sequence[Dict[str, Any]],
    request: DesignRequest,
    backend,
    decoding: Optional[DecodingParams] = None,
    max_retries: int = MAX_RETRIES,
) -> Tuple[List[Dict[str, Any]], StageTranscript]:
    if not proposals:
        raise ValueError("architect needs at least one proposal")
    decoding = decoding or DecodingParams()
    transcript = StageTranscript(stage=prompts.ARCHITECT)
    start = time.perf_counter()
    system, user = prompts.architect_messages(request.user_text, request.room, proposals)
    expected = {p["name"]: p["quantity"] for p in proposals}

    def check(parsed):
        document.validate_against("architect", parsed)
        got = {p["object_name"]: len(p["instances"]) for p in parsed["placements"]}
        if got != expected:
            raise ValueError(f"instance counts {got} do not match proposals {expected}")

    parsed = _call_validated(
        backend, prompts.ARCHITECT, system, user, decoding, transcript, check, max_retries
    )
    transcript.parsed = parsed["placements"]
    transcript.duration_s = time.perf_counter() - start
    return parsed["placements"], transcript


def instance_id(name: str, ordinal: int) -> str:
    slug = re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")
    return f"{slug}_{ordinal}"


def expand_instances(proposals: Sequence[Dict[str, Any]]) -> List[Tuple[str, Dict[str, Any], int]]:
    """(instance id, proposal, instance index) per placed object instance."""
    out = []
    for proposal in proposals:
        for i in range(proposal["quantity"]):
            out.append((instance_id(proposal["name"], i + 1), proposal, i))
    return out


def run_engineer(
    proposals: Sequence[Dict[str, Any]],
    statements: Sequence[Dict[str, Any]],
    request: DesignRequest,
    backend,
    decoding: Optional[DecodingParams] = None,
    max_retries: int = MAX_RETRIES,
    parallelism: int = 1,
) -> Tuple[SceneGraph, StageTranscript]:
    decoding = decoding or DecodingParams()
    transcript = StageTranscript(stage=prompts.ENGINEER)
    start = time.perf_counter()
    by_name = {s["object_name"]: s["instances"] for s in statements}
    instances = expand_instances(proposals)
    all_ids = [iid for iid, _, _ in instances]

    def engineer_one(item):
        iid, proposal, index = item
        sub = StageTranscript(stage=f"{prompts.ENGINEER}:{iid}")
        instance_statements = by_name.get(proposal["name"], [])
        placed = [i for i in all_ids if i != iid]
        system, user = prompts.engineer_messages(
            proposal,
            [iid],
            instance_statements[index : index + 1] or instance_statements,
            placed,
        )

        def check(parsed):
            normalized = document.normalize_entry(parsed)
            document.validate_against("engineer_object", normalized)
            if normalized["new_object_id"] != iid:
                raise ValueError(
                    f"expected id {iid!r}, got {normalized['new_object_id']!r}"
                )
            for link in normalized["scene_graph"]:
                parent = link["parent_id"]
                if parent == iid or not (is_layout_node(parent) or parent in all_ids):
                    raise ValueError(f"unknown parent {parent!r}")

        try:
            parsed = _call_validated(
                backend, prompts.ENGINEER, system, user, decoding, sub, check, max_retries
            )
            sub.parsed = document.normalize_entry(parsed)
        except SchemaRetryExhausted as exc:
            sub.notes.append(f"dropped: {exc}")
        return sub

    if parallelism > 1 and len(instances) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            subs = list(pool.map(engineer_one, instances))
    else:
        subs = [engineer_one(item) for item in instances]

    nodes, edges, dropped = [], [], []
    for (iid, _, _), sub in zip(instances, subs):
        transcript.prompts.extend(sub.prompts)
        transcript.responses.extend(sub.responses)
        transcript.retries += sub.retries
        transcript.notes.extend(sub.notes)
        if sub.parsed is None:
            dropped.append(iid)
            continue
        nodes.append(document.node_from_entry(sub.parsed))
        edges.extend(document.edges_from_entry(sub.parsed))

    kept = {n.id for n in nodes}
    edges = [e for e in edges if e.parent in kept or is_layout_node(e.parent)]
    graph = make_graph(request.room, nodes, edges)
    transcript.parsed = {
        "objects": [iid for iid in all_ids if iid in kept],
        "dropped": dropped,
    }
    transcript.duration_s = time.perf_counter() - start
    return graph, transcript


def run_pipeline(
    request: DesignRequest,
    backend,
    decoding: Optional[DecodingParams] = None,
    max_retries: int = MAX_RETRIES,
    parallelism: int = 1,
) -> Tuple[SceneGraph, List[StageTranscript]]:
    """Full chain: Designer, Architect, Engineer, corrector, refiner."""
    transcripts: List[StageTranscript] = []
    try:
        proposals, transcript = run_designer(request, backend, decoding, max_retries)
        transcripts.append(transcript)
        if not proposals:
            return make_graph(request.room), transcripts

        statements, transcript = run_architect(
            proposals, request, backend, decoding, max_retries
        )
        transcripts.append(transcript)
        graph, transcript = run_engineer(
            proposals, statements, request, backend, decoding, max_retries, parallelism
        )
        transcripts.append(transcript)
    except BackendError as exc:
        # callers can persist whatever the failed run produced
        exc.transcripts = transcripts
        raise

    corrector_transcript = StageTranscript(stage=prompts.CORRECTOR)
    start = time.perf_counter()
    result = resolve_violations(graph, detect_violations(graph))
    corrector_transcript.parsed = {
        "actions": result.actions,
        "removed": result.removed,
    }
    corrector_transcript.duration_s = time.perf_counter() - start
    transcripts.append(corrector_transcript)

    refiner_transcript = StageTranscript(stage=prompts.REFINER)
    start = time.perf_counter()
    refined = break_cycles(refine_siblings(result.graph))
    refiner_transcript.parsed = {
        "added_edges": len(refined.edges) - len(result.graph.edges)
    }
    refiner_transcript.duration_s = time.perf_counter() - start
    transcripts.append(refiner_transcript)

    report = validate_graph(refined)
    if not report.ok:
        raise PipelineError(f"refined graph failed validation: {report.errors}")
    return refined, transcripts
