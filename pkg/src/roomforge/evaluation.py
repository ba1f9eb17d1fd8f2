"""Objective layout metrics, visual rating protocol, and preference ranking."""

from __future__ import annotations

import base64
import json
import statistics
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import jsonschema

from . import document
from .agents.prompts import evaluator_messages
from .geometry import Box, inside_room, intersection_volume

OOB_TOLERANCE = 1e-3

RATING_CRITERIA = (
    "Functionality and Activity-based Alignment",
    "Layout and furniture",
    "Color Scheme and Material Choices",
    "Overall Aesthetic and Atmosphere",
)
REALISM_CRITERION = "Realism and 3D Geometric Consistency"


class ClientUnavailable(RuntimeError):
    pass


class MalformedGrade(ValueError):
    pass


class MissingRenders(ValueError):
    pass


class DisconnectedGraph(ValueError):
    pass


def _entry_box(entry: Dict[str, Any]) -> Box:
    sx, sy, sz = entry["bbox"]
    if entry["rotation"] in (90, 270):
        sx, sy = sy, sx
    return Box(center=tuple(entry["position"]), half=(sx / 2, sy / 2, sz / 2))


def compute_metrics(manifests: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """NObj, OOB rate, and BBL over a batch of scene manifests.

    Unparseable manifests are excluded from the averages and reported.
    """
    counts: List[int] = []
    oob_flags: List[bool] = []
    bbls: List[float] = []
    excluded: List[str] = []
    for i, manifest in enumerate(manifests):
        try:
            document.validate_against("manifest", manifest)
        except (jsonschema.ValidationError, TypeError, KeyError) as exc:
            excluded.append(f"scene {i}: {exc}")
            continue
        room = manifest["room"]
        dims = (room["width_x"], room["depth_y"], room["height_z"])
        boxes = [_entry_box(entry) for entry in manifest["objects"]]
        counts.append(len(boxes))
        oob_flags.append(any(not inside_room(b, dims, tol=OOB_TOLERANCE) for b in boxes))
        bbl = 0.0
        for j, a in enumerate(boxes):
            for b in boxes[j + 1:]:
                bbl += intersection_volume(a, b)
        bbls.append(bbl)

    n = len(counts)
    report = {
        "n_scenes": n,
        "nobj": (sum(counts) / n) if n else 0.0,
        "oob_rate": (100.0 * sum(oob_flags) / n) if n else 0.0,
        "bbl": (sum(bbls) / n) if n else 0.0,
        "excluded": excluded,
    }
    document.validate_against("metrics", report)
    return report


@dataclass
class RatingReport:
    criteria: Dict[str, Dict[str, float]]
    overall: float
    runs: List[Dict[str, Any]]
    realism: Optional[Dict[str, float]] = None
    discarded: List[str] = field(default_factory=list)


def _parse_rating(raw: str) -> Dict[str, Any]:
    try:
        parsed = json.loads(raw)
        document.validate_against("rating", parsed)
    except (ValueError, jsonschema.ValidationError) as exc:
        raise MalformedGrade(str(exc)) from exc
    return parsed


def rate_scene(
    images: Sequence[bytes],
    user_text: str,
    client,
    runs: int = 3,
) -> RatingReport:
    """Three independent grading runs; mean and population std per criterion.

    The realism criterion, when present, is stored but kept out of the
    four-criterion overall average. A malformed run is retried once, then
    reported as discarded.
    """
    if not images:
        raise MissingRenders(
            "rate_scene needs rendered images; this repo stores view "
            "definitions only and never renders"
        )
    system, user = evaluator_messages(user_text)
    parsed_runs: List[Dict[str, Any]] = []
    discarded: List[str] = []
    for run in range(runs):
        attempts = 0
        while True:
            attempts += 1
            try:
                raw = client.rate(system, user, list(images))
            except Exception as exc:
                raise ClientUnavailable(str(exc)) from exc
            try:
                parsed_runs.append(_parse_rating(raw))
                break
            except MalformedGrade as exc:
                if attempts >= 2:
                    discarded.append(f"run {run}: {exc}")
                    break

    if not parsed_runs:
        raise MalformedGrade("every grading run was malformed")

    criteria = {}
    for name in RATING_CRITERIA:
        grades = [run[name]["grade"] for run in parsed_runs]
        criteria[name] = {
            "mean": statistics.fmean(grades),
            "std": statistics.pstdev(grades),
        }
    realism = None
    realism_grades = [
        run[REALISM_CRITERION]["grade"] for run in parsed_runs if REALISM_CRITERION in run
    ]
    if realism_grades:
        realism = {
            "mean": statistics.fmean(realism_grades),
            "std": statistics.pstdev(realism_grades),
        }
    overall = statistics.fmean(c["mean"] for c in criteria.values())
    return RatingReport(
        criteria=criteria,
        overall=overall,
        runs=parsed_runs,
        realism=realism,
        discarded=discarded,
    )


class HttpVlmClient:
    """Multimodal chat endpoint; images sent as base64 data URLs."""

    def __init__(self, base_url: str, model: str, api_key: str = "", timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout

    def rate(self, system_prompt: str, user_message: str, images: Sequence[bytes]) -> str:
        import httpx

        content: List[Dict[str, Any]] = [{"type": "text", "text": user_message}]
        for image in images:
            encoded = base64.b64encode(image).decode()
            content.append(
                {
                    "type": "image_url",
                    "image_url": {"url": f"data:image/png;base64,{encoded}"},
                }
            )
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = httpx.post(
            f"{self.base_url}/chat/completions",
            json={
                "model": self.model,
                "messages": [
                    {"role": "system", "content": system_prompt},
                    {"role": "user", "content": content},
                ],
            },
            headers=headers,
            timeout=self.timeout,
        )
        response.raise_for_status()
        return response.json()["choices"][0]["message"]["content"]


@dataclass(frozen=True)
class VoteTable:
    items: Tuple[str, ...]
    wins: Tuple[Tuple[float, ...], ...]  # wins[i][j]: times i beat j

    def __post_init__(self) -> None:
        n = len(self.items)
        if len(self.wins) != n or any(len(row) != n for row in self.wins):
            raise ValueError("wins must be an n x n matrix")
        for i in range(n):
            if self.wins[i][i] != 0:
                raise ValueError("diagonal must be zero")
            for j in range(n):
                if self.wins[i][j] < 0:
                    raise ValueError("counts must be non-negative")


@dataclass
class BradleyTerryResult:
    items: Tuple[str, ...]
    scores: Tuple[float, ...]
    converged: bool
    iterations: int

    def probability(self, i: str, j: str) -> float:
        si = self.scores[self.items.index(i)]
        sj = self.scores[self.items.index(j)]
        return si / (si + sj)


def _connected(table: VoteTable) -> bool:
    n = len(table.items)
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            if j not in seen and (table.wins[i][j] + table.wins[j][i]) > 0:
                seen.add(j)
                frontier.append(j)
    return len(seen) == n


def bradley_terry(
    table: VoteTable, iterations: int = 10000, tol: float = 1e-12
) -> BradleyTerryResult:
    """Maximum-likelihood strengths via minorization-maximization updates."""
    n = len(table.items)
    if n < 2:
        raise ValueError("need at least two items")
    if not _connected(table):
        raise DisconnectedGraph("comparison graph is not connected")
    w = table.wins
    total_wins = [sum(w[i]) for i in range(n)]
    scores = [1.0 / n] * n
    converged = False
    iteration = 0
    for iteration in range(1, iterations + 1):
        updated = []
        for i in range(n):
            denom = sum(
                (w[i][j] + w[j][i]) / (scores[i] + scores[j])
                for j in range(n)
                if j != i and (w[i][j] + w[j][i]) > 0
            )
            updated.append(total_wins[i] / denom if denom > 0 else 0.0)
        norm = sum(updated)
        if norm <= 0:
            raise ValueError("vote table admits no positive strengths")
        updated = [s / norm for s in updated]
        delta = max(abs(a - b) for a, b in zip(updated, scores))
        scores = updated
        if delta < tol:
            converged = True
            break
    return BradleyTerryResult(
        items=table.items,
        scores=tuple(scores),
        converged=converged,
        iterations=iteration,
    )
