"""Embedding-based asset retrieval and bounding-box fitting.

The index is an exact linear-scan store of unit-norm vectors. On disk it is
a small binary file (magic, version, dimension, count, then fixed-width
float32 rows) with a JSON sidecar for per-record metadata; see
docs/formats.md.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

MAGIC = b"RFAI"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


class DimensionMismatch(ValueError):
    pass


class DuplicateId(ValueError):
    pass


class EmbedderUnavailable(RuntimeError):
    pass


class UnknownDescription(KeyError):
    pass


@dataclass(frozen=True)
class AssetRecord:
    asset_id: str
    embedding: Tuple[float, ...]
    native_dims: Tuple[float, float, float]
    source_uri: str = ""
    display_name: str = ""

    def __post_init__(self) -> None:
        if any(d <= 0 for d in self.native_dims):
            raise ValueError(f"native dims of {self.asset_id!r} must be positive")


@dataclass
class AssetIndex:
    dimension: int
    records: List[AssetRecord]
    checksum: str = ""

    @property
    def count(self) -> int:
        return len(self.records)


def build_index(records: Sequence[AssetRecord]) -> AssetIndex:
    if not records:
        raise ValueError("cannot build an empty index")
    dim = len(records[0].embedding)
    seen = set()
    normalized = []
    for record in sorted(records, key=lambda r: r.asset_id):
        if len(record.embedding) != dim:
            raise DimensionMismatch(
                f"{record.asset_id!r} has dimension {len(record.embedding)}, expected {dim}"
            )
        if record.asset_id in seen:
            raise DuplicateId(record.asset_id)
        seen.add(record.asset_id)
        vec = np.asarray(record.embedding, dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if norm == 0:
            raise ValueError(f"{record.asset_id!r} has a zero embedding")
        normalized.append(
            AssetRecord(
                asset_id=record.asset_id,
                embedding=tuple((vec / norm).tolist()),
                native_dims=record.native_dims,
                source_uri=record.source_uri,
                display_name=record.display_name,
            )
        )
    index = AssetIndex(dimension=dim, records=normalized)
    index.checksum = _embedding_checksum(index)
    return index


def _embedding_matrix(index: AssetIndex) -> np.ndarray:
    return np.array([r.embedding for r in index.records], dtype=np.float32)


def _embedding_checksum(index: AssetIndex) -> str:
    return hashlib.sha256(_embedding_matrix(index).tobytes()).hexdigest()


def save_index(index: AssetIndex, path: Path) -> None:
    path = Path(path)
    matrix = _embedding_matrix(index)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, index.dimension, index.count))
        fh.write(matrix.tobytes())
    sidecar = {
        "count": index.count,
        "dimension": index.dimension,
        "checksum": index.checksum,
        "records": [
            {
                "asset_id": r.asset_id,
                "native_dims": list(r.native_dims),
                "source_uri": r.source_uri,
                "display_name": r.display_name,
            }
            for r in index.records
        ],
    }
    path.with_suffix(path.suffix + ".meta.json").write_text(json.dumps(sidecar, indent=2))


def load_index(path: Path) -> AssetIndex:
    path = Path(path)
    raw = path.read_bytes()
    magic, version, dim, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path} is not an asset index")
    if version != VERSION:
        raise ValueError(f"unsupported index version {version}")
    matrix = np.frombuffer(raw, dtype=np.float32, offset=_HEADER.size).reshape(count, dim)
    sidecar = json.loads(path.with_suffix(path.suffix + ".meta.json").read_text())
    records = [
        AssetRecord(
            asset_id=meta["asset_id"],
            embedding=tuple(float(v) for v in row),
            native_dims=tuple(meta["native_dims"]),
            source_uri=meta.get("source_uri", ""),
            display_name=meta.get("display_name", ""),
        )
        for meta, row in zip(sidecar["records"], matrix)
    ]
    index = AssetIndex(dimension=dim, records=records, checksum=sidecar.get("checksum", ""))
    return index


def description_for(node) -> str:
    return f"{node.style_material} {node.name}"


class TableEmbedder:
    """Offline embedder backed by a description -> vector table."""

    def __init__(self, table: Dict[str, Sequence[float]]):
        self._table = dict(table)

    @classmethod
    def from_file(cls, path: Path) -> "TableEmbedder":
        return cls(json.loads(Path(path).read_text()))

    def embed(self, texts: Sequence[str]) -> List[List[float]]:
        out = []
        for text in texts:
            if text not in self._table:
                raise UnknownDescription(text)
            vec = np.asarray(self._table[text], dtype=np.float64)
            out.append((vec / np.linalg.norm(vec)).tolist())
        return out


class HttpEmbedder:
    """Remote embedding endpoint: POST {"texts": [...]} -> {"embeddings": [...]}."""

    def __init__(self, base_url: str, api_key: str = "", timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout

    def embed(self, texts: Sequence[str]) -> List[List[float]]:
        import httpx

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(
                f"{self.base_url}/embeddings",
                json={"texts": list(texts)},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
        except Exception as exc:
            raise EmbedderUnavailable(str(exc)) from exc
        vectors = response.json()["embeddings"]
        return [
            (np.asarray(v, dtype=np.float64) / np.linalg.norm(v)).tolist() for v in vectors
        ]


def embed_description(node, embedder) -> List[float]:
    return embedder.embed([description_for(node)])[0]


def retrieve(index: AssetIndex, query: Sequence[float], k: int = 1) -> List[Tuple[str, float]]:
    """Exact top-k by cosine similarity, ties broken by ascending asset id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (index.dimension,):
        raise DimensionMismatch(f"query dimension {q.shape} != {index.dimension}")
    norm = np.linalg.norm(q)
    if norm > 0:
        q = q / norm
    sims = _embedding_matrix(index).astype(np.float64) @ q
    ranked = sorted(
        zip((r.asset_id for r in index.records), sims.tolist()),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ranked[:k]


@dataclass(frozen=True)
class AssetFit:
    scale: Tuple[float, float, float]
    anisotropy: float


def fit_asset(native_dims: Sequence[float], target_bbox: Sequence[float]) -> AssetFit:
    """Per-axis scale factors plus the max/min scale ratio as a quality flag."""
    if any(d <= 0 for d in native_dims) or any(d <= 0 for d in target_bbox):
        raise ValueError("all dimensions must be positive")
    scale = tuple(t / n for t, n in zip(target_bbox, native_dims))
    return AssetFit(scale=scale, anisotropy=max(scale) / min(scale))
