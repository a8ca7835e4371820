"""Embedding backends and the content-addressed embedding cache.

Three provider kinds share one interface: an HTTP client for a real
embedding service, deterministic mock embedders for tests and dry runs,
and a cache-only provider for re-analysis without backend traffic.
Vectors are canonicalized to float32 at the provider boundary so cached
and freshly computed embeddings are bit-identical.
"""

from __future__ import annotations

import base64
import hashlib
import json
import math
import os
import re
import struct
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .channels import StimulusParams
from .errors import BackendError, CacheError, DomainError

__all__ = [
    "EmbeddingVector",
    "EmbedRequest",
    "CacheKey",
    "EmbeddingCache",
    "MockProvider",
    "HttpProvider",
    "CacheOnlyProvider",
    "mock_provider",
    "provider_from_descriptor",
    "embed_batch",
    "as_matrix",
]

MOCK_NAMES = ("linear", "circle", "constant")
DEFAULT_BATCH_SIZE = 32

_CACHE_MAGIC = b"EMB1"


@dataclass(eq=False)
class EmbeddingVector:
    """One embedding: a finite float32 vector tagged with its model."""

    values: np.ndarray
    model_id: str

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float32).reshape(-1)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class EmbedRequest:
    """One image to embed, optionally with its stimulus record attached.

    HTTP backends only see the PNG bytes; the mock backends read the
    attached record (the stimulus parameters and/or the sweep position t).
    """

    image: bytes
    params: StimulusParams | None = None
    t: float | None = None


@dataclass(frozen=True)
class CacheKey:
    """Content hash + model id. For wire backends the content is the PNG
    bytes; mock backends fingerprint the stimulus record they embed."""

    content_sha256: str
    model_id: str


def as_matrix(vectors: list[EmbeddingVector]) -> np.ndarray:
    """Stack embeddings into an (n, dim) float64 matrix."""
    if not vectors:
        raise DomainError("empty embedding list")
    return np.stack([v.values for v in vectors]).astype(np.float64)


class EmbeddingCache:
    """Content-addressed on-disk cache.

    Entry format: magic ``EMB1``, unsigned 32-bit little-endian dimension,
    then ``dim`` little-endian 32-bit floats. Entries are written to a
    temp file and atomically renamed, so concurrent writers of the same
    key are idempotent.
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def key(self, content: bytes, model_id: str) -> CacheKey:
        return CacheKey(hashlib.sha256(content).hexdigest(), model_id)

    def _model_dir(self, model_id: str) -> Path:
        safe = re.sub(r"[^A-Za-z0-9._-]", "_", model_id)
        tag = hashlib.sha256(model_id.encode("utf-8")).hexdigest()[:8]
        return self.root / f"{safe}-{tag}"

    def path_for(self, key: CacheKey) -> Path:
        return self._model_dir(key.model_id) / key.content_sha256[:2] / f"{key.content_sha256}.emb"

    def put(self, key: CacheKey, vector: EmbeddingVector) -> None:
        path = self.path_for(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = _CACHE_MAGIC + struct.pack("<I", vector.dim) + vector.values.astype("<f4").tobytes()
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get(self, key: CacheKey) -> EmbeddingVector | None:
        path = self.path_for(key)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            return None
        if len(data) < 8 or data[:4] != _CACHE_MAGIC:
            raise CacheError(f"corrupt cache entry (bad magic): {path}")
        (dim,) = struct.unpack("<I", data[4:8])
        if len(data) != 8 + 4 * dim:
            raise CacheError(f"corrupt cache entry (truncated): {path}")
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=8)
        return EmbeddingVector(values=values.copy(), model_id=key.model_id)


def _mock_linear(req: EmbedRequest) -> np.ndarray:
    p = req.params
    if p is None:
        raise BackendError("mock 'linear' needs the stimulus record attached to each request")
    vec = np.zeros(8, dtype=np.float32)
    vec[0] = p.length_pct or 0.0
    vec[1] = (p.tilt_deg or 0.0) / 90.0
    vec[2] = (p.curvature_deg or 0.0) / 180.0
    vec[3] = p.luminance_pct
    vec[4] = p.saturation_pct
    vec[5] = p.area_pct or 0.0
    return vec


def _mock_circle(req: EmbedRequest) -> np.ndarray:
    if req.t is None:
        raise BackendError("mock 'circle' needs the sweep position t attached to each request")
    vec = np.zeros(8, dtype=np.float32)
    vec[0] = math.cos(2.0 * math.pi * req.t)
    vec[1] = math.sin(2.0 * math.pi * req.t)
    return vec


_CONSTANT_VEC = np.array([0.25, -1.5, 3.0, 0.5, 0.125, 2.0, -0.75, 1.0], dtype=np.float32)

_MOCKS = {
    "linear": _mock_linear,
    "circle": _mock_circle,
    "constant": lambda req: _CONSTANT_VEC.copy(),
}


class MockProvider:
    """Deterministic test backends.

    ``linear`` maps each stimulus record to its six channel magnitudes
    (unit-scaled, padded to dim 8), ``circle`` maps the sweep position t
    onto a unit circle, ``constant`` returns one fixed vector.

    Mock embeddings are functions of the attached stimulus record rather
    than the pixels, so their cache keys fingerprint the record: distinct
    records can render identical images (a blank canvas is a blank
    canvas), and keying those by image bytes would let the cache change
    metric results, which the cache must never do.
    """

    kind = "mock"

    def __init__(self, name: str, model_id: str | None = None) -> None:
        if name not in _MOCKS:
            raise DomainError(f"unknown mock {name!r}; expected one of {MOCK_NAMES}")
        self.name = name
        self.model_id = model_id or f"mock-{name}"
        self.calls = 0

    def cache_payload(self, req: EmbedRequest) -> bytes:
        if self.name == "linear":
            if req.params is None:
                raise BackendError("mock 'linear' needs the stimulus record attached to each request")
            return json.dumps(req.params.to_dict(), sort_keys=True).encode("utf-8")
        if self.name == "circle":
            if req.t is None:
                raise BackendError("mock 'circle' needs the sweep position t attached to each request")
            return repr(float(req.t)).encode("ascii")
        return b"constant"

    def embed(self, reqs: list[EmbedRequest]) -> list[EmbeddingVector]:
        self.calls += 1
        fn = _MOCKS[self.name]
        return [EmbeddingVector(values=fn(r), model_id=self.model_id) for r in reqs]


class HttpProvider:
    """Client for the embedding wire protocol.

    ``POST {endpoint}/v1/embed`` with ``{"model": str, "images":
    [base64-PNG, ...]}`` must answer ``{"model": str, "dim": int,
    "embeddings": [[float, ...], ...]}``. Transient failures (connection
    errors, 5xx) are retried with exponential backoff; 4xx are not.
    """

    kind = "http"

    def __init__(
        self,
        endpoint: str,
        model_id: str,
        timeout: float = 60.0,
        max_attempts: int = 3,
        backoff_s: float = 0.25,
        session: requests.Session | None = None,
    ) -> None:
        if not endpoint.startswith(("http://", "https://")):
            raise DomainError(f"http backend needs an absolute URL, got {endpoint!r}")
        if not model_id:
            raise DomainError("http backend needs a model id")
        self.endpoint = endpoint.rstrip("/")
        self.model_id = model_id
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_s = backoff_s
        self.session = session or requests.Session()
        self.calls = 0

    def _post(self, body: dict) -> dict:
        last: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            self.calls += 1
            try:
                resp = self.session.post(
                    f"{self.endpoint}/v1/embed", json=body, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last = BackendError(f"backend unreachable: {exc}")
                continue
            if resp.status_code == 200:
                try:
                    return resp.json()
                except (ValueError, json.JSONDecodeError) as exc:
                    raise BackendError(f"backend returned invalid JSON: {exc}") from exc
            if resp.status_code >= 500 or resp.status_code == 503:
                last = BackendError(f"backend error {resp.status_code}: {resp.text[:200]}")
                continue
            raise BackendError(f"backend rejected request ({resp.status_code}): {resp.text[:200]}")
        raise last if last else BackendError("backend unreachable")

    def embed(self, reqs: list[EmbedRequest]) -> list[EmbeddingVector]:
        images = [base64.b64encode(r.image).decode("ascii") for r in reqs]
        payload = self._post({"model": self.model_id, "images": images})
        try:
            dim = int(payload["dim"])
            rows = payload["embeddings"]
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed backend response: {exc}") from exc
        if len(rows) != len(reqs):
            raise BackendError(
                f"backend returned {len(rows)} embeddings for {len(reqs)} images"
            )
        out = []
        for row in rows:
            vec = EmbeddingVector(values=np.asarray(row, dtype=np.float32), model_id=self.model_id)
            if vec.dim != dim:
                raise BackendError(f"dimension mismatch within a batch: {vec.dim} != {dim}")
            out.append(vec)
        return out

    def health(self) -> dict:
        try:
            resp = self.session.get(f"{self.endpoint}/v1/health", timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendError(f"backend unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise BackendError(f"health check failed ({resp.status_code})")
        return resp.json()


class CacheOnlyProvider:
    """Backend that must never be reached: every lookup has to hit the cache."""

    kind = "cache-only"

    def __init__(self, model_id: str) -> None:
        if not model_id:
            raise DomainError("cache-only backend needs a model id")
        self.model_id = model_id
        self.calls = 0

    def embed(self, reqs: list[EmbedRequest]) -> list[EmbeddingVector]:
        raise BackendError(
            f"cache-only backend: {len(reqs)} embedding(s) missing from the cache"
        )


def mock_provider(name: str) -> MockProvider:
    return MockProvider(name)


def provider_from_descriptor(backend: str, model_id: str | None = None):
    """Build a provider from a CLI-style descriptor:
    ``http(s)://...``, ``mock:<name>``, or ``cache-only``."""
    if backend.startswith(("http://", "https://")):
        if not model_id:
            raise DomainError("http backend needs --model")
        return HttpProvider(backend, model_id)
    if backend.startswith("mock:"):
        return MockProvider(backend.split(":", 1)[1], model_id=model_id)
    if backend == "cache-only":
        if not model_id:
            raise DomainError("cache-only backend needs --model")
        return CacheOnlyProvider(model_id)
    raise DomainError(f"unknown backend descriptor {backend!r}")


def _validate(vectors: list[EmbeddingVector]) -> None:
    dims = {v.dim for v in vectors}
    if len(dims) > 1:
        raise BackendError(f"dimension mismatch within a batch: {sorted(dims)}")
    for v in vectors:
        if not np.all(np.isfinite(v.values)):
            raise BackendError("non-finite embedding")


def embed_batch(
    provider,
    requests_: list[EmbedRequest],
    cache: EmbeddingCache | None = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> list[EmbeddingVector]:
    """Embed a batch, order-preserving, with optional read/write-through cache.

    The cache only changes how many backend calls happen, never the
    returned vectors. Partial responses are rejected rather than truncated.
    """
    if not requests_:
        raise DomainError("empty embedding batch")
    if batch_size < 1:
        raise DomainError(f"batch_size must be >= 1, got {batch_size}")

    def key_for(req: EmbedRequest) -> CacheKey:
        payload = provider.cache_payload(req) if hasattr(provider, "cache_payload") else req.image
        return cache.key(payload, provider.model_id)

    vectors: list[EmbeddingVector | None] = [None] * len(requests_)
    misses: list[int] = []
    if cache is not None:
        for i, req in enumerate(requests_):
            hit = cache.get(key_for(req))
            if hit is None:
                misses.append(i)
            else:
                vectors[i] = hit
    else:
        misses = list(range(len(requests_)))

    for start in range(0, len(misses), batch_size):
        chunk = misses[start : start + batch_size]
        fresh = provider.embed([requests_[i] for i in chunk])
        if len(fresh) != len(chunk):
            raise BackendError(f"backend returned {len(fresh)} embeddings for {len(chunk)} images")
        _validate(fresh)
        for i, vec in zip(chunk, fresh):
            if cache is not None:
                cache.put(key_for(requests_[i]), vec)
            vectors[i] = vec

    out = [v for v in vectors if v is not None]
    if len(out) != len(requests_):
        raise BackendError("embedding batch incomplete")
    _validate(out)
    return out
