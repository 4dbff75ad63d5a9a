"""Utterance embeddings.

The default backend is a deterministic hashed character-n-gram bag,
unit-normalized so retrieval runs in cosine space. It is intentionally
simple: nearest-neighbor exemplar retrieval downstream only needs the
embedding to separate the bundled utterance set, not to be a good general
sentence encoder. An HTTP backend can be plugged in for higher fidelity.
"""

from __future__ import annotations

import dataclasses
import zlib

import numpy as np

DEFAULT_DIM = 64
NGRAM_SIZES = (2, 3, 4)


@dataclasses.dataclass(frozen=True)
class UtteranceEmbedding:
    vector: np.ndarray
    source_text: str

    def __post_init__(self):
        norm = float(np.linalg.norm(self.vector))
        if norm == 0.0:
            raise ValueError("embedding vector must be nonzero")


def _ngrams(text: str):
    padded = f" {text.lower().strip()} "
    for n in NGRAM_SIZES:
        for i in range(len(padded) - n + 1):
            yield padded[i:i + n]


def embed(text: str, dim: int = DEFAULT_DIM) -> UtteranceEmbedding:
    """Hash n-grams into a signed bag-of-features vector, L2-normalized."""
    if not text or not text.strip():
        raise ValueError("cannot embed empty text")
    vec = np.zeros(dim)
    for gram in _ngrams(text):
        h = zlib.crc32(gram.encode("utf-8"))
        sign = 1.0 if (h >> 16) & 1 else -1.0
        vec[h % dim] += sign
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        # pathological all-cancelling input; fall back to a length feature
        vec[0] = 1.0
        norm = 1.0
    return UtteranceEmbedding(vector=vec / norm, source_text=text)


class HttpEmbeddingBackend:
    """Client for an external embedding service; falls back to the hashed bag."""

    def __init__(self, endpoint: str, api_key: str = "", dim: int = DEFAULT_DIM,
                 timeout: float = 5.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.dim = dim
        self.timeout = timeout

    def __call__(self, text: str) -> UtteranceEmbedding:
        import requests

        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        try:
            resp = requests.post(
                self.endpoint,
                json={"text": text, "dim": self.dim},
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
            resp.raise_for_status()
            vec = np.asarray(resp.json()["embedding"], dtype=np.float64)
            vec = vec / np.linalg.norm(vec)
            return UtteranceEmbedding(vector=vec, source_text=text)
        except Exception:
            return embed(text, dim=self.dim)
