"""Nearest-neighbor exemplar index.

Inference-time utterances are mapped to the closest training exemplar and
the *exemplar's* embedding (never the raw query) is what feeds the model.
This keeps the language encoder on-distribution for novel phrasings.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .embedding import DEFAULT_DIM, UtteranceEmbedding, embed


@dataclasses.dataclass(frozen=True)
class Exemplar:
    exemplar_id: int
    text: str
    embedding: UtteranceEmbedding
    alpha: int  # {0, 1}


class ExemplarIndex:
    def __init__(self, entries: list[Exemplar]):
        if len({e.exemplar_id for e in entries}) != len(entries):
            raise ValueError("exemplar ids must be unique")
        for e in entries:
            if e.alpha not in (0, 1):
                raise ValueError(f"alpha label must be 0/1, got {e.alpha}")
        self.entries = sorted(entries, key=lambda e: e.exemplar_id)
        self._matrix = (np.stack([e.embedding.vector for e in self.entries])
                        if self.entries else np.zeros((0, DEFAULT_DIM)))

    def __len__(self):
        return len(self.entries)

    def retrieve_nearest(self, query: UtteranceEmbedding) -> Exemplar:
        """Argmax cosine similarity; ties broken by lowest exemplar id."""
        if not self.entries:
            raise ValueError("cannot retrieve from an empty index")
        sims = self._matrix @ query.vector  # unit vectors: dot == cosine
        best = int(np.argmax(sims))  # argmax returns the first (lowest-id) max
        return self.entries[best]

    def similarity(self, query: UtteranceEmbedding, exemplar: Exemplar) -> float:
        return float(exemplar.embedding.vector @ query.vector)

    # -- serialization (JSON-safe, rides along in checkpoint metadata) -------

    def to_dicts(self) -> list[dict]:
        return [{"id": e.exemplar_id, "text": e.text, "alpha": e.alpha,
                 "embedding": e.embedding.vector.tolist()}
                for e in self.entries]

    @classmethod
    def from_dicts(cls, rows: list[dict]) -> "ExemplarIndex":
        return cls([Exemplar(
            exemplar_id=int(r["id"]),
            text=r["text"],
            embedding=UtteranceEmbedding(
                np.array(r["embedding"], dtype=np.float64), r["text"]),
            alpha=int(r["alpha"]),
        ) for r in rows])


def build_index(utterances: list[str], gate_alpha, embed_fn=embed) -> ExemplarIndex:
    """Embed and alpha-label every training utterance, ids assigned in order."""
    if not utterances:
        raise ValueError("cannot build an index from zero utterances")
    entries = []
    for i, text in enumerate(utterances):
        entries.append(Exemplar(
            exemplar_id=i,
            text=text,
            embedding=embed_fn(text),
            alpha=int(gate_alpha(text)),
        ))
    return ExemplarIndex(entries)
