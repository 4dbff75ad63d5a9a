from .embedding import (DEFAULT_DIM, HttpEmbeddingBackend, UtteranceEmbedding,
                        embed)
from .gating import (API_KEY_ENV, ENDPOINT_ENV, OBJECT_LEXICON, GatingOracle,
                     heuristic_alpha)
from .index import Exemplar, ExemplarIndex, build_index

__all__ = [
    "DEFAULT_DIM", "HttpEmbeddingBackend", "UtteranceEmbedding", "embed",
    "API_KEY_ENV", "ENDPOINT_ENV", "OBJECT_LEXICON", "GatingOracle",
    "heuristic_alpha", "Exemplar", "ExemplarIndex", "build_index",
]
