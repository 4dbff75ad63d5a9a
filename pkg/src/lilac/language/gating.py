"""Gate value (alpha) oracle: does this utterance need environment state?

alpha = 1 for referent-bearing utterances ("pick up the book..."),
alpha = 0 for state-independent ones ("go left"). Backends:

  heuristic    offline: alpha = 1 iff the utterance contains an object
               lexicon word (substring match on lowercase, so compound
               nouns like "bookshelf" still hit "shelf")
  llm-service  HTTP client against an in-context-learning language model;
               endpoint/key come from environment variables; falls back to
               the heuristic on failure

Results are cached per utterance; the oracle is consulted once per
utterance activation, never per control tick.
"""

from __future__ import annotations

import hashlib
import logging
import os
from importlib import resources
from pathlib import Path

log = logging.getLogger(__name__)

OBJECT_LEXICON = ("book", "shelf", "drawer", "cup", "plant", "marker", "tin",
                  "trash", "paper", "knob")

ENDPOINT_ENV = "LILAC_GATING_ENDPOINT"
API_KEY_ENV = "LILAC_GATING_API_KEY"


def heuristic_alpha(utterance: str) -> int:
    low = utterance.lower()
    return 1 if any(word in low for word in OBJECT_LEXICON) else 0


def load_prompt() -> str:
    """The versioned prompt shipped with the package for the LLM backend."""
    return resources.files("lilac.data").joinpath("gating_prompt.txt").read_text()


def _utterance_key(utterance: str) -> str:
    return hashlib.sha256(utterance.encode("utf-8")).hexdigest()[:16]


class GatingOracle:
    def __init__(self, backend: str = "heuristic", cache_path=None,
                 endpoint: str | None = None, api_key: str | None = None,
                 timeout: float = 10.0):
        if backend not in ("heuristic", "llm-service"):
            raise ValueError(f"unknown gating backend {backend!r}")
        self.backend = backend
        self.cache_path = Path(cache_path) if cache_path else None
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        self.api_key = api_key or os.environ.get(API_KEY_ENV, "")
        self.timeout = timeout
        self.external_calls = 0
        self._cache: dict[str, int] = {}
        if self.cache_path and self.cache_path.exists():
            self._load_cache()

    # -- cache file: "hash <TAB> utterance <TAB> alpha" per line -------------

    def _load_cache(self):
        for line in self.cache_path.read_text().splitlines():
            if not line.strip():
                continue
            key, _, alpha = line.split("\t")
            self._cache[key] = int(alpha)

    def _persist(self, key: str, utterance: str, alpha: int):
        self._cache[key] = alpha
        if self.cache_path:
            sanitized = utterance.replace("\t", " ").replace("\n", " ")
            with open(self.cache_path, "a") as f:
                f.write(f"{key}\t{sanitized}\t{alpha}\n")

    # -- resolution ----------------------------------------------------------

    def gate_alpha(self, utterance: str, corrections: list[str] | None = None) -> int:
        """Alpha for the active utterance (top of the correction stack, else u)."""
        active = corrections[-1] if corrections else utterance
        key = _utterance_key(active)
        if key in self._cache:
            return self._cache[key]
        if self.backend == "llm-service" and self.endpoint:
            try:
                alpha = self._query_llm(active)
            except Exception as err:
                log.warning("gating service failed (%s); using heuristic", err)
                alpha = heuristic_alpha(active)
        else:
            alpha = heuristic_alpha(active)
        self._persist(key, active, alpha)
        return alpha

    __call__ = gate_alpha

    def _query_llm(self, utterance: str) -> int:
        import requests

        self.external_calls += 1
        resp = requests.post(
            self.endpoint,
            json={"prompt": load_prompt(), "utterance": utterance},
            headers={"Authorization": f"Bearer {self.api_key}"},
            timeout=self.timeout,
        )
        resp.raise_for_status()
        value = resp.json()["alpha"]
        # normalize whatever the service returns to {0, 1}
        if isinstance(value, str):
            value = value.strip().lower()
            value = 1 if value in ("1", "yes", "true") else 0
        return 1 if float(value) >= 0.5 else 0
