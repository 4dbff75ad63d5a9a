"""Comparison policies: gating-free latent actions, and open-loop imitation."""

from __future__ import annotations

import numpy as np

from .. import nn
from ..nn.core import Tensor
from .lilac import LilacConfig, LilacModel


class LilaModel(LilacModel):
    """Identical architecture with the gate hard-wired to 1.

    The state branch is always live and the gate bias is inert (it still
    exists so the two checkpoints have the same tensor manifest).
    """

    KIND = "lila"

    def control_bases(self, s, e, alpha=None) -> Tensor:
        single = np.asarray(s).ndim == 1
        batch = 1 if single else len(np.atleast_2d(np.asarray(s)))
        ones = 1.0 if single else np.ones(batch)
        return super().control_bases(s, e, ones)


class ImitationConfig(LilacConfig):
    pass


class ImitationModel(nn.Module):
    """History-aware behavior cloning: predicts the 6-DoF action directly.

    Per-step state embeddings (shared encoder design with the latent-action
    models) feed a 2-layer single-head attention encoder over the last
    second of history (10 steps at 10 Hz), fused with language via FiLM,
    then a final 2-layer MLP action head. No user input is ever consumed.
    """

    KIND = "imitation"
    HISTORY_WINDOW = 10

    def __init__(self, config: LilacConfig, seed: int = 0):
        self.config = config
        rng = np.random.default_rng(seed)
        n, m, k, e = (config.state_dim, config.hidden_dim, config.action_dim,
                      config.embed_dim)
        self.state_norm = nn.BatchNorm(rng, n)
        self.state_enc = nn.MLP(rng, n, m, m)
        self.history_enc = nn.AttentionEncoder(rng, m, num_layers=2,
                                               max_len=self.HISTORY_WINDOW)
        self.lang_enc = nn.MLP(rng, e, m, m)
        self.film_gamma = nn.MLP(rng, m, m, m)
        self.film_beta = nn.MLP(rng, m, m, m)
        self.head = nn.MLP(rng, m, m, k)

    def train_mode(self):
        self.state_norm.training = True

    def eval_mode(self):
        self.state_norm.training = False

    def forward(self, history, embed) -> Tensor:
        """history: (T, n) or (B, T, n) with 1 <= T <= 10; embed: (e,) or (B, e)."""
        h = np.asarray(history, dtype=np.float64)
        single = h.ndim == 2
        if single:
            h = h[None]
        b, t, n = h.shape
        if not 1 <= t <= self.HISTORY_WINDOW:
            raise ValueError(f"history length {t} outside [1, {self.HISTORY_WINDOW}]")
        flat = self.state_enc(self.state_norm(Tensor(h.reshape(b * t, n))))
        steps = flat.reshape((b, t, self.config.hidden_dim))
        pooled = self.history_enc(steps)
        h_lang = self.lang_enc(Tensor(np.atleast_2d(np.asarray(embed, dtype=np.float64))))
        fused = self.film_gamma(h_lang) * pooled + self.film_beta(h_lang)
        out = self.head(fused)
        return out.reshape((-1,)) if single else out

    # -- checkpointing (same container as the latent-action models) ---------

    def state_tensors(self) -> dict[str, np.ndarray]:
        out = {f"param.{k}": p.data for k, p in self.parameters().items()}
        out.update({f"buffer.{k}": b for k, b in self.buffers().items()})
        return out

    def save(self, path, meta=None):
        nn.save_checkpoint(path, self.KIND, self.config.to_dict(),
                           self.state_tensors(), meta=dict(meta or {}))

    @classmethod
    def load(cls, path):
        kind, config, tensors, meta = nn.load_checkpoint(path)
        if kind != cls.KIND:
            raise ValueError(f"checkpoint kind {kind!r}, expected {cls.KIND!r}")
        model = cls(LilacConfig(**config))
        model.load_tensors(tensors)
        model.eval_mode()
        return model, meta
