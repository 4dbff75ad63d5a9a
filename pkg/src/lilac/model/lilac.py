"""Language-conditioned latent-action model.

Maps a (state, utterance-embedding, gate) triple to an orthonormal control
basis B (k x d); the user's low-DoF input z decodes to a robot action B @ z.
Training runs the same pipeline as a conditional autoencoder: demonstrated
actions are compressed to d dims and reconstructed through B.

Pipeline per sample:

    h_state = MLP(BatchNorm(s))                 state branch
    h_lang  = MLP(e)                            retrieved exemplar embedding
    h_gated = alpha * h_state + (1-alpha) * bias
    h_fused = gamma(h_lang) * h_gated + beta(h_lang)
    B       = gram_schmidt(reshape(MLP(h_fused), (k, d)))   row-major reshape
    a_hat   = B @ compress(a)                   training only

All public entry points are batched; the leading axis is the batch.
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np

from .. import nn
from ..nn import core
from ..nn.core import Tensor

log = logging.getLogger(__name__)

DEGENERACY_EPS = 1e-8


class DegenerateBasesError(ValueError):
    """A projected basis column collapsed below the orthonormalization floor."""

    def __init__(self, sample_mask: np.ndarray):
        self.sample_mask = sample_mask  # True where the sample is degenerate
        super().__init__(
            f"degenerate control bases for {int(sample_mask.sum())} sample(s)"
        )


@dataclasses.dataclass(frozen=True)
class LilacConfig:
    state_dim: int          # n
    hidden_dim: int = 128   # m
    action_dim: int = 6     # k
    latent_dim: int = 2     # d
    embed_dim: int = 64     # utterance embedding width

    def __post_init__(self):
        if self.latent_dim >= self.action_dim:
            raise ValueError("latent dim must be strictly below action dim")
        for f in dataclasses.fields(self):
            if getattr(self, f.name) < 1:
                raise ValueError(f"{f.name} must be >= 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def gram_schmidt(m: Tensor) -> Tensor:
    """Modified Gram-Schmidt over the columns of (..., k, d) batches.

    Differentiable away from degeneracy: built entirely from tape
    primitives, so the backward pass flows through each projection and
    normalization. Column order is preserved (first output column is the
    normalized first input column).
    """
    single = m.ndim == 2
    if single:
        m = m.reshape((1,) + m.shape)
    d = m.shape[-1]
    cols: list[Tensor] = []
    for j in range(d):
        v = m[:, :, j]
        for q in cols:
            v = v - (v * q).sum(axis=1, keepdims=True) * q
        sq = (v * v).sum(axis=1, keepdims=True)
        norms = np.sqrt(sq.data.reshape(-1))
        if np.any(norms < DEGENERACY_EPS):
            raise DegenerateBasesError(norms < DEGENERACY_EPS)
        cols.append(v * core.power(sq, -0.5))
    out = nn.stack(cols, axis=-1)
    return out.reshape(out.shape[1:]) if single else out


class LilacModel(nn.Module):
    """Full parameter set plus forward ops. Inference is read-only."""

    KIND = "lilac"

    def __init__(self, config: LilacConfig, seed: int = 0):
        self.config = config
        rng = np.random.default_rng(seed)
        n, m, k, d, e = (config.state_dim, config.hidden_dim, config.action_dim,
                         config.latent_dim, config.embed_dim)
        self.state_norm = nn.BatchNorm(rng, n)
        self.state_enc = nn.MLP(rng, n, m, m)
        self.lang_enc = nn.MLP(rng, e, m, m)
        self.bias = Tensor(rng.uniform(-1 / np.sqrt(m), 1 / np.sqrt(m), size=m),
                           requires_grad=True)
        self.film_gamma = nn.MLP(rng, m, m, m)
        self.film_beta = nn.MLP(rng, m, m, m)
        self.proj = nn.MLP(rng, m, m, k * d)
        self.compress_head = nn.MLP(rng, k, m, d)

    # -- modes ---------------------------------------------------------------

    def train_mode(self):
        self.state_norm.training = True

    def eval_mode(self):
        self.state_norm.training = False

    # -- forward pieces ------------------------------------------------------

    def encode_state(self, s) -> Tensor:
        s = s if isinstance(s, Tensor) else Tensor(s)
        if s.shape[-1] != self.config.state_dim:
            raise ValueError(f"state dim {s.shape[-1]} != {self.config.state_dim}")
        single = s.ndim == 1
        if single:
            s = s.reshape((1, -1))
        h = self.state_enc(self.state_norm(s))
        return h.reshape((-1,)) if single else h

    def encode_language(self, e) -> Tensor:
        e = e if isinstance(e, Tensor) else Tensor(e)
        if e.shape[-1] != self.config.embed_dim:
            raise ValueError(f"embedding dim {e.shape[-1]} != {self.config.embed_dim}")
        return self.lang_enc(e)

    def gate(self, h_state: Tensor, alpha) -> Tensor:
        alpha = np.asarray(alpha, dtype=np.float64)
        if np.any(alpha < 0) or np.any(alpha > 1):
            raise ValueError("alpha must lie in [0, 1]")
        if h_state.ndim == 2 and alpha.ndim < 2:
            alpha = alpha.reshape(-1, 1)
        return h_state * alpha + self.bias * (1.0 - alpha)

    def film(self, h_gated: Tensor, h_language: Tensor) -> Tensor:
        gamma = self.film_gamma(h_language)
        beta = self.film_beta(h_language)
        return gamma * h_gated + beta

    def control_bases(self, s, e, alpha) -> Tensor:
        """(batch of) orthonormal bases, shape (..., k, d)."""
        s = np.atleast_2d(np.asarray(s, dtype=np.float64))
        e = np.atleast_2d(np.asarray(e, dtype=np.float64))
        single = np.asarray(alpha).ndim == 0
        alpha = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
        h_state = self.encode_state(s)
        h_lang = self.encode_language(e)
        h_fused = self.film(self.gate(h_state, alpha), h_lang)
        flat = self.proj(h_fused)
        k, d = self.config.action_dim, self.config.latent_dim
        bases = gram_schmidt(flat.reshape((-1, k, d)))
        return bases.reshape((k, d)) if single else bases

    def compress(self, a) -> Tensor:
        a = a if isinstance(a, Tensor) else Tensor(a)
        if a.shape[-1] != self.config.action_dim:
            raise ValueError("bad action dim")
        return self.compress_head(a)

    def reconstruction_loss(self, states, embeds, alphas, actions) -> Tensor:
        """Mean (over batch and action dims) squared reconstruction error.

        Degenerate-basis samples are dropped from the batch with a warning;
        an all-degenerate batch raises.
        """
        states = np.asarray(states, dtype=np.float64)
        embeds = np.asarray(embeds, dtype=np.float64)
        alphas = np.asarray(alphas, dtype=np.float64)
        actions = np.asarray(actions, dtype=np.float64)
        if len(states) == 0:
            raise ValueError("empty batch")
        try:
            bases = self.control_bases(states, embeds, alphas)
        except DegenerateBasesError as err:
            keep = ~err.sample_mask
            if not np.any(keep):
                raise
            log.warning("skipping %d degenerate sample(s) in batch",
                        int(err.sample_mask.sum()))
            return self.reconstruction_loss(states[keep], embeds[keep],
                                            alphas[keep], actions[keep])
        z = self.compress(actions)
        recon = core.matmul(bases, z.reshape(z.shape + (1,))).reshape(actions.shape)
        diff = recon - actions
        return (diff * diff).mean()

    # -- checkpointing -------------------------------------------------------

    def state_tensors(self) -> dict[str, np.ndarray]:
        out = {f"param.{k}": p.data for k, p in self.parameters().items()}
        out.update({f"buffer.{k}": b for k, b in self.buffers().items()})
        return out

    def save(self, path, meta: dict | None = None):
        meta = dict(meta or {})
        meta.setdefault("conventions", {
            "projection_reshape": "row-major k x d",
            "alpha": "real in [0,1]; the label oracle emits {0,1}",
        })
        nn.save_checkpoint(path, self.KIND, self.config.to_dict(),
                           self.state_tensors(), meta=meta)

    @classmethod
    def load(cls, path):
        kind, config, tensors, meta = nn.load_checkpoint(path)
        if kind != cls.KIND:
            raise ValueError(f"checkpoint kind {kind!r}, expected {cls.KIND!r}")
        model = cls(LilacConfig(**config))
        model.load_tensors(tensors)
        model.eval_mode()
        return model, meta


def decode(bases, z) -> np.ndarray:
    """a = B @ z for plain arrays (inference hot path, no tape)."""
    bases = np.asarray(bases, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    return bases @ z
