"""Training drivers for the three policies.

All three train from the same dataset artifact: 50 epochs, batch 512,
AdamW(lr=0.001, weight decay=0.01), 5 held-out (utterance, trajectory)
pairs, best-validation-loss checkpoint selection. Batching is over steps
(a batch mixes trajectories); an epoch is one pass over all steps.
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np

from .. import nn
from ..language import build_index, embed, ExemplarIndex, GatingOracle
from ..model import ImitationModel, LilacConfig, LilacModel, LilaModel
from ..nn.core import NonFiniteError, no_grad
from .dataset import Trajectory, dataset_hash, split

log = logging.getLogger(__name__)


@dataclasses.dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 512
    lr: float = 0.001
    weight_decay: float = 0.01
    val_holdout: int = 5
    seed: int = 0
    hidden_dim: int = 128
    latent_dim: int = 2
    embed_dim: int = 64

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if isinstance(getattr(self, f.name), (int, float)) and getattr(self, f.name) <= 0:
                if f.name != "seed":
                    raise ValueError(f"{f.name} must be positive")

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass
class TrainResult:
    model: object
    index: ExemplarIndex
    curves: list[dict]            # per-epoch train/val losses
    best_epoch: int
    dataset_hash: str


def _require_labels(trajectories: list[Trajectory]):
    unlabeled = [t.utterance for t in trajectories if t.alpha is None]
    if unlabeled:
        raise ValueError(
            f"dataset has {len(unlabeled)} unlabeled trajectories; "
            "run alpha preprocessing first")


def _resolve_embedding(index: ExemplarIndex, utterance: str) -> np.ndarray:
    return index.retrieve_nearest(embed(utterance)).embedding.vector


def _step_table(trajectories: list[Trajectory], index: ExemplarIndex):
    states, embeds, alphas, actions = [], [], [], []
    for t in trajectories:
        e = _resolve_embedding(index, t.utterance)
        states.append(t.states)
        actions.append(t.actions)
        embeds.append(np.tile(e, (len(t.states), 1)))
        alphas.append(np.full(len(t.states), float(t.alpha)))
    return (np.concatenate(states), np.concatenate(embeds),
            np.concatenate(alphas), np.concatenate(actions))


def _imitation_table(trajectories: list[Trajectory], index: ExemplarIndex,
                     window: int):
    """Histories are left-padded by repeating the first state."""
    histories, embeds, actions = [], [], []
    for t in trajectories:
        e = _resolve_embedding(index, t.utterance)
        for i in range(len(t.states)):
            lo = max(0, i + 1 - window)
            hist = t.states[lo:i + 1]
            if len(hist) < window:
                pad = np.tile(t.states[lo], (window - len(hist), 1))
                hist = np.concatenate([pad, hist])
            histories.append(hist)
            embeds.append(e)
            actions.append(t.actions[i])
    return np.stack(histories), np.stack(embeds), np.stack(actions)


def _epoch_batches(rng, n, batch_size):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def _finite_or_abort(value: float, context: str) -> float:
    if not np.isfinite(value):
        raise NonFiniteError(f"loss diverged ({context}): {value}")
    return value


def train_latent(kind: str, trajectories: list[Trajectory],
                 config: TrainConfig) -> TrainResult:
    """Train the gated model (`lilac`) or its gate-free variant (`lila`)."""
    _require_labels(trajectories)
    train_set, val_set = split(trajectories, config.val_holdout, config.seed)
    oracle = GatingOracle(backend="heuristic")
    index = build_index([t.utterance for t in train_set], oracle)

    model_cls = {"lilac": LilacModel, "lila": LilaModel}[kind]
    n = trajectories[0].states.shape[1]
    model = model_cls(LilacConfig(state_dim=n, hidden_dim=config.hidden_dim,
                                  latent_dim=config.latent_dim,
                                  embed_dim=config.embed_dim),
                      seed=config.seed)

    s_tr, e_tr, a_tr, act_tr = _step_table(train_set, index)
    s_va, e_va, a_va, act_va = _step_table(val_set, index)
    if kind == "lila":
        a_tr = np.ones_like(a_tr)
        a_va = np.ones_like(a_va)

    opt = nn.AdamW(model.parameters(), lr=config.lr,
                   weight_decay=config.weight_decay)
    rng = np.random.default_rng(config.seed)
    curves, best = [], (np.inf, -1, None)
    for epoch in range(config.epochs):
        model.train_mode()
        losses = []
        for idx in _epoch_batches(rng, len(s_tr), config.batch_size):
            if len(idx) < 2:
                continue  # batchnorm needs >= 2 rows
            opt.zero_grad()
            loss = model.reconstruction_loss(s_tr[idx], e_tr[idx],
                                             a_tr[idx], act_tr[idx])
            loss.backward()
            opt.step()
            losses.append(_finite_or_abort(float(loss.data), f"epoch {epoch}"))
        model.eval_mode()
        with no_grad():
            val = float(model.reconstruction_loss(s_va, e_va, a_va, act_va).data)
        _finite_or_abort(val, f"epoch {epoch} validation")
        curves.append({"epoch": epoch, "train_loss": float(np.mean(losses)),
                       "val_loss": val})
        if val < best[0]:
            best = (val, epoch, {k: p.data.copy()
                                 for k, p in model.parameters().items()})
    for k, p in model.parameters().items():
        p.data = best[2][k]
    model.eval_mode()
    return TrainResult(model, index, curves, best[1], dataset_hash(trajectories))


def train_imitation(trajectories: list[Trajectory],
                    config: TrainConfig) -> TrainResult:
    """Behavior cloning on predicted vs demonstrated actions (MSE)."""
    _require_labels(trajectories)
    train_set, val_set = split(trajectories, config.val_holdout, config.seed)
    oracle = GatingOracle(backend="heuristic")
    index = build_index([t.utterance for t in train_set], oracle)

    n = trajectories[0].states.shape[1]
    model = ImitationModel(LilacConfig(state_dim=n, hidden_dim=config.hidden_dim,
                                       latent_dim=config.latent_dim,
                                       embed_dim=config.embed_dim),
                           seed=config.seed)
    window = model.HISTORY_WINDOW
    h_tr, e_tr, act_tr = _imitation_table(train_set, index, window)
    h_va, e_va, act_va = _imitation_table(val_set, index, window)

    opt = nn.AdamW(model.parameters(), lr=config.lr,
                   weight_decay=config.weight_decay)
    rng = np.random.default_rng(config.seed)
    curves, best = [], (np.inf, -1, None)
    for epoch in range(config.epochs):
        model.train_mode()
        losses = []
        for idx in _epoch_batches(rng, len(h_tr), config.batch_size):
            if len(idx) < 2:
                continue
            opt.zero_grad()
            pred = model.forward(h_tr[idx], e_tr[idx])
            diff = pred - act_tr[idx]
            loss = (diff * diff).mean()
            loss.backward()
            opt.step()
            losses.append(_finite_or_abort(float(loss.data), f"epoch {epoch}"))
        model.eval_mode()
        with no_grad():
            vdiff = model.forward(h_va, e_va) - act_va
            val = float((vdiff * vdiff).mean().data)
        _finite_or_abort(val, f"epoch {epoch} validation")
        curves.append({"epoch": epoch, "train_loss": float(np.mean(losses)),
                       "val_loss": val})
        if val < best[0]:
            best = (val, epoch, {k: p.data.copy()
                                 for k, p in model.parameters().items()})
    for k, p in model.parameters().items():
        p.data = best[2][k]
    model.eval_mode()
    return TrainResult(model, index, curves, best[1], dataset_hash(trajectories))


def train_policy(kind: str, trajectories, config: TrainConfig) -> TrainResult:
    if kind == "imitation":
        return train_imitation(trajectories, config)
    return train_latent(kind, trajectories, config)
