"""Artifact I/O for training and evaluation runs.

Checkpoints carry the exemplar index and the dataset hash in their
metadata so a single file restores everything inference needs. Reports
are CSV tables plus rendered matplotlib figures, written side by side.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .data.training import TrainResult
from .env.tasks import Scene, TASK_IDS
from .evaluation import (EVAL_JITTER, RolloutResult, imitation_rollout,
                         scripted_user_rollout)
from .language import ExemplarIndex, GatingOracle
from .model import load_policy
from .session import PolicyBundle

STAGES = ("reached", "grasped", "transferred", "completed")


def save_policy(result: TrainResult, path, extra_meta: dict | None = None):
    meta = {
        "index": result.index.to_dicts(),
        "dataset_hash": result.dataset_hash,
        "best_epoch": result.best_epoch,
    }
    meta.update(extra_meta or {})
    result.model.save(path, meta=meta)


def load_bundle(path, backend: str = "heuristic",
                cache_path=None) -> tuple[PolicyBundle, dict]:
    model, meta = load_policy(path)
    if "index" not in meta:
        raise ValueError(f"checkpoint {path} has no exemplar index")
    index = ExemplarIndex.from_dicts(meta["index"])
    oracle = GatingOracle(backend=backend, cache_path=cache_path)
    return PolicyBundle(model, index, oracle), meta


# -- training report ---------------------------------------------------------

def write_loss_curves(curves: list[dict], out_dir, prefix: str):
    """Per-epoch losses as CSV plus a rendered curve figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{prefix}_loss.csv"
    with open(csv_path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["epoch", "train_loss", "val_loss"])
        writer.writeheader()
        writer.writerows(curves)

    fig, ax = plt.subplots(figsize=(6, 4))
    epochs = [c["epoch"] for c in curves]
    ax.plot(epochs, [c["train_loss"] for c in curves], label="train")
    ax.plot(epochs, [c["val_loss"] for c in curves], label="validation")
    ax.set_xlabel("epoch")
    ax.set_ylabel("reconstruction MSE")
    ax.set_yscale("log")
    ax.set_title(f"{prefix} training")
    ax.legend()
    fig.tight_layout()
    png_path = out_dir / f"{prefix}_loss.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return csv_path, png_path


# -- evaluation --------------------------------------------------------------

def run_evaluation(bundles: dict[str, tuple], scene: Scene,
                   seeds: range | list[int], tasks=TASK_IDS,
                   jitter: float = EVAL_JITTER,
                   max_ticks: int | None = None) -> list[RolloutResult]:
    """Roll out every policy on every (task, seed).

    ``bundles`` maps policy name to (PolicyBundle, meta) for the latent
    policies or ((model, index), meta) for imitation. All checkpoints must
    come from the same dataset artifact; mixed hashes are a setup bug.
    """
    hashes = {meta.get("dataset_hash") for _, meta in bundles.values()}
    if len(hashes) > 1:
        raise ValueError(f"checkpoints trained on different datasets: {hashes}")

    kwargs = {"jitter": jitter}
    if max_ticks is not None:
        kwargs["max_ticks"] = max_ticks
    results = []
    for name, (payload, _) in bundles.items():
        for task_id in tasks:
            for seed in seeds:
                if name == "imitation":
                    model, index = payload
                    res = imitation_rollout(model, index, scene, task_id,
                                            seed, **kwargs)
                else:
                    res = scripted_user_rollout(
                        payload, scene, task_id, seed,
                        corrections=(name == "lilac"), **kwargs)
                res = RolloutResult(task_id, name, seed, res.status,
                                    res.ticks, res.corrections_used)
                results.append(res)
    return results


def success_rates(results: list[RolloutResult]) -> dict[str, dict[str, float]]:
    """Mean stage success per policy across all rollouts."""
    by_policy: dict[str, list[RolloutResult]] = {}
    for r in results:
        by_policy.setdefault(r.policy, []).append(r)
    return {
        policy: {stage: sum(getattr(r.status, stage) for r in rs) / len(rs)
                 for stage in STAGES}
        for policy, rs in by_policy.items()
    }


def write_results(results: list[RolloutResult], out_dir):
    """Per-rollout CSV, per-policy summary CSV, and the bar figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows_path = out_dir / "results.csv"
    with open(rows_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["policy", "task_id", "seed", *STAGES, "ticks",
                         "corrections_used"])
        for r in results:
            writer.writerow([r.policy, r.task_id, r.seed,
                             *[int(getattr(r.status, s)) for s in STAGES],
                             r.ticks, r.corrections_used])

    rates = success_rates(results)
    summary_path = out_dir / "summary.csv"
    with open(summary_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["policy", *STAGES])
        for policy, row in rates.items():
            writer.writerow([policy, *[f"{row[s]:.4f}" for s in STAGES]])

    fig, ax = plt.subplots(figsize=(7, 4))
    policies = list(rates)
    width = 0.8 / max(len(policies), 1)
    for i, policy in enumerate(policies):
        xs = [j + i * width for j in range(len(STAGES))]
        ax.bar(xs, [rates[policy][s] for s in STAGES], width, label=policy)
    ax.set_xticks([j + width * (len(policies) - 1) / 2 for j in range(len(STAGES))])
    ax.set_xticklabels(STAGES)
    ax.set_ylabel("success rate")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig_path = out_dir / "success_rates.png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return rows_path, summary_path, fig_path
