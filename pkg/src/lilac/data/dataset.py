"""Dataset records and the bundled synthetic corpus builder.

A trajectory is one utterance plus a sequence of (state vector, 6-DoF
action, gripper toggle) steps. Serialization is line-delimited canonical
JSON, one trajectory per line: human-inspectable, diff-friendly, and
byte-identical under serialize -> parse -> serialize.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path

import numpy as np

from ..env.scripted import EpisodeTrace, scripted_corrections, scripted_demo
from ..env.tasks import Scene, TASK_IDS
from ..env.templates import DIRECTIONAL_TEMPLATES
from ..env.world import state_vector, wrap_angles

FULL_TASK = "full-task"
CORRECTION = "correction-segment"


@dataclasses.dataclass
class Trajectory:
    utterance: str
    task_id: str
    kind: str                     # full-task | correction-segment
    states: np.ndarray            # (T, n)
    actions: np.ndarray           # (T, 6)
    grippers: np.ndarray          # (T,) 0/1 toggles
    alpha: int | None = None      # filled by preprocess_alphas

    def __post_init__(self):
        if self.actions.shape[1] != 6:
            raise ValueError("actions must be 6-DoF")
        if not (len(self.states) == len(self.actions) == len(self.grippers)):
            raise ValueError("ragged trajectory")

    @classmethod
    def from_trace(cls, trace: EpisodeTrace, kind: str) -> "Trajectory":
        return cls(
            utterance=trace.utterance,
            task_id=trace.task_id,
            kind=kind,
            states=np.stack([state_vector(s) for s in trace.states[:-1]]),
            actions=np.stack(trace.actions),
            grippers=np.array([1.0 if g else 0.0 for g in trace.gripper_toggles]),
        )

    def to_json(self) -> str:
        record = {
            "utterance": self.utterance,
            "task_id": self.task_id,
            "kind": self.kind,
            "alpha": self.alpha,
            "states": self.states.tolist(),
            "actions": self.actions.tolist(),
            "grippers": self.grippers.tolist(),
        }
        return json.dumps(record, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Trajectory":
        d = json.loads(line)
        return cls(
            utterance=d["utterance"],
            task_id=d["task_id"],
            kind=d["kind"],
            states=np.array(d["states"], dtype=np.float64),
            actions=np.array(d["actions"], dtype=np.float64),
            grippers=np.array(d["grippers"], dtype=np.float64),
            alpha=d["alpha"],
        )


def save_dataset(path, trajectories: list[Trajectory]):
    Path(path).write_text("".join(t.to_json() + "\n" for t in trajectories))


def load_dataset(path) -> list[Trajectory]:
    return [Trajectory.from_json(line)
            for line in Path(path).read_text().splitlines() if line.strip()]


def dataset_hash(trajectories: list[Trajectory]) -> str:
    h = hashlib.sha256()
    for t in trajectories:
        h.update(t.to_json().encode())
        h.update(b"\n")
    return h.hexdigest()[:16]


def compute_action_deltas(poses: np.ndarray) -> np.ndarray:
    """a_t = pose_{t+1} - pose_t, angle components wrapped to (-pi, pi]."""
    poses = np.asarray(poses, dtype=np.float64)
    if len(poses) < 2:
        raise ValueError("need at least two poses")
    deltas = poses[1:] - poses[:-1]
    deltas[:, 3:] = wrap_angles(deltas[:, 3:])
    return deltas


def preprocess_alphas(trajectories: list[Trajectory], oracle) -> list[Trajectory]:
    """Label every trajectory's utterance; idempotent, persists via the oracle cache."""
    for t in trajectories:
        t.alpha = int(oracle.gate_alpha(t.utterance))
    return trajectories


def split(trajectories: list[Trajectory], val_holdout: int,
          seed: int) -> tuple[list[Trajectory], list[Trajectory]]:
    """Hold out whole (utterance, trajectory) pairs; disjoint and exhaustive."""
    if len(trajectories) <= val_holdout:
        raise ValueError("dataset smaller than the validation holdout")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(len(trajectories))
    val_idx = set(int(i) for i in idx[:val_holdout])
    train = [t for i, t in enumerate(trajectories) if i not in val_idx]
    val = [t for i, t in enumerate(trajectories) if i in val_idx]
    return train, val


def build_dataset(scene: Scene, demos_per_task: int = 10,
                  corrections_per_task: int = 8, seed: int = 0,
                  tasks=None) -> list[Trajectory]:
    """The bundled corpus: scripted demos plus correction segments.

    Directional templates are round-robined across correction slots so every
    template in the frame table has at least one training segment.
    """
    trajectories: list[Trajectory] = []
    directional_order = list(DIRECTIONAL_TEMPLATES)
    num_directional = corrections_per_task // 2
    slot = 0
    for task_id in (tasks or TASK_IDS):
        demos = []
        for d in range(demos_per_task):
            trace, _ = scripted_demo(scene, task_id, seed=seed + d)
            demos.append(trace)
            trajectories.append(Trajectory.from_trace(trace, FULL_TASK))
        assigned = []
        for _ in range(num_directional):
            assigned.append(directional_order[slot % len(directional_order)])
            slot += 1
        segments = scripted_corrections(
            demos[0], seed=seed, display_names=scene.display_names,
            directional=assigned,
            num_referential=corrections_per_task - num_directional)
        for seg in segments:
            trajectories.append(Trajectory.from_trace(seg, CORRECTION))
    return trajectories
