"""Scene description, task specs, and four-stage subtask scoring.

One desk scene hosts all five tasks. A scene *instance* is the scene with
seeded jitter applied to object positions; target regions are anchored to
the jittered initial poses, so each TaskSpec is resolved per instance.

Subtask stages (monotone within an episode):
    reached      end-effector came within REACH_RADIUS of the source object
    grasped      the source object was held at some tick
    transferred  while held, the object entered the target region
    completed    task-specific terminal predicate
"""

from __future__ import annotations

import dataclasses
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .world import EnvState, ObjectState, Workspace, state_dim, wrap_angles

REACH_RADIUS = 0.05
EULER_AXES = {"roll": 0, "pitch": 1, "yaw": 2}

TASK_IDS = ("clean-trash", "transfer-pen", "open-drawer", "insert-book",
            "water-plant")


@dataclasses.dataclass(frozen=True)
class OrientationConstraint:
    axis: str           # roll | pitch | yaw
    target: float
    tolerance: float

    def satisfied(self, ee_orientation: np.ndarray) -> bool:
        err = wrap_angles(np.array([ee_orientation[EULER_AXES[self.axis]]
                                    - self.target]))[0]
        return abs(err) <= self.tolerance


@dataclasses.dataclass(frozen=True)
class TargetRegion:
    center: np.ndarray
    tolerance: float

    def contains(self, pos: np.ndarray) -> bool:
        return float(np.linalg.norm(pos - self.center)) <= self.tolerance


@dataclasses.dataclass(frozen=True)
class TaskSpec:
    task_id: str
    source: str
    target: TargetRegion
    orientation: OrientationConstraint | None
    release_to_complete: bool


@dataclasses.dataclass
class SubtaskStatus:
    reached: bool = False
    grasped: bool = False
    transferred: bool = False
    completed: bool = False

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def merge(self, other: "SubtaskStatus"):
        self.reached |= other.reached
        self.grasped |= other.grasped
        self.transferred |= other.transferred
        self.completed |= other.completed


class Scene:
    """Parsed scene description plus per-instance task resolution."""

    def __init__(self, spec: dict):
        self.spec = spec
        self.name = spec["name"]
        self.object_order = tuple(o["name"] for o in spec["objects"])
        self.display_names = {o["name"]: o.get("display", o["name"])
                              for o in spec["objects"]}
        self.workspace = Workspace(
            np.array(spec["workspace"]["low"], dtype=np.float64),
            np.array(spec["workspace"]["high"], dtype=np.float64))
        self.state_dim = state_dim(len(self.object_order))

    @classmethod
    def load(cls, path=None) -> "Scene":
        if path is None:
            text = resources.files("lilac.data").joinpath("desk_scene.json").read_text()
        else:
            text = Path(path).read_text()
        return cls(json.loads(text))

    def initial_state(self, seed: int | None = None,
                      jitter: float = 0.0) -> EnvState:
        """Scene instance; jitter displaces each object's initial x/y."""
        rng = np.random.default_rng(seed)
        objects = {}
        for obj in self.spec["objects"]:
            pos = np.array(obj["position"], dtype=np.float64)
            if jitter > 0.0:
                pos = pos + np.concatenate([rng.uniform(-jitter, jitter, 2), [0.0]])
            objects[obj["name"]] = ObjectState(
                position=self.workspace.clip(pos),
                orientation=np.zeros(3),
                graspable=obj["graspable"])
        return EnvState(
            ee_position=np.array(self.spec["ee_start"]["position"], dtype=np.float64),
            ee_orientation=np.array(self.spec["ee_start"]["orientation"],
                                    dtype=np.float64),
            gripper_closed=False,
            held_object=None,
            held_offset=np.zeros(3),
            objects=objects,
            workspace=self.workspace,
            object_order=self.object_order,
        )

    def task(self, task_id: str, initial: EnvState) -> TaskSpec:
        """Resolve a task against a scene instance's initial object poses."""
        if task_id not in self.spec["tasks"]:
            raise KeyError(f"unknown task {task_id!r}")
        raw = self.spec["tasks"][task_id]
        anchor = initial.objects[raw["target"]["center_object"]].position
        center = anchor + np.array(raw["target"]["offset"], dtype=np.float64)
        orientation = None
        if raw.get("orientation"):
            o = raw["orientation"]
            orientation = OrientationConstraint(o["axis"], o["target"],
                                                o["tolerance"])
        return TaskSpec(
            task_id=task_id,
            source=raw["source"],
            target=TargetRegion(self.workspace.clip(center),
                                raw["target"]["tolerance"]),
            orientation=orientation,
            release_to_complete=raw["release_to_complete"],
        )


def update_status(status: SubtaskStatus, state: EnvState, task: TaskSpec):
    """Advance the monotone stage flags given one observed state."""
    src = state.objects[task.source]
    if np.linalg.norm(state.ee_position - src.position) <= REACH_RADIUS:
        status.reached = True
    held = state.held_object == task.source
    if held:
        status.grasped = True
    in_region = task.target.contains(src.position)
    if held and in_region:
        status.transferred = True
    if status.transferred and in_region:
        oriented = (task.orientation is None
                    or task.orientation.satisfied(state.ee_orientation))
        if task.release_to_complete:
            if not held and oriented:
                status.completed = True
        elif held and oriented:
            status.completed = True


def subtask_status(states: list[EnvState], task: TaskSpec) -> SubtaskStatus:
    """Score a full trace of environment states."""
    if not states:
        raise ValueError("empty trace")
    status = SubtaskStatus()
    for s in states:
        update_status(status, s, task)
    return status
