"""Kinematic desk world: a free 6-DoF end-effector with a parallel gripper.

There is no articulated arm and no dynamics. The end-effector pose moves by
clipped per-tick deltas, the gripper toggles between open and closed, and a
held object rigidly tracks the end-effector (world-frame grab offset).
Transitions are pure and deterministic; all stochasticity lives in the
scripted demonstrators.

Frame convention (fixed, world): +x away from the user, +y to the user's
left, +z up; orientation is (roll, pitch, yaw) Euler angles wrapped to
(-pi, pi].
"""

from __future__ import annotations

import dataclasses

import numpy as np

POS_CAP = 0.02    # m per tick at 10 Hz
ORI_CAP = 0.05    # rad per tick
GRASP_RADIUS = 0.02
TICK_SECONDS = 0.1


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    """Wrap each angle to (-pi, pi]."""
    wrapped = np.mod(np.asarray(angles, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    wrapped[wrapped == -np.pi] = np.pi
    return wrapped


def clip_action(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    out = a.copy()
    out[:3] = np.clip(out[:3], -POS_CAP, POS_CAP)
    out[3:] = np.clip(out[3:], -ORI_CAP, ORI_CAP)
    return out


@dataclasses.dataclass
class ObjectState:
    position: np.ndarray
    orientation: np.ndarray
    graspable: bool

    def copy(self) -> "ObjectState":
        return ObjectState(self.position.copy(), self.orientation.copy(),
                           self.graspable)


@dataclasses.dataclass
class Workspace:
    low: np.ndarray
    high: np.ndarray

    def clip(self, pos: np.ndarray) -> np.ndarray:
        return np.clip(pos, self.low, self.high)

    def contains(self, pos: np.ndarray) -> bool:
        return bool(np.all(pos >= self.low) and np.all(pos <= self.high))


@dataclasses.dataclass
class EnvState:
    ee_position: np.ndarray
    ee_orientation: np.ndarray
    gripper_closed: bool
    held_object: str | None
    held_offset: np.ndarray      # world-frame object offset while held
    objects: dict[str, ObjectState]
    workspace: Workspace
    object_order: tuple[str, ...]  # canonical layout order for state vectors

    def copy(self) -> "EnvState":
        return EnvState(
            ee_position=self.ee_position.copy(),
            ee_orientation=self.ee_orientation.copy(),
            gripper_closed=self.gripper_closed,
            held_object=self.held_object,
            held_offset=self.held_offset.copy(),
            objects={k: v.copy() for k, v in self.objects.items()},
            workspace=self.workspace,
            object_order=self.object_order,
        )

    # -- serialization (full-precision floats survive JSON round trips) -----

    def to_dict(self) -> dict:
        return {
            "ee_position": self.ee_position.tolist(),
            "ee_orientation": self.ee_orientation.tolist(),
            "gripper_closed": self.gripper_closed,
            "held_object": self.held_object,
            "held_offset": self.held_offset.tolist(),
            "objects": {
                name: {
                    "position": o.position.tolist(),
                    "orientation": o.orientation.tolist(),
                    "graspable": o.graspable,
                }
                for name, o in self.objects.items()
            },
            "workspace": {"low": self.workspace.low.tolist(),
                          "high": self.workspace.high.tolist()},
            "object_order": list(self.object_order),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnvState":
        return cls(
            ee_position=np.array(d["ee_position"], dtype=np.float64),
            ee_orientation=np.array(d["ee_orientation"], dtype=np.float64),
            gripper_closed=d["gripper_closed"],
            held_object=d["held_object"],
            held_offset=np.array(d["held_offset"], dtype=np.float64),
            objects={
                name: ObjectState(np.array(o["position"], dtype=np.float64),
                                  np.array(o["orientation"], dtype=np.float64),
                                  o["graspable"])
                for name, o in d["objects"].items()
            },
            workspace=Workspace(np.array(d["workspace"]["low"], dtype=np.float64),
                                np.array(d["workspace"]["high"], dtype=np.float64)),
            object_order=tuple(d["object_order"]),
        )


def transition(state: EnvState, action, gripper_toggle: bool = False) -> EnvState:
    """One deterministic tick. Action components beyond the caps are clipped;
    positions past the workspace bound are clamped, never faulted."""
    a = clip_action(np.asarray(action, dtype=np.float64))
    s = state.copy()
    s.ee_position = s.workspace.clip(s.ee_position + a[:3])
    s.ee_orientation = wrap_angles(s.ee_orientation + a[3:])

    if gripper_toggle:
        if s.gripper_closed:
            s.gripper_closed = False
            s.held_object = None
            s.held_offset = np.zeros(3)
        else:
            s.gripper_closed = True
            nearest, dist = None, np.inf
            for name, obj in s.objects.items():
                if not obj.graspable:
                    continue
                d = float(np.linalg.norm(obj.position - s.ee_position))
                if d < dist:
                    nearest, dist = name, d
            if nearest is not None and dist <= GRASP_RADIUS:
                s.held_object = nearest
                s.held_offset = s.objects[nearest].position - s.ee_position

    if s.held_object is not None:
        held = s.objects[s.held_object]
        held.position = s.ee_position + s.held_offset
        held.orientation = s.ee_orientation.copy()
    return s


def state_vector(state: EnvState) -> np.ndarray:
    """Fixed layout: [ee pos (3), ee euler (3), gripper (1), xyz per object
    in the scene's canonical order]."""
    parts = [state.ee_position, state.ee_orientation,
             np.array([1.0 if state.gripper_closed else 0.0])]
    for name in state.object_order:
        if name not in state.objects:
            raise KeyError(f"scene object {name!r} missing from state")
        parts.append(state.objects[name].position)
    return np.concatenate(parts)


def state_dim(num_objects: int) -> int:
    return 7 + 3 * num_objects
