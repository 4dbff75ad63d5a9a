"""Scripted expert demonstrators and correction-segment generation.

Demonstrations come from a waypoint-following feedback controller with
seeded action noise (the only stochasticity in the stack). Correction
segments are generated by replaying a demonstration, sampling intermediate
states, and emitting short pure-directional or go-toward-object motions
paired with template utterances.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .tasks import Scene, SubtaskStatus, TaskSpec, TASK_IDS, subtask_status
from .templates import (DIRECTIONAL_TEMPLATES, INSTRUCTION_TEMPLATES,
                        referential_utterance)
from .world import (EnvState, GRASP_RADIUS, ORI_CAP, POS_CAP, clip_action,
                    transition, wrap_angles)

POS_TOL = 0.006
ORI_TOL = 0.02
MAX_TICKS_PER_WAYPOINT = 400
SEGMENT_TICKS = 8
SEGMENT_POS_STEP = 0.012
SEGMENT_ORI_STEP = 0.03


class DemoFailure(RuntimeError):
    """The scripted expert did not complete its task: a bug, not bad luck."""


@dataclasses.dataclass
class Waypoint:
    position: np.ndarray
    orientation: np.ndarray | None = None
    toggle_gripper: bool = False


@dataclasses.dataclass
class EpisodeTrace:
    """States s_0..s_T plus the actions/gripper toggles between them."""

    task_id: str
    utterance: str
    states: list[EnvState]
    actions: list[np.ndarray]       # actual pose deltas, len T
    gripper_toggles: list[bool]     # len T

    def status(self, task: TaskSpec) -> SubtaskStatus:
        return subtask_status(self.states, task)


def _pose_delta(before: EnvState, after: EnvState) -> np.ndarray:
    return np.concatenate([
        after.ee_position - before.ee_position,
        wrap_angles(after.ee_orientation - before.ee_orientation),
    ])


def _arrived(state: EnvState, wp: Waypoint) -> bool:
    if np.linalg.norm(state.ee_position - wp.position) > POS_TOL:
        return False
    if wp.orientation is not None:
        err = wrap_angles(state.ee_orientation - wp.orientation)
        if np.max(np.abs(err)) > ORI_TOL:
            return False
    return True


def _waypoint_plan(initial: EnvState, task: TaskSpec) -> list[Waypoint]:
    src = initial.objects[task.source].position
    up = np.array([0.0, 0.0, 1.0])
    tgt = task.target.center
    ori = task.orientation
    ori_vec = None
    if ori is not None:
        ori_vec = np.zeros(3)
        axis = {"roll": 0, "pitch": 1, "yaw": 2}[ori.axis]
        ori_vec[axis] = ori.target

    plan: list[Waypoint] = [Waypoint(src + 0.07 * up)]
    if task.task_id == "open-drawer":
        # orient before grasping so the slide keeps the constraint satisfied
        plan += [
            Waypoint(src, orientation=ori_vec),
            Waypoint(src, orientation=ori_vec, toggle_gripper=True),
            Waypoint(tgt, orientation=ori_vec),
            Waypoint(tgt, orientation=ori_vec, toggle_gripper=True),
            Waypoint(tgt + 0.08 * up),
        ]
    elif task.task_id == "water-plant":
        plan += [
            Waypoint(src),
            Waypoint(src, toggle_gripper=True),
            Waypoint(src + 0.10 * up),
            Waypoint(tgt),
            Waypoint(tgt, orientation=ori_vec),  # pour in place
        ]
    else:
        place_ori = ori_vec  # None for position-only tasks
        plan += [
            Waypoint(src),
            Waypoint(src, toggle_gripper=True),
            Waypoint(src + 0.10 * up),
            Waypoint(tgt + 0.05 * up, orientation=place_ori),
            Waypoint(tgt, orientation=place_ori),
            Waypoint(tgt, orientation=place_ori, toggle_gripper=True),
            Waypoint(tgt + 0.08 * up),
        ]
    return plan


def _controller_action(state: EnvState, wp: Waypoint,
                       rng: np.random.Generator | None) -> np.ndarray:
    a = np.zeros(6)
    a[:3] = np.clip(wp.position - state.ee_position, -0.9 * POS_CAP, 0.9 * POS_CAP)
    if wp.orientation is not None:
        err = wrap_angles(wp.orientation - state.ee_orientation)
        a[3:] = np.clip(err, -0.9 * ORI_CAP, 0.9 * ORI_CAP)
    if rng is not None:
        a[:3] += rng.normal(0.0, 0.0015, 3)
        a[3:] += rng.normal(0.0, 0.004, 3)
    return clip_action(a)


def scripted_demo(scene: Scene, task_id: str, seed: int,
                  jitter: float = 0.015) -> tuple[EpisodeTrace, TaskSpec]:
    """Full-task expert demo with seeded noise; guaranteed complete or raises."""
    if task_id not in TASK_IDS:
        raise KeyError(f"unknown task {task_id!r}")
    rng = np.random.default_rng([seed, TASK_IDS.index(task_id)])
    state = scene.initial_state(seed=seed, jitter=jitter)
    task = scene.task(task_id, state)
    utterances = INSTRUCTION_TEMPLATES[task_id]
    utterance = utterances[seed % len(utterances)]

    states = [state]
    actions: list[np.ndarray] = []
    toggles: list[bool] = []
    for wp in _waypoint_plan(states[0], task):
        ticks = 0
        while not _arrived(state, wp):
            ticks += 1
            if ticks > MAX_TICKS_PER_WAYPOINT:
                raise DemoFailure(f"{task_id}: stuck before waypoint {wp}")
            nxt = transition(state, _controller_action(state, wp, rng))
            actions.append(_pose_delta(state, nxt))
            toggles.append(False)
            state = nxt
            states.append(state)
        if wp.toggle_gripper:
            nxt = transition(state, np.zeros(6), gripper_toggle=True)
            actions.append(np.zeros(6))
            toggles.append(True)
            state = nxt
            states.append(state)

    trace = EpisodeTrace(task_id, utterance, states, actions, toggles)
    status = trace.status(task)
    if not status.completed:
        raise DemoFailure(f"{task_id}: demo did not complete ({status})")
    return trace, task


def _segment_from(state: EnvState, utterance: str, task_id: str,
                  per_tick_action) -> EpisodeTrace:
    states = [state]
    actions = []
    for _ in range(SEGMENT_TICKS):
        a = per_tick_action(states[-1])
        nxt = transition(states[-1], a)
        actions.append(_pose_delta(states[-1], nxt))
        states.append(nxt)
    return EpisodeTrace(task_id, utterance, states, actions,
                        [False] * len(actions))


def scripted_corrections(demo: EpisodeTrace, seed: int,
                         display_names: dict[str, str],
                         directional: list[str] | None = None,
                         num_directional: int = 2,
                         num_referential: int = 2) -> list[EpisodeTrace]:
    """Short correction segments sampled from intermediate demo states.

    `directional` pins which template utterances to realize (the dataset
    builder round-robins so every template gets coverage); by default they
    are sampled.
    """
    rng = np.random.default_rng([seed, 1000])
    segments: list[EpisodeTrace] = []
    usable = len(demo.states) - 1
    directional_pool = list(DIRECTIONAL_TEMPLATES.items())
    if directional is None:
        directional = [directional_pool[int(rng.integers(len(directional_pool)))][0]
                       for _ in range(num_directional)]

    for utterance in directional:
        start = demo.states[int(rng.integers(usable // 4, 3 * usable // 4))].copy()
        axis, sign = DIRECTIONAL_TEMPLATES[utterance]
        step = SEGMENT_POS_STEP if axis < 3 else SEGMENT_ORI_STEP

        def pure_axis(_state, axis=axis, sign=sign, step=step):
            a = np.zeros(6)
            a[axis] = sign * step
            return a

        segments.append(_segment_from(start, utterance, demo.task_id, pure_axis))

    names = list(display_names)
    for _ in range(num_referential):
        start = demo.states[int(rng.integers(usable // 4, 3 * usable // 4))].copy()
        candidates = [n for n in names if n != start.held_object]
        target = candidates[int(rng.integers(len(candidates)))]
        utterance = referential_utterance(display_names[target])

        def toward(state, target=target):
            direction = state.objects[target].position - state.ee_position
            dist = np.linalg.norm(direction)
            a = np.zeros(6)
            if dist > 1e-9:
                a[:3] = direction / dist * min(SEGMENT_POS_STEP, dist)
            return a

        segments.append(_segment_from(start, utterance, demo.task_id, toward))
    return segments
