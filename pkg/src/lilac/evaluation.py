"""Scripted simulated users for automated policy evaluation.

For the two latent-action policies, a deterministic "user" picks the
joystick input each tick by one-step lookahead over a fixed grid of 17
directions (16 compass points plus null) at two magnitudes, greedily
reducing distance to the current stage target (source object before the
grasp, target region while holding). The gated policy's user also issues
corrections: after 10 consecutive ticks with no achievable progress it
pushes the template utterance whose training-time motion direction best
matches the remaining displacement, and pops it once progress resumes.
The imitation baseline runs open-loop from the instruction alone.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .env.tasks import EULER_AXES, Scene, SubtaskStatus, TaskSpec, update_status
from .env.templates import (CANONICAL_DIRECTIONAL, INSTRUCTION_TEMPLATES,
                            referential_utterance)
from .env.world import (EnvState, GRASP_RADIUS, ORI_CAP, POS_CAP,
                        state_vector, transition, wrap_angles)
from .language import embed
from .session import ControlSession, PolicyBundle, scale_action
from .model import decode
from .nn.core import no_grad

MAX_TICKS = 600
EVAL_JITTER = 0.025          # larger than the training jitter on purpose
STALL_TICKS = 10
POP_STREAK = 5
PROGRESS_EPS = 1e-4
ORI_WEIGHT = POS_CAP / ORI_CAP   # puts radians on the meter scale
GRIP_CLOSE_DIST = GRASP_RADIUS * 0.95
MAX_STACK_DEPTH = 3


def latent_grid(magnitudes=(0.5, 1.0)) -> np.ndarray:
    """Null input plus 16 compass directions at each magnitude."""
    angles = np.arange(16) * (2 * np.pi / 16)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    rows = [np.zeros(2)]
    for m in magnitudes:
        rows.extend(m * dirs)
    return np.stack(rows)


def _stage_target(state: EnvState, task: TaskSpec):
    """(position target for the ee, orientation constraint or None)."""
    if state.held_object != task.source:
        return state.objects[task.source].position, None
    return task.target.center - state.held_offset, task.orientation


def _errors(state: EnvState, task: TaskSpec):
    pos_target, ori = _stage_target(state, task)
    pos_err = pos_target - state.ee_position
    ori_err = np.zeros(3)
    if ori is not None:
        axis = EULER_AXES[ori.axis]
        ori_err[axis] = wrap_angles(
            np.array([ori.target - state.ee_orientation[axis]]))[0]
    return pos_err, ori_err


def _distance(state: EnvState, task: TaskSpec) -> float:
    pos_err, ori_err = _errors(state, task)
    return float(np.linalg.norm(pos_err) + ORI_WEIGHT * np.linalg.norm(ori_err))


def _predicted_distance(state: EnvState, task: TaskSpec,
                        action: np.ndarray) -> float:
    nxt = state.copy()
    nxt.ee_position = state.workspace.clip(state.ee_position + action[:3])
    nxt.ee_orientation = wrap_angles(state.ee_orientation + action[3:])
    if nxt.held_object is not None:
        nxt.objects[nxt.held_object].position = nxt.ee_position + nxt.held_offset
    return _distance(nxt, task)


def _gripper_wanted(state: EnvState, task: TaskSpec) -> bool:
    """Uniform harness gripper rule, shared by every policy."""
    src = state.objects[task.source]
    if state.held_object is None and not state.gripper_closed:
        return float(np.linalg.norm(src.position - state.ee_position)) \
            <= GRIP_CLOSE_DIST
    if state.held_object == task.source and task.release_to_complete:
        oriented = (task.orientation is None
                    or task.orientation.satisfied(state.ee_orientation))
        return task.target.contains(src.position) and oriented
    return False


def _best_template(state: EnvState, task: TaskSpec, display_names: dict,
                   directional_only: bool = False) -> str:
    """Template whose training-time direction best matches the needed move."""
    pos_err, ori_err = _errors(state, task)
    need = np.concatenate([pos_err / POS_CAP, ori_err / ORI_CAP])
    norm = np.linalg.norm(need)
    if norm < 1e-12:
        return CANONICAL_DIRECTIONAL[(2, +1)]
    need = need / norm
    best, best_score = None, -np.inf
    for (axis, sign), utt in CANONICAL_DIRECTIONAL.items():
        score = sign * need[axis]
        if score > best_score:
            best, best_score = utt, score
    if (not directional_only and state.held_object is None
            and np.linalg.norm(pos_err) > 1e-9):
        cand = np.zeros(6)
        cand[:3] = pos_err / np.linalg.norm(pos_err)
        score = float(cand @ need)
        if score > best_score:
            best = referential_utterance(display_names[task.source])
    return best


@dataclasses.dataclass
class RolloutResult:
    task_id: str
    policy: str
    seed: int
    status: SubtaskStatus
    ticks: int
    corrections_used: int
    session: ControlSession | None = None
    states: list[EnvState] | None = None


def scripted_user_rollout(bundle: PolicyBundle, scene: Scene, task_id: str,
                          seed: int, corrections: bool = True,
                          max_ticks: int = MAX_TICKS,
                          jitter: float = EVAL_JITTER,
                          display_names: dict | None = None) -> RolloutResult:
    env = scene.initial_state(seed=seed, jitter=jitter)
    task = scene.task(task_id, env)
    display_names = display_names or scene.display_names
    instruction = INSTRUCTION_TEMPLATES[task_id][0]
    session = ControlSession(bundle, instruction, env)
    grid = latent_grid()
    status = SubtaskStatus()
    update_status(status, env, task)
    stall = 0
    streak = 0
    pushes = 0

    while session.tick_count < max_ticks and not status.completed:
        state = session.env
        if _gripper_wanted(state, task):
            session.tick(np.zeros(2), gripper_toggle=True)
            update_status(status, session.env, task)
            # a grasp/release changes the stage target; stale corrections
            # about the old stage get cleared
            while corrections and session.stack.corrections:
                session.pop_correction()
            stall = streak = 0
            continue

        session.refresh_bases()
        bases = session.bases
        d0 = _distance(state, task)
        best_z, best_d = np.zeros(2), d0
        if bases is not None:
            with no_grad():
                for zz in grid:
                    a = scale_action(decode(bases, zz))
                    d = _predicted_distance(state, task, a)
                    if d < best_d - 1e-12:
                        best_z, best_d = zz, d
        session.tick(best_z)
        update_status(status, session.env, task)

        if not corrections:
            continue
        progress = d0 - best_d
        if progress < PROGRESS_EPS:
            stall += 1
            streak = 0
        else:
            stall = 0
            if session.stack.corrections:
                streak += 1
                if streak >= POP_STREAK:
                    # progress resumed: the correction has been addressed
                    session.pop_correction()
                    streak = 0
        if stall >= STALL_TICKS:
            wanted = _best_template(session.env, task, display_names)
            hit = bundle.index.retrieve_nearest(embed(wanted))
            if hit.exemplar_id == session.exemplar.exemplar_id:
                # the best-matching template lands on the already active
                # manifold; a pure directional template actually changes it
                wanted = _best_template(session.env, task, display_names,
                                        directional_only=True)
            if session.stack.corrections and session.stack.active == wanted:
                session.pop_correction()
            else:
                if len(session.stack.corrections) >= MAX_STACK_DEPTH:
                    session.pop_correction()
                session.push_correction(wanted)
                pushes += 1
            stall = 0
            streak = 0

    return RolloutResult(task_id, bundle.model.KIND, seed, status,
                         session.tick_count, pushes, session=session)


def imitation_rollout(model, index, scene: Scene, task_id: str, seed: int,
                      max_ticks: int = MAX_TICKS,
                      jitter: float = EVAL_JITTER) -> RolloutResult:
    """Open-loop execution from the instruction alone; no user input."""
    env = scene.initial_state(seed=seed, jitter=jitter)
    task = scene.task(task_id, env)
    instruction = INSTRUCTION_TEMPLATES[task_id][0]
    e = index.retrieve_nearest(embed(instruction)).embedding.vector
    window = model.HISTORY_WINDOW
    history = [state_vector(env)]
    status = SubtaskStatus()
    update_status(status, env, task)
    states = [env]
    ticks = 0
    while ticks < max_ticks and not status.completed:
        if _gripper_wanted(env, task):
            env = transition(env, np.zeros(6), gripper_toggle=True)
        else:
            hist = np.stack(history[-window:])
            if len(hist) < window:
                pad = np.tile(hist[0], (window - len(hist), 1))
                hist = np.concatenate([pad, hist])
            with no_grad():
                a = model.forward(hist, e).data
            env = transition(env, a)
        history.append(state_vector(env))
        states.append(env)
        update_status(status, env, task)
        ticks += 1
    return RolloutResult(task_id, model.KIND, seed, status, ticks, 0,
                         states=states)
