"""Online interaction loop: correction stack, bases cache, 10 Hz ticks.

The session owns one episode. Utterance events (push/pop) re-resolve the
active utterance's gate value and retrieved exemplar immediately and
rebuild the control bases. On a tick, state-dependent bases (alpha=1) are
recomputed from the current state; state-independent bases (alpha=0) are
reused from the utterance-event cache, which is exact because the state
branch is gated out entirely.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .env.world import (EnvState, ORI_CAP, POS_CAP, TICK_SECONDS, state_vector,
                        transition)
from .language import ExemplarIndex, GatingOracle, embed
from .model import DegenerateBasesError, decode
from .nn.core import no_grad

DEGENERATE_GRACE_TICKS = 5


@dataclasses.dataclass
class CorrectionStack:
    """Instruction plus LIFO corrections; pop on empty is a flagged no-op."""

    instruction: str
    corrections: list[str] = dataclasses.field(default_factory=list)

    @property
    def active(self) -> str:
        return self.corrections[-1] if self.corrections else self.instruction

    def push(self, correction: str):
        if not correction or not correction.strip():
            raise ValueError("cannot push an empty correction")
        self.corrections.append(correction)

    def pop(self) -> bool:
        """True if a correction was removed; never touches the instruction."""
        if not self.corrections:
            return False
        self.corrections.pop()
        return True


def scale_action(raw: np.ndarray) -> np.ndarray:
    """Map decoded bases output to a capped per-tick action.

    Gain POS_CAP puts a unit joystick deflection at the position cap; the
    scale factor then guarantees max |pos| <= POS_CAP and
    max |orientation| <= ORI_CAP componentwise.
    """
    a = np.asarray(raw, dtype=np.float64) * POS_CAP
    sigma = 1.0
    mp = float(np.max(np.abs(a[:3])))
    mo = float(np.max(np.abs(a[3:])))
    if mp > POS_CAP:
        sigma = min(sigma, POS_CAP / mp)
    if mo > ORI_CAP:
        sigma = min(sigma, ORI_CAP / mo)
    return a * sigma


@dataclasses.dataclass
class PolicyBundle:
    """Everything inference needs: model, exemplar index, gate oracle."""

    model: object
    index: ExemplarIndex
    oracle: GatingOracle


class ControlSession:
    def __init__(self, bundle: PolicyBundle, instruction: str, env: EnvState):
        if not instruction or not instruction.strip():
            raise ValueError("instruction must be nonempty")
        if bundle.model is None or bundle.index is None:
            raise ValueError("model/index not loaded")
        self.bundle = bundle
        self.stack = CorrectionStack(instruction)
        self.env = env
        self.tick_count = 0
        self.latent_dim = bundle.model.config.latent_dim
        self.records: list[dict] = []
        self.initial_state = env.copy()
        self._degenerate_ticks = 0
        self._bases: np.ndarray | None = None
        self.alpha: int = 0
        self.exemplar = None
        self._refresh_utterance()

    # -- utterance events ----------------------------------------------------

    def _refresh_utterance(self):
        active = self.stack.active
        self.alpha = self.bundle.oracle.gate_alpha(
            self.stack.instruction, self.stack.corrections)
        self.exemplar = self.bundle.index.retrieve_nearest(embed(active))
        self._rebuild_bases()

    def _rebuild_bases(self):
        with no_grad():
            try:
                bases = self.bundle.model.control_bases(
                    state_vector(self.env), self.exemplar.embedding.vector,
                    float(self.alpha)).data
                self._bases = bases
                self._degenerate_ticks = 0
            except DegenerateBasesError:
                self._degenerate_ticks += 1
                if self._degenerate_ticks > DEGENERATE_GRACE_TICKS:
                    self._bases = None  # fall back to zero action

    def push_correction(self, correction: str):
        self.stack.push(correction)
        self._record_event("push", correction)
        self._refresh_utterance()

    def pop_correction(self) -> bool:
        popped = self.stack.pop()
        self._record_event("pop", popped)
        if popped:
            self._refresh_utterance()
        return popped

    def _record_event(self, kind: str, payload):
        self.records.append({"event": kind, "payload": payload,
                             "tick": self.tick_count})

    # -- control -------------------------------------------------------------

    @property
    def bases(self) -> np.ndarray | None:
        return self._bases

    def refresh_bases(self):
        """Bring the cached bases up to date with the current state.

        Only meaningful when the gate is open; closed-gate bases are
        state-independent and already exact.
        """
        if self.alpha == 1:
            self._rebuild_bases()

    def tick(self, z, gripper_toggle: bool = False) -> np.ndarray:
        """Apply one 100 ms control step; returns the executed action."""
        z = np.clip(np.asarray(z, dtype=np.float64), -1.0, 1.0)
        if z.shape != (self.latent_dim,):
            raise ValueError(f"z must have {self.latent_dim} components")
        if self.alpha == 1:
            self._rebuild_bases()  # state changed since last tick
        if self._bases is not None:
            action = scale_action(decode(self._bases, z))
        else:
            action = np.zeros(6)  # degenerate grace window exhausted
        self.env = transition(self.env, action, gripper_toggle=gripper_toggle)
        self.records.append({
            "tick": self.tick_count,
            "state": state_vector(self.env).tolist(),
            "active_utterance": self.stack.active,
            "alpha": self.alpha,
            "z": z.tolist(),
            "a": action.tolist(),
            "gripper_toggle": gripper_toggle,
        })
        self.tick_count += 1
        return action

    # -- episode log ---------------------------------------------------------

    def episode_log(self) -> dict:
        return {
            "instruction": self.stack.instruction,
            "tick_seconds": TICK_SECONDS,
            "initial_state": self.initial_state.to_dict(),
            "records": self.records,
        }

    def save_log(self, path):
        log = self.episode_log()
        lines = [json.dumps({"header": {k: v for k, v in log.items()
                                        if k != "records"}},
                            sort_keys=True, separators=(",", ":"))]
        lines += [json.dumps(r, sort_keys=True, separators=(",", ":"))
                  for r in log["records"]]
        Path(path).write_text("\n".join(lines) + "\n")


def load_log(path) -> dict:
    lines = [json.loads(l) for l in Path(path).read_text().splitlines()
             if l.strip()]
    if not lines or "header" not in lines[0]:
        raise ValueError("corrupt episode log: missing header")
    log = dict(lines[0]["header"])
    log["records"] = lines[1:]
    return log


def replay_log(log: dict) -> EnvState:
    """Re-run the logged actions through the simulator; deterministic, so the
    result matches the live episode's final state bit-exactly."""
    state = EnvState.from_dict(log["initial_state"])
    for rec in log["records"]:
        if "event" in rec:
            continue
        state = transition(state, np.array(rec["a"], dtype=np.float64),
                           gripper_toggle=rec["gripper_toggle"])
    return state
