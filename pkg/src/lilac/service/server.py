"""Websocket teleoperation service.

One control session per connection. The server owns the simulator and the
10 Hz loop; clients stream latent inputs, gripper toggles, and correction
events, and receive state updates every tick. Inbound events are queued
and applied at the next tick boundary in arrival order. Outbound frames
go through a small bounded queue per connection: a slow consumer drops
frames, it never delays the loop.
"""

from __future__ import annotations

import asyncio
import logging
import time
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..env.tasks import Scene, SubtaskStatus, TASK_IDS, update_status
from ..env.templates import INSTRUCTION_TEMPLATES
from ..env.world import TICK_SECONDS
from ..session import ControlSession, load_log
from .protocol import (ProtocolError, SequenceChecker, SequenceCounter,
                       WireMessage)

log = logging.getLogger(__name__)

OUTBOUND_QUEUE_SIZE = 8
CLIENT_KINDS = frozenset({"latent_input", "correction_push", "correction_pop",
                          "gripper_toggle"})


def _state_payload(session: ControlSession, status: SubtaskStatus,
                   z: np.ndarray, a: np.ndarray) -> dict:
    return {
        "tick": session.tick_count,
        "state": session.env.to_dict(),
        "active_utterance": session.stack.active,
        "instruction": session.stack.instruction,
        "corrections": list(session.stack.corrections),
        "alpha": session.alpha,
        "subtasks": status.as_dict(),
        "z": z.tolist(),
        "a": a.tolist(),
    }


class Connection:
    """Per-connection plumbing: inbound event list, outbound drop-queue."""

    def __init__(self, ws: WebSocket, session_id: str):
        self.ws = ws
        self.session_id = session_id
        self.inbound: asyncio.Queue = asyncio.Queue()
        self.outbound: asyncio.Queue = asyncio.Queue(maxsize=OUTBOUND_QUEUE_SIZE)
        self.out_seq = SequenceCounter()
        self.in_seq = SequenceChecker()
        self.dropped_frames = 0
        self.closed = False

    def send(self, kind: str, payload: dict):
        msg = WireMessage(kind, payload, self.out_seq.take(), self.session_id)
        try:
            self.outbound.put_nowait(msg)
        except asyncio.QueueFull:
            self.dropped_frames += 1

    async def sender(self):
        while True:
            msg = await self.outbound.get()
            if msg is None:
                return
            try:
                await self.ws.send_text(msg.to_json())
            except Exception:
                self.closed = True
                return

    async def receiver(self):
        while True:
            try:
                text = await self.ws.receive_text()
            except (WebSocketDisconnect, RuntimeError):
                self.closed = True
                return
            try:
                msg = WireMessage.from_json(text)
                self.in_seq.check(msg.seq)
                if msg.kind not in CLIENT_KINDS:
                    raise ProtocolError(
                        f"kind {msg.kind!r} not accepted from clients")
            except ProtocolError as err:
                self.send("error", {"message": str(err)})
                continue
            self.inbound.put_nowait(msg)


def create_app(bundle=None, scene: Scene | None = None,
               task: str | None = None, seed: int = 0,
               record_dir=None, tick_seconds: float = TICK_SECONDS,
               static_dir=None) -> FastAPI:
    """Live teleoperation app; requires a loaded policy bundle.

    When static_dir points at a built browser client, its files are served
    from the root path so one process hosts both the UI and the socket.
    """
    if scene is None:
        scene = Scene.load()
    task = task or TASK_IDS[0]
    app = FastAPI()
    app.state.bundle = bundle
    app.state.scene = scene
    app.state.task = task
    app.state.seed = seed
    app.state.record_dir = Path(record_dir) if record_dir else None
    app.state.tick_seconds = tick_seconds

    @app.get("/health")
    def health():
        return {"ok": True, "task": app.state.task}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        conn = Connection(ws, uuid.uuid4().hex)
        env = app.state.scene.initial_state(seed=app.state.seed)
        task_spec = app.state.scene.task(app.state.task, env)
        instruction = INSTRUCTION_TEMPLATES[app.state.task][0]
        session = ControlSession(app.state.bundle, instruction, env)
        status = SubtaskStatus()
        update_status(status, env, task_spec)

        conn.send("session_start", {
            "session_id": conn.session_id,
            "task_id": app.state.task,
            "instruction": instruction,
            "tick_seconds": app.state.tick_seconds,
            "scene": env.to_dict(),
        })

        sender = asyncio.create_task(conn.sender())
        receiver = asyncio.create_task(conn.receiver())
        held_z = np.zeros(session.latent_dim)
        try:
            deadline = time.monotonic()
            while not conn.closed:
                toggle = False
                while not conn.inbound.empty():
                    msg = conn.inbound.get_nowait()
                    if msg.kind == "latent_input":
                        z = np.asarray(msg.payload.get("z", []), dtype=float)
                        if z.shape == (session.latent_dim,):
                            held_z = np.clip(z, -1.0, 1.0)
                        else:
                            conn.send("error",
                                      {"message": f"z must have "
                                                  f"{session.latent_dim} axes"})
                    elif msg.kind == "gripper_toggle":
                        toggle = True
                    elif msg.kind == "correction_push":
                        text = str(msg.payload.get("text", ""))
                        try:
                            session.push_correction(text)
                        except ValueError as err:
                            conn.send("error", {"message": str(err)})
                    elif msg.kind == "correction_pop":
                        session.pop_correction()
                a = session.tick(held_z, gripper_toggle=toggle)
                before = status.as_dict()
                update_status(status, session.env, task_spec)
                conn.send("state_update", _state_payload(session, status,
                                                         held_z, a))
                if status.as_dict() != before:
                    conn.send("subtask_update", status.as_dict())
                deadline += app.state.tick_seconds
                delay = deadline - time.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    deadline = time.monotonic()  # fell behind; don't burst
        finally:
            receiver.cancel()
            if app.state.record_dir:
                app.state.record_dir.mkdir(parents=True, exist_ok=True)
                session.save_log(app.state.record_dir
                                 / f"episode-{conn.session_id}.jsonl")
            conn.send("session_end", {"ticks": session.tick_count,
                                      "subtasks": status.as_dict()})
            await conn.outbound.put(None)
            try:
                await asyncio.wait_for(sender, timeout=1.0)
            except (asyncio.TimeoutError, asyncio.CancelledError):
                sender.cancel()

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")

    return app


def create_replay_app(log_path, speed: float = 1.0) -> FastAPI:
    """Re-broadcasts a recorded episode over the same wire schema."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    episode = load_log(log_path)
    app = FastAPI()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        conn = Connection(ws, uuid.uuid4().hex)
        sender = asyncio.create_task(conn.sender())
        interval = episode.get("tick_seconds", TICK_SECONDS) / speed
        conn.send("session_start", {
            "session_id": conn.session_id,
            "instruction": episode.get("instruction", ""),
            "tick_seconds": interval,
            "scene": episode["initial_state"],
            "replay": True,
        })
        try:
            for rec in episode["records"]:
                if conn.closed:
                    break
                if "event" in rec:
                    continue
                conn.send("state_update", rec)
                await asyncio.sleep(interval)
        finally:
            conn.send("session_end", {"replay": True})
            await conn.outbound.put(None)
            try:
                await asyncio.wait_for(sender, timeout=1.0)
            except (asyncio.TimeoutError, asyncio.CancelledError):
                sender.cancel()

    return app
