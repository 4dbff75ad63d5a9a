"""Wire protocol and the websocket teleoperation service."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from lilac.env import Scene
from lilac.language import GatingOracle, build_index, heuristic_alpha
from lilac.model import LilacConfig, LilacModel
from lilac.service import (KINDS, ProtocolError, SequenceChecker,
                           SequenceCounter, WireMessage, create_app,
                           create_replay_app)
from lilac.session import ControlSession, PolicyBundle

json_scalars = st.one_of(st.none(), st.booleans(),
                         st.integers(-10**9, 10**9),
                         st.floats(allow_nan=False, allow_infinity=False),
                         st.text(max_size=20))
json_values = st.recursive(
    json_scalars,
    lambda children: st.one_of(st.lists(children, max_size=4),
                               st.dictionaries(st.text(max_size=8), children,
                                               max_size=4)),
    max_leaves=12)
payloads = st.dictionaries(st.text(max_size=12), json_values, max_size=5)


class TestProtocol:
    @settings(max_examples=300, deadline=None)
    @given(kind=st.sampled_from(sorted(KINDS)), payload=payloads,
           seq=st.integers(0, 10**9), session_id=st.text(max_size=16))
    def test_round_trip_lossless(self, kind, payload, seq, session_id):
        msg = WireMessage(kind, payload, seq, session_id)
        clone = WireMessage.from_json(msg.to_json())
        assert clone == msg

    def test_unknown_kind_rejected(self):
        with pytest.raises(ProtocolError):
            WireMessage("teleport", {}, 0, "s")

    def test_negative_seq_rejected(self):
        with pytest.raises(ProtocolError):
            WireMessage("state_update", {}, -1, "s")

    def test_malformed_json_rejected(self):
        with pytest.raises(ProtocolError):
            WireMessage.from_json("{nope")
        with pytest.raises(ProtocolError):
            WireMessage.from_json(json.dumps({"v": 1, "kind": "error"}))
        with pytest.raises(ProtocolError):
            WireMessage.from_json(json.dumps(
                {"v": 99, "kind": "error", "payload": {}, "seq": 0,
                 "session_id": "x"}))

    def test_sequence_counter_strictly_increases(self):
        counter = SequenceCounter()
        values = [counter.take() for _ in range(10)]
        assert values == sorted(set(values))

    def test_sequence_checker(self):
        checker = SequenceChecker()
        checker.check(0)
        checker.check(5)
        with pytest.raises(ProtocolError):
            checker.check(5)
        with pytest.raises(ProtocolError):
            checker.check(3)


@pytest.fixture(scope="module")
def scene():
    return Scene.load()


@pytest.fixture(scope="module")
def bundle(scene):
    model = LilacModel(LilacConfig(state_dim=scene.state_dim, hidden_dim=16,
                                   embed_dim=64), seed=0)
    model.eval_mode()
    index = build_index(["put the paper in the trash", "go left",
                         "tilt down a little bit", "move up"],
                        heuristic_alpha)
    return PolicyBundle(model, index, GatingOracle())


@pytest.fixture()
def app(bundle, scene):
    # fast ticks keep the protocol tests quick; timing runs elsewhere
    return create_app(bundle=bundle, scene=scene, task="clean-trash",
                      tick_seconds=0.01)


def recv(ws):
    return WireMessage.from_json(ws.receive_text())


def recv_kind(ws, kind, limit=200):
    for _ in range(limit):
        msg = recv(ws)
        if msg.kind == kind:
            return msg
    raise AssertionError(f"no {kind} frame within {limit} messages")


def send(ws, kind, payload, seq, session_id):
    ws.send_text(WireMessage(kind, payload, seq, session_id).to_json())


class TestService:
    def test_handshake_sends_scene(self, app):
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                hello = recv(ws)
                assert hello.kind == "session_start"
                assert hello.payload["task_id"] == "clean-trash"
                assert "objects" in hello.payload["scene"]
                assert hello.payload["instruction"]

    def test_streams_state_updates_with_increasing_seq(self, app):
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                hello = recv(ws)
                seqs = [hello.seq]
                for _ in range(5):
                    msg = recv_kind(ws, "state_update")
                    seqs.append(msg.seq)
                    assert msg.payload["active_utterance"]
                assert all(b > a for a, b in zip(seqs, seqs[1:]))

    def test_correction_push_reflected(self, app):
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                hello = recv(ws)
                sid = hello.payload["session_id"]
                send(ws, "correction_push", {"text": "tilt down a little bit"},
                     0, sid)
                for _ in range(100):
                    msg = recv_kind(ws, "state_update")
                    if msg.payload["active_utterance"] == "tilt down a little bit":
                        assert msg.payload["alpha"] == 0
                        assert msg.payload["corrections"] == \
                            ["tilt down a little bit"]
                        break
                else:
                    raise AssertionError("correction never became active")
                send(ws, "correction_pop", {}, 1, sid)
                for _ in range(100):
                    msg = recv_kind(ws, "state_update")
                    if msg.payload["corrections"] == []:
                        assert msg.payload["alpha"] == 1
                        break
                else:
                    raise AssertionError("pop never applied")

    def test_latent_input_moves_ee(self, app):
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                hello = recv(ws)
                sid = hello.payload["session_id"]
                first = recv_kind(ws, "state_update")
                start = np.array(first.payload["state"]["ee_position"])
                send(ws, "latent_input", {"z": [1.0, 0.0]}, 0, sid)
                last = None
                for _ in range(30):
                    last = recv_kind(ws, "state_update")
                end = np.array(last.payload["state"]["ee_position"])
                assert np.linalg.norm(end - start) > 1e-6

    def test_malformed_message_survives(self, app):
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                recv(ws)  # session_start
                ws.send_text("this is not json")
                err = recv_kind(ws, "error")
                assert "JSON" in err.payload["message"]
                # connection still alive and streaming
                assert recv_kind(ws, "state_update")

    def test_server_only_kind_rejected(self, app):
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                hello = recv(ws)
                send(ws, "state_update", {}, 0, hello.payload["session_id"])
                err = recv_kind(ws, "error")
                assert "not accepted" in err.payload["message"]


class TestReplay:
    def _record_episode(self, bundle, scene, path):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        rng = np.random.default_rng(0)
        for _ in range(12):
            session.tick(rng.uniform(-1, 1, 2))
        session.save_log(path)
        return session

    def test_replay_streams_identical_states(self, bundle, scene, tmp_path):
        path = tmp_path / "episode.jsonl"
        live = self._record_episode(bundle, scene, path)
        app = create_replay_app(path, speed=100.0)
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                hello = recv(ws)
                assert hello.kind == "session_start"
                assert hello.payload["replay"] is True
                states = []
                while True:
                    msg = recv(ws)
                    if msg.kind == "session_end":
                        break
                    states.append(msg.payload["state"])
        live_states = [r["state"] for r in live.records if "event" not in r]
        assert states == live_states

    def test_truncated_log_clean_end(self, bundle, scene, tmp_path):
        path = tmp_path / "episode.jsonl"
        self._record_episode(bundle, scene, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:3]) + "\n")
        app = create_replay_app(path, speed=100.0)
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                kinds = []
                while True:
                    msg = recv(ws)
                    kinds.append(msg.kind)
                    if msg.kind == "session_end":
                        break
                assert kinds[0] == "session_start"
                assert kinds[-1] == "session_end"

    def test_bad_speed_rejected(self, tmp_path):
        path = tmp_path / "episode.jsonl"
        path.write_text('{"header": {"initial_state": {}}}\n')
        with pytest.raises(ValueError):
            create_replay_app(path, speed=0)
