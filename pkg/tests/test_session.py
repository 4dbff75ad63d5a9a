"""Correction stack semantics, the control session, and episode logs."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lilac.env import POS_CAP, ORI_CAP, Scene
from lilac.env.world import state_vector
from lilac.language import GatingOracle, build_index, heuristic_alpha
from lilac.model import LilacConfig, LilacModel
from lilac.session import (ControlSession, CorrectionStack, PolicyBundle,
                           load_log, replay_log, scale_action)

UTTERANCES = [
    "put the paper in the trash",
    "water the plant with the yellow cup",
    "to the left",
    "tilt down a little bit",
    "go left",
    "move up",
    "towards the book",
]


@pytest.fixture(scope="module")
def scene():
    return Scene.load()


@pytest.fixture(scope="module")
def bundle(scene):
    model = LilacModel(LilacConfig(state_dim=scene.state_dim, hidden_dim=16,
                                   embed_dim=64), seed=0)
    model.eval_mode()
    index = build_index(UTTERANCES, heuristic_alpha)
    return PolicyBundle(model, index, GatingOracle())


class TestCorrectionStack:
    def test_active_defaults_to_instruction(self):
        stack = CorrectionStack("clean the desk")
        assert stack.active == "clean the desk"

    def test_push_pop_lifo(self):
        stack = CorrectionStack("u")
        stack.push("c1")
        stack.push("c2")
        assert stack.active == "c2"
        assert stack.pop() is True
        assert stack.active == "c1"
        assert stack.pop() is True
        assert stack.active == "u"

    def test_pop_empty_is_flagged_noop(self):
        stack = CorrectionStack("u")
        assert stack.pop() is False
        assert stack.active == "u"

    def test_empty_push_rejected(self):
        with pytest.raises(ValueError):
            CorrectionStack("u").push("  ")

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.one_of(
        st.sampled_from(UTTERANCES).map(lambda u: ("push", u)),
        st.just(("pop", None))), max_size=30))
    def test_stack_axioms(self, ops):
        stack = CorrectionStack("instruction")
        model = []
        for op, arg in ops:
            if op == "push":
                stack.push(arg)
                model.append(arg)
            else:
                popped = stack.pop()
                assert popped == bool(model)
                if model:
                    model.pop()
            assert stack.corrections == model
            assert stack.active == (model[-1] if model else "instruction")


class TestScaleAction:
    def test_zero_maps_to_zero(self):
        np.testing.assert_array_equal(scale_action(np.zeros(6)), np.zeros(6))

    def test_caps_respected(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = scale_action(rng.normal(0, 2, 6))
            assert np.max(np.abs(a[:3])) <= POS_CAP + 1e-12
            assert np.max(np.abs(a[3:])) <= ORI_CAP + 1e-12

    def test_direction_preserved(self):
        raw = np.array([3.0, -1.0, 0.5, 0.2, 0.0, -0.1])
        a = scale_action(raw)
        cos = a @ raw / (np.linalg.norm(a) * np.linalg.norm(raw))
        assert cos == pytest.approx(1.0, abs=1e-12)


class TestControlSession:
    def test_start_resolves_instruction(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        assert session.stack.active == "put the paper in the trash"
        assert session.alpha == 1
        assert session.bases is not None

    def test_start_deterministic(self, bundle, scene):
        a = ControlSession(bundle, "put the paper in the trash",
                           scene.initial_state())
        b = ControlSession(bundle, "put the paper in the trash",
                           scene.initial_state())
        np.testing.assert_array_equal(a.bases, b.bases)

    def test_empty_instruction_rejected(self, bundle, scene):
        with pytest.raises(ValueError):
            ControlSession(bundle, " ", scene.initial_state())

    def test_push_changes_alpha_and_bases(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        before = session.bases.copy()
        session.push_correction("tilt down a little bit")
        assert session.alpha == 0
        assert session.stack.active == "tilt down a little bit"
        assert not np.array_equal(session.bases, before)

    def test_push_pop_restores_bases_exactly(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        before = session.bases.copy()
        for c in ["go left", "tilt down a little bit", "towards the book"]:
            session.push_correction(c)
        for _ in range(3):
            assert session.pop_correction() is True
        np.testing.assert_array_equal(session.bases, before)

    def test_pop_empty_noop(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        assert session.pop_correction() is False
        assert session.stack.active == "put the paper in the trash"

    def test_zero_z_keeps_pose(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        pose_before = state_vector(session.env)[:6].copy()
        a = session.tick(np.zeros(2))
        np.testing.assert_array_equal(a, np.zeros(6))
        np.testing.assert_array_equal(state_vector(session.env)[:6],
                                      pose_before)

    def test_alpha0_action_state_independent(self, bundle, scene):
        z = np.array([0.7, -0.3])
        actions = []
        for seed in (0, 1):
            session = ControlSession(bundle, "put the paper in the trash",
                                     scene.initial_state(seed=seed,
                                                         jitter=0.05))
            session.push_correction("go left")
            assert session.alpha == 0
            actions.append(session.tick(z.copy()))
        np.testing.assert_array_equal(actions[0], actions[1])

    def test_action_caps(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = session.tick(rng.uniform(-1, 1, 2))
            assert np.max(np.abs(a[:3])) <= POS_CAP + 1e-12
            assert np.max(np.abs(a[3:])) <= ORI_CAP + 1e-12

    def test_bad_z_shape_rejected(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        with pytest.raises(ValueError):
            session.tick(np.zeros(3))

    def test_alpha_calls_are_event_driven(self, bundle, scene):
        calls = []
        orig = bundle.oracle.gate_alpha

        class Counting:
            def gate_alpha(self, utterance, corrections=None):
                calls.append(1)
                return orig(utterance, corrections)

        session = ControlSession(
            PolicyBundle(bundle.model, bundle.index, Counting()),
            "put the paper in the trash", scene.initial_state())
        for _ in range(40):
            session.tick(np.array([0.2, 0.1]))
        session.push_correction("go left")
        for _ in range(40):
            session.tick(np.array([0.2, 0.1]))
        session.pop_correction()
        # one per activation: start, push, pop; never one per tick
        assert len(calls) == 3


class TestEpisodeLog:
    def test_replay_bit_exact(self, bundle, scene, tmp_path):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state(seed=4, jitter=0.02))
        rng = np.random.default_rng(2)
        for i in range(30):
            if i == 10:
                session.push_correction("move up")
            if i == 20:
                session.pop_correction()
            session.tick(rng.uniform(-1, 1, 2), gripper_toggle=(i == 15))
        path = tmp_path / "episode.jsonl"
        session.save_log(path)
        final = replay_log(load_log(path))
        np.testing.assert_array_equal(state_vector(final),
                                      state_vector(session.env))
        assert final.held_object == session.env.held_object
        assert final.gripper_closed == session.env.gripper_closed

    def test_corrupt_log_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"not_header": {}}\n')
        with pytest.raises(ValueError, match="header"):
            load_log(path)

    def test_log_records_utterance_and_alpha(self, bundle, scene):
        session = ControlSession(bundle, "put the paper in the trash",
                                 scene.initial_state())
        session.tick(np.zeros(2))
        session.push_correction("go left")
        session.tick(np.zeros(2))
        ticks = [r for r in session.records if "event" not in r]
        assert ticks[0]["active_utterance"] == "put the paper in the trash"
        assert ticks[0]["alpha"] == 1
        assert ticks[1]["active_utterance"] == "go left"
        assert ticks[1]["alpha"] == 0
