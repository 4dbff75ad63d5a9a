"""The two comparison policies, untrained properties and trained behavior."""

import numpy as np
import pytest

from lilac.data import FULL_TASK, TrainConfig, train_policy
from lilac.data.training import _resolve_embedding
from lilac.env.world import POS_CAP
from lilac.model import ImitationModel, LilacConfig, LilacModel, LilaModel
from lilac.nn.core import no_grad

SMALL = LilacConfig(state_dim=5, hidden_dim=8, embed_dim=7)


class TestImitationForward:
    def _model(self):
        model = ImitationModel(SMALL, seed=0)
        model.eval_mode()
        return model

    def test_single_step_history_accepted(self):
        model = self._model()
        out = model.forward(np.zeros((1, 5)), np.zeros(7))
        assert out.data.shape == (6,)

    def test_full_window_accepted(self):
        model = self._model()
        out = model.forward(np.zeros((10, 5)), np.zeros(7))
        assert out.data.shape == (6,)

    def test_overlong_history_rejected(self):
        with pytest.raises(ValueError):
            self._model().forward(np.zeros((11, 5)), np.zeros(7))

    def test_deterministic(self):
        model = self._model()
        rng = np.random.default_rng(0)
        h = rng.normal(0, 1, (4, 5))
        e = rng.normal(0, 1, 7)
        with no_grad():
            a = model.forward(h, e).data
            b = model.forward(h, e).data
        np.testing.assert_array_equal(a, b)

    def test_batched_matches_single(self):
        model = self._model()
        rng = np.random.default_rng(1)
        h = rng.normal(0, 1, (3, 4, 5))
        e = rng.normal(0, 1, (3, 7))
        with no_grad():
            batched = model.forward(h, e).data
            singles = np.stack([model.forward(h[i], e[i]).data
                                for i in range(3)])
        np.testing.assert_allclose(batched, singles, rtol=1e-10, atol=1e-12)

    def test_history_order_matters(self):
        model = self._model()
        rng = np.random.default_rng(2)
        h = rng.normal(0, 1, (5, 5))
        e = rng.normal(0, 1, 7)
        with no_grad():
            a = model.forward(h, e).data
            b = model.forward(h[::-1].copy(), e).data
        assert not np.allclose(a, b)

    def test_checkpoint_round_trip(self, tmp_path):
        model = self._model()
        path = tmp_path / "imitation.ckpt"
        model.save(path, meta={"note": "test"})
        clone, meta = ImitationModel.load(path)
        assert meta["note"] == "test"
        rng = np.random.default_rng(3)
        h = rng.normal(0, 1, (6, 5))
        e = rng.normal(0, 1, 7)
        with no_grad():
            np.testing.assert_array_equal(model.forward(h, e).data,
                                          clone.forward(h, e).data)


class TestTrainedBaselines:
    def test_imitation_teacher_forcing(self, trained_imitation,
                                       bundled_dataset):
        """Replaying training history prefixes reproduces demo actions."""
        model = trained_imitation.model
        index = trained_imitation.index
        window = model.HISTORY_WINDOW
        errors = []
        for traj in bundled_dataset[:10]:
            e = _resolve_embedding(index, traj.utterance)
            for i in range(0, len(traj.states), 7):
                lo = max(0, i + 1 - window)
                hist = traj.states[lo:i + 1]
                with no_grad():
                    pred = model.forward(hist, e).data
                errors.append(np.mean((pred - traj.actions[i]) ** 2))
        assert float(np.mean(errors)) <= 0.1 * POS_CAP ** 2

    def test_imitation_loss_halves(self, trained_imitation):
        curves = trained_imitation.curves
        assert curves[-1]["train_loss"] <= 0.5 * curves[0]["train_loss"]

    def test_lila_close_to_lilac_on_instructions(self, trained_lilac,
                                                 trained_lila,
                                                 bundled_dataset):
        instructions = [t for t in bundled_dataset
                        if t.kind == FULL_TASK][:10]

        def loss(result, force_alpha_one):
            total, count = [], 0
            for traj in instructions:
                e = _resolve_embedding(result.index, traj.utterance)
                s = traj.states
                embeds = np.tile(e, (len(s), 1))
                alphas = np.ones(len(s)) if force_alpha_one \
                    else np.full(len(s), float(traj.alpha))
                with no_grad():
                    val = result.model.reconstruction_loss(
                        s, embeds, alphas, traj.actions).data
                total.append(float(val))
            return float(np.mean(total))

        lilac_loss = loss(trained_lilac, force_alpha_one=False)
        lila_loss = loss(trained_lila, force_alpha_one=True)
        assert lila_loss <= 2.0 * lilac_loss

    def test_lila_bases_state_dependent(self, trained_lila, desk_scene):
        from lilac.env.world import state_vector
        from lilac.language import embed

        model = trained_lila.model
        ex = trained_lila.index.retrieve_nearest(
            embed("put the paper in the trash"))
        s = state_vector(desk_scene.initial_state(seed=0))
        s2 = s.copy()
        s2[7] += 0.05  # move one object
        with no_grad():
            b1 = model.control_bases(s, ex.embedding.vector).data
            b2 = model.control_bases(s2, ex.embedding.vector).data
        assert np.max(np.abs(b1 - b2)) > 1e-6

    def test_lila_equals_lilac_at_alpha_one_fresh(self):
        """Same seed, same config: identical parameters and bases."""
        from lilac.language import embed

        lilac = LilacModel(SMALL, seed=9)
        lila = LilaModel(SMALL, seed=9)
        lilac.eval_mode()
        lila.eval_mode()
        rng = np.random.default_rng(0)
        s = rng.normal(0, 1, 5)
        e = embed("x", dim=7).vector
        with no_grad():
            np.testing.assert_array_equal(
                lilac.control_bases(s, e, 1.0).data,
                lila.control_bases(s, e).data)


class TestTrainedLilacQuality:
    def test_final_loss_below_20_percent_of_first(self, trained_lilac):
        curves = trained_lilac.curves
        assert curves[-1]["train_loss"] <= 0.2 * curves[0]["train_loss"]

    def test_loss_decreases_over_first_10_epochs(self, trained_lilac):
        curves = trained_lilac.curves
        assert curves[9]["train_loss"] < curves[0]["train_loss"]
