"""Shared fixtures. The expensive trained-policy fixtures are session
scoped: the three policies are trained exactly once per test run, on the
same bundled dataset artifact, and shared by every test that needs them."""

import pytest

from lilac.data import TrainConfig, build_dataset, preprocess_alphas, train_policy
from lilac.env import Scene
from lilac.language import GatingOracle


@pytest.fixture(scope="session")
def desk_scene():
    return Scene.load()


@pytest.fixture(scope="session")
def bundled_dataset(desk_scene):
    data = build_dataset(desk_scene)
    return preprocess_alphas(data, GatingOracle())


@pytest.fixture(scope="session")
def trained_lilac(bundled_dataset):
    return train_policy("lilac", bundled_dataset, TrainConfig())


@pytest.fixture(scope="session")
def trained_lila(bundled_dataset):
    return train_policy("lila", bundled_dataset, TrainConfig())


@pytest.fixture(scope="session")
def trained_imitation(bundled_dataset):
    return train_policy("imitation", bundled_dataset, TrainConfig())
