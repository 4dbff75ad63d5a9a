from .dataset import (CORRECTION, FULL_TASK, Trajectory, build_dataset,
                      compute_action_deltas, dataset_hash, load_dataset,
                      preprocess_alphas, save_dataset, split)
from .training import TrainConfig, TrainResult, train_policy

__all__ = [
    "CORRECTION", "FULL_TASK", "Trajectory", "build_dataset",
    "compute_action_deltas", "dataset_hash", "load_dataset",
    "preprocess_alphas", "save_dataset", "split",
    "TrainConfig", "TrainResult", "train_policy",
]
