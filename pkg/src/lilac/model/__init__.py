from .lilac import (DegenerateBasesError, LilacConfig, LilacModel, decode,
                    gram_schmidt)
from .baselines import ImitationModel, LilaModel

POLICY_KINDS = {"lilac": LilacModel, "lila": LilaModel, "imitation": ImitationModel}


def load_policy(path):
    """Load any checkpoint by its policy-type tag."""
    from ..nn import load_checkpoint

    kind, _, _, _ = load_checkpoint(path)
    if kind not in POLICY_KINDS:
        raise ValueError(f"unknown policy kind {kind!r}")
    return POLICY_KINDS[kind].load(path)


__all__ = [
    "DegenerateBasesError", "LilacConfig", "LilacModel", "LilaModel",
    "ImitationModel", "decode", "gram_schmidt", "load_policy", "POLICY_KINDS",
]
