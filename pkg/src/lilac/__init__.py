"""Shared-autonomy control with online language corrections."""

from .session import (ControlSession, CorrectionStack, PolicyBundle, load_log,
                      replay_log, scale_action)

__version__ = "0.1.0"

__all__ = [
    "ControlSession", "CorrectionStack", "PolicyBundle", "load_log",
    "replay_log", "scale_action", "__version__",
]
