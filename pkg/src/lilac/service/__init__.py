from .protocol import (KINDS, ProtocolError, SCHEMA_VERSION, SequenceChecker,
                       SequenceCounter, WireMessage)
from .server import create_app, create_replay_app

__all__ = [
    "KINDS", "ProtocolError", "SCHEMA_VERSION", "SequenceChecker",
    "SequenceCounter", "WireMessage", "create_app", "create_replay_app",
]
