"""Utterance templates and the single directional frame table.

The directional map below is THE frame convention: every directional
utterance maps to exactly one signed world axis (x fwd, y left, z up,
roll/pitch/yaw), and both data generation and the scripted evaluation
users read from this table. Referential corrections name an object by its
display name. Instruction templates contain an object word on purpose, so
the offline gate heuristic labels them 1.
"""

from __future__ import annotations

# template -> (action axis 0..5, sign)
DIRECTIONAL_TEMPLATES: dict[str, tuple[int, int]] = {
    "move forward": (0, +1),
    "move backward": (0, -1),
    "to the left": (1, +1),
    "go left": (1, +1),
    "to the right": (1, -1),
    "move up": (2, +1),
    "move down": (2, -1),
    "twist left": (3, +1),
    "twist right": (3, -1),
    "tilt up": (4, +1),
    "tilt down": (4, -1),
    "tilt down a little bit": (4, -1),
    "rotate counterclockwise": (5, +1),
    "rotate clockwise": (5, -1),
}

# one canonical utterance per signed axis, for the scripted users
CANONICAL_DIRECTIONAL: dict[tuple[int, int], str] = {
    (0, +1): "move forward",
    (0, -1): "move backward",
    (1, +1): "to the left",
    (1, -1): "to the right",
    (2, +1): "move up",
    (2, -1): "move down",
    (3, +1): "twist left",
    (3, -1): "twist right",
    (4, +1): "tilt up",
    (4, -1): "tilt down",
    (5, +1): "rotate counterclockwise",
    (5, -1): "rotate clockwise",
}

INSTRUCTION_TEMPLATES: dict[str, list[str]] = {
    "clean-trash": [
        "throw the crumpled paper into the trash bin",
        "put the paper in the trash",
    ],
    "transfer-pen": [
        "move the blue marker into the metal tin",
        "transfer the marker to the tin",
    ],
    "open-drawer": [
        "open the bottom drawer by its knob",
        "pull the drawer open by the knob",
    ],
    "insert-book": [
        "pick up the book and insert it into the bookshelf",
        "put the book into the shelf",
    ],
    "water-plant": [
        "water the plant with the yellow cup",
        "pour the cup over the plant",
    ],
}


def referential_utterance(display_name: str) -> str:
    return f"towards the {display_name}"


def all_directional() -> list[str]:
    return list(DIRECTIONAL_TEMPLATES)
