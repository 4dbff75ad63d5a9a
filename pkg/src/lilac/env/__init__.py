from .tasks import (REACH_RADIUS, Scene, SubtaskStatus, TaskSpec, TASK_IDS,
                    subtask_status, update_status)
from .templates import (CANONICAL_DIRECTIONAL, DIRECTIONAL_TEMPLATES,
                        INSTRUCTION_TEMPLATES, referential_utterance)
from .world import (GRASP_RADIUS, ORI_CAP, POS_CAP, EnvState, ObjectState,
                    Workspace, clip_action, state_vector, transition,
                    wrap_angles)
from .scripted import (DemoFailure, EpisodeTrace, scripted_corrections,
                       scripted_demo)

__all__ = [
    "REACH_RADIUS", "Scene", "SubtaskStatus", "TaskSpec", "TASK_IDS",
    "subtask_status", "update_status", "CANONICAL_DIRECTIONAL",
    "DIRECTIONAL_TEMPLATES", "INSTRUCTION_TEMPLATES", "referential_utterance",
    "GRASP_RADIUS", "ORI_CAP", "POS_CAP", "EnvState", "ObjectState",
    "Workspace", "clip_action", "state_vector", "transition", "wrap_angles",
    "DemoFailure", "EpisodeTrace", "scripted_corrections", "scripted_demo",
]
