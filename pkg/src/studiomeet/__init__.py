"""studiomeet: role-card AI agents run a design-studio SOP meeting that a
human designer steers in real time, over pluggable generative backends."""

from .domain import (
    ArtifactKind,
    EngineConfig,
    Meeting,
    Message,
    RequirementForm,
    RoleCard,
    Skill,
    SOPStage,
    StageArtifact,
)
from .engine import Interjection, MeetingEngine, SteppingClock, create_meeting
from .mocks import mock_toolbox
from .persistence import MeetingStore
from .registry import core_roster, default_registry

__version__ = "0.1.0"

__all__ = [
    "ArtifactKind",
    "EngineConfig",
    "Interjection",
    "Meeting",
    "MeetingEngine",
    "MeetingStore",
    "Message",
    "RequirementForm",
    "RoleCard",
    "SOPStage",
    "Skill",
    "StageArtifact",
    "SteppingClock",
    "core_roster",
    "create_meeting",
    "default_registry",
    "mock_toolbox",
    "__version__",
]
