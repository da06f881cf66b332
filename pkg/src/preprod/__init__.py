"""Stage-aware multi-agent orchestration for animation pre-production.

A core agent reads director messages, delegates artifact work to four
specialized agents, reviews their output, and publishes approved results to
versioned, lineage-aware stage boards. Providers are pluggable; the bundled
scripted provider makes whole sessions deterministic and replayable.
"""

from .boards import Project, load_project, save_project
from .config import EngineConfig
from .errors import EngineError
from .model import (
    AgentRole,
    ArtifactKind,
    Element,
    EventKind,
    Selection,
    SessionEvent,
    Stage,
    StageStatus,
    TaskSpec,
)
from .providers import HttpProvider, ScriptedProvider, TextImageProvider
from .scenario import ScenarioReport, run_scenario
from .session import Session, SessionService

__version__ = "0.1.0"

__all__ = [
    "AgentRole",
    "ArtifactKind",
    "Element",
    "EngineConfig",
    "EngineError",
    "EventKind",
    "HttpProvider",
    "Project",
    "ScenarioReport",
    "ScriptedProvider",
    "Selection",
    "Session",
    "SessionEvent",
    "SessionService",
    "Stage",
    "StageStatus",
    "TaskSpec",
    "TextImageProvider",
    "Project",
    "load_project",
    "run_scenario",
    "save_project",
    "__version__",
]
