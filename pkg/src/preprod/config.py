"""Engine configuration: delegation tables, completion criteria, budgets.

Defaults are embedded; a project configuration file (JSON) may override any
field. Stage names and artifact kinds appear in config files by their wire
values ("scripting", "scene_list").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from .errors import IoFailureError
from .model import ArtifactKind, Stage

#: Artifacts that must be canonical before a stage counts as complete.
DEFAULT_COMPLETION_CRITERIA: dict[Stage, tuple[ArtifactKind, ...]] = {
    Stage.PLANNING: (),  # complete once the project brief is captured
    Stage.IDEATION: (ArtifactKind.STORY_CONCEPT, ArtifactKind.STYLE_DESCRIPTION),
    Stage.SCRIPTING: (ArtifactKind.STORY_OUTLINE, ArtifactKind.SCENE_LIST),
    Stage.DESIGN: (ArtifactKind.CHARACTER_SHEET,),
    Stage.STORYBOARD: (ArtifactKind.STORYBOARD_SEQUENCE,),
}

#: Canonical artifacts that must exist before a kind can be produced at all.
DEFAULT_HARD_PREREQS: dict[ArtifactKind, tuple[ArtifactKind, ...]] = {
    ArtifactKind.STORY_OUTLINE: (ArtifactKind.STORY_CONCEPT,),
    ArtifactKind.SCENE_LIST: (ArtifactKind.STORY_OUTLINE,),
    ArtifactKind.STYLEFRAME: (ArtifactKind.SCENE_LIST,),
    ArtifactKind.STORYBOARD_SEQUENCE: (ArtifactKind.SCENE_LIST,),
}

#: Absent prerequisites that produce a warning but do not block the task.
DEFAULT_SOFT_PREREQS: dict[ArtifactKind, tuple[ArtifactKind, ...]] = {
    ArtifactKind.CHARACTER_SHEET: (ArtifactKind.CHARACTER_CONCEPT,),
}

#: Canonical artifacts packaged as context when present, in payload order.
DEFAULT_CONTEXT_SOURCES: dict[ArtifactKind, tuple[ArtifactKind, ...]] = {
    ArtifactKind.LOGLINE: (),
    ArtifactKind.STORY_CONCEPT: (),
    ArtifactKind.WORLD_CONCEPT: (ArtifactKind.STORY_CONCEPT,),
    ArtifactKind.STYLE_DESCRIPTION: (ArtifactKind.STORY_CONCEPT,),
    ArtifactKind.CHARACTER_CONCEPT: (ArtifactKind.STORY_CONCEPT,),
    ArtifactKind.THREE_ACT_STRUCTURE: (ArtifactKind.STORY_CONCEPT,),
    ArtifactKind.STORY_OUTLINE: (
        ArtifactKind.STORY_CONCEPT,
        ArtifactKind.THREE_ACT_STRUCTURE,
    ),
    ArtifactKind.SCENE_LIST: (ArtifactKind.STORY_OUTLINE,),
    ArtifactKind.SCRIPT: (ArtifactKind.STORY_OUTLINE, ArtifactKind.SCENE_LIST),
    ArtifactKind.CHARACTER_SHEET: (
        ArtifactKind.CHARACTER_CONCEPT,
        ArtifactKind.STYLE_DESCRIPTION,
    ),
    ArtifactKind.ENVIRONMENT_DESIGN: (
        ArtifactKind.WORLD_CONCEPT,
        ArtifactKind.STYLE_DESCRIPTION,
    ),
    ArtifactKind.HERO_IMAGE: (
        ArtifactKind.STORY_CONCEPT,
        ArtifactKind.STYLE_DESCRIPTION,
    ),
    ArtifactKind.STYLEFRAME: (
        ArtifactKind.SCENE_LIST,
        ArtifactKind.STYLE_DESCRIPTION,
        ArtifactKind.CHARACTER_SHEET,
    ),
    ArtifactKind.STORYBOARD_SEQUENCE: (
        ArtifactKind.SCENE_LIST,
        ArtifactKind.CHARACTER_SHEET,
        ArtifactKind.STYLE_DESCRIPTION,
    ),
}


@dataclass(frozen=True)
class EngineConfig:
    max_revision_rounds: int = 2
    parallel_cap: int = 4
    window_max_entries: int = 50
    window_max_chars: int = 16000
    chunk_size: int = 10
    keep_recent: int = 20
    retrieval_k: int = 3
    event_payload_cap: int = 262144
    event_ceiling: int = 200
    use_judge: bool = False
    prompts_dir: Optional[Path] = None
    completion_criteria: Mapping[Stage, tuple[ArtifactKind, ...]] = field(
        default_factory=lambda: dict(DEFAULT_COMPLETION_CRITERIA)
    )
    hard_prereqs: Mapping[ArtifactKind, tuple[ArtifactKind, ...]] = field(
        default_factory=lambda: dict(DEFAULT_HARD_PREREQS)
    )
    soft_prereqs: Mapping[ArtifactKind, tuple[ArtifactKind, ...]] = field(
        default_factory=lambda: dict(DEFAULT_SOFT_PREREQS)
    )
    context_sources: Mapping[ArtifactKind, tuple[ArtifactKind, ...]] = field(
        default_factory=lambda: dict(DEFAULT_CONTEXT_SOURCES)
    )

    @classmethod
    def load(cls, path: Path | str | None = None) -> "EngineConfig":
        """Defaults, optionally overridden by a JSON config file."""
        config = cls()
        if path is None:
            return config
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoFailureError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IoFailureError(f"config {path} is not valid JSON: {exc}") from exc
        return config.with_overrides(raw)

    def with_overrides(self, raw: Mapping[str, Any]) -> "EngineConfig":
        updates: dict[str, Any] = {}
        for key in (
            "max_revision_rounds",
            "parallel_cap",
            "window_max_entries",
            "window_max_chars",
            "chunk_size",
            "keep_recent",
            "retrieval_k",
            "event_payload_cap",
            "event_ceiling",
        ):
            if key in raw:
                updates[key] = int(raw[key])
        if "use_judge" in raw:
            updates["use_judge"] = bool(raw["use_judge"])
        if "prompts_dir" in raw and raw["prompts_dir"]:
            updates["prompts_dir"] = Path(raw["prompts_dir"])
        if "completion_criteria" in raw:
            updates["completion_criteria"] = {
                Stage(stage): tuple(ArtifactKind(k) for k in kinds)
                for stage, kinds in raw["completion_criteria"].items()
            }
        for key in ("hard_prereqs", "soft_prereqs", "context_sources"):
            if key in raw:
                updates[key] = {
                    ArtifactKind(kind): tuple(ArtifactKind(k) for k in deps)
                    for kind, deps in raw[key].items()
                }
        return replace(self, **updates)
