"""Prompt library: base/stage prompts for the core agent, role prompts for the
specialists, and the shared tool template. All are plain editable text files;
the packaged defaults can be overridden with a prompts directory."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import MissingPromptFileError
from .model import AgentRole, Stage

_STAGE_FILES = {stage: f"stage_{stage.value}.txt" for stage in Stage}
_ROLE_FILES = {
    AgentRole.IDEATION: "role_ideation.txt",
    AgentRole.SCRIPTING: "role_scripting.txt",
    AgentRole.DESIGN: "role_design.txt",
    AgentRole.ART: "role_art.txt",
}


class PromptLibrary:
    def __init__(
        self,
        base: str,
        stage_prompts: dict[Stage, str],
        role_prompts: dict[AgentRole, str],
        tool_template: str,
    ):
        missing = [s.value for s in Stage if s not in stage_prompts]
        if missing:
            raise MissingPromptFileError(f"missing stage prompt(s): {missing}")
        self._base = base
        self._stage_prompts = dict(stage_prompts)
        self._role_prompts = dict(role_prompts)
        self._tool_template = tool_template

    @classmethod
    def load(cls, directory: Optional[Path] = None) -> "PromptLibrary":
        """Load from a directory, or from the packaged defaults when None."""

        def read(name: str) -> str:
            if directory is not None:
                path = Path(directory) / name
                if not path.is_file():
                    raise MissingPromptFileError(f"prompt file not found: {path}")
                return path.read_text(encoding="utf-8").strip()
            ref = resources.files("preprod").joinpath("prompts", name)
            if not ref.is_file():
                raise MissingPromptFileError(f"packaged prompt missing: {name}")
            return ref.read_text(encoding="utf-8").strip()

        return cls(
            base=read("core_base.txt"),
            stage_prompts={s: read(_STAGE_FILES[s]) for s in Stage},
            role_prompts={r: read(_ROLE_FILES[r]) for r in _ROLE_FILES},
            tool_template=read("tool_template.txt"),
        )

    def base(self) -> str:
        return self._base

    def stage(self, stage: Stage) -> str:
        return self._stage_prompts[stage]

    def role(self, role: AgentRole) -> str:
        if role not in self._role_prompts:
            raise MissingPromptFileError(f"no role prompt for {role.value}")
        return self._role_prompts[role]

    def tool_template(self) -> str:
        return self._tool_template
