"""Text and image generation behind one interface.

The scripted provider is the test oracle: an ordered rule table mapping
(role, task kind, instruction substring) to canned output, a canned fault, or
an injected delay. A session driven by a fixed program and fixed inputs is
fully reproducible. Live providers are opaque HTTP services configured via
environment variables; no other module performs network activity.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .assets import AssetStore, placeholder_png
from .errors import IoFailureError, ProviderFailureError, UnknownAssetError
from .model import AgentRole, ArtifactKind, Stage, TaskSpec
from .prompts import PromptLibrary


@dataclass(frozen=True)
class ProviderRequest:
    """One completion request; `prompt` is the fully assembled text."""

    role: AgentRole
    stage: Stage
    prompt: str
    reference_images: tuple[str, ...] = ()
    task_kind: Optional[ArtifactKind] = None
    instruction: str = ""
    temperature: float = 0.2
    max_length: int = 4096
    seed: Optional[int] = None


def assemble_prompt(
    role: AgentRole,
    stage: Stage,
    spec: TaskSpec,
    prompts: PromptLibrary,
) -> str:
    """Deterministic prompt assembly, in fixed section order: role prompt,
    stage prompt, task instruction (via the tool template), labelled context."""
    if role is AgentRole.CORE:
        role_section = prompts.base()
    else:
        role_section = prompts.role(role)

    if spec.task_kind is not None:
        task_section = prompts.tool_template().format(
            kind=spec.task_kind.value, task=spec.instruction
        )
    else:
        task_section = spec.instruction

    lines = [
        "## Role",
        role_section,
        "",
        f"## Stage: {stage.value}",
        prompts.stage(stage),
        "",
        "## Task",
        task_section,
        "",
        "## Context",
    ]
    if spec.context_payload:
        for item in spec.context_payload:
            if item.image_ref is not None:
                lines.append(f"- {item.label}: [image {item.image_ref}]")
            else:
                lines.append(f"- {item.label}: {item.text}")
    else:
        lines.append("- (none)")
    return "\n".join(lines)


class TextImageProvider:
    """Interface: text completion plus image generation into the asset store."""

    def complete(self, request: ProviderRequest) -> str:
        raise NotImplementedError

    def generate_image(
        self, prompt: str, references: Sequence[str], assets: AssetStore
    ) -> str:
        raise NotImplementedError

    @staticmethod
    def _check_image_inputs(
        prompt: str, references: Sequence[str], assets: AssetStore
    ) -> None:
        if not prompt.strip():
            raise ValueError("image prompt must be non-empty")
        for ref in references:
            if not assets.exists(ref):
                raise UnknownAssetError(f"image reference {ref!r} does not resolve")


def image_digest(prompt: str, references: Sequence[str]) -> "hashlib._Hash":
    """Digest covering the prompt and the ordered reference list; the scripted
    placeholder embeds it so reference passing is assertable in tests."""
    h = hashlib.sha256()
    h.update(prompt.encode("utf-8"))
    for ref in references:
        h.update(b"\x00")
        h.update(ref.encode("utf-8"))
    return h


@dataclass
class ScriptedRule:
    """First-match rule: optional role/kind/substring filters, one action.

    `task_kind` may be an ArtifactKind value, the string "direct-chat" to
    match chat requests, or None to match any kind. `max_uses` bounds how
    often the rule fires; exhausted rules are skipped.
    """

    output: Optional[str] = None
    fault: Optional[str] = None
    role: Optional[AgentRole] = None
    task_kind: Optional[str] = None
    contains: Optional[str] = None
    delay_ms: int = 0
    max_uses: Optional[int] = None
    used: int = field(default=0, compare=False)

    def matches(self, request: ProviderRequest) -> bool:
        if self.max_uses is not None and self.used >= self.max_uses:
            return False
        if self.role is not None and self.role is not request.role:
            return False
        if self.task_kind is not None:
            requested = request.task_kind.value if request.task_kind else "direct-chat"
            if self.task_kind != requested:
                return False
        if self.contains is not None:
            haystack = request.instruction + "\n" + request.prompt
            if self.contains not in haystack:
                return False
        return True

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScriptedRule":
        output = data.get("output")
        if output is None and "output_json" in data:
            # Structured form: the canned reply is the JSON encoding of this
            # value, so scenario files can write element arrays directly.
            output = json.dumps(data["output_json"], ensure_ascii=False)
        return cls(
            output=output,
            fault=data.get("fault"),
            role=AgentRole(data["role"]) if data.get("role") else None,
            task_kind=data.get("task_kind"),
            contains=data.get("contains"),
            delay_ms=int(data.get("delay_ms", 0)),
            max_uses=data.get("max_uses"),
        )


class ScriptedProvider(TextImageProvider):
    """Deterministic rule-table provider used as the test oracle."""

    def __init__(self, rules: Sequence[ScriptedRule] = ()):
        self._rules = list(rules)
        self._lock = threading.Lock()

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScriptedProvider":
        return cls([ScriptedRule.from_dict(r) for r in data.get("rules", [])])

    @classmethod
    def from_file(cls, path: Path | str) -> "ScriptedProvider":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoFailureError(f"cannot read program {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IoFailureError(f"program {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def complete(self, request: ProviderRequest) -> str:
        if not request.prompt.strip():
            raise ValueError("prompt must be non-empty")
        with self._lock:
            rule = next((r for r in self._rules if r.matches(request)), None)
            if rule is not None:
                rule.used += 1
        if rule is None:
            kind = request.task_kind.value if request.task_kind else "direct-chat"
            raise ProviderFailureError(
                f"no scripted rule for role={request.role.value} kind={kind}",
                reason="no-rule",
            )
        if rule.delay_ms:
            time.sleep(rule.delay_ms / 1000.0)
        if rule.fault is not None:
            raise ProviderFailureError(
                f"scripted fault: {rule.fault}", reason=rule.fault
            )
        return rule.output or ""

    def generate_image(
        self, prompt: str, references: Sequence[str], assets: AssetStore
    ) -> str:
        self._check_image_inputs(prompt, references, assets)
        digest = image_digest(prompt, references)
        name = f"img-{digest.hexdigest()[:16]}.png"
        assets.put(name, placeholder_png(digest.digest()))
        return name


class HttpProvider(TextImageProvider):
    """Opaque HTTP text/image services; endpoint and credential via settings.

    Wire contract: POST text_endpoint {prompt, temperature, max_length} ->
    {"text": ...}; POST image_endpoint {prompt, references: [ref names]} ->
    raw image bytes. Anything else is surfaced as provider-failure.
    """

    def __init__(
        self,
        text_endpoint: str,
        image_endpoint: Optional[str] = None,
        api_key: Optional[str] = None,
        timeout: float = 60.0,
    ):
        self._text_endpoint = text_endpoint
        self._image_endpoint = image_endpoint
        self._api_key = api_key
        self._timeout = timeout

    def _headers(self) -> dict[str, str]:
        return {"Authorization": f"Bearer {self._api_key}"} if self._api_key else {}

    def complete(self, request: ProviderRequest) -> str:
        if not request.prompt.strip():
            raise ValueError("prompt must be non-empty")
        import httpx

        try:
            response = httpx.post(
                self._text_endpoint,
                json={
                    "prompt": request.prompt,
                    "temperature": request.temperature,
                    "max_length": request.max_length,
                },
                headers=self._headers(),
                timeout=self._timeout,
            )
            response.raise_for_status()
            return response.json()["text"]
        except httpx.HTTPStatusError as exc:
            raise ProviderFailureError(
                f"text endpoint returned {exc.response.status_code}",
                reason=f"http-{exc.response.status_code}",
            ) from exc
        except httpx.HTTPError as exc:
            raise ProviderFailureError(str(exc), reason="transport") from exc
        except (KeyError, ValueError) as exc:
            raise ProviderFailureError(
                "text endpoint returned an unexpected payload", reason="bad-payload"
            ) from exc

    def generate_image(
        self, prompt: str, references: Sequence[str], assets: AssetStore
    ) -> str:
        self._check_image_inputs(prompt, references, assets)
        if not self._image_endpoint:
            raise ProviderFailureError(
                "no image endpoint configured", reason="not-configured"
            )
        import httpx

        try:
            response = httpx.post(
                self._image_endpoint,
                json={"prompt": prompt, "references": list(references)},
                headers=self._headers(),
                timeout=self._timeout,
            )
            response.raise_for_status()
            data = response.content
        except httpx.HTTPStatusError as exc:
            raise ProviderFailureError(
                f"image endpoint returned {exc.response.status_code}",
                reason=f"http-{exc.response.status_code}",
            ) from exc
        except httpx.HTTPError as exc:
            raise ProviderFailureError(str(exc), reason="transport") from exc
        name = f"img-{hashlib.sha256(data).hexdigest()[:16]}.png"
        return assets.put(name, data)
