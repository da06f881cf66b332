"""Command line front end: local server, scenario runner, and a thin HTTP
client. The client subcommands talk only to the HTTP API, never to engine
internals, so they double as a living example of the wire contract."""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path
from typing import Any, Optional

import click

from .errors import EngineError
from .scenario import (
    builtin_scenario_path,
    list_builtin_scenarios,
    run_scenario,
)


@click.group()
def main() -> None:
    """Stage-aware pre-production engine."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8750, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP/SSE service."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="info")


# -- scenarios ---------------------------------------------------------------


@main.group()
def scenario() -> None:
    """Replayable scripted conversations."""


@scenario.command("list")
def scenario_list() -> None:
    for name in list_builtin_scenarios():
        click.echo(name)


def _resolve_scenario(name_or_path: str) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    try:
        return builtin_scenario_path(name_or_path)
    except EngineError:
        return builtin_scenario_path(name_or_path.replace("-", "_"))


def _report_lines(report) -> list[str]:
    lines = [f"[{'PASS' if report.ok else 'FAIL'}] {report.name}"]
    if report.divergence:
        lines.append(f"  divergence: {report.divergence}")
    return lines


@scenario.command("run")
@click.argument("name_or_path")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Directory for files the scenario saves.")
@click.option("--as-json", is_flag=True, help="Machine readable report.")
def scenario_run(name_or_path: str, out: Optional[Path], as_json: bool) -> None:
    """Run one scenario and report pass/fail."""
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    try:
        report = run_scenario(_resolve_scenario(name_or_path), out_dir=out)
    except EngineError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(2)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        for line in _report_lines(report):
            click.echo(line)
    sys.exit(0 if report.ok else 1)


@scenario.command("run-all")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--as-json", is_flag=True)
def scenario_run_all(out: Optional[Path], as_json: bool) -> None:
    """Run every built-in scenario."""
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    reports = [
        run_scenario(builtin_scenario_path(name), out_dir=out)
        for name in list_builtin_scenarios()
    ]
    if as_json:
        click.echo(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        for report in reports:
            for line in _report_lines(report):
                click.echo(line)
    sys.exit(0 if all(r.ok for r in reports) else 1)


# -- thin HTTP client --------------------------------------------------------


@main.group()
@click.option("--server", default="http://127.0.0.1:8750", show_default=True,
              envvar="PREPROD_SERVER")
@click.pass_context
def client(ctx: click.Context, server: str) -> None:
    """Talk to a running service."""
    ctx.obj = server.rstrip("/")


def _post(server: str, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    import httpx

    response = httpx.post(f"{server}{path}", json=payload, timeout=60.0)
    if response.status_code >= 400:
        click.echo(f"HTTP {response.status_code}: {response.text}", err=True)
        sys.exit(2)
    return response.json()


def _get(server: str, path: str, **params: Any) -> Any:
    import httpx

    response = httpx.get(f"{server}{path}", params=params, timeout=60.0)
    if response.status_code >= 400:
        click.echo(f"HTTP {response.status_code}: {response.text}", err=True)
        sys.exit(2)
    return response.json()


@client.command("create")
@click.option("--program", type=click.Path(exists=True, path_type=Path),
              help="Scripted provider program (JSON rules file).")
@click.option("--live-endpoint", default=None,
              help="Text completion endpoint for a live provider.")
@click.option("--image-endpoint", default=None)
@click.option("--api-key", default=None, envvar="PREPROD_API_KEY")
@click.pass_obj
def client_create(
    server: str,
    program: Optional[Path],
    live_endpoint: Optional[str],
    image_endpoint: Optional[str],
    api_key: Optional[str],
) -> None:
    """Create a session; prints the session id."""
    provider: dict[str, Any]
    if live_endpoint:
        provider = {
            "type": "http",
            "text_endpoint": live_endpoint,
            "image_endpoint": image_endpoint,
            "api_key": api_key,
        }
    else:
        rules = []
        if program is not None:
            rules = json.loads(program.read_text(encoding="utf-8")).get("rules", [])
        provider = {"type": "scripted", "rules": rules}
    data = _post(server, "/sessions", {"provider": provider})
    click.echo(data["session_id"])


@client.command("send")
@click.argument("session_id")
@click.argument("text")
@click.option("--selection", default=None,
              help='JSON selection: {"block_id", "version_index", "element_ids"}')
@click.option("--wait/--no-wait", default=True, show_default=True)
@click.pass_obj
def client_send(
    server: str, session_id: str, text: str, selection: Optional[str], wait: bool
) -> None:
    """Send a director message; with --wait, prints the reply."""
    payload: dict[str, Any] = {"text": text}
    if selection:
        payload["selection"] = json.loads(selection)
    data = _post(server, f"/sessions/{session_id}/messages", payload)
    request_id = data["request_id"]
    if not wait:
        click.echo(request_id)
        return
    while True:
        status = _get(server, f"/sessions/{session_id}/requests/{request_id}")
        if status["status"] != "running":
            break
        time.sleep(0.1)
    events = _get(server, f"/sessions/{session_id}/events/log")
    for event in events:
        payload = event.get("payload", {})
        if (
            event.get("event_kind") == "chat-message"
            and payload.get("request_id") == request_id
            and payload.get("speaker") != "user"
        ):
            click.echo(f"[{payload.get('speaker')}] {payload.get('text')}")
    if status["status"] != "done":
        click.echo(f"request {request_id} ended {status['status']}", err=True)
        sys.exit(1)


@client.command("state")
@click.argument("session_id")
@click.pass_obj
def client_state(server: str, session_id: str) -> None:
    click.echo(json.dumps(_get(server, f"/sessions/{session_id}/state"), indent=2))


@client.command("cancel")
@click.argument("session_id")
@click.argument("request_id")
@click.pass_obj
def client_cancel(server: str, session_id: str, request_id: str) -> None:
    data = _post(server, f"/sessions/{session_id}/requests/{request_id}/cancel", {})
    click.echo(data["status"])


@client.command("watch")
@click.argument("session_id")
@click.option("--after", default=-1, type=int, show_default=True)
@click.pass_obj
def client_watch(server: str, session_id: str, after: int) -> None:
    """Stream events to stdout (one JSON object per line)."""
    import httpx

    url = f"{server}/sessions/{session_id}/events"
    with httpx.stream(
        "GET", url, params={"after": after}, timeout=None
    ) as response:
        for line in response.iter_lines():
            if line.startswith("data: "):
                click.echo(line[len("data: "):])


@client.command("save")
@click.argument("session_id")
@click.argument("path")
@click.pass_obj
def client_save(server: str, session_id: str, path: str) -> None:
    data = _post(server, f"/sessions/{session_id}/save", {"path": path})
    click.echo(data["saved"])


if __name__ == "__main__":
    main()
