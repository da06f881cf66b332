#!/usr/bin/env python3
"""Record the browser-client test fixtures by driving a live server over HTTP.

Starts the engine's HTTP service on an ephemeral port, replays the built-in
golden scenario through the public API only (messages, boards, selections),
and captures what a browser client would see:

    tests/fixtures/golden/events.json   full session event log
    tests/fixtures/golden/boards.json   final board state per stage
    tests/fixtures/golden/blocks.json   per-block detail (placement + lineage)
    tests/fixtures/golden/state.json    final session state

A second, smaller recording exercises artifact overwriting so the version
switcher can be tested against a block that really has two versions:

    tests/fixtures/versions/block.json  scene-list block with v0 and v1
    tests/fixtures/versions/events.json events for the two publications

Run from the frontend directory:  python3 scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import socket
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from preprod.server import create_app

FRONTEND = Path(__file__).resolve().parent.parent
SCENARIO = (
    FRONTEND.parent / "src" / "preprod" / "scenarios" / "golden_workflow.json"
)
OUT = FRONTEND / "tests" / "fixtures" / "golden"

#: Home board for each artifact kind a selection may reference.
KIND_STAGE = {
    "logline": "ideation",
    "story_concept": "ideation",
    "world_concept": "ideation",
    "style_description": "ideation",
    "character_concept": "ideation",
    "three_act_structure": "scripting",
    "story_outline": "scripting",
    "scene_list": "scripting",
    "script": "scripting",
    "character_sheet": "design",
    "environment_design": "design",
    "hero_image": "design",
    "styleframe": "storyboard",
    "storyboard_sequence": "storyboard",
}

BOARD_STAGES = ["ideation", "scripting", "design", "storyboard"]


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def start_server(port: int) -> uvicorn.Server:
    config = uvicorn.Config(
        create_app(), host="127.0.0.1", port=port, log_level="warning"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    return server


def resolve_selection(client: httpx.Client, sid: str, spec: dict) -> dict:
    """Structural {kind, ordinal, elements} -> wire {block_id, version_index,
    element_ids}, resolved the same way a browser client would: by reading
    the kind's home board."""
    stage = KIND_STAGE[spec["kind"]]
    board = client.get(f"/sessions/{sid}/boards/{stage}").json()
    matches = sorted(
        (b for b in board["blocks"] if b["kind"] == spec["kind"]),
        key=lambda b: b["block_id"],
    )
    block = matches[int(spec.get("ordinal", 0))]
    version_index = spec.get("version")
    if version_index is None:
        version_index = block["active_version"]
    version = block["versions"][int(version_index)]
    element_ids = []
    for el_spec in spec.get("elements", []):
        candidates = [
            el for el in version["elements"] if el["kind"] == el_spec["kind"]
        ]
        element_ids.append(candidates[int(el_spec.get("ordinal", 0))]["element_id"])
    return {
        "block_id": block["block_id"],
        "version_index": int(version_index),
        "element_ids": element_ids,
    }


def wait_settled(client: httpx.Client, sid: str, rid: str) -> str:
    deadline = time.monotonic() + 30.0
    while time.monotonic() < deadline:
        status = client.get(f"/sessions/{sid}/requests/{rid}").json()["status"]
        if status in ("done", "failed", "cancelled"):
            return status
        time.sleep(0.01)
    raise RuntimeError(f"request {rid} never settled")


#: Provider program for the versions recording: the first style request
#: consumes the one-shot rule, the rewrite falls through to the second.
VERSION_RULES = [
    {
        "role": "ideation",
        "task_kind": "style_description",
        "max_uses": 1,
        "output_json": [
            {
                "kind": "style-option",
                "attributes": {"name": "woodcut"},
                "text": "High-contrast woodcut look: heavy black line, two-tone amber palette.",
            }
        ],
    },
    {
        "role": "ideation",
        "task_kind": "style_description",
        "output_json": [
            {
                "kind": "style-option",
                "attributes": {"name": "gouache"},
                "text": "Soft gouache look: layered brush texture, dusk blues with warm lantern accents.",
            }
        ],
    },
]


def record_versions(client: httpx.Client) -> None:
    created = client.post(
        "/sessions",
        json={
            "provider": {"type": "scripted", "rules": VERSION_RULES},
            "deterministic_clock": True,
        },
    )
    created.raise_for_status()
    sid = created.json()["session_id"]
    for text in (
        "Write a style description.",
        "Yes.",
        "Rewrite the style description.",
    ):
        accepted = client.post(f"/sessions/{sid}/messages", json={"text": text})
        accepted.raise_for_status()
        status = wait_settled(client, sid, accepted.json()["request_id"])
        if status != "done":
            raise RuntimeError(f"versions recording ended {status}")
    board = client.get(f"/sessions/{sid}/boards/ideation").json()
    (bid,) = [b["block_id"] for b in board["blocks"]]
    block = client.get(f"/sessions/{sid}/blocks/{bid}").json()
    if len(block["versions"]) != 2 or block["active_version"] != 1:
        raise RuntimeError("versions recording did not produce a two-version block")
    events = client.get(f"/sessions/{sid}/events/log").json()
    out = FRONTEND / "tests" / "fixtures" / "versions"
    out.mkdir(parents=True, exist_ok=True)
    (out / "block.json").write_text(
        json.dumps(block, indent=2, ensure_ascii=False) + "\n"
    )
    (out / "events.json").write_text(
        json.dumps(events, indent=2, ensure_ascii=False) + "\n"
    )
    print(f"recorded versions fixture: {bid} with {len(block['versions'])} versions")


def main() -> None:
    scenario = json.loads(SCENARIO.read_text())
    port = free_port()
    server = start_server(port)
    try:
        with httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=30.0) as client:
            created = client.post(
                "/sessions",
                json={
                    "provider": {"type": "scripted", **scenario["provider"]},
                    "deterministic_clock": True,
                },
            )
            created.raise_for_status()
            sid = created.json()["session_id"]

            for action in scenario["actions"]:
                if action["op"] != "message":
                    continue
                body: dict = {"text": action["text"]}
                if "selection" in action:
                    body["selection"] = resolve_selection(
                        client, sid, action["selection"]
                    )
                accepted = client.post(f"/sessions/{sid}/messages", json=body)
                accepted.raise_for_status()
                rid = accepted.json()["request_id"]
                status = wait_settled(client, sid, rid)
                if status != "done":
                    raise RuntimeError(f"request {rid} ended {status}")

            events = client.get(f"/sessions/{sid}/events/log").json()
            boards = {
                stage: client.get(f"/sessions/{sid}/boards/{stage}").json()
                for stage in BOARD_STAGES
            }
            blocks = {}
            for board in boards.values():
                for block in board["blocks"]:
                    bid = block["block_id"]
                    blocks[bid] = client.get(f"/sessions/{sid}/blocks/{bid}").json()
            state = client.get(f"/sessions/{sid}/state").json()
            record_versions(client)
    finally:
        server.should_exit = True

    OUT.mkdir(parents=True, exist_ok=True)
    for name, data in [
        ("events.json", events),
        ("boards.json", boards),
        ("blocks.json", blocks),
        ("state.json", state),
    ]:
        (OUT / name).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n")
    print(f"recorded {len(events)} events, {len(blocks)} blocks -> {OUT}")


if __name__ == "__main__":
    main()
