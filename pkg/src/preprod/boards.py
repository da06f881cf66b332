"""Stage boards and the project state that owns them.

The four boards are the shared external memory of a project: every block is a
lineage-aware, versioned artifact container. History is append-only; no
operation ever mutates or deletes an existing version, and blocks are never
deleted. Placement is a deterministic column layout: root blocks stack in the
leftmost column, children go one column right of their parent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .assets import AssetStore
from .clock import SystemClock
from .errors import (
    BadVersionIndexError,
    FormatVersionError,
    IoFailureError,
    SchemaViolationError,
    StageKindMismatchError,
    StaleSelectionError,
    UnknownBlockError,
    UnknownParentError,
)
from .ids import IdAllocator
from .model import (
    BOARD_STAGES,
    ArtifactKind,
    Block,
    BlockVersion,
    ContextItem,
    Element,
    ProgressRecord,
    Selection,
    Stage,
    stage_for_kind,
    validate_elements,
)

FORMAT_VERSION = 1

# Fixed collapsed footprint used for auto-placement; the canvas is unbounded.
BLOCK_WIDTH = 320
BLOCK_HEIGHT = 240
GUTTER = 40


@dataclass
class Board:
    stage: Stage
    blocks: dict[str, Block] = field(default_factory=dict)
    placement: dict[str, tuple[float, float]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "stage": self.stage.value,
            "blocks": [self.blocks[bid].to_dict() for bid in sorted(self.blocks)],
            "placement": {
                bid: [self.placement[bid][0], self.placement[bid][1]]
                for bid in sorted(self.placement)
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Board":
        blocks = {b["block_id"]: Block.from_dict(b) for b in data.get("blocks", [])}
        placement = {
            bid: (float(xy[0]), float(xy[1]))
            for bid, xy in (data.get("placement") or {}).items()
        }
        return cls(stage=Stage(data["stage"]), blocks=blocks, placement=placement)


class Project:
    """Boards, progress registry, assets, and id allocation for one project."""

    def __init__(
        self,
        clock=None,
        ids: IdAllocator | None = None,
        assets: AssetStore | None = None,
        progress: ProgressRecord | None = None,
        boards: dict[Stage, Board] | None = None,
    ):
        self.clock = clock or SystemClock()
        self.ids = ids or IdAllocator()
        self.assets = assets or AssetStore()
        self.progress = progress or ProgressRecord()
        self.boards: dict[Stage, Board] = boards or {
            stage: Board(stage) for stage in BOARD_STAGES
        }

    # -- lookups ------------------------------------------------------------

    def board(self, stage: Stage) -> Board:
        if stage not in self.boards:
            raise StageKindMismatchError(f"stage {stage.value} has no board")
        return self.boards[stage]

    def find_block(self, block_id: str) -> Optional[Block]:
        for board in self.boards.values():
            if block_id in board.blocks:
                return board.blocks[block_id]
        return None

    def get_block(self, block_id: str) -> Block:
        block = self.find_block(block_id)
        if block is None:
            raise UnknownBlockError(f"no block {block_id}")
        return block

    # -- mutations ----------------------------------------------------------

    def _check_elements(self, kind: ArtifactKind, elements: Sequence[Element]) -> None:
        problems = validate_elements(kind, elements)
        for el in elements:
            if el.image_ref is not None and not self.assets.exists(el.image_ref):
                problems.append(
                    f"element {el.element_id} references unknown asset {el.image_ref!r}"
                )
        if problems:
            raise SchemaViolationError(
                f"elements do not satisfy the {kind.value} schema", problems=problems
            )

    def create_block(
        self,
        stage: Stage,
        kind: ArtifactKind,
        parent_id: Optional[str],
        elements: Sequence[Element],
        origin_task: str = "user-edit",
    ) -> Block:
        if stage_for_kind(kind) is not stage:
            raise StageKindMismatchError(
                f"{kind.value} belongs on the {stage_for_kind(kind).value} board, "
                f"not {stage.value}"
            )
        board = self.board(stage)
        if parent_id is not None and parent_id not in board.blocks:
            raise UnknownParentError(
                f"parent {parent_id} does not exist on the {stage.value} board"
            )
        self._check_elements(kind, elements)

        block_id = self.ids.next("blk")
        version = BlockVersion(
            version_index=0,
            elements=tuple(elements),
            created_at=self.clock.now(),
            origin_task=origin_task,
        )
        block = Block(
            block_id=block_id,
            stage=stage,
            kind=kind,
            parent_id=parent_id,
            versions=(version,),
        )
        position = self.auto_place(board, parent_id)
        board.blocks[block_id] = block
        board.placement[block_id] = position
        return block

    def add_version(
        self, block_id: str, elements: Sequence[Element], origin_task: str = "user-edit"
    ) -> int:
        block = self.get_block(block_id)
        self._check_elements(block.kind, elements)
        version = BlockVersion(
            version_index=len(block.versions),
            elements=tuple(elements),
            created_at=self.clock.now(),
            origin_task=origin_task,
        )
        updated = block.with_version(version)
        self.boards[block.stage].blocks[block_id] = updated
        return version.version_index

    def set_active_version(self, block_id: str, version_index: int) -> Block:
        block = self.get_block(block_id)
        if not (0 <= version_index < len(block.versions)):
            raise BadVersionIndexError(
                f"block {block_id} has {len(block.versions)} version(s); "
                f"index {version_index} is out of range"
            )
        updated = replace(block, active_version=version_index)
        self.boards[block.stage].blocks[block_id] = updated
        return updated

    def set_pinned(self, block_id: str, pinned: bool) -> Block:
        block = self.get_block(block_id)
        updated = replace(block, pinned=pinned)
        self.boards[block.stage].blocks[block_id] = updated
        return updated

    def set_collapsed(self, block_id: str, collapsed: bool) -> Block:
        block = self.get_block(block_id)
        updated = replace(block, collapsed=collapsed)
        self.boards[block.stage].blocks[block_id] = updated
        return updated

    def set_placement(self, block_id: str, x: float, y: float) -> None:
        block = self.get_block(block_id)
        self.boards[block.stage].placement[block_id] = (float(x), float(y))

    # -- queries ------------------------------------------------------------

    def lineage(self, block_id: str) -> list[str]:
        """Ancestor chain of a block, root first, ending with the block itself."""
        block = self.get_block(block_id)
        board = self.boards[block.stage]
        chain = [block_id]
        current = block
        # Step bound = board size guards against a corrupted parent cycle.
        for _ in range(len(board.blocks)):
            if current.parent_id is None:
                return list(reversed(chain))
            current = board.blocks.get(current.parent_id)
            if current is None:
                raise UnknownBlockError(
                    f"lineage of {block_id} references missing parent"
                )
            chain.append(current.block_id)
        raise UnknownBlockError(f"lineage of {block_id} does not terminate")

    def resolve_selection(self, selection: Selection) -> list[ContextItem]:
        """Materialize a selection into labelled context items.

        Whole-block selections (empty element list) yield every element of the
        referenced version; element selections yield only the named elements.
        Either way the first item is a metadata label describing the block.
        """
        block = self.find_block(selection.block_id)
        if block is None:
            raise StaleSelectionError(f"block {selection.block_id} no longer exists")
        if not (0 <= selection.version_index < len(block.versions)):
            raise StaleSelectionError(
                f"block {selection.block_id} has no version {selection.version_index}"
            )
        version = block.versions[selection.version_index]

        if selection.element_ids:
            chosen = []
            for eid in selection.element_ids:
                el = version.element(eid)
                if el is None:
                    raise StaleSelectionError(
                        f"element {eid} not present in {selection.block_id} "
                        f"v{selection.version_index}"
                    )
                chosen.append(el)
        else:
            chosen = list(version.elements)

        items = [
            ContextItem(
                label="selected-block",
                text=(
                    f"{block.kind.value} block {block.block_id} "
                    f"v{selection.version_index} on the {block.stage.value} board"
                ),
            )
        ]
        for el in chosen:
            label = f"{block.kind.value}.{el.kind}[{el.element_id}]"
            if el.is_image:
                items.append(ContextItem(label=label, image_ref=el.image_ref))
            else:
                text = el.text or ""
                if el.attributes:
                    attrs = "; ".join(
                        f"{k}={v}" for k, v in sorted(el.attributes.items())
                    )
                    text = f"{text}\n[{attrs}]" if text else f"[{attrs}]"
                items.append(ContextItem(label=label, text=text))
        return items

    def auto_place(self, board: Board, parent_id: Optional[str]) -> tuple[float, float]:
        """Next free position: roots stack in column 0, children one column
        right of their parent; never overlaps an existing collapsed footprint."""
        if parent_id is None:
            col_x = 0.0
        else:
            px, _ = board.placement[parent_id]
            col_x = px + BLOCK_WIDTH + GUTTER
        column_ys = [y for bid, (x, y) in board.placement.items() if x == col_x]
        if column_ys:
            return (col_x, max(column_ys) + BLOCK_HEIGHT + GUTTER)
        if parent_id is not None:
            return (col_x, board.placement[parent_id][1])
        return (col_x, 0.0)

    # -- persistence --------------------------------------------------------

    def to_document(self) -> dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "progress": self.progress.to_dict(),
            "boards": {
                stage.value: self.boards[stage].to_dict() for stage in BOARD_STAGES
            },
            "ids": self.ids.to_dict(),
        }

    @classmethod
    def from_document(
        cls, doc: Mapping[str, Any], clock=None, assets: AssetStore | None = None
    ) -> "Project":
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise FormatVersionError(
                f"project file format {version!r} not supported (expected {FORMAT_VERSION})"
            )
        boards = {
            Stage(name): Board.from_dict(data)
            for name, data in (doc.get("boards") or {}).items()
        }
        for stage in BOARD_STAGES:
            boards.setdefault(stage, Board(stage))
        return cls(
            clock=clock,
            ids=IdAllocator.from_dict(doc.get("ids") or {}),
            assets=assets,
            progress=ProgressRecord.from_dict(doc.get("progress") or {}),
            boards=boards,
        )


def asset_dir_for(path: Path) -> Path:
    """Sibling asset directory for a project file: project.json -> project.assets/"""
    return path.parent / (path.stem + ".assets")


def dump_document(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_project(path: Path | str, document: Mapping[str, Any], assets: AssetStore) -> None:
    """Write the project document plus its sibling asset directory."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dump_document(document), encoding="utf-8")
        assets.write_to(asset_dir_for(path))
    except OSError as exc:
        raise IoFailureError(f"cannot save project to {path}: {exc}") from exc


def load_project(path: Path | str) -> tuple[dict[str, Any], AssetStore]:
    """Read a project document and its assets; validates the format version."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read project file {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise IoFailureError(f"project file {path} is not valid JSON: {exc}") from exc
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatVersionError(
            f"project file format {doc.get('format_version')!r} not supported "
            f"(expected {FORMAT_VERSION})"
        )
    return doc, AssetStore.read_from(asset_dir_for(path))
