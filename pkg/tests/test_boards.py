"""Versioned boards: placement, lineage, selection resolution, persistence."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preprod.assets import AssetStore
from preprod.boards import (
    BLOCK_HEIGHT,
    BLOCK_WIDTH,
    GUTTER,
    Project,
    asset_dir_for,
    dump_document,
    load_project,
    save_project,
)
from preprod.clock import TickClock
from preprod.errors import (
    BadVersionIndexError,
    SchemaViolationError,
    StageKindMismatchError,
    StaleSelectionError,
    UnknownBlockError,
    UnknownParentError,
)
from preprod.ids import IdAllocator
from preprod.model import ArtifactKind, Element, Selection, Stage

import board_machine
from helpers import valid_elements


@pytest.fixture
def project():
    return Project(clock=TickClock(), ids=IdAllocator(), assets=AssetStore())


def concept(project, parent=None, prefix="el"):
    return project.create_block(
        Stage.IDEATION,
        ArtifactKind.STORY_CONCEPT,
        parent,
        valid_elements(ArtifactKind.STORY_CONCEPT, prefix=prefix),
    )


class TestCreation:
    def test_first_root_sits_at_origin(self, project):
        block = concept(project)
        assert block.block_id == "blk-000001"
        assert project.board(Stage.IDEATION).placement[block.block_id] == (0.0, 0.0)

    def test_roots_stack_down_the_first_column(self, project):
        a = concept(project)
        b = concept(project)
        board = project.board(Stage.IDEATION)
        assert board.placement[b.block_id] == (0.0, BLOCK_HEIGHT + GUTTER)
        assert board.placement[a.block_id] == (0.0, 0.0)

    def test_child_goes_one_column_right_at_parent_height(self, project):
        parent = concept(project)
        child = concept(project, parent=parent.block_id, prefix="c")
        board = project.board(Stage.IDEATION)
        assert board.placement[child.block_id] == (BLOCK_WIDTH + GUTTER, 0.0)
        assert child.parent_id == parent.block_id

    def test_siblings_stack_in_the_child_column(self, project):
        parent = concept(project)
        first = concept(project, parent=parent.block_id, prefix="c1")
        second = concept(project, parent=parent.block_id, prefix="c2")
        board = project.board(Stage.IDEATION)
        x = BLOCK_WIDTH + GUTTER
        assert board.placement[first.block_id] == (x, 0.0)
        assert board.placement[second.block_id] == (x, BLOCK_HEIGHT + GUTTER)

    def test_kind_must_match_board_stage(self, project):
        with pytest.raises(StageKindMismatchError):
            project.create_block(
                Stage.IDEATION,
                ArtifactKind.SCENE_LIST,
                None,
                valid_elements(ArtifactKind.SCENE_LIST),
            )

    def test_parent_must_exist_on_the_same_board(self, project):
        with pytest.raises(UnknownParentError):
            concept(project, parent="blk-999999")

    def test_elements_validated_at_creation(self, project):
        with pytest.raises(SchemaViolationError):
            project.create_block(
                Stage.IDEATION, ArtifactKind.STORY_CONCEPT, None, []
            )


class TestVersions:
    def test_add_version_appends_and_activates(self, project):
        block = concept(project)
        index = project.add_version(
            block.block_id, valid_elements(ArtifactKind.STORY_CONCEPT, prefix="v1")
        )
        assert index == 1
        updated = project.get_block(block.block_id)
        assert updated.active_version == 1
        assert len(updated.versions) == 2

    def test_earlier_versions_survive_unchanged(self, project):
        block = concept(project)
        before = project.get_block(block.block_id).versions[0].to_dict()
        project.add_version(
            block.block_id, valid_elements(ArtifactKind.STORY_CONCEPT, prefix="v1")
        )
        assert project.get_block(block.block_id).versions[0].to_dict() == before

    def test_switch_active_version_back(self, project):
        block = concept(project)
        project.add_version(
            block.block_id, valid_elements(ArtifactKind.STORY_CONCEPT, prefix="v1")
        )
        project.set_active_version(block.block_id, 0)
        updated = project.get_block(block.block_id)
        assert updated.active_version == 0
        assert len(updated.versions) == 2

    def test_bad_version_index_rejected(self, project):
        block = concept(project)
        with pytest.raises(BadVersionIndexError):
            project.set_active_version(block.block_id, 5)

    def test_version_elements_validated(self, project):
        block = concept(project)
        with pytest.raises(SchemaViolationError):
            project.add_version(
                block.block_id, [Element("x", "shot-panel", image_ref="x.png")]
            )


class TestFlagsAndPlacement:
    def test_pin_and_collapse_toggle(self, project):
        block = concept(project)
        assert project.set_pinned(block.block_id, True).pinned is True
        assert project.set_collapsed(block.block_id, True).collapsed is True
        assert project.set_pinned(block.block_id, False).pinned is False

    def test_manual_move_persists_and_steers_children(self, project):
        parent = concept(project)
        project.set_placement(parent.block_id, 1000.0, 500.0)
        child = concept(project, parent=parent.block_id, prefix="c")
        board = project.board(Stage.IDEATION)
        assert board.placement[parent.block_id] == (1000.0, 500.0)
        assert board.placement[child.block_id] == (
            1000.0 + BLOCK_WIDTH + GUTTER,
            500.0,
        )

    def test_unknown_block_raises(self, project):
        with pytest.raises(UnknownBlockError):
            project.set_pinned("blk-404", True)
        with pytest.raises(UnknownBlockError):
            project.get_block("blk-404")


class TestLineage:
    def test_lineage_runs_root_first(self, project):
        a = concept(project)
        b = concept(project, parent=a.block_id, prefix="b")
        c = concept(project, parent=b.block_id, prefix="c")
        assert project.lineage(c.block_id) == [a.block_id, b.block_id, c.block_id]

    def test_lineage_of_root_is_itself(self, project):
        a = concept(project)
        assert project.lineage(a.block_id) == [a.block_id]

    def test_lineage_unknown_block(self, project):
        with pytest.raises(UnknownBlockError):
            project.lineage("blk-404")


class TestSelectionResolution:
    def test_whole_version_selection(self, project):
        block = concept(project)
        items = project.resolve_selection(Selection(block.block_id, 0))
        assert items[0].label == "selected-block"
        assert "story_concept" in items[0].text

    def test_element_subset_selection(self, project):
        block = concept(project)
        eid = block.versions[0].elements[0].element_id
        items = project.resolve_selection(Selection(block.block_id, 0, (eid,)))
        assert len(items) == 2  # block header + the one element
        assert eid in items[1].label
        assert items[1].label.startswith("story_concept.concept-option")

    def test_attributes_fold_into_text(self, project):
        block = project.create_block(
            Stage.SCRIPTING,
            ArtifactKind.SCENE_LIST,
            None,
            valid_elements(ArtifactKind.SCENE_LIST),
        )
        eid = block.versions[0].elements[0].element_id
        items = project.resolve_selection(Selection(block.block_id, 0, (eid,)))
        assert "[" in items[1].text and "location=" in items[1].text

    def test_stale_element_rejected(self, project):
        block = concept(project)
        with pytest.raises(StaleSelectionError):
            project.resolve_selection(Selection(block.block_id, 0, ("ghost",)))

    def test_dropped_version_reference_rejected(self, project):
        block = concept(project)
        with pytest.raises(StaleSelectionError):
            project.resolve_selection(Selection(block.block_id, 7))

    def test_vanished_block_rejected(self, project):
        with pytest.raises(StaleSelectionError):
            project.resolve_selection(Selection("blk-404", 0))


class TestPersistence:
    def test_document_round_trip(self, project):
        a = concept(project)
        concept(project, parent=a.block_id, prefix="b")
        project.set_collapsed(a.block_id, True)
        doc = project.to_document()
        again = Project.from_document(doc, clock=project.clock, assets=project.assets)
        assert again.to_document() == doc

    def test_dump_is_stable_and_newline_terminated(self, project):
        concept(project)
        doc = project.to_document()
        text = dump_document(doc)
        assert text.endswith("\n")
        assert text == dump_document(project.to_document())

    def test_save_and_load_with_assets(self, project, tmp_path):
        project.assets.put("img-aaaa.png", b"\x89PNG-fake")
        concept(project)
        path = tmp_path / "film" / "project.json"
        save_project(path, project.to_document(), project.assets)
        assert path.exists()
        assert (asset_dir_for(path) / "img-aaaa.png").read_bytes() == b"\x89PNG-fake"
        doc, assets = load_project(path)
        assert doc == project.to_document()
        assert assets.snapshot() == project.assets.snapshot()

    def test_asset_dir_sits_next_to_the_project_file(self, tmp_path):
        assert asset_dir_for(tmp_path / "p.json") == tmp_path / "p.assets"


class TestRandomizedOps:
    """Structural invariants under arbitrary op interleavings."""

    @settings(max_examples=40)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_invariants_hold_for_random_sequences(self, seed):
        board_machine.run_sequence(random.Random(seed), ops=10)

    def test_one_sequence_with_disk_round_trip(self, tmp_path):
        board_machine.run_sequence(random.Random(7), ops=20, disk_dir=tmp_path)
