"""Scenario loading, structural selections, and the replay runner."""

import json

import pytest

from preprod.errors import ScenarioMalformedError
from preprod.model import ArtifactKind, Stage
from preprod.scenario import (
    assistant_reply,
    builtin_scenario_path,
    check_expectations,
    list_builtin_scenarios,
    load_scenario,
    observed_stage_sequence,
    resolve_structural_selection,
    run_scenario,
)

from helpers import kind_rule, make_session, rule, run_message, valid_elements

BRIEF = "A stop-motion short about a paper boat."


def scenario_doc(*actions, rules=(), expect=None, **extra):
    doc = {
        "name": "inline",
        "provider": {"rules": list(rules)},
        "actions": list(actions),
    }
    if expect is not None:
        doc["expect"] = expect
    doc.update(extra)
    return doc


class TestLoading:
    def test_mapping_passes_through(self):
        doc = scenario_doc({"op": "message", "text": "hi"})
        assert load_scenario(doc)["name"] == "inline"

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(scenario_doc({"op": "message", "text": "hi"})))
        assert load_scenario(path)["actions"][0]["text"] == "hi"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioMalformedError, match="cannot read"):
            load_scenario(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioMalformedError, match="not valid JSON"):
            load_scenario(path)

    @pytest.mark.parametrize(
        "mutate, message",
        [
            (lambda d: d.pop("name"), "needs a 'name'"),
            (lambda d: d.update(name=""), "needs a 'name'"),
            (lambda d: d.update(provider=[]), "provider"),
            (lambda d: d.update(actions=[]), "non-empty 'actions'"),
            (lambda d: d.update(actions=[{"text": "hi"}]), "needs an 'op'"),
        ],
    )
    def test_shape_validation(self, mutate, message):
        doc = scenario_doc({"op": "message", "text": "hi"})
        mutate(doc)
        with pytest.raises(ScenarioMalformedError, match=message):
            load_scenario(doc)

    def test_builtin_listing_and_lookup(self):
        names = list_builtin_scenarios()
        assert "golden_workflow" in names
        assert builtin_scenario_path("golden_workflow").exists()
        with pytest.raises(ScenarioMalformedError):
            builtin_scenario_path("nope")


class TestStructuralSelection:
    def _session_with_concepts(self):
        session = make_session()
        project = session.project
        first = project.create_block(
            Stage.IDEATION,
            ArtifactKind.STORY_CONCEPT,
            None,
            valid_elements(ArtifactKind.STORY_CONCEPT),
        )
        project.add_version(
            first.block_id, valid_elements(ArtifactKind.STORY_CONCEPT, prefix="v1")
        )
        second = project.create_block(
            Stage.IDEATION,
            ArtifactKind.STORY_CONCEPT,
            None,
            valid_elements(ArtifactKind.STORY_CONCEPT, extra=1),
        )
        return session, first, second

    def test_ordinal_orders_by_block_id(self):
        session, first, second = self._session_with_concepts()
        sel = resolve_structural_selection(session, {"kind": "story_concept"})
        assert sel.block_id == first.block_id
        sel = resolve_structural_selection(
            session, {"kind": "story_concept", "ordinal": 1}
        )
        assert sel.block_id == second.block_id

    def test_version_defaults_to_active(self):
        session, first, _ = self._session_with_concepts()
        sel = resolve_structural_selection(session, {"kind": "story_concept"})
        assert sel.version_index == 1  # add_version activated v1
        sel = resolve_structural_selection(
            session, {"kind": "story_concept", "version": 0}
        )
        assert sel.version_index == 0

    def test_elements_picked_by_kind_and_ordinal(self):
        session, _, second = self._session_with_concepts()
        sel = resolve_structural_selection(
            session,
            {
                "kind": "story_concept",
                "ordinal": 1,
                "elements": [{"kind": "concept-option", "ordinal": 1}],
            },
        )
        version = session.project.get_block(second.block_id).versions[0]
        assert sel.element_ids == (version.elements[1].element_id,)

    @pytest.mark.parametrize(
        "spec, message",
        [
            ({"kind": "logline"}, "no logline block"),
            ({"kind": "story_concept", "ordinal": 9}, "ordinal 9"),
            ({"kind": "story_concept", "version": 5}, "no version 5"),
            (
                {
                    "kind": "story_concept",
                    "elements": [{"kind": "concept-option", "ordinal": 7}],
                },
                "ordinal 7",
            ),
        ],
    )
    def test_unresolvable_specs(self, spec, message):
        session, _, _ = self._session_with_concepts()
        with pytest.raises(ScenarioMalformedError, match=message):
            resolve_structural_selection(session, spec)


class TestObservers:
    def test_assistant_reply_collects_non_user_chat(self):
        session = make_session()
        record = run_message(session, BRIEF)
        reply = assistant_reply(session, record.request_id)
        assert reply.startswith("Project brief captured.")
        assert BRIEF not in reply

    def test_stage_sequence_starts_at_planning(self):
        session = make_session(kind_rule(ArtifactKind.STORY_CONCEPT))
        assert observed_stage_sequence(session) == ["planning"]
        run_message(session, BRIEF)
        run_message(session, "Move to ideation and write a story concept.")
        assert observed_stage_sequence(session) == ["planning", "ideation"]

    def test_expectations_report_first_miss(self):
        session = make_session(kind_rule(ArtifactKind.STORY_CONCEPT))
        run_message(session, BRIEF)
        run_message(session, "Move to ideation and write a story concept.")
        assert check_expectations(session, {"canonical": ["story_concept"]}) is None
        assert "no canonical logline" in check_expectations(
            session, {"canonical": ["logline"]}
        )
        assert "stage sequence" in check_expectations(
            session, {"stage_sequence": ["planning", "design"]}
        )
        assert "branch child" in check_expectations(
            session,
            {"branch_children": [{"stage": "ideation", "kind": "story_concept"}]},
        )
        assert "at least 2" in check_expectations(
            session, {"min_blocks": {"story_concept": 2}}
        )
        assert check_expectations(
            session, {"statuses": {"planning": "complete"}}
        ) is None
        assert "status" in check_expectations(
            session, {"statuses": {"ideation": "complete"}}
        )


class TestRunner:
    def test_clean_run(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF, "reply_contains": "brief captured"},
            {
                "op": "message",
                "text": "Move to ideation and write a story concept.",
            },
            {"op": "expect_state", "stage": "ideation", "canonical": ["story_concept"]},
            rules=[kind_rule(ArtifactKind.STORY_CONCEPT)],
            expect={"stage_sequence": ["planning", "ideation"]},
        )
        report = run_scenario(doc)
        assert report.ok, report.divergence
        assert report.divergence is None
        assert [s["op"] for s in report.steps] == [
            "message",
            "message",
            "expect_state",
        ]
        assert report.steps[0]["status"] == "done"
        assert report.to_dict()["ok"] is True

    def test_reply_divergence_stops_the_run(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF, "reply_contains": "impossible text"},
            {"op": "message", "text": "never reached"},
        )
        report = run_scenario(doc)
        assert not report.ok
        assert report.divergence.startswith("step 0 (message)")
        assert "impossible text" in report.divergence
        assert len(report.steps) == 1

    def test_status_divergence_mentions_the_error(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF},
            {
                "op": "message",
                "text": "Move to ideation and write a story concept.",
            },
            rules=[rule(task_kind="story_concept", fault="rate-limit")],
        )
        report = run_scenario(doc)
        assert not report.ok
        assert "status 'failed'" in report.divergence
        assert "provider-failure" in report.divergence

    def test_expect_state_divergence(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF},
            {"op": "expect_state", "stage": "design"},
        )
        report = run_scenario(doc)
        assert not report.ok
        assert "expected 'design'" in report.divergence

    def test_final_expectations_divergence(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF},
            expect={"canonical": ["story_outline"]},
        )
        report = run_scenario(doc)
        assert not report.ok
        assert report.divergence.startswith("final expectations:")

    def test_cancel_action_expects_cancellation(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF},
            {
                "op": "cancel",
                "text": "Move to ideation and write a story concept.",
                "after_safe_points": 1,
            },
            {"op": "expect_state", "stage": "planning"},
            rules=[kind_rule(ArtifactKind.STORY_CONCEPT)],
        )
        report = run_scenario(doc)
        assert report.ok, report.divergence
        assert report.steps[1]["status"] == "cancelled"

    def test_save_action_writes_into_out_dir(self, tmp_path):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF},
            {"op": "save", "path": "project.json"},
        )
        report = run_scenario(doc, out_dir=tmp_path)
        assert report.ok, report.divergence
        assert (tmp_path / "project.json").exists()

    def test_unknown_op_is_malformed(self):
        doc = scenario_doc({"op": "teleport"})
        with pytest.raises(ScenarioMalformedError, match="teleport"):
            run_scenario(doc)

    def test_structural_selection_in_actions(self):
        doc = scenario_doc(
            {"op": "message", "text": BRIEF},
            {
                "op": "message",
                "text": "Move to ideation and write a story concept.",
            },
            {
                "op": "message",
                "text": "Make it stranger.",
                "selection": {"kind": "story_concept"},
            },
            rules=[kind_rule(ArtifactKind.STORY_CONCEPT)],
        )
        report = run_scenario(doc)
        assert report.ok, report.divergence
        assert report.steps[2]["selection"]["block_id"] == "blk-000001"

    def test_builtin_golden_workflow_passes(self):
        report = run_scenario(builtin_scenario_path("golden_workflow"))
        assert report.ok, report.divergence
