import hypothesis

hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=60, print_blob=True
)
hypothesis.settings.load_profile("suite")

# One human-readable verdict line per acceptance criterion, printed after the
# run regardless of capture settings.
ACCEPTANCE_LINES = {
    "test_golden_workflow": "golden workflow: stage journey, branch child, canonical artifacts, storyboard output",
    "test_publication_intent_effects": "publication intents: replace-vs-add effect table holds on every run",
    "test_board_property_suite": "board properties: 1,000 randomized op sequences keep lineage, versions, placement, persistence intact",
    "test_validation_loop": "validation loop: approve on round 2, exhausted revisions publish nothing, approval gates every publication",
    "test_rollback_totality": "rollback: injection at every safe point restores the pre-request state",
    "test_memory_oracle_equivalence": "memory: retrieval matches the brute-force oracle; chunk coverage and window budgets hold",
    "test_event_stream_contract": "event stream: all subscribers see identical gapless sequences, reconnect included",
    "test_scripted_determinism": "determinism: golden scenario twice gives byte-identical files and event payloads",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for status, key in (("PASS", "passed"), ("FAIL", "failed")):
        for report in terminalreporter.stats.get(key, []):
            if getattr(report, "when", None) != "call":
                continue
            if "test_acceptance.py" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            rows.append((name, status, getattr(report, "duration", 0.0)))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    order = list(ACCEPTANCE_LINES)
    rows.sort(key=lambda r: order.index(r[0]) if r[0] in order else len(order))
    for name, status, duration in rows:
        text = ACCEPTANCE_LINES.get(name, name)
        terminalreporter.write_line(f"[{status}] {text} ({duration:.1f}s)")
