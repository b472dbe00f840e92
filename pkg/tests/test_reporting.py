"""Report projection: completeness, summary counts, rendering."""

import json

import pytest

from riskboard.board import (
    attach_controls,
    attach_threats,
    attest_no_threats,
    create_default_board,
    import_assets,
    move_card,
    score_risk,
    set_roam,
    mark_deferred,
)
from riskboard.domain import RoamStatus
from riskboard.errors import SchemaError
from riskboard.knowledge import load_default_knowledge_base
from riskboard.model import ArchitectureModel, ComponentSpec
from riskboard.reporting import (
    generate_report,
    render_report,
    report_from_doc,
)
from riskboard.rules import default_ruleset

KB = load_default_knowledge_base()
RULES = default_ruleset()


def scenario_board():
    """Two cards: one taken all the way to validation (with one risk
    eliminated and one deferred en route), one left attested and unmoved."""
    board = create_default_board("mixed scenario")
    model = ArchitectureModel(
        name="m",
        components=(
            ComponentSpec(id="api", name="API", asset_type="service"),
            ComponentSpec(id="static", name="Static site", asset_type="ui"),
        ),
    )
    board = import_assets(board, model, actor="t")
    board, _ = move_card(board, "api", 1, "t", RULES)
    board = attach_threats(
        board, "api", ["TH-SPOOF-01", "TH-DOS-01", "TH-REPUD-01"], KB, "t"
    )
    board = score_risk(board, "api", "api:r1", "t", likelihood=4, impact=4)
    board = score_risk(board, "api", "api:r2", "t", likelihood=2, impact=3)
    board = mark_deferred(board, "api", "api:r3", True, "t")
    board, _ = move_card(board, "api", 2, "t", RULES)
    board = attach_controls(board, "api", "api:r1", ["IA-2", "SC-8"], KB, "t")
    board = attach_controls(board, "api", "api:r2", ["SC-5"], KB, "t")
    board = set_roam(board, "api", "api:r1", RoamStatus.MITIGATED, "t")
    board = set_roam(board, "api", "api:r2", RoamStatus.RESOLVED, "t")
    board, verdict = move_card(board, "api", 3, "t", RULES)
    assert verdict.approved
    board = attest_no_threats(board, "static", "serves public files only", "t")
    return board


def test_report_partitions_live_and_eliminated_risks():
    board = scenario_board()
    report = generate_report(board, kb=KB)
    api = next(c for c in report.cards if c.card_id == "api")
    live_ids = {r.risk_id for r in api.risks}
    gone_ids = {e.risk_id for e in api.eliminated}
    assert live_ids == {"api:r1", "api:r3"}
    assert gone_ids == {"api:r2"}
    assert not live_ids & gone_ids
    # Everything that was ever attached shows up exactly once.
    assert live_ids | gone_ids == {"api:r1", "api:r2", "api:r3"}


def test_report_carries_scores_roam_and_controls():
    report = generate_report(scenario_board(), kb=KB)
    api = next(c for c in report.cards if c.card_id == "api")
    r1 = next(r for r in api.risks if r.risk_id == "api:r1")
    assert (r1.likelihood, r1.impact, r1.cri, r1.level) == (4, 4, 16, "High")
    assert r1.roam == "Mitigated"
    assert [c.id for c in r1.controls] == ["IA-2", "SC-8"]
    assert r1.threat_title == KB.threat("TH-SPOOF-01").title
    assert r1.stride == "SpoofingIdentity"
    r3 = next(r for r in api.risks if r.risk_id == "api:r3")
    assert r3.cri is None
    assert r3.deferred
    gone = api.eliminated[0]
    assert (gone.cri, gone.level) == (6, "Medium")
    assert gone.controls == ("SC-5",)


def test_report_summary_counts_and_ordering():
    report = generate_report(scenario_board(), kb=KB)
    assert report.summary["columns"] == {
        "Components definition": 1,
        "Validation": 1,
    }
    # Column keys follow board order, ROAM and level keys a fixed order,
    # and zero counts are omitted entirely.
    assert list(report.summary["columns"]) == ["Components definition", "Validation"]
    assert report.summary["roam"] == {"Unset": 1, "Mitigated": 1}
    assert list(report.summary["roam"]) == ["Unset", "Mitigated"]
    assert report.summary["levels"] == {"High": 1}


def test_report_covers_attested_cards():
    report = generate_report(scenario_board(), kb=KB)
    static = next(c for c in report.cards if c.card_id == "static")
    assert static.risks == ()
    assert static.attestation["note"] == "serves public files only"
    assert not static.fully_addressed  # still in the first column


def test_report_is_deterministic_and_defaults_to_log_time():
    board = scenario_board()
    first = generate_report(board, kb=KB)
    second = generate_report(board, kb=KB)
    assert first == second
    assert first.generated_at == board.events[-1].timestamp
    pinned = generate_report(board, kb=KB, generated_at="2026-02-03T04:05:06.007Z")
    assert pinned.generated_at == "2026-02-03T04:05:06.007Z"


def test_report_json_round_trip():
    report = generate_report(scenario_board(), kb=KB)
    text = render_report(report, "json")
    doc = json.loads(text)
    assert report_from_doc(doc) == report
    with pytest.raises(SchemaError, match="report_version"):
        report_from_doc({**doc, "report_version": 0})


def test_render_rejects_unknown_formats():
    report = generate_report(scenario_board(), kb=KB)
    with pytest.raises(SchemaError, match="unknown report format"):
        render_report(report, "pdf")


def test_markdown_layout_for_a_small_board():
    board = create_default_board("golden")
    model = ArchitectureModel(
        name="m", components=(ComponentSpec(id="db", name="DB", asset_type="database"),)
    )
    board = import_assets(board, model, actor="t")
    board, _ = move_card(board, "db", 1, "t", RULES)
    board = attach_threats(board, "db", ["TH-INFO-01"], KB, "t")
    board = score_risk(board, "db", "db:r1", "t", likelihood=3, impact=4)
    report = generate_report(board, kb=KB, generated_at="2026-02-03T04:05:06.007Z")
    text = render_report(report, "md")
    title = KB.threat("TH-INFO-01").title
    assert text == (
        "# Risk assessment report: golden\n"
        "\n"
        "Generated: 2026-02-03T04:05:06.007Z\n"
        "\n"
        "## DB (Risks definition)\n"
        "\n"
        "- fully addressed: no\n"
        "\n"
        "### Risks\n"
        "\n"
        f"- `db:r1` {title} [InformationDisclosure]\n"
        "  - likelihood 3, impact 4, CRI 12, level Medium\n"
        "  - ROAM: Unset\n"
        "  - controls: none\n"
        "\n"
        "## Summary\n"
        "\n"
        "- cards per column: Risks definition: 1\n"
        "- risks per ROAM status: Unset: 1\n"
        "- risks per level: Medium: 1\n"
    )


def test_markdown_renders_eliminations_attestations_and_deferrals():
    text = render_report(generate_report(scenario_board(), kb=KB), "markdown")
    assert "### Eliminated" in text
    assert "CRI 6 (Medium) at elimination; controls: SC-5" in text
    assert "(deferred)" in text
    assert "- no-threat attestation by t: serves public files only" in text
    assert "- fully addressed: yes" in text
