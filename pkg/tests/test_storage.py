"""Durable store: persistence layout, replay, concurrency control."""

import json
import threading

import pytest

from riskboard.board import EventKind
from riskboard.errors import (
    DomainError,
    NotFoundError,
    RevisionConflictError,
    SchemaError,
)
from riskboard.model import model_from_doc
from riskboard.storage import BoardStore, board_snapshot, canonical_json

MODEL_DOC = {
    "model_version": 1,
    "name": "Demo System",
    "components": [
        {"id": "api", "name": "API", "type": "service"},
        {"id": "db", "name": "DB", "type": "database"},
    ],
}


def make_store(tmp_path):
    return BoardStore(tmp_path / "data")


def command(kind, expected_revision, **fields):
    return {"kind": kind, "expected_revision": expected_revision, **fields}


# ---------------------------------------------------------------- creation

def test_create_board_writes_the_full_layout(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = store.create_board(model=MODEL_DOC)
    assert board_id == "demo-system"  # slug of the model name
    assert revision == 1  # creation plus one import mutation
    directory = store.boards_dir / board_id
    assert (directory / "events.ndjson").exists()
    assert (directory / "board.json").exists()
    assert (directory / "rules.json").exists()
    board = store.get_board(board_id)
    assert set(board.cards) == {"api", "db"}
    snapshot = (directory / "board.json").read_text(encoding="utf-8")
    assert snapshot == board_snapshot(board)


def test_generated_board_ids_get_suffixes_on_clashes(tmp_path):
    store = make_store(tmp_path)
    first, _ = store.create_board(model=MODEL_DOC)
    second, _ = store.create_board(model=MODEL_DOC)
    third, _ = store.create_board(model=MODEL_DOC)
    assert (first, second, third) == ("demo-system", "demo-system-2", "demo-system-3")


def test_create_board_without_model(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = store.create_board(board_id="empty-board")
    assert (board_id, revision) == ("empty-board", 0)
    assert store.get_board(board_id).cards == {}


def test_explicit_board_ids_are_validated(tmp_path):
    store = make_store(tmp_path)
    for bad in ("Has Spaces", "UPPER", "-leading", ""):
        with pytest.raises(SchemaError, match="board id"):
            store.create_board(board_id=bad)
    store.create_board(board_id="taken")
    with pytest.raises(DomainError, match="already exists"):
        store.create_board(board_id="taken")


def test_parsed_and_raw_models_are_equivalent(tmp_path):
    store = make_store(tmp_path)
    a, _ = store.create_board(model=MODEL_DOC, board_id="raw")
    b, _ = store.create_board(model=model_from_doc(MODEL_DOC), board_id="parsed")
    assert store.get_board(a).cards.keys() == store.get_board(b).cards.keys()


def test_list_boards(tmp_path):
    store = make_store(tmp_path)
    assert store.list_boards() == []
    store.create_board(model=MODEL_DOC, board_id="one")
    store.create_board(board_id="two")
    listing = store.list_boards()
    assert [b["board_id"] for b in listing] == ["one", "two"]
    assert listing[0]["cards"] == 2
    assert listing[0]["name"] == "Demo System"
    assert listing[1]["revision"] == 0


# ---------------------------------------------------------------- reload, replay

def full_scenario(store, board_id="demo-system"):
    store.create_board(model=MODEL_DOC, board_id=board_id)
    rev = store.apply(board_id, command("move", 1, card_id="api", to=1))["revision"]
    rev = store.apply(
        board_id,
        command("attach_threats", rev, card_id="api", threat_ids=["TH-SPOOF-01"]),
    )["revision"]
    rev = store.apply(
        board_id,
        command("score_risk", rev, card_id="api", risk_id="api:r1", likelihood=2, impact=3),
    )["revision"]
    # One deliberately rejected move for log texture: the revision stays put.
    result = store.apply(board_id, command("move", rev, card_id="api", to=3))
    assert not result["verdict"]["approved"]
    assert result["revision"] == rev
    rev = store.apply(board_id, command("move", rev, card_id="api", to=2))["revision"]
    rev = store.apply(
        board_id,
        command("attach_controls", rev, card_id="api", risk_id="api:r1", control_ids=["SC-8"]),
    )["revision"]
    rev = store.apply(
        board_id, command("set_roam", rev, card_id="api", risk_id="api:r1", status="Mitigated")
    )["revision"]
    return board_id, rev


def test_a_fresh_store_replays_to_the_same_snapshot(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = full_scenario(store)
    reloaded = BoardStore(tmp_path / "data")
    board = reloaded.get_board(board_id)
    assert board.revision == revision
    on_disk = (reloaded.boards_dir / board_id / "board.json").read_text(encoding="utf-8")
    assert board_snapshot(board) == on_disk


def test_a_torn_final_event_line_is_dropped_on_load(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = full_scenario(store)
    events_path = store.boards_dir / board_id / "events.ndjson"
    with events_path.open("a", encoding="utf-8") as f:
        f.write('{"sequence": 99, "timestamp": "tr')  # crash mid-write
    reloaded = BoardStore(tmp_path / "data")
    assert reloaded.get_board(board_id).revision == revision


def test_corruption_before_the_final_line_is_an_error(tmp_path):
    store = make_store(tmp_path)
    board_id, _ = full_scenario(store)
    events_path = store.boards_dir / board_id / "events.ndjson"
    lines = events_path.read_text(encoding="utf-8").splitlines()
    lines[2] = "{broken"
    events_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    reloaded = BoardStore(tmp_path / "data")
    with pytest.raises(SchemaError, match="line 3 is corrupt"):
        reloaded.get_board(board_id)


def test_unknown_board_raises(tmp_path):
    store = make_store(tmp_path)
    with pytest.raises(NotFoundError, match="unknown board"):
        store.get_board("ghost")
    with pytest.raises(NotFoundError):
        store.apply("ghost", command("attest_no_threats", 0, card_id="x", note="n"))


def test_custom_rules_survive_reload(tmp_path):
    from riskboard.rules import default_ruleset

    store = make_store(tmp_path)
    trimmed = [r for r in default_ruleset() if r.id != "attestation-required"]
    store.create_board(board_id="custom", rules=trimmed)
    reloaded = BoardStore(tmp_path / "data")
    assert [r.id for r in reloaded.rules_for("custom")] == [r.id for r in trimmed]


# ---------------------------------------------------------------- revisions

def test_expected_revision_must_match(tmp_path):
    store = make_store(tmp_path)
    board_id, _ = store.create_board(model=MODEL_DOC)
    with pytest.raises(RevisionConflictError) as exc_info:
        store.apply(board_id, command("move", 7, card_id="api", to=1))
    assert exc_info.value.expected == 7
    assert exc_info.value.current == 1


def test_expected_revision_shape_is_validated(tmp_path):
    store = make_store(tmp_path)
    board_id, _ = store.create_board(model=MODEL_DOC)
    for bad in (None, "1", 1.0, True, -1):
        with pytest.raises(SchemaError, match="expected_revision"):
            store.apply(board_id, {"kind": "move", "card_id": "api", "to": 1, "expected_revision": bad})


def test_commands_validate_their_shape(tmp_path):
    store = make_store(tmp_path)
    board_id, _ = store.create_board(model=MODEL_DOC)
    with pytest.raises(SchemaError, match="missing 'kind'"):
        store.apply(board_id, {"expected_revision": 1})
    with pytest.raises(SchemaError, match="unknown command kind"):
        store.apply(board_id, command("rename_board", 1, name="x"))
    with pytest.raises(SchemaError, match="missing 'card_id'"):
        store.apply(board_id, command("move", 1, to=1))
    with pytest.raises(SchemaError, match="'deferred' must be a boolean"):
        store.apply(
            board_id,
            command("mark_deferred", 1, card_id="api", risk_id="api:r1", deferred="yes"),
        )


def test_concurrent_commands_have_exactly_one_winner(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = store.create_board(model=MODEL_DOC)
    barrier = threading.Barrier(2)
    outcomes = []

    def contend(note):
        cmd = command("attest_no_threats", revision, card_id="api", note=note)
        barrier.wait()
        try:
            outcomes.append(("ok", store.apply(board_id, cmd)["revision"]))
        except RevisionConflictError as exc:
            outcomes.append(("conflict", exc.current))

    threads = [threading.Thread(target=contend, args=(f"n{i}",)) for i in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(kind for kind, _ in outcomes) == ["conflict", "ok"]
    assert store.get_board(board_id).revision == revision + 1


def test_column_resolution_accepts_names_any_case_and_indices(tmp_path):
    store = make_store(tmp_path)
    board_id, _ = store.create_board(model=MODEL_DOC)
    rev = store.apply(board_id, command("move", 1, card_id="api", to="Risks definition"))[
        "revision"
    ]
    assert store.get_board(board_id).card("api").column_index == 1
    store.apply(board_id, command("move", rev, card_id="api", to="components DEFINITION"))
    assert store.get_board(board_id).card("api").column_index == 0
    with pytest.raises(NotFoundError, match="unknown column"):
        store.apply(board_id, command("move", 3, card_id="api", to="Backlog"))
    with pytest.raises(SchemaError, match="column index or name"):
        store.apply(board_id, command("move", 3, card_id="api", to=True))


# ---------------------------------------------------------------- streaming

def test_subscribers_receive_exactly_the_mutation_events(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = store.create_board(model=MODEL_DOC)
    q = store.subscribe(board_id)
    store.apply(board_id, command("move", revision, card_id="api", to=1))
    doc = q.get(timeout=1)
    assert doc["kind"] == "CardMoved"
    assert doc["revision"] == revision + 1
    assert q.empty()
    store.unsubscribe(board_id, q)
    store.apply(board_id, command("move", revision + 1, card_id="api", to=0))
    assert q.empty()


def test_events_after_filters_by_sequence(tmp_path):
    store = make_store(tmp_path)
    board_id, revision = store.create_board(model=MODEL_DOC)
    store.apply(board_id, command("move", revision, card_id="api", to=1))
    everything = store.events_after(board_id, 0)
    assert [e["kind"] for e in everything][:2] == ["BoardCreated", "CardImported"]
    tail = store.events_after(board_id, everything[-2]["sequence"])
    assert [e["kind"] for e in tail] == ["CardMoved"]
    assert store.events_after(board_id, everything[-1]["sequence"]) == []


# ---------------------------------------------------------------- kb overlay

def test_kb_extensions_persist_across_store_instances(tmp_path):
    store = make_store(tmp_path)
    result = store.extend_kb(
        {
            "kind": "control",
            "entry": {
                "id": "XC-1",
                "title": "Local control",
                "description": "Site-specific hardening step.",
                "ccm_ids": [],
                "measurement": "manual check",
            },
        }
    )
    assert result == {"kind": "control", "id": "XC-1"}
    mapping_result = store.extend_kb(
        {
            "kind": "mapping",
            "entry": {
                "threat_id": "TH-DOS-01",
                "control_id": "XC-1",
                "minimum_level": "High",
            },
        }
    )
    assert mapping_result["id"] == "TH-DOS-01->XC-1"
    reloaded = BoardStore(tmp_path / "data")
    assert reloaded.kb.control("XC-1").title == "Local control"
    assert any(
        m.threat_id == "TH-DOS-01" and m.control_id == "XC-1"
        for m in reloaded.kb.mappings
    )


def test_bad_extensions_are_rejected_and_not_persisted(tmp_path):
    store = make_store(tmp_path)
    with pytest.raises(SchemaError):
        store.extend_kb({"kind": "mapping", "entry": {"threat_id": "TH-DOS-01"}})
    with pytest.raises(SchemaError, match="duplicate control id"):
        store.extend_kb(
            {
                "kind": "control",
                "entry": {
                    "id": "SI-4",
                    "title": "t",
                    "description": "d",
                    "ccm_ids": [],
                    "measurement": "m",
                },
            }
        )
    assert not (tmp_path / "data" / "kb_extensions.ndjson").exists()


def test_canonical_json_is_stable():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert canonical_json({"s": "käse"}) == '{"s":"käse"}'
