"""File-backed board store with serialized mutations.

Layout: one directory per board under <root>/boards/ holding events.ndjson
(the authoritative append-only log), board.json (canonical snapshot, rewritten
after every mutation) and rules.json. Loading a board replays its log, so a
crash between the two writes costs nothing: the snapshot is rebuilt from the
events that made it to disk. Knowledge-base extensions accumulate in
kb_extensions.ndjson at the root and overlay the shipped catalog.

Mutations take a per-board lock; expected_revision is checked inside it, which
is what gives two racing commands exactly one winner. Event fan-out pushes to
unbounded per-subscriber queues and never blocks the acknowledgment.
"""

from __future__ import annotations

import json
import os
import re
import threading
from pathlib import Path
from queue import SimpleQueue
from typing import Mapping

from . import board as board_ops
from .board import Board, Event, board_to_doc, create_default_board, replay_events
from .errors import (
    DomainError,
    NotFoundError,
    RevisionConflictError,
    SchemaError,
)
from .knowledge import (
    KnowledgeBase,
    extend_catalog,
    load_default_knowledge_base,
    parse_extension,
)
from .model import ArchitectureModel, model_from_doc
from .rules import Rule, default_ruleset, ruleset_from_doc, ruleset_to_doc


def canonical_json(doc) -> str:
    """The one serialization used for event lines and snapshots."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def board_snapshot(board: Board) -> str:
    """Exactly the bytes of board.json; replay checks compare against this."""
    return canonical_json(board_to_doc(board)) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _slug(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "board"


class BoardStore:
    def __init__(self, root: Path | str, kb: KnowledgeBase | None = None):
        self.root = Path(root)
        self.boards_dir = self.root / "boards"
        self.boards_dir.mkdir(parents=True, exist_ok=True)
        self._kb = kb if kb is not None else load_default_knowledge_base()
        self._load_kb_extensions()
        self._lock = threading.Lock()
        self._board_locks: dict[str, threading.Lock] = {}
        self._boards: dict[str, Board] = {}
        self._rules: dict[str, list[Rule]] = {}
        self._subscribers: dict[str, list[SimpleQueue]] = {}

    # -- knowledge base --------------------------------------------------------

    @property
    def kb(self) -> KnowledgeBase:
        return self._kb

    def _extensions_path(self) -> Path:
        return self.root / "kb_extensions.ndjson"

    def _load_kb_extensions(self) -> None:
        path = self._extensions_path()
        if not path.exists():
            return
        for i, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
            if not line.strip():
                continue
            try:
                entry = parse_extension(json.loads(line))
            except (json.JSONDecodeError, SchemaError) as exc:
                raise SchemaError(f"kb_extensions.ndjson line {i + 1}: {exc}") from None
            self._kb = extend_catalog(self._kb, entry)

    def extend_kb(self, doc: Mapping) -> dict:
        """Validate, merge and persist one catalog extension entry."""
        entry = parse_extension(doc)
        with self._lock:
            self._kb = extend_catalog(self._kb, entry)
            with self._extensions_path().open("a", encoding="utf-8") as f:
                f.write(canonical_json(dict(doc)) + "\n")
                f.flush()
                os.fsync(f.fileno())
        entry_id = getattr(entry, "id", None) or (
            f"{entry.threat_id}->{entry.control_id}"
        )
        return {"kind": doc["kind"], "id": entry_id}

    # -- board lifecycle -------------------------------------------------------

    def _dir(self, board_id: str) -> Path:
        return self.boards_dir / board_id

    def _board_lock(self, board_id: str) -> threading.Lock:
        with self._lock:
            return self._board_locks.setdefault(board_id, threading.Lock())

    def create_board(
        self,
        model: ArchitectureModel | Mapping | None = None,
        rules: list[Rule] | None = None,
        board_id: str | None = None,
        actor: str = "system",
    ) -> tuple[str, int]:
        if isinstance(model, Mapping):
            model = model_from_doc(model)
        with self._lock:
            if board_id is not None:
                if not re.fullmatch(r"[a-z0-9][a-z0-9-]*", board_id):
                    raise SchemaError(
                        f"board id {board_id!r} must be lowercase letters, digits and dashes"
                    )
                if self._dir(board_id).exists():
                    raise DomainError(f"board {board_id!r} already exists")
            else:
                base = _slug(model.name) if model else "board"
                board_id = base
                n = 2
                while self._dir(board_id).exists():
                    board_id = f"{base}-{n}"
                    n += 1
            name = model.name if model else board_id
            board = create_default_board(name=name, board_id=board_id, actor=actor)
            if model is not None:
                board = board_ops.import_assets(board, model, actor)
            ruleset = list(rules) if rules is not None else default_ruleset()

            directory = self._dir(board_id)
            directory.mkdir(parents=True)
            with (directory / "events.ndjson").open("a", encoding="utf-8") as f:
                for ev in board.events:
                    f.write(canonical_json(ev.to_doc()) + "\n")
                f.flush()
                os.fsync(f.fileno())
            _atomic_write(directory / "board.json", board_snapshot(board))
            _atomic_write(
                directory / "rules.json",
                json.dumps(ruleset_to_doc(ruleset), indent=2) + "\n",
            )
            self._boards[board_id] = board
            self._rules[board_id] = ruleset
            return board_id, board.revision

    def list_boards(self) -> list[dict]:
        out = []
        for directory in sorted(self.boards_dir.iterdir()):
            if not directory.is_dir():
                continue
            board = self.get_board(directory.name)
            out.append(
                {
                    "board_id": directory.name,
                    "name": board.definition.name,
                    "revision": board.revision,
                    "cards": len(board.cards),
                }
            )
        return out

    def _load_events(self, board_id: str) -> list[Event]:
        path = self._dir(board_id) / "events.ndjson"
        events: list[Event] = []
        lines = path.read_text(encoding="utf-8").splitlines()
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                events.append(Event.from_doc(json.loads(line)))
            except (json.JSONDecodeError, SchemaError):
                # A torn final line is the expected crash artifact; anything
                # earlier means real corruption.
                if i == len(lines) - 1:
                    break
                raise SchemaError(f"{path.name} line {i + 1} is corrupt") from None
        return events

    def get_board(self, board_id: str) -> Board:
        with self._lock:
            cached = self._boards.get(board_id)
        if cached is not None:
            return cached
        if not self._dir(board_id).is_dir():
            raise NotFoundError(f"unknown board {board_id!r}")
        board = replay_events(self._load_events(board_id))
        with self._lock:
            return self._boards.setdefault(board_id, board)

    def rules_for(self, board_id: str) -> list[Rule]:
        with self._lock:
            cached = self._rules.get(board_id)
        if cached is not None:
            return cached
        path = self._dir(board_id) / "rules.json"
        if not path.exists():
            raise NotFoundError(f"unknown board {board_id!r}")
        ruleset = ruleset_from_doc(json.loads(path.read_text(encoding="utf-8")))
        with self._lock:
            return self._rules.setdefault(board_id, ruleset)

    # -- event streaming -------------------------------------------------------

    def subscribe(self, board_id: str) -> SimpleQueue:
        self.get_board(board_id)
        q: SimpleQueue = SimpleQueue()
        with self._lock:
            self._subscribers.setdefault(board_id, []).append(q)
        return q

    def unsubscribe(self, board_id: str, q: SimpleQueue) -> None:
        with self._lock:
            subs = self._subscribers.get(board_id, [])
            if q in subs:
                subs.remove(q)

    def events_after(self, board_id: str, since: int) -> list[dict]:
        board = self.get_board(board_id)
        return [ev.to_doc() for ev in board.events if ev.sequence > since]

    def _fan_out(self, board_id: str, event_docs: list[dict]) -> None:
        with self._lock:
            subs = list(self._subscribers.get(board_id, ()))
        for q in subs:
            for doc in event_docs:
                q.put(doc)

    # -- mutation --------------------------------------------------------------

    def apply(self, board_id: str, command: Mapping) -> dict:
        """Apply one MutationCommand under the board's lock.

        Returns {"revision", "verdict"}; verdict is the move outcome (it may
        be rejected, which is still an acknowledged command) and None for
        every other command kind.
        """
        if not isinstance(command, Mapping):
            raise SchemaError("command must be a JSON object")
        kind = command.get("kind")
        if not isinstance(kind, str):
            raise SchemaError("command missing 'kind'")
        actor = command.get("actor") or "anonymous"
        expected = command.get("expected_revision")
        if not isinstance(expected, int) or isinstance(expected, bool) or expected < 0:
            raise SchemaError("expected_revision must be a non-negative integer")

        with self._board_lock(board_id):
            board = self.get_board(board_id)
            if expected != board.revision:
                raise RevisionConflictError(expected, board.revision)
            new_board, verdict = self._dispatch(board_id, board, kind, command, actor)
            delta = new_board.events[len(board.events):]
            self._persist(board_id, new_board, delta)
            with self._lock:
                self._boards[board_id] = new_board
            self._fan_out(board_id, [ev.to_doc() for ev in delta])
            return {
                "revision": new_board.revision,
                "verdict": verdict.to_doc() if verdict is not None else None,
            }

    def _persist(self, board_id: str, board: Board, delta: list[Event]) -> None:
        directory = self._dir(board_id)
        # Write-ahead: events land (and sync) before the snapshot is replaced.
        with (directory / "events.ndjson").open("a", encoding="utf-8") as f:
            for ev in delta:
                f.write(canonical_json(ev.to_doc()) + "\n")
            f.flush()
            os.fsync(f.fileno())
        _atomic_write(directory / "board.json", board_snapshot(board))

    def _resolve_column(self, board: Board, to) -> int:
        columns = board.definition.columns
        if isinstance(to, bool):
            raise SchemaError("'to' must be a column index or name")
        if isinstance(to, int):
            return to
        if isinstance(to, str):
            if to in columns:
                return columns.index(to)
            lowered = [c.lower() for c in columns]
            if to.lower() in lowered:
                return lowered.index(to.lower())
            raise NotFoundError(f"unknown column {to!r}")
        raise SchemaError("'to' must be a column index or name")

    def _dispatch(
        self, board_id: str, board: Board, kind: str, command: Mapping, actor: str
    ):
        def need(key: str):
            value = command.get(key)
            if value is None:
                raise SchemaError(f"command {kind!r} missing {key!r}")
            return value

        if kind == "move":
            to_index = self._resolve_column(board, need("to"))
            approvals = command.get("approvals", ())
            if not isinstance(approvals, (list, tuple)):
                raise SchemaError("'approvals' must be a list")
            new_board, verdict = board_ops.move_card(
                board,
                need("card_id"),
                to_index,
                actor,
                self.rules_for(board_id),
                approvals=approvals,
            )
            return new_board, verdict
        if kind == "import_assets":
            model = model_from_doc(need("model"))
            return board_ops.import_assets(board, model, actor), None
        if kind == "attach_threats":
            threat_ids = need("threat_ids")
            if not isinstance(threat_ids, (list, tuple)):
                raise SchemaError("'threat_ids' must be a list")
            return (
                board_ops.attach_threats(
                    board, need("card_id"), list(threat_ids), self._kb, actor
                ),
                None,
            )
        if kind == "score_risk":
            return (
                board_ops.score_risk(
                    board,
                    need("card_id"),
                    need("risk_id"),
                    actor,
                    factors=command.get("factors"),
                    likelihood=command.get("likelihood"),
                    impact=command.get("impact"),
                ),
                None,
            )
        if kind == "apply_category_score":
            return (
                board_ops.apply_category_score(
                    board,
                    need("card_id"),
                    need("category"),
                    need("likelihood"),
                    need("impact"),
                    self._kb,
                    actor,
                ),
                None,
            )
        if kind == "attach_controls":
            control_ids = need("control_ids")
            if not isinstance(control_ids, (list, tuple)):
                raise SchemaError("'control_ids' must be a list")
            return (
                board_ops.attach_controls(
                    board,
                    need("card_id"),
                    need("risk_id"),
                    list(control_ids),
                    self._kb,
                    actor,
                ),
                None,
            )
        if kind == "set_roam":
            return (
                board_ops.set_roam(
                    board,
                    need("card_id"),
                    need("risk_id"),
                    need("status"),
                    actor,
                    owner=command.get("owner"),
                ),
                None,
            )
        if kind == "mark_deferred":
            deferred = command.get("deferred")
            if not isinstance(deferred, bool):
                raise SchemaError("'deferred' must be a boolean")
            return (
                board_ops.mark_deferred(
                    board, need("card_id"), need("risk_id"), deferred, actor
                ),
                None,
            )
        if kind == "attest_no_threats":
            return (
                board_ops.attest_no_threats(board, need("card_id"), need("note"), actor),
                None,
            )
        raise SchemaError(f"unknown command kind {kind!r}")
