"""Kanban board state and operations.

The board is event-sourced: every operation validates against current state,
appends events, and derives the new state by applying them through the same
code path replay uses. Replaying a log from scratch therefore reproduces the
exact board, which is what makes the persisted snapshot verifiable.

Accepted mutations bump the revision by exactly one (and may carry several
events); a rejected move appends its MoveRejected event without bumping.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .domain import (
    CriScore,
    FactorSet,
    RiskAssessment,
    RoamStatus,
    RiskLevel,
    StrideCategory,
    compute_cri,
    is_fully_addressed,
    score_from_factors,
)
from .errors import DomainError, NotFoundError, SchemaError
from .rules import MovementRequest, Rule, Verdict, evaluate_movement

if TYPE_CHECKING:
    from .knowledge import KnowledgeBase
    from .model import ArchitectureModel

BOARD_VERSION = 1

COL_COMPONENTS = "Components definition"
COL_RISKS = "Risks definition"
COL_CONTROLS = "Security controls definition"
COL_VALIDATION = "Validation"

DEFAULT_COLUMNS = (COL_COMPONENTS, COL_RISKS, COL_CONTROLS, COL_VALIDATION)


class EventKind(str, Enum):
    BOARD_CREATED = "BoardCreated"
    CARD_IMPORTED = "CardImported"
    CARD_MOVED = "CardMoved"
    MOVE_REJECTED = "MoveRejected"
    THREAT_ATTACHED = "ThreatAttached"
    RISK_SCORED = "RiskScored"
    CATEGORY_SCORE_APPLIED = "CategoryScoreApplied"
    CONTROL_ATTACHED = "ControlAttached"
    ROAM_SET = "RoamSet"
    RISK_ELIMINATED = "RiskEliminated"
    DEFERRED = "Deferred"
    UNDEFERRED = "Undeferred"
    NO_THREAT_ATTESTED = "NoThreatAttested"
    CARD_VALIDATED = "CardValidated"


@dataclass(frozen=True)
class Event:
    """One entry of the append-only log. ``revision`` is the board revision
    after the mutation this event belongs to (unchanged for MoveRejected)."""

    sequence: int
    timestamp: str
    actor: str
    kind: EventKind
    payload: dict
    revision: int

    def to_doc(self) -> dict:
        return {
            "sequence": self.sequence,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "kind": self.kind.value,
            "payload": self.payload,
            "revision": self.revision,
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Event":
        try:
            return cls(
                sequence=int(doc["sequence"]),
                timestamp=doc["timestamp"],
                actor=doc["actor"],
                kind=EventKind(doc["kind"]),
                payload=dict(doc["payload"]),
                revision=int(doc["revision"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"malformed event record: {exc}") from None


@dataclass(frozen=True)
class MethodologyStep:
    name: str
    activities: tuple[str, ...]


@dataclass(frozen=True)
class BoardDefinition:
    """Column layout plus its mapping onto the methodology steps.

    The first column holds incoming assets and the last holds validated ones;
    each column in between maps one-to-one onto a methodology step.
    """

    name: str
    columns: tuple[str, ...]
    methodology_steps: tuple[MethodologyStep, ...]
    mapping: Mapping[str, str]

    def __post_init__(self) -> None:
        if len(set(self.columns)) != len(self.columns):
            raise SchemaError("column names must be unique")
        if len(self.columns) != len(self.methodology_steps) + 2:
            raise SchemaError(
                f"{len(self.columns)} columns cannot map onto "
                f"{len(self.methodology_steps)} methodology steps"
            )
        middle = set(self.columns[1:-1])
        step_names = [s.name for s in self.methodology_steps]
        if set(self.mapping) != middle or sorted(self.mapping.values()) != sorted(
            step_names
        ) or len(set(step_names)) != len(step_names):
            raise SchemaError("mapping must pair each middle column with one step")

    def column_index(self, name: str) -> int | None:
        try:
            return self.columns.index(name)
        except ValueError:
            return None

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "methodology_steps": [
                {"name": s.name, "activities": list(s.activities)}
                for s in self.methodology_steps
            ],
            "mapping": dict(self.mapping),
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "BoardDefinition":
        try:
            return cls(
                name=doc["name"],
                columns=tuple(doc["columns"]),
                methodology_steps=tuple(
                    MethodologyStep(s["name"], tuple(s["activities"]))
                    for s in doc["methodology_steps"]
                ),
                mapping=dict(doc["mapping"]),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed board definition: {exc}") from None


def default_definition(name: str = "risk board") -> BoardDefinition:
    return BoardDefinition(
        name=name,
        columns=DEFAULT_COLUMNS,
        methodology_steps=(
            MethodologyStep(
                "Risks analysis", ("Risk identification", "Risk evaluation")
            ),
            MethodologyStep(
                "Risks mitigation",
                ("Mitigation actions selection", "Risk status evaluation"),
            ),
        ),
        mapping={
            COL_RISKS: "Risks analysis",
            COL_CONTROLS: "Risks mitigation",
        },
    )


@dataclass
class AssetCard:
    """One architecture component moving across the board."""

    id: str
    name: str
    asset_type: str
    description: str = ""
    column_index: int = 0
    risks: list[RiskAssessment] = field(default_factory=list)
    no_threat_attestation: dict | None = None
    fully_addressed: bool = False
    # Monotone counter behind risk ids; eliminated ids are never reissued.
    risk_seq: int = 0

    def risk(self, risk_id: str) -> RiskAssessment | None:
        for r in self.risks:
            if r.id == risk_id:
                return r
        return None

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "asset_type": self.asset_type,
            "description": self.description,
            "column_index": self.column_index,
            "risks": [r.to_doc() for r in self.risks],
            "no_threat_attestation": self.no_threat_attestation,
            "fully_addressed": self.fully_addressed,
            "risk_seq": self.risk_seq,
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "AssetCard":
        return cls(
            id=doc["id"],
            name=doc["name"],
            asset_type=doc["asset_type"],
            description=doc.get("description", ""),
            column_index=int(doc.get("column_index", 0)),
            risks=[RiskAssessment.from_doc(r) for r in doc.get("risks", ())],
            no_threat_attestation=doc.get("no_threat_attestation"),
            fully_addressed=bool(doc.get("fully_addressed", False)),
            risk_seq=int(doc.get("risk_seq", 0)),
        )


@dataclass
class Board:
    definition: BoardDefinition
    cards: dict[str, AssetCard] = field(default_factory=dict)
    revision: int = 0
    events: list[Event] = field(default_factory=list)

    def card(self, card_id: str) -> AssetCard:
        card = self.cards.get(card_id)
        if card is None:
            raise NotFoundError(f"unknown card {card_id!r}")
        return card

    def column_name(self, index: int) -> str:
        return self.definition.columns[index]

    def next_sequence(self) -> int:
        return self.events[-1].sequence + 1 if self.events else 1


def _utc_now() -> str:
    return (
        datetime.now(timezone.utc)
        .isoformat(timespec="milliseconds")
        .replace("+00:00", "Z")
    )


# --- event application -------------------------------------------------------


def _terminal_index(board: Board) -> int:
    return len(board.definition.columns) - 1


def _refresh_fully_addressed(board: Board, card: AssetCard) -> None:
    card.fully_addressed = (
        card.column_index == _terminal_index(board)
        and is_fully_addressed(card.risks)
        and bool(card.risks or card.no_threat_attestation)
    )


def _apply_event(board: Board, ev: Event) -> None:
    p = ev.payload
    kind = ev.kind
    if kind is EventKind.BOARD_CREATED:
        raise SchemaError("BoardCreated may only open an event log")
    elif kind is EventKind.CARD_IMPORTED:
        c = p["card"]
        board.cards[c["id"]] = AssetCard(
            id=c["id"],
            name=c["name"],
            asset_type=c["asset_type"],
            description=c.get("description", ""),
        )
    elif kind is EventKind.CARD_MOVED:
        board.cards[p["card_id"]].column_index = p["to_index"]
    elif kind is EventKind.MOVE_REJECTED:
        pass  # audit record only
    elif kind is EventKind.THREAT_ATTACHED:
        card = board.cards[p["card_id"]]
        card.risks.append(
            RiskAssessment(
                id=p["risk_id"],
                threat_id=p["threat_id"],
                impact_prefill=p.get("impact_prefill"),
            )
        )
        card.risk_seq += 1
    elif kind is EventKind.RISK_SCORED:
        risk = board.cards[p["card_id"]].risk(p["risk_id"])
        risk.factors = FactorSet.from_doc(p["factors"])
        risk.score = CriScore.from_doc(p["score"])
    elif kind is EventKind.CATEGORY_SCORE_APPLIED:
        card = board.cards[p["card_id"]]
        for risk_id in p["risk_ids"]:
            risk = card.risk(risk_id)
            risk.factors = FactorSet.from_doc(p["factors"])
            risk.score = CriScore.from_doc(p["score"])
    elif kind is EventKind.CONTROL_ATTACHED:
        risk = board.cards[p["card_id"]].risk(p["risk_id"])
        risk.controls |= set(p["control_ids"])
    elif kind is EventKind.ROAM_SET:
        risk = board.cards[p["card_id"]].risk(p["risk_id"])
        risk.roam = RoamStatus(p["status"])
        risk.roam_owner = p.get("owner")
    elif kind is EventKind.RISK_ELIMINATED:
        card = board.cards[p["card_id"]]
        card.risks = [r for r in card.risks if r.id != p["risk_id"]]
    elif kind is EventKind.DEFERRED:
        board.cards[p["card_id"]].risk(p["risk_id"]).deferred = True
    elif kind is EventKind.UNDEFERRED:
        board.cards[p["card_id"]].risk(p["risk_id"]).deferred = False
    elif kind is EventKind.NO_THREAT_ATTESTED:
        board.cards[p["card_id"]].no_threat_attestation = {
            "actor": ev.actor,
            "note": p["note"],
            "timestamp": ev.timestamp,
        }
    elif kind is EventKind.CARD_VALIDATED:
        pass  # derived flag; the refresh below recomputes it
    else:  # pragma: no cover - enum is closed
        raise SchemaError(f"unhandled event kind {kind}")

    card_id = p.get("card_id") or (p.get("card") or {}).get("id")
    if card_id and card_id in board.cards:
        _refresh_fully_addressed(board, board.cards[card_id])
    board.revision = ev.revision


def apply_events(board: Board, events: Sequence[Event]) -> Board:
    """Pure fold: a new board with the events applied and appended."""
    new = copy.deepcopy(board)
    for ev in events:
        _apply_event(new, ev)
        new.events.append(ev)
    return new


def replay_events(events: Iterable[Event]) -> Board:
    """Rebuild a board from its complete event log."""
    it = iter(events)
    first = next(it, None)
    if first is None or first.kind is not EventKind.BOARD_CREATED:
        raise SchemaError("event log must start with a BoardCreated event")
    board = Board(
        definition=BoardDefinition.from_doc(first.payload["definition"]),
        revision=first.revision,
        events=[first],
    )
    for ev in it:
        _apply_event(board, ev)
        board.events.append(ev)
    return board


def create_default_board(
    name: str = "risk board", board_id: str | None = None, actor: str = "system"
) -> Board:
    definition = default_definition(name)
    created = Event(
        sequence=1,
        timestamp=_utc_now(),
        actor=actor,
        kind=EventKind.BOARD_CREATED,
        payload={"board_id": board_id, "definition": definition.to_doc()},
        revision=0,
    )
    return replay_events([created])


# --- operation plumbing ------------------------------------------------------


def _commit(
    board: Board,
    actor: str,
    pairs: Sequence[tuple[EventKind, dict]],
    revision: int,
) -> Board:
    """Append one mutation's events, then any CardValidated follow-ups for
    cards whose fully_addressed flag flipped on."""
    ts = _utc_now()
    seq = board.next_sequence()
    events = []
    for kind, payload in pairs:
        events.append(Event(seq, ts, actor, kind, payload, revision))
        seq += 1
    new = apply_events(board, events)
    follow_ups = []
    for card_id, card in new.cards.items():
        before = board.cards.get(card_id)
        if card.fully_addressed and not (before and before.fully_addressed):
            follow_ups.append(
                Event(
                    seq, ts, actor, EventKind.CARD_VALIDATED, {"card_id": card_id},
                    revision,
                )
            )
            seq += 1
    if follow_ups:
        new = apply_events(new, follow_ups)
    return new


def _require_column(board: Board, card: AssetCard, allowed: tuple[str, ...], what: str) -> None:
    current = board.column_name(card.column_index)
    if current not in allowed:
        names = " or ".join(repr(a) for a in allowed)
        raise DomainError(f"{what} is only allowed in {names}; card {card.id!r} is in {current!r}")


def _require_risk(card: AssetCard, risk_id: str) -> RiskAssessment:
    risk = card.risk(risk_id)
    if risk is None:
        raise NotFoundError(f"card {card.id!r} has no risk {risk_id!r}")
    return risk


# --- operations --------------------------------------------------------------


def import_assets(board: Board, model: "ArchitectureModel", actor: str) -> Board:
    """Seed the first column with one card per model component."""
    if not model.components:
        raise DomainError("model has no components; nothing to import")
    clashes = [c.id for c in model.components if c.id in board.cards]
    if clashes:
        raise DomainError(f"component id(s) already on the board: {', '.join(clashes)}")
    pairs = [
        (
            EventKind.CARD_IMPORTED,
            {
                "card": {
                    "id": c.id,
                    "name": c.name,
                    "asset_type": c.asset_type,
                    "description": c.description,
                }
            },
        )
        for c in model.components
    ]
    return _commit(board, actor, pairs, board.revision + 1)


def attach_threats(
    board: Board,
    card_id: str,
    threat_ids: Sequence[str],
    kb: "KnowledgeBase",
    actor: str,
) -> Board:
    """Instantiate catalog threats as risks on a card, carrying over any
    pre-populated impact factors as editable prefill."""
    card = board.card(card_id)
    _require_column(board, card, (COL_RISKS,), "attaching threats")
    if not threat_ids:
        raise DomainError("no threat ids given")
    if len(set(threat_ids)) != len(threat_ids):
        raise DomainError("duplicate threat ids in request")
    present = {r.threat_id for r in card.risks}
    already = [t for t in threat_ids if t in present]
    if already:
        raise DomainError(f"already attached to {card_id!r}: {', '.join(already)}")
    pairs = []
    seq = card.risk_seq
    for tid in threat_ids:
        entry = kb.threat(tid)
        seq += 1
        prefill = None
        if entry.impact_defaults is not None:
            prefill = {
                "technical": list(entry.impact_defaults[0]),
                "business": list(entry.impact_defaults[1]),
            }
        pairs.append(
            (
                EventKind.THREAT_ATTACHED,
                {
                    "card_id": card_id,
                    "risk_id": f"{card_id}:r{seq}",
                    "threat_id": tid,
                    "impact_prefill": prefill,
                },
            )
        )
    return _commit(board, actor, pairs, board.revision + 1)


def score_risk(
    board: Board,
    card_id: str,
    risk_id: str,
    actor: str,
    *,
    factors: FactorSet | Mapping | None = None,
    likelihood: int | None = None,
    impact: int | None = None,
) -> Board:
    """Score one risk, either from a full 16-factor set or directly from
    likelihood/impact bands (which pins factors at band midpoints)."""
    card = board.card(card_id)
    _require_column(board, card, (COL_RISKS,), "scoring")
    _require_risk(card, risk_id)
    band_args = likelihood is not None or impact is not None
    if (factors is None) == (not band_args):
        raise DomainError("provide either a factor set or likelihood and impact bands")
    if factors is not None:
        fs = factors if isinstance(factors, FactorSet) else FactorSet.from_doc(factors)
        score = score_from_factors(fs)
    else:
        if likelihood is None or impact is None:
            raise DomainError("both likelihood and impact bands are required")
        score = compute_cri(likelihood, impact)
        fs = FactorSet.uniform(likelihood, impact)
    payload = {
        "card_id": card_id,
        "risk_id": risk_id,
        "factors": fs.to_doc(),
        "score": score.to_doc(),
    }
    return _commit(board, actor, [(EventKind.RISK_SCORED, payload)], board.revision + 1)


def apply_category_score(
    board: Board,
    card_id: str,
    category: StrideCategory | str,
    likelihood: int,
    impact: int,
    kb: "KnowledgeBase",
    actor: str,
) -> Board:
    """Bulk-score every still-unscored risk of one STRIDE category on a card.

    Risks that already carry a per-threat score keep it. The mutation is
    accepted even when no risk matches; the event records the broadcast.
    """
    card = board.card(card_id)
    _require_column(board, card, (COL_RISKS,), "scoring")
    if not isinstance(category, StrideCategory):
        try:
            category = StrideCategory(category)
        except ValueError:
            raise DomainError(f"unknown STRIDE category {category!r}") from None
    score = compute_cri(likelihood, impact)
    fs = FactorSet.uniform(likelihood, impact)
    affected = [
        r.id
        for r in card.risks
        if r.score is None and kb.threat(r.threat_id).stride is category
    ]
    payload = {
        "card_id": card_id,
        "category": category.value,
        "factors": fs.to_doc(),
        "score": score.to_doc(),
        "risk_ids": affected,
    }
    return _commit(
        board, actor, [(EventKind.CATEGORY_SCORE_APPLIED, payload)], board.revision + 1
    )


def attach_controls(
    board: Board,
    card_id: str,
    risk_id: str,
    control_ids: Sequence[str],
    kb: "KnowledgeBase",
    actor: str,
) -> Board:
    """Select security controls for a scored risk."""
    card = board.card(card_id)
    _require_column(board, card, (COL_CONTROLS,), "control selection")
    risk = _require_risk(card, risk_id)
    if risk.score is None:
        raise DomainError(f"risk {risk_id!r} must be scored before controls are selected")
    if not control_ids:
        raise DomainError("no control ids given")
    for cid in control_ids:
        kb.control(cid)
    payload = {
        "card_id": card_id,
        "risk_id": risk_id,
        "control_ids": sorted(set(control_ids)),
    }
    return _commit(
        board, actor, [(EventKind.CONTROL_ATTACHED, payload)], board.revision + 1
    )


def set_roam(
    board: Board,
    card_id: str,
    risk_id: str,
    status: RoamStatus | str,
    actor: str,
    owner: str | None = None,
) -> Board:
    """Advance a risk's ROAM status.

    Owned requires an owner identity. Accepted and Mitigated require a score,
    and Accepted with no controls is only allowed for Low risks. Resolved
    eliminates the risk and its analysis from the card (the event log keeps
    the record).
    """
    card = board.card(card_id)
    _require_column(board, card, (COL_CONTROLS, COL_VALIDATION), "ROAM tracking")
    risk = _require_risk(card, risk_id)
    if not isinstance(status, RoamStatus):
        try:
            status = RoamStatus(status)
        except ValueError:
            raise DomainError(f"unknown ROAM status {status!r}") from None
    if status is RoamStatus.UNSET:
        raise DomainError("a risk cannot be reset to Unset")
    if status is RoamStatus.OWNED:
        if not owner or not owner.strip():
            raise DomainError("Owned requires an owner identity")
    elif owner is not None:
        raise DomainError(f"owner is only meaningful with Owned, not {status.value}")
    if status in (RoamStatus.ACCEPTED, RoamStatus.MITIGATED) and risk.score is None:
        raise DomainError(f"risk {risk_id!r} must be scored before it can be {status.value}")
    if (
        status is RoamStatus.ACCEPTED
        and not risk.controls
        and risk.score.level is not RiskLevel.LOW
    ):
        raise DomainError(
            f"accepting a {risk.score.level.value} risk with no selected controls is not allowed"
        )
    if status is RoamStatus.RESOLVED:
        payload = {
            "card_id": card_id,
            "risk_id": risk_id,
            "threat_id": risk.threat_id,
            "score": risk.score.to_doc() if risk.score else None,
            "controls": sorted(risk.controls),
        }
        return _commit(
            board, actor, [(EventKind.RISK_ELIMINATED, payload)], board.revision + 1
        )
    payload = {
        "card_id": card_id,
        "risk_id": risk_id,
        "status": status.value,
        "owner": owner,
    }
    return _commit(board, actor, [(EventKind.ROAM_SET, payload)], board.revision + 1)


def mark_deferred(
    board: Board, card_id: str, risk_id: str, deferred: bool, actor: str
) -> Board:
    """Flag a risk as deferred (movement gates skip it) or surface it again.

    Surfacing is gated by the card's column so the movement invariants stay
    intact: past 'Risks definition' the risk must be scored, and in
    'Validation' it must also carry a control (or be an accepted Low risk).
    """
    card = board.card(card_id)
    risk = _require_risk(card, risk_id)
    if risk.deferred == deferred:
        state = "deferred" if deferred else "not deferred"
        raise DomainError(f"risk {risk_id!r} is already {state}")
    if not deferred:
        controls_at = board.definition.column_index(COL_CONTROLS)
        terminal = _terminal_index(board)
        if controls_at is not None and card.column_index >= controls_at:
            if risk.score is None:
                raise DomainError(
                    f"cannot surface unscored risk {risk_id!r} in "
                    f"{board.column_name(card.column_index)!r}; move the card back first"
                )
        if card.column_index == terminal:
            accepted_low = (
                risk.roam is RoamStatus.ACCEPTED
                and risk.score is not None
                and risk.score.level is RiskLevel.LOW
            )
            if not risk.controls and not accepted_low:
                raise DomainError(
                    f"cannot surface uncontrolled risk {risk_id!r} in "
                    f"{board.column_name(card.column_index)!r}; move the card back first"
                )
    kind = EventKind.DEFERRED if deferred else EventKind.UNDEFERRED
    payload = {"card_id": card_id, "risk_id": risk_id}
    return _commit(board, actor, [(kind, payload)], board.revision + 1)


def attest_no_threats(board: Board, card_id: str, note: str, actor: str) -> Board:
    """Record a signed statement that a card genuinely has no applicable
    threats, satisfying the empty-card gate into the final column."""
    board.card(card_id)
    if not note or not note.strip():
        raise DomainError("attestation requires a justification note")
    payload = {"card_id": card_id, "note": note}
    return _commit(
        board, actor, [(EventKind.NO_THREAT_ATTESTED, payload)], board.revision + 1
    )


def move_card(
    board: Board,
    card_id: str,
    to_index: int,
    actor: str,
    ruleset: Sequence[Rule],
    approvals: Iterable[str] = (),
) -> tuple[Board, Verdict]:
    """Request a card movement and put it to the rule set.

    Approved moves bump the revision; rejected ones leave the board unchanged
    apart from an audit MoveRejected event and return the full verdict.
    """
    card = board.card(card_id)
    if not 0 <= to_index < len(board.definition.columns):
        raise NotFoundError(f"no column with index {to_index}")
    if to_index == card.column_index:
        raise DomainError(f"card {card_id!r} is already in {board.column_name(to_index)!r}")
    request = MovementRequest(
        card_id=card_id,
        from_index=card.column_index,
        to_index=to_index,
        actor=actor,
        approvals=frozenset(approvals),
    )
    verdict = evaluate_movement(request, ruleset, board)
    if verdict.approved:
        payload = {
            "card_id": card_id,
            "from_index": request.from_index,
            "to_index": to_index,
        }
        new = _commit(board, actor, [(EventKind.CARD_MOVED, payload)], board.revision + 1)
        return new, verdict
    payload = {
        "card_id": card_id,
        "from_index": request.from_index,
        "to_index": to_index,
        "failures": [f.to_doc() for f in verdict.failures],
    }
    ts = _utc_now()
    rejected = Event(
        sequence=board.next_sequence(),
        timestamp=ts,
        actor=actor,
        kind=EventKind.MOVE_REJECTED,
        payload=payload,
        revision=board.revision,
    )
    return apply_events(board, [rejected]), verdict


# --- persistence documents ----------------------------------------------------


def board_to_doc(board: Board) -> dict:
    return {
        "board_version": BOARD_VERSION,
        "definition": board.definition.to_doc(),
        "cards": [card.to_doc() for card in board.cards.values()],
        "revision": board.revision,
    }


def board_from_doc(doc: Mapping) -> Board:
    if not isinstance(doc, Mapping):
        raise SchemaError("board document must be an object")
    if doc.get("board_version") != BOARD_VERSION:
        raise SchemaError(f"unsupported board_version {doc.get('board_version')!r}")
    definition = BoardDefinition.from_doc(doc["definition"])
    board = Board(definition=definition, revision=int(doc.get("revision", 0)))
    for cdoc in doc.get("cards", ()):
        card = AssetCard.from_doc(cdoc)
        if not 0 <= card.column_index < len(definition.columns):
            raise SchemaError(f"card {card.id!r} sits in a nonexistent column")
        if card.id in board.cards:
            raise SchemaError(f"duplicate card id {card.id!r}")
        board.cards[card.id] = card
    return board
