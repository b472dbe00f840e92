"""Risk-assessment report generation and rendering.

A report is a pure projection of (board, event log): per-card sections with
every live risk's scoring, ROAM status, controls and deferral flag, the risks
eliminated along the way (recovered from the event log, since elimination
removes them from cards), and board-level summary counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .board import Board, Event, EventKind
from .domain import RiskLevel, RoamStatus
from .errors import SchemaError
from .knowledge import KnowledgeBase, load_default_knowledge_base

REPORT_VERSION = 1

_ROAM_ORDER = ("Unset", "Owned", "Accepted", "Mitigated")
_LEVEL_ORDER = ("Low", "Medium", "High")


@dataclass(frozen=True)
class ControlRef:
    id: str
    title: str
    ccm_ids: tuple[str, ...]

    def to_doc(self) -> dict:
        return {"id": self.id, "title": self.title, "ccm_ids": list(self.ccm_ids)}


@dataclass(frozen=True)
class RiskLine:
    risk_id: str
    threat_id: str
    threat_title: str
    stride: str | None
    likelihood: int | None
    impact: int | None
    cri: int | None
    level: str | None
    roam: str
    roam_owner: str | None
    controls: tuple[ControlRef, ...]
    deferred: bool

    def to_doc(self) -> dict:
        return {
            "risk_id": self.risk_id,
            "threat_id": self.threat_id,
            "threat_title": self.threat_title,
            "stride": self.stride,
            "likelihood": self.likelihood,
            "impact": self.impact,
            "cri": self.cri,
            "level": self.level,
            "roam": self.roam,
            "roam_owner": self.roam_owner,
            "controls": [c.to_doc() for c in self.controls],
            "deferred": self.deferred,
        }


@dataclass(frozen=True)
class EliminatedRisk:
    risk_id: str
    threat_id: str
    threat_title: str
    cri: int | None
    level: str | None
    controls: tuple[str, ...]

    def to_doc(self) -> dict:
        return {
            "risk_id": self.risk_id,
            "threat_id": self.threat_id,
            "threat_title": self.threat_title,
            "cri": self.cri,
            "level": self.level,
            "controls": list(self.controls),
        }


@dataclass(frozen=True)
class CardSection:
    card_id: str
    name: str
    column: str
    fully_addressed: bool
    attestation: Mapping | None
    risks: tuple[RiskLine, ...]
    eliminated: tuple[EliminatedRisk, ...]

    def to_doc(self) -> dict:
        return {
            "card_id": self.card_id,
            "name": self.name,
            "column": self.column,
            "fully_addressed": self.fully_addressed,
            "attestation": dict(self.attestation) if self.attestation else None,
            "risks": [r.to_doc() for r in self.risks],
            "eliminated": [e.to_doc() for e in self.eliminated],
        }


@dataclass(frozen=True)
class RiskReport:
    board: str
    generated_at: str | None
    cards: tuple[CardSection, ...]
    summary: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "board": self.board,
            "generated_at": self.generated_at,
            "cards": [c.to_doc() for c in self.cards],
            "summary": self.summary,
        }


def _threat_labels(kb: KnowledgeBase | None, threat_id: str) -> tuple[str, str | None]:
    if kb is not None and threat_id in kb.threats:
        entry = kb.threats[threat_id]
        return entry.title, entry.stride.value
    return threat_id, None


def _control_ref(kb: KnowledgeBase | None, control_id: str) -> ControlRef:
    if kb is not None and control_id in kb.controls:
        entry = kb.controls[control_id]
        return ControlRef(id=entry.id, title=entry.title, ccm_ids=entry.ccm_ids)
    return ControlRef(id=control_id, title=control_id, ccm_ids=())


def generate_report(
    board: Board,
    event_log: Sequence[Event] | None = None,
    kb: KnowledgeBase | None = None,
    generated_at: str | None = None,
) -> RiskReport:
    """Project a board (at any state) into a report.

    Deterministic: given the same board and log the same report comes out;
    the timestamp defaults to the last event's rather than the wall clock.
    """
    events = board.events if event_log is None else list(event_log)
    if kb is None:
        kb = load_default_knowledge_base()
    if generated_at is None and events:
        generated_at = events[-1].timestamp

    eliminated_by_card: dict[str, list[EliminatedRisk]] = {}
    for ev in events:
        if ev.kind is not EventKind.RISK_ELIMINATED:
            continue
        p = ev.payload
        title, _ = _threat_labels(kb, p["threat_id"])
        score = p.get("score") or {}
        eliminated_by_card.setdefault(p["card_id"], []).append(
            EliminatedRisk(
                risk_id=p["risk_id"],
                threat_id=p["threat_id"],
                threat_title=title,
                cri=score.get("cri"),
                level=score.get("level"),
                controls=tuple(p.get("controls", ())),
            )
        )

    sections = []
    roam_counts: dict[str, int] = {}
    level_counts: dict[str, int] = {}
    column_counts: dict[str, int] = {}
    for card in board.cards.values():
        column = board.column_name(card.column_index)
        column_counts[column] = column_counts.get(column, 0) + 1
        lines = []
        for risk in card.risks:
            title, stride = _threat_labels(kb, risk.threat_id)
            score = risk.score
            lines.append(
                RiskLine(
                    risk_id=risk.id,
                    threat_id=risk.threat_id,
                    threat_title=title,
                    stride=stride,
                    likelihood=score.likelihood if score else None,
                    impact=score.impact if score else None,
                    cri=score.cri if score else None,
                    level=score.level.value if score else None,
                    roam=risk.roam.value,
                    roam_owner=risk.roam_owner,
                    controls=tuple(
                        _control_ref(kb, cid) for cid in sorted(risk.controls)
                    ),
                    deferred=risk.deferred,
                )
            )
            roam_counts[risk.roam.value] = roam_counts.get(risk.roam.value, 0) + 1
            if score is not None:
                level_counts[score.level.value] = (
                    level_counts.get(score.level.value, 0) + 1
                )
        sections.append(
            CardSection(
                card_id=card.id,
                name=card.name,
                column=column,
                fully_addressed=card.fully_addressed,
                attestation=card.no_threat_attestation,
                risks=tuple(lines),
                eliminated=tuple(eliminated_by_card.get(card.id, ())),
            )
        )

    summary = {
        "columns": {
            c: column_counts[c] for c in board.definition.columns if c in column_counts
        },
        "roam": {r: roam_counts[r] for r in _ROAM_ORDER if r in roam_counts},
        "levels": {l: level_counts[l] for l in _LEVEL_ORDER if l in level_counts},
    }
    return RiskReport(
        board=board.definition.name,
        generated_at=generated_at,
        cards=tuple(sections),
        summary=summary,
    )


def report_from_doc(doc: Mapping) -> RiskReport:
    if not isinstance(doc, Mapping) or doc.get("report_version") != REPORT_VERSION:
        raise SchemaError(f"unsupported report_version {doc.get('report_version')!r}")
    cards = []
    for cdoc in doc.get("cards", ()):
        risks = tuple(
            RiskLine(
                risk_id=r["risk_id"],
                threat_id=r["threat_id"],
                threat_title=r["threat_title"],
                stride=r.get("stride"),
                likelihood=r.get("likelihood"),
                impact=r.get("impact"),
                cri=r.get("cri"),
                level=r.get("level"),
                roam=r["roam"],
                roam_owner=r.get("roam_owner"),
                controls=tuple(
                    ControlRef(c["id"], c["title"], tuple(c["ccm_ids"]))
                    for c in r.get("controls", ())
                ),
                deferred=bool(r.get("deferred", False)),
            )
            for r in cdoc.get("risks", ())
        )
        eliminated = tuple(
            EliminatedRisk(
                risk_id=e["risk_id"],
                threat_id=e["threat_id"],
                threat_title=e["threat_title"],
                cri=e.get("cri"),
                level=e.get("level"),
                controls=tuple(e.get("controls", ())),
            )
            for e in cdoc.get("eliminated", ())
        )
        cards.append(
            CardSection(
                card_id=cdoc["card_id"],
                name=cdoc["name"],
                column=cdoc["column"],
                fully_addressed=bool(cdoc["fully_addressed"]),
                attestation=cdoc.get("attestation"),
                risks=risks,
                eliminated=eliminated,
            )
        )
    return RiskReport(
        board=doc["board"],
        generated_at=doc.get("generated_at"),
        cards=tuple(cards),
        summary=dict(doc.get("summary", {})),
    )


def _render_markdown(report: RiskReport) -> str:
    out = [f"# Risk assessment report: {report.board}", ""]
    if report.generated_at:
        out += [f"Generated: {report.generated_at}", ""]
    for card in report.cards:
        out += [f"## {card.name} ({card.column})", ""]
        out.append(f"- fully addressed: {'yes' if card.fully_addressed else 'no'}")
        if card.attestation:
            att = card.attestation
            out.append(
                f"- no-threat attestation by {att.get('actor', '?')}: "
                f"{att.get('note', '')}"
            )
        out.append("")
        if card.risks:
            out.append("### Risks")
            out.append("")
            for r in card.risks:
                stride = f" [{r.stride}]" if r.stride else ""
                flags = " (deferred)" if r.deferred else ""
                out.append(f"- `{r.risk_id}` {r.threat_title}{stride}{flags}")
                if r.cri is not None:
                    out.append(
                        f"  - likelihood {r.likelihood}, impact {r.impact}, "
                        f"CRI {r.cri}, level {r.level}"
                    )
                else:
                    out.append("  - not scored")
                owner = f" (owner: {r.roam_owner})" if r.roam_owner else ""
                out.append(f"  - ROAM: {r.roam}{owner}")
                if r.controls:
                    rendered = ", ".join(
                        f"{c.id} [{', '.join(c.ccm_ids)}]" if c.ccm_ids else c.id
                        for c in r.controls
                    )
                    out.append(f"  - controls: {rendered}")
                else:
                    out.append("  - controls: none")
            out.append("")
        if card.eliminated:
            out.append("### Eliminated")
            out.append("")
            for e in card.eliminated:
                score = f"CRI {e.cri} ({e.level})" if e.cri is not None else "unscored"
                controls = ", ".join(e.controls) if e.controls else "none"
                out.append(
                    f"- `{e.risk_id}` {e.threat_title}: {score} at elimination; "
                    f"controls: {controls}"
                )
            out.append("")
    out.append("## Summary")
    out.append("")
    for label, key in (("cards per column", "columns"), ("risks per ROAM status", "roam"), ("risks per level", "levels")):
        counts = report.summary.get(key, {})
        rendered = ", ".join(f"{k}: {v}" for k, v in counts.items()) or "none"
        out.append(f"- {label}: {rendered}")
    out.append("")
    return "\n".join(out)


def render_report(report: RiskReport, format: str = "json") -> str:
    fmt = format.lower()
    if fmt in ("json",):
        return json.dumps(report.to_doc(), indent=2) + "\n"
    if fmt in ("md", "markdown"):
        return _render_markdown(report)
    raise SchemaError(f"unknown report format {format!r}")
