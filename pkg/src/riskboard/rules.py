"""Movement approval: declarative rules evaluated against board snapshots.

A rule guards entry into one column (or any forward move) with a single
condition from a closed vocabulary. Conditions are answered through small
queries over the card under evaluation, so what a rule needs to know and how
it is collected stay separated. Evaluation is pure: same request, same rules,
same board, same verdict.

Backward moves are always approved without evaluation; the methodology only
constrains forward progress. Deferred risks are invisible to the gate
conditions, except the emptiness check behind the attestation rule, which
counts them so a card with only deferred risks never passes as "no threats".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Sequence

from .domain import RiskLevel, RoamStatus
from .errors import NotFoundError, SchemaError

if TYPE_CHECKING:
    from .board import AssetCard, Board

ANY_COLUMN = "any"


class ConditionType(str, Enum):
    MAX_FORWARD_STEP = "max_forward_step"
    ALL_RISKS_SCORED = "all_risks_scored"
    ALL_RISKS_CONTROLLED = "all_risks_controlled"
    ALL_ROAM_IN = "all_roam_in"
    REQUIRES_ATTESTATION_IF_EMPTY = "requires_attestation_if_empty"
    APPROVAL_BY = "approval_by"


@dataclass(frozen=True)
class Condition:
    type: ConditionType
    k: int | None = None
    statuses: frozenset[RoamStatus] | None = None
    identity: str | None = None

    def __post_init__(self) -> None:
        if self.type is ConditionType.MAX_FORWARD_STEP:
            if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
                raise SchemaError("max_forward_step requires k >= 1")
        elif self.type is ConditionType.ALL_ROAM_IN:
            if not self.statuses:
                raise SchemaError("all_roam_in requires a non-empty status set")
        elif self.type is ConditionType.APPROVAL_BY:
            if not self.identity or not self.identity.strip():
                raise SchemaError("approval_by requires an identity")

    def to_doc(self) -> dict:
        doc: dict = {"type": self.type.value}
        if self.type is ConditionType.MAX_FORWARD_STEP:
            doc["k"] = self.k
        elif self.type is ConditionType.ALL_ROAM_IN:
            doc["statuses"] = sorted(s.value for s in self.statuses)
        elif self.type is ConditionType.APPROVAL_BY:
            doc["identity"] = self.identity
        return doc

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Condition":
        if not isinstance(doc, Mapping) or "type" not in doc:
            raise SchemaError("condition must be an object with a 'type'")
        try:
            ctype = ConditionType(doc["type"])
        except ValueError:
            raise SchemaError(f"unknown condition type {doc['type']!r}") from None
        kwargs: dict = {}
        if ctype is ConditionType.MAX_FORWARD_STEP:
            kwargs["k"] = doc.get("k")
        elif ctype is ConditionType.ALL_ROAM_IN:
            try:
                kwargs["statuses"] = frozenset(
                    RoamStatus(s) for s in doc.get("statuses", ())
                )
            except ValueError as exc:
                raise SchemaError(f"bad ROAM status in condition: {exc}") from None
        elif ctype is ConditionType.APPROVAL_BY:
            kwargs["identity"] = doc.get("identity")
        return cls(type=ctype, **kwargs)


@dataclass(frozen=True)
class Rule:
    """One guard: when a card is about to enter ``target`` (or move at all,
    for "any"), ``condition`` must hold; ``message`` templates the
    justification shown on failure."""

    id: str
    target: str
    condition: Condition
    message: str

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "target": self.target,
            "condition": self.condition.to_doc(),
            "message": self.message,
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Rule":
        for key in ("id", "target", "condition", "message"):
            if key not in doc:
                raise SchemaError(f"rule missing {key!r}")
        return cls(
            id=doc["id"],
            target=doc["target"],
            condition=Condition.from_doc(doc["condition"]),
            message=doc["message"],
        )


@dataclass(frozen=True)
class MovementRequest:
    card_id: str
    from_index: int
    to_index: int
    actor: str
    approvals: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.from_index < 0 or self.to_index < 0:
            raise SchemaError("column indices must be non-negative")
        if self.from_index == self.to_index:
            raise SchemaError("movement source and target must differ")


@dataclass(frozen=True)
class RuleFailure:
    rule_id: str
    justification: str
    offending: tuple[str, ...] = ()

    def to_doc(self) -> dict:
        return {
            "rule": self.rule_id,
            "justification": self.justification,
            "offending": list(self.offending),
        }


@dataclass(frozen=True)
class Verdict:
    approved: bool
    failures: tuple[RuleFailure, ...] = ()

    def __post_init__(self) -> None:
        if self.approved != (not self.failures):
            raise SchemaError("a verdict is approved exactly when nothing failed")

    def to_doc(self) -> dict:
        return {
            "approved": self.approved,
            "failures": [f.to_doc() for f in self.failures],
        }


class QuerySelector(str, Enum):
    RISKS_WITHOUT_SCORE = "RisksWithoutScore"
    SCORED_RISKS_WITHOUT_CONTROLS = "ScoredRisksWithoutControls"
    RISKS_WITH_ROAM_NOT_IN = "RisksWithRoamNotIn"
    RISK_COUNT = "RiskCount"
    ATTESTATION_PRESENT = "AttestationPresent"


@dataclass(frozen=True)
class Query:
    """One read against the board store, scoped to a card."""

    card_id: str
    selector: QuerySelector
    statuses: frozenset[RoamStatus] | None = None
    include_deferred: bool = False


def generate_query(condition: Condition, request: MovementRequest) -> list[Query]:
    """Map a condition onto the minimal queries that decide it.

    MaxForwardStep and ApprovalBy are decidable from the request alone. The
    emptiness check includes deferred risks on purpose: deferral hides a risk
    from the gates, it does not make the card threat-free.
    """
    card_id = request.card_id
    ctype = condition.type
    if ctype in (ConditionType.MAX_FORWARD_STEP, ConditionType.APPROVAL_BY):
        return []
    if ctype is ConditionType.ALL_RISKS_SCORED:
        return [Query(card_id, QuerySelector.RISKS_WITHOUT_SCORE)]
    if ctype is ConditionType.ALL_RISKS_CONTROLLED:
        return [Query(card_id, QuerySelector.SCORED_RISKS_WITHOUT_CONTROLS)]
    if ctype is ConditionType.ALL_ROAM_IN:
        return [
            Query(
                card_id,
                QuerySelector.RISKS_WITH_ROAM_NOT_IN,
                statuses=condition.statuses,
            )
        ]
    if ctype is ConditionType.REQUIRES_ATTESTATION_IF_EMPTY:
        return [
            Query(card_id, QuerySelector.RISK_COUNT, include_deferred=True),
            Query(card_id, QuerySelector.ATTESTATION_PRESENT),
        ]
    raise SchemaError(f"no query mapping for condition {ctype}")  # pragma: no cover


def execute_query(board: "Board", query: Query) -> list[str] | int | bool:
    """Answer one query against a board snapshot. Purely mechanical: policy
    (exceptions, thresholds) stays in the conditions."""
    card = board.card(query.card_id)
    risks = [r for r in card.risks if query.include_deferred or not r.deferred]
    sel = query.selector
    if sel is QuerySelector.RISKS_WITHOUT_SCORE:
        return [r.id for r in risks if r.score is None]
    if sel is QuerySelector.SCORED_RISKS_WITHOUT_CONTROLS:
        return [r.id for r in risks if r.score is not None and not r.controls]
    if sel is QuerySelector.RISKS_WITH_ROAM_NOT_IN:
        allowed = query.statuses or frozenset()
        return [r.id for r in risks if r.roam not in allowed]
    if sel is QuerySelector.RISK_COUNT:
        return len(risks)
    if sel is QuerySelector.ATTESTATION_PRESENT:
        return card.no_threat_attestation is not None
    raise SchemaError(f"unhandled selector {sel}")  # pragma: no cover


def _check_condition(
    condition: Condition, request: MovementRequest, board: "Board", card: "AssetCard"
) -> tuple[str, ...] | None:
    """None when the condition holds, else the offending element ids."""
    ctype = condition.type
    if ctype is ConditionType.MAX_FORWARD_STEP:
        if request.to_index - request.from_index > condition.k:
            return ()
        return None
    if ctype is ConditionType.APPROVAL_BY:
        if condition.identity not in request.approvals:
            return ()
        return None

    answers = {
        q.selector: execute_query(board, q)
        for q in generate_query(condition, request)
    }
    if ctype is ConditionType.ALL_RISKS_SCORED:
        ids = answers[QuerySelector.RISKS_WITHOUT_SCORE]
        return tuple(ids) if ids else None
    if ctype is ConditionType.ALL_RISKS_CONTROLLED:
        ids = []
        for risk_id in answers[QuerySelector.SCORED_RISKS_WITHOUT_CONTROLS]:
            risk = card.risk(risk_id)
            # Accepted Low-level risks may consciously stay uncontrolled.
            if risk.roam is RoamStatus.ACCEPTED and risk.score.level is RiskLevel.LOW:
                continue
            ids.append(risk_id)
        return tuple(ids) if ids else None
    if ctype is ConditionType.ALL_ROAM_IN:
        ids = answers[QuerySelector.RISKS_WITH_ROAM_NOT_IN]
        return tuple(ids) if ids else None
    if ctype is ConditionType.REQUIRES_ATTESTATION_IF_EMPTY:
        empty = answers[QuerySelector.RISK_COUNT] == 0
        if empty and not answers[QuerySelector.ATTESTATION_PRESENT]:
            return ()
        return None
    raise SchemaError(f"unhandled condition {ctype}")  # pragma: no cover


def _justify(rule: Rule, request: MovementRequest, board: "Board",
             offending: tuple[str, ...]) -> str:
    context = {
        "card_id": request.card_id,
        "from_column": board.definition.columns[request.from_index],
        "to_column": board.definition.columns[request.to_index],
        "offending": ", ".join(offending) if offending else "none",
        "k": rule.condition.k,
        "identity": rule.condition.identity,
    }
    try:
        return rule.message.format(**context)
    except (KeyError, IndexError):
        return rule.message


def evaluate_movement(
    request: MovementRequest, rules: Sequence[Rule], board: "Board"
) -> Verdict:
    """Judge one movement request against a rule set and a board snapshot.

    Backward moves are approved outright. Forward moves run every rule
    scoped to the target column plus every "any"-scoped rule; the verdict
    carries one failure per violated rule, each with its justification and
    the offending element ids.
    """
    card = board.card(request.card_id)  # unknown card: an error, not a rejection
    for index in (request.from_index, request.to_index):
        if not 0 <= index < len(board.definition.columns):
            raise NotFoundError(f"no column with index {index}")
    if request.to_index < request.from_index:
        return Verdict(approved=True)

    target_column = board.definition.columns[request.to_index]
    failures = []
    for rule in rules:
        if rule.target != ANY_COLUMN and rule.target != target_column:
            continue
        offending = _check_condition(rule.condition, request, board, card)
        if offending is None:
            continue
        failures.append(
            RuleFailure(
                rule_id=rule.id,
                justification=_justify(rule, request, board, offending),
                offending=offending,
            )
        )
    return Verdict(approved=not failures, failures=tuple(failures))


def default_ruleset() -> list[Rule]:
    """The methodology's stock rule set: no skipping, everything scored
    before mitigation, everything controlled and Accepted/Mitigated before
    validation, and empty cards only with an attestation."""
    from .board import COL_CONTROLS, COL_VALIDATION  # late: avoids import cycle

    return [
        Rule(
            id="no-skip",
            target=ANY_COLUMN,
            condition=Condition(ConditionType.MAX_FORWARD_STEP, k=1),
            message=(
                "cards advance one column at a time; '{from_column}' to "
                "'{to_column}' skips ahead"
            ),
        ),
        Rule(
            id="risks-scored",
            target=COL_CONTROLS,
            condition=Condition(ConditionType.ALL_RISKS_SCORED),
            message=(
                "cannot enter '{to_column}' while risks are still unscored: "
                "{offending}"
            ),
        ),
        Rule(
            id="risks-controlled",
            target=COL_VALIDATION,
            condition=Condition(ConditionType.ALL_RISKS_CONTROLLED),
            message=(
                "cannot enter '{to_column}' while risks lack a security "
                "control: {offending}"
            ),
        ),
        Rule(
            id="roam-complete",
            target=COL_VALIDATION,
            condition=Condition(
                ConditionType.ALL_ROAM_IN,
                statuses=frozenset({RoamStatus.ACCEPTED, RoamStatus.MITIGATED}),
            ),
            message=(
                "cannot enter '{to_column}' while risks are neither Accepted "
                "nor Mitigated: {offending}"
            ),
        ),
        Rule(
            id="attestation-required",
            target=COL_VALIDATION,
            condition=Condition(ConditionType.REQUIRES_ATTESTATION_IF_EMPTY),
            message=(
                "cannot enter '{to_column}': the card has no recorded risks "
                "and no no-threat attestation"
            ),
        ),
    ]


def ruleset_to_doc(rules: Sequence[Rule]) -> dict:
    return {"rules": [r.to_doc() for r in rules]}


def ruleset_from_doc(doc: Mapping) -> list[Rule]:
    if not isinstance(doc, Mapping) or not isinstance(doc.get("rules"), list):
        raise SchemaError("rule set document must be {'rules': [...]}")
    rules = [Rule.from_doc(rdoc) for rdoc in doc["rules"]]
    seen = set()
    for rule in rules:
        if rule.id in seen:
            raise SchemaError(f"duplicate rule id {rule.id!r}")
        seen.add(rule.id)
    return rules
