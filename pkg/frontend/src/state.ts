// Board view model. Everything here derives from API snapshots and the event
// stream; the client never decides a move on its own, it only renders what
// the server confirmed (plus one optimistic lane change that snaps back when
// the verdict says no).

import type { BoardDoc, CardDoc, EventDoc, RiskDoc, RuleFailureDoc } from "./api.js";
import { criLevel, type Level } from "./scoring.js";

export interface RiskView {
  id: string;
  threatId: string;
  factors: Record<string, number[]> | null;
  likelihood: number | null;
  impact: number | null;
  cri: number | null;
  level: Level | null;
  roam: string;
  roamOwner: string | null;
  controls: string[];
  deferred: boolean;
  impactPrefill: { technical?: number[]; business?: number[] } | null;
}

export interface CardView {
  id: string;
  name: string;
  assetType: string;
  description: string;
  columnIndex: number;
  risks: RiskView[];
  attestation: { actor: string; note: string; timestamp: string } | null;
  fullyAddressed: boolean;
}

export interface FeedEntry {
  sequence: number;
  kind: string;
  summary: string;
}

export interface Warning {
  cardId: string;
  failures: RuleFailureDoc[];
}

export type Connection = "offline" | "connecting" | "live";

export interface BoardState {
  boardId: string;
  name: string;
  columns: string[];
  cards: Record<string, CardView>;
  order: string[];
  revision: number;
  lastSequence: number;
  connection: Connection;
  feed: FeedEntry[];
  warnings: Record<string, Warning>;
  selectedCard: string | null;
}

const FEED_LIMIT = 50;

function riskView(doc: RiskDoc): RiskView {
  return {
    id: doc.id,
    threatId: doc.threat_id,
    factors: doc.factors as Record<string, number[]> | null,
    likelihood: doc.score?.likelihood ?? null,
    impact: doc.score?.impact ?? null,
    cri: doc.score?.cri ?? null,
    level: (doc.score?.level as Level | undefined) ?? null,
    roam: doc.roam,
    roamOwner: doc.roam_owner,
    controls: [...doc.controls],
    deferred: doc.deferred,
    impactPrefill: doc.impact_prefill,
  };
}

function cardView(doc: CardDoc): CardView {
  return {
    id: doc.id,
    name: doc.name,
    assetType: doc.asset_type,
    description: doc.description,
    columnIndex: doc.column_index,
    risks: doc.risks.map(riskView),
    attestation: doc.no_threat_attestation,
    fullyAddressed: doc.fully_addressed,
  };
}

export function stateFromSnapshot(boardId: string, doc: BoardDoc): BoardState {
  const cards: Record<string, CardView> = {};
  const order: string[] = [];
  for (const card of doc.cards) {
    cards[card.id] = cardView(card);
    order.push(card.id);
  }
  return {
    boardId,
    name: doc.definition.name,
    columns: [...doc.definition.columns],
    cards,
    order,
    revision: doc.revision,
    lastSequence: 0,
    connection: "offline",
    feed: [],
    warnings: {},
    selectedCard: null,
  };
}

// Replacing card state wholesale (after a refetch) must not lose the stream
// position or the user's selection.
export function replaceSnapshot(state: BoardState, doc: BoardDoc): void {
  const fresh = stateFromSnapshot(state.boardId, doc);
  state.name = fresh.name;
  state.columns = fresh.columns;
  state.cards = fresh.cards;
  state.order = fresh.order;
  state.revision = fresh.revision;
  if (state.selectedCard && !state.cards[state.selectedCard]) {
    state.selectedCard = null;
  }
}

export function highestLevel(card: CardView): Level | null {
  const ranks: Record<Level, number> = { Low: 1, Medium: 2, High: 3 };
  let best: Level | null = null;
  for (const risk of card.risks) {
    if (risk.level && (!best || ranks[risk.level] > ranks[best])) {
      best = risk.level;
    }
  }
  return best;
}

function refreshFullyAddressed(state: BoardState, card: CardView): void {
  const terminal = state.columns.length - 1;
  const live = card.risks.filter((r) => !r.deferred);
  const done = live.every((r) => r.roam === "Accepted" || r.roam === "Mitigated");
  card.fullyAddressed =
    card.columnIndex === terminal &&
    done &&
    (card.risks.length > 0 || card.attestation !== null);
}

function feedSummary(event: EventDoc): string {
  const p = event.payload;
  switch (event.kind) {
    case "CardImported":
      return `card ${p.card?.id} imported`;
    case "CardMoved":
      return `${p.card_id} moved to column ${p.to_index}`;
    case "MoveRejected":
      return `${p.card_id} move rejected (${(p.failures ?? [])
        .map((f: RuleFailureDoc) => f.rule)
        .join(", ")})`;
    case "ThreatAttached":
      return `${p.risk_id} attached (${p.threat_id})`;
    case "RiskScored":
      return `${p.risk_id} scored CRI ${p.score?.cri}`;
    case "CategoryScoreApplied":
      return `${p.category} scored on ${p.card_id}`;
    case "ControlAttached":
      return `${p.risk_id} controls ${(p.control_ids ?? []).join(", ")}`;
    case "RoamSet":
      return `${p.risk_id} set to ${p.status}`;
    case "RiskEliminated":
      return `${p.risk_id} eliminated`;
    case "Deferred":
      return `${p.risk_id} deferred`;
    case "Undeferred":
      return `${p.risk_id} surfaced`;
    case "NoThreatAttested":
      return `${p.card_id} attested no threats`;
    case "CardValidated":
      return `${p.card_id} fully addressed`;
    default:
      return event.kind;
  }
}

// Folds one stream event into the view. Returns false for events already
// seen (the replay after a reconnect overlaps by design).
export function applyEvent(state: BoardState, event: EventDoc): boolean {
  if (event.sequence <= state.lastSequence) return false;
  state.lastSequence = event.sequence;
  // Replays start from sequence zero under a snapshot that may already be
  // newer, so the revision only ever moves forward.
  state.revision = Math.max(state.revision, event.revision);
  state.feed.unshift({
    sequence: event.sequence,
    kind: event.kind,
    summary: feedSummary(event),
  });
  if (state.feed.length > FEED_LIMIT) state.feed.length = FEED_LIMIT;

  const p = event.payload;
  const card: CardView | undefined = state.cards[p.card_id ?? p.card?.id];
  const risk = (id: string) => card?.risks.find((r) => r.id === id);

  switch (event.kind) {
    case "BoardCreated":
      break;
    case "CardImported":
      if (!state.cards[p.card.id]) {
        state.cards[p.card.id] = {
          id: p.card.id,
          name: p.card.name,
          assetType: p.card.asset_type,
          description: p.card.description ?? "",
          columnIndex: 0,
          risks: [],
          attestation: null,
          fullyAddressed: false,
        };
        state.order.push(p.card.id);
      }
      break;
    case "CardMoved":
      if (card) card.columnIndex = p.to_index;
      break;
    case "MoveRejected":
      break; // audit entry only; the warning surfaces via the command response
    case "ThreatAttached":
      if (card && !risk(p.risk_id)) {
        card.risks.push({
          id: p.risk_id,
          threatId: p.threat_id,
          factors: null,
          likelihood: null,
          impact: null,
          cri: null,
          level: null,
          roam: "Unset",
          roamOwner: null,
          controls: [],
          deferred: false,
          impactPrefill: p.impact_prefill ?? null,
        });
      }
      break;
    case "RiskScored": {
      const r = risk(p.risk_id);
      if (r) scoreRisk(r, p);
      break;
    }
    case "CategoryScoreApplied":
      for (const riskId of p.risk_ids ?? []) {
        const r = risk(riskId);
        if (r) scoreRisk(r, p);
      }
      break;
    case "ControlAttached": {
      const r = risk(p.risk_id);
      if (r) {
        for (const id of p.control_ids ?? []) {
          if (!r.controls.includes(id)) r.controls.push(id);
        }
        r.controls.sort();
      }
      break;
    }
    case "RoamSet": {
      const r = risk(p.risk_id);
      if (r) {
        r.roam = p.status;
        r.roamOwner = p.owner ?? null;
      }
      break;
    }
    case "RiskEliminated":
      if (card) card.risks = card.risks.filter((r) => r.id !== p.risk_id);
      break;
    case "Deferred": {
      const r = risk(p.risk_id);
      if (r) r.deferred = true;
      break;
    }
    case "Undeferred": {
      const r = risk(p.risk_id);
      if (r) r.deferred = false;
      break;
    }
    case "NoThreatAttested":
      if (card) {
        card.attestation = {
          actor: event.actor,
          note: p.note,
          timestamp: event.timestamp,
        };
      }
      break;
    case "CardValidated":
      break; // recomputed below
    default:
      break; // unknown kinds stay in the feed only
  }

  if (card) refreshFullyAddressed(state, card);
  return true;
}

function scoreRisk(r: RiskView, payload: Record<string, any>): void {
  r.factors = payload.factors ?? null;
  r.likelihood = payload.score?.likelihood ?? null;
  r.impact = payload.score?.impact ?? null;
  r.cri = payload.score?.cri ?? null;
  r.level = r.cri === null ? null : criLevel(r.cri);
}

// Optimistic drag support: move the card immediately, remember where it came
// from, and snap it back when the server rejects the move.
export function optimisticMove(state: BoardState, cardId: string, toIndex: number): number {
  const card = state.cards[cardId];
  const origin = card.columnIndex;
  card.columnIndex = toIndex;
  return origin;
}

export function snapBack(
  state: BoardState,
  cardId: string,
  originIndex: number,
  failures: RuleFailureDoc[],
): void {
  const card = state.cards[cardId];
  card.columnIndex = originIndex;
  refreshFullyAddressed(state, card);
  state.warnings[cardId] = { cardId, failures };
}

export function clearWarning(state: BoardState, cardId: string): void {
  delete state.warnings[cardId];
}
