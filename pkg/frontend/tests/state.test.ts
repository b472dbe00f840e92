import { describe, expect, it } from "vitest";
import type { BoardDoc, EventDoc } from "../src/api.js";
import {
  applyEvent,
  clearWarning,
  highestLevel,
  optimisticMove,
  snapBack,
  stateFromSnapshot,
} from "../src/state.js";

const COLUMNS = [
  "Components definition",
  "Risks definition",
  "Security controls definition",
  "Validation",
];

function snapshot(revision = 1): BoardDoc {
  return {
    board_version: 1,
    definition: { name: "demo", columns: COLUMNS },
    cards: [],
    revision,
  };
}

function ev(
  sequence: number,
  kind: string,
  payload: Record<string, any>,
  revision: number,
): EventDoc {
  return {
    sequence,
    timestamp: "2026-01-05T09:00:00+00:00",
    actor: "tests",
    kind,
    payload,
    revision,
  };
}

const IMPORT = {
  card: { id: "api", name: "Checkout API", asset_type: "service", description: "" },
};

describe("applyEvent", () => {
  it("builds a card up through the usual lifecycle", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    applyEvent(state, ev(2, "CardMoved", { card_id: "api", from_index: 0, to_index: 1 }, 3));
    applyEvent(
      state,
      ev(3, "ThreatAttached", { card_id: "api", risk_id: "api:r1", threat_id: "TH-DOS-01" }, 4),
    );
    applyEvent(
      state,
      ev(
        4,
        "RiskScored",
        {
          card_id: "api",
          risk_id: "api:r1",
          factors: {
            threat_agent: [1, 2, 3, 4],
            vulnerability: [5, 6, 7, 0],
            technical_impact: [9, 9, 9, 9],
            business_impact: [0, 0, 0, 0],
          },
          score: { likelihood: 2, impact: 3, cri: 6, level: "Medium" },
        },
        5,
      ),
    );
    applyEvent(
      state,
      ev(5, "ControlAttached", { card_id: "api", risk_id: "api:r1", control_ids: ["IA-2"] }, 6),
    );
    applyEvent(
      state,
      ev(6, "RoamSet", { card_id: "api", risk_id: "api:r1", status: "Mitigated", owner: null }, 7),
    );

    const card = state.cards["api"];
    expect(card.columnIndex).toBe(1);
    expect(card.risks).toHaveLength(1);
    const risk = card.risks[0];
    expect(risk.cri).toBe(6);
    expect(risk.level).toBe("Medium");
    expect(risk.controls).toEqual(["IA-2"]);
    expect(risk.roam).toBe("Mitigated");
    expect(state.revision).toBe(7);
    expect(state.lastSequence).toBe(6);
    expect(highestLevel(card)).toBe("Medium");
    expect(state.feed[0].kind).toBe("RoamSet");
  });

  it("ignores sequences it has already seen", () => {
    const state = stateFromSnapshot("demo", snapshot());
    expect(applyEvent(state, ev(1, "CardImported", IMPORT, 2))).toBe(true);
    expect(applyEvent(state, ev(1, "CardImported", IMPORT, 2))).toBe(false);
    expect(Object.keys(state.cards)).toEqual(["api"]);
    expect(state.feed).toHaveLength(1);
  });

  it("never rewinds the revision during a replay", () => {
    const state = stateFromSnapshot("demo", snapshot(9));
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    expect(state.revision).toBe(9);
  });

  it("removes an eliminated risk and recomputes the card level", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    applyEvent(
      state,
      ev(2, "ThreatAttached", { card_id: "api", risk_id: "api:r1", threat_id: "TH-DOS-01" }, 3),
    );
    applyEvent(
      state,
      ev(
        3,
        "RiskEliminated",
        { card_id: "api", risk_id: "api:r1", threat_id: "TH-DOS-01", score: null, controls: [] },
        4,
      ),
    );
    expect(state.cards["api"].risks).toHaveLength(0);
    expect(highestLevel(state.cards["api"])).toBeNull();
  });

  it("tracks deferral both ways", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    applyEvent(
      state,
      ev(2, "ThreatAttached", { card_id: "api", risk_id: "api:r1", threat_id: "TH-DOS-01" }, 3),
    );
    applyEvent(state, ev(3, "Deferred", { card_id: "api", risk_id: "api:r1" }, 4));
    expect(state.cards["api"].risks[0].deferred).toBe(true);
    applyEvent(state, ev(4, "Undeferred", { card_id: "api", risk_id: "api:r1" }, 5));
    expect(state.cards["api"].risks[0].deferred).toBe(false);
  });

  it("marks an attested empty card in the last column as fully addressed", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    applyEvent(state, ev(2, "NoThreatAttested", { card_id: "api", note: "stateless" }, 3));
    const card = state.cards["api"];
    expect(card.attestation).toEqual({
      actor: "tests",
      note: "stateless",
      timestamp: "2026-01-05T09:00:00+00:00",
    });
    expect(card.fullyAddressed).toBe(false);
    applyEvent(state, ev(3, "CardMoved", { card_id: "api", from_index: 0, to_index: 3 }, 4));
    expect(card.fullyAddressed).toBe(true);
  });

  it("keeps a rejected move out of the lanes but in the feed", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    applyEvent(
      state,
      ev(
        2,
        "MoveRejected",
        {
          card_id: "api",
          from_index: 0,
          to_index: 2,
          failures: [{ rule: "no-skip", justification: "skips a column", offending: ["api"] }],
        },
        2,
      ),
    );
    expect(state.cards["api"].columnIndex).toBe(0);
    expect(state.feed[0].summary).toContain("no-skip");
  });

  it("caps the activity feed", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    for (let i = 0; i < 80; i += 1) {
      applyEvent(
        state,
        ev(2 + i, "CardMoved", { card_id: "api", from_index: 0, to_index: 1 }, 3 + i),
      );
    }
    expect(state.feed.length).toBe(50);
    expect(state.feed[0].sequence).toBe(81);
  });
});

describe("optimistic moves", () => {
  it("snaps back and keeps the server's justification verbatim", () => {
    const state = stateFromSnapshot("demo", snapshot());
    applyEvent(state, ev(1, "CardImported", IMPORT, 2));
    const origin = optimisticMove(state, "api", 2);
    expect(origin).toBe(0);
    expect(state.cards["api"].columnIndex).toBe(2);
    const failure = {
      rule: "no-skip",
      justification: "cards advance one column at a time",
      offending: ["api"],
    };
    snapBack(state, "api", origin, [failure]);
    expect(state.cards["api"].columnIndex).toBe(0);
    expect(state.warnings["api"].failures[0]).toBe(failure);
    clearWarning(state, "api");
    expect(state.warnings["api"]).toBeUndefined();
  });
});
