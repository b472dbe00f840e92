// Thin typed client for the /v1 HTTP API plus the server-sent event stream.

export interface FactorSetDoc {
  threat_agent: number[];
  vulnerability: number[];
  technical_impact: number[];
  business_impact: number[];
}

export interface ScoreDoc {
  likelihood: number;
  impact: number;
  cri: number;
  level: string;
}

export interface RiskDoc {
  id: string;
  threat_id: string;
  factors: FactorSetDoc | null;
  score: ScoreDoc | null;
  roam: string;
  roam_owner: string | null;
  controls: string[];
  deferred: boolean;
  impact_prefill: { technical?: number[]; business?: number[] } | null;
}

export interface CardDoc {
  id: string;
  name: string;
  asset_type: string;
  description: string;
  column_index: number;
  risks: RiskDoc[];
  no_threat_attestation: { actor: string; note: string; timestamp: string } | null;
  fully_addressed: boolean;
  risk_seq: number;
}

export interface BoardDoc {
  board_version: number;
  definition: { name: string; columns: string[] };
  cards: CardDoc[];
  revision: number;
}

export interface RuleFailureDoc {
  rule: string;
  justification: string;
  offending: string[];
}

export interface VerdictDoc {
  approved: boolean;
  failures: RuleFailureDoc[];
}

export interface EventDoc {
  sequence: number;
  timestamp: string;
  actor: string;
  kind: string;
  payload: Record<string, any>;
  revision: number;
}

export interface ThreatDoc {
  id: string;
  title: string;
  description: string;
  stride: string;
  asset_types: string[];
}

export interface ControlDoc {
  id: string;
  title: string;
  description: string;
  ccm_ids: string[];
  measurement: string;
}

export type CommandOutcome =
  | { status: "ok"; revision: number; verdict: VerdictDoc | null }
  | { status: "conflict"; currentRevision: number; error: string }
  | { status: "error"; code: number; error: string };

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async getJson(path: string): Promise<any> {
    // Board state changes out from under any HTTP cache; always go through.
    // Both forms are needed: browsers honor the cache mode, other fetch
    // implementations only honor the request header.
    const response = await fetch(this.baseUrl + path, {
      cache: "no-store",
      headers: { "Cache-Control": "no-cache" },
    });
    if (!response.ok) {
      const body = await response.text();
      throw new Error(`GET ${path} failed (${response.status}): ${body}`);
    }
    return response.json();
  }

  listBoards(): Promise<{ boards: { board_id: string; revision: number }[] }> {
    return this.getJson("/v1/boards");
  }

  getBoard(boardId: string): Promise<BoardDoc> {
    return this.getJson(`/v1/boards/${encodeURIComponent(boardId)}`);
  }

  threats(assetType?: string): Promise<{ threats: ThreatDoc[] }> {
    const query = assetType ? `?asset_type=${encodeURIComponent(assetType)}` : "";
    return this.getJson(`/v1/knowledge/threats${query}`);
  }

  controls(
    threatId: string,
    level: string,
  ): Promise<{ required: ControlDoc[]; optional: ControlDoc[] }> {
    const query = `?threat=${encodeURIComponent(threatId)}&level=${encodeURIComponent(level)}`;
    return this.getJson(`/v1/knowledge/controls${query}`);
  }

  // Commands carry their optimistic revision in the body; the response is a
  // normal acknowledgement even when the rules reject a move.
  async command(
    boardId: string,
    body: Record<string, unknown>,
    expectedRevision: number,
  ): Promise<CommandOutcome> {
    const response = await fetch(
      `${this.baseUrl}/v1/boards/${encodeURIComponent(boardId)}/commands`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json", "X-Actor": "webui" },
        body: JSON.stringify({ ...body, expected_revision: expectedRevision }),
      },
    );
    const doc = await response.json().catch(() => ({}));
    if (response.status === 200) {
      return { status: "ok", revision: doc.revision, verdict: doc.verdict ?? null };
    }
    if (response.status === 409) {
      return {
        status: "conflict",
        currentRevision: doc.current_revision,
        error: doc.error ?? "revision conflict",
      };
    }
    return { status: "error", code: response.status, error: doc.error ?? "request failed" };
  }

  // Opens the event stream from a given sequence. Reconnection is the
  // caller's job so the resume point can follow the last applied event.
  openEvents(
    boardId: string,
    since: number,
    onEvent: (event: EventDoc) => void,
    onDrop: () => void,
  ): () => void {
    const url =
      `${this.baseUrl}/v1/boards/${encodeURIComponent(boardId)}/events?since=${since}`;
    const source = new EventSource(url);
    source.onmessage = (message) => {
      onEvent(JSON.parse(message.data) as EventDoc);
    };
    source.onerror = () => {
      source.close();
      onDrop();
    };
    return () => source.close();
  }
}
