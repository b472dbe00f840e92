// Lane-and-card rendering plus every form the board needs. Rendering is a
// full rebuild after each change; boards are small and flat code beats a
// diffing layer here. Text being typed lives in drafts so a rebuild caused
// by an incoming event does not eat it.

import type { ApiClient, CommandOutcome, ControlDoc, ThreatDoc } from "./api.js";
import {
  applyEvent,
  clearWarning,
  highestLevel,
  optimisticMove,
  replaceSnapshot,
  snapBack,
  stateFromSnapshot,
  type BoardState,
  type CardView,
  type RiskView,
} from "./state.js";
import {
  FACTOR_GROUPS,
  FACTOR_MAX,
  FACTOR_MIN,
  STRIDE_CATEGORIES,
  previewFromFactors,
  type GroupKey,
} from "./scoring.js";

const ROAM_CHOICES = ["Resolved", "Owned", "Accepted", "Mitigated"];
const BAND_CHOICES = [1, 2, 3, 4, 5];

export interface AppOptions {
  // Set false to skip the event stream; commands then refetch the snapshot.
  stream?: boolean;
}

export interface AppHandle {
  readonly state: BoardState;
  moveCard(cardId: string, toIndex: number): void;
  selectCard(cardId: string | null): void;
  openScoring(riskId: string): void;
  refresh(): Promise<void>;
  flush(): Promise<void>;
  connect(): void;
  destroy(): void;
}

type SliderValues = Record<GroupKey, number[]>;

interface Drafts {
  scoringRisk: string | null;
  sliders: SliderValues;
  controls: Record<string, string>;
  roam: Record<string, string>;
  owner: Record<string, string>;
  attestNote: string;
  category: string;
  categoryLikelihood: number;
  categoryImpact: number;
  controlOptions: Record<string, { required: ControlDoc[]; optional: ControlDoc[] }>;
  threatOptions: ThreatDoc[] | null;
  banner: string | null;
}

// Drag source mirror: test DOMs dispatch drag events without a DataTransfer,
// and some browsers hide getData until drop anyway.
let draggingCard: string | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function blankSliders(): SliderValues {
  return {
    threat_agent: [0, 0, 0, 0],
    vulnerability: [0, 0, 0, 0],
    technical_impact: [0, 0, 0, 0],
    business_impact: [0, 0, 0, 0],
  };
}

function slidersFor(risk: RiskView): SliderValues {
  const values = blankSliders();
  if (risk.factors) {
    for (const group of FACTOR_GROUPS) {
      values[group.key] = [...(risk.factors[group.key] ?? values[group.key])];
    }
  } else if (risk.impactPrefill) {
    if (risk.impactPrefill.technical) {
      values.technical_impact = [...risk.impactPrefill.technical];
    }
    if (risk.impactPrefill.business) {
      values.business_impact = [...risk.impactPrefill.business];
    }
  }
  return values;
}

export async function createApp(
  root: HTMLElement,
  api: ApiClient,
  boardId: string,
  options: AppOptions = {},
): Promise<AppHandle> {
  const streaming = options.stream !== false;
  const state = stateFromSnapshot(boardId, await api.getBoard(boardId));
  const drafts: Drafts = {
    scoringRisk: null,
    sliders: blankSliders(),
    controls: {},
    roam: {},
    owner: {},
    attestNote: "",
    category: STRIDE_CATEGORIES[0].value,
    categoryLikelihood: 3,
    categoryImpact: 3,
    controlOptions: {},
    threatOptions: null,
    banner: null,
  };
  const pending = new Set<Promise<unknown>>();
  let closeStream: (() => void) | null = null;
  let reconnect: ReturnType<typeof setTimeout> | null = null;
  let destroyed = false;

  function track(work: Promise<unknown>): void {
    const guarded = work.catch((err) => {
      drafts.banner = String(err);
      render();
    });
    pending.add(guarded);
    void guarded.finally(() => pending.delete(guarded));
  }

  async function flush(): Promise<void> {
    while (pending.size > 0) {
      await Promise.allSettled([...pending]);
    }
  }

  async function refresh(): Promise<void> {
    replaceSnapshot(state, await api.getBoard(boardId));
    render();
  }

  // Shared command tail: bump the revision, then either let the stream
  // deliver the change or pull a fresh snapshot.
  async function runCommand(body: Record<string, unknown>): Promise<CommandOutcome> {
    const outcome = await api.command(boardId, body, state.revision);
    if (outcome.status === "ok") {
      state.revision = Math.max(state.revision, outcome.revision);
      if (streaming) {
        render();
      } else {
        await refresh();
      }
    } else if (outcome.status === "conflict") {
      await refresh();
    } else {
      drafts.banner = outcome.error;
      render();
    }
    return outcome;
  }

  function moveCard(cardId: string, toIndex: number): void {
    const card = state.cards[cardId];
    if (!card || destroyed) return;
    if (toIndex < 0 || toIndex >= state.columns.length) return;
    if (toIndex === card.columnIndex) return;
    clearWarning(state, cardId);
    const origin = optimisticMove(state, cardId, toIndex);
    render();
    track(submitMove(cardId, toIndex, origin));
  }

  async function submitMove(cardId: string, toIndex: number, origin: number): Promise<void> {
    let outcome: CommandOutcome;
    try {
      outcome = await api.command(
        boardId,
        { kind: "move", card_id: cardId, to: toIndex },
        state.revision,
      );
    } catch (err) {
      state.cards[cardId].columnIndex = origin;
      drafts.banner = `move failed: ${err}`;
      render();
      return;
    }
    if (outcome.status === "ok") {
      state.revision = Math.max(state.revision, outcome.revision);
      if (outcome.verdict && !outcome.verdict.approved) {
        snapBack(state, cardId, origin, outcome.verdict.failures);
      } else if (!streaming) {
        await refresh();
        return;
      }
      render();
    } else if (outcome.status === "conflict") {
      state.cards[cardId].columnIndex = origin;
      await refresh();
    } else {
      state.cards[cardId].columnIndex = origin;
      drafts.banner = outcome.error;
      render();
    }
  }

  function selectCard(cardId: string | null): void {
    state.selectedCard = cardId;
    drafts.scoringRisk = null;
    drafts.controlOptions = {};
    drafts.threatOptions = null;
    render();
  }

  function openScoring(riskId: string): void {
    const card = state.selectedCard ? state.cards[state.selectedCard] : null;
    const risk = card?.risks.find((r) => r.id === riskId);
    if (!risk) return;
    drafts.scoringRisk = riskId;
    drafts.sliders = slidersFor(risk);
    render();
  }

  function connect(): void {
    if (!streaming || destroyed || closeStream) return;
    state.connection = "connecting";
    render();
    closeStream = api.openEvents(
      boardId,
      state.lastSequence,
      (event) => {
        state.connection = "live";
        if (applyEvent(state, event)) render();
      },
      () => {
        closeStream = null;
        state.connection = "offline";
        render();
        if (!destroyed) reconnect = setTimeout(connect, 1000);
      },
    );
  }

  function destroy(): void {
    destroyed = true;
    if (reconnect !== null) clearTimeout(reconnect);
    if (closeStream) closeStream();
    closeStream = null;
    root.innerHTML = "";
  }

  // --- rendering -----------------------------------------------------------

  function render(): void {
    if (destroyed) return;
    root.innerHTML = "";
    root.append(renderTopbar());
    if (drafts.banner) root.append(renderBanner(drafts.banner));
    const layout = el("div", "layout");
    layout.append(renderBoard(), renderSide());
    root.append(layout);
  }

  function renderTopbar(): HTMLElement {
    const bar = el("header", "topbar");
    bar.append(el("h1", "", state.name));
    const badge = el("span", "connection", streaming ? state.connection : "polling");
    badge.dataset.state = streaming ? state.connection : "polling";
    bar.append(badge);
    return bar;
  }

  function renderBanner(message: string): HTMLElement {
    const banner = el("div", "banner");
    banner.append(el("span", "", message));
    const dismiss = el("button", "", "dismiss");
    dismiss.type = "button";
    dismiss.addEventListener("click", () => {
      drafts.banner = null;
      render();
    });
    banner.append(dismiss);
    return banner;
  }

  function renderBoard(): HTMLElement {
    const board = el("div", "board");
    state.columns.forEach((name, index) => {
      board.append(renderLane(name, index));
    });
    return board;
  }

  function renderLane(name: string, index: number): HTMLElement {
    const lane = el("section", "lane");
    lane.dataset.index = String(index);
    const cards = state.order
      .map((id) => state.cards[id])
      .filter((card) => card && card.columnIndex === index);
    const head = el("header", "lane-head");
    head.append(el("h2", "", name), el("span", "lane-count", String(cards.length)));
    lane.append(head);
    const body = el("div", "lane-cards");
    lane.addEventListener("dragover", (ev) => {
      ev.preventDefault();
      lane.classList.add("drop-target");
    });
    lane.addEventListener("dragleave", () => lane.classList.remove("drop-target"));
    lane.addEventListener("drop", (ev) => {
      ev.preventDefault();
      lane.classList.remove("drop-target");
      const dt = (ev as DragEvent).dataTransfer;
      const cardId = (dt ? dt.getData("text/plain") : "") || draggingCard;
      draggingCard = null;
      if (cardId) moveCard(cardId, index);
    });
    for (const card of cards) body.append(renderCard(card));
    lane.append(body);
    return lane;
  }

  function renderCard(card: CardView): HTMLElement {
    const node = el("article", "card");
    node.dataset.cardId = card.id;
    node.draggable = true;
    if (state.selectedCard === card.id) node.classList.add("selected");
    node.addEventListener("dragstart", (ev) => {
      draggingCard = card.id;
      const dt = (ev as DragEvent).dataTransfer;
      if (dt) {
        dt.setData("text/plain", card.id);
        dt.effectAllowed = "move";
      }
    });
    node.addEventListener("dragend", () => {
      draggingCard = null;
    });
    node.addEventListener("click", () => selectCard(card.id));

    const head = el("div", "card-head");
    head.append(el("span", "card-name", card.name), el("span", "card-type", card.assetType));
    node.append(head);

    const badges = el("div", "card-badges");
    const live = card.risks.filter((r) => !r.deferred);
    badges.append(el("span", "badge", `${live.length} risk${live.length === 1 ? "" : "s"}`));
    const level = highestLevel(card);
    if (level) badges.append(el("span", `badge level-${level}`, level));
    const deferred = card.risks.length - live.length;
    if (deferred > 0) badges.append(el("span", "badge deferred", `${deferred} deferred`));
    if (card.attestation) badges.append(el("span", "badge attested", "no threats"));
    if (card.fullyAddressed) badges.append(el("span", "badge validated", "validated"));
    node.append(badges);

    const warning = state.warnings[card.id];
    if (warning) {
      const box = el("div", "warning");
      box.append(el("span", "warning-title", "move rejected"));
      const list = el("ul", "warning-list");
      for (const failure of warning.failures) {
        const item = el("li", "justification", failure.justification);
        item.dataset.rule = failure.rule;
        list.append(item);
      }
      box.append(list);
      const dismiss = el("button", "warning-dismiss", "dismiss");
      dismiss.type = "button";
      dismiss.addEventListener("click", (ev) => {
        ev.stopPropagation();
        clearWarning(state, card.id);
        render();
      });
      box.append(dismiss);
      node.append(box);
    }
    return node;
  }

  function renderSide(): HTMLElement {
    const side = el("div", "side");
    side.append(renderDetail(), renderFeed());
    return side;
  }

  function renderFeed(): HTMLElement {
    const feed = el("section", "feed");
    feed.append(el("h2", "", "Activity"));
    const list = el("ul", "feed-list");
    for (const entry of state.feed) {
      const item = el("li");
      item.append(
        el("span", "feed-kind", entry.kind),
        el("span", "feed-summary", entry.summary),
      );
      list.append(item);
    }
    feed.append(list);
    return feed;
  }

  function renderDetail(): HTMLElement {
    const panel = el("aside", "detail");
    const card = state.selectedCard ? state.cards[state.selectedCard] : null;
    if (!card) {
      panel.append(el("p", "hint", "Select a card to work on it."));
      return panel;
    }
    const head = el("header", "detail-head");
    head.append(el("h2", "", card.name), el("span", "card-type", card.assetType));
    panel.append(head);
    if (card.description) panel.append(el("p", "card-desc", card.description));
    panel.append(el("p", "card-column", `Column: ${state.columns[card.columnIndex]}`));

    if (card.attestation) {
      panel.append(
        el(
          "p",
          "attestation",
          `No applicable threats: "${card.attestation.note}" (${card.attestation.actor})`,
        ),
      );
    } else if (card.risks.length === 0) {
      panel.append(renderAttestForm(card));
    }

    panel.append(renderThreatTools(card));
    for (const risk of card.risks) panel.append(renderRisk(card, risk));
    if (card.risks.some((r) => !r.deferred)) panel.append(renderCategoryForm(card));
    return panel;
  }

  function renderAttestForm(card: CardView): HTMLElement {
    const form = el("form", "attest-form");
    const input = el("input");
    input.type = "text";
    input.placeholder = "why no threats apply";
    input.value = drafts.attestNote;
    input.addEventListener("input", () => {
      drafts.attestNote = input.value;
    });
    const button = el("button", "", "attest no threats");
    form.append(input, button);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const note = drafts.attestNote.trim();
      if (!note) return;
      track(
        runCommand({ kind: "attest_no_threats", card_id: card.id, note }).then((outcome) => {
          if (outcome.status === "ok") drafts.attestNote = "";
        }),
      );
    });
    return form;
  }

  function renderThreatTools(card: CardView): HTMLElement {
    const section = el("section", "threat-tools");
    const button = el("button", "", "suggest threats");
    button.type = "button";
    button.addEventListener("click", () => {
      track(
        api.threats(card.assetType).then((res) => {
          drafts.threatOptions = res.threats;
          render();
        }),
      );
    });
    section.append(button);
    if (drafts.threatOptions) {
      const attached = new Set(card.risks.map((r) => r.threatId));
      const list = el("ul", "threat-options");
      for (const threat of drafts.threatOptions) {
        const item = el("li");
        item.append(el("span", "", `${threat.id} ${threat.title}`));
        if (attached.has(threat.id)) {
          item.append(el("span", "muted", "attached"));
        } else {
          const attach = el("button", "", "attach");
          attach.type = "button";
          attach.addEventListener("click", () => {
            track(
              runCommand({
                kind: "attach_threats",
                card_id: card.id,
                threat_ids: [threat.id],
              }),
            );
          });
          item.append(attach);
        }
        list.append(item);
      }
      section.append(list);
    }
    return section;
  }

  function renderRisk(card: CardView, risk: RiskView): HTMLElement {
    const box = el("div", "risk");
    box.dataset.riskId = risk.id;
    if (risk.deferred) box.classList.add("is-deferred");

    const head = el("div", "risk-head");
    head.append(el("span", "risk-id", risk.id), el("span", "risk-threat", risk.threatId));
    if (risk.cri !== null && risk.level) {
      head.append(el("span", `score level-${risk.level}`, `CRI ${risk.cri} (${risk.level})`));
    } else {
      head.append(el("span", "score unscored", "not scored"));
    }
    if (risk.deferred) head.append(el("span", "badge deferred", "deferred"));
    box.append(head);

    const meta = el("p", "risk-meta");
    const controls = risk.controls.length ? risk.controls.join(", ") : "none";
    const owner = risk.roamOwner ? ` (${risk.roamOwner})` : "";
    meta.textContent = `ROAM: ${risk.roam}${owner} / controls: ${controls}`;
    box.append(meta);

    const actions = el("div", "risk-actions");
    const score = el("button", "score-open", drafts.scoringRisk === risk.id ? "close" : "score");
    score.type = "button";
    score.addEventListener("click", () => {
      if (drafts.scoringRisk === risk.id) {
        drafts.scoringRisk = null;
        render();
      } else {
        openScoring(risk.id);
      }
    });
    actions.append(score);
    const defer = el("button", "defer-toggle", risk.deferred ? "surface" : "defer");
    defer.type = "button";
    defer.addEventListener("click", () => {
      track(
        runCommand({
          kind: "mark_deferred",
          card_id: card.id,
          risk_id: risk.id,
          deferred: !risk.deferred,
        }),
      );
    });
    actions.append(defer);
    box.append(actions);

    box.append(renderRoamForm(card, risk));
    box.append(renderControlForm(card, risk));
    if (drafts.scoringRisk === risk.id) box.append(renderScoreForm(card, risk));
    return box;
  }

  function renderRoamForm(card: CardView, risk: RiskView): HTMLElement {
    const form = el("form", "roam-form");
    const select = el("select");
    for (const choice of ROAM_CHOICES) {
      const option = el("option", "", choice);
      option.value = choice;
      select.append(option);
    }
    select.value = drafts.roam[risk.id] ?? (ROAM_CHOICES.includes(risk.roam) ? risk.roam : "Owned");
    select.addEventListener("change", () => {
      drafts.roam[risk.id] = select.value;
      render();
    });
    const owner = el("input");
    owner.type = "text";
    owner.placeholder = "owner";
    owner.value = drafts.owner[risk.id] ?? risk.roamOwner ?? "";
    owner.addEventListener("input", () => {
      drafts.owner[risk.id] = owner.value;
    });
    const apply = el("button", "", "set ROAM");
    form.append(select);
    if (select.value === "Owned") form.append(owner);
    form.append(apply);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const status = select.value;
      const body: Record<string, unknown> = {
        kind: "set_roam",
        card_id: card.id,
        risk_id: risk.id,
        status,
      };
      // The server rejects an owner on anything but Owned.
      if (status === "Owned") body.owner = (drafts.owner[risk.id] ?? owner.value).trim();
      track(runCommand(body));
    });
    return form;
  }

  function renderControlForm(card: CardView, risk: RiskView): HTMLElement {
    const wrap = el("div", "control-tools");
    const form = el("form", "control-form");
    const input = el("input");
    input.type = "text";
    input.placeholder = "control ids, comma separated";
    input.value = drafts.controls[risk.id] ?? "";
    input.addEventListener("input", () => {
      drafts.controls[risk.id] = input.value;
    });
    const add = el("button", "", "add controls");
    form.append(input, add);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const ids = (drafts.controls[risk.id] ?? "")
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean);
      if (!ids.length) return;
      track(
        runCommand({
          kind: "attach_controls",
          card_id: card.id,
          risk_id: risk.id,
          control_ids: ids,
        }).then((outcome) => {
          if (outcome.status === "ok") delete drafts.controls[risk.id];
        }),
      );
    });
    wrap.append(form);

    const suggest = el("button", "suggest-controls", "suggest controls");
    suggest.type = "button";
    suggest.addEventListener("click", () => {
      const level = risk.level ?? "High";
      track(
        api.controls(risk.threatId, level).then((res) => {
          drafts.controlOptions[risk.id] = res;
          render();
        }),
      );
    });
    wrap.append(suggest);

    const options = drafts.controlOptions[risk.id];
    if (options) {
      const list = el("ul", "control-options");
      const rows: [ControlDoc, boolean][] = [
        ...options.required.map((c): [ControlDoc, boolean] => [c, true]),
        ...options.optional.map((c): [ControlDoc, boolean] => [c, false]),
      ];
      for (const [control, required] of rows) {
        const item = el("li");
        if (required) item.classList.add("required");
        item.append(
          el("span", "", `${control.id} ${control.title}${required ? " (required)" : ""}`),
        );
        if (risk.controls.includes(control.id)) {
          item.append(el("span", "muted", "attached"));
        } else {
          const attach = el("button", "", "attach");
          attach.type = "button";
          attach.addEventListener("click", () => {
            track(
              runCommand({
                kind: "attach_controls",
                card_id: card.id,
                risk_id: risk.id,
                control_ids: [control.id],
              }),
            );
          });
          item.append(attach);
        }
        list.append(item);
      }
      wrap.append(list);
    }
    return wrap;
  }

  function renderScoreForm(card: CardView, risk: RiskView): HTMLElement {
    const form = el("form", "score-form");
    form.dataset.riskId = risk.id;

    const preview = el("div", "cri-preview");
    const updatePreview = () => {
      const p = previewFromFactors(
        drafts.sliders.threat_agent,
        drafts.sliders.vulnerability,
        drafts.sliders.technical_impact,
        drafts.sliders.business_impact,
      );
      preview.textContent = `CRI ${p.cri} (${p.level})`;
      preview.dataset.cri = String(p.cri);
      preview.dataset.level = p.level;
      preview.dataset.likelihood = String(p.likelihood);
      preview.dataset.impact = String(p.impact);
    };

    for (const group of FACTOR_GROUPS) {
      const fieldset = el("fieldset", "factor-group");
      fieldset.append(el("legend", "", group.label));
      drafts.sliders[group.key].forEach((value, slot) => {
        const row = el("label", "factor-row");
        const slider = el("input");
        slider.type = "range";
        slider.min = String(FACTOR_MIN);
        slider.max = String(FACTOR_MAX);
        slider.step = "1";
        slider.value = String(value);
        slider.dataset.group = group.key;
        slider.dataset.slot = String(slot);
        const readout = el("span", "factor-value", String(value));
        slider.addEventListener("input", () => {
          drafts.sliders[group.key][slot] = Number(slider.value);
          readout.textContent = slider.value;
          updatePreview();
        });
        row.append(slider, readout);
        fieldset.append(row);
      });
      form.append(fieldset);
    }

    updatePreview();
    form.append(preview);
    const submit = el("button", "", "score risk");
    form.append(submit);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const factors = {
        threat_agent: [...drafts.sliders.threat_agent],
        vulnerability: [...drafts.sliders.vulnerability],
        technical_impact: [...drafts.sliders.technical_impact],
        business_impact: [...drafts.sliders.business_impact],
      };
      const expected = previewFromFactors(
        factors.threat_agent,
        factors.vulnerability,
        factors.technical_impact,
        factors.business_impact,
      );
      track(
        runCommand({ kind: "score_risk", card_id: card.id, risk_id: risk.id, factors }).then(
          (outcome) => {
            if (outcome.status !== "ok") return;
            const stored = state.cards[card.id]?.risks.find((r) => r.id === risk.id);
            // Only compare once the write is visible: under a live stream the
            // event may not have landed yet, and the old score would look
            // like a mismatch.
            const landed =
              stored?.factors != null &&
              FACTOR_GROUPS.every(
                (g) => stored.factors![g.key]?.join() === factors[g.key].join(),
              );
            if (landed && stored.cri !== expected.cri) {
              console.warn(
                `CRI preview ${expected.cri} disagreed with server ${stored.cri} on ${risk.id}; showing the server value`,
              );
            }
          },
        ),
      );
    });

    form.append(renderBandEntry(card, risk));
    return form;
  }

  // Shortcut for people who already know the two bands and do not want to
  // walk through sixteen sliders.
  function renderBandEntry(card: CardView, risk: RiskView): HTMLElement {
    const wrap = el("fieldset", "band-entry");
    wrap.append(el("legend", "", "Direct bands"));
    const likelihood = el("select", "band-likelihood");
    const impact = el("select", "band-impact");
    for (const band of BAND_CHOICES) {
      for (const select of [likelihood, impact]) {
        const option = el("option", "", String(band));
        option.value = String(band);
        select.append(option);
      }
    }
    likelihood.value = String(risk.likelihood ?? 3);
    impact.value = String(risk.impact ?? 3);
    const apply = el("button", "", "apply bands");
    apply.type = "button";
    apply.addEventListener("click", () => {
      track(
        runCommand({
          kind: "score_risk",
          card_id: card.id,
          risk_id: risk.id,
          likelihood: Number(likelihood.value),
          impact: Number(impact.value),
        }),
      );
    });
    wrap.append(likelihood, impact, apply);
    return wrap;
  }

  function renderCategoryForm(card: CardView): HTMLElement {
    const form = el("form", "category-form");
    form.append(el("h3", "", "Score a whole category"));
    const category = el("select", "category-select");
    for (const entry of STRIDE_CATEGORIES) {
      const option = el("option", "", entry.label);
      option.value = entry.value;
      category.append(option);
    }
    category.value = drafts.category;
    category.addEventListener("change", () => {
      drafts.category = category.value;
    });
    const likelihood = el("select", "category-likelihood");
    const impact = el("select", "category-impact");
    for (const band of BAND_CHOICES) {
      for (const select of [likelihood, impact]) {
        const option = el("option", "", String(band));
        option.value = String(band);
        select.append(option);
      }
    }
    likelihood.value = String(drafts.categoryLikelihood);
    impact.value = String(drafts.categoryImpact);
    likelihood.addEventListener("change", () => {
      drafts.categoryLikelihood = Number(likelihood.value);
    });
    impact.addEventListener("change", () => {
      drafts.categoryImpact = Number(impact.value);
    });
    const apply = el("button", "", "apply to category");
    form.append(category, likelihood, impact, apply);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      track(
        runCommand({
          kind: "apply_category_score",
          card_id: card.id,
          category: drafts.category,
          likelihood: drafts.categoryLikelihood,
          impact: drafts.categoryImpact,
        }),
      );
    });
    return form;
  }

  render();
  if (streaming) connect();

  return {
    state,
    moveCard,
    selectCard,
    openScoring,
    refresh,
    flush,
    connect,
    destroy,
  };
}
