import type { ReviewStore } from "./state.js";
import type { CandidateView, Correspondence } from "./types.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function candidateRow(store: ReviewStore, candidate: CandidateView, selected: boolean): HTMLElement {
  const row = el("div", `candidate status-${candidate.status}${selected ? " selected" : ""}`);
  row.dataset.candidateId = candidate.id;

  const head = el("div", "candidate-head");
  head.append(
    el("span", "pair", `${candidate.source_table} → ${candidate.target_table}`),
    el("span", "score", candidate.score.toFixed(3)),
    el("span", "provenance", candidate.provenance),
    el("span", "status", candidate.status),
  );
  if (candidate.direction_ratios) {
    const [fwd, bwd] = candidate.direction_ratios;
    head.append(el("span", "ratios", `→${fwd.toFixed(2)} ←${bwd.toFixed(2)}`));
  }
  row.append(head);

  if (candidate.evidence.length > 0) {
    const evidence = el("ul", "evidence");
    for (const [src, tgt, score] of candidate.evidence) {
      evidence.append(el("li", "evidence-pair", `${src} ~ ${tgt} (${score.toFixed(3)})`));
    }
    row.append(evidence);
  }

  const actions = el("div", "actions");
  const confirm = el("button", "confirm", "confirm (c)") as HTMLButtonElement;
  const reject = el("button", "reject", "reject (r)") as HTMLButtonElement;
  confirm.disabled = reject.disabled = candidate.status !== "proposed";
  confirm.addEventListener("click", () => void store.decide(candidate.id, "confirm"));
  reject.addEventListener("click", () => void store.decide(candidate.id, "reject"));
  actions.append(confirm, reject);
  row.append(actions);
  return row;
}

function correspondenceSection(store: ReviewStore): HTMLElement {
  const section = el("section", "correspondences");
  section.append(el("h2", "", "Attribute correspondences"));
  if (store.correspondences.length === 0) {
    section.append(
      el(
        "p",
        "empty-state",
        "No correspondences: every table candidate was rejected or nothing cleared the threshold.",
      ),
    );
    return section;
  }
  const byPair = new Map<string, Correspondence[]>();
  for (const corr of store.correspondences) {
    const key = `${corr.source[0]} → ${corr.target[0]}`;
    const list = byPair.get(key) ?? [];
    list.push(corr);
    byPair.set(key, list);
  }
  for (const [pair, correspondences] of byPair) {
    section.append(el("h3", "table-pair", pair));
    const list = el("ul", "correspondence-list");
    for (const corr of correspondences) {
      list.append(
        el(
          "li",
          "correspondence",
          `${corr.source[1]} ↔ ${corr.target[1]}  ${corr.score.toFixed(3)} [${corr.matcher}]`,
        ),
      );
    }
    section.append(list);
  }
  return section;
}

export function render(store: ReviewStore, root: HTMLElement): void {
  root.textContent = "";
  const header = el("header", "app-header");
  header.append(
    el("h1", "", `Run ${store.runId}`),
    el("span", "phase", store.loaded ? store.phase : "loading…"),
  );
  const advance = el("button", "advance", "advance (a)") as HTMLButtonElement;
  advance.addEventListener("click", () => void store.advanceAndShow());
  header.append(advance);
  root.append(header);

  for (const message of store.notices.slice(-3)) {
    root.append(el("div", "notice", message));
  }

  const candidates = store.view();
  const main = el("main", "candidate-list");
  if (store.loaded && candidates.length === 0) {
    main.append(el("p", "empty-state", "No table candidates were produced for this run."));
  }
  const selectedId = store.selected()?.id;
  for (const group of store.groups()) {
    main.append(el("h2", "target-table", `target: ${group.targetTable}`));
    for (const candidate of group.candidates) {
      main.append(candidateRow(store, candidate, candidate.id === selectedId));
    }
  }
  root.append(main);

  if (store.phase === "attribute_matching_done" || store.phase === "reported") {
    root.append(correspondenceSection(store));
  }
}

/** Keyboard-first triage: j/k move, c confirm, r reject, a advance, u retry queued. */
export function bindKeyboard(store: ReviewStore, target: EventTarget): void {
  target.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    if (key === "j" || key === "ArrowDown") store.moveCursor(1);
    else if (key === "k" || key === "ArrowUp") store.moveCursor(-1);
    else if (key === "c" || key === "r") {
      const selected = store.selected();
      if (selected) void store.decide(selected.id, key === "c" ? "confirm" : "reject");
    } else if (key === "a") void store.advanceAndShow();
    else if (key === "u") void store.retryQueued();
  });
}
