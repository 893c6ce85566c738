/** DOM rendering of the session store: collapsible case outline with
 * validity sliders, risk panel, matrix highlight, challenge panel, banner.
 * Pure render-from-store; every interaction dispatches back into the store.
 */

import { SessionStore, formatProbability } from "./store.js";

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

export function render(store: SessionStore, rootEl: HTMLElement): void {
  rootEl.replaceChildren();

  if (store.banner !== null) {
    const banner = el("div", "banner", store.banner);
    const dismiss = el("button", "banner-dismiss", "x");
    dismiss.addEventListener("click", () => {
      store.banner = null;
      render(store, rootEl);
    });
    banner.appendChild(dismiss);
    rootEl.appendChild(banner);
  }

  const header = el("header");
  header.appendChild(el("h1", undefined, store.baseline?.title ?? "loading case..."));
  if (store.baseline) {
    header.appendChild(el("p", "meta", store.baseline.macrosystem));
    header.appendChild(el("p", "meta", store.baseline.deployment_window));
  }
  const resetButton = el("button", "reset", "reset to baseline");
  resetButton.addEventListener("click", () => void store.reset());
  header.appendChild(resetButton);
  rootEl.appendChild(header);

  const columns = el("main", "columns");
  columns.appendChild(renderTree(store));
  const side = el("div", "side");
  side.appendChild(renderRiskPanel(store));
  side.appendChild(renderMatrix(store));
  side.appendChild(renderChallenges(store));
  columns.appendChild(side);
  rootEl.appendChild(columns);
}

function renderTree(store: SessionStore): HTMLElement {
  const pane = el("section", "tree");
  pane.appendChild(el("h2", undefined, "argument outline"));
  for (const row of store.treeRows()) {
    const line = el("div", `row kind-${row.kind}${row.id === store.selected ? " selected" : ""}`);
    line.style.paddingLeft = `${row.depth * 1.25}rem`;

    const toggle = el("span", "toggle", row.hasChildren ? (row.collapsed ? "+" : "-") : " ");
    if (row.hasChildren) {
      toggle.addEventListener("click", () => store.toggleCollapse(row.id));
    }
    line.appendChild(toggle);

    line.appendChild(el("span", "glyph", row.glyph));
    const label = el("span", "label", `${row.id} ${row.statement}`);
    label.addEventListener("click", () => store.select(row.id));
    line.appendChild(label);

    if (row.step !== null) line.appendChild(el("span", "badge step", `step ${row.step}`));
    if (row.severity) line.appendChild(el("span", "badge severity", row.severity));
    if (row.template) line.appendChild(el("span", "badge template", row.template));
    if (row.challenged) line.appendChild(el("span", "badge blocking", "challenged"));
    if (row.invalidated) line.appendChild(el("span", "badge invalidated", "invalidated"));

    if (row.validity !== null) {
      line.appendChild(el("span", "validity", formatProbability(row.validity)));
    }
    if (row.overridable) {
      const slider = el("input", "slider") as HTMLInputElement;
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.001";
      slider.value = String(store.overridesObject()[row.id] ?? row.declaredP ?? row.validity ?? 1);
      slider.addEventListener("input", () => {
        store.whatIf(row.id, Number(slider.value));
      });
      line.appendChild(slider);
      if (row.overridden) {
        const clear = el("button", "clear-override", "clear");
        clear.addEventListener("click", () => store.clearOverride(row.id));
        line.appendChild(clear);
      }
    }
    pane.appendChild(line);
  }
  return pane;
}

function renderRiskPanel(store: SessionStore): HTMLElement {
  const pane = el("section", "risk");
  pane.appendChild(el("h2", undefined, "risk"));
  const panel = store.riskPanel();
  if (!panel) {
    pane.appendChild(el("p", "empty", "no estimate (see banner)"));
    return pane;
  }
  const overall = el("div", "overall");
  overall.appendChild(el("span", "big", formatProbability(panel.overallRisk)));
  overall.appendChild(el("span", "caption", "overall catastrophe risk"));
  pane.appendChild(overall);
  const table = el("table");
  for (const outcome of panel.outcomes) {
    const tr = el("tr", `verdict-${outcome.verdict}`);
    tr.appendChild(el("td", undefined, outcome.node));
    tr.appendChild(el("td", undefined, outcome.severity));
    tr.appendChild(el("td", "num", formatProbability(outcome.risk)));
    tr.appendChild(el("td", "num", formatProbability(outcome.threshold)));
    tr.appendChild(el("td", "verdict", outcome.verdict));
    table.appendChild(tr);
  }
  pane.appendChild(table);
  return pane;
}

function renderMatrix(store: SessionStore): HTMLElement {
  const pane = el("section", "matrix");
  pane.appendChild(el("h2", undefined, "risk matrix"));
  const rows = store.matrixView();
  if (!rows.length) return pane;
  const table = el("table");
  for (const row of rows) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, row[0]?.severity ?? ""));
    for (const cell of row) {
      const td = el("td", `cell ${cell.verdict}${cell.hits.length ? " hit" : ""}`);
      td.title = `${cell.severity} / ${cell.likelihood}: ${cell.verdict}`;
      td.textContent = cell.hits.join(" ");
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  pane.appendChild(table);
  return pane;
}

function renderChallenges(store: SessionStore): HTMLElement {
  const pane = el("section", "challenges");
  pane.appendChild(el("h2", undefined, "risk case"));
  for (const challenge of store.challengePanel()) {
    const line = el("div", `challenge status-${challenge.status}`);
    line.appendChild(el("span", "cid", challenge.id));
    line.appendChild(el("span", "target", challenge.target));
    line.appendChild(el("span", "claim", challenge.claim));
    line.appendChild(el("span", `badge status ${challenge.blocking ? "blocking" : ""}`, challenge.status));
    if (challenge.status !== "conceded") {
      const concede = el("button", "concede", "concede");
      concede.addEventListener("click", () => void store.concede(challenge.id));
      line.appendChild(concede);
    }
    pane.appendChild(line);
  }
  return pane;
}
