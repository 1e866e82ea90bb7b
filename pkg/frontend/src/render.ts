import { layout } from "./coords.js";
import type { Store } from "./state.js";
import type { MetricsView, NetworkLink, Orientation } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW = { width: 560, height: 480, margin: 48 };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Raw JSON value -> displayed text; no rounding, no client-side math. */
function verbatim(value: number | string | boolean): string {
  return String(value);
}

export function renderApp(root: HTMLElement, store: Store): void {
  root.innerHTML = "";
  root.appendChild(banner(store));
  const main = el("div", "columns");
  main.appendChild(networkPanel(store));
  const side = el("div", "side");
  side.appendChild(scenarioPanel(store));
  side.appendChild(metricsPanel(store));
  side.appendChild(comparisonPanel(store));
  main.appendChild(side);
  root.appendChild(main);
}

function banner(store: Store): HTMLElement {
  const box = el("div", "banner");
  if (store.status.phase === "offline") {
    box.classList.add("banner-error");
    box.textContent = store.status.message;
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => void store.init(window.location.hash));
    box.appendChild(retry);
  } else if (store.status.phase === "infeasible") {
    box.classList.add("banner-warn");
    box.textContent = `Infeasible: ${store.status.message}`;
  } else if (store.status.phase === "pending") {
    box.classList.add("banner-info");
    box.textContent = "Evaluating…";
  } else {
    box.classList.add("banner-hidden");
  }
  return box;
}

function glyph(orientation: Orientation): string {
  return orientation === "two_way" ? "↔" : orientation === "forward" ? "→" : "←";
}

function networkPanel(store: Store): HTMLElement {
  const panel = el("div", "panel network-panel");
  panel.appendChild(el("h2", undefined, "Network"));
  if (!store.network) {
    panel.appendChild(el("p", "empty", "No network loaded."));
    return panel;
  }
  const positions = layout(store.network.nodes, VIEW);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${VIEW.width} ${VIEW.height}`);
  svg.setAttribute("class", "network");

  const locked = store.lockedLinks();
  store.network.links.forEach((link) => {
    svg.appendChild(linkGroup(store, link, positions, locked.has(link.index)));
  });
  for (const node of store.network.nodes) {
    const [x, y] = positions.get(node) as [number, number];
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", `${x}`);
    circle.setAttribute("cy", `${y}`);
    circle.setAttribute("r", "14");
    circle.setAttribute("class", "node");
    svg.appendChild(circle);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", `${x}`);
    label.setAttribute("y", `${y + 4}`);
    label.setAttribute("class", "node-label");
    label.textContent = `${node}`;
    svg.appendChild(label);
  }
  panel.appendChild(svg);
  panel.appendChild(el("p", "hint",
    "Click a link to cycle two-way → one-way → reversed. Locked links are dashed."));
  return panel;
}

function linkGroup(
  store: Store,
  link: NetworkLink,
  positions: Map<number, [number, number]>,
  isLocked: boolean
): SVGGElement {
  const group = document.createElementNS(SVG_NS, "g");
  const orientation = store.draft.orientations[link.index];
  const [x1, y1] = positions.get(link.a) as [number, number];
  const [x2, y2] = positions.get(link.b) as [number, number];
  const line = document.createElementNS(SVG_NS, "line");
  line.setAttribute("x1", `${x1}`);
  line.setAttribute("y1", `${y1}`);
  line.setAttribute("x2", `${x2}`);
  line.setAttribute("y2", `${y2}`);
  line.setAttribute("class", `link link-${orientation}${isLocked ? " link-locked" : ""}`);
  line.setAttribute("data-link", `${link.index}`);
  group.appendChild(line);

  const mx = (x1 + x2) / 2;
  const my = (y1 + y2) / 2;
  const text = document.createElementNS(SVG_NS, "text");
  text.setAttribute("x", `${mx}`);
  text.setAttribute("y", `${my - 6}`);
  text.setAttribute("class", "glyph");
  text.setAttribute("data-glyph", `${link.index}`);
  // glyph reads in a->b axis; backward shows the reversed arrow
  text.textContent = glyph(orientation);
  group.appendChild(text);

  if (isLocked) {
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = "Locked by the active scenario";
    group.appendChild(title);
  }
  group.addEventListener("click", () => {
    store.cycleLink(link.index);
  });
  return group;
}

function scenarioPanel(store: Store): HTMLElement {
  const panel = el("div", "panel scenario-panel");
  panel.appendChild(el("h2", undefined, "Scenario"));
  const row = el("div", "preset-row");
  const noneButton = el("button", "preset", "None");
  noneButton.dataset.preset = "";
  if (store.draft.scenarioName === null) noneButton.classList.add("active");
  noneButton.addEventListener("click", () => store.selectScenario(null));
  row.appendChild(noneButton);
  for (const preset of store.presets) {
    const button = el("button", "preset", preset.name);
    button.dataset.preset = preset.name;
    if (store.draft.scenarioName === preset.name) button.classList.add("active");
    button.addEventListener("click", () => store.selectScenario(preset.name));
    row.appendChild(button);
  }
  panel.appendChild(row);

  const share = el("p", "share");
  share.appendChild(el("span", undefined, "Share: "));
  const linkText = el("code", "fragment", store.fragment());
  share.appendChild(linkText);
  panel.appendChild(share);
  return panel;
}

const METRIC_FIELDS: Array<keyof MetricsView> = ["tbc", "tltf", "stt", "dcs"];

function metricsPanel(store: Store): HTMLElement {
  const panel = el("div", "panel metrics-panel");
  panel.appendChild(el("h2", undefined, "Metrics"));
  if (store.status.phase === "infeasible") {
    panel.appendChild(el("p", "infeasible-note", store.status.message));
    return panel;
  }
  if (!store.metrics) {
    panel.appendChild(el("p", "empty", "No evaluation yet."));
    return panel;
  }
  const table = el("table", "metrics");
  for (const field of METRIC_FIELDS) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, field.toUpperCase()));
    const td = el("td", undefined, verbatim(store.metrics[field] as number));
    td.dataset.metric = field;
    tr.appendChild(td);
    table.appendChild(tr);
  }
  const conv = el("tr");
  conv.appendChild(el("th", undefined, "CONVERGED"));
  conv.appendChild(el("td", undefined, verbatim(store.metrics.converged)));
  table.appendChild(conv);
  panel.appendChild(table);

  const actions = el("div", "actions");
  const snap = el("button", "snapshot", "Add to comparison");
  snap.addEventListener("click", () => store.snapshot());
  actions.appendChild(snap);
  const baseline = el("button", "baseline", "Use as baseline");
  baseline.addEventListener("click", () => store.setBaseline(store.metrics?.code ?? null));
  actions.appendChild(baseline);
  panel.appendChild(actions);
  panel.appendChild(el("p", "provenance",
    `model ${store.metrics.provenance.model_id} · seed ${store.metrics.provenance.seed}` +
    ` · sigma ${store.metrics.provenance.sigma}`));
  return panel;
}

function comparisonPanel(store: Store): HTMLElement {
  const panel = el("div", "panel comparison-panel");
  panel.appendChild(el("h2", undefined, "Comparison"));
  if (store.snapshots.length === 0) {
    panel.appendChild(el("p", "empty", "Snapshot evaluations to compare them."));
    return panel;
  }
  const table = el("table", "comparison");
  const head = el("tr");
  for (const column of ["scenario", "code", "tbc", "tltf", "stt", "dcs", "% change stt"]) {
    head.appendChild(el("th", undefined, column));
  }
  table.appendChild(head);
  store.snapshots.forEach((row, i) => {
    const tr = el("tr");
    tr.dataset.row = `${i}`;
    tr.appendChild(el("td", undefined, row.label));
    const cells: Array<[string, number | string]> = [
      ["code", row.metrics.code],
      ["tbc", row.metrics.tbc],
      ["tltf", row.metrics.tltf],
      ["stt", row.metrics.stt],
      ["dcs", row.metrics.dcs],
      ["pct", row.metrics.deltas ? row.metrics.deltas.pct_change_stt : ""],
    ];
    for (const [name, value] of cells) {
      const td = el("td", undefined, verbatim(value));
      td.dataset.cell = name;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  });
  panel.appendChild(table);
  const clear = el("button", "clear", "Clear");
  clear.addEventListener("click", () => store.clearSnapshots());
  panel.appendChild(clear);
  return panel;
}
