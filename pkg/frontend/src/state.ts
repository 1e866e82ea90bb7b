import { ApiClient, ApiError } from "./api.js";
import type {
  DraftScenario,
  MetricsView,
  NetworkView,
  Orientation,
  ScenarioDoc,
} from "./types.js";

export const DEBOUNCE_MS = 250;

const CYCLE: Record<Orientation, Orientation> = {
  two_way: "forward",
  forward: "backward",
  backward: "two_way",
};

export interface SnapshotRow {
  label: string;
  metrics: MetricsView;
}

export interface StoreStatus {
  phase: "idle" | "pending" | "ok" | "infeasible" | "offline";
  message: string;
}

/** Draft state, server results, and the debounced evaluate loop.

    All metric values shown anywhere come verbatim from the last API
    response; this store never derives numbers of its own. */
export class Store {
  network: NetworkView | null = null;
  presets: ScenarioDoc[] = [];
  draft: DraftScenario = { orientations: [], scenarioName: null, baselineCode: null };
  metrics: MetricsView | null = null;
  snapshots: SnapshotRow[] = [];
  status: StoreStatus = { phase: "idle", message: "" };
  requestsIssued = 0;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private listeners: Array<() => void> = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async init(fragment: string = ""): Promise<void> {
    try {
      this.network = await this.api.network();
      try {
        this.presets = await this.api.presets();
      } catch {
        this.presets = []; // non case-study networks have no presets
      }
    } catch (err) {
      this.status = {
        phase: "offline",
        message: "API unreachable; read-only mode",
      };
      this.notify();
      return;
    }
    this.draft = {
      orientations: this.network.links.map(() => "two_way" as Orientation),
      scenarioName: null,
      baselineCode: null,
    };
    const restored = this.applyFragment(fragment);
    this.status = { phase: "idle", message: "" };
    this.notify();
    if (restored) this.scheduleEvaluate();
  }

  activeScenario(): ScenarioDoc | null {
    if (this.draft.scenarioName === null) return null;
    return this.presets.find((s) => s.name === this.draft.scenarioName) ?? null;
  }

  lockedLinks(): Set<number> {
    const scenario = this.activeScenario();
    if (!scenario) return new Set();
    return new Set(Object.keys(scenario.forced_orientations).map(Number));
  }

  /** Cycle one link two_way -> forward -> backward -> two_way. */
  cycleLink(index: number): boolean {
    if (this.status.phase === "offline" || !this.network) return false;
    if (this.lockedLinks().has(index)) return false;
    const next = [...this.draft.orientations];
    next[index] = CYCLE[next[index]];
    this.draft = { ...this.draft, orientations: next };
    this.notify();
    this.scheduleEvaluate();
    return true;
  }

  selectScenario(name: string | null): void {
    this.draft = { ...this.draft, scenarioName: name };
    const scenario = this.activeScenario();
    if (scenario) {
      const next = [...this.draft.orientations];
      for (const [idx, orientation] of Object.entries(scenario.forced_orientations)) {
        next[Number(idx)] = orientation;
      }
      this.draft = { ...this.draft, orientations: next };
    }
    this.notify();
    this.scheduleEvaluate();
  }

  setBaseline(code: number | null): void {
    this.draft = { ...this.draft, baselineCode: code };
    this.notify();
    this.scheduleEvaluate();
  }

  /** Debounced evaluate: rapid edits collapse into one request. */
  scheduleEvaluate(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.status = { ...this.status, phase: "pending" };
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.evaluateNow();
    }, DEBOUNCE_MS);
  }

  async evaluateNow(): Promise<void> {
    if (!this.network) return;
    this.inflight?.abort(); // latest wins
    const controller = new AbortController();
    this.inflight = controller;
    this.requestsIssued += 1;
    try {
      const metrics = await this.api.evaluate(
        this.draft,
        this.activeScenario(),
        controller.signal
      );
      if (controller !== this.inflight) return; // superseded
      this.metrics = metrics;
      this.status = { phase: "ok", message: "" };
    } catch (err) {
      if (controller !== this.inflight) return;
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (err instanceof ApiError && err.status === 422) {
        this.metrics = null;
        this.status = { phase: "infeasible", message: err.message };
      } else {
        this.status = { phase: "offline", message: "API unreachable; retry below" };
      }
    } finally {
      if (controller === this.inflight) this.inflight = null;
      this.notify();
    }
  }

  /** Append the current server response to the comparison table. */
  snapshot(label?: string): void {
    if (!this.metrics) return;
    this.snapshots = [
      ...this.snapshots,
      { label: label ?? this.draft.scenarioName ?? "draft", metrics: this.metrics },
    ];
    this.notify();
  }

  clearSnapshots(): void {
    this.snapshots = [];
    this.notify();
  }

  /** #c=<code>&s=<scenario>&b=<baseline> round-trips the draft. */
  fragment(): string {
    const parts = [`c=${encodeTrits(this.draft.orientations)}`];
    if (this.draft.scenarioName !== null) {
      parts.push(`s=${encodeURIComponent(this.draft.scenarioName)}`);
    }
    if (this.draft.baselineCode !== null) {
      parts.push(`b=${this.draft.baselineCode}`);
    }
    return `#${parts.join("&")}`;
  }

  applyFragment(fragment: string): boolean {
    const text = fragment.startsWith("#") ? fragment.slice(1) : fragment;
    if (!text || !this.network) return false;
    const fields = new Map<string, string>();
    for (const part of text.split("&")) {
      const [key, value] = part.split("=", 2);
      if (key && value !== undefined) fields.set(key, value);
    }
    const code = fields.get("c");
    if (code === undefined) return false;
    const orientations = decodeTrits(code, this.network.links.length);
    if (!orientations) return false;
    const scenarioName = fields.has("s")
      ? decodeURIComponent(fields.get("s") as string)
      : null;
    const baseline = fields.has("b") ? Number(fields.get("b")) : null;
    this.draft = {
      orientations,
      scenarioName,
      baselineCode: baseline !== null && Number.isFinite(baseline) ? baseline : null,
    };
    return true;
  }
}

const DIGIT: Record<Orientation, string> = { two_way: "0", forward: "1", backward: "2" };
const ORIENT: Record<string, Orientation> = {
  "0": "two_way",
  "1": "forward",
  "2": "backward",
};

/** Trits string with link 0 leftmost, matching CLI/API display. */
export function encodeTrits(orientations: Orientation[]): string {
  return orientations.map((o) => DIGIT[o]).join("");
}

export function decodeTrits(trits: string, nLinks: number): Orientation[] | null {
  if (trits.length !== nLinks) return null;
  const out: Orientation[] = [];
  for (const ch of trits) {
    const orientation = ORIENT[ch];
    if (!orientation) return null;
    out.push(orientation);
  }
  return out;
}
