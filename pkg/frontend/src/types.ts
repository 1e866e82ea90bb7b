export type Orientation = "two_way" | "forward" | "backward";

export interface NetworkLink {
  index: number;
  a: number;
  b: number;
  fwd: { capacity: number; fft: number; b: number; power: number };
  bwd: { capacity: number; fft: number; b: number; power: number };
  reverse_copied: boolean;
}

export interface NetworkView {
  nodes: number[];
  links: NetworkLink[];
  demand_total: number;
  provenance: Provenance;
}

export interface Provenance {
  seed: number;
  sigma: number;
  model_id: string;
}

export interface ScenarioDoc {
  name: string;
  forced_orientations: Record<string, Orientation>;
  added_arcs: Array<{
    tail: number;
    head: number;
    capacity: number;
    fft: number;
    b: number;
    power: number;
  }>;
  demand_multipliers: Record<string, number>;
}

/** Verbatim /api/evaluate response; the UI never recomputes any of it. */
export interface MetricsView {
  code: number;
  trits: string;
  tbc: number;
  tltf: number;
  stt: number;
  dcs: number;
  converged: boolean;
  gap: number;
  iterations: number;
  provenance: Provenance;
  baseline_code?: number;
  deltas?: {
    tbc: number;
    tltf: number;
    stt: number;
    dcs: number;
    pct_change_stt: number;
  };
}

export interface ApiErrorBody {
  error: { status: number; message: string };
}

/** Mirrors exactly one /api/evaluate request body. */
export interface DraftScenario {
  orientations: Orientation[];
  scenarioName: string | null; // preset name, null = no scenario
  baselineCode: number | null;
}
