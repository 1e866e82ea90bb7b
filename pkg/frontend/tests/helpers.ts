import type { MetricsView, NetworkView, ScenarioDoc } from "../src/types.js";

export const PROVENANCE = { seed: 0, sigma: 0.1, model_id: "2ee114c3e4a5" };

const attrs = { capacity: 4947.995469, fft: 4, b: 0.15, power: 4 };

export const NETWORK: NetworkView = {
  nodes: [5, 6, 8, 9, 10, 16, 17],
  links: [
    [5, 6], [5, 9], [6, 8], [8, 9], [8, 16], [9, 10], [10, 16], [10, 17], [16, 17],
  ].map(([a, b], index) => ({
    index, a, b, fwd: attrs, bwd: attrs, reverse_copied: false,
  })),
  demand_total: 57600,
  provenance: PROVENANCE,
};

export const PRESETS: ScenarioDoc[] = [
  { name: "A", forced_orientations: {}, added_arcs: [], demand_multipliers: {} },
  {
    name: "B",
    forced_orientations: { "0": "two_way", "2": "two_way", "4": "two_way", "8": "backward" },
    added_arcs: [],
    demand_multipliers: {},
  },
  {
    name: "C",
    forced_orientations: { "0": "two_way", "2": "two_way", "4": "two_way", "8": "backward" },
    added_arcs: [{ tail: 16, head: 17, capacity: 5229.910063, fft: 2, b: 0.15, power: 4 }],
    demand_multipliers: {},
  },
];

export function metricsFor(trits: string, scenario: string | null): MetricsView {
  // distinct high-precision values per scenario so reformatting would show
  const table: Record<string, Omit<MetricsView, "code" | "trits" | "provenance">> = {
    none: {
      tbc: 1.7619047619047614, tltf: 85138.0, stt: 429424.2983477118,
      dcs: 0.9971353982200601, converged: false, gap: 0.12867508035545486,
      iterations: 200,
    },
    A: {
      tbc: 1.7619047619047614, tltf: 85138.0, stt: 429424.2983477118,
      dcs: 0.9971353982200601, converged: false, gap: 0.12867508035545486,
      iterations: 200,
      deltas: { tbc: 0, tltf: 0, stt: 0, dcs: 0, pct_change_stt: 0 },
    },
    B: {
      tbc: 1.8333333333333335, tltf: 88468.5, stt: 673881.8281116349,
      dcs: 0.945087712987619, converged: false, gap: 0.18221434256,
      iterations: 200,
      deltas: {
        tbc: 0.07142857142857206, tltf: 3330.5, stt: 244457.5297639231,
        dcs: -0.05204768523244116, pct_change_stt: -56.92651548147129,
      },
    },
    C: {
      tbc: 1.7619047619047614, tltf: 85403.0, stt: 431086.0815778745,
      dcs: 0.9959490799364981, converged: false, gap: 0.143110088,
      iterations: 200,
      deltas: {
        tbc: 0, tltf: 265.0, stt: 1661.7832301627053,
        dcs: -0.001186318283562, pct_change_stt: -0.38698964780754,
      },
    },
  };
  const key = scenario ?? "none";
  const code = [...trits].reduce((acc, ch, i) => acc + Number(ch) * 3 ** i, 0);
  return { code, trits, provenance: PROVENANCE, ...table[key] };
}

export interface FetchLogEntry {
  url: string;
  body: unknown;
}

export function makeFetchMock(log: FetchLogEntry[]): typeof fetch {
  return async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    log.push({ url, body });
    if (init?.signal?.aborted) {
      throw new DOMException("aborted", "AbortError");
    }
    if (url.endsWith("/api/network")) {
      return json(NETWORK);
    }
    if (url.endsWith("/api/presets/case-study")) {
      return json({ scenarios: PRESETS, provenance: PROVENANCE });
    }
    if (url.endsWith("/api/evaluate")) {
      const orientations = body.orientations as string[];
      const trits = orientations
        .map((o) => ({ two_way: "0", forward: "1", backward: "2" })[o])
        .join("");
      // both arcs into node 17 and none out: the server reports 422
      if (trits[7] === "1" && trits[8] === "1") {
        return json(
          { error: { status: 422, message: "infeasible configuration: no path for demand pair 17 -> 5" } },
          422
        );
      }
      const scenario = (body.scenario?.name as string | undefined) ?? null;
      return json(metricsFor(trits, scenario));
    }
    return json({ error: { status: 404, message: "not found" } }, 404);
  };
}

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}
