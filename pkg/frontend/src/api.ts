import type {
  ApiErrorBody,
  DraftScenario,
  MetricsView,
  NetworkView,
  ScenarioDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `${response.status}`;
  try {
    const body = (await response.json()) as ApiErrorBody;
    message = body.error?.message ?? message;
  } catch {
    // non-JSON failure body: keep the bare status
  }
  throw new ApiError(response.status, message);
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: typeof fetch = fetch.bind(globalThis)
  ) {}

  async network(): Promise<NetworkView> {
    const response = await this.fetcher(`${this.base}/api/network`);
    if (!response.ok) return parseError(response);
    return response.json();
  }

  async presets(): Promise<ScenarioDoc[]> {
    const response = await this.fetcher(`${this.base}/api/presets/case-study`);
    if (!response.ok) return parseError(response);
    const body = (await response.json()) as { scenarios: ScenarioDoc[] };
    return body.scenarios;
  }

  async evaluate(
    draft: DraftScenario,
    scenario: ScenarioDoc | null,
    signal?: AbortSignal
  ): Promise<MetricsView> {
    const body: Record<string, unknown> = { orientations: draft.orientations };
    if (scenario) body.scenario = scenario;
    if (draft.baselineCode !== null) body.baseline_code = draft.baselineCode;
    const response = await this.fetcher(`${this.base}/api/evaluate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!response.ok) return parseError(response);
    return response.json();
  }
}
