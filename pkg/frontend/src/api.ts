// Typed client for the collection service. Every mutation round-trips
// through the server; the view it returns is the only session state the
// UI trusts.

export type Stage =
  | "instructions"
  | "test"
  | "demographics"
  | "creation"
  | "alteration"
  | "evaluation"
  | "usability"
  | "complete";

export interface LinkView {
  cause: string;
  effect: string;
}

export interface SessionView {
  id: string;
  cohort: number;
  profile: string;
  stage: Stage;
  attribute_order: string[];
  links: LinkView[];
  confidence: number | null;
  status: string;
  segment: string | null;
  verification_code: string | null;
  remaining_rounds: number;
  selected_nodes: string[];
  allow_delete: boolean;
  dot: string | null;
  narrative: string | null;
}

export interface CatalogAttribute {
  base: string;
  trend: "up" | "down";
  display: string;
}

export interface Catalog {
  version: string;
  attributes: CatalogAttribute[];
}

export type AlterationChoice = "noop" | "change_direction" | "delete";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "HttpError";
      let detail = `${response.status}`;
      try {
        const payload = (await response.json()) as { error?: string; detail?: string };
        code = payload.error ?? code;
        detail = payload.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(code, response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(): Promise<SessionView> {
    return this.request("POST", "/sessions");
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  getCatalog(): Promise<Catalog> {
    return this.request("GET", "/catalog");
  }

  submitTest(id: string, cause: string, effect: string): Promise<{ passed: boolean; stage: Stage }> {
    return this.request("POST", `/sessions/${id}/test`, { cause, effect });
  }

  submitDemographics(
    id: string,
    demographics: string[],
    sassy: number[],
  ): Promise<{ segment: string; stage: Stage }> {
    return this.request("POST", `/sessions/${id}/demographics`, { demographics, sassy });
  }

  submitLink(id: string, cause: string, effect: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/links`, { cause, effect });
  }

  submitAlterations(
    id: string,
    actions: { link_index: number; action: AlterationChoice }[],
  ): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/alterations`, { actions });
  }

  submitConfidence(id: string, confidence: number): Promise<{ stage: Stage }> {
    return this.request("POST", `/sessions/${id}/confidence`, { confidence });
  }

  submitUsability(
    id: string,
    ratings: number[],
  ): Promise<{ stage: Stage; verification_code: string }> {
    return this.request("POST", `/sessions/${id}/usability`, { ratings });
  }

  async networkDot(id: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/network.dot`);
    if (!response.ok) {
      throw new ApiError("HttpError", response.status, "could not fetch graph");
    }
    return response.text();
  }
}
