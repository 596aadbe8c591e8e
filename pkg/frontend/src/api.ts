import type {
  ApiErrorBody,
  ComparisonView,
  MatrixView,
  PlanDocument,
  ScenarioResult,
} from "./types";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.body = body;
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { error: "http-error", message: `HTTP ${response.status}` };
  }
  throw new ApiError(response.status, body);
}

/** Thin typed client for the planning service; no domain math lives here. */
export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  async health(): Promise<{ status: string; version: string }> {
    return this.getJson("/api/health");
  }

  async defaults(): Promise<PlanDocument> {
    return this.getJson("/api/defaults");
  }

  async buildMatrix(plan: PlanDocument): Promise<MatrixView> {
    return this.postJson("/api/matrix", plan);
  }

  async createSession(plan: PlanDocument): Promise<string> {
    const body = await this.postJson<{ session_id: string }>(
      "/api/sessions",
      plan
    );
    return body.session_id;
  }

  async postScenario(
    sessionId: string,
    name: string,
    overrides: Record<string, unknown>
  ): Promise<ScenarioResult> {
    return this.postJson(
      `/api/sessions/${encodeURIComponent(sessionId)}/scenarios`,
      { name, overrides }
    );
  }

  async compare(sessionId: string, names: string[]): Promise<ComparisonView> {
    const query = encodeURIComponent(names.join(","));
    return this.getJson(
      `/api/sessions/${encodeURIComponent(sessionId)}/compare?names=${query}`
    );
  }

  async deleteSession(sessionId: string): Promise<void> {
    const response = await fetch(
      this.baseUrl + `/api/sessions/${encodeURIComponent(sessionId)}`,
      { method: "DELETE" }
    );
    await raiseForStatus(response);
  }

  /** Server-side rendering; the text is emitted unmodified by export buttons. */
  async render(
    plan: PlanDocument,
    format: "markdown" | "csv",
    table: "matrix" | "scope" = "matrix"
  ): Promise<string> {
    const response = await fetch(this.baseUrl + "/api/render", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ plan, format, table }),
    });
    await raiseForStatus(response);
    return response.text();
  }
}
