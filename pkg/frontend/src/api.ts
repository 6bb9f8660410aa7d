/** Typed client for the review service. All domain state lives server-side;
 * this module only moves JSON and raises typed errors. */

import type {
  Comparison,
  DecisionRequest,
  DecisionResult,
  Hazard,
  HazardRequest,
  PhsDetail,
  PhsRow,
  ProjectSummary,
  Report,
  ReviewState,
  TraceLink,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** Any non-2xx answer from the service. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** 409: someone else committed first. Carries the committed review state
 * so the caller can rebase instead of guessing. */
export class ConflictError extends ApiError {
  constructor(
    message: string,
    readonly phs: string,
    readonly current: ReviewState,
  ) {
    super(409, message);
    this.name = "ConflictError";
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `HTTP ${response.status}`;
  let body: Record<string, unknown> = {};
  try {
    body = (await response.json()) as Record<string, unknown>;
    if (typeof body.error === "string") message = body.error;
  } catch {
    /* non-JSON error body: keep the status text */
  }
  if (response.status === 409 && body.current) {
    return new ConflictError(
      message,
      String(body.phs ?? ""),
      body.current as ReviewState,
    );
  }
  return new ApiError(response.status, message);
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base = "",
  ) {}

  private async request<T>(
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  project(): Promise<ProjectSummary> {
    return this.request("/api/project");
  }

  listPhs(filter?: { status?: string; scenario?: string }): Promise<PhsRow[]> {
    const params = new URLSearchParams();
    if (filter?.status) params.set("status", filter.status);
    if (filter?.scenario) params.set("scenario", filter.scenario);
    const query = params.toString();
    return this.request(`/api/phs${query ? `?${query}` : ""}`);
  }

  phsDetail(id: string): Promise<PhsDetail> {
    return this.request(`/api/phs/${encodeURIComponent(id)}`);
  }

  decide(id: string, body: DecisionRequest): Promise<DecisionResult> {
    return this.post(`/api/phs/${encodeURIComponent(id)}/decision`, body);
  }

  createHazard(body: HazardRequest): Promise<Hazard> {
    return this.post("/api/hazards", body);
  }

  trace(hazardId: string, catalog?: string): Promise<TraceLink[]> {
    return this.post(
      `/api/hazards/${encodeURIComponent(hazardId)}/trace`,
      catalog ? { catalog } : {},
    );
  }

  report(): Promise<Report> {
    return this.request("/api/report");
  }

  compare(catalog?: string): Promise<Comparison> {
    const query = catalog ? `?catalog=${encodeURIComponent(catalog)}` : "";
    return this.request(`/api/compare${query}`);
  }
}
