import type {
  EstimateRequest,
  EstimationResult,
  ProjectPayload,
  RuleJson,
  SchemaResponse,
  WhatifResponse,
} from "./types.js";

/** Non-2xx reply; `detail` carries the server's field-path message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(path, init);
  if (!resp.ok) {
    let detail = `request failed (${resp.status})`;
    try {
      const body = (await resp.json()) as { detail?: unknown };
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the generic message for non-JSON error bodies
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

function post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
}

export function getSchema(): Promise<SchemaResponse> {
  return request<SchemaResponse>("/api/schema");
}

export function postEstimate(
  body: EstimateRequest,
  signal?: AbortSignal,
): Promise<EstimationResult> {
  return post<EstimationResult>("/api/estimate", body, signal);
}

export function postWhatif(
  body: EstimateRequest & {
    sweep: { factor_id: string; from: number; to: number; steps: number };
  },
): Promise<WhatifResponse> {
  return post<WhatifResponse>("/api/whatif", body);
}

export function postProject(body: ProjectPayload): Promise<{ n: number }> {
  return post<{ n: number }>("/api/projects", body);
}

export function putRules(rules: RuleJson[]): Promise<{ rules: RuleJson[] }> {
  return request<{ rules: RuleJson[] }>("/api/rules", {
    method: "PUT",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ rules }),
  });
}
