// Shared test scaffolding: a canned schema and a hand-operated fetch mock.
import type {
  EstimationResult,
  FactorInfo,
  SchemaResponse,
  WhatifResponse,
} from "../src/types.js";

export const LEVELS = [
  "very_low",
  "low",
  "nominal",
  "high",
  "very_high",
  "extra_high",
];

export function makeSchema(factorCount: number): SchemaResponse {
  const factors: FactorInfo[] = [];
  for (let i = 1; i <= factorCount; i++) {
    const id = `f${String(i).padStart(2, "0")}`;
    factors.push({
      id,
      name: `Factor ${i}`,
      level_labels: [...LEVELS],
      direction: i % 2 === 0 ? "increasing" : "decreasing",
    });
  }
  return { factors, model_binding: "cocomo81_organic", rules: [] };
}

export function estimateResult(
  schema: SchemaResponse,
  effort: number,
): EstimationResult {
  const multipliers: Record<string, number> = {};
  const arf: Record<string, number> = {};
  const trace: EstimationResult["trace"] = {};
  for (const factor of schema.factors) {
    multipliers[factor.id] = 1.0;
    arf[factor.id] = 2.0;
    trace[factor.id] = { w: [0, 0, 1, 0, 0, 0], w_bar: [0, 0, 1, 0, 0, 0], fm: 1.0 };
  }
  return { effort_pm: effort, product_em: 1.0, multipliers, arf, trace };
}

export function whatifResponse(factorId: string): WhatifResponse {
  const points = [];
  for (let rating = 0; rating <= 5; rating++) {
    points.push({ rating, effort_pm: 30 + 4 * rating });
  }
  return { factor_id: factorId, points };
}

export interface FetchCall {
  path: string;
  init: RequestInit | undefined;
  body(): unknown;
  resolve(body: unknown, status?: number): void;
  reject(err: unknown): void;
}

/**
 * Replace global fetch with a mock whose calls stay pending until the test
 * settles them by hand. With `honorAbort` the promise rejects with an
 * AbortError when its signal fires, like real fetch; without it an aborted
 * request can still be resolved, which is how the tests prove the sequence
 * guard alone keeps stale responses off the screen.
 */
export function installFetch(options: { honorAbort?: boolean } = {}): FetchCall[] {
  const calls: FetchCall[] = [];
  const honorAbort = options.honorAbort ?? false;
  globalThis.fetch = ((path: string, init?: RequestInit) =>
    new Promise((resolvePromise, rejectPromise) => {
      const call: FetchCall = {
        path,
        init,
        body: () => JSON.parse(String(init?.body ?? "null")),
        resolve: (body, status = 200) => resolvePromise(jsonResponse(body, status)),
        reject: rejectPromise,
      };
      if (honorAbort && init?.signal) {
        init.signal.addEventListener("abort", () => {
          rejectPromise(new DOMException("The request was aborted.", "AbortError"));
        });
      }
      calls.push(call);
    })) as typeof fetch;
  return calls;
}

function jsonResponse(body: unknown, status: number): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: () => Promise.resolve(body),
  } as unknown as Response;
}

/** Let pending promise chains (fetch -> json -> handlers) run to completion. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 12; i++) await Promise.resolve();
}
