import { postEstimate } from "./api.js";
import type { EstimationResult, Rating, SchemaResponse } from "./types.js";

export const DEBOUNCE_MS = 150;

export interface StoreOptions {
  /** Quiet time after the last input change before a request fires. */
  debounceMs?: number;
  onResult: (result: EstimationResult) => void;
  onError: (message: string) => void;
}

function initialRating(labels: string[]): number {
  const nominal = labels.indexOf("nominal");
  return nominal >= 0 ? nominal : (labels.length - 1) / 2;
}

/**
 * Holds the inputs and owns the estimate request lifecycle.
 *
 * Input changes are debounced; every request carries a sequence number and a
 * response is applied only if no newer response has been shown, so a burst of
 * changes can never leave a stale estimate on screen. The previous in-flight
 * request is aborted when a new one fires.
 */
export class EstimateStore {
  readonly ratings: Record<string, Rating> = {};
  size = 10;

  private readonly debounceMs: number;
  private readonly onResult: (result: EstimationResult) => void;
  private readonly onError: (message: string) => void;

  private nextSeq = 0;
  private appliedSeq = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;

  constructor(schema: SchemaResponse, options: StoreOptions) {
    for (const factor of schema.factors) {
      this.ratings[factor.id] = initialRating(factor.level_labels);
    }
    this.debounceMs = options.debounceMs ?? DEBOUNCE_MS;
    this.onResult = options.onResult;
    this.onError = options.onError;
  }

  setRating(factorId: string, value: Rating): void {
    this.ratings[factorId] = value;
    this.schedule();
  }

  setSize(size: number): void {
    this.size = size;
    this.schedule();
  }

  /** Fire immediately, bypassing the debounce (boot, after a rules save). */
  refreshNow(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.fire();
  }

  private schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.debounceMs);
  }

  private fire(): void {
    const seq = ++this.nextSeq;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    postEstimate(
      { ratings: { ...this.ratings }, size: this.size },
      controller.signal,
    ).then(
      (result) => {
        if (seq > this.appliedSeq) {
          this.appliedSeq = seq;
          this.onResult(result);
        }
      },
      (err: unknown) => {
        if (err instanceof DOMException && err.name === "AbortError") return;
        if (seq > this.appliedSeq) {
          this.onError(err instanceof Error ? err.message : String(err));
        }
      },
    );
  }
}
