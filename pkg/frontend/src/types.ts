// Mirrors of the service's JSON shapes. The engine is the single source of
// truth; nothing here recomputes efforts or multipliers.

export type Direction = "increasing" | "decreasing" | "none";

export interface FactorInfo {
  id: string;
  name: string;
  level_labels: string[];
  direction: Direction;
}

export interface RuleJson {
  antecedents: [string, number][];
  target: string;
  delta: number;
  note?: string;
}

export interface SchemaResponse {
  factors: FactorInfo[];
  model_binding: string;
  rules: RuleJson[];
}

/** A rating as the API accepts it: a level label or a point on [0, K-1]. */
export type Rating = number | string;

export interface FactorTrace {
  w: number[];
  w_bar: number[];
  fm: number;
}

export interface EstimationResult {
  effort_pm: number;
  product_em: number;
  multipliers: Record<string, number>;
  arf: Record<string, number>;
  trace: Record<string, FactorTrace>;
}

export interface WhatifPoint {
  rating: number;
  effort_pm: number;
}

export interface WhatifResponse {
  factor_id: string;
  points: WhatifPoint[];
}

export interface EstimateRequest {
  ratings: Record<string, Rating>;
  size: number;
  model_id?: string;
}

export interface ProjectPayload extends EstimateRequest {
  id: string;
  model_id: string;
  actual_effort: number;
  weight?: number;
}
