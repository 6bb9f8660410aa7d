/** Payload shapes as the review service returns them, verbatim. */

export type ReviewStatus = "generated" | "hazardous" | "not_hazardous";

export type TargetKind =
  | "other_traffic_participant"
  | "passengers"
  | "infrastructure_law"
  | "other";

export const TARGET_KINDS: readonly TargetKind[] = [
  "other_traffic_participant",
  "passengers",
  "infrastructure_law",
  "other",
];

export interface ReviewState {
  status: ReviewStatus;
  rationale: string;
  reviewer: string;
  decided_at: string;
  version: number;
}

export interface PhsRow {
  id: string;
  segment: string;
  origin: string;
  deviation: string;
  instance_label: string;
  source_malfunction: string | null;
  review: ReviewState;
  scenario: string;
  hazard_ids: string[];
}

export interface Hazard {
  id: string;
  phs: string;
  source: string;
  target: string;
  initiating_mechanism: string;
  description: string;
  target_kind: TargetKind;
}

export interface PhsDetail extends PhsRow {
  scenario_title?: string;
  desired_behavior?: string;
  segment_order?: number;
  deviation_label?: string;
  hazards: Hazard[];
}

export interface TraceLink {
  hazard: string;
  malfunction: string;
  derivation: string;
}

export interface ProjectSummary {
  schema_version: number;
  name: string;
  store_version: number;
  counts: { phs: number; hazards: number; traces: number; decisions: number };
  taxonomy: { name: string; classes: unknown[] };
}

export interface Comparison {
  malfunction_route_total: number;
  malfunction_route_applicable: number;
  deviation_route_total: number;
  deviation_route_unfiltered: number;
  distinct_behaviors: number;
  reduction_ratio: number;
  unmapped_malfunctions: string[];
  deviations_without_malfunction: string[];
  coverage_gaps: [string, string][];
}

export interface Report {
  project: string;
  store_version: number;
  status_counts: Record<ReviewStatus, number>;
  hazards_by_target: Record<TargetKind, number>;
  scenario_deviations: Record<string, string[]>;
  orphaned: string[];
  total_phs: number;
  total_hazards: number;
  total_traces: number;
  decisions_recorded: number;
  comparisons: Record<string, Comparison>;
}

export interface DecisionRequest {
  new_status: ReviewStatus;
  expected_version: number;
  rationale?: string;
  reviewer?: string;
}

/** Decision response: the committed review state plus its row id. */
export interface DecisionResult extends ReviewState {
  phs: string;
}

export interface HazardRequest {
  phs_id: string;
  source: string;
  target: string;
  initiating_mechanism: string;
  description?: string;
  target_kind?: TargetKind;
}
