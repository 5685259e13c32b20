/** Payload shapes of the matching service. Mirrored verbatim; never extended locally. */

export type CandidateStatus = "proposed" | "confirmed" | "rejected";

export interface CandidateView {
  id: string;
  source_table: string;
  target_table: string;
  score: number;
  provenance: "schema" | "instance" | "combined";
  direction_ratios: [number, number] | null;
  status: CandidateStatus;
  evidence: [string, string, number][];
}

export interface RunSummary {
  run_id: string;
  phase: string;
  candidate_count: number;
  correspondence_count: number;
  decision_count: number;
}

export interface CandidateListing {
  run_id: string;
  candidates: CandidateView[];
}

export interface Correspondence {
  source: [string, string];
  target: [string, string];
  score: number;
  matcher: string;
}

export interface CorrespondenceListing {
  run_id: string;
  correspondences: Correspondence[];
  rejected_table_pairs: [string, string][];
}

export interface ServiceError {
  code: string;
  message: string;
}

export type Decision = "confirm" | "reject";
