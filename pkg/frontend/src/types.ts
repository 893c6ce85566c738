/** Wire types for the scase HTTP API (docs/api.md, docs/schemas/). */

export type NodeKind =
  | "goal"
  | "strategy"
  | "solution"
  | "context"
  | "assumption"
  | "justification";

export interface CaseNode {
  id: string;
  kind: NodeKind;
  statement: string;
  p: number | null;
  cond_p: number | null;
  mode: "conjunctive" | "disjunctive";
  severity: string | null;
  step: number | null;
  template: string | null;
  status: "active" | "invalidated";
  monitored: boolean;
  prereq: string[];
  waives: string[];
  collective: string[];
  fault_tolerant: boolean;
}

export interface CaseDocument {
  schema_version: number;
  title: string;
  macrosystem: string;
  deployment_window: string;
  thresholds: Record<string, number>;
  root: string;
  nodes: CaseNode[];
  support_edges: [string, string][];
  context_edges: [string, string][];
}

export interface OutcomeRisk {
  severity: string;
  risk: number;
  threshold: number | null;
  verdict: "pass" | "fail";
}

export interface Finding {
  code?: string;
  rule?: string;
  severity: "error" | "warning";
  node?: string | null;
  subject?: string;
  message: string;
}

export interface EstimateDocument {
  schema_version: number;
  root_validity: number;
  overall_risk: number;
  node_validity: Record<string, number>;
  outcome_risks: Record<string, OutcomeRisk>;
  findings: Finding[];
  sensitivities?: Record<string, { risk_minus: number; risk_plus: number }>;
}

export interface MatrixDocument {
  schema_version: number;
  name: string;
  likelihood_levels: { name: string; upper_bound: number }[];
  severity_levels: string[];
  grid: Record<string, Record<string, "acceptable" | "review" | "unacceptable">>;
}

export interface ChallengeDocument {
  id: string;
  target: string;
  claim: string;
  status: "open" | "rebutted" | "conceded";
  rebuttal: string | null;
}

export interface ChallengesDocument {
  schema_version: number;
  challenge_sets: { case_title: string; challenges: ChallengeDocument[] }[];
}

export interface InvalidateResponse {
  schema_version: number;
  invalidated: string[];
  estimate: EstimateDocument | null;
}

export interface EvaluationRequest {
  overrides: Record<string, number>;
  include_sensitivity?: boolean;
  sensitivity_delta?: number;
}
