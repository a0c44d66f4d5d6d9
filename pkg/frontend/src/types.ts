// Wire types mirroring the service JSON exactly.

export type PrefValue = "include" | "exclude";
export type TriState = PrefValue | "unstated";
export type Phase =
  | "elicitation"
  | "prediction"
  | "aggregation"
  | "negotiation"
  | "diagnosis"
  | "complete";

export interface TreeNode {
  feature: string;
  parent: string | null;
  relation: "root" | "mandatory" | "optional" | "or" | "alt";
}

export interface ModelView {
  name: string;
  root: string;
  features: string[];
  tree: TreeNode[];
  groups: { parent: string; kind: "or" | "alt"; members: string[] }[];
  constraints: { id: number; text: string; importance: number }[];
  text: string;
}

export interface Conflict {
  feature: string;
  positions: Record<string, PrefValue>;
  provenance: Record<string, "stated" | "predicted">;
  status: "open" | "resolved";
  resolved_value: PrefValue | null;
}

export interface Proposal {
  id: string;
  feature: string;
  value: PrefValue;
  proposer: string;
  rationale: string;
  acceptances: string[];
}

export interface DiagnosisRow {
  retract: { feature: string; value: PrefValue }[];
  member_adaptations: Record<string, number> | null;
  group_score: number | null;
}

export interface DiagnosisView {
  complete: boolean | null;
  diagnoses: DiagnosisRow[];
}

export interface Snapshot {
  id: string;
  version: number;
  phase: Phase;
  model_id: string | null;
  matrix_ids: Record<string, string>;
  members: string[];
  model: ModelView;
  stated: Record<string, Record<string, PrefValue>>;
  predicted: Record<string, Record<string, number>>;
  visited: Record<string, number[]>;
  decisions: Record<string, PrefValue>;
  conflicts: Conflict[];
  proposals: Proposal[];
  diagnoses: DiagnosisView;
  prediction_threshold: number;
}

export interface Pattern {
  kind: "suggest_alternative" | "cite_constraint" | "split_decision";
  feature: string;
  alternative: string | null;
  text: string;
  evidence: number[];
}

export interface NextConstraint {
  version: number;
  phase: Phase;
  constraint: number | null;
  group_score: number | null;
  tie_break_used: "none" | "importance" | "lexicographic" | null;
}

export type Change =
  | { kind: "set_preference"; member: string; feature: string; value: TriState }
  | { kind: "add_feature"; feature: string; parent: string; relation: "mandatory" | "optional" }
  | { kind: "add_constraint"; expr: string };
