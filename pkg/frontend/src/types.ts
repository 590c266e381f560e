// Payload shapes as served by the HTTP API. The client renders these
// verbatim and computes nothing itself.

export interface TaxonomyDimension {
  name: string;
  cardinality: "single" | "multi";
  characteristics: string[];
}

export interface TaxonomySublayer {
  name: string;
  dimensions: TaxonomyDimension[];
}

export interface TaxonomyLayer {
  name: string;
  sublayers: TaxonomySublayer[];
}

export interface Taxonomy {
  name: string;
  version: number;
  feature_width: number;
  layers: TaxonomyLayer[];
}

export interface RatingSchemaInfo {
  criteria: string[];
  scale_min: number;
  scale_max: number;
}

export type SchemaCatalog = Record<string, RatingSchemaInfo>;

export type Choices = Record<string, string[]>;

export interface ModelDraft {
  choices: Choices;
  free_text: Record<string, string>;
}

export interface ValidationFinding {
  code: string;
  dimension: string;
  message: string;
}

export interface RatingSheetPayload {
  scores: Record<string, number>;
  qualitative: Record<string, string>;
  crowd_kind?: string;
}

// A mentor's view of one task. The API only ever includes the mentor's
// own sheet here; there is no field for peers.
export interface MentorAssignment {
  assignment_id: string;
  round_id: string;
  venture_id: string;
  round_status: "open" | "closed";
  schema: string;
  model: {
    version: number;
    choices: Choices;
    free_text: Record<string, string>;
  };
  my_sheet: RatingSheetPayload | null;
}

export interface GuidanceInformative {
  criterion_means: Record<string, number>;
  composite: number;
  n_sheets: number;
  crowd_probability: number;
  machine_probability: number | null;
  machine_available: boolean;
  hybrid_probability: number;
  weights: Record<string, number>;
}

export interface GuidanceLineagePoint {
  round_id: string;
  composite: number | null;
  closed_at: number | null;
}

export interface GuidanceReport {
  venture_id: string;
  round_id: string;
  schema: string;
  informative: GuidanceInformative;
  suggestive: Record<string, string[]>;
  lineage: GuidanceLineagePoint[];
}

export interface RoundInfo {
  round_id: string;
  venture_id: string;
  model_version: number;
  schema: string;
  assignments: { assignment_id: string; mentor_id: string; match_score: number }[];
  status: string;
}
