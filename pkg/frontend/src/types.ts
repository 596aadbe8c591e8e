// Wire types mirroring the planning service's JSON bodies.
// The board never computes domain numbers itself; every value in these
// shapes originates from a service response.

export interface LevelDoc {
  name: string;
  scope_label: string;
  intensity: string;
  environment: string;
  staff: number;
  calendar_weeks: number;
  dre: number;
}

export interface ScopeMatrixDoc {
  activities: string[];
  levels: string[];
  grid: Record<string, Record<string, string>>;
}

export interface PlanDocument {
  schema_version: number;
  prediction: Record<string, unknown>;
  levels: LevelDoc[];
  scope_matrix: ScopeMatrixDoc;
  selected_level: string | null;
  options: Record<string, unknown>;
}

export interface MatrixRow {
  level: string;
  scope_label: string;
  intensity: string;
  environment: string;
  staff: number;
  staff_weeks: number;
  calendar_weeks: number;
  dre: number;
  delivered_defects_exact: number;
  delivered_defects_display: number;
}

export interface Finding {
  severity: "error" | "warning";
  location: string;
  message: string;
}

export interface MatrixView {
  levels: string[];
  predicted: { method: string; nominal: number; low: number; high: number };
  rows: MatrixRow[];
  findings: Finding[];
}

export interface LevelDelta {
  delivered_defects: number;
  staff_weeks: number;
  calendar_weeks: number;
}

export interface ScenarioResult {
  name: string;
  selected_level: string | null;
  base_selected_level: string | null;
  matrix: MatrixView;
  deltas: Record<string, LevelDelta>;
  selection_delta: number | null;
}

export interface ComparisonView {
  levels: string[];
  scenarios: {
    name: string;
    delivered_defects: Record<string, number>;
    staff_weeks: Record<string, number>;
    calendar_weeks: Record<string, number>;
  }[];
}

export interface ApiErrorBody {
  error: string;
  message: string;
  location?: string;
}
