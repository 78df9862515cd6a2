// Wire types for the /v1 API.

export type Role = "clinical" | "non_clinical";

export interface Session {
  token: string;
  user: string;
  role: Role;
}

export interface FilterSlot {
  name: string;
  field: string;
  type: string;
  required: boolean;
}

export interface PanelEntry {
  id: string;
  title: string;
  viz: "table" | "bar" | "line" | "map_choropleth_by_borough" | "histogram" | "stat";
  index: string;
  filter_slots: string[];
  columns: string[];
  drilldown: Drilldown | null;
}

export interface Drilldown {
  target?: string;
  carry?: string[];
  patient_chart?: boolean;
  patient_field?: string;
  deep_link_template?: string;
}

export interface DashboardEntry {
  id: string;
  category: string;
  title: string;
  description: string;
  filter_schema: FilterSlot[];
  panels: PanelEntry[];
}

export type Catalog = Record<string, DashboardEntry[]>;

export interface Bucket {
  key: (string | number)[];
  count: number;
  metric?: number | null;
}

export interface PanelPayload {
  dashboard: string;
  panel: string;
  title: string;
  viz: PanelEntry["viz"];
  columns: string[];
  rows?: Record<string, unknown>[];
  buckets?: Bucket[];
  highlights?: Record<string, string[]>;
  stat?: number | null;
  total: number;
  drilldown?: Drilldown | null;
  audit_id: string;
}

export interface ChartBundle {
  patient: Record<string, unknown>;
  checklist: { measures: Record<string, { status: string; last_date?: string }> ; complete_count: number };
  medication_summary: { items: { canonical: string; drug_class: string; tag: string; evidence: unknown[] }[] };
  catalogues: Record<string, { when: string; kind: string; detail: Record<string, unknown>; snippet?: string }[]>;
  deep_link?: string;
  audit_id: string;
}

export interface TimeRange {
  from?: string;
  to?: string;
}
