// Response shapes of the engine's HTTP API (see docs/http-api.md).

export interface LayerNode {
  id: string;
  name: string;
  kind: "terrain" | "buildings" | "roads" | "metro" | "communities" | "analysis-result";
  visible: boolean;
  children: LayerNode[];
}

export interface LayersResponse {
  root: LayerNode;
  effective: Record<string, boolean>;
}

export interface MeshPayload {
  vertices: [number, number, number][];
  triangles: [number, number, number][];
}

export interface BuildingPayload {
  id: string;
  footprint: [number, number][];
  base_elevation: number;
  height: number;
  rooms: [number, number, number, number, number, number][];
  mesh: MeshPayload | null;
}

export interface PiecesPayload {
  id: string;
  pieces: [number, number][][];
}

export interface TerrainPatchPayload {
  origin: [number, number];
  cell_size: number;
  n_cols: number;
  n_rows: number;
  elevations: number[];
}

export interface TilePayload {
  key: { zoom: number; x: number; y: number };
  bounds: [number, number, number, number];
  detail: boolean;
  buildings: BuildingPayload[];
  roads: PiecesPayload[];
  metro_lines: PiecesPayload[];
  terrain: TerrainPatchPayload;
}

export type CongestionClass = "free" | "slow" | "congested" | "unknown";

export interface TrafficSegment {
  id: string;
  class: CongestionClass;
  mode: "line" | "plane";
  geometry: [number, number][];
}

export interface TrafficResponse {
  at: string | null;
  window_seconds: number;
  segments: TrafficSegment[];
}

export interface ForecastResponse {
  station_id: string;
  horizon: number;
  predicted: number[];
  method_tag: string;
}

export interface SunlightResponse {
  point: [number, number, number];
  date: string;
  step_minutes: number;
  lit_intervals: [string, string][];
  sunshine_hours: number;
}

export interface GlyphPayload {
  point_id: string;
  base: [number, number, number];
  height: number;
  direction: "up" | "down" | "flat";
  style: "cylinder" | "point";
  deformation_mm: number;
  trend: "lifting" | "sinking" | "stable" | null;
}

export interface DeformationResponse {
  line_id: string;
  buffer_m: number;
  scale: number;
  glyphs: GlyphPayload[];
  skipped: string[];
}

export interface LosResponse {
  visible: boolean;
  blocker_id: string | null;
  blocked_by_terrain: boolean;
  t: number | null;
}

export interface PopulationResponse {
  population: number;
}

export interface CompositionResponse {
  community_id: string;
  dimension: "age" | "education";
  population: number;
  fractions: Record<string, number>;
}

export interface ProblemDocument {
  error: { code: string; message: string; correlation_id?: string };
}
