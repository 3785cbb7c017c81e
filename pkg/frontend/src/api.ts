// The only module that issues network requests. Every number shown in the
// UI comes from one of these responses; the viewer never computes analysis
// results itself.

import type {
  BuildingPayload,
  CompositionResponse,
  DeformationResponse,
  ForecastResponse,
  LayersResponse,
  LosResponse,
  PopulationResponse,
  ProblemDocument,
  SunlightResponse,
  TilePayload,
  TrafficResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let code = `http-${response.status}`;
    let message = response.statusText;
    try {
      const body = (await response.json()) as ProblemDocument;
      if (body?.error) {
        code = body.error.code;
        message = body.error.message;
      }
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

function post<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function getLayers(): Promise<LayersResponse> {
  return request("/layers");
}

export function patchLayer(id: string, visible: boolean): Promise<LayersResponse> {
  return request(`/layers/${encodeURIComponent(id)}`, {
    method: "PATCH",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ visible }),
  });
}

export function getTile(zoom: number, x: number, y: number): Promise<TilePayload> {
  return request(`/tiles/${zoom}/${x}/${y}`);
}

export function getTrafficCurrent(
  windowSeconds: number,
  mode: "line" | "plane",
): Promise<TrafficResponse> {
  return request(`/traffic/current?window=${windowSeconds}&mode=${mode}`);
}

export function getTrafficAt(
  isoTime: string,
  windowSeconds: number,
  mode: "line" | "plane",
): Promise<TrafficResponse> {
  const t = encodeURIComponent(isoTime);
  return request(`/traffic/at?t=${t}&window=${windowSeconds}&mode=${mode}`);
}

export function getForecast(stationId: string, horizon: number): Promise<ForecastResponse> {
  return request(`/stations/${encodeURIComponent(stationId)}/forecast?horizon=${horizon}`);
}

export function postSunlight(
  point: [number, number] | [number, number, number],
  date: string,
  step: number,
): Promise<SunlightResponse> {
  return post("/analysis/sunlight", { point, date, step });
}

/** Deformation along a metro line; 100 and 50 are the preset buffers. */
export function postDeformation(
  lineId: string,
  bufferM: number,
  scale?: number,
): Promise<DeformationResponse> {
  const body: Record<string, unknown> = { line_id: lineId, buffer_m: bufferM };
  if (scale !== undefined) body.scale = scale;
  return post("/analysis/deformation", body);
}

export function postLos(
  a: [number, number, number],
  b: [number, number, number],
): Promise<LosResponse> {
  return post("/analysis/los", { a, b });
}

export function postPopulation(polygon: [number, number][]): Promise<PopulationResponse> {
  return post("/analysis/population", { polygon });
}

export function getComposition(
  communityId: string,
  dimension: "age" | "education",
): Promise<CompositionResponse> {
  return request(
    `/communities/${encodeURIComponent(communityId)}/composition?dimension=${dimension}`,
  );
}

export function getBuilding(buildingId: string): Promise<BuildingPayload> {
  return request(`/buildings/${encodeURIComponent(buildingId)}`);
}
