// Pure mapping from analysis responses to render instructions. No
// arithmetic on analysis values happens here or in the renderer: heights,
// directions, classes and verdicts are taken verbatim from the server.

import type {
  DeformationResponse,
  GlyphPayload,
  LosResponse,
  TrafficSegment,
} from "./types";

export const LIFTING_COLOR = 0xe04f3f; // above ground
export const SINKING_COLOR = 0x3f7fe0; // below ground
export const FLAT_COLOR = 0xf0e040;

export const CLASS_COLORS: Record<string, number> = {
  free: 0x37b24d,
  slow: 0xf59f00,
  congested: 0xe03131,
  unknown: 0x868e96,
};

export interface CylinderInstance {
  pointId: string;
  center: [number, number, number]; // cylinder midpoint in scene coords
  height: number;                   // exactly the server glyph height
  radius: number;
  color: number;
  aboveGround: boolean;
  style: "cylinder" | "point";
}

/** Up cylinders sit on the terrain, down cylinders hang below it; the
 * height is the server's value, never recomputed from deformation. */
export function glyphInstance(glyph: GlyphPayload, radius = 4.0): CylinderInstance {
  const [x, y, z] = glyph.base;
  const above = glyph.direction !== "down";
  const half = glyph.height / 2;
  return {
    pointId: glyph.point_id,
    center: [x, y, above ? z + half : z - half],
    height: glyph.height,
    radius,
    color: glyph.direction === "up" ? LIFTING_COLOR
      : glyph.direction === "down" ? SINKING_COLOR : FLAT_COLOR,
    aboveGround: above,
    style: glyph.style,
  };
}

export function deformationInstances(response: DeformationResponse): CylinderInstance[] {
  return response.glyphs.map((g) => glyphInstance(g));
}

export interface StrokeInstance {
  id: string;
  kind: "line" | "plane";
  color: number;
  points: [number, number][];
}

export function trafficInstance(segment: TrafficSegment): StrokeInstance {
  return {
    id: segment.id,
    kind: segment.mode,
    color: CLASS_COLORS[segment.class] ?? CLASS_COLORS.unknown,
    points: segment.geometry,
  };
}

export interface LosInstance {
  a: [number, number, number];
  b: [number, number, number];
  color: number;
  verdict: string; // displayed verbatim from the response fields
}

export function losInstance(a: [number, number, number], b: [number, number, number],
                            response: LosResponse): LosInstance {
  const verdict = response.visible
    ? "visible"
    : response.blocker_id !== null
      ? `blocked by ${response.blocker_id}`
      : response.blocked_by_terrain ? "blocked by terrain" : "blocked";
  return {
    a, b,
    color: response.visible ? 0x37b24d : 0xe03131,
    verdict,
  };
}
