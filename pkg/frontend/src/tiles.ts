// Tile fetching with per-key in-flight de-duplication and a small cache.

import { getTile } from "./api";
import type { TilePayload } from "./types";

export interface TileKey {
  zoom: number;
  x: number;
  y: number;
}

export function keyString(k: TileKey): string {
  return `${k.zoom}/${k.x}/${k.y}`;
}

export class TileCache {
  private cache = new Map<string, TilePayload>();
  private inflight = new Map<string, Promise<TilePayload>>();
  fetchCount = 0;

  fetch(key: TileKey): Promise<TilePayload> {
    const ks = keyString(key);
    const cached = this.cache.get(ks);
    if (cached) return Promise.resolve(cached);
    const pending = this.inflight.get(ks);
    if (pending) return pending;
    this.fetchCount += 1;
    const promise = getTile(key.zoom, key.x, key.y)
      .then((tile) => {
        this.cache.set(ks, tile);
        return tile;
      })
      .finally(() => {
        this.inflight.delete(ks);
      });
    this.inflight.set(ks, promise);
    return promise;
  }

  clear(): void {
    this.cache.clear();
  }
}

/** Tile keys covering a ground rectangle at the given zoom. */
export function coveringKeys(
  extent: [number, number, number, number],
  zoom: number,
  minX: number, minY: number, maxX: number, maxY: number,
): TileKey[] {
  const n = 2 ** zoom;
  const width = (extent[2] - extent[0]) / n;
  const height = (extent[3] - extent[1]) / n;
  const clamp = (v: number) => Math.max(0, Math.min(n - 1, v));
  const x0 = clamp(Math.floor((minX - extent[0]) / width));
  const x1 = clamp(Math.floor((maxX - extent[0]) / width));
  const y0 = clamp(Math.floor((minY - extent[1]) / height));
  const y1 = clamp(Math.floor((maxY - extent[1]) / height));
  const keys: TileKey[] = [];
  for (let x = x0; x <= x1; x++) {
    for (let y = y0; y <= y1; y++) {
      keys.push({ zoom, x, y });
    }
  }
  return keys;
}

/** Zoom level for a camera distance: closer camera, deeper tiles. */
export function zoomForViewRadius(extentSize: number, viewRadius: number,
                                  detailZoom: number): number {
  let zoom = 0;
  while (extentSize / 2 ** (zoom + 1) > viewRadius && zoom < detailZoom) {
    zoom += 1;
  }
  return zoom;
}
