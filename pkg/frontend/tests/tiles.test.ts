// Tile streaming: concurrent requests for the same key share one fetch,
// and coverage math picks the right keys for a view rectangle.

import { afterEach, describe, expect, it, vi } from "vitest";

import { coveringKeys, keyString, TileCache, zoomForViewRadius } from "../src/tiles";

afterEach(() => vi.unstubAllGlobals());

function stubSlowTiles(): { count: () => number } {
  let calls = 0;
  vi.stubGlobal("fetch", vi.fn(async (url: string) => {
    calls += 1;
    await new Promise((resolve) => setTimeout(resolve, 10));
    const [, , z, x, y] = String(url).split("/");
    return new Response(JSON.stringify({
      key: { zoom: Number(z), x: Number(x), y: Number(y) },
      bounds: [0, 0, 100, 100], detail: false,
      buildings: [], roads: [], metro_lines: [],
      terrain: { origin: [0, 0], cell_size: 10, n_cols: 2, n_rows: 2,
                 elevations: [0, 0, 0, 0] },
    }), { status: 200 });
  }));
  return { count: () => calls };
}

describe("TileCache", () => {
  it("deduplicates in-flight requests per key", async () => {
    const fetches = stubSlowTiles();
    const cache = new TileCache();
    const key = { zoom: 2, x: 1, y: 3 };
    const [a, b, c] = await Promise.all([
      cache.fetch(key), cache.fetch(key), cache.fetch({ ...key }),
    ]);
    expect(fetches.count()).toBe(1);
    expect(a).toBe(b);
    expect(b).toBe(c);
  });

  it("serves repeat requests from the cache", async () => {
    const fetches = stubSlowTiles();
    const cache = new TileCache();
    await cache.fetch({ zoom: 1, x: 0, y: 0 });
    await cache.fetch({ zoom: 1, x: 0, y: 0 });
    expect(fetches.count()).toBe(1);
  });

  it("distinct keys fetch independently", async () => {
    const fetches = stubSlowTiles();
    const cache = new TileCache();
    await Promise.all([
      cache.fetch({ zoom: 1, x: 0, y: 0 }),
      cache.fetch({ zoom: 1, x: 1, y: 0 }),
    ]);
    expect(fetches.count()).toBe(2);
  });
});

describe("coverage math", () => {
  const EXTENT: [number, number, number, number] = [0, 0, 1000, 1000];

  it("zoom 0 has a single root key", () => {
    expect(coveringKeys(EXTENT, 0, 0, 0, 1000, 1000)).toEqual([{ zoom: 0, x: 0, y: 0 }]);
  });

  it("covers a quadrant at zoom 1", () => {
    const keys = coveringKeys(EXTENT, 1, 0, 0, 400, 400).map(keyString);
    expect(keys).toEqual(["1/0/0"]);
  });

  it("covers a straddling rectangle with all touched tiles", () => {
    const keys = coveringKeys(EXTENT, 1, 400, 400, 600, 600).map(keyString);
    expect(keys.sort()).toEqual(["1/0/0", "1/0/1", "1/1/0", "1/1/1"]);
  });

  it("clamps out-of-extent rectangles", () => {
    const keys = coveringKeys(EXTENT, 1, -500, -500, -100, -100).map(keyString);
    expect(keys).toEqual(["1/0/0"]);
  });

  it("zoom deepens as the view tightens", () => {
    expect(zoomForViewRadius(1000, 600, 5)).toBe(0);
    expect(zoomForViewRadius(1000, 200, 5)).toBe(2);
    expect(zoomForViewRadius(1000, 10, 3)).toBe(3); // capped at the detail zoom
  });
});
