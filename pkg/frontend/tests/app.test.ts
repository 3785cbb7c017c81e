// Toolbar contract: preset buttons issue exactly the documented requests,
// and every displayed value is a verbatim server-response field (the
// client performs no analysis arithmetic).

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { DEFORMATION_PRESETS_M, ViewerApp, type SceneAdapter } from "../src/app";
import type { CylinderInstance, LosInstance, StrokeInstance } from "../src/overlayModels";

class FakeScene implements SceneAdapter {
  onPick: ((pick: any) => void) | null = null;
  cylinders: CylinderInstance[] = [];
  strokes: StrokeInstance[] = [];
  los: LosInstance | null = null;
  showCylinders(instances: CylinderInstance[]): void { this.cylinders = instances; }
  showTraffic(strokes: StrokeInstance[]): void { this.strokes = strokes; }
  showLos(inst: LosInstance): void { this.los = inst; }
  showMarker(): void {}
  showPolygonOutline(): void {}
  showRooms(): void {}
  clearOverlays(): void {}
}

interface Recorded { url: string; method: string; body: unknown }

function makeApp(responses: Record<string, unknown>) {
  const calls: Recorded[] = [];
  vi.stubGlobal("fetch", vi.fn(async (url: string, init?: RequestInit) => {
    calls.push({
      url: String(url),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : null,
    });
    const path = String(url).split("?")[0];
    const payload = responses[path] ?? {};
    return new Response(JSON.stringify(payload), { status: 200 });
  }));
  const host = document.createElement("div");
  document.body.appendChild(host);
  const scene = new FakeScene();
  const app = new ViewerApp(host, host, host, scene);
  app.setMetroLines(["metro-1"]);
  return { app, scene, calls, host };
}

beforeEach(() => { document.body.innerHTML = ""; });
afterEach(() => vi.unstubAllGlobals());

const DEFORMATION_RESPONSE = {
  line_id: "metro-1",
  buffer_m: 100,
  scale: 0.5,
  glyphs: [
    { point_id: "mon-0001", base: [10, 20, 3.25], height: 12.345, direction: "up",
      style: "cylinder", deformation_mm: 24.69, trend: "lifting" },
    { point_id: "mon-0002", base: [30, 40, 1.0], height: 2.5, direction: "down",
      style: "cylinder", deformation_mm: -5.0, trend: null },
  ],
  skipped: ["mon-0099"],
};

describe("deformation presets", () => {
  it.each(DEFORMATION_PRESETS_M)("the %im preset issues the documented request", async (preset) => {
    const { calls, host } = makeApp({ "/analysis/deformation": DEFORMATION_RESPONSE });
    host.querySelector<HTMLButtonElement>(`#deformation-${preset}`)!.click();
    await vi.waitFor(() => expect(calls.length).toBe(1));
    expect(calls[0]).toEqual({
      url: "/analysis/deformation",
      method: "POST",
      body: { line_id: "metro-1", buffer_m: preset, scale: 0.5 },
    });
  });

  it("renders cylinder heights verbatim from the response (no client math)", async () => {
    const { scene, host } = makeApp({ "/analysis/deformation": DEFORMATION_RESPONSE });
    host.querySelector<HTMLButtonElement>("#deformation-100")!.click();
    await vi.waitFor(() => expect(scene.cylinders.length).toBe(2));
    // heights and directions echo the server payload exactly
    expect(scene.cylinders.map((c) => c.height)).toEqual([12.345, 2.5]);
    expect(scene.cylinders[0].aboveGround).toBe(true);
    expect(scene.cylinders[1].aboveGround).toBe(false);
    // the panel shows the server's numbers, not recomputed ones
    const text = host.querySelector(".panel")!.textContent!;
    expect(text).toContain("24.69 mm up");
    expect(text).toContain("trend lifting");
    expect(text).toContain("mon-0099");
  });
});

describe("value traceability", () => {
  it("sunshine hours displayed verbatim", async () => {
    const { app, host } = makeApp({
      "/analysis/sunlight": {
        point: [5, 6, 1.5], date: "2026-06-21", step_minutes: 10,
        lit_intervals: [["2026-06-21T06:00:00+00:00", "2026-06-21T18:10:00+00:00"]],
        sunshine_hours: 12.1666666,
      },
    });
    host.querySelector<HTMLButtonElement>("#sunlight-pick")!.click();
    app["handlePick"]({ kind: "ground", x: 5, y: 6, z: 0 });
    await vi.waitFor(() => {
      expect(host.querySelector(".panel")!.textContent).toContain("12.1666666");
    });
    expect(host.querySelector<HTMLElement>(".panel")!.dataset.sunshineHours)
      .toBe("12.1666666");
  });

  it("population estimate displayed verbatim", async () => {
    const { app, host } = makeApp({ "/analysis/population": { population: 1234.5678 } });
    host.querySelector<HTMLButtonElement>("#population-draw")!.click();
    for (const [x, y] of [[0, 0], [100, 0], [100, 100]] as [number, number][]) {
      app["handlePick"]({ kind: "ground", x, y, z: 0 });
    }
    host.querySelector<HTMLButtonElement>("#population-finish")!.click();
    await vi.waitFor(() => {
      expect(host.querySelector<HTMLElement>(".panel")!.dataset.population)
        .toBe("1234.5678");
    });
  });

  it("forecast values displayed verbatim", async () => {
    const { host } = makeApp({
      "/stations/station-01/forecast": {
        station_id: "station-01", horizon: 3,
        predicted: [101.25, 99.5, 100.125], method_tag: "seasonal_ma_blend(P=168,alpha=0.3,k=168)",
      },
    });
    host.querySelector<HTMLButtonElement>("#forecast-run")!.click();
    await vi.waitFor(() => {
      expect(host.querySelector<HTMLElement>(".panel")!.dataset.forecast)
        .toBe("[101.25,99.5,100.125]");
    });
    expect(host.querySelector(".panel")!.textContent).toContain("101.25, 99.5, 100.125");
  });

  it("LOS verdict comes from the response fields", async () => {
    const { app, scene, host } = makeApp({
      "/analysis/los": { visible: false, blocker_id: "bldg-000123",
                         blocked_by_terrain: false, t: 0.42 },
    });
    host.querySelector<HTMLButtonElement>("#los-pick")!.click();
    app["handlePick"]({ kind: "ground", x: 0, y: 0, z: 0 });
    app["handlePick"]({ kind: "ground", x: 100, y: 100, z: 0 });
    await vi.waitFor(() => expect(scene.los).not.toBeNull());
    expect(host.querySelector(".panel")!.textContent).toContain("blocked by bldg-000123");
  });

  it("server problem documents surface as dismissible notices", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response(
      JSON.stringify({ error: { code: "invalid-argument", message: "buffer must be positive" } }),
      { status: 400 },
    )));
    const host = document.createElement("div");
    document.body.appendChild(host);
    const app = new ViewerApp(host, host, host, new FakeScene());
    app.setMetroLines(["metro-1"]);
    host.querySelector<HTMLButtonElement>("#deformation-100")!.click();
    await vi.waitFor(() => {
      expect(host.querySelector(".notice")).not.toBeNull();
    });
    expect(host.querySelector(".notice")!.textContent).toContain("buffer must be positive");
    host.querySelector<HTMLButtonElement>(".notice-dismiss")!.click();
    expect(host.querySelector(".notice")).toBeNull();
  });
});

describe("traffic playback", () => {
  it("slider drives /traffic/at and recolors from response classes", async () => {
    const current = {
      at: "2026-01-04T00:00:00+00:00", window_seconds: 900,
      segments: [{ id: "r1", class: "free", mode: "line", geometry: [[0, 0], [1, 1]] }],
    };
    const historical = {
      at: "2026-01-03T00:00:00+00:00", window_seconds: 1800,
      segments: [{ id: "r1", class: "congested", mode: "line", geometry: [[0, 0], [1, 1]] }],
    };
    const calls: Recorded[] = [];
    vi.stubGlobal("fetch", vi.fn(async (url: string) => {
      calls.push({ url: String(url), method: "GET", body: null });
      const payload = String(url).startsWith("/traffic/at") ? historical : current;
      return new Response(JSON.stringify(payload), { status: 200 });
    }));
    const host = document.createElement("div");
    document.body.appendChild(host);
    const scene = new FakeScene();
    const app = new ViewerApp(host, host, host, scene);

    app.startPolling();
    await vi.waitFor(() => expect(scene.strokes.length).toBe(1));
    expect(calls[0].url).toBe("/traffic/current?window=900&mode=line");
    const freeColor = scene.strokes[0].color;

    const slider = host.querySelector<HTMLInputElement>("#traffic-slider")!;
    slider.value = "96"; // 24 h back at 30-minute steps
    slider.dispatchEvent(new Event("input"));
    await vi.waitFor(() =>
      expect(calls.some((c) => c.url.startsWith("/traffic/at?t="))).toBe(true));
    const at = calls.find((c) => c.url.startsWith("/traffic/at?t="))!;
    expect(at.url).toContain("window=1800");
    expect(at.url).toContain(encodeURIComponent("2026-01-03T00:00:00.000Z"));
    await vi.waitFor(() => expect(scene.strokes[0].color).not.toBe(freeColor));
    app.stopPolling();
  });
});
