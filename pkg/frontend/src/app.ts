// Viewer controller: analysis toolbar, result panels, traffic playback.
// Renders through a narrow SceneAdapter so tests can drive the real DOM
// and request flow with a fake renderer. Every displayed number is a
// verbatim field of a server response.

import * as api from "./api";
import { NoticeArea } from "./notices";
import {
  deformationInstances,
  losInstance,
  trafficInstance,
  type CylinderInstance,
  type LosInstance,
  type StrokeInstance,
} from "./overlayModels";
import type { Pick } from "./scene3d";
import type { DeformationResponse, TrafficResponse } from "./types";

export interface SceneAdapter {
  onPick: ((pick: Pick) => void) | null;
  showCylinders(instances: CylinderInstance[]): void;
  showTraffic(strokes: StrokeInstance[]): void;
  showLos(inst: LosInstance): void;
  showMarker(x: number, y: number, z: number): void;
  showPolygonOutline(points: [number, number][], close: boolean): void;
  showRooms(rooms: [number, number, number, number, number, number][]): void;
  clearOverlays(): void;
}

export const DEFORMATION_PRESETS_M = [100, 50] as const;
export const TRAFFIC_POLL_MS = 5000;

type Mode = "idle" | "sunlight" | "los-a" | "los-b" | "population";

export class ViewerApp {
  readonly toolbar: HTMLElement;
  readonly panel: HTMLElement;
  readonly notices: NoticeArea;
  private scene: SceneAdapter;
  private mode: Mode = "idle";
  private losA: [number, number, number] | null = null;
  private polygonDraft: [number, number][] = [];
  private metroLineIds: string[] = [];
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private trafficMode: "line" | "plane" = "line";

  constructor(toolbarParent: HTMLElement, panelParent: HTMLElement,
              noticeParent: HTMLElement, scene: SceneAdapter) {
    this.scene = scene;
    this.notices = new NoticeArea(noticeParent);
    this.toolbar = document.createElement("div");
    this.toolbar.className = "toolbar";
    toolbarParent.appendChild(this.toolbar);
    this.panel = document.createElement("div");
    this.panel.className = "panel";
    panelParent.appendChild(this.panel);
    this.buildToolbar();
    scene.onPick = (pick) => this.handlePick(pick);
  }

  setMetroLines(ids: string[]): void {
    this.metroLineIds = ids;
    const select = this.toolbar.querySelector<HTMLSelectElement>("#deformation-line");
    if (select) {
      select.textContent = "";
      for (const id of ids) {
        const option = document.createElement("option");
        option.value = id;
        option.textContent = id;
        select.appendChild(option);
      }
    }
  }

  private buildToolbar(): void {
    this.toolbar.append(
      this.sunlightTool(),
      this.deformationTool(),
      this.losTool(),
      this.populationTool(),
      this.forecastTool(),
      this.trafficTool(),
      this.compositionTool(),
    );
  }

  private section(title: string): HTMLElement {
    const box = document.createElement("div");
    box.className = "tool";
    const label = document.createElement("span");
    label.className = "tool-title";
    label.textContent = title;
    box.appendChild(label);
    return box;
  }

  private button(text: string, onClick: () => void, id?: string): HTMLButtonElement {
    const b = document.createElement("button");
    b.textContent = text;
    if (id) b.id = id;
    b.addEventListener("click", onClick);
    return b;
  }

  private input(id: string, value: string, size = 10): HTMLInputElement {
    const el = document.createElement("input");
    el.id = id;
    el.value = value;
    el.size = size;
    return el;
  }

  private showPanel(title: string, lines: (string | HTMLElement)[]): void {
    this.panel.textContent = "";
    const h = document.createElement("h3");
    h.textContent = title;
    this.panel.appendChild(h);
    for (const line of lines) {
      if (typeof line === "string") {
        const p = document.createElement("p");
        p.textContent = line;
        this.panel.appendChild(p);
      } else {
        this.panel.appendChild(line);
      }
    }
  }

  // ---------------------------------------------------------- sunlight

  private sunlightTool(): HTMLElement {
    const box = this.section("Sunlight");
    const date = this.input("sunlight-date", "2026-06-21");
    const step = this.input("sunlight-step", "10", 3);
    box.append(date, step, this.button("pick point", () => {
      this.mode = "sunlight";
      this.showPanel("Sunlight", ["Click a point in the scene."]);
    }, "sunlight-pick"));
    return box;
  }

  private async runSunlight(x: number, y: number, z: number): Promise<void> {
    const date = this.value("#sunlight-date");
    const step = parseInt(this.value("#sunlight-step"), 10);
    try {
      const report = await api.postSunlight([x, y, z], date, step);
      this.scene.showMarker(x, y, z);
      const intervals = report.lit_intervals
        .map(([a, b]) => `${a} → ${b}`);
      this.showPanel("Sunlight", [
        `date ${report.date}, step ${report.step_minutes} min`,
        `sunshine hours: ${report.sunshine_hours}`,
        ...(intervals.length ? intervals : ["no lit intervals"]),
      ]);
      this.panel.dataset.sunshineHours = String(report.sunshine_hours);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  // -------------------------------------------------------- deformation

  private deformationTool(): HTMLElement {
    const box = this.section("Deformation");
    const select = document.createElement("select");
    select.id = "deformation-line";
    for (const id of this.metroLineIds) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      select.appendChild(option);
    }
    const custom = this.input("deformation-buffer", "75", 5);
    const scale = this.input("deformation-scale", "0.5", 4);
    box.append(select);
    for (const preset of DEFORMATION_PRESETS_M) {
      box.append(this.button(`${preset}m`, () => {
        void this.runDeformation(preset);
      }, `deformation-${preset}`));
    }
    box.append(custom, this.button("run", () => {
      void this.runDeformation(parseFloat(custom.value));
    }, "deformation-run"), scale);
    return box;
  }

  private async runDeformation(bufferM: number): Promise<void> {
    const lineId = this.value("#deformation-line") || this.metroLineIds[0] || "";
    const scale = parseFloat(this.value("#deformation-scale") || "0.5");
    try {
      const response: DeformationResponse =
        await api.postDeformation(lineId, bufferM, scale);
      this.scene.showCylinders(deformationInstances(response));
      const lines = [
        `line ${response.line_id}, buffer ${response.buffer_m} m, scale ${response.scale}`,
        `${response.glyphs.length} glyphs`,
      ];
      if (response.skipped.length) {
        lines.push(`skipped (no history): ${response.skipped.join(", ")}`);
      }
      for (const g of response.glyphs.slice(0, 12)) {
        lines.push(
          `${g.point_id}: ${g.deformation_mm} mm ${g.direction}`
          + (g.trend ? `, trend ${g.trend}` : ""),
        );
      }
      this.showPanel("Deformation", lines);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  // ---------------------------------------------------------------- LOS

  private losTool(): HTMLElement {
    const box = this.section("Line of sight");
    box.append(this.button("pick A, B", () => {
      this.mode = "los-a";
      this.losA = null;
      this.showPanel("Line of sight", ["Click the first endpoint."]);
    }, "los-pick"));
    return box;
  }

  private async runLos(b: [number, number, number]): Promise<void> {
    if (!this.losA) return;
    try {
      const response = await api.postLos(this.losA, b);
      const inst = losInstance(this.losA, b, response);
      this.scene.showLos(inst);
      this.showPanel("Line of sight", [inst.verdict]);
      this.panel.dataset.losVisible = String(response.visible);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  // --------------------------------------------------------- population

  private populationTool(): HTMLElement {
    const box = this.section("Population");
    box.append(
      this.button("draw polygon", () => {
        this.mode = "population";
        this.polygonDraft = [];
        this.showPanel("Population", ["Click vertices, then finish."]);
      }, "population-draw"),
      this.button("finish", () => void this.runPopulation(), "population-finish"),
    );
    return box;
  }

  private async runPopulation(): Promise<void> {
    this.mode = "idle";
    if (this.polygonDraft.length < 3) {
      this.notices.show("population query needs at least 3 vertices");
      return;
    }
    try {
      const response = await api.postPopulation(this.polygonDraft);
      this.scene.showPolygonOutline(this.polygonDraft, true);
      this.showPanel("Population", [`estimated population: ${response.population}`]);
      this.panel.dataset.population = String(response.population);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  // ----------------------------------------------------------- forecast

  private forecastTool(): HTMLElement {
    const box = this.section("Forecast");
    const station = this.input("forecast-station", "station-01", 10);
    const horizon = this.input("forecast-horizon", "24", 4);
    box.append(station, horizon, this.button("run", () => {
      void this.runForecast(station.value, parseInt(horizon.value, 10));
    }, "forecast-run"));
    return box;
  }

  private async runForecast(stationId: string, horizon: number): Promise<void> {
    try {
      const response = await api.getForecast(stationId, horizon);
      this.showPanel("Forecast", [
        `${response.station_id}, ${response.horizon} steps (${response.method_tag})`,
        response.predicted.join(", "),
      ]);
      this.panel.dataset.forecast = JSON.stringify(response.predicted);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  // ------------------------------------------------------------ traffic

  private trafficTool(): HTMLElement {
    const box = this.section("Traffic");
    const mode = document.createElement("select");
    mode.id = "traffic-mode";
    for (const value of ["line", "plane"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      mode.appendChild(option);
    }
    mode.addEventListener("change", () => {
      this.trafficMode = mode.value as "line" | "plane";
    });
    const slider = document.createElement("input");
    slider.type = "range";
    slider.id = "traffic-slider";
    slider.min = "0";
    slider.max = "144";       // 72 h of history in 30-minute steps
    slider.value = "144";
    slider.addEventListener("input", () => {
      void this.runTrafficAt(parseInt(slider.value, 10));
    });
    box.append(
      mode,
      this.button("live", () => this.startPolling(), "traffic-live"),
      this.button("stop", () => this.stopPolling(), "traffic-stop"),
      slider,
    );
    return box;
  }

  private latestIso: string | null = null;

  private async runTrafficCurrent(): Promise<void> {
    try {
      const response = await api.getTrafficCurrent(900, this.trafficMode);
      this.latestIso = response.at;
      this.applyTraffic(response);
    } catch (err) {
      this.stopPolling();
      this.notices.showError(err);
    }
  }

  private async runTrafficAt(sliderStep: number): Promise<void> {
    this.stopPolling();
    if (!this.latestIso) {
      await this.runTrafficCurrent();
      if (!this.latestIso) return;
    }
    const end = new Date(this.latestIso).getTime();
    const t = new Date(end - (144 - sliderStep) * 30 * 60 * 1000).toISOString();
    try {
      const response = await api.getTrafficAt(t, 1800, this.trafficMode);
      this.applyTraffic(response);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  private applyTraffic(response: TrafficResponse): void {
    this.scene.showTraffic(response.segments.map(trafficInstance));
    const counts: Record<string, number> = {};
    for (const segment of response.segments) {
      counts[segment.class] = (counts[segment.class] ?? 0) + 1;
    }
    const summary = Object.entries(counts)
      .map(([cls, count]) => `${cls}: ${count}`).join(", ");
    this.showPanel("Traffic", [`at ${response.at ?? "n/a"}`, summary]);
  }

  startPolling(): void {
    this.stopPolling();
    void this.runTrafficCurrent();
    this.pollTimer = setInterval(() => void this.runTrafficCurrent(), TRAFFIC_POLL_MS);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  // -------------------------------------------------------- composition

  private compositionTool(): HTMLElement {
    const box = this.section("Community");
    const community = this.input("composition-id", "comm-00-00", 10);
    const dimension = document.createElement("select");
    dimension.id = "composition-dimension";
    for (const value of ["age", "education"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      dimension.appendChild(option);
    }
    box.append(community, dimension, this.button("run", () => {
      void this.runComposition(community.value,
                               dimension.value as "age" | "education");
    }, "composition-run"));
    return box;
  }

  private async runComposition(communityId: string,
                               dimension: "age" | "education"): Promise<void> {
    try {
      const response = await api.getComposition(communityId, dimension);
      this.showPanel("Composition", [
        `${response.community_id} (${response.dimension}), population ${response.population}`,
        ...Object.entries(response.fractions).map(([label, f]) => `${label}: ${f}`),
      ]);
      this.panel.dataset.fractions = JSON.stringify(response.fractions);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  // ------------------------------------------------------------ picking

  private handlePick(pick: Pick): void {
    if (pick.kind === "building") {
      void this.drillIntoBuilding(pick.id);
      return;
    }
    const { x, y, z } = pick;
    switch (this.mode) {
      case "sunlight":
        this.mode = "idle";
        void this.runSunlight(x, y, z + 1.5);
        break;
      case "los-a":
        this.losA = [x, y, z + 1.5];
        this.mode = "los-b";
        this.showPanel("Line of sight", ["Click the second endpoint."]);
        break;
      case "los-b":
        this.mode = "idle";
        void this.runLos([x, y, z + 1.5]);
        break;
      case "population":
        this.polygonDraft.push([x, y]);
        this.scene.showPolygonOutline(this.polygonDraft, false);
        break;
      default:
        break;
    }
  }

  private async drillIntoBuilding(id: string): Promise<void> {
    try {
      const body = await api.getBuilding(id);
      this.scene.showRooms(body.rooms);
      this.showPanel("Building", [
        `${body.id}: height ${body.height} m, base ${body.base_elevation} m`,
        `${body.rooms.length} room(s)`,
      ]);
    } catch (err) {
      this.notices.showError(err);
    }
  }

  private value(selector: string): string {
    return this.toolbar.querySelector<HTMLInputElement>(selector)?.value ?? "";
  }
}
