// 2D bird's-eye overview: roads, metro, and the 3D camera's ground
// footprint. Clicking pans the camera there.

import type { TilePayload } from "./types";

export class BirdsEyeMap {
  private canvas: HTMLCanvasElement;
  private extent: [number, number, number, number] = [0, 0, 1, 1];
  private roads: [number, number][][] = [];
  private metro: [number, number][][] = [];
  private viewport: [number, number, number, number] | null = null;

  constructor(parent: HTMLElement, onPick: (x: number, y: number) => void,
              size = 220) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = size;
    this.canvas.height = size;
    this.canvas.className = "birdseye";
    parent.appendChild(this.canvas);
    this.canvas.addEventListener("click", (ev) => {
      const rect = this.canvas.getBoundingClientRect();
      const u = (ev.clientX - rect.left) / rect.width;
      const v = (ev.clientY - rect.top) / rect.height;
      const [x0, y0, x1, y1] = this.extent;
      onPick(x0 + u * (x1 - x0), y1 - v * (y1 - y0));
    });
  }

  setExtent(extent: [number, number, number, number]): void {
    this.extent = extent;
    this.draw();
  }

  ingestTile(tile: TilePayload): void {
    if (tile.key.zoom === 0) {
      this.roads = tile.roads.flatMap((r) => r.pieces);
      this.metro = tile.metro_lines.flatMap((m) => m.pieces);
      this.draw();
    }
  }

  /** Ground rectangle the 3D camera currently looks at (scene meters). */
  setViewport(minX: number, minY: number, maxX: number, maxY: number): void {
    this.viewport = [minX, minY, maxX, maxY];
    this.draw();
  }

  private toPx(x: number, y: number): [number, number] {
    const [x0, y0, x1, y1] = this.extent;
    return [
      ((x - x0) / (x1 - x0)) * this.canvas.width,
      (1 - (y - y0) / (y1 - y0)) * this.canvas.height,
    ];
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.fillStyle = "#17202b";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);

    const stroke = (paths: [number, number][][], style: string, width: number) => {
      ctx.strokeStyle = style;
      ctx.lineWidth = width;
      for (const path of paths) {
        ctx.beginPath();
        path.forEach(([x, y], i) => {
          const [px, py] = this.toPx(x, y);
          if (i === 0) ctx.moveTo(px, py);
          else ctx.lineTo(px, py);
        });
        ctx.stroke();
      }
    };
    stroke(this.roads, "#5a6b7d", 1);
    stroke(this.metro, "#d6336c", 2);

    if (this.viewport) {
      const [minX, minY, maxX, maxY] = this.viewport;
      const [px0, py1] = this.toPx(minX, minY);
      const [px1, py0] = this.toPx(maxX, maxY);
      ctx.strokeStyle = "#ffd43b";
      ctx.lineWidth = 1.5;
      ctx.strokeRect(px0, py0, px1 - px0, py1 - py0);
    }
  }
}
