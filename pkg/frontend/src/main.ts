// Bootstrap: wire the renderer, bird's-eye map, layer tree, toolbar and
// tile streaming against the engine's HTTP API.

import { getLayers } from "./api";
import { ViewerApp } from "./app";
import { BirdsEyeMap } from "./birdseye";
import { kindVisibility, LayerTreePanel } from "./layerTree";
import { CityScene3D } from "./scene3d";
import { coveringKeys, TileCache, zoomForViewRadius } from "./tiles";
import type { TilePayload } from "./types";

const left = document.getElementById("left-panel")!;
const top = document.getElementById("top-bar")!;
const right = document.getElementById("right-panel")!;
const main = document.getElementById("scene")!;
const noticeHost = document.getElementById("notice-host")!;

const scene = new CityScene3D(main);
const app = new ViewerApp(top, right, noticeHost, scene);
const birdsEye = new BirdsEyeMap(left, (x, y) => scene.panTo(x, y));
const layerPanel = new LayerTreePanel(
  left,
  (layers) => scene.setKindVisibility(kindVisibility(layers)),
  (err) => app.notices.showError(err),
);
const tiles = new TileCache();

let extent: [number, number, number, number] = [0, 0, 1, 1];
const DETAIL_ZOOM = 3; // matches `urbanlens serve --detail-zoom 3` for desk scenes

async function refreshTiles(): Promise<void> {
  const [minX, minY, maxX, maxY] = scene.viewFootprint();
  const radius = Math.max(maxX - minX, maxY - minY) / 2;
  const zoom = zoomForViewRadius(extent[2] - extent[0], radius, DETAIL_ZOOM);
  const keys = coveringKeys(extent, zoom, minX, minY, maxX, maxY);
  const settled = await Promise.allSettled(keys.map((k) => tiles.fetch(k)));
  const payloads: TilePayload[] = [];
  let failed = false;
  settled.forEach((result) => {
    if (result.status === "fulfilled") payloads.push(result.value);
    else failed = true;
  });
  // failed tiles leave their area empty this frame; retry shortly
  scene.showTiles(payloads);
  birdsEye.setViewport(minX, minY, maxX, maxY);
  if (failed) {
    setTimeout(() => refreshTiles().catch(() => undefined), 2000);
  }
}

let refreshQueued = false;
scene.onViewChange = () => {
  if (refreshQueued) return;
  refreshQueued = true;
  setTimeout(() => {
    refreshQueued = false;
    refreshTiles().catch((err) => app.notices.showError(err));
  }, 150);
};

async function boot(): Promise<void> {
  const layers = await getLayers();
  layerPanel.render(layers);
  scene.setKindVisibility(kindVisibility(layers));

  const root: TilePayload = await tiles.fetch({ zoom: 0, x: 0, y: 0 });
  extent = root.bounds;
  scene.setExtent(extent);
  birdsEye.setExtent(extent);
  birdsEye.ingestTile(root);
  scene.showTiles([root]);
  app.setMetroLines(root.metro_lines.map((m) => m.id));
  await refreshTiles();
  app.startPolling();
}

boot().catch((err) => app.notices.showError(err));
