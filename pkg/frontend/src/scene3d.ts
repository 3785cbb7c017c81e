// Three.js renderer: terrain patches, extruded buildings (server meshes at
// detail zoom), road/metro lines, analysis overlays, picking. Scene frame
// is x east / y north / z up, mapped to three's y-up as (x, z, -y).

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import type { CylinderInstance, LosInstance, StrokeInstance } from "./overlayModels";
import type { BuildingPayload, TilePayload } from "./types";

export type GroundPick = { kind: "ground"; x: number; y: number; z: number };
export type BuildingPick = { kind: "building"; id: string };
export type Pick = GroundPick | BuildingPick;

const toV3 = (x: number, y: number, z: number) => new THREE.Vector3(x, z, -y);

export class CityScene3D {
  readonly renderer: THREE.WebGLRenderer;
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private controls: OrbitControls;

  private groups: Record<string, THREE.Group> = {};
  private tileParts = new Map<string, THREE.Object3D[]>();
  private overlayGroup = new THREE.Group();
  private trafficGroup = new THREE.Group();
  private roomGroup = new THREE.Group();
  private buildingMeshes = new Map<string, THREE.Object3D>();
  private extent: [number, number, number, number] = [0, 0, 1000, 1000];

  onPick: ((pick: Pick) => void) | null = null;
  onViewChange: (() => void) | null = null;

  constructor(container: HTMLElement) {
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setSize(container.clientWidth, container.clientHeight);
    container.appendChild(this.renderer.domElement);
    this.scene.background = new THREE.Color(0x0d1420);

    this.camera = new THREE.PerspectiveCamera(
      55, container.clientWidth / container.clientHeight, 1, 100_000,
    );
    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.maxPolarAngle = Math.PI / 2 - 0.04; // stay above the ground
    this.controls.addEventListener("change", () => this.onViewChange?.());

    const ambient = new THREE.AmbientLight(0xffffff, 0.55);
    const sun = new THREE.DirectionalLight(0xffffff, 1.2);
    sun.position.set(1200, 2500, -800);
    this.scene.add(ambient, sun);

    for (const kind of ["terrain", "buildings", "roads", "metro", "communities",
                        "analysis-result"]) {
      this.groups[kind] = new THREE.Group();
      this.scene.add(this.groups[kind]);
    }
    this.groups["analysis-result"].add(this.overlayGroup, this.trafficGroup);
    this.groups["buildings"].add(this.roomGroup);

    this.renderer.domElement.addEventListener("click", (ev) => this.handleClick(ev));
    window.addEventListener("resize", () => {
      this.camera.aspect = container.clientWidth / container.clientHeight;
      this.camera.updateProjectionMatrix();
      this.renderer.setSize(container.clientWidth, container.clientHeight);
    });

    const animate = () => {
      requestAnimationFrame(animate);
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();
  }

  setExtent(extent: [number, number, number, number]): void {
    this.extent = extent;
    const cx = (extent[0] + extent[2]) / 2;
    const cy = (extent[1] + extent[3]) / 2;
    const span = Math.max(extent[2] - extent[0], extent[3] - extent[1]);
    this.camera.position.copy(toV3(cx, cy - span * 0.75, span * 0.6));
    this.controls.target.copy(toV3(cx, cy, 0));
    this.controls.update();
  }

  setKindVisibility(visibility: Record<string, boolean>): void {
    for (const [kind, group] of Object.entries(this.groups)) {
      group.visible = visibility[kind] ?? true;
    }
  }

  /** Replace currently shown tiles with the given set. */
  showTiles(tiles: TilePayload[]): void {
    const wanted = new Set(tiles.map((t) => `${t.key.zoom}/${t.key.x}/${t.key.y}`));
    for (const [key, parts] of this.tileParts) {
      if (!wanted.has(key)) {
        parts.forEach((part) => part.parent?.remove(part));
        this.tileParts.delete(key);
      }
    }
    for (const tile of tiles) {
      const key = `${tile.key.zoom}/${tile.key.x}/${tile.key.y}`;
      if (!this.tileParts.has(key)) {
        this.tileParts.set(key, this.buildTile(tile));
      }
    }
  }

  // each tile contributes one part per layer kind, so layer toggles and
  // tile eviction both stay trivial
  private buildTile(tile: TilePayload): THREE.Object3D[] {
    const terrain = this.terrainMesh(tile);
    this.groups["terrain"].add(terrain);

    const buildings = new THREE.Group();
    for (const payload of tile.buildings) {
      const mesh = this.buildingMesh(payload);
      mesh.userData.buildingId = payload.id;
      this.buildingMeshes.set(payload.id, mesh);
      buildings.add(mesh);
    }
    this.groups["buildings"].add(buildings);

    const roads = new THREE.Group();
    for (const road of tile.roads) {
      for (const piece of road.pieces) {
        roads.add(lineFromPoints(piece, 0x44566b, 0.5));
      }
    }
    this.groups["roads"].add(roads);

    const metro = new THREE.Group();
    for (const line of tile.metro_lines) {
      for (const piece of line.pieces) {
        metro.add(lineFromPoints(piece, 0xd6336c, 2.0));
      }
    }
    this.groups["metro"].add(metro);

    return [terrain, buildings, roads, metro];
  }

  private terrainMesh(tile: TilePayload): THREE.Mesh {
    const t = tile.terrain;
    const geometry = new THREE.PlaneGeometry(
      (t.n_cols - 1) * t.cell_size, (t.n_rows - 1) * t.cell_size,
      t.n_cols - 1, t.n_rows - 1,
    );
    const positions = geometry.attributes.position;
    for (let r = 0; r < t.n_rows; r++) {
      for (let c = 0; c < t.n_cols; c++) {
        const i = r * t.n_cols + c;
        positions.setXYZ(
          i,
          t.origin[0] + c * t.cell_size,
          t.origin[1] + (t.n_rows - 1 - r) * t.cell_size,
          t.elevations[(t.n_rows - 1 - r) * t.n_cols + c],
        );
      }
    }
    geometry.computeVertexNormals();
    const mesh = new THREE.Mesh(
      geometry,
      new THREE.MeshLambertMaterial({ color: 0x1e2b38, side: THREE.DoubleSide }),
    );
    mesh.rotation.x = -Math.PI / 2; // plane xy -> ground (x, -z), z -> up
    mesh.userData.isTerrain = true;
    return mesh;
  }

  private buildingMesh(b: BuildingPayload): THREE.Object3D {
    if (b.mesh) {
      const geometry = new THREE.BufferGeometry();
      const vertices = new Float32Array(b.mesh.vertices.length * 3);
      b.mesh.vertices.forEach(([x, y, z], i) => {
        vertices[3 * i] = x;
        vertices[3 * i + 1] = z;
        vertices[3 * i + 2] = -y;
      });
      geometry.setAttribute("position", new THREE.BufferAttribute(vertices, 3));
      geometry.setIndex(b.mesh.triangles.flat());
      geometry.computeVertexNormals();
      return new THREE.Mesh(
        geometry, new THREE.MeshLambertMaterial({ color: 0x8296ab }),
      );
    }
    // coarse zoom: extrude the footprint client-side (rendering, not analysis)
    const shape = new THREE.Shape(b.footprint.map(([x, y]) => new THREE.Vector2(x, y)));
    const geometry = new THREE.ExtrudeGeometry(shape, { depth: b.height, bevelEnabled: false });
    const mesh = new THREE.Mesh(
      geometry, new THREE.MeshLambertMaterial({ color: 0x6d7f93 }),
    );
    mesh.rotation.x = -Math.PI / 2;
    mesh.position.y = b.base_elevation;
    return mesh;
  }

  /** Room boxes for the building drill-down at detail zoom. */
  showRooms(rooms: [number, number, number, number, number, number][]): void {
    this.roomGroup.clear();
    for (const [x0, y0, z0, x1, y1, z1] of rooms) {
      const box = new THREE.Mesh(
        new THREE.BoxGeometry(x1 - x0, z1 - z0, y1 - y0),
        new THREE.MeshBasicMaterial({ color: 0x9ae6b4, wireframe: true }),
      );
      box.position.copy(toV3((x0 + x1) / 2, (y0 + y1) / 2, (z0 + z1) / 2));
      this.roomGroup.add(box);
    }
  }

  showCylinders(instances: CylinderInstance[]): void {
    this.overlayGroup.clear();
    for (const inst of instances) {
      let mesh: THREE.Mesh;
      if (inst.style === "point" || inst.height === 0) {
        mesh = new THREE.Mesh(
          new THREE.SphereGeometry(inst.radius * 0.8),
          new THREE.MeshLambertMaterial({ color: inst.color }),
        );
      } else {
        mesh = new THREE.Mesh(
          new THREE.CylinderGeometry(inst.radius, inst.radius, inst.height),
          new THREE.MeshLambertMaterial({ color: inst.color, transparent: true, opacity: 0.92 }),
        );
      }
      mesh.position.copy(toV3(...inst.center));
      this.overlayGroup.add(mesh);
    }
  }

  showTraffic(strokes: StrokeInstance[]): void {
    this.trafficGroup.clear();
    for (const stroke of strokes) {
      if (stroke.kind === "plane") {
        const shape = new THREE.Shape(stroke.points.map(([x, y]) => new THREE.Vector2(x, y)));
        const mesh = new THREE.Mesh(
          new THREE.ShapeGeometry(shape),
          new THREE.MeshBasicMaterial({ color: stroke.color, transparent: true, opacity: 0.65 }),
        );
        mesh.rotation.x = -Math.PI / 2;
        mesh.position.y = 0.8; // hover just above the ground
        this.trafficGroup.add(mesh);
      } else {
        this.trafficGroup.add(lineFromPoints(stroke.points, stroke.color, 1.5, 1.2));
      }
    }
  }

  showLos(inst: LosInstance): void {
    this.overlayGroup.clear();
    const geometry = new THREE.BufferGeometry().setFromPoints([
      toV3(...inst.a), toV3(...inst.b),
    ]);
    this.overlayGroup.add(new THREE.Line(
      geometry, new THREE.LineBasicMaterial({ color: inst.color }),
    ));
  }

  showMarker(x: number, y: number, z: number, color = 0xffd43b): void {
    this.overlayGroup.clear();
    const marker = new THREE.Mesh(
      new THREE.SphereGeometry(5),
      new THREE.MeshBasicMaterial({ color }),
    );
    marker.position.copy(toV3(x, y, z));
    this.overlayGroup.add(marker);
  }

  showPolygonOutline(points: [number, number][], close: boolean): void {
    this.overlayGroup.clear();
    if (points.length === 0) return;
    const path = close ? [...points, points[0]] : points;
    this.overlayGroup.add(lineFromPoints(path, 0xffd43b, 2.0, 2.0));
  }

  clearOverlays(): void {
    this.overlayGroup.clear();
    this.roomGroup.clear();
  }

  /** Ground footprint of the current view (for the bird's-eye rectangle). */
  viewFootprint(): [number, number, number, number] {
    const target = this.controls.target;
    const radius = this.camera.position.distanceTo(target);
    const cx = target.x;
    const cy = -target.z;
    const r = Math.max(radius * 0.7, 20);
    return [
      Math.max(this.extent[0], cx - r), Math.max(this.extent[1], cy - r),
      Math.min(this.extent[2], cx + r), Math.min(this.extent[3], cy + r),
    ];
  }

  panTo(x: number, y: number): void {
    const offset = this.camera.position.clone().sub(this.controls.target);
    this.controls.target.set(x, 0, -y);
    this.camera.position.copy(this.controls.target.clone().add(offset));
    this.controls.update();
    this.onViewChange?.();
  }

  private handleClick(ev: MouseEvent): void {
    if (!this.onPick) return;
    const rect = this.renderer.domElement.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((ev.clientX - rect.left) / rect.width) * 2 - 1,
      -((ev.clientY - rect.top) / rect.height) * 2 + 1,
    );
    const raycaster = new THREE.Raycaster();
    raycaster.setFromCamera(ndc, this.camera);
    const hits = raycaster.intersectObjects(this.scene.children, true);
    for (const hit of hits) {
      let node: THREE.Object3D | null = hit.object;
      while (node) {
        if (node.userData.buildingId) {
          this.onPick({ kind: "building", id: node.userData.buildingId as string });
          return;
        }
        node = node.parent;
      }
      if (hit.object.userData.isTerrain) {
        this.onPick({ kind: "ground", x: hit.point.x, y: -hit.point.z, z: hit.point.y });
        return;
      }
    }
    // fallback: intersect the z=0 ground plane
    const plane = new THREE.Plane(new THREE.Vector3(0, 1, 0), 0);
    const point = new THREE.Vector3();
    if (raycaster.ray.intersectPlane(plane, point)) {
      this.onPick({ kind: "ground", x: point.x, y: -point.z, z: point.y });
    }
  }
}

function lineFromPoints(points: [number, number][], color: number,
                        _width: number, lift = 0.5): THREE.Line {
  const geometry = new THREE.BufferGeometry().setFromPoints(
    points.map(([x, y]) => new THREE.Vector3(x, lift, -y)),
  );
  return new THREE.Line(geometry, new THREE.LineBasicMaterial({ color }));
}
