// Layer tree panel: one checkbox per node. Effective visibility (the AND
// along the ancestor path) always comes from the server response, so a
// parent unchecked greys out and hides every descendant without any
// client-side tree math.

import { patchLayer } from "./api";
import type { LayerNode, LayersResponse } from "./types";

export type LayersChanged = (layers: LayersResponse) => void;

export class LayerTreePanel {
  private root: HTMLElement;
  private onChange: LayersChanged;
  private onError: (err: unknown) => void;

  constructor(parent: HTMLElement, onChange: LayersChanged,
              onError: (err: unknown) => void = () => undefined) {
    this.root = document.createElement("div");
    this.root.className = "layer-tree";
    parent.appendChild(this.root);
    this.onChange = onChange;
    this.onError = onError;
  }

  render(layers: LayersResponse): void {
    this.root.textContent = "";
    const title = document.createElement("h3");
    title.textContent = "Layers";
    this.root.appendChild(title);
    this.root.appendChild(this.renderNode(layers.root, layers.effective));
  }

  private renderNode(node: LayerNode, effective: Record<string, boolean>): HTMLElement {
    const item = document.createElement("div");
    item.className = "layer-node";
    item.dataset.layerId = node.id;
    if (!effective[node.id]) item.classList.add("layer-hidden");

    const row = document.createElement("label");
    row.className = "layer-row";
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.checked = node.visible;
    checkbox.dataset.layerId = node.id;
    checkbox.addEventListener("change", () => {
      patchLayer(node.id, checkbox.checked)
        .then((layers) => {
          this.render(layers);
          this.onChange(layers);
        })
        .catch((err) => {
          checkbox.checked = !checkbox.checked;
          this.onError(err);
        });
    });
    const name = document.createElement("span");
    name.textContent = node.name;
    row.append(checkbox, name);
    item.appendChild(row);

    if (node.children.length > 0) {
      const children = document.createElement("div");
      children.className = "layer-children";
      for (const child of node.children) {
        children.appendChild(this.renderNode(child, effective));
      }
      item.appendChild(children);
    }
    return item;
  }
}

/** Per-kind visibility for the 3D scene groups: a kind renders when any
 * layer node of that kind is effectively visible (server-computed). */
export function kindVisibility(layers: LayersResponse): Record<string, boolean> {
  const out: Record<string, boolean> = {};
  const visit = (node: LayerNode) => {
    out[node.kind] = (out[node.kind] ?? false) || layers.effective[node.id] === true;
    node.children.forEach(visit);
  };
  visit(layers.root);
  return out;
}
