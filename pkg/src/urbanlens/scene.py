"""Scene editing and layer-tree visibility.

Scenes are immutable values: apply_edit returns a new CityScene with the edit
journaled and the touched collection's spatial index marked stale. Rebuilding
indices is the caller's job (see urbanlens.spatial).
"""

from __future__ import annotations

from dataclasses import replace

from urbanlens.errors import ConflictError, InvalidArgumentError, NotFoundError
from urbanlens.model import Building, CityScene, LayerNode, RoadSegment, SceneEdit


def apply_edit(scene: CityScene, op: str, obj=None, object_id: str | None = None) -> CityScene:
    """Apply add/update/delete of a Building or RoadSegment.

    ``obj`` is required for add/update; ``object_id`` for delete. Returns the
    edited scene; the original is untouched.
    """
    if op not in ("add", "update", "delete"):
        raise InvalidArgumentError(f"unknown edit op {op!r}")
    if op == "delete":
        if object_id is None:
            raise InvalidArgumentError("delete requires object_id")
        target_id = object_id
    else:
        if obj is None:
            raise InvalidArgumentError(f"{op} requires an object")
        target_id = obj.id

    if isinstance(obj, Building) or (obj is None and scene.building_by_id(target_id) is not None):
        kind, attr = "building", "buildings"
    elif isinstance(obj, RoadSegment) or (obj is None and scene.road_by_id(target_id) is not None):
        kind, attr = "road", "roads"
    elif obj is None:
        raise NotFoundError(f"no building or road with id {target_id!r}")
    else:
        raise InvalidArgumentError(f"unsupported object type {type(obj).__name__}")

    collection = list(getattr(scene, attr))
    existing_idx = next((i for i, o in enumerate(collection) if o.id == target_id), None)

    if op == "add":
        if existing_idx is not None:
            raise ConflictError(f"{kind} id {target_id!r} already exists")
        before, after = None, obj
        collection.append(obj)
    elif op == "update":
        if existing_idx is None:
            raise NotFoundError(f"no {kind} with id {target_id!r}")
        before, after = collection[existing_idx], obj
        collection[existing_idx] = obj
    else:
        if existing_idx is None:
            raise NotFoundError(f"no {kind} with id {target_id!r}")
        before, after = collection[existing_idx], None
        del collection[existing_idx]

    entry = SceneEdit(op=op, kind=kind, object_id=target_id, before=before, after=after)
    return replace(
        scene,
        **{attr: tuple(collection)},
        journal=scene.journal + (entry,),
        stale_indices=scene.stale_indices | {attr},
    )


def invert_edit(edit: SceneEdit) -> tuple[str, object | None, str | None]:
    """(op, obj, object_id) arguments that undo the given journal entry."""
    if edit.op == "add":
        return ("delete", None, edit.object_id)
    if edit.op == "delete":
        return ("add", edit.before, None)
    return ("update", edit.before, None)


def set_layer_visibility(root: LayerNode, layer_id: str, visible: bool) -> LayerNode:
    """Return a tree with the node's own flag set; raises NotFoundError."""
    updated, found = _set_visibility(root, layer_id, visible)
    if not found:
        raise NotFoundError(f"no layer with id {layer_id!r}")
    return updated


def _set_visibility(node: LayerNode, layer_id: str, visible: bool) -> tuple[LayerNode, bool]:
    if node.id == layer_id:
        return replace(node, visible=visible), True
    new_children = []
    found = False
    for child in node.children:
        new_child, hit = _set_visibility(child, layer_id, visible)
        new_children.append(new_child)
        found = found or hit
    if not found:
        return node, False
    return replace(node, children=tuple(new_children)), True


def effective_visibility(root: LayerNode) -> dict[str, bool]:
    """Visibility per node id: the AND of flags on the root-to-node path."""
    out: dict[str, bool] = {}

    def visit(node: LayerNode, inherited: bool) -> None:
        eff = inherited and node.visible
        out[node.id] = eff
        for child in node.children:
            visit(child, eff)

    visit(root, True)
    return out


def find_layer(root: LayerNode, layer_id: str) -> LayerNode | None:
    for node in root.walk():
        if node.id == layer_id:
            return node
    return None
