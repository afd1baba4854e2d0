"""File formats: JSON maps/observations, binary embedding files.

Maps and observations are human-inspectable JSON; embeddings are a JSON
header ({dim, count, ids}) next to a raw little-endian float32 sidecar
holding count x dim values, row order parallel to ids. Unknown JSON
fields are ignored with a SchemaWarning so newer writers stay readable;
structural problems raise ParseError with a field-level diagnostic.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .descriptors import EmbeddingTable
from .errors import ParseError, SchemaWarning
from .scene import EllipsoidLandmark, ObjectMap, ObservationSet, Pose

_LANDMARK_FIELDS = {"id", "position", "orientation", "axis_lengths", "class_id", "text_label"}
_MAP_FIELDS = {"frame_id", "landmarks"}
_OBS_FIELDS = {"frame_id", "objects", "gt_pose"}
_POSE_FIELDS = {"rotation", "translation"}
_EMB_FIELDS = {"dim", "count", "ids"}


def _warn_unknown(obj: dict, known: set, where: str) -> None:
    extra = sorted(set(obj) - known)
    if extra:
        warnings.warn(f"{where}: ignoring unknown fields {extra}", SchemaWarning, stacklevel=3)


def _require(obj: dict, field: str, where: str):
    if field not in obj:
        raise ParseError(f"{where}: missing required field '{field}'")
    return obj[field]


def _load_json(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data


def _landmark_from_json(entry: dict, where: str) -> EllipsoidLandmark:
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: landmark entry must be an object")
    _warn_unknown(entry, _LANDMARK_FIELDS, where)
    try:
        rot = np.asarray(_require(entry, "orientation", where), dtype=np.float64)
        if rot.shape != (9,):
            raise ParseError(f"{where}: orientation must be 9 row-major values")
        return EllipsoidLandmark(
            position=np.asarray(_require(entry, "position", where), dtype=np.float64),
            orientation=rot.reshape(3, 3),
            axis_lengths=np.asarray(_require(entry, "axis_lengths", where), dtype=np.float64),
            class_id=int(_require(entry, "class_id", where)),
            text_label=entry.get("text_label"),
            embedding_id=int(_require(entry, "id", where)),
        )
    except ParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def _landmark_to_json(lm: EllipsoidLandmark) -> dict:
    out = {
        "id": lm.embedding_id,
        "position": list(lm.position),
        "orientation": list(lm.orientation.reshape(-1)),
        "axis_lengths": list(lm.axis_lengths),
        "class_id": lm.class_id,
    }
    if lm.text_label is not None:
        out["text_label"] = lm.text_label
    return out


def _pose_from_json(entry: dict, where: str) -> Pose:
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: pose must be an object")
    _warn_unknown(entry, _POSE_FIELDS, where)
    try:
        rot = np.asarray(_require(entry, "rotation", where), dtype=np.float64)
        if rot.shape != (9,):
            raise ParseError(f"{where}: rotation must be 9 row-major values")
        return Pose(rot.reshape(3, 3),
                    np.asarray(_require(entry, "translation", where), dtype=np.float64))
    except ParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def pose_to_json(pose: Pose) -> dict:
    return {"rotation": list(pose.rotation.reshape(-1)),
            "translation": list(pose.translation)}


def load_map(path) -> ObjectMap:
    path = Path(path)
    data = _load_json(path)
    _warn_unknown(data, _MAP_FIELDS, str(path))
    entries = _require(data, "landmarks", str(path))
    if not isinstance(entries, list):
        raise ParseError(f"{path}: 'landmarks' must be a list")
    landmarks = [_landmark_from_json(e, f"{path}: landmarks[{i}]")
                 for i, e in enumerate(entries)]
    return ObjectMap(tuple(landmarks), frame_id=str(data.get("frame_id", "map")))


def save_map(path, omap: ObjectMap) -> None:
    doc = {"frame_id": omap.frame_id,
           "landmarks": [_landmark_to_json(lm) for lm in omap.landmarks]}
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_observation(path) -> ObservationSet:
    path = Path(path)
    data = _load_json(path)
    _warn_unknown(data, _OBS_FIELDS, str(path))
    entries = _require(data, "objects", str(path))
    if not isinstance(entries, list):
        raise ParseError(f"{path}: 'objects' must be a list")
    objects = [_landmark_from_json(e, f"{path}: objects[{i}]")
               for i, e in enumerate(entries)]
    gt = None
    if data.get("gt_pose") is not None:
        gt = _pose_from_json(data["gt_pose"], f"{path}: gt_pose")
    return ObservationSet(tuple(objects), source_pose_gt=gt)


def save_observation(path, obs: ObservationSet) -> None:
    doc: dict = {"objects": [_landmark_to_json(lm) for lm in obs.objects]}
    if obs.source_pose_gt is not None:
        doc["gt_pose"] = pose_to_json(obs.source_pose_gt)
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _bin_path(json_path: Path) -> Path:
    return json_path.with_suffix(".bin")


def save_embeddings(path, table: EmbeddingTable) -> None:
    """Write header JSON plus float32 sidecar, rows sorted by id.

    Rows are L2-normalized in double precision immediately before the
    float32 cast, which keeps the stored norms well inside the loader's
    1e-6 tolerance.
    """
    path = Path(path)
    order = np.argsort(np.asarray(table.ids, dtype=np.int64), kind="stable")
    ids = [int(table.ids[i]) for i in order]
    vecs = np.asarray(table.vectors, dtype=np.float64)[order]
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("cannot write zero-norm embedding rows")
    payload = np.ascontiguousarray((vecs / norms).astype("<f4"))
    header = {"count": len(ids), "dim": int(table.dim), "ids": ids}
    path.write_text(json.dumps(header, sort_keys=True) + "\n")
    _bin_path(path).write_bytes(payload.tobytes())


def load_embeddings(path) -> EmbeddingTable:
    path = Path(path)
    header = _load_json(path)
    _warn_unknown(header, _EMB_FIELDS, str(path))
    count = int(_require(header, "count", str(path)))
    dim = int(_require(header, "dim", str(path)))
    ids = _require(header, "ids", str(path))
    if not isinstance(ids, list) or len(ids) != count:
        raise ParseError(f"{path}: 'ids' must list exactly {count} entries")
    bin_path = _bin_path(path)
    try:
        raw = bin_path.read_bytes()
    except OSError as exc:
        raise ParseError(f"{bin_path}: missing embedding payload ({exc})") from exc
    expected = count * dim * 4
    if len(raw) != expected:
        raise ParseError(f"{bin_path}: payload is {len(raw)} bytes, expected {expected}")
    vecs = np.frombuffer(raw, dtype="<f4").reshape(count, dim).astype(np.float64)
    try:
        return EmbeddingTable(ids, vecs)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
