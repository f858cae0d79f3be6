"""File formats and the render-ready snapshot.

Three artifacts, all JSON text:

* puzzle file   (.xpz.json)   one spec + the brick model it uses
* event log     (.xlog.jsonl) header line, then one move event per line
* scene snapshot (.snap.json) complete view model, no engine calls needed

Floats go through Python's shortest round-trip repr, so every format is
lossless for 64-bit values, and serialization is byte-deterministic.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Optional, Union

from .engine import (
    Actor,
    ApplyStep,
    EditLastStepParam,
    GameState,
    Level,
    MoveAction,
    MoveEvent,
    PuzzleSpec,
    Reset,
    Status,
    Undo,
    session_error,
    validate_spec,
)
from .errors import (
    CorruptLogError,
    MalformedDocumentError,
    VersionMismatchError,
)
from .scene import (
    Annotation,
    AxisHighlight,
    Brick,
    BrickModel,
    DimensionLine,
    FrameTriad,
    MappedPointPair,
    MatrixPanel,
    RotationArc,
    build_annotations,
    mapped_points,
    matrix_panel,
    resolve_model,
    wireframe_edges,
)
from .solver import ErrorWeights, PoseError
from .xform import Mat4, MulExpansion, Rotate, RotationAxis, Scale, TransformStep, Translate, Vec3

ENGINE_VERSION = "0.1.0"
FORMAT_VERSION = 1

log = logging.getLogger(__name__)


# -- low-level helpers ---------------------------------------------------------

def _require(obj: Any, keys: tuple[str, ...], what: str,
             optional: tuple[str, ...] = ()) -> None:
    if not isinstance(obj, dict):
        raise MalformedDocumentError(f"{what} must be an object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise MalformedDocumentError(f"{what} is missing fields {missing}")
    unknown = [k for k in obj if k not in keys and k not in optional]
    if unknown:
        raise VersionMismatchError(
            f"{what} has fields {unknown} unknown to format version {FORMAT_VERSION}")


def _vec(v: Vec3) -> list[float]:
    return [v.x, v.y, v.z]


def _vec_from(obj: Any, what: str) -> Vec3:
    if not (isinstance(obj, list) and len(obj) == 3):
        raise MalformedDocumentError(f"{what} must be a list of 3 numbers")
    return Vec3(float(obj[0]), float(obj[1]), float(obj[2]))


def _mat(m: Mat4) -> list[float]:
    return list(m.m)


def _mat_from(obj: Any, what: str) -> Mat4:
    if not (isinstance(obj, list) and len(obj) == 16):
        raise MalformedDocumentError(f"{what} must be a list of 16 numbers")
    return Mat4(tuple(float(x) for x in obj))


def step_to_obj(step: TransformStep) -> dict:
    if isinstance(step, Translate):
        return {"kind": "translate", "v": _vec(step.v)}
    if isinstance(step, Rotate):
        return {"kind": "rotate", "axis": step.axis.value, "angle": step.angle}
    if isinstance(step, Scale):
        return {"kind": "scale", "factor": step.factor}
    raise MalformedDocumentError(f"unknown step type {type(step).__name__}")


def step_from_obj(obj: Any) -> TransformStep:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedDocumentError("step must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "translate":
        _require(obj, ("kind", "v"), "translate step")
        return Translate(_vec_from(obj["v"], "translate vector"))
    if kind == "rotate":
        _require(obj, ("kind", "axis", "angle"), "rotate step")
        try:
            axis = RotationAxis(obj["axis"])
        except ValueError:
            raise MalformedDocumentError(f"unknown rotation axis {obj['axis']!r}") from None
        return Rotate(axis, float(obj["angle"]))
    if kind == "scale":
        _require(obj, ("kind", "factor"), "scale step")
        return Scale(float(obj["factor"]))
    raise MalformedDocumentError(f"unknown step kind {kind!r}")


def _pose_error_obj(e: PoseError) -> dict:
    return {"translation": e.translation, "rotation": e.rotation,
            "scale": e.scale, "total": e.total}


def _pose_error_from(obj: Any) -> PoseError:
    _require(obj, ("translation", "rotation", "scale", "total"), "tolerance")
    return PoseError(float(obj["translation"]), float(obj["rotation"]),
                     float(obj["scale"]), float(obj["total"]))


def _weights_obj(w: ErrorWeights) -> dict:
    return {"translation": w.translation, "rotation": w.rotation, "scale": w.scale}


def _weights_from(obj: Any) -> ErrorWeights:
    _require(obj, ("translation", "rotation", "scale"), "weights")
    return ErrorWeights(float(obj["translation"]), float(obj["rotation"]), float(obj["scale"]))


def spec_to_obj(spec: PuzzleSpec) -> dict:
    return {
        "id": spec.id,
        "level": spec.level.value,
        "target_steps": [step_to_obj(s) for s in spec.target_steps],
        "allowed_controls": sorted(spec.allowed_controls),
        "tolerance": _pose_error_obj(spec.tolerance),
        "weights": _weights_obj(spec.weights),
        "seed": spec.seed,
        "model_ref": spec.model_ref,
    }


def spec_from_obj(obj: Any) -> PuzzleSpec:
    _require(obj, ("id", "level", "target_steps", "allowed_controls",
                   "tolerance", "weights", "seed", "model_ref"), "puzzle spec")
    try:
        level = Level(obj["level"])
    except ValueError:
        raise MalformedDocumentError(f"unknown level {obj['level']!r}") from None
    return PuzzleSpec(
        id=str(obj["id"]),
        level=level,
        target_steps=tuple(step_from_obj(s) for s in obj["target_steps"]),
        allowed_controls=frozenset(str(c) for c in obj["allowed_controls"]),
        tolerance=_pose_error_from(obj["tolerance"]),
        weights=_weights_from(obj["weights"]),
        seed=int(obj["seed"]),
        model_ref=str(obj["model_ref"]),
    )


def model_to_obj(model: BrickModel) -> dict:
    return {
        "id": model.id,
        "bricks": [
            {"min_corner": _vec(b.min_corner), "size": _vec(b.size), "color": list(b.color)}
            for b in model.bricks
        ],
    }


def model_from_obj(obj: Any) -> BrickModel:
    _require(obj, ("id", "bricks"), "brick model")
    bricks = []
    for b in obj["bricks"]:
        _require(b, ("min_corner", "size", "color"), "brick")
        color = b["color"]
        if not (isinstance(color, list) and len(color) == 3):
            raise MalformedDocumentError("brick color must be [r, g, b]")
        bricks.append(Brick(_vec_from(b["min_corner"], "brick corner"),
                            _vec_from(b["size"], "brick size"),
                            (int(color[0]), int(color[1]), int(color[2]))))
    return BrickModel(str(obj["id"]), tuple(bricks))


# -- puzzle files ---------------------------------------------------------------

@dataclass(frozen=True)
class PuzzleFile:
    format_version: int
    spec: PuzzleSpec
    model: BrickModel


def puzzle_to_json(pf: PuzzleFile) -> str:
    doc = {
        "format_version": pf.format_version,
        "engine_version": ENGINE_VERSION,
        "spec": spec_to_obj(pf.spec),
        "model": model_to_obj(pf.model),
    }
    return json.dumps(doc, indent=2) + "\n"


def puzzle_from_json(text: str) -> PuzzleFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"puzzle file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise MalformedDocumentError("puzzle file must be an object with format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"puzzle format version {doc['format_version']} not supported (expected {FORMAT_VERSION})")
    _require(doc, ("format_version", "spec", "model"), "puzzle file",
             optional=("engine_version",))
    spec = spec_from_obj(doc["spec"])
    model = model_from_obj(doc["model"])
    if spec.model_ref != model.id:
        raise MalformedDocumentError(
            f"spec references model {spec.model_ref!r} but file carries {model.id!r}")
    validate_spec(spec)
    return PuzzleFile(FORMAT_VERSION, spec, model)


def save_puzzle(path: Union[str, Path], pf: PuzzleFile) -> None:
    Path(path).write_text(puzzle_to_json(pf), encoding="utf-8")


def load_puzzle(path: Union[str, Path]) -> PuzzleFile:
    return puzzle_from_json(Path(path).read_text(encoding="utf-8"))


# -- event logs -----------------------------------------------------------------

_ACTORS = {a.value: a for a in Actor}


def event_to_obj(event: MoveEvent) -> dict:
    action: MoveAction = event.action
    if isinstance(action, ApplyStep):
        act = {"kind": "apply", "step": step_to_obj(action.step)}
    elif isinstance(action, EditLastStepParam):
        act = {"kind": "edit", "field": action.field, "value": action.value}
    elif isinstance(action, Undo):
        act = {"kind": "undo"}
    elif isinstance(action, Reset):
        act = {"kind": "reset"}
    else:
        raise MalformedDocumentError(f"unknown action {type(action).__name__}")
    return {"seq": event.seq, "actor": event.actor.value, "action": act, "t_ms": event.t_ms}


def event_from_obj(obj: Any) -> MoveEvent:
    _require(obj, ("seq", "actor", "action", "t_ms"), "move event")
    actor = _ACTORS.get(obj["actor"])
    if actor is None:
        raise MalformedDocumentError(f"unknown actor {obj['actor']!r}")
    act = obj["action"]
    if not isinstance(act, dict) or "kind" not in act:
        raise MalformedDocumentError("event action must be an object with a 'kind'")
    kind = act["kind"]
    action: MoveAction
    if kind == "apply":
        _require(act, ("kind", "step"), "apply action")
        action = ApplyStep(step_from_obj(act["step"]))
    elif kind == "edit":
        _require(act, ("kind", "field", "value"), "edit action")
        action = EditLastStepParam(str(act["field"]), float(act["value"]))
    elif kind == "undo":
        action = Undo()
    elif kind == "reset":
        action = Reset()
    else:
        raise MalformedDocumentError(f"unknown action kind {kind!r}")
    return MoveEvent(int(obj["seq"]), actor, action, int(obj["t_ms"]))


@dataclass(frozen=True)
class LogHeader:
    puzzle_id: str
    seed: int
    engine_version: str


@dataclass(frozen=True)
class EventLogFile:
    header: LogHeader
    events: tuple[MoveEvent, ...]


class EventLogWriter:
    """Append-only log writer; each event is one flushed line, so a crash
    never damages previously written records."""

    def __init__(self, fp: IO[str], spec: PuzzleSpec):
        self._fp = fp
        header = {"format_version": FORMAT_VERSION, "puzzle_id": spec.id,
                  "seed": spec.seed, "engine_version": ENGINE_VERSION}
        self._fp.write(json.dumps(header) + "\n")
        self._fp.flush()

    def append(self, event: MoveEvent) -> None:
        self._fp.write(json.dumps(event_to_obj(event)) + "\n")
        self._fp.flush()


def read_log(path: Union[str, Path]) -> EventLogFile:
    """Parse and validate an event log.

    Sequence numbers must run 1..n; the reported line number is the record's
    position within the event section. A truncated final line (interrupted
    write) is dropped with a warning; earlier records must parse.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorruptLogError("log file is empty")
    try:
        header_obj = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptLogError(f"log header is not valid JSON: {exc}") from exc
    _require(header_obj, ("format_version", "puzzle_id", "seed", "engine_version"), "log header")
    if header_obj["format_version"] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"log format version {header_obj['format_version']} not supported")
    if header_obj["engine_version"] != ENGINE_VERSION:
        raise VersionMismatchError(
            f"log was written by engine {header_obj['engine_version']}, "
            f"this is {ENGINE_VERSION}; refusing to replay across versions")
    header = LogHeader(str(header_obj["puzzle_id"]), int(header_obj["seed"]),
                       str(header_obj["engine_version"]))

    events = []
    raw_events = lines[1:]
    for index, line in enumerate(raw_events):
        record_no = index + 1
        try:
            obj = json.loads(line)
            event = event_from_obj(obj)
        except (json.JSONDecodeError, MalformedDocumentError) as exc:
            if index == len(raw_events) - 1:
                log.warning("dropping truncated final log record: %s", exc)
                break
            raise CorruptLogError(f"unreadable event record: {exc}", line=record_no) from exc
        if event.seq != record_no:
            raise CorruptLogError(
                f"sequence numbers must be contiguous: expected {record_no}, got {event.seq}",
                line=record_no)
        events.append(event)
    return EventLogFile(header, tuple(events))


# -- scene snapshot ---------------------------------------------------------------

@dataclass(frozen=True)
class SceneSnapshot:
    """Everything a renderer needs for one frame, fully self-contained."""

    engine_version: str
    puzzle_id: str
    level: Level
    status: Status
    move_count: int
    solid_model_pose: Mat4
    virtual_model_pose: Mat4
    error: PoseError
    frames: tuple[FrameTriad, ...]
    wireframe: tuple[tuple[Vec3, Vec3], ...]
    annotations: tuple[Annotation, ...]
    panel: Optional[MatrixPanel]


def _derive_active_control(state: GameState) -> Optional[str]:
    if state.virtual_steps and isinstance(state.virtual_steps[-1], Rotate):
        return f"rotate_{state.virtual_steps[-1].axis.value}"
    return None


def snapshot(state: GameState, model: Optional[BrickModel] = None,
             active_control: Optional[str] = None) -> SceneSnapshot:
    """Freeze the render view of a session.

    Level gates follow the progression: annotations and mapped points appear
    from mapping level up, the matrix panel only at function level.
    """
    if model is None:
        model = resolve_model(state.spec.model_ref)
    if active_control is None:
        active_control = _derive_active_control(state)
    level = state.spec.level

    annotations: list[Annotation] = []
    if level is not Level.MOTION:
        built, frames = build_annotations(state, active_control, model=model)
        annotations.extend(built)
        if state.physical_matrix != Mat4.identity():
            annotations.extend(mapped_points(model, state.physical_matrix))
    else:
        _, frames = build_annotations(state, None, model=model)

    return SceneSnapshot(
        engine_version=ENGINE_VERSION,
        puzzle_id=state.spec.id,
        level=level,
        status=state.status,
        move_count=state.move_count,
        solid_model_pose=state.physical_matrix,
        virtual_model_pose=state.virtual_matrix,
        error=session_error(state),
        frames=tuple(frames),
        wireframe=tuple(wireframe_edges(model)),
        annotations=tuple(annotations),
        panel=matrix_panel(state) if level is Level.FUNCTION else None,
    )


def _annotation_obj(a: Annotation) -> dict:
    if isinstance(a, DimensionLine):
        return {"kind": "dimension_line", "from": _vec(a.start), "to": _vec(a.end),
                "label": a.label}
    if isinstance(a, RotationArc):
        return {"kind": "rotation_arc", "center": _vec(a.center), "axis": a.axis.value,
                "radius": a.radius, "start_angle": a.start_angle, "sweep": a.sweep,
                "label": a.label}
    if isinstance(a, AxisHighlight):
        return {"kind": "axis_highlight", "axis": a.axis.value,
                "plane_normal": a.plane_normal.value}
    if isinstance(a, MappedPointPair):
        return {"kind": "mapped_point", "pre": _vec(a.pre), "img": _vec(a.img),
                "index": a.index}
    raise MalformedDocumentError(f"unknown annotation {type(a).__name__}")


def _expansion_obj(e: MulExpansion) -> dict:
    return {
        "cells": [
            {"row": c.row, "col": c.col,
             "terms": [[t[0], t[1]] for t in c.terms],
             "products": list(c.products),
             "total": c.total}
            for c in e.cells
        ],
    }


def _panel_obj(panel: MatrixPanel) -> dict:
    return {
        "rows": [
            {"cells": list(row.cells),
             "highlight": [h.value for h in row.highlight],
             "theme": row.theme.value}
            for row in panel.rows
        ],
        "expansion": _expansion_obj(panel.expansion) if panel.expansion else None,
    }


def snapshot_to_obj(snap: SceneSnapshot) -> dict:
    return {
        "engine_version": snap.engine_version,
        "puzzle_id": snap.puzzle_id,
        "level": snap.level.value,
        "status": snap.status.value,
        "move_count": snap.move_count,
        "solid_model_pose": _mat(snap.solid_model_pose),
        "virtual_model_pose": _mat(snap.virtual_model_pose),
        "error": _pose_error_obj(snap.error),
        "frames": [
            {"role": f.role.value, "origin": _vec(f.origin), "basis": _mat(f.basis)}
            for f in snap.frames
        ],
        "wireframe": [[_vec(a), _vec(b)] for a, b in snap.wireframe],
        "annotations": [_annotation_obj(a) for a in snap.annotations],
        "panel": _panel_obj(snap.panel) if snap.panel else None,
    }


def snapshot_to_json(snap: SceneSnapshot) -> str:
    return json.dumps(snapshot_to_obj(snap), separators=(",", ":")) + "\n"


def save_snapshot(path: Union[str, Path], snap: SceneSnapshot) -> None:
    Path(path).write_text(snapshot_to_json(snap), encoding="utf-8")
