"""Display-model layer: brick geometry, tracking annotations, matrix panel.

Everything here is plain data for a renderer; no drawing happens in this
package. Dimension lines and arcs describe the physical model's transform
relative to the wireframe pre-image, which stays at the world origin.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .engine import Actor, ApplyStep, GameState, Reset
from .errors import InvalidParameterError
from .solver import decompose_trs
from .xform import (
    Mat4,
    MulExpansion,
    RotationAxis,
    Vec3,
    apply_point,
    compose,
    multiply_expansion,
    step_matrix,
    translation_matrix,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Brick:
    """Axis-aligned box in stud units; min_corner is the low corner."""

    min_corner: Vec3
    size: Vec3
    color: tuple[int, int, int] = (200, 30, 30)

    def __post_init__(self):
        if min(self.size.x, self.size.y, self.size.z) <= 0:
            raise InvalidParameterError("brick sizes must be positive")


@dataclass(frozen=True)
class BrickModel:
    id: str
    bricks: tuple[Brick, ...]

    def __post_init__(self):
        if not self.bricks:
            raise InvalidParameterError("model needs at least one brick")


def demo_model() -> BrickModel:
    """Default two-brick model: a 2x4 base with a 2x2 on top."""
    return BrickModel("demo", (
        Brick(Vec3(0.0, 0.0, 0.0), Vec3(4.0, 2.0, 1.0), (201, 26, 9)),
        Brick(Vec3(1.0, 0.0, 1.0), Vec3(2.0, 2.0, 1.0), (245, 205, 47)),
    ))


BUILTIN_MODELS = {"demo": demo_model()}


def resolve_model(model_ref: str) -> BrickModel:
    try:
        return BUILTIN_MODELS[model_ref]
    except KeyError:
        raise InvalidParameterError(f"unknown model {model_ref!r}") from None


def brick_corners(brick: Brick) -> tuple[Vec3, ...]:
    """8 corners in canonical bit order (x fastest, then y, then z)."""
    lo = brick.min_corner
    hi = lo + brick.size
    return tuple(
        Vec3(hi.x if i & 1 else lo.x, hi.y if i & 2 else lo.y, hi.z if i & 4 else lo.z)
        for i in range(8)
    )


# fixed edge order on the canonical corners: 4 x-edges, 4 y-edges, 4 z-edges
_EDGES = ((0, 1), (2, 3), (4, 5), (6, 7),
          (0, 2), (1, 3), (4, 6), (5, 7),
          (0, 4), (1, 5), (2, 6), (3, 7))


def wireframe_edges(model: BrickModel) -> list[tuple[Vec3, Vec3]]:
    """12 edges per brick, ordered by (brick index, canonical edge index)."""
    edges = []
    for brick in model.bricks:
        corners = brick_corners(brick)
        for a, b in _EDGES:
            edges.append((corners[a], corners[b]))
    return edges


def model_bounds(model: BrickModel) -> tuple[Vec3, Vec3]:
    corners = [c for brick in model.bricks for c in brick_corners(brick)]
    lo = Vec3(min(c.x for c in corners), min(c.y for c in corners), min(c.z for c in corners))
    hi = Vec3(max(c.x for c in corners), max(c.y for c in corners), max(c.z for c in corners))
    return lo, hi


def bounding_radius(model: BrickModel) -> float:
    lo, hi = model_bounds(model)
    return 0.5 * (hi - lo).norm()


@dataclass(frozen=True)
class MappedPointPair:
    pre: Vec3
    img: Vec3
    index: int


def mapped_points(model: BrickModel, m: Mat4, n: int = 8) -> list[MappedPointPair]:
    """Pair n representative pre-image corners with their images under m.

    Outermost corners (farthest from the bounding-box center) come first;
    ties and order are fixed by coordinates so the selection is deterministic.
    n larger than the number of distinct corners is clamped.
    """
    if n < 1:
        raise InvalidParameterError("need at least one mapped point")
    lo, hi = model_bounds(model)
    center = 0.5 * (lo + hi)
    unique = sorted(
        {c.to_tuple() for brick in model.bricks for c in brick_corners(brick)},
        key=lambda t: (-((t[0] - center.x) ** 2 + (t[1] - center.y) ** 2 + (t[2] - center.z) ** 2),
                       t[0], t[1], t[2]),
    )
    if n > len(unique):
        log.warning("mapped_points: requested %d points, model only has %d corners", n, len(unique))
        n = len(unique)
    pairs = []
    for i, t in enumerate(unique[:n]):
        pre = Vec3(*t)
        pairs.append(MappedPointPair(pre, apply_point(m, pre), i))
    return pairs


class FrameRole(Enum):
    WORLD = "world"
    PRE_IMAGE = "pre_image"
    IMAGE = "image"
    VIRTUAL = "virtual"


@dataclass(frozen=True)
class FrameTriad:
    """Coordinate frame gizmo: origin plus a rotation+translation basis."""

    role: FrameRole
    origin: Vec3
    basis: Mat4


@dataclass(frozen=True)
class DimensionLine:
    """Measuring line between pre-image and image origins; label = length."""

    start: Vec3
    end: Vec3
    label: float


@dataclass(frozen=True)
class RotationArc:
    """Arc showing one axis rotation; sweep and label are signed degrees
    (positive = counterclockwise seen from the positive axis end)."""

    center: Vec3
    axis: RotationAxis
    radius: float
    start_angle: float
    sweep: float
    label: float


@dataclass(frozen=True)
class AxisHighlight:
    """Active rotation axis plus the plane it spins (named by its normal)."""

    axis: RotationAxis
    plane_normal: RotationAxis


Annotation = Union[DimensionLine, RotationArc, AxisHighlight, MappedPointPair]

_ROTATE_CONTROLS = {
    "rotate_x": RotationAxis.X,
    "rotate_y": RotationAxis.Y,
    "rotate_z": RotationAxis.Z,
}


def _arc_sweeps(u: tuple[float, ...], axis: Vec3, angle: float) -> list[tuple[RotationAxis, float]]:
    """Per-axis signed sweeps for a rotation block.

    A rotation about (plus or minus) a coordinate axis becomes a single signed
    arc. Anything else is split into x, y, z factors (applied in that order),
    one arc each, matching the one-axis-at-a-time lessons.
    """
    if angle <= 1e-9:
        return []
    for coord_axis, comp in zip((RotationAxis.X, RotationAxis.Y, RotationAxis.Z), axis.to_tuple()):
        if abs(comp) > 1.0 - 1e-9:
            return [(coord_axis, math.copysign(angle, comp))]
    x_deg = math.degrees(math.atan2(u[7], u[8]))
    y_deg = math.degrees(math.atan2(-u[6], math.hypot(u[7], u[8])))
    z_deg = math.degrees(math.atan2(u[3], u[0]))
    return [(coord_axis, sweep) for coord_axis, sweep in
            ((RotationAxis.X, x_deg), (RotationAxis.Y, y_deg), (RotationAxis.Z, z_deg))
            if abs(sweep) > 1e-9]


def build_annotations(state: GameState, active_control: Optional[str] = None,
                      model: Optional[BrickModel] = None,
                      ) -> tuple[list[Annotation], list[FrameTriad]]:
    """Tracking graphics for the current state.

    Emits the pre-image-to-image dimension line (suppressed at zero length),
    one rotation arc per axis factor of the physical pose, an axis highlight
    for an active rotation control, and the four coordinate frames (world and
    pre-image coincide for the whole session).
    """
    if model is None:
        model = resolve_model(state.spec.model_ref)
    dec_p = decompose_trs(state.physical_matrix)
    dec_v = decompose_trs(state.virtual_matrix)

    annotations: list[Annotation] = []
    distance = dec_p.translation.norm()
    if distance > 1e-12:
        annotations.append(DimensionLine(Vec3(0.0, 0.0, 0.0), dec_p.translation, distance))
    radius = 0.5 * bounding_radius(model)
    for axis, sweep in _arc_sweeps(dec_p.rotation.upper3(), dec_p.axis, dec_p.angle):
        annotations.append(RotationArc(Vec3(0.0, 0.0, 0.0), axis, radius, 0.0, sweep, sweep))
    if active_control in _ROTATE_CONTROLS:
        axis = _ROTATE_CONTROLS[active_control]
        annotations.append(AxisHighlight(axis, axis))

    origin = Vec3(0.0, 0.0, 0.0)
    frames = [
        FrameTriad(FrameRole.WORLD, origin, Mat4.identity()),
        FrameTriad(FrameRole.PRE_IMAGE, origin, Mat4.identity()),
        FrameTriad(FrameRole.IMAGE, dec_p.translation,
                   translation_matrix(dec_p.translation) @ dec_p.rotation),
        FrameTriad(FrameRole.VIRTUAL, dec_v.translation,
                   translation_matrix(dec_v.translation) @ dec_v.rotation),
    ]
    return annotations, frames


class CellRegion(Enum):
    ROTATION_SCALE = "rotation_scale"
    TRANSLATION = "translation"
    BOTTOM_ROW = "bottom_row"


class PanelTheme(Enum):
    PHYSICAL = "physical"
    VIRTUAL_GREEN = "virtual_green"


_HIGHLIGHT = tuple(
    CellRegion.BOTTOM_ROW if row == 3
    else CellRegion.TRANSLATION if col == 3
    else CellRegion.ROTATION_SCALE
    for row in range(4) for col in range(4)
)


@dataclass(frozen=True)
class PanelRow:
    cells: tuple[float, ...]
    highlight: tuple[CellRegion, ...]
    theme: PanelTheme


@dataclass(frozen=True)
class MatrixPanel:
    """Two matrix rows (physical on top, virtual in green below) plus the
    cell-by-cell expansion of the most recent composition, when there is one."""

    rows: tuple[PanelRow, PanelRow]
    expansion: Optional[MulExpansion]


def _latest_composition(state: GameState) -> Optional[MulExpansion]:
    if not state.event_log:
        return None
    last = state.event_log[-1]
    if not isinstance(last.action, ApplyStep):
        return None
    new_factor = step_matrix(last.action.step)
    if last.actor is Actor.VIRTUAL:
        previous = compose(state.virtual_steps[:-1])
    else:
        steps = []
        for event in state.event_log[:-1]:
            if isinstance(event.action, Reset):
                steps.clear()
            elif event.actor is Actor.PHYSICAL and isinstance(event.action, ApplyStep):
                steps.append(event.action.step)
        previous = compose(steps)
    return multiply_expansion(new_factor, previous)


def matrix_panel(state: GameState) -> MatrixPanel:
    """Panel rows mirror the session matrices entry-for-entry, no caching."""
    return MatrixPanel(
        rows=(
            PanelRow(state.physical_matrix.m, _HIGHLIGHT, PanelTheme.PHYSICAL),
            PanelRow(state.virtual_matrix.m, _HIGHLIGHT, PanelTheme.VIRTUAL_GREEN),
        ),
        expansion=_latest_composition(state),
    )
