"""Inverse problems behind the puzzle.

Factoring a pose matrix back into translation / rotation / uniform scale,
scalarizing how far two poses are apart, recovering an alignment from point
correspondences (the independent oracle for the registration task), and
producing single-step hints that walk the virtual pose onto the physical one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlreadyAlignedError,
    DegenerateConfigurationError,
    InvalidParameterError,
    InvalidRotationError,
    ReflectionError,
    ShearError,
    UnsupportedMatrixError,
)
from .xform import (
    Mat4,
    Rotate,
    RotationAxis,
    Scale,
    TransformStep,
    Translate,
    Vec3,
    invert,
    rotation_matrix,
    scale_matrix,
    step_matrix,
    translation_matrix,
)


@dataclass(frozen=True)
class ErrorWeights:
    """Weights turning (units, degrees, log-scale) into one scalar."""

    translation: float = 1.0
    rotation: float = 0.1
    scale: float = 10.0


@dataclass(frozen=True)
class PoseError:
    """Component-wise pose mismatch; translation in scene units, rotation in
    degrees (geodesic), scale as |ln(s_a/s_b)|."""

    translation: float
    rotation: float
    scale: float
    total: float


DEFAULT_WEIGHTS = ErrorWeights()

# Win tolerance: a quarter stud, two degrees, two percent scale.
DEFAULT_TOLERANCE = PoseError(translation=0.25, rotation=2.0, scale=0.02, total=0.65)


@dataclass(frozen=True)
class PoseDecomposition:
    """T-R-S factors of an affine matrix: m = T(translation) @ rotation @ S(scale)."""

    translation: Vec3
    rotation: Mat4
    axis: Vec3
    angle: float  # degrees, in [0, 180]
    scale: float

    def recompose(self) -> Mat4:
        return translation_matrix(self.translation) @ self.rotation @ scale_matrix(self.scale)


@dataclass(frozen=True)
class Hint:
    suggested_step: TransformStep
    residual_after: float


@dataclass(frozen=True)
class PointCorrespondences:
    """Ordered (pre-image, image) point pairs; at least three required."""

    pairs: tuple[tuple[Vec3, Vec3], ...]

    def __post_init__(self):
        if len(self.pairs) < 3:
            raise InvalidParameterError("need at least 3 point correspondences")
        for pre, img in self.pairs:
            if not (pre.is_finite() and img.is_finite()):
                raise InvalidParameterError("correspondence points must be finite")


@dataclass(frozen=True)
class RigidAlignment:
    """Best rigid fit from correspondences, with the residual it leaves."""

    rotation: Mat4
    translation: Vec3
    rms: float


def _cbrt(x: float) -> float:
    s = x ** (1.0 / 3.0)
    # one Newton step tightens the last ulp or two
    return s - (s * s * s - x) / (3.0 * s * s)


def _det3(u: tuple[float, ...]) -> float:
    return (u[0] * (u[4] * u[8] - u[5] * u[7])
            - u[1] * (u[3] * u[8] - u[5] * u[6])
            + u[2] * (u[3] * u[7] - u[4] * u[6]))


def _orthonormality_defect(u: tuple[float, ...]) -> float:
    """Max |entry| of u'u - I."""
    worst = 0.0
    for i in range(3):
        for j in range(3):
            dot = u[i] * u[j] + u[3 + i] * u[3 + j] + u[6 + i] * u[6 + j]
            defect = abs(dot - (1.0 if i == j else 0.0))
            if defect > worst:
                worst = defect
    return worst


def _axis_angle(u: tuple[float, ...]) -> tuple[Vec3, float]:
    """Axis (unit) and angle in degrees [0, 180] of a pure rotation block."""
    rx = u[7] - u[5]
    ry = u[2] - u[6]
    rz = u[3] - u[1]
    sin2 = math.sqrt(rx * rx + ry * ry + rz * rz)  # = 2 sin(angle)
    trace = u[0] + u[4] + u[8]
    angle = math.degrees(math.atan2(sin2, trace - 1.0))
    if sin2 > 1e-9:
        return Vec3(rx / sin2, ry / sin2, rz / sin2), angle
    if angle < 90.0:
        # (numerically) no rotation: axis is arbitrary, fixed to +z
        return Vec3(0.0, 0.0, 1.0), angle
    # Half turn: R + I = 2 a a', so the dominant column points along the axis.
    cols = [(u[0] + 1.0, u[3], u[6]), (u[1], u[4] + 1.0, u[7]), (u[2], u[5], u[8] + 1.0)]
    best = max(cols, key=lambda c: c[0] * c[0] + c[1] * c[1] + c[2] * c[2])
    n = math.sqrt(best[0] ** 2 + best[1] ** 2 + best[2] ** 2)
    axis = Vec3(best[0] / n, best[1] / n, best[2] / n)
    for comp in (axis.x, axis.y, axis.z):
        if abs(comp) > 1e-9:
            if comp < 0.0:
                axis = -axis
            break
    return axis, angle


def decompose_trs(m: Mat4) -> PoseDecomposition:
    """Factor an affine matrix into translation, pure rotation and uniform scale.

    Scale is recovered as the cube root of the 3x3 determinant (uniform scale
    only); anything left non-orthogonal after dividing it out is rejected as
    shear or non-uniform scale.
    """
    if not m.is_affine():
        raise UnsupportedMatrixError("matrix bottom row is not (0, 0, 0, 1)")
    u = m.upper3()
    det = _det3(u)
    if det <= 0.0:
        raise ReflectionError(f"upper 3x3 determinant must be positive, got {det:.3e}")
    scale = _cbrt(det)
    r = tuple(v / scale for v in u)
    if _orthonormality_defect(r) > 1e-6:
        raise ShearError("matrix contains shear or non-uniform scale")
    rotation = Mat4((r[0], r[1], r[2], 0.0,
                     r[3], r[4], r[5], 0.0,
                     r[6], r[7], r[8], 0.0,
                     0.0, 0.0, 0.0, 1.0))
    axis, angle = _axis_angle(r)
    return PoseDecomposition(m.column4(), rotation, axis, angle, scale)


def _relative_angle(u1: tuple[float, ...], u2: tuple[float, ...]) -> float:
    """Geodesic angle in degrees between two orthonormal 3x3 blocks."""
    rel = [0.0] * 9
    for i in range(3):
        for j in range(3):
            rel[i * 3 + j] = u1[i] * u2[j] + u1[3 + i] * u2[3 + j] + u1[6 + i] * u2[6 + j]
    rx = rel[7] - rel[5]
    ry = rel[2] - rel[6]
    rz = rel[3] - rel[1]
    sin2 = math.sqrt(rx * rx + ry * ry + rz * rz)
    trace = rel[0] + rel[4] + rel[8]
    return math.degrees(math.atan2(sin2, trace - 1.0))


def _require_rotation(m: Mat4, name: str) -> tuple[float, ...]:
    u = m.upper3()
    if _orthonormality_defect(u) > 1e-6:
        raise InvalidRotationError(f"{name} is not orthonormal")
    if _det3(u) <= 0.0:
        raise InvalidRotationError(f"{name} is a reflection, not a rotation")
    return u


def rotation_angle_between(r1: Mat4, r2: Mat4) -> float:
    """Single angle in degrees [0, 180] separating two pure rotations."""
    u1 = _require_rotation(r1, "first rotation")
    u2 = _require_rotation(r2, "second rotation")
    return _relative_angle(u1, u2)


def _pose_error_between(dv: PoseDecomposition, dp: PoseDecomposition,
                        weights: ErrorWeights) -> PoseError:
    t_err = (dv.translation - dp.translation).norm()
    r_err = _relative_angle(dv.rotation.upper3(), dp.rotation.upper3())
    s_err = abs(math.log(dv.scale / dp.scale))
    total = weights.translation * t_err + weights.rotation * r_err + weights.scale * s_err
    return PoseError(t_err, r_err, s_err, total)


def pose_error(virtual: Mat4, physical: Mat4,
               weights: ErrorWeights = DEFAULT_WEIGHTS) -> PoseError:
    """Component-wise mismatch between two poses; symmetric in its arguments."""
    return _pose_error_between(decompose_trs(virtual), decompose_trs(physical), weights)


def is_aligned(virtual: Mat4, physical: Mat4,
               tolerance: PoseError = DEFAULT_TOLERANCE) -> bool:
    """True iff every error component is within its tolerance (inclusive)."""
    e = pose_error(virtual, physical)
    return (e.translation <= tolerance.translation
            and e.rotation <= tolerance.rotation
            and e.scale <= tolerance.scale)


def alignment_delta(virtual: Mat4, physical: Mat4) -> Mat4:
    """World-frame step D with D @ virtual = physical."""
    return physical @ invert(virtual)


def _quat(u: tuple[float, ...]) -> tuple[float, float, float, float]:
    """Unit quaternion (w, x, y, z) with w >= 0 from an orthonormal block."""
    trace = u[0] + u[4] + u[8]
    if trace > 0.0:
        s = math.sqrt(trace + 1.0) * 2.0
        q = (0.25 * s, (u[7] - u[5]) / s, (u[2] - u[6]) / s, (u[3] - u[1]) / s)
    elif u[0] > u[4] and u[0] > u[8]:
        s = math.sqrt(1.0 + u[0] - u[4] - u[8]) * 2.0
        q = ((u[7] - u[5]) / s, 0.25 * s, (u[1] + u[3]) / s, (u[2] + u[6]) / s)
    elif u[4] > u[8]:
        s = math.sqrt(1.0 + u[4] - u[0] - u[8]) * 2.0
        q = ((u[2] - u[6]) / s, (u[1] + u[3]) / s, 0.25 * s, (u[5] + u[7]) / s)
    else:
        s = math.sqrt(1.0 + u[8] - u[0] - u[4]) * 2.0
        q = ((u[3] - u[1]) / s, (u[2] + u[6]) / s, (u[5] + u[7]) / s, 0.25 * s)
    if q[0] < 0.0:
        return (-q[0], -q[1], -q[2], -q[3])
    return q


def _twist_degrees(q: tuple[float, float, float, float], axis_index: int) -> float:
    """Signed angle of the best rotation about one coordinate axis inside q."""
    return math.degrees(2.0 * math.atan2(q[1 + axis_index], q[0]))


def suggest_hint(virtual: Mat4, physical: Mat4,
                 weights: ErrorWeights = DEFAULT_WEIGHTS,
                 tolerance: PoseError = DEFAULT_TOLERANCE) -> Hint:
    """Single step from the alignment delta that best reduces the total error.

    Candidates are the delta's per-axis rotation twists, its scale factor and
    the translation residual. The translation candidate is only offered once
    rotation and scale sit within tolerance: rotating or scaling afterwards
    would drag the translation column off again, so translation comes last
    and a solve never needs more than one step per mismatched factor.

    Ties break in order translate > rotate (x before y before z) > scale.
    """
    dv = decompose_trs(virtual)
    dp = decompose_trs(physical)
    err = _pose_error_between(dv, dp, weights)
    if (err.translation <= tolerance.translation
            and err.rotation <= tolerance.rotation
            and err.scale <= tolerance.scale):
        raise AlreadyAlignedError("poses already aligned within tolerance")

    delta = alignment_delta(virtual, physical)
    dd = decompose_trs(delta)

    candidates: list[TransformStep] = []
    if err.rotation <= tolerance.rotation and err.scale <= tolerance.scale:
        residual = dp.translation - dv.translation
        if residual.norm() > 1e-12:
            candidates.append(Translate(residual))
    q = _quat(dd.rotation.upper3())
    for idx, axis in enumerate((RotationAxis.X, RotationAxis.Y, RotationAxis.Z)):
        twist = _twist_degrees(q, idx)
        if abs(twist) > 1e-9:
            candidates.append(Rotate(axis, twist))
    if abs(math.log(dd.scale)) > 1e-12:
        candidates.append(Scale(dd.scale))

    best_step: TransformStep | None = None
    best_after: PoseError | None = None
    for step in candidates:
        after = _pose_error_between(decompose_trs(step_matrix(step) @ virtual), dp, weights)
        if best_after is None or after.total < best_after.total:
            best_step, best_after = step, after
    assert best_step is not None and best_after is not None
    return Hint(best_step, best_after.total)


def kabsch_align(corr: PointCorrespondences) -> RigidAlignment:
    """Least-squares rigid motion mapping pre-image points onto image points.

    Cross-covariance SVD with the determinant flip that forces a proper
    rotation (no reflection). Collinear pre-image points leave the rotation
    about their common line unconstrained and are rejected.
    """
    pre = np.array([[p.x, p.y, p.z] for p, _ in corr.pairs], dtype=float)
    img = np.array([[q.x, q.y, q.z] for _, q in corr.pairs], dtype=float)
    c_pre = pre.mean(axis=0)
    c_img = img.mean(axis=0)
    a = pre - c_pre
    b = img - c_img

    spread = np.linalg.svd(a, compute_uv=False)
    if spread[1] <= max(spread[0] * 1e-9, 1e-12):
        raise DegenerateConfigurationError("pre-image points are (nearly) collinear")

    h = a.T @ b
    u, _, vt = np.linalg.svd(h)
    d = 1.0 if np.linalg.det(vt.T @ u.T) >= 0.0 else -1.0
    r = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    t = c_img - r @ c_pre

    mapped = pre @ r.T + t
    rms = float(np.sqrt(np.mean(np.sum((mapped - img) ** 2, axis=1))))

    rotation = Mat4((float(r[0, 0]), float(r[0, 1]), float(r[0, 2]), 0.0,
                     float(r[1, 0]), float(r[1, 1]), float(r[1, 2]), 0.0,
                     float(r[2, 0]), float(r[2, 1]), float(r[2, 2]), 0.0,
                     0.0, 0.0, 0.0, 1.0))
    return RigidAlignment(rotation, Vec3(float(t[0]), float(t[1]), float(t[2])), rms)
