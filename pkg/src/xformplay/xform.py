"""Core 4x4 homogeneous transform algebra.

Conventions used across the whole package:

* column vectors: points are columns, ``p' = M @ p``
* right-handed axes; positive angles turn counterclockwise when viewed
  from the positive end of the rotation axis
* angles are degrees at every interface (radians only inside trig calls)
* applying a new step means left-multiplying (world-frame semantics)
* scene unit = 1 stud pitch (8 mm nominal)

Everything here is an immutable value; all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

from .errors import InvalidParameterError, SingularMatrixError, UnsupportedMatrixError


@dataclass(frozen=True)
class Vec3:
    """3D vector / point in scene units."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: Vec3) -> Vec3:
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, scalar: float) -> Vec3:
        return Vec3(self.x * scalar, self.y * scalar, self.z * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> Vec3:
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: Vec3) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: Vec3) -> Vec3:
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def to_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


class RotationAxis(Enum):
    X = "x"
    Y = "y"
    Z = "z"


@dataclass(frozen=True)
class Translate:
    v: Vec3


@dataclass(frozen=True)
class Rotate:
    axis: RotationAxis
    angle: float  # degrees


@dataclass(frozen=True)
class Scale:
    factor: float


TransformStep = Union[Translate, Rotate, Scale]


def normalize_degrees(angle: float) -> float:
    """Fold an angle into (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


_IDENTITY = (
    1.0, 0.0, 0.0, 0.0,
    0.0, 1.0, 0.0, 0.0,
    0.0, 0.0, 1.0, 0.0,
    0.0, 0.0, 0.0, 1.0,
)


@dataclass(frozen=True)
class Mat4:
    """4x4 matrix, row-major tuple of 16 floats.

    Matrices built by the constructors in this module always carry the exact
    affine bottom row (0, 0, 0, 1); products of such matrices preserve it
    bit-for-bit, which is what lets `apply_point` check it exactly.
    """

    m: tuple[float, ...] = _IDENTITY

    def __post_init__(self):
        if len(self.m) != 16:
            raise InvalidParameterError("Mat4 needs exactly 16 entries")

    def __getitem__(self, idx: tuple[int, int]) -> float:
        row, col = idx
        return self.m[row * 4 + col]

    def __matmul__(self, other: Mat4) -> Mat4:
        a, b = self.m, other.m
        out = []
        for i in (0, 4, 8, 12):
            for j in (0, 1, 2, 3):
                # Fixed left-to-right term order; multiply_expansion replays
                # the identical sum so panel arithmetic matches exactly.
                out.append(a[i] * b[j] + a[i + 1] * b[j + 4]
                           + a[i + 2] * b[j + 8] + a[i + 3] * b[j + 12])
        return Mat4(tuple(out))

    def transpose(self) -> Mat4:
        m = self.m
        return Mat4((m[0], m[4], m[8], m[12],
                     m[1], m[5], m[9], m[13],
                     m[2], m[6], m[10], m[14],
                     m[3], m[7], m[11], m[15]))

    def row(self, i: int) -> tuple[float, float, float, float]:
        return self.m[i * 4:i * 4 + 4]

    def column4(self) -> Vec3:
        """Translation column (entries (1,4), (2,4), (3,4) in math notation)."""
        return Vec3(self.m[3], self.m[7], self.m[11])

    def upper3(self) -> tuple[float, ...]:
        """Row-major 9-tuple of the rotation/scale block."""
        m = self.m
        return (m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10])

    def is_affine(self) -> bool:
        return self.m[12:16] == (0.0, 0.0, 0.0, 1.0)

    @staticmethod
    def identity() -> Mat4:
        return Mat4()


IDENTITY = Mat4.identity()


def rotation_matrix(axis: RotationAxis, angle: float) -> Mat4:
    """Rotation about a coordinate axis, embedded in a 4x4 with zero translation."""
    if not math.isfinite(angle):
        raise InvalidParameterError(f"rotation angle must be finite, got {angle!r}")
    t = math.radians(angle)
    c = math.cos(t)
    s = math.sin(t)
    if axis is RotationAxis.X:
        return Mat4((1.0, 0.0, 0.0, 0.0,
                     0.0, c, -s, 0.0,
                     0.0, s, c, 0.0,
                     0.0, 0.0, 0.0, 1.0))
    if axis is RotationAxis.Y:
        return Mat4((c, 0.0, s, 0.0,
                     0.0, 1.0, 0.0, 0.0,
                     -s, 0.0, c, 0.0,
                     0.0, 0.0, 0.0, 1.0))
    return Mat4((c, -s, 0.0, 0.0,
                 s, c, 0.0, 0.0,
                 0.0, 0.0, 1.0, 0.0,
                 0.0, 0.0, 0.0, 1.0))


def translation_matrix(v: Vec3) -> Mat4:
    """Identity with v in the translation column."""
    if not v.is_finite():
        raise InvalidParameterError(f"translation must be finite, got {v!r}")
    return Mat4((1.0, 0.0, 0.0, v.x,
                 0.0, 1.0, 0.0, v.y,
                 0.0, 0.0, 1.0, v.z,
                 0.0, 0.0, 0.0, 1.0))


def scale_matrix(factor: float) -> Mat4:
    """Uniform scale; factor must be strictly positive (0 is singular, negative is a reflection)."""
    if not math.isfinite(factor) or factor <= 0.0:
        raise InvalidParameterError(f"scale factor must be finite and > 0, got {factor!r}")
    return Mat4((factor, 0.0, 0.0, 0.0,
                 0.0, factor, 0.0, 0.0,
                 0.0, 0.0, factor, 0.0,
                 0.0, 0.0, 0.0, 1.0))


def step_matrix(step: TransformStep) -> Mat4:
    if isinstance(step, Translate):
        return translation_matrix(step.v)
    if isinstance(step, Rotate):
        return rotation_matrix(step.axis, step.angle)
    if isinstance(step, Scale):
        return scale_matrix(step.factor)
    raise InvalidParameterError(f"unknown step type {type(step).__name__}")


def compose(steps: Iterable[TransformStep]) -> Mat4:
    """Fold steps into one matrix: each successive step left-multiplies.

    compose([s1, .., sn]) = M(sn) @ ... @ M(s1); empty input gives identity.
    """
    acc = IDENTITY
    for step in steps:
        acc = step_matrix(step) @ acc
    return acc


def apply_point(m: Mat4, p: Vec3) -> Vec3:
    """Map a point through an affine matrix (w stays exactly 1 and is dropped)."""
    if not m.is_affine():
        raise UnsupportedMatrixError("matrix bottom row is not (0, 0, 0, 1)")
    e = m.m
    return Vec3(
        e[0] * p.x + e[1] * p.y + e[2] * p.z + e[3],
        e[4] * p.x + e[5] * p.y + e[6] * p.z + e[7],
        e[8] * p.x + e[9] * p.y + e[10] * p.z + e[11],
    )


def _det3(u: tuple[float, ...]) -> float:
    return (u[0] * (u[4] * u[8] - u[5] * u[7])
            - u[1] * (u[3] * u[8] - u[5] * u[6])
            + u[2] * (u[3] * u[7] - u[4] * u[6]))


def invert(m: Mat4) -> Mat4:
    """Inverse of a well-conditioned matrix.

    Affine matrices take a closed-form path (adjugate of the 3x3 block plus
    back-rotated translation) that keeps the bottom row exact, so inverses
    stay usable with `apply_point` and further composition.
    """
    if m.is_affine():
        u = m.upper3()
        det = _det3(u)
        if abs(det) < 1e-12:
            raise SingularMatrixError(f"matrix is singular (|det| = {abs(det):.3e})")
        # adjugate / det
        r = (
            (u[4] * u[8] - u[5] * u[7]) / det,
            (u[2] * u[7] - u[1] * u[8]) / det,
            (u[1] * u[5] - u[2] * u[4]) / det,
            (u[5] * u[6] - u[3] * u[8]) / det,
            (u[0] * u[8] - u[2] * u[6]) / det,
            (u[2] * u[3] - u[0] * u[5]) / det,
            (u[3] * u[7] - u[4] * u[6]) / det,
            (u[1] * u[6] - u[0] * u[7]) / det,
            (u[0] * u[4] - u[1] * u[3]) / det,
        )
        t = m.column4()
        return Mat4((r[0], r[1], r[2], -(r[0] * t.x + r[1] * t.y + r[2] * t.z),
                     r[3], r[4], r[5], -(r[3] * t.x + r[4] * t.y + r[5] * t.z),
                     r[6], r[7], r[8], -(r[6] * t.x + r[7] * t.y + r[8] * t.z),
                     0.0, 0.0, 0.0, 1.0))
    return _invert_general(m)


def _invert_general(m: Mat4) -> Mat4:
    """Cofactor-expansion inverse for non-affine matrices."""
    a = m.m
    c = [0.0] * 16
    c[0] = a[5] * a[10] * a[15] - a[5] * a[11] * a[14] - a[9] * a[6] * a[15] + a[9] * a[7] * a[14] + a[13] * a[6] * a[11] - a[13] * a[7] * a[10]
    c[4] = -a[4] * a[10] * a[15] + a[4] * a[11] * a[14] + a[8] * a[6] * a[15] - a[8] * a[7] * a[14] - a[12] * a[6] * a[11] + a[12] * a[7] * a[10]
    c[8] = a[4] * a[9] * a[15] - a[4] * a[11] * a[13] - a[8] * a[5] * a[15] + a[8] * a[7] * a[13] + a[12] * a[5] * a[11] - a[12] * a[7] * a[9]
    c[12] = -a[4] * a[9] * a[14] + a[4] * a[10] * a[13] + a[8] * a[5] * a[14] - a[8] * a[6] * a[13] - a[12] * a[5] * a[10] + a[12] * a[6] * a[9]
    c[1] = -a[1] * a[10] * a[15] + a[1] * a[11] * a[14] + a[9] * a[2] * a[15] - a[9] * a[3] * a[14] - a[13] * a[2] * a[11] + a[13] * a[3] * a[10]
    c[5] = a[0] * a[10] * a[15] - a[0] * a[11] * a[14] - a[8] * a[2] * a[15] + a[8] * a[3] * a[14] + a[12] * a[2] * a[11] - a[12] * a[3] * a[10]
    c[9] = -a[0] * a[9] * a[15] + a[0] * a[11] * a[13] + a[8] * a[1] * a[15] - a[8] * a[3] * a[13] - a[12] * a[1] * a[11] + a[12] * a[3] * a[9]
    c[13] = a[0] * a[9] * a[14] - a[0] * a[10] * a[13] - a[8] * a[1] * a[14] + a[8] * a[2] * a[13] + a[12] * a[1] * a[10] - a[12] * a[2] * a[9]
    c[2] = a[1] * a[6] * a[15] - a[1] * a[7] * a[14] - a[5] * a[2] * a[15] + a[5] * a[3] * a[14] + a[13] * a[2] * a[7] - a[13] * a[3] * a[6]
    c[6] = -a[0] * a[6] * a[15] + a[0] * a[7] * a[14] + a[4] * a[2] * a[15] - a[4] * a[3] * a[14] - a[12] * a[2] * a[7] + a[12] * a[3] * a[6]
    c[10] = a[0] * a[5] * a[15] - a[0] * a[7] * a[13] - a[4] * a[1] * a[15] + a[4] * a[3] * a[13] + a[12] * a[1] * a[7] - a[12] * a[3] * a[5]
    c[14] = -a[0] * a[5] * a[14] + a[0] * a[6] * a[13] + a[4] * a[1] * a[14] - a[4] * a[2] * a[13] - a[12] * a[1] * a[6] + a[12] * a[2] * a[5]
    c[3] = -a[1] * a[6] * a[11] + a[1] * a[7] * a[10] + a[5] * a[2] * a[11] - a[5] * a[3] * a[10] - a[9] * a[2] * a[7] + a[9] * a[3] * a[6]
    c[7] = a[0] * a[6] * a[11] - a[0] * a[7] * a[10] - a[4] * a[2] * a[11] + a[4] * a[3] * a[10] + a[8] * a[2] * a[7] - a[8] * a[3] * a[6]
    c[11] = -a[0] * a[5] * a[11] + a[0] * a[7] * a[9] + a[4] * a[1] * a[11] - a[4] * a[3] * a[9] - a[8] * a[1] * a[7] + a[8] * a[3] * a[5]
    c[15] = a[0] * a[5] * a[10] - a[0] * a[6] * a[9] - a[4] * a[1] * a[10] + a[4] * a[2] * a[9] + a[8] * a[1] * a[6] - a[8] * a[2] * a[5]
    det = a[0] * c[0] + a[1] * c[4] + a[2] * c[8] + a[3] * c[12]
    if abs(det) < 1e-12:
        raise SingularMatrixError(f"matrix is singular (|det| = {abs(det):.3e})")
    return Mat4(tuple(v / det for v in c))


@dataclass(frozen=True)
class CellExpansion:
    """One product cell: the four (a_ik, b_kj) pairs, their products, and the sum.

    Rows/columns are 0-indexed here; display layers add 1 for math notation.
    """

    row: int
    col: int
    terms: tuple[tuple[float, float], ...]
    products: tuple[float, ...]
    total: float


@dataclass(frozen=True)
class MulExpansion:
    """Cell-by-cell expansion of a matrix product, for the on-screen algebra."""

    a: Mat4
    b: Mat4
    cells: tuple[CellExpansion, ...]

    def cell(self, row: int, col: int) -> CellExpansion:
        return self.cells[row * 4 + col]

    def product(self) -> Mat4:
        return Mat4(tuple(c.total for c in self.cells))


def multiply_expansion(a: Mat4, b: Mat4) -> MulExpansion:
    """Expand a @ b into per-cell terms whose sums equal the product exactly."""
    am, bm = a.m, b.m
    cells = []
    for i in range(4):
        for j in range(4):
            terms = tuple((am[i * 4 + k], bm[k * 4 + j]) for k in range(4))
            products = tuple(x * y for x, y in terms)
            total = products[0] + products[1] + products[2] + products[3]
            cells.append(CellExpansion(i, j, terms, products, total))
    return MulExpansion(a, b, tuple(cells))
