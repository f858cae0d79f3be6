from __future__ import annotations

import numpy as np

from xformplay import Mat4, Vec3


def to_np(m: Mat4) -> np.ndarray:
    return np.array(m.m, dtype=float).reshape(4, 4)


def max_entry_diff(a: Mat4, b: Mat4) -> float:
    return max(abs(x - y) for x, y in zip(a.m, b.m))


def assert_mat_close(a: Mat4, b: Mat4, tol: float = 1e-12) -> None:
    diff = max_entry_diff(a, b)
    assert diff <= tol, f"matrices differ by {diff:.3e} (tol {tol:.1e})\n{a.m}\n{b.m}"


def assert_vec_close(a: Vec3, b: Vec3, tol: float = 1e-12) -> None:
    diff = max(abs(a.x - b.x), abs(a.y - b.y), abs(a.z - b.z))
    assert diff <= tol, f"vectors differ by {diff:.3e}: {a} vs {b}"
