"""Lorentz-Minkowski space L^{n+2} and the isometries of the hyperboloid.

Vectors are plain numpy arrays whose last axis has length ``n + 2`` and is
indexed ``x_0, ..., x_{n+1}``; ``x_0`` is the timelike coordinate.  All
functions broadcast over leading axes.

The three quadrics used throughout the package are

* hyperbolic space   ``<x, x> = -1, x_0 > 0``
* de Sitter space    ``<x, x> = +1``
* the future light cone ``<x, x> = 0, x_0 > 0``
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MEMBERSHIP_TOL = 1e-10
ISOMETRY_TOL = 1e-12


class Quadric(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    DE_SITTER = "de_sitter"
    LIGHT_CONE = "light_cone"
    OTHER = "other"


def as_lorentz(a, n: int | None = None) -> np.ndarray:
    """Validate and return ``a`` as a float array of Lorentz vectors."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0 or a.shape[-1] < 4:
        raise ValueError(f"Lorentz vectors need at least 4 components (n >= 2), got shape {a.shape}")
    if n is not None and a.shape[-1] != n + 2:
        raise ValueError(f"expected {n + 2} components, got {a.shape[-1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("Lorentz vector has non-finite components")
    return a


def minkowski_inner(a, b) -> np.ndarray | float:
    """``-a_0 b_0 + sum_i a_i b_i`` over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    out = -a[..., 0] * b[..., 0] + np.einsum("...i,...i->...", a[..., 1:], b[..., 1:])
    return out if np.ndim(out) else float(out)


def minkowski_norm_sq(a):
    return minkowski_inner(a, a)


def metric_matrix(n: int) -> np.ndarray:
    """The Gram matrix ``diag(-1, 1, ..., 1)`` of size ``n + 2``."""
    j = np.eye(n + 2)
    j[0, 0] = -1.0
    return j


def classify_quadric(a, tol: float = MEMBERSHIP_TOL):
    """Classify a vector (or a batch) by the quadric it lies on.

    Returns a :class:`Quadric` for a single vector and an object array of
    them for a batch.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(minkowski_inner(a, a))
    x0 = a[..., 0]
    out = np.full(q.shape, Quadric.OTHER, dtype=object)
    out[np.abs(q - 1.0) <= tol] = Quadric.DE_SITTER
    out[(np.abs(q) <= tol) & (x0 > 0)] = Quadric.LIGHT_CONE
    out[(np.abs(q + 1.0) <= tol) & (x0 > 0)] = Quadric.HYPERBOLIC
    return out.item() if out.ndim == 0 else out


def hyperbolic_point(spatial) -> np.ndarray:
    """Point of the upper sheet with the given spatial part ``(x_1..x_{n+1})``."""
    spatial = np.asarray(spatial, dtype=float)
    x0 = np.sqrt(1.0 + np.einsum("...i,...i->...", spatial, spatial))
    return np.concatenate([x0[..., None], spatial], axis=-1)


def hyperbolic_distance(a, b) -> np.ndarray | float:
    """Geodesic distance ``arccosh(-<a, b>)`` between points of H^{n+1}."""
    c = -np.asarray(minkowski_inner(a, b))
    d = np.arccosh(np.maximum(c, 1.0))
    return d if d.ndim else float(d)


def ideal_projection(a, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Ideal point ``(a_1, ..., a_{n+1}) / a_0`` of a light-cone ray."""
    a = np.asarray(a, dtype=float)
    x0 = a[..., 0]
    if np.any(x0 <= tol):
        raise ValueError("ideal projection needs a future light-cone vector (a_0 > 0)")
    q = np.asarray(minkowski_inner(a, a))
    if np.any(np.abs(q) > tol * np.maximum(1.0, x0**2)):
        raise ValueError("vector is not on the light cone")
    return a[..., 1:] / x0[..., None]


@dataclass(frozen=True)
class LorentzIsometry:
    """A linear isometry of L^{n+2} preserving the upper sheet."""

    matrix: np.ndarray
    kind: str = "composite"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 4:
            raise ValueError(f"isometry matrix must be square of size >= 4, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if self.defect() > 1e3 * ISOMETRY_TOL:
            raise ValueError(f"matrix does not preserve the Lorentz form (defect {self.defect():.3e})")
        if m[0, 0] <= 0:
            raise ValueError("isometry swaps the sheets of the hyperboloid")

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 2

    def defect(self) -> float:
        """``max |<Lu, Lv> - <u, v>|`` over basis vectors."""
        j = metric_matrix(self.matrix.shape[0] - 2)
        return float(np.max(np.abs(self.matrix.T @ j @ self.matrix - j)))

    def __call__(self, a) -> np.ndarray:
        return np.asarray(a, dtype=float) @ self.matrix.T

    def __matmul__(self, other: "LorentzIsometry") -> "LorentzIsometry":
        return LorentzIsometry(self.matrix @ other.matrix, "composite")

    def inverse(self) -> "LorentzIsometry":
        j = metric_matrix(self.n)
        return LorentzIsometry(j @ self.matrix.T @ j, self.kind)


def identity(n: int) -> LorentzIsometry:
    return LorentzIsometry(np.eye(n + 2), "composite")


def _unit(v, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"{what} must be a unit vector (|v| = {np.linalg.norm(v):.15g})")
    return v


def hyperbolic_translation(axis_direction, s: float) -> LorentzIsometry:
    """Boost of rapidity ``s`` in the ``(x_0, axis)`` plane.

    The fixed ideal points are ``+axis`` (attracting for ``s > 0``) and
    ``-axis``; the origin ``e_0`` is moved to ``(cosh s, sinh s * axis)``.
    """
    u = _unit(axis_direction, "axis direction")
    m = np.eye(u.size + 1)
    ch, sh = np.cosh(s), np.sinh(s)
    m[0, 0] = ch
    m[0, 1:] = sh * u
    m[1:, 0] = sh * u
    m[1:, 1:] += (ch - 1.0) * np.outer(u, u)
    return LorentzIsometry(m, "translation")


def reflection_across_plane(plane_normal, offset: float = 0.0) -> LorentzIsometry:
    """Reflection across the totally geodesic hyperplane ``{<x, v> = 0}``.

    ``plane_normal`` is a spacelike vector; ``offset`` tilts it towards the
    time axis, ``v = plane_normal + offset * e_0``.  With ``plane_normal =
    e_{n+1}`` and ``offset = cos r`` this is the plane whose ideal boundary is
    the latitude sphere at polar angle ``r``.
    """
    v = np.array(plane_normal, dtype=float)
    v[0] += offset
    q = minkowski_inner(v, v)
    if q <= MEMBERSHIP_TOL:
        raise ValueError(f"reflection needs a spacelike normal, <v, v> = {q:.3e}")
    jv = v.copy()
    jv[0] = -jv[0]
    m = np.eye(v.size) - 2.0 * np.outer(v, jv) / q
    return LorentzIsometry(m, "reflection")


def rotation(n: int, i: int, j: int, angle: float) -> LorentzIsometry:
    """Rotation by ``angle`` in the spatial coordinate plane ``(x_i, x_j)``, 1 <= i, j <= n+1."""
    if not (1 <= i <= n + 1 and 1 <= j <= n + 1) or i == j:
        raise ValueError("rotation plane must be two distinct spatial coordinates")
    m = np.eye(n + 2)
    c, s = np.cos(angle), np.sin(angle)
    m[i, i] = m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return LorentzIsometry(m, "rotation")


def spatial_rotation(q) -> LorentzIsometry:
    """Embed an orthogonal ``(n+1) x (n+1)`` matrix acting on the spatial part."""
    q = np.asarray(q, dtype=float)
    m = np.eye(q.shape[0] + 1)
    m[1:, 1:] = q
    return LorentzIsometry(m, "rotation")


def random_axial_rotation(n: int, rng: np.random.Generator, axis: int | None = None) -> LorentzIsometry:
    """Random rotation fixing the ideal points ``+-e_axis`` (default: the north pole).

    ``axis`` indexes the sphere coordinates ``0..n`` (so the north pole is ``n``).
    """
    axis = n if axis is None else axis
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    others = [k for k in range(n + 1) if k != axis]
    full = np.eye(n + 1)
    full[np.ix_(others, others)] = q
    return spatial_rotation(full)
