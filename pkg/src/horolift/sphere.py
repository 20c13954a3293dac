"""Round-sphere plumbing: domains, tangent frames, charts and sample grids.

Points of S^n are unit vectors in R^{n+1}; the north pole is the last basis
vector.  Tangent vectors are stored as ambient vectors orthogonal to the
base point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


def north_pole(n: int) -> np.ndarray:
    p = np.zeros(n + 1)
    p[-1] = 1.0
    return p


def as_points(x, n: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """Validate unit vectors; returns a 2-d array ``(m, n+1)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if n is not None and x.shape[-1] != n + 1:
        raise DomainError(f"expected points of S^{n} (length {n + 1}), got length {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite sphere point")
    if np.any(np.abs(np.linalg.norm(x, axis=-1) - 1.0) > tol):
        raise DomainError("points must be unit vectors")
    return x


def tangent_projector(x: np.ndarray) -> np.ndarray:
    """``I - x x^T`` for each row of ``x``."""
    eye = np.eye(x.shape[-1])
    return eye - x[..., :, None] * x[..., None, :]


def tangent_frame(x: np.ndarray) -> np.ndarray:
    """Orthonormal tangent frames, shape ``(m, n+1, n)``.

    Built from the Householder reflection taking the last axis to ``x``; the
    result is a deterministic function of ``x``.
    """
    x = np.atleast_2d(x)
    d = x.shape[-1]
    sgn = np.where(x[:, -1] >= 0, 1.0, -1.0)
    w = x.copy()
    w[:, -1] += sgn
    h = np.eye(d) - 2.0 * w[:, :, None] * w[:, None, :] / np.einsum("mi,mi->m", w, w)[:, None, None]
    return h[:, :, :-1]


def polar_angle(x: np.ndarray, pole: np.ndarray) -> np.ndarray:
    return np.arccos(np.clip(x @ pole, -1.0, 1.0))


def polar_direction(x: np.ndarray, pole: np.ndarray) -> np.ndarray:
    """Unit vector ``d/dtheta`` at ``x`` (increasing polar angle from ``pole``)."""
    c = x @ pole
    s = np.sqrt(np.maximum(1.0 - c**2, 0.0))
    if np.any(s < 1e-14):
        raise DomainError("polar direction undefined at the poles")
    return (c[..., None] * x - pole) / s[..., None]


# --------------------------------------------------------------------------
# stereographic charts
# chart 0 projects from the south pole (u = 0 is the north pole),
# chart 1 projects from the north pole (u = 0 is the south pole).


def chart_of(x: np.ndarray) -> np.ndarray:
    """Preferred chart id per point: the one keeping ``|u| <= 1``."""
    return np.where(np.atleast_2d(x)[:, -1] >= 0, 0, 1)


def to_chart(x: np.ndarray, chart) -> np.ndarray:
    x = np.atleast_2d(x)
    sign = np.where(np.asarray(chart) == 0, 1.0, -1.0) * np.ones(x.shape[0])
    return x[:, :-1] / (1.0 + sign * x[:, -1])[:, None]


def from_chart(u: np.ndarray, chart) -> np.ndarray:
    u = np.atleast_2d(u)
    sign = np.where(np.asarray(chart) == 0, 1.0, -1.0) * np.ones(u.shape[0])
    q = np.einsum("mi,mi->m", u, u)
    last = sign * (1.0 - q) / (1.0 + q)
    return np.concatenate([2.0 * u / (1.0 + q)[:, None], last[:, None]], axis=1)


def chart_jacobian(u: np.ndarray, chart) -> np.ndarray:
    """``dx/du``, shape ``(m, n+1, n)``."""
    u = np.atleast_2d(u)
    m, n = u.shape
    sign = np.where(np.asarray(chart) == 0, 1.0, -1.0) * np.ones(m)
    q = np.einsum("mi,mi->m", u, u)
    den = 1.0 + q
    jac = np.empty((m, n + 1, n))
    jac[:, :n, :] = 2.0 * np.eye(n)[None] / den[:, None, None] - 4.0 * u[:, :, None] * u[:, None, :] / (den**2)[:, None, None]
    jac[:, n, :] = sign[:, None] * (-4.0 * u / (den**2)[:, None])
    return jac


def chart_log_scale(u: np.ndarray):
    """``w`` and ``dw/du`` where ``g_0 = e^{2w} |du|^2`` in either chart."""
    q = np.einsum("mi,mi->m", u, u)
    w = np.log(2.0 / (1.0 + q))
    dw = -2.0 * u / (1.0 + q)[:, None]
    return w, dw


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class DomainSpec:
    """Cap ``B(pole, r)``, hemisphere, annulus ``A(r)`` or the full sphere.

    ``radius`` is the cap radius, or the inner radius of the annulus whose
    outer boundary is the equator.
    """

    kind: str
    n: int
    radius: float = math.pi / 2
    pole: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("cap", "hemisphere", "annulus", "sphere"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.n < 2:
            raise DomainError("sphere dimension must be >= 2")
        r = math.pi / 2 if kind == "hemisphere" else float(self.radius)
        if kind == "cap" and not 0 < r <= math.pi / 2:
            raise DomainError(f"cap radius must lie in (0, pi/2], got {r}")
        if kind == "annulus" and not 0 < r < math.pi / 2:
            raise DomainError(f"annulus inner radius must lie in (0, pi/2), got {r}")
        pole = north_pole(self.n) if self.pole is None else np.asarray(self.pole, dtype=float)
        if pole.shape != (self.n + 1,) or abs(np.linalg.norm(pole) - 1) > 1e-12:
            raise DomainError("pole must be a unit vector of R^{n+1}")
        object.__setattr__(self, "kind", "cap" if kind == "hemisphere" else kind)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "pole", pole)

    @classmethod
    def hemisphere(cls, n: int, pole=None) -> "DomainSpec":
        return cls("cap", n, math.pi / 2, pole)

    @property
    def is_hemisphere(self) -> bool:
        return self.kind == "cap" and abs(self.radius - math.pi / 2) < 1e-15

    @property
    def polar_interval(self) -> tuple[float, float]:
        if self.kind == "cap":
            return 0.0, self.radius
        if self.kind == "annulus":
            return self.radius, math.pi / 2
        return 0.0, math.pi

    @property
    def components(self) -> tuple[str, ...]:
        return {"cap": ("outer",), "annulus": ("inner", "outer"), "sphere": ()}[self.kind]

    def component_angle(self, component: str) -> float:
        if component not in self.components:
            raise DomainError(f"{self.kind} has no boundary component {component!r}")
        return self.radius if (self.kind == "cap" or component == "inner") else math.pi / 2

    def inward_normal(self, component: str, x: np.ndarray) -> np.ndarray:
        """g_0-unit normal pointing into the domain along ``component``."""
        d = polar_direction(x, self.pole)
        return -d if (self.kind == "cap" or component == "outer") else d

    def reference_curvature(self, component: str) -> float:
        """g_0 geodesic/mean curvature of the component w.r.t. the inward normal.

        Positive for the convex boundary of a small cap; ``-cot r`` for the
        inner boundary of an annulus.
        """
        theta = self.component_angle(component)
        c = math.cos(theta) / math.sin(theta)
        if abs(theta - math.pi / 2) < 1e-15:
            c = 0.0
        return -c if self.kind == "annulus" and component == "inner" else c

    def contains(self, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        if self.kind == "sphere":
            return np.ones(np.atleast_2d(x).shape[0], dtype=bool)
        th = polar_angle(np.atleast_2d(x), self.pole)
        a, b = self.polar_interval
        return (th >= a - tol) & (th <= b + tol)

    def on_component(self, component: str, x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        th = polar_angle(np.atleast_2d(x), self.pole)
        return np.abs(th - self.component_angle(component)) <= tol

    def rotation_to_pole(self) -> np.ndarray:
        """Orthogonal matrix taking the north pole to ``self.pole``."""
        return pole_frame(self.pole)


def pole_frame(pole: np.ndarray) -> np.ndarray:
    """Orthogonal matrix whose last column is ``pole``."""
    d = pole.size
    north = np.zeros(d)
    north[-1] = 1.0
    if np.allclose(pole, north, atol=1e-15):
        return np.eye(d)
    f = tangent_frame(pole[None])[0]
    return np.concatenate([f, pole[:, None]], axis=1)


def sphere_directions(n: int, count: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """``count`` well spread unit vectors of R^n (directions on S^{n-1})."""
    if n == 2:
        a = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    if n == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        a = np.pi * (1 + 5**0.5) * i
        r = np.sqrt(1 - z**2)
        return np.stack([r * np.cos(a), r * np.sin(a), z], axis=1)
    rng = np.random.default_rng(0) if rng is None else rng
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def polar_points(theta: np.ndarray, directions: np.ndarray, pole: np.ndarray) -> np.ndarray:
    """Points at polar angles ``theta`` and azimuthal directions, flattened.

    Returns an array of shape ``(len(theta) * len(directions), n+1)`` ordered
    theta-major.
    """
    theta = np.asarray(theta, dtype=float)
    rot = pole_frame(pole)
    local = np.concatenate(
        [
            np.sin(theta)[:, None, None] * directions[None, :, :],
            np.broadcast_to(np.cos(theta)[:, None, None], (theta.size, directions.shape[0], 1)),
        ],
        axis=2,
    ).reshape(-1, pole.size)
    return local @ rot.T


def domain_grid(domain: DomainSpec, polar: int = 16, directions: int = 16, include_boundary: bool = True):
    """Interior and boundary sample points of a domain.

    Returns ``(interior, {component: boundary_points})``.  Interior polar
    angles avoid the boundary circles and the pole.
    """
    a, b = domain.polar_interval
    th = a + (b - a) * (np.arange(polar) + 0.5) / polar
    dirs = sphere_directions(domain.n, directions)
    interior = polar_points(th, dirs, domain.pole)
    if domain.kind == "cap":
        interior = np.vstack([domain.pole[None], interior])
    bnd = {}
    if include_boundary:
        for comp in domain.components:
            bnd[comp] = polar_points(np.array([domain.component_angle(comp)]), dirs, domain.pole)
    return interior, bnd


def random_points(domain: DomainSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random points of the domain (rejection from the sphere)."""
    out = []
    need = count
    while need > 0:
        v = rng.standard_normal((max(2 * need, 64), domain.n + 1))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        v = v[domain.contains(v, tol=0.0)]
        out.append(v[:need])
        need -= len(out[-1])
    return np.vstack(out)
