"""Planes of hyperbolic space and diagnostics for lifted domains with boundary.

A :class:`PlaneSpec` is the level set ``{y in H^{n+1} : <y, v> = level}``
of a unit spacelike vector ``v``.  Two encodings are used:

* ``E(c)``: ``v = (0, p)`` for the pole ``p``, level ``c``.  Its ideal
  boundary is the equator; ``c = 0`` is totally geodesic and otherwise it is
  the equidistant hypersurface at signed distance ``asinh(c)``.
* ``E(r)``: ``v = (cos r, p) / sin r``, level 0.  The totally geodesic
  hyperplane whose ideal boundary is the latitude sphere at polar angle ``r``.

For a hemisphere factor with boundary mean curvature ``h`` (inward normal,
see :mod:`horolift.metric`) the lifted boundary lies on ``E(-h)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import lorentz, sphere
from .factors import ConformalFactor
from .lift import HypersurfaceSample, lift, lift_point
from .metric import boundary_mean_curvature
from .sphere import DomainSpec


@dataclass(frozen=True)
class PlaneSpec:
    normal: np.ndarray
    level: float = 0.0
    label: str = "plane"

    def __post_init__(self):
        v = np.asarray(self.normal, dtype=float)
        q = lorentz.minkowski_inner(v, v)
        if q <= lorentz.MEMBERSHIP_TOL:
            raise ValueError("plane normal must be spacelike")
        object.__setattr__(self, "normal", v / math.sqrt(q))

    @classmethod
    def equidistant(cls, n: int, c: float, pole=None) -> "PlaneSpec":
        pole = sphere.north_pole(n) if pole is None else np.asarray(pole, dtype=float)
        return cls(np.concatenate([[0.0], pole]), float(c), f"E(c={c:g})")

    @classmethod
    def latitude(cls, n: int, r: float, pole=None) -> "PlaneSpec":
        if not 0 < r < math.pi:
            raise ValueError("latitude angle must lie in (0, pi)")
        pole = sphere.north_pole(n) if pole is None else np.asarray(pole, dtype=float)
        return cls(np.concatenate([[math.cos(r)], pole]) / math.sin(r), 0.0, f"E(r={r:.6g})")

    def value(self, y) -> np.ndarray:
        """``<y, v> - level``."""
        return np.asarray(lorentz.minkowski_inner(y, self.normal)) - self.level

    def field_normal(self, y) -> np.ndarray:
        """Unit normal of the plane at ``y``: ``(v + level y) / sqrt(1 + level^2)``."""
        y = np.asarray(y, dtype=float)
        return (self.normal + self.level * y) / math.sqrt(1.0 + self.level**2)

    def angle_target(self) -> float:
        """``<eta, n>`` along the boundary: ``c / sqrt(1 + c^2)``."""
        return self.level / math.sqrt(1.0 + self.level**2)


@dataclass
class DiagnosticReport:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    samples: int
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.deviation >= 0 and not math.isnan(self.deviation):
            raise ValueError("deviations are nonnegative")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["deviation"] = _clean(self.deviation)
        return d


def _clean(v):
    return None if v is None or (isinstance(v, float) and not math.isfinite(v)) else v


def boundary_plane(domain: DomainSpec, component: str, h: float = 0.0) -> PlaneSpec:
    """Plane containing the lifted boundary component.

    Equator components go to ``E(-h)``; the inner boundary of an annulus
    (``h = 0``) goes to ``E(r)``.
    """
    theta = domain.component_angle(component)
    if abs(theta - math.pi / 2) < 1e-15:
        return PlaneSpec.equidistant(domain.n, -h, domain.pole)
    if h != 0.0:
        raise ValueError("only minimal boundaries off the equator are supported")
    return PlaneSpec.latitude(domain.n, theta, domain.pole)


def _boundary_points(domain, component, directions):
    _, bnd = sphere.domain_grid(domain, 1, directions)
    return bnd[component]


def check_boundary_in_plane(rho: ConformalFactor, domain: DomainSpec, component: str, plane: PlaneSpec,
                            directions: int = 64, tol: float = 1e-6) -> DiagnosticReport:
    """``max |<phi(x), v> - level|`` over boundary samples of ``component``."""
    x = _boundary_points(domain, component, directions)
    phi, _, _ = lift_point(rho, x)
    dev = float(np.max(np.abs(plane.value(phi))))
    return DiagnosticReport(f"boundary_in_plane[{component}]", dev, tol, dev <= tol, len(x),
                            {"plane": plane.label, "level": plane.level})


def check_angle(rho: ConformalFactor, domain: DomainSpec, component: str, plane: PlaneSpec,
                directions: int = 64, tol: float = 1e-6) -> DiagnosticReport:
    """Deviation of ``<eta, n>`` from ``c / sqrt(1 + c^2)`` on the boundary.

    Containment in the plane is checked first; if it fails the angle is not
    evaluated and the report explains why.
    """
    contain = check_boundary_in_plane(rho, domain, component, plane, directions, tol)
    target = plane.angle_target()
    if not contain.passed:
        return DiagnosticReport(f"angle[{component}]", math.nan, tol, False, contain.samples,
                                {"skipped": "boundary is not contained in the plane",
                                 "containment_deviation": contain.deviation, "target": target})
    x = _boundary_points(domain, component, directions)
    phi, eta, _ = lift_point(rho, x)
    inner = np.asarray(lorentz.minkowski_inner(eta, plane.field_normal(phi)))
    dev = float(np.max(np.abs(inner - target)))
    return DiagnosticReport(f"angle[{component}]", dev, tol, dev <= tol, len(x),
                            {"target": target, "angle": math.acos(max(-1.0, min(1.0, target))),
                             "plane": plane.label})


def check_halfspace(rho: ConformalFactor, domain: DomainSpec, c: float = 0.0, polar: int = 16,
                    directions: int = 32, tol: float = 1e-10) -> DiagnosticReport:
    """Containment of the lift in the closed half-space (cap) or slab (annulus).

    Cap mode: ``min <phi, (0, p)> - c`` over interior and boundary samples,
    passing if at least ``-tol``.  Annulus mode: the slab between ``E(r)``
    and ``E(0)``, with the inner side of each plane fixed by the lift of the
    polar mid-circle.
    """
    interior, bnd = sphere.domain_grid(domain, polar, directions)
    x = np.vstack([interior, *bnd.values()])
    phi, _, _ = lift_point(rho, x)
    if domain.kind == "annulus":
        planes = [PlaneSpec.latitude(domain.n, domain.radius, domain.pole),
                  PlaneSpec.equidistant(domain.n, 0.0, domain.pole)]
        a, b = domain.polar_interval
        mid = sphere.polar_points(np.array([0.5 * (a + b)]), sphere.sphere_directions(domain.n, 1), domain.pole)
        pm, _, _ = lift_point(rho, mid)
        signs = [float(np.sign(p.value(pm)[0])) for p in planes]
        if 0.0 in signs:
            return DiagnosticReport("halfspace", math.nan, tol, False, len(x),
                                    {"mode": "slab", "error": "mid-circle lies on a bounding plane"})
        margins = np.min([s * p.value(phi) for s, p in zip(signs, planes)], axis=0)
        detail = {"mode": "slab", "planes": [p.label for p in planes], "signs": signs}
    else:
        plane = PlaneSpec.equidistant(domain.n, c, domain.pole)
        margins = plane.value(phi)
        detail = {"mode": "halfspace", "plane": plane.label}
    worst = float(np.min(margins))
    detail["min_margin"] = worst
    detail["interior_min_margin"] = float(np.min(margins[: len(interior)]))
    return DiagnosticReport("halfspace", max(0.0, -worst), tol, worst >= -tol, len(x), detail)


def check_convexity_bound(rho: ConformalFactor, domain: DomainSpec, c: float = 0.0, polar: int = 16,
                          directions: int = 32, step: float | None = None) -> DiagnosticReport:
    """``min kappa_min - |tanh(asinh c)|`` over samples; passes when positive."""
    interior, bnd = sphere.domain_grid(domain, polar, directions)
    x = np.vstack([interior, *bnd.values()])
    s = lift(rho, x, step)
    bound = abs(c) / math.sqrt(1.0 + c * c)
    margin = float(np.min(s.kappa[:, 0]) - bound)
    return DiagnosticReport("convexity_bound", max(0.0, -margin), 0.0, margin > 0, len(x),
                            {"margin": margin, "kappa_min": float(np.min(s.kappa[:, 0])),
                             "equidistant_curvature": bound, "provenance": s.provenance})


def boundary_curvature_table(rho: ConformalFactor, domain: DomainSpec, directions: int = 32) -> dict:
    """Min and max boundary mean curvature per component."""
    out = {}
    for comp in domain.components:
        h = boundary_mean_curvature(rho, domain, comp, _boundary_points(domain, comp, directions))
        out[comp] = {"min": float(np.min(h)), "max": float(np.max(h))}
    return out


# --------------------------------------------------------------------------
# symmetry and proximity


def _distance_matrix(a, b):
    """Hyperbolic distances ``2 asinh(|a - b| / 2)``, exact zero for equal points."""
    diff = a[:, None, :] - b[None, :, :]
    q = np.einsum("ijk,ijk->ij", diff[..., 1:], diff[..., 1:]) - diff[..., 0] ** 2
    return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(q, 0.0)))


def _chunk(pts) -> int:
    return max(1, int(2e7 // max(1, pts.size)))


def _points_of(samples):
    if isinstance(samples, HypersurfaceSample):
        return samples.phi
    return np.asarray(samples, dtype=float)


def symmetry_defect(samples, iso: lorentz.LorentzIsometry) -> float:
    """``max_p min_q d(L p, q)`` over the sampled hypersurface points."""
    pts = _points_of(samples)
    if len(pts) == 0:
        raise ValueError("symmetry defect needs a nonempty sample set")
    moved = iso(pts)
    chunk = _chunk(pts)
    worst = 0.0
    for i in range(0, len(moved), chunk):
        d = _distance_matrix(moved[i : i + chunk], pts)
        worst = max(worst, float(np.max(np.min(d, axis=1))))
    return worst


def sample_spacing(samples) -> float:
    """Largest nearest-neighbour hyperbolic distance within the sample set."""
    pts = _points_of(samples)
    chunk = _chunk(pts)
    worst = 0.0
    for i in range(0, len(pts), chunk):
        d = _distance_matrix(pts[i : i + chunk], pts)
        idx = np.arange(i, min(i + chunk, len(pts)))
        d[np.arange(len(idx)), idx] = np.inf
        worst = max(worst, float(np.max(np.min(d, axis=1))))
    return worst


def self_proximity_scan(sample: HypersurfaceSample, extrinsic: float, separation: float) -> DiagnosticReport:
    """Flag pairs close in H^{n+1} whose base points are far apart on the sphere.

    A sampled surrogate for embeddedness; it certifies nothing.
    """
    d = _distance_matrix(sample.phi, sample.phi)
    base = np.arccos(np.clip(sample.x @ sample.x.T, -1.0, 1.0))
    flagged = np.argwhere((d < extrinsic) & (base > separation))
    flagged = flagged[flagged[:, 0] < flagged[:, 1]]
    return DiagnosticReport("self_proximity", float(len(flagged)), 0.0, len(flagged) == 0, len(sample),
                            {"extrinsic": extrinsic, "separation": separation,
                             "pairs": flagged[:10].tolist()})
