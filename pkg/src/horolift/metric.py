"""Schouten tensor, boundary curvature and dilations of g = e^{2 rho} g_0.

The Schouten tensor of a conformal metric on the round sphere is computed
from

    Sch_g = -Hess rho + d rho (x) d rho - 1/2 (-1 + |grad rho|^2) g_0,

which makes sense in every dimension n >= 2.  Its eigenvalues are those of
``g^{-1} Sch_g``, i.e. ``e^{-2 rho}`` times the eigenvalues of the matrix in
a g_0-orthonormal frame.

Boundary curvature convention: ``h(g)`` is the mean curvature of a boundary
component measured against the inward unit normal, normalised by ``n - 1``
(geodesic curvature when n = 2).  It is positive on the boundary of a small
round cap, ``h = cot r``, and transforms as

    h(g) = e^{-rho} (h_0 - d rho / d nu),    nu the inward g_0-normal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sphere
from .errors import DomainError, NormalizationError
from .factors import ConformalFactor, Dilated
from .sphere import DomainSpec


@dataclass
class SchoutenEval:
    """Schouten tensor at a batch of points."""

    x: np.ndarray
    frame: np.ndarray        # (m, n+1, n) g_0-orthonormal tangent frames
    matrix: np.ndarray       # (m, n, n) Sch_g in that frame
    eigenvalues: np.ndarray  # (m, n), ascending; eigenvalues of g^{-1} Sch_g
    provenance: str = "closed-form"


def schouten_from_derivatives(rho, grad, hess):
    """Ambient Schouten matrix ``(m, n+1, n+1)`` from ``rho`` derivatives (tangent part only)."""
    d = grad.shape[-1]
    gg = np.einsum("mi,mi->m", grad, grad)
    return -hess + grad[:, :, None] * grad[:, None, :] - 0.5 * (gg - 1.0)[:, None, None] * np.eye(d)


def schouten_tensor(rho: ConformalFactor, x, domain: DomainSpec | None = None) -> SchoutenEval:
    x = sphere.as_points(x, rho.n, tol=1e-8)
    if domain is not None and not np.all(domain.contains(x)):
        raise DomainError("point outside the domain")
    r, grad, hess = rho.derivatives(x)
    frame = sphere.tangent_frame(x)
    amb = schouten_from_derivatives(r, grad, hess)
    mat = np.swapaxes(frame, 1, 2) @ amb @ frame
    mat = 0.5 * (mat + np.swapaxes(mat, 1, 2))
    lam = np.exp(-2.0 * r)[:, None] * np.linalg.eigvalsh(mat)
    return SchoutenEval(x, frame, mat, lam, rho.provenance)


def schouten_eigenvalues(rho: ConformalFactor, x) -> np.ndarray:
    return schouten_tensor(rho, x).eigenvalues


def boundary_mean_curvature(rho: ConformalFactor, domain: DomainSpec, component: str, x,
                            tol: float = 1e-9) -> np.ndarray:
    """``h(g) = e^{-rho} (h_0 - d rho / d nu)`` along a boundary component."""
    x = sphere.as_points(x, rho.n, tol=1e-8)
    if not np.all(domain.on_component(component, x, tol)):
        raise DomainError(f"points are not on the {component!r} boundary component")
    r, grad, _ = rho.derivatives(x)
    nu = domain.inward_normal(component, x)
    dnu = np.einsum("mi,mi->m", grad, nu)
    return np.exp(-r) * (domain.reference_curvature(component) - dnu)


def gauss_curvature_2d(rho: ConformalFactor, x) -> np.ndarray:
    """``K(g) = e^{-2 rho} (1 - Laplacian_0 rho)`` on S^2."""
    if rho.n != 2:
        raise DomainError("Gaussian curvature is only defined here for n = 2")
    x = sphere.as_points(x, 2, tol=1e-8)
    r, _, hess = rho.derivatives(x)
    lap = np.trace(hess, axis1=1, axis2=2)
    return np.exp(-2.0 * r) * (1.0 - lap)


def dilate(rho: ConformalFactor, t: float) -> ConformalFactor:
    """The factor of ``e^{2t} g``.

    Schouten eigenvalues of the result are ``e^{-2t}`` times the original
    ones and boundary curvatures scale by ``e^{-t}``.
    """
    if t == 0:
        return rho
    if isinstance(rho, Dilated):
        return Dilated(rho.base, rho.t + t)
    return Dilated(rho, t)


def kappa_from_lambda(lam):
    """Principal curvature of the lift for a Schouten eigenvalue, ``(1 + 2l) / (1 - 2l)``."""
    lam = np.asarray(lam, dtype=float)
    return (1.0 + 2.0 * lam) / (1.0 - 2.0 * lam)


def equidistant_curvature(h) -> np.ndarray:
    """``|tanh(arcsinh h)| = |h| / sqrt(1 + h^2)``."""
    h = np.asarray(h, dtype=float)
    return np.abs(h) / np.sqrt(1.0 + h**2)


@dataclass
class NormalizationCertificate:
    t0: float
    p1_slack: float       # min over grid of (1/2 - margin - max|lambda|)
    p2_slack: float       # min over grid of kappa - |tanh asinh h| - margin
    boundary_curvature: dict = field(default_factory=dict)
    grid_points: int = 0
    schedule: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "t0": self.t0,
            "p1_slack": self.p1_slack,
            "p2_slack": self.p2_slack,
            "boundary_curvature": self.boundary_curvature,
            "grid_points": self.grid_points,
            "schedule": self.schedule,
        }


def _slacks(lam_int, lam_bnd, h_bnd, t, margin):
    s2 = math.exp(-2.0 * t)
    lam = lam_int * s2
    p1 = 0.5 - margin - np.max(np.abs(lam))
    if p1 <= 0:
        return p1, -np.inf
    hmax = max((np.max(np.abs(h)) for h in h_bnd.values()), default=0.0) * math.exp(-t)
    all_lam = lam if lam_bnd is None else np.concatenate([lam, lam_bnd * s2])
    kappa = kappa_from_lambda(all_lam)
    p2 = float(np.min(kappa) - equidistant_curvature(hmax) - margin)
    return float(p1), p2


def normalize_for_lift(rho: ConformalFactor, domain: DomainSpec, polar: int = 16, directions: int = 16,
                       margin: float = 1e-6, step: float = math.log(2.0), tol: float = 1e-3,
                       t_max: float = 50.0):
    """Smallest dilation making the lift conditions hold on a verification grid.

    Conditions, with ``lambda^t = e^{-2t} lambda`` and ``h_t = e^{-t} h``:

    * (P1) ``|lambda_i^t| < 1/2 - margin`` at every grid point;
    * (P2) ``kappa_i^t = (1 + 2 lambda_i^t)/(1 - 2 lambda_i^t) > |tanh(asinh h_t)| + margin``
      at every grid point, with ``h_t`` the largest boundary curvature.

    The schedule tries ``t = 0, step, 2 step, ...`` and bisects the last
    bracket to ``tol``.  Returns ``(t0, certificate)``.
    """
    interior, bnd = sphere.domain_grid(domain, polar, directions)
    lam_int = schouten_tensor(rho, interior).eigenvalues
    bpts = np.vstack(list(bnd.values())) if bnd else None
    lam_bnd = schouten_tensor(rho, bpts).eigenvalues if bpts is not None else None
    h_bnd = {c: boundary_mean_curvature(rho, domain, c, p) for c, p in bnd.items()}

    def ok(t):
        p1, p2 = _slacks(lam_int, lam_bnd, h_bnd, t, margin)
        return p1 > 0 and p2 > 0, p1, p2

    schedule = []
    good, p1, p2 = ok(0.0)
    schedule.append(0.0)
    t_lo, t_hi = None, 0.0
    while not good:
        t_lo = t_hi
        t_hi += step
        if t_hi > t_max:
            raise NormalizationError(
                f"no dilation t <= {t_max} satisfies the lift conditions; rho may be unbounded on the grid")
        good, p1, p2 = ok(t_hi)
        schedule.append(t_hi)
    if t_lo is not None:
        while t_hi - t_lo > tol:
            mid = 0.5 * (t_lo + t_hi)
            if ok(mid)[0]:
                t_hi = mid
            else:
                t_lo = mid
        _, p1, p2 = ok(t_hi)
    cert = NormalizationCertificate(
        t0=t_hi,
        p1_slack=float(p1),
        p2_slack=float(p2),
        boundary_curvature={c: float(np.max(np.abs(h))) * math.exp(-t_hi) for c, h in h_bnd.items()},
        grid_points=int(len(interior) + (0 if bpts is None else len(bpts))),
        schedule=schedule,
    )
    return t_hi, cert
