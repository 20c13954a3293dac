"""Rotationally symmetric factors: the radial ODE, shooting solvers and references.

For ``rho = rho(theta)`` (theta the polar angle from the pole) the Schouten
eigenvalues are

    lambda_rad = e^{-2 rho} (-rho'' + rho'^2 / 2 + 1/2),
    lambda_tan = e^{-2 rho} (-cot(theta) rho' - rho'^2 / 2 + 1/2)   (multiplicity n - 1),

and at the pole ``cot(theta) rho' -> rho''(0)``.  Given ``rho`` and ``rho'``,
the equation ``f(lambda) = 1`` determines ``rho''`` because ``lambda_rad`` is
strictly decreasing in ``rho''`` and ``f`` is increasing in each slot.

Boundary conditions use the inward-normal convention of
:mod:`horolift.metric`:

* hemisphere with boundary curvature ``c``: ``rho'(pi/2) = c e^{rho(pi/2)}``;
* annulus ``r <= theta <= pi/2`` with minimal boundaries:
  ``rho'(r) = -cot r`` and ``rho'(pi/2) = 0``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq, least_squares

from . import boundary, lift, lorentz, metric, sphere
from .elliptic import DilatedData, EllipticData, SigmaK
from .errors import ConeExitError, DomainError, NoSolutionFound
from .factors import MobiusCap, RadialFactor

RHO2_LIMIT = 1e3
POLE_EPS = 1e-12


def radial_eigenvalues(rho, drho, ddrho, theta, pole_tol: float = 1e-8):
    """``(lambda_rad, lambda_tan)``; broadcasts over arrays.

    At ``theta = 0`` or ``pi`` the limit ``cot(theta) rho' -> rho''`` is used,
    which requires ``rho' = 0`` there (regularity).
    """
    rho, drho, ddrho, theta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, drho, ddrho, theta)))
    at_pole = (theta < POLE_EPS) | (theta > math.pi - POLE_EPS)
    if np.any(at_pole & (np.abs(drho) > pole_tol)):
        raise DomainError("profile is not regular at the pole (rho' != 0)")
    safe = np.where(at_pole, 1.0, theta)
    cot_term = np.where(at_pole, ddrho, drho / np.where(at_pole, 1.0, np.tan(safe)))
    e = np.exp(-2.0 * rho)
    lam_rad = e * (-ddrho + 0.5 * drho**2 + 0.5)
    lam_tan = e * (-cot_term - 0.5 * drho**2 + 0.5)
    return lam_rad, lam_tan


def _slot_solver(data: EllipticData):
    """Callable ``lam_tan -> mu`` with ``f(mu, lam_tan, ..., lam_tan) = 1``."""
    n = data.n
    base, scale = data, 1.0
    while isinstance(base, DilatedData):
        scale *= base.scale
        base = base.base
    if isinstance(base, SigmaK):
        k, norm = base.k, base.norm
        c1, c2 = math.comb(n - 1, k - 1), math.comb(n - 1, k)

        def fast(lt):
            t = scale * lt
            coef = c1 * t ** (k - 1)
            if coef <= 0:
                raise ConeExitError(f"tangential eigenvalue {lt:.3g} leaves the cone")
            return (norm - c2 * t**k) / coef / scale

        return fast

    def generic(lt):
        try:
            return data.solve_slot(np.full(n - 1, lt))
        except ValueError as exc:
            raise ConeExitError(str(exc)) from exc

    return generic


def solve_for_rho2(data: EllipticData, rho: float, drho: float, theta: float, slot=None) -> float:
    """The ``rho''`` with ``f(lambda_rad, lambda_tan, ..., lambda_tan) = 1``.

    Raises :class:`ConeExitError` when no solution with ``|rho''| <= 1e3`` exists.
    """
    e2 = math.exp(2.0 * rho)
    if theta < POLE_EPS:
        rho2 = 0.5 - data.lambda0 * e2
    else:
        slot = _slot_solver(data) if slot is None else slot
        lt = (-drho / math.tan(theta) - 0.5 * drho * drho + 0.5) / e2
        mu = slot(lt)
        rho2 = 0.5 * drho * drho + 0.5 - mu * e2
    if not abs(rho2) <= RHO2_LIMIT:
        raise ConeExitError(f"|rho''| = {abs(rho2):.3g} exceeds {RHO2_LIMIT:g}; the trajectory left the cone")
    return rho2


def integrate(data: EllipticData, a: float, b: float, rho_a: float, drho_a: float, points: int = 4096):
    """Classical RK4 for ``(rho, rho')`` on a uniform grid of ``points`` nodes over ``[a, b]``.

    Returns ``(theta, rho, rho', rho'')`` arrays.
    """
    slot = _slot_solver(data)
    rhs = lambda th, y, dy: solve_for_rho2(data, y, dy, th, slot)
    theta = np.linspace(a, b, points)
    h = theta[1] - theta[0]
    rho = np.empty(points)
    drho = np.empty(points)
    dd = np.empty(points)
    y, dy = float(rho_a), float(drho_a)
    for j in range(points):
        th = float(theta[j])
        rho[j], drho[j] = y, dy
        k1 = rhs(th, y, dy)
        dd[j] = k1
        if j == points - 1:
            break
        l1 = dy
        k2 = rhs(th + 0.5 * h, y + 0.5 * h * l1, dy + 0.5 * h * k1)
        l2 = dy + 0.5 * h * k1
        k3 = rhs(th + 0.5 * h, y + 0.5 * h * l2, dy + 0.5 * h * k2)
        l3 = dy + 0.5 * h * k2
        k4 = rhs(th + h, y + h * l3, dy + h * k3)
        l4 = dy + h * k3
        y = y + h * (l1 + 2 * l2 + 2 * l3 + l4) / 6.0
        dy = dy + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if not (math.isfinite(y) and math.isfinite(dy)):
            raise ConeExitError("trajectory diverged")
    return theta, rho, drho, dd


@dataclass
class RadialProfile:
    n: int
    kind: str                 # "cap" or "annulus"
    theta: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    ddrho: np.ndarray
    data: EllipticData = field(repr=False)
    targets: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    branches: list = field(default_factory=list)

    @property
    def interval(self):
        return float(self.theta[0]), float(self.theta[-1])

    def eigenvalues(self):
        return radial_eigenvalues(self.rho, self.drho, self.ddrho, self.theta)

    def eigenvalue_matrix(self) -> np.ndarray:
        lr, lt = self.eigenvalues()
        return np.column_stack([lr] + [lt] * (self.n - 1))

    def interior_residual(self) -> float:
        return float(np.max(np.abs(self.data.f(self.eigenvalue_matrix()) - 1.0)))

    def cone_record(self) -> dict:
        inside = self.data.in_cone(self.eigenvalue_matrix())
        return {"all_in_cone": bool(np.all(inside)), "outside": int(np.sum(~inside))}

    def derivative_consistency(self) -> float:
        """Max mismatch between stored ``rho'``, ``rho''`` and fourth-order differences of the stored arrays."""
        h = self.theta[1] - self.theta[0]

        def d4(v):
            return (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)

        return float(max(np.max(np.abs(d4(self.rho) - self.drho[2:-2])),
                         np.max(np.abs(d4(self.drho) - self.ddrho[2:-2]))))

    def boundary_curvature(self, which: str) -> float:
        """Boundary mean curvature (inward normal) at ``which`` in {"inner", "outer"}."""
        if which == "outer":
            return float(math.exp(-self.rho[-1]) * self.drho[-1])
        th = self.theta[0]
        if th < POLE_EPS:
            raise DomainError("a cap has no inner boundary")
        return float(math.exp(-self.rho[0]) * (-1.0 / math.tan(th) - self.drho[0]))

    def volume(self) -> float:
        """Volume of the domain for ``g = e^{2 rho} g_0``."""
        w = np.exp(self.n * self.rho) * np.sin(self.theta) ** (self.n - 1)
        return sphere_area(self.n - 1) * float(simpson(w, x=self.theta))

    def boundary_area(self, which: str = "outer") -> float:
        j = -1 if which == "outer" else 0
        return sphere_area(self.n - 1) * math.exp((self.n - 1) * self.rho[j]) * math.sin(self.theta[j]) ** (self.n - 1)

    def as_factor(self, pole=None) -> "ProfileFactor":
        return ProfileFactor(self, pole)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "data": self.data.name,
            "interval": list(self.interval),
            "points": int(self.theta.size),
            "targets": self.targets,
            "residuals": self.residuals,
            "branches": self.branches,
        }


def sphere_area(k: int) -> float:
    """Area of the unit k-sphere."""
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def _residuals(p: RadialProfile) -> dict:
    out = {
        "interior": p.interior_residual(),
        "derivative_consistency": p.derivative_consistency(),
        "outer_h": float(abs(p.boundary_curvature("outer") - p.targets["outer_h"])),
    }
    if p.kind == "cap":
        out["pole_regularity"] = abs(float(p.drho[0]))
    else:
        out["inner_h"] = float(abs(p.boundary_curvature("inner") - p.targets["inner_h"]))
    out.update(p.cone_record())
    return out


def _shoot(residual, lo: float, hi: float, scan: int, xtol: float):
    grid = np.linspace(lo, hi, scan)
    vals = []
    for g in grid:
        try:
            vals.append(residual(g, coarse=True))
        except ConeExitError:
            vals.append(math.nan)
    roots = []
    for i in range(scan - 1):
        a, b = vals[i], vals[i + 1]
        if math.isfinite(a) and math.isfinite(b) and (a == 0 or a * b < 0):
            try:
                roots.append(brentq(lambda g: residual(g), grid[i], grid[i + 1], xtol=xtol, rtol=1e-15))
            except (ConeExitError, ValueError):
                continue
    return roots, grid, vals


def shoot_cap(data: EllipticData, c: float, n: int | None = None, points: int = 4096,
              bracket=(-10.0, 10.0), scan: int = 81, coarse_points: int = 256,
              xtol: float = 1e-13) -> RadialProfile:
    """Solve ``f(lambda) = 1`` on the hemisphere with boundary mean curvature ``c``.

    Shoots over ``rho(0)`` with ``rho'(0) = 0`` so that
    ``rho'(pi/2) = c e^{rho(pi/2)}``.  All roots found in ``bracket`` are
    listed as branches; the one closest to the midpoint of the bracket is
    returned.
    """
    n = data.n if n is None else n
    if n != data.n:
        raise ValueError("dimension of the data and the sphere differ")

    def residual(g, coarse=False):
        _, r, dr, _ = integrate(data, 0.0, math.pi / 2, g, 0.0, coarse_points if coarse else points)
        return math.exp(-r[-1]) * dr[-1] - c

    roots, _, _ = _shoot(residual, *bracket, scan, xtol)
    if not roots:
        raise NoSolutionFound(f"no shooting root for rho(0) in {list(bracket)} (c = {c:g}, data {data.name})")
    best = min(roots, key=lambda g: abs(g - 0.5 * sum(bracket)))
    theta, r, dr, dd = integrate(data, 0.0, math.pi / 2, best, 0.0, points)
    p = RadialProfile(n, "cap", theta, r, dr, dd, data, {"outer_h": float(c), "rho0": float(best)},
                      branches=[{"rho0": float(g)} for g in roots])
    p.residuals = _residuals(p)
    return p


def shoot_annulus(data: EllipticData, r: float, n: int | None = None, points: int = 4096,
                  bracket=(-10.0, 10.0), scan: int = 81, coarse_points: int = 256,
                  xtol: float = 1e-13, min_width: float = 1e-3) -> RadialProfile:
    """Solve ``f(lambda) = 1`` on ``r <= theta <= pi/2`` with both boundaries minimal.

    Shoots over ``rho(r)`` with ``rho'(r) = -cot r`` to reach ``rho'(pi/2) = 0``.
    """
    n = data.n if n is None else n
    if not 0 < r < math.pi / 2:
        raise DomainError("annulus inner radius must lie in (0, pi/2)")
    if math.pi / 2 - r < min_width:
        raise DomainError(f"degenerate annulus: width {math.pi / 2 - r:.3g} < {min_width:g}")
    d0 = -1.0 / math.tan(r)

    def residual(g, coarse=False):
        _, rr, dr, _ = integrate(data, r, math.pi / 2, g, d0, coarse_points if coarse else points)
        return math.exp(-rr[-1]) * dr[-1]

    roots, _, _ = _shoot(residual, *bracket, scan, xtol)
    if not roots:
        raise NoSolutionFound(f"no annulus solution for rho(r) in {list(bracket)} (r = {r:g}, data {data.name})")
    best = min(roots, key=lambda g: abs(g - 0.5 * sum(bracket)))
    theta, rr, dr, dd = integrate(data, r, math.pi / 2, best, d0, points)
    p = RadialProfile(n, "annulus", theta, rr, dr, dd, data,
                      {"outer_h": 0.0, "inner_h": 0.0, "rho_r": float(best)},
                      branches=[{"rho_r": float(g)} for g in roots])
    p.residuals = _residuals(p)
    return p


# --------------------------------------------------------------------------
# references, fits and checks


def mobius_cap_factor(s: float, t: float = 0.0, n: int = 2, pole=None) -> MobiusCap:
    """``e^{rho} = e^t / (cosh s - sinh s cos theta)``; equator curvature ``-e^{-t} sinh s``."""
    return MobiusCap(n, s, t, pole)


class ProfileFactor(RadialFactor):
    """A solved profile as a conformal factor, by cubic Hermite interpolation."""

    provenance = "interpolated-profile"
    name = "profile"

    def __init__(self, profile: RadialProfile, pole=None):
        self.n = profile.n
        self.pole = sphere.north_pole(profile.n) if pole is None else np.asarray(pole, dtype=float)
        self.profile_data = profile
        self._v = CubicHermiteSpline(profile.theta, profile.rho, profile.drho)
        self._d = CubicHermiteSpline(profile.theta, profile.drho, profile.ddrho)
        self._lo, self._hi = profile.interval

    def profile(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < self._lo - 1e-9) or np.any(theta > self._hi + 1e-9):
            raise DomainError("point outside the profile interval")
        theta = np.clip(theta, self._lo, self._hi)
        return self._v(theta), self._d(theta), self._d(theta, 1)


def fit_mobius(profile: RadialProfile) -> dict:
    """Least-squares fit of ``t - log(cosh s - sinh s cos theta)`` to the profile values."""
    th, rho = profile.theta, profile.rho

    def model(p):
        s, t = p
        return t - np.log(np.cosh(s) - np.sinh(s) * np.cos(th))

    best = None
    for s0 in (0.0, 1.0, -1.0):
        t0 = float(np.mean(rho))
        sol = least_squares(lambda p: model(p) - rho, [s0, t0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
    s, t = map(float, best.x)
    dev = float(np.max(np.abs(model(best.x) - rho)))
    return {"s": s, "t": t, "sup_deviation": dev, "equator_h": -math.exp(-t) * math.sinh(s)}


def cap_geometry(r: float, n: int = 2) -> dict:
    """Round cap ``B(p, r)``: boundary (n-1)-area, enclosed volume, boundary mean curvature ``cot r``."""
    if not 0 < r < math.pi:
        raise DomainError("cap radius must lie in (0, pi)")
    w = sphere_area(n - 1)
    if n == 2:
        vol = 2 * math.pi * (1 - math.cos(r))
    else:
        vol = w * quad(lambda t: math.sin(t) ** (n - 1), 0.0, r, epsabs=1e-14, epsrel=1e-14)[0]
    h = 0.0 if abs(r - math.pi / 2) < 1e-15 else math.cos(r) / math.sin(r)
    return {"boundary_area": w * math.sin(r) ** (n - 1), "volume": vol, "h": h}


def reflection_extension_residual(profile: RadialProfile) -> float:
    """ODE residual of the profile extended by ``theta -> pi - theta`` past the equator.

    Includes the jump of ``rho'`` across the equator, which vanishes only for
    a minimal outer boundary.
    """
    if abs(profile.theta[-1] - math.pi / 2) > 1e-12:
        raise DomainError("reflection extension needs the equator as outer boundary")
    th = math.pi - profile.theta[::-1]
    rho = profile.rho[::-1]
    drho = -profile.drho[::-1]
    dd = profile.ddrho[::-1]
    lr, lt = radial_eigenvalues(rho, drho, dd, th)
    lam = np.column_stack([lr] + [lt] * (profile.n - 1))
    ode = float(np.max(np.abs(profile.data.f(lam) - 1.0)))
    return max(ode, 2.0 * abs(float(profile.drho[-1])))


def lift_symmetry_defect(profile: RadialProfile, polar: int = 4, directions: int = 128, rotations: int = 8,
                         seed: int = 0, headroom: float = math.log(2.0)) -> dict:
    """Rotational symmetry of the lifted annulus under random rotations fixing the pole.

    The factor is dilated by the normalizing ``t0`` plus ``headroom``.  At
    ``t0`` alone the largest eigenvalue can sit just below 1/2, where the
    lift collapses in that direction and every symmetry test is trivially
    satisfied; the extra dilation keeps the sampled hypersurface spread out.

    A rotation moves samples within their polar ring, so the defect is set by
    the gaps of the direction set while the nearest-neighbour spacing is set
    by the denser of the two grid directions.  The defaults keep both grid
    directions comparably fine so that the two numbers are commensurate.
    """
    dom = sphere.DomainSpec("annulus", profile.n, profile.interval[0])
    rho = profile.as_factor()
    t0, _ = metric.normalize_for_lift(rho, dom, polar, directions)
    x, _ = sphere.domain_grid(dom, polar, directions)
    sample = lift.lift(metric.dilate(rho, t0 + headroom), x)
    rng = np.random.default_rng(seed)
    worst = max(boundary.symmetry_defect(sample, lorentz.random_axial_rotation(profile.n, rng))
                for _ in range(rotations))
    return {"defect": worst, "spacing": boundary.sample_spacing(sample), "t": t0 + headroom,
            "rotations": rotations, "samples": len(sample)}


def dilation_residual(profile: RadialProfile, t: float) -> dict:
    """Check that ``rho + t`` solves the dilated data with boundary curvature scaled by ``e^{-t}``."""
    from .elliptic import dilate_data

    data_t = dilate_data(profile.data, t)
    lr, lt = radial_eigenvalues(profile.rho + t, profile.drho, profile.ddrho, profile.theta)
    lam = np.column_stack([lr] + [lt] * (profile.n - 1))
    interior = float(np.max(np.abs(data_t.f(lam) - 1.0)))
    h_t = math.exp(-(profile.rho[-1] + t)) * profile.drho[-1]
    bnd = abs(h_t - math.exp(-t) * profile.targets["outer_h"])
    return {"interior": interior, "boundary": bnd}


def write_profile_csv(path, profile: RadialProfile) -> None:
    lr, lt = profile.eigenvalues()
    res = profile.data.f(profile.eigenvalue_matrix()) - 1.0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "rho", "drho", "ddrho", "lambda_rad", "lambda_tan", "f_residual"])
        for row in zip(profile.theta, profile.rho, profile.drho, profile.ddrho, lr, lt, res):
            w.writerow([repr(float(v)) for v in row])
