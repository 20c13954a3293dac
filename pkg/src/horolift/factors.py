"""Conformal factors rho on S^n, with gradient and Hessian providers.

A :class:`ConformalFactor` evaluates ``rho``, the g_0-gradient (an ambient
tangent vector) and the g_0 covariant Hessian (an ambient symmetric matrix
supported on the tangent space) for batches of points ``x`` of shape
``(m, n+1)``.

Closed-form families describe rho through an ambient extension ``G`` defined
near the sphere.  For such an extension the sphere quantities are

    grad rho = P dG,        Hess rho = P D^2G P - (x . dG) P,

with ``P = I - x x^T``.  Finite-difference factors differentiate in
stereographic charts instead.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import sphere
from .errors import DomainError


class ConformalFactor:
    """Base class; subclasses implement :meth:`evaluate` and :meth:`derivatives`."""

    n: int
    provenance: str = "closed-form"
    name: str = "factor"

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivatives(self, x: np.ndarray):
        """``(rho, grad, hess)`` with shapes ``(m,)``, ``(m, n+1)``, ``(m, n+1, n+1)``."""
        raise NotImplementedError

    def gradient(self, x):
        return self.derivatives(x)[1]

    def hessian(self, x):
        return self.derivatives(x)[2]

    def _points(self, x) -> np.ndarray:
        return sphere.as_points(x, self.n, tol=1e-8)

    def __add__(self, t: float) -> "ConformalFactor":
        return Dilated(self, float(t))

    def describe(self) -> dict:
        return {"name": self.name, "provenance": self.provenance}


class AmbientFactor(ConformalFactor):
    """Factor given by an ambient extension ``G`` with closed-form derivatives."""

    def ambient(self, y: np.ndarray):
        """``(G, dG, D^2G)`` at points ``y``."""
        raise NotImplementedError

    def evaluate(self, x):
        return self.ambient(self._points(x))[0]

    def derivatives(self, x):
        x = self._points(x)
        g, dg, d2g = self.ambient(x)
        p = sphere.tangent_projector(x)
        grad = np.einsum("mij,mj->mi", p, dg)
        radial = np.einsum("mi,mi->m", x, dg)
        hess = p @ d2g @ p - radial[:, None, None] * p
        return g, grad, 0.5 * (hess + np.swapaxes(hess, 1, 2))


@dataclass(frozen=True, eq=False)
class Constant(AmbientFactor):
    n: int
    t: float = 0.0
    name = "constant"

    def ambient(self, y):
        m = y.shape[0]
        d = self.n + 1
        return np.full(m, float(self.t)), np.zeros((m, d)), np.zeros((m, d, d))

    def describe(self):
        return {**super().describe(), "t": self.t}


@dataclass(frozen=True, eq=False)
class Linear(AmbientFactor):
    """``rho(x) = t + a . x`` (a degree-one spherical harmonic)."""

    n: int
    a: tuple
    t: float = 0.0
    name = "linear"

    def ambient(self, y):
        a = np.asarray(self.a, dtype=float)
        m, d = y.shape
        return self.t + y @ a, np.broadcast_to(a, (m, d)).copy(), np.zeros((m, d, d))

    def describe(self):
        return {**super().describe(), "a": list(self.a), "t": self.t}


@dataclass(frozen=True, eq=False)
class Quadratic(AmbientFactor):
    """``rho(x) = t + x^T A x / 2`` with symmetric ``A``; not rotationally symmetric in general."""

    n: int
    A: tuple
    t: float = 0.0
    name = "quadratic"

    def ambient(self, y):
        a = np.asarray(self.A, dtype=float)
        a = 0.5 * (a + a.T)
        m, d = y.shape
        ay = y @ a
        return self.t + 0.5 * np.einsum("mi,mi->m", y, ay), ay, np.broadcast_to(a, (m, d, d)).copy()

    def describe(self):
        return {**super().describe(), "A": np.asarray(self.A).tolist(), "t": self.t}


@dataclass(frozen=True, eq=False)
class Dimple(AmbientFactor):
    """A base factor plus a Gaussian bump ``amplitude * exp(-|y - c|^2 / (2 width^2))``."""

    base: ConformalFactor
    amplitude: float
    width: float
    center: tuple
    name = "dimple"

    @property
    def n(self):
        return self.base.n

    def ambient(self, y):
        g0, dg0, d2g0 = self.base.ambient(y)
        c = np.asarray(self.center, dtype=float)
        r = y - c
        e = self.amplitude * np.exp(-np.einsum("mi,mi->m", r, r) / (2 * self.width**2))
        w2 = self.width**2
        dg = -e[:, None] * r / w2
        d2g = e[:, None, None] * (r[:, :, None] * r[:, None, :] / w2**2 - np.eye(y.shape[1]) / w2)
        return g0 + e, dg0 + dg, d2g0 + d2g

    def describe(self):
        return {**super().describe(), "base": self.base.describe(), "amplitude": self.amplitude,
                "width": self.width, "center": list(self.center)}


class RadialFactor(ConformalFactor):
    """``rho(x) = R(theta)`` with ``theta`` the polar angle from ``pole``.

    Subclasses provide :meth:`profile` returning ``(R, R', R'')`` on arrays
    of angles.  ``grad = R' d_theta`` and
    ``Hess = R'' d_theta d_theta^T + R' cot(theta) (P - d_theta d_theta^T)``,
    with the pole limit ``R' cot(theta) -> R''(0)``.
    """

    pole: np.ndarray

    def profile(self, theta: np.ndarray):
        raise NotImplementedError

    def evaluate(self, x):
        x = self._points(x)
        return self.profile(sphere.polar_angle(x, self.pole))[0]

    def derivatives(self, x):
        x = self._points(x)
        pole = self.pole
        c = np.clip(x @ pole, -1.0, 1.0)
        theta = np.arccos(c)
        s = np.sqrt(np.maximum(1.0 - c**2, 0.0))
        r0, r1, r2 = self.profile(theta)
        p = sphere.tangent_projector(x)
        near = s < 1e-7
        safe_s = np.where(near, 1.0, s)
        dth = (c[:, None] * x - pole) / safe_s[:, None]
        dth[near] = 0.0
        tang = np.where(near, r2, r1 * c / safe_s)
        grad = r1[:, None] * dth
        outer = dth[:, :, None] * dth[:, None, :]
        hess = r2[:, None, None] * outer + tang[:, None, None] * (p - outer)
        return r0, grad, hess


class MobiusCap(RadialFactor):
    """Pullback of the round metric by a conformal diffeomorphism, then dilated.

    ``e^{rho(theta)} = e^t / (cosh s - sinh s cos theta)``.  It is the
    horospherical metric of the geodesic sphere of radius ``t`` centred at
    the boost of the origin by rapidity ``s`` towards ``pole``.
    """

    name = "mobius_cap"

    def __init__(self, n: int, s: float = 0.0, t: float = 0.0, pole=None):
        self.n = n
        self.s = float(s)
        self.t = float(t)
        self.pole = sphere.north_pole(n) if pole is None else np.asarray(pole, dtype=float)

    def profile(self, theta):
        a, b = math.cosh(self.s), math.sinh(self.s)
        d = a - b * np.cos(theta)
        sn = np.sin(theta)
        r0 = self.t - np.log(d)
        r1 = -b * sn / d
        r2 = -b * np.cos(theta) / d + (b * sn / d) ** 2
        return r0, r1, r2

    def derivatives(self, x):
        # ambient form has no pole singularity: G = t - log(cosh s - sinh s y.p)
        x = self._points(x)
        a, b = math.cosh(self.s), math.sinh(self.s)
        d = a - b * (x @ self.pole)
        dg = b * self.pole[None, :] / d[:, None]
        d2g = (b**2) * np.outer(self.pole, self.pole)[None] / (d**2)[:, None, None]
        p = sphere.tangent_projector(x)
        grad = np.einsum("mij,mj->mi", p, dg)
        radial = np.einsum("mi,mi->m", x, dg)
        hess = p @ d2g @ p - radial[:, None, None] * p
        return self.t - np.log(d), grad, 0.5 * (hess + np.swapaxes(hess, 1, 2))

    def equator_curvature(self) -> float:
        """Boundary geodesic/mean curvature of the hemisphere, inward normal."""
        return -math.exp(-self.t) * math.sinh(self.s)

    def describe(self):
        return {"name": self.name, "provenance": self.provenance, "s": self.s, "t": self.t}


class Cylinder(RadialFactor):
    """``rho = t - log sin(theta)``: the product metric on R x S^{n-1}.

    Every latitude sphere is totally geodesic; defined away from both poles.
    """

    name = "cylinder"

    def __init__(self, n: int, t: float = 0.0, pole=None):
        self.n = n
        self.t = float(t)
        self.pole = sphere.north_pole(n) if pole is None else np.asarray(pole, dtype=float)

    def profile(self, theta):
        sn = np.sin(theta)
        if np.any(sn <= 0):
            raise DomainError("cylinder factor is singular at the poles")
        return self.t - np.log(sn), -np.cos(theta) / sn, 1.0 / sn**2

    def describe(self):
        return {"name": self.name, "provenance": self.provenance, "t": self.t}


class Dilated(ConformalFactor):
    """``rho + t``; the metric ``e^{2t} g``."""

    def __init__(self, base: ConformalFactor, t: float):
        self.base = base
        self.t = float(t)
        self.n = base.n
        self.provenance = base.provenance
        self.name = base.name
        if isinstance(base, RadialFactor):
            self.pole = base.pole

    def evaluate(self, x):
        return self.base.evaluate(x) + self.t

    def derivatives(self, x):
        r, g, h = self.base.derivatives(x)
        return r + self.t, g, h

    def profile(self, theta):
        r0, r1, r2 = self.base.profile(theta)
        return r0 + self.t, r1, r2

    def describe(self):
        return {**self.base.describe(), "dilation": self.t}


# --------------------------------------------------------------------------
# finite differences in stereographic charts


def _stencil(n: int):
    """Offsets (in units of h) for value, central gradient and Hessian."""
    offs = [np.zeros(n)]
    eye = np.eye(n)
    for i in range(n):
        offs += [eye[i], -eye[i]]
    for i in range(n):
        for j in range(i + 1, n):
            offs += [eye[i] + eye[j], eye[i] - eye[j], -eye[i] + eye[j], -eye[i] - eye[j]]
    return np.array(offs)


def _chart_derivatives(vals: np.ndarray, n: int, h: float):
    """Chart gradient and Hessian from stencil values ``(m, k)``."""
    m = vals.shape[0]
    f0 = vals[:, 0]
    grad = np.empty((m, n))
    hess = np.empty((m, n, n))
    for i in range(n):
        fp, fm = vals[:, 1 + 2 * i], vals[:, 2 + 2 * i]
        grad[:, i] = (fp - fm) / (2 * h)
        hess[:, i, i] = (fp - 2 * f0 + fm) / h**2
    k = 1 + 2 * n
    for i in range(n):
        for j in range(i + 1, n):
            pp, pm, mp, mm = vals[:, k : k + 4].T
            hess[:, i, j] = hess[:, j, i] = (pp - pm - mp + mm) / (4 * h**2)
            k += 4
    return grad, hess


class FiniteDifference(ConformalFactor):
    """Second-order central differences of a sphere function in stereographic charts.

    Each base point is differentiated in the chart where ``|u| <= 1``;
    ``richardson=True`` combines steps ``h`` and ``h/2`` once.
    """

    provenance = "finite-difference"

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], n: int, h: float = 1e-3,
                 richardson: bool = True, name: str = "finite-difference", chart=None):
        if h <= 0:
            raise ValueError("finite-difference step must be positive")
        self.func = func
        self.n = n
        self.h = float(h)
        self.richardson = richardson
        self.name = name
        self.chart = chart

    @classmethod
    def of(cls, factor: ConformalFactor, **kw) -> "FiniteDifference":
        """Finite-difference provider driven only by ``factor.evaluate``."""
        kw.setdefault("name", factor.name)
        return cls(factor.evaluate, factor.n, **kw)

    def evaluate(self, x):
        return np.asarray(self.func(self._points(x)), dtype=float)

    def _chart_fd(self, x, chart, h):
        n = self.n
        u = sphere.to_chart(x, chart)
        offs = _stencil(n)
        pts = (u[:, None, :] + h * offs[None]).reshape(-1, n)
        ch = np.repeat(np.broadcast_to(chart, (x.shape[0],)), offs.shape[0])
        vals = np.asarray(self.func(sphere.from_chart(pts, ch)), dtype=float).reshape(x.shape[0], -1)
        return u, vals[:, 0], *_chart_derivatives(vals, n, h)

    def derivatives(self, x):
        x = self._points(x)
        chart = sphere.chart_of(x) if self.chart is None else np.full(x.shape[0], self.chart)
        u, f0, du, duu = self._chart_fd(x, chart, self.h)
        if self.richardson:
            _, _, du2, duu2 = self._chart_fd(x, chart, self.h / 2)
            du = (4 * du2 - du) / 3
            duu = (4 * duu2 - duu) / 3
        w, dw = sphere.chart_log_scale(u)
        jac = sphere.chart_jacobian(u, chart)
        e2w = np.exp(-2 * w)
        grad = e2w[:, None] * np.einsum("mij,mj->mi", jac, du)
        # covariant Hessian in a conformally flat chart
        wdf = np.einsum("mi,mi->m", dw, du)
        cov = duu - dw[:, :, None] * du[:, None, :] - du[:, :, None] * dw[:, None, :]
        cov += wdf[:, None, None] * np.eye(self.n)
        cov = 0.5 * (cov + np.swapaxes(cov, 1, 2))
        hess = (e2w**2)[:, None, None] * jac @ cov @ np.swapaxes(jac, 1, 2)
        return f0, grad, hess

    def describe(self):
        return {"name": self.name, "provenance": self.provenance, "step": self.h,
                "richardson": self.richardson}


# --------------------------------------------------------------------------
# grid-sampled factors


def _smoothstep(z):
    """C-infinity step from 0 (z <= 0) to 1 (z >= 1)."""
    z = np.clip(z, 0.0, 1.0)

    def bump(t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)

    a, b = bump(z), bump(1.0 - z)
    return a / (a + b)


class GridFactor:
    """Sphere function interpolated from samples on regular grids of both charts.

    The two chart interpolants are blended with a smooth partition of unity
    across ``|x_{n+1}| <= blend`` so the result has no seam.
    """

    def __init__(self, n: int, grids: dict, blend: float = 0.3):
        from scipy.interpolate import RegularGridInterpolator

        self.n = n
        self.blend = blend
        self.interp = {}
        for chart in (0, 1):
            if chart not in grids:
                raise DomainError(f"grid factor needs samples for chart {chart}")
            axes, values = grids[chart]
            self.interp[chart] = RegularGridInterpolator(axes, values, method="cubic", bounds_error=True)

    def __call__(self, x):
        x = np.atleast_2d(x)
        out = np.zeros(x.shape[0])
        wt = _smoothstep((x[:, -1] + self.blend) / (2 * self.blend))
        for chart, weight in ((0, wt), (1, 1.0 - wt)):
            use = weight > 0
            if np.any(use):
                u = sphere.to_chart(x[use], chart)
                out[use] += weight[use] * self.interp[chart](u)
        return out


def read_grid_csv(path, n: int | None = None) -> tuple[int, dict]:
    """Parse a CSV with columns ``chart, u, v[, w...], rho`` into chart grids.

    Raises ``ValueError`` listing offending rows when values are non-finite or
    the samples do not form a full tensor grid per chart.
    """
    rows = []
    bad = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = [c.strip().lower() for c in header]
        if cols[0] != "chart" or cols[-1] != "rho" or len(cols) < 4:
            raise ValueError(f"expected header 'chart, u, v[, ...], rho', got {header}")
        dim = len(cols) - 2
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                vals = [float(v) for v in rec]
            except ValueError:
                bad.append((lineno, "unparseable"))
                continue
            if len(vals) != dim + 2:
                bad.append((lineno, "wrong column count"))
            elif not all(math.isfinite(v) for v in vals):
                bad.append((lineno, "non-finite value"))
            else:
                rows.append(vals)
    if bad:
        detail = "; ".join(f"row {r}: {why}" for r, why in bad[:20])
        raise ValueError(f"{len(bad)} invalid CSV rows in {path}: {detail}")
    if n is not None and n != dim:
        raise ValueError(f"CSV has {dim} chart coordinates but n = {n}")
    arr = np.array(rows)
    grids = {}
    for chart in (0, 1):
        sub = arr[arr[:, 0] == chart]
        if not len(sub):
            raise ValueError(f"no samples for chart {chart} in {path}")
        axes = [np.unique(sub[:, 1 + k]) for k in range(dim)]
        shape = tuple(len(a) for a in axes)
        if math.prod(shape) != len(sub):
            raise ValueError(f"chart {chart} samples do not form a regular grid")
        idx = tuple(np.searchsorted(axes[k], sub[:, 1 + k]) for k in range(dim))
        values = np.full(shape, np.nan)
        values[idx] = sub[:, -1]
        grids[chart] = (axes, values)
    return dim, grids


def write_grid_csv(path, factor: ConformalFactor, half_width: float = 1.6, points: int = 33) -> None:
    """Sample ``factor`` on regular grids of both charts (``n <= 3`` is practical)."""
    n = factor.n
    ax = np.linspace(-half_width, half_width, points)
    mesh = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), axis=-1).reshape(-1, n)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["chart"] + [f"u{k}" for k in range(n)] + ["rho"])
        for chart in (0, 1):
            vals = factor.evaluate(sphere.from_chart(mesh, np.full(len(mesh), chart)))
            for u, v in zip(mesh, vals):
                w.writerow([chart, *(repr(float(c)) for c in u), repr(float(v))])


def grid_factor_from_csv(path, n: int | None = None, h: float = 1e-3, richardson: bool = True) -> FiniteDifference:
    dim, grids = read_grid_csv(path, n)
    interp = GridFactor(dim, grids)
    return FiniteDifference(interp, dim, h=h, richardson=richardson, name=f"csv:{Path(path).name}")


# --------------------------------------------------------------------------


def builtin(name: str, n: int, **params) -> ConformalFactor:
    """Construct a builtin factor by name."""
    name = name.lower()
    if name == "constant":
        return Constant(n, params.get("t", 0.0))
    if name == "mobius_cap":
        return MobiusCap(n, params.get("s", 0.0), params.get("t", 0.0), params.get("pole"))
    if name == "cylinder":
        return Cylinder(n, params.get("t", 0.0))
    if name == "linear":
        return Linear(n, tuple(params["a"]), params.get("t", 0.0))
    if name == "quadratic":
        return Quadratic(n, tuple(map(tuple, params["A"])), params.get("t", 0.0))
    if name == "dimple":
        base = builtin(params.get("base", "constant"), n, t=params.get("t", 0.0))
        center = params.get("center") or tuple(sphere.north_pole(n))
        return Dimple(base, params["amplitude"], params["width"], tuple(center))
    raise ValueError(f"unknown builtin factor {name!r}")
