"""Lift of a conformal factor to a hypersurface of hyperbolic space.

For ``g = e^{2 rho} g_0`` on a domain of S^n the map

    phi = A (1, x) + B (0, -x + grad rho),
    A = (e^rho + e^{-rho} (1 + |grad rho|^2)) / 2,    B = e^{-rho},

is a hypersurface of H^{n+1} whose hyperbolic Gauss map is the identity of
the sphere.  The light-cone map is ``psi = e^rho (1, x)`` and the unit normal
is ``eta = phi - psi``; ``<d psi, d psi> = g``.

The second fundamental form is ``II(u, v) = -<d phi(u), d eta(v)>``, which is
``<d phi(u), d psi(v)> - I(u, v)``.  With this orientation a constant factor
``rho = t > 0`` gives the geodesic sphere of radius ``t`` with ``kappa = coth t``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import lorentz, sphere
from .errors import LiftDegeneracyError
from .factors import ConformalFactor
from .metric import schouten_tensor

CONDITION_LIMIT = 1e8


def _lorentz_pair(a, b):
    return -a[..., 0] * b[..., 0] + np.einsum("...i,...i->...", a[..., 1:], b[..., 1:])


def _assemble(r, grad, x):
    gg = np.einsum("mi,mi->m", grad, grad)
    ep, em = np.exp(r), np.exp(-r)
    a = 0.5 * (ep + em * (1.0 + gg))
    m = x.shape[0]
    one_x = np.concatenate([np.ones((m, 1)), x], axis=1)
    phi = a[:, None] * one_x
    phi[:, 1:] += em[:, None] * (grad - x)
    psi = ep[:, None] * one_x
    return phi, phi - psi, psi


def lift_point(rho: ConformalFactor, x):
    """``(phi, eta, psi)`` at points ``x``; arrays of shape ``(m, n+2)``."""
    x = sphere.as_points(x, rho.n, tol=1e-8)
    r, grad, _ = rho.derivatives(x)
    return _assemble(r, grad, x)


def lift_differential(r, grad, hess, x, frame):
    """``d phi`` and ``d psi`` applied to the frame vectors; shapes ``(m, n, n+2)``."""
    m, d, n = frame.shape
    ep, em = np.exp(r), np.exp(-r)
    gg = np.einsum("mi,mi->m", grad, grad)
    a = 0.5 * (ep + em * (1.0 + gg))
    du = np.einsum("mi,mia->ma", grad, frame)                    # rho_u per frame vector
    hu = np.einsum("mij,mja->mia", hess, frame)                  # Hess u (ambient), (m, d, n)
    ghu = np.einsum("mi,mia->ma", grad, hu)                      # g . Hess u
    da = 0.5 * (ep[:, None] * du - (em * (1.0 + gg))[:, None] * du + 2.0 * em[:, None] * ghu)
    db = -em[:, None] * du
    fr = np.swapaxes(frame, 1, 2)                                # (m, n, d)
    dg = np.swapaxes(hu, 1, 2) - du[:, :, None] * x[:, None, :]  # derivative of grad along u
    dphi = np.zeros((m, n, d + 1))
    dphi[:, :, 0] = da
    dphi[:, :, 1:] = (da[:, :, None] * x[:, None, :] + a[:, None, None] * fr
                      + db[:, :, None] * (grad - x)[:, None, :] + em[:, None, None] * (dg - fr))
    dpsi = np.zeros((m, n, d + 1))
    dpsi[:, :, 0] = ep[:, None] * du
    dpsi[:, :, 1:] = ep[:, None, None] * (du[:, :, None] * x[:, None, :] + fr)
    return dphi, dpsi


def _gram(a, b):
    return -a[..., :, None, 0] * b[..., None, :, 0] + np.einsum("mai,mbi->mab", a[..., 1:], b[..., 1:])


def _moved(x, frame, eps):
    """Points ``cos(eps) x + sin(eps) e_a`` for each frame vector; ``(m, n, d)``."""
    return np.cos(eps) * x[:, None, :] + np.sin(eps) * np.swapaxes(frame, 1, 2)


def fundamental_forms(rho: ConformalFactor, x, step: float | None = None):
    """First and second fundamental forms in the tangent frame of :func:`sphere.tangent_frame`.

    With ``step=None`` the differentials of phi are assembled from the
    provider's gradient and Hessian.  With a step, ``d phi`` and ``d eta``
    are central differences of the lift along great circles in the frame
    directions, which needs only the provider's first derivatives.
    Returns ``(I, II, frame)``.
    """
    x = sphere.as_points(x, rho.n, tol=1e-8)
    frame = sphere.tangent_frame(x)
    m, d, n = frame.shape
    if step is None:
        r, grad, hess = rho.derivatives(x)
        dphi, dpsi = lift_differential(r, grad, hess, x, frame)
        first = _gram(dphi, dphi)
        second = _gram(dphi, dpsi) - first
    else:
        plus = _moved(x, frame, step).reshape(-1, d)
        minus = _moved(x, frame, -step).reshape(-1, d)
        pp, ep_, _ = lift_point(rho, plus)
        pm, em_, _ = lift_point(rho, minus)
        dphi = ((pp - pm) / (2 * step)).reshape(m, n, d + 1)
        deta = ((ep_ - em_) / (2 * step)).reshape(m, n, d + 1)
        first = _gram(dphi, dphi)
        second = -_gram(dphi, deta)
    first = 0.5 * (first + np.swapaxes(first, 1, 2))
    second = 0.5 * (second + np.swapaxes(second, 1, 2))
    return first, second, frame


def principal_curvatures(first, second, limit: float = CONDITION_LIMIT):
    """Eigenvalues of ``I^{-1} II`` (ascending) and the concavity flag ``kappa_min > -1``.

    Raises :class:`LiftDegeneracyError` when ``I`` is not positive definite
    or its condition number exceeds ``limit``.
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    single = first.ndim == 2
    if single:
        first, second = first[None], second[None]
    w = np.linalg.eigvalsh(first)
    if np.any(w[:, 0] <= 0):
        raise LiftDegeneracyError("first fundamental form is not positive definite")
    cond = w[:, -1] / w[:, 0]
    if np.any(cond > limit):
        raise LiftDegeneracyError(
            f"first fundamental form is degenerate (condition number {cond.max():.3e}); "
            "some Schouten eigenvalue is close to 1/2")
    low = np.linalg.cholesky(first)
    inv = np.linalg.inv(low)
    shape = inv @ second @ np.swapaxes(inv, 1, 2)
    kappa = np.linalg.eigvalsh(0.5 * (shape + np.swapaxes(shape, 1, 2)))
    concave = kappa[:, 0] > -1.0
    return (kappa[0], bool(concave[0])) if single else (kappa, concave)


@dataclass(frozen=True)
class HypersurfaceSample:
    """Lifted hypersurface at a batch of base points (arrays over the first axis)."""

    x: np.ndarray
    phi: np.ndarray
    eta: np.ndarray
    psi: np.ndarray
    frame: np.ndarray
    first: np.ndarray
    second: np.ndarray
    kappa: np.ndarray
    provenance: str = "closed-form"

    def __len__(self):
        return self.x.shape[0]

    def quadric_defects(self) -> dict:
        """Worst-case deviations from the quadric and orthogonality relations."""
        return {
            "phi_hyperbolic": float(np.max(np.abs(_lorentz_pair(self.phi, self.phi) + 1.0))),
            "eta_de_sitter": float(np.max(np.abs(_lorentz_pair(self.eta, self.eta) - 1.0))),
            "phi_eta_orthogonal": float(np.max(np.abs(_lorentz_pair(self.phi, self.eta)))),
            "psi_light_cone": float(np.max(np.abs(_lorentz_pair(self.psi, self.psi))
                                            / np.maximum(1.0, self.psi[:, 0] ** 2))),
        }

    @property
    def concave(self) -> np.ndarray:
        return self.kappa[:, 0] > -1.0


def lift(rho: ConformalFactor, x, step: float | None = None) -> HypersurfaceSample:
    """Lift ``rho`` at points ``x`` together with its fundamental forms and curvatures."""
    x = sphere.as_points(x, rho.n, tol=1e-8)
    phi, eta, psi = lift_point(rho, x)
    first, second, frame = fundamental_forms(rho, x, step)
    kappa, _ = principal_curvatures(first, second)
    prov = rho.provenance if step is None else f"{rho.provenance}+lift-differences(h={step:g})"
    return HypersurfaceSample(x, phi, eta, psi, frame, first, second, kappa, prov)


def gauss_map(sample: HypersurfaceSample) -> np.ndarray:
    """Ideal endpoint of the normal geodesic, computed from the light-cone vector psi."""
    return lorentz.ideal_projection(sample.psi, tol=1e-9)


def psi_metric_defect(rho: ConformalFactor, x, step: float = 1e-4) -> float:
    """``max |<d psi, d psi> - e^{2 rho} g_0|`` in orthonormal frames, by central differences of psi."""
    x = sphere.as_points(x, rho.n, tol=1e-8)
    frame = sphere.tangent_frame(x)
    m, d, n = frame.shape
    plus = _moved(x, frame, step).reshape(-1, d)
    minus = _moved(x, frame, -step).reshape(-1, d)
    one = lambda p: np.exp(rho.evaluate(p))[:, None] * np.concatenate([np.ones((len(p), 1)), p], axis=1)
    dpsi = ((one(plus) - one(minus)) / (2 * step)).reshape(m, n, d + 1)
    gram = _gram(dpsi, dpsi)
    target = np.exp(2.0 * rho.evaluate(x))[:, None, None] * np.eye(n)
    return float(np.max(np.abs(gram - target) / np.exp(2.0 * rho.evaluate(x))[:, None, None]))


def lambda_kappa_residual(lam, kappa) -> float:
    """``max |lambda_i - (1/2 - 1/(1 + kappa_i))|`` pairing both lists in ascending order."""
    lam = np.sort(np.atleast_2d(lam), axis=-1)
    kappa = np.sort(np.atleast_2d(kappa), axis=-1)
    if np.any(kappa == -1.0):
        raise ValueError("kappa = -1 is singular for the lambda-kappa relation")
    return float(np.max(np.abs(lam - (0.5 - 1.0 / (1.0 + kappa)))))


def verify_lambda_kappa(rho: ConformalFactor, x, step: float | None = None) -> float:
    """Residual of ``lambda_i = 1/2 - 1/(1 + kappa_i)`` at the points ``x``."""
    x = sphere.as_points(x, rho.n, tol=1e-8)
    lam = schouten_tensor(rho, x).eigenvalues
    first, second, _ = fundamental_forms(rho, x, step)
    kappa, _ = principal_curvatures(first, second)
    return lambda_kappa_residual(lam, kappa)


def boundary_map(iso: lorentz.LorentzIsometry, y) -> np.ndarray:
    """Conformal diffeomorphism of S^n induced by an isometry: ``[L(1, y)]``."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    v = iso(np.concatenate([np.ones((y.shape[0], 1)), y], axis=1))
    return v[:, 1:] / v[:, :1]


def write_samples_csv(path, sample: HypersurfaceSample) -> None:
    """One row per base point: x, phi, eta, psi components and the principal curvatures."""
    d = sample.x.shape[1]
    n = sample.kappa.shape[1]
    header = ([f"x{i}" for i in range(d)] + [f"phi{i}" for i in range(d + 1)]
              + [f"eta{i}" for i in range(d + 1)] + [f"psi{i}" for i in range(d + 1)]
              + [f"kappa{i}" for i in range(n)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        rows = np.concatenate([sample.x, sample.phi, sample.eta, sample.psi, sample.kappa], axis=1)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
