"""Elliptic data (f, Gamma) on Schouten eigenvalues and curvature data (W, Gamma*).

``f`` acts on the last axis of an array of eigenvalue vectors.  The
builtin family is the normalised sigma_k,

    f(lambda) = sigma_k(lambda) / sigma_k(1/2, ..., 1/2),

so ``lambda_0 = 1/2`` and the round metric solves ``f = 1``.  Custom data are
parsed from a small expression language over ``s1 .. sn`` (the elementary
symmetric polynomials).
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

# --------------------------------------------------------------------------
# elementary symmetric polynomials


def elementary_symmetric(x, kmax: int | None = None) -> np.ndarray:
    """``[sigma_0, ..., sigma_kmax]`` of the last axis; shape ``(..., kmax + 1)``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    kmax = n if kmax is None else kmax
    e = np.zeros(x.shape[:-1] + (kmax + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        xi = x[..., i : i + 1]
        e[..., 1:] = e[..., 1:] + xi * e[..., :-1]
    return e


def sigma(x, k: int) -> np.ndarray:
    return elementary_symmetric(x, k)[..., k]


def sigma_gradient(x, k: int) -> np.ndarray:
    """``d sigma_k / d x_i = sigma_{k-1}(x without x_i)``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = np.empty_like(x)
    for i in range(n):
        rest = np.delete(x, i, axis=-1)
        out[..., i] = elementary_symmetric(rest, k - 1)[..., k - 1] if k >= 1 else 0.0
    return out


def garding_cone(x, k: int) -> np.ndarray:
    """Membership in Gamma_k: ``sigma_1, ..., sigma_k > 0``."""
    e = elementary_symmetric(x, k)
    return np.all(e[..., 1:] > 0, axis=-1)


# --------------------------------------------------------------------------


@dataclass
class EllipticData:
    """A symmetric function ``f`` with its cone ``Gamma`` and normalisation ``lambda_0``.

    ``affine`` marks data that are affine in each variable separately (all
    sigma_k); the radial solver then solves for one slot in closed form.
    """

    n: int
    f: Callable[[np.ndarray], np.ndarray]
    cone: Callable[[np.ndarray], np.ndarray]
    lambda0: float
    name: str = "custom"
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    affine: bool = False
    meta: dict = field(default_factory=dict)

    def __call__(self, lam):
        return self.f(lam)

    def gradient(self, lam, step: float = 1e-6) -> np.ndarray:
        if self.grad is not None:
            return self.grad(lam)
        return numerical_gradient(self.f, lam, step)

    def in_cone(self, lam) -> np.ndarray:
        return self.cone(np.asarray(lam, dtype=float))

    def solve_slot(self, rest, target: float = 1.0, lo: float = -1e6, hi: float = 1e6) -> float:
        """The value ``mu`` with ``f(mu, *rest) = target``.

        Safeguarded Newton iteration inside a bisection bracket; ``f`` is
        increasing in ``mu`` for elliptic data.
        """
        rest = np.asarray(rest, dtype=float)

        def g(mu):
            return float(self.f(np.concatenate([[mu], rest]))) - target

        a, b = _bracket(g, lo, hi)
        ga = g(a)
        mu = 0.5 * (a + b)
        for _ in range(200):
            gm = g(mu)
            if gm == 0.0:
                return mu
            if (gm < 0) == (ga < 0):
                a, ga = mu, gm
            else:
                b = mu
            eps = 1e-7 * max(1.0, abs(mu))
            slope = (g(mu + eps) - g(mu - eps)) / (2 * eps)
            nxt = mu - gm / slope if slope > 0 else 0.5 * (a + b)
            if not a < nxt < b:
                nxt = 0.5 * (a + b)
            if abs(nxt - mu) <= 4e-16 * max(1.0, abs(mu)) or b - a <= 4e-16 * max(1.0, abs(mu)):
                return nxt
            mu = nxt
        return mu

    def radial_slot(self, lam_tan: float) -> float | None:
        """Closed-form ``mu`` with ``f(mu, lam_tan, ..., lam_tan) = 1`` for sigma_k data, else None."""
        return None


def _bracket(g, lo, hi):
    """Find ``a < b`` with a sign change of the increasing function ``g``."""
    a, b = -1.0, 1.0
    while g(a) > 0:
        a *= 4.0
        if a < lo:
            raise ValueError("no bracket for the slot equation (lower side)")
    while g(b) < 0:
        b *= 4.0
        if b > hi:
            raise ValueError("no bracket for the slot equation (upper side)")
    return a, b


def numerical_gradient(f, lam, step: float = 1e-6) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    out = np.empty_like(lam)
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        out[..., i] = (f(lam + e) - f(lam - e)) / (2 * step)
    return out


class SigmaK(EllipticData):
    def __init__(self, n: int, k: int):
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in 1..{n}, got {k}")
        self.k = k
        norm = math.comb(n, k) * 0.5**k
        self.norm = norm
        super().__init__(
            n=n,
            f=lambda lam: sigma(lam, k) / norm,
            cone=lambda lam: garding_cone(lam, k),
            lambda0=0.5,
            name=f"sigma_{k}",
            grad=lambda lam: sigma_gradient(lam, k) / norm,
            affine=True,
            meta={"k": k, "normalization": norm},
        )

    def radial_slot(self, lam_tan: float) -> float | None:
        n, k = self.n, self.k
        # f(mu, t, ..., t) = (mu C(n-1, k-1) t^(k-1) + C(n-1, k) t^k) / norm
        coef = math.comb(n - 1, k - 1) * lam_tan ** (k - 1)
        if coef <= 0:
            return None
        return (self.norm - math.comb(n - 1, k) * lam_tan**k) / coef


def sigma_k_data(n: int, k: int) -> SigmaK:
    return SigmaK(n, k)


def trace_form_2d() -> SigmaK:
    """``f(l1, l2) = l1 + l2``: on S^2 the equation ``f = 1`` is ``K(g) = 1``."""
    data = SigmaK(2, 1)
    data.name = "trace_2d"
    return data


class DilatedData(EllipticData):
    """Data for the dilated metric ``e^{2t} g``: ``f_t(mu) = f(e^{2t} mu)``.

    If ``rho`` solves ``f = 1`` then ``rho + t`` solves ``f_t = 1``;
    ``lambda_0`` becomes ``e^{-2t} lambda_0``.
    """

    def __init__(self, base: EllipticData, t: float):
        s = math.exp(2.0 * t)
        self.base, self.t, self.scale = base, t, s
        super().__init__(
            n=base.n,
            f=lambda lam: base.f(s * np.asarray(lam)),
            cone=lambda lam: base.cone(s * np.asarray(lam)),
            lambda0=base.lambda0 / s,
            name=f"{base.name}@dilation{t:g}",
            grad=None if base.grad is None else (lambda lam: s * base.grad(s * np.asarray(lam))),
            affine=base.affine,
            meta={**base.meta, "dilation": t, "lambda0": base.lambda0 / s},
        )

    def radial_slot(self, lam_tan):
        mu = self.base.radial_slot(self.scale * lam_tan)
        return None if mu is None else mu / self.scale


def dilate_data(data: EllipticData, t: float) -> EllipticData:
    return DilatedData(data, t)


# --------------------------------------------------------------------------
# expression grammar


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _compile_expression(expr: str, n: int):
    tree = ast.parse(expr, mode="eval")
    names = {f"s{k}" for k in range(1, n + 1)}

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            if isinstance(node.op, ast.Pow) and not isinstance(node.right, ast.Constant):
                raise ValueError("exponents must be numeric constants")
            return check(node.left) | check(node.right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            return check(node.operand)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return set()
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown symbol {node.id!r}; use s1..s{n}")
            return {int(node.id[1:])}
        raise ValueError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")

    used = check(tree)
    code = compile(tree, "<elliptic-expression>", "eval")
    kmax = max(used, default=1)

    def f(lam):
        e = elementary_symmetric(lam, kmax)
        env = {f"s{k}": e[..., k] for k in range(1, kmax + 1)}
        return eval(code, {"__builtins__": {}}, env)

    return f, used


def expression_data(expr: str, n: int, normalize: bool = True) -> EllipticData:
    """Elliptic data from an expression in ``s1 .. sn``.

    ``Gamma`` is approximated as the set of points from which the ray in the
    direction ``(1, ..., 1)`` stays in ``{f > 0}`` until it enters
    ``Gamma_n``.  With ``normalize`` the expression is rescaled so that
    ``f(1/2, ..., 1/2) = 1``.
    """
    raw, used = _compile_expression(expr, n)
    scale = 1.0
    if normalize:
        v = float(raw(np.full(n, 0.5)))
        if not v > 0:
            raise ValueError(f"expression is not positive at (1/2, ..., 1/2): {v}")
        scale = 1.0 / v

    def f(lam):
        return scale * raw(np.asarray(lam, dtype=float))

    def cone(lam):
        lam = np.asarray(lam, dtype=float)
        shift = np.maximum(0.0, -lam.min(axis=-1)) + 1e-9
        s = np.linspace(0.0, 1.0, 33)
        pts = lam[..., None, :] + (s[:, None] * shift[..., None, None]) * np.ones(n)
        return np.all(f(pts) > 0, axis=-1)

    data = EllipticData(n=n, f=f, cone=cone, lambda0=math.nan, name=f"expr:{expr}",
                        meta={"expression": expr, "scale": scale, "symbols": sorted(used)})
    data.lambda0 = solve_lambda0(data)
    return data


def solve_lambda0(data: EllipticData, tol: float = 1e-10, hi: float = 1e3) -> float:
    """Bisection for ``f(l, ..., l) = 1`` over ``l > 0``."""
    one = np.ones(data.n)

    def g(l):
        return float(data.f(l * one)) - 1.0

    lo_v = 1e-12
    hi_v = 1.0
    while g(hi_v) < 0:
        hi_v *= 2.0
        if hi_v > hi:
            raise ValueError("f(l, ..., l) = 1 has no solution for l <= %g" % hi)
    if g(lo_v) > 0:
        raise ValueError("f(l, ..., l) > 1 already near l = 0")
    return brentq(g, lo_v, hi_v, xtol=tol * 1e-3, rtol=1e-15)


# --------------------------------------------------------------------------
# verification of conditions (i)-(iv)


def _sample_cone(data: EllipticData, count: int, rng, scale: float, box: float = 3.0, max_tries: int = 200):
    out = []
    have = 0
    for _ in range(max_tries):
        cand = scale * rng.uniform(-box, box, size=(4 * count, data.n))
        keep = cand[data.in_cone(cand)]
        out.append(keep)
        have += len(keep)
        if have >= count:
            break
    pts = np.vstack(out)[:count]
    return pts


def check_ellipticity(data: EllipticData, samples: int = 1000, seed: int = 0, grad_step: float = 1e-6) -> dict:
    """Sampled verification of conditions (i)-(iv).

    Condition (ii) is only probed along straight segments between sampled
    pairs ``x`` and ``y = x + d`` with ``d`` in Gamma_n; failures are
    reported, and the check is marked as a sampling proxy.
    """
    rng = np.random.default_rng(seed)
    n = data.n
    lam0 = solve_lambda0(data)
    scale = max(lam0, 1e-3)
    report = {"data": data.name, "n": n, "samples": samples, "seed": seed}

    pos = scale * rng.uniform(1e-3, 3.0, size=(samples, n))
    in_gamma = data.in_cone(pos)
    gam = _sample_cone(data, samples, rng, scale)
    in_g1 = np.sum(gam, axis=-1) > 0
    report["i"] = {
        "pass": bool(np.all(in_gamma) and np.all(in_g1) and len(gam) > 0),
        "gamma_n_in_gamma": int(np.sum(in_gamma)),
        "gamma_in_gamma_1": int(np.sum(in_g1)),
        "gamma_samples": int(len(gam)),
    }

    fvals = data.f(gam)
    g = numerical_gradient(data.f, gam, grad_step)
    report["iii"] = {
        "pass": bool(np.all(g > 0)),
        "min_partial": float(np.min(g)) if len(g) else math.nan,
        "violations": int(np.sum(np.any(g <= 0, axis=-1))),
        "f_positive": bool(np.all(fvals > 0)),
    }

    report["iv"] = {
        "pass": bool(abs(float(data.f(np.full(n, lam0))) - 1.0) <= 1e-10 and lam0 > 0),
        "lambda0": lam0,
    }

    # (ii) straight-segment proxy
    m = min(samples, len(gam))
    x = gam[:m]
    d = scale * rng.uniform(1e-3, 2.0, size=(m, n))
    y = x + d
    valid = data.in_cone(y)
    ts = np.linspace(0.0, 1.0, 17)
    seg = x[valid, None, :] + ts[None, :, None] * d[valid, None, :]
    ok = np.all(data.in_cone(seg), axis=-1)
    report["ii"] = {
        "pass": bool(np.all(ok)),
        "pairs": int(np.sum(valid)),
        "segment_failures": int(np.sum(~ok)),
        "note": "sampling proxy: straight segments only",
    }
    report["pass"] = all(report[c]["pass"] for c in ("i", "iii", "iv"))
    return report


# --------------------------------------------------------------------------
# curvature data


def curvature_transform(x) -> np.ndarray:
    """``T(x) = (x - 1) / (2 (x + 1))`` componentwise; maps principal curvatures to Schouten eigenvalues."""
    x = np.asarray(x, dtype=float)
    if np.any(x == -1.0):
        raise ValueError("curvature transform is singular at x = -1")
    return (x - 1.0) / (2.0 * (x + 1.0))


def inverse_curvature_transform(lam) -> np.ndarray:
    """``T^{-1}(l) = (1 + 2l) / (1 - 2l)``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0.5):
        raise ValueError("inverse curvature transform is singular at 1/2")
    return (1.0 + 2.0 * lam) / (1.0 - 2.0 * lam)


@dataclass
class CurvatureData:
    """``W = f o T`` on principal curvatures and ``Gamma* = T^{-1}(Gamma)`` inside ``(-1, inf)^n``."""

    source: EllipticData

    @property
    def n(self):
        return self.source.n

    def W(self, kappa):
        return self.source.f(curvature_transform(kappa))

    def in_cone(self, kappa) -> np.ndarray:
        kappa = np.asarray(kappa, dtype=float)
        above = np.all(kappa > -1.0, axis=-1)
        safe = np.where(kappa > -1.0, kappa, 0.0)
        return above & self.source.in_cone(curvature_transform(safe))

    def gradient(self, kappa) -> np.ndarray:
        kappa = np.asarray(kappa, dtype=float)
        return self.source.gradient(curvature_transform(kappa)) / (kappa + 1.0) ** 2

    def umbilical_value(self) -> dict:
        """``W(1, ..., 1)`` when the extension of f to the origin is finite."""
        try:
            v = float(self.source.f(np.zeros(self.n)))
        except (ZeroDivisionError, FloatingPointError, ValueError):
            v = math.nan
        return {"value": v, "defined": math.isfinite(v)}

    def r0(self) -> float:
        """Radius of the umbilical solution: ``W(r0, ..., r0) = 1``; ``inf`` if lambda_0 >= 1/2."""
        lam0 = self.source.lambda0
        if lam0 >= 0.5:
            return math.inf
        return float(inverse_curvature_transform(lam0))


def make_curvature_data(data: EllipticData, samples: int = 1000, seed: int = 0) -> tuple[CurvatureData, dict]:
    """Transfer elliptic data to principal curvatures and verify conditions (1), (3), (4)."""
    rep = check_ellipticity(data, samples, seed)
    if not rep["pass"]:
        failed = [c for c in ("i", "iii", "iv") if not rep[c]["pass"]]
        raise ValueError(f"elliptic data fail conditions {failed}; curvature data undefined")
    cd = CurvatureData(data)
    rng = np.random.default_rng(seed + 1)
    n = data.n
    above = 1.0 + rng.uniform(1e-3, 10.0, size=(samples, n))
    in_star = cd.in_cone(above)
    k = 1.0 + rng.uniform(-1.9, 10.0, size=(8 * samples, n))
    star = k[cd.in_cone(k)][:samples]
    grad = cd.gradient(star)
    ext = cd.umbilical_value()
    transfer = {
        "gamma_star_n_in_gamma_star": bool(np.all(in_star)),
        "gamma_star_in_gamma_star_1": bool(np.all(np.sum(star, axis=-1) > n)),
        "gradient_positive": bool(np.all(grad > 0)),
        "min_partial": float(np.min(grad)) if len(grad) else math.nan,
        "samples": int(len(star)),
        "W_at_umbilic": ext,
        "r0": cd.r0(),
    }
    transfer["pass"] = (transfer["gamma_star_n_in_gamma_star"] and transfer["gamma_star_in_gamma_star_1"]
                        and transfer["gradient_positive"])
    return cd, {"source": rep, "transfer": transfer}


def check_P2(lam, h: float) -> tuple[bool, float]:
    """Condition (P2): ``(1 + 2 l_i)/(1 - 2 l_i) > |tanh(asinh h)|`` for all i.

    Returns ``(holds, slack)`` with slack the minimum over i of the left side
    minus the right side.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) >= 0.5):
        raise ValueError("(P2) needs |lambda_i| < 1/2")
    kappa = inverse_curvature_transform(lam)
    slack = float(np.min(kappa) - abs(h) / math.sqrt(1.0 + h * h))
    return slack > 0, slack
