"""Command line pipelines writing JSON reports.

Usage::

    horolift check-metric      --config run.json --out results/
    horolift verify            --config run.json --out results/
    horolift solve-radial      --config run.json --out results/
    horolift check-ellipticity --config run.json --out results/

Exit codes: 0 when every gate passes, 1 when a numerical gate fails, 2 for
configuration or input errors.  Reports carry ``"schema": 1`` and are
byte-identical for identical configuration and seed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import boundary, elliptic, factors, lift, lorentz, metric, radial, sphere
from .errors import ConeExitError, DomainError, LiftDegeneracyError, NoSolutionFound, NormalizationError

SCHEMA = 1
COMMANDS = ("check-metric", "verify", "solve-radial", "check-ellipticity")

DEFAULT_TOLERANCES = {
    "quadric": 1e-10,
    "gauss_map": 1e-10,
    "lambda_kappa": 1e-8,
    "lambda_kappa_fd": 5e-4,
    "plane": 1e-6,
    "angle": 1e-6,
    "halfspace": 1e-10,
    "psi_metric": 1e-6,
    "residual": 1e-8,
    "symmetry_factor": 2.0,
}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    command: str
    n: int
    domain: dict = field(default_factory=lambda: {"kind": "hemisphere"})
    factor: dict = field(default_factory=lambda: {"builtin": "constant", "params": {}})
    data: dict = field(default_factory=lambda: {"sigma_k": 1})
    tolerances: dict = field(default_factory=dict)
    grid: dict = field(default_factory=lambda: {"polar": 16, "directions": 16})
    solve: dict = field(default_factory=dict)
    samples: int = 1000
    seed: int = 0
    outputs: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    @classmethod
    def load(cls, path, command: str | None = None, seed: int | None = None,
             tol_scale: float = 1.0) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(raw, command, seed, tol_scale, Path(path).resolve().parent)

    @classmethod
    def from_dict(cls, raw: dict, command=None, seed=None, tol_scale: float = 1.0, base_dir=Path(".")):
        known = {"command", "n", "domain", "factor", "data", "tolerances", "grid", "solve", "samples",
                 "seed", "outputs"}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cmd = command or raw.get("command")
        if cmd not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {cmd!r}")
        if raw.get("command") not in (None, cmd):
            raise ConfigError(f"config is for {raw['command']!r}, not {cmd!r}")
        n = raw.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError("'n' must be an integer >= 2")
        if not (isinstance(tol_scale, (int, float)) and math.isfinite(tol_scale) and tol_scale > 0):
            raise ConfigError("--tol-scale must be a positive number")
        tols = dict(DEFAULT_TOLERANCES)
        user = raw.get("tolerances", {})
        if not isinstance(user, dict):
            raise ConfigError("'tolerances' must be an object")
        for k, v in user.items():
            if k not in tols:
                raise ConfigError(f"unknown tolerance {k!r}")
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError(f"tolerance {k!r} must be > 0")
            tols[k] = float(v)
        for k in tols:
            if k != "symmetry_factor":
                tols[k] *= tol_scale
        grid = {"polar": 16, "directions": 16, **raw.get("grid", {})}
        for k, v in grid.items():
            if not isinstance(v, int) or v < 16:
                raise ConfigError(f"grid size {k!r} must be an integer >= 16")
        samples = raw.get("samples", 1000)
        if not isinstance(samples, int) or samples < 1:
            raise ConfigError("'samples' must be a positive integer")
        s = raw.get("seed", 0) if seed is None else seed
        if not isinstance(s, int) or s < 0 or s >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        return cls(cmd, n, raw.get("domain", {"kind": "hemisphere"}),
                   raw.get("factor", {"builtin": "constant", "params": {}}),
                   raw.get("data", {"sigma_k": 1}), tols, grid, raw.get("solve", {}), samples, s,
                   raw.get("outputs", {}), base_dir)

    def make_domain(self) -> sphere.DomainSpec:
        d = self.domain
        kind = d.get("kind", "hemisphere")
        if kind == "hemisphere":
            return sphere.DomainSpec.hemisphere(self.n)
        if "radius" not in d:
            raise ConfigError(f"domain {kind!r} needs a 'radius'")
        return sphere.DomainSpec(kind, self.n, float(d["radius"]))

    def make_factor(self) -> factors.ConformalFactor:
        f = self.factor
        if "csv" in f:
            path = Path(f["csv"])
            path = path if path.is_absolute() else self.base_dir / path
            return factors.grid_factor_from_csv(path, self.n, h=float(f.get("step", 1e-3)),
                                                richardson=bool(f.get("richardson", True)))
        if "builtin" not in f:
            raise ConfigError("factor needs 'builtin' or 'csv'")
        params = dict(f.get("params", {}))
        dilation = float(params.pop("dilation", 0.0))
        try:
            fac = factors.builtin(f["builtin"], self.n, **params)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad parameters for factor {f['builtin']!r}: {exc}") from exc
        if f.get("provider") == "finite-difference":
            fac = factors.FiniteDifference.of(fac, h=float(f.get("step", 1e-3)),
                                              richardson=bool(f.get("richardson", True)))
        return metric.dilate(fac, dilation)

    def make_data(self) -> elliptic.EllipticData:
        d = self.data
        if "sigma_k" in d:
            k = d["sigma_k"]
            data = elliptic.trace_form_2d() if (self.n == 2 and k == 1 and d.get("trace_form")) \
                else elliptic.sigma_k_data(self.n, int(k))
        elif "expression" in d:
            data = elliptic.expression_data(str(d["expression"]), self.n)
        else:
            raise ConfigError("data needs 'sigma_k' or 'expression'")
        t = float(d.get("dilation", 0.0))
        return elliptic.dilate_data(data, t) if t else data


# --------------------------------------------------------------------------
# JSON helpers


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _workers() -> int:
    raw = os.environ.get("HOROLIFT_THREADS")
    if raw is None:
        return 1
    try:
        w = int(raw)
    except ValueError as exc:
        raise ConfigError(f"HOROLIFT_THREADS must be a positive integer, got {raw!r}") from exc
    if w < 1:
        raise ConfigError("HOROLIFT_THREADS must be a positive integer")
    return w


def _gate(name, value, tol, passed=None, **detail) -> dict:
    ok = (value is not None and math.isfinite(value) and value <= tol) if passed is None else passed
    return {"name": name, "deviation": value, "tolerance": tol, "passed": bool(ok), **detail}


# --------------------------------------------------------------------------
# commands


def cmd_check_metric(cfg: RunConfig) -> tuple[dict, bool]:
    rho = cfg.make_factor()
    dom = cfg.make_domain()
    interior, _ = sphere.domain_grid(dom, cfg.grid["polar"], cfg.grid["directions"])
    lam = metric.schouten_eigenvalues(rho, interior)
    table = boundary.boundary_curvature_table(rho, dom, cfg.grid["directions"])
    report = {
        "factor": rho.describe(),
        "domain": {"kind": dom.kind, "n": dom.n, "radius": dom.radius},
        "eigenvalues": {"min": lam.min(axis=0), "max": lam.max(axis=0), "points": len(interior)},
        "boundary_h": table,
        "convention": "h = e^-rho (h0 - d rho/d nu), nu inward",
    }
    try:
        t0, cert = metric.normalize_for_lift(rho, dom, cfg.grid["polar"], cfg.grid["directions"])
        report["normalization"] = cert.as_dict()
        ok = True
    except NormalizationError as exc:
        report["normalization"] = {"error": str(exc)}
        ok = False
    return report, ok


def _verify_checks(cfg: RunConfig, rho, dom) -> list:
    tol = cfg.tolerances
    polar, dirs = cfg.grid["polar"], cfg.grid["directions"]
    interior, bnd = sphere.domain_grid(dom, polar, dirs)
    pts = np.vstack([interior, *bnd.values()])
    closed = rho.provenance == "closed-form"

    def quadric():
        s = lift.lift(rho, pts)
        d = s.quadric_defects()
        return _gate("quadric", max(d.values()), tol["quadric"], defects=d)

    def gauss():
        s = lift.lift(rho, pts)
        return _gate("gauss_map", float(np.max(np.abs(lift.gauss_map(s) - pts))), tol["gauss_map"])

    def lam_kappa():
        t = tol["lambda_kappa"] if closed else tol["lambda_kappa_fd"]
        return _gate("lambda_kappa", lift.verify_lambda_kappa(rho, pts), t, provenance=rho.provenance)

    def psi_metric():
        return _gate("psi_metric", lift.psi_metric_defect(rho, pts), tol["psi_metric"])

    checks = [quadric, gauss, lam_kappa, psi_metric]
    out = []
    levels = []
    for comp, bp in bnd.items():
        h = metric.boundary_mean_curvature(rho, dom, comp, bp)
        h_mean = float(np.mean(h))
        spread = float(np.max(h) - np.min(h))
        try:
            plane = boundary.boundary_plane(dom, comp, h_mean if abs(h_mean) > tol["plane"] else 0.0)
        except ValueError as exc:
            out.append(_gate(f"boundary_in_plane[{comp}]", None, tol["plane"], passed=False, error=str(exc)))
            continue
        levels.append(plane.level)

        def contain(comp=comp, plane=plane, spread=spread):
            r = boundary.check_boundary_in_plane(rho, dom, comp, plane, dirs, tol["plane"]).as_dict()
            r["h_spread"] = spread
            return r

        def angle(comp=comp, plane=plane):
            return boundary.check_angle(rho, dom, comp, plane, dirs, tol["angle"]).as_dict()

        checks += [contain, angle]
    c = levels[0] if (dom.kind == "cap" and levels) else 0.0
    checks.append(lambda: boundary.check_halfspace(rho, dom, c, polar, dirs, tol["halfspace"]).as_dict())
    checks.append(lambda: boundary.check_convexity_bound(rho, dom, c, polar, dirs).as_dict())
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        out += list(pool.map(lambda f: f(), checks))
    return out


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    rho0 = cfg.make_factor()
    dom = cfg.make_domain()
    report = {"factor": rho0.describe(), "domain": {"kind": dom.kind, "n": dom.n, "radius": dom.radius},
              "tolerances": cfg.tolerances}
    try:
        t0, cert = metric.normalize_for_lift(rho0, dom, cfg.grid["polar"], cfg.grid["directions"])
    except NormalizationError as exc:
        report["normalization"] = {"error": str(exc)}
        return report, False
    report["normalization"] = cert.as_dict()
    rho = metric.dilate(rho0, t0)
    try:
        checks = _verify_checks(cfg, rho, dom)
    except LiftDegeneracyError as exc:
        report["checks"] = [{"name": "lift", "passed": False, "error": str(exc)}]
        return report, False
    report["checks"] = checks
    planes = [c for c in checks if c["name"].startswith("angle")]
    report["angle_targets"] = [c.get("detail", {}).get("target") for c in planes]
    ok = all(c["passed"] for c in checks)
    return report, ok


def cmd_solve_radial(cfg: RunConfig) -> tuple[dict, bool, radial.RadialProfile | None]:
    data = cfg.make_data()
    if data.n != cfg.n:
        raise ConfigError("data dimension differs from n")
    s = cfg.solve
    mode = s.get("mode", "cap")
    points = int(s.get("points", 4096))
    if points < 16:
        raise ConfigError("solve.points must be >= 16")
    tol = cfg.tolerances["residual"]
    report = {"mode": mode, "data": data.name, "n": cfg.n, "points": points, "tolerance": tol}
    try:
        if mode == "cap":
            c = float(s.get("c", 0.0))
            prof = radial.shoot_cap(data, c, cfg.n, points)
        elif mode == "annulus":
            if "r" not in s:
                raise ConfigError("annulus mode needs solve.r")
            prof = radial.shoot_annulus(data, float(s["r"]), cfg.n, points)
        else:
            raise ConfigError(f"solve.mode must be 'cap' or 'annulus', got {mode!r}")
    except (NoSolutionFound, ConeExitError) as exc:
        report["error"] = str(exc)
        return report, False, None
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    report.update(prof.summary())
    gates = [_gate("interior", prof.residuals["interior"], tol),
             _gate("outer_h", prof.residuals["outer_h"], tol)]
    if mode == "cap":
        gates.append(_gate("pole_regularity", prof.residuals["pole_regularity"], tol))
        fit = radial.fit_mobius(prof)
        report["mobius_fit"] = fit
        report["boundary_area"] = prof.boundary_area()
        report["volume"] = prof.volume()
        if fit["equator_h"] > 0:
            r = math.atan2(1.0, fit["equator_h"])
            report["reference_cap"] = {"radius": r, **radial.cap_geometry(r, cfg.n)}
    else:
        gates.append(_gate("inner_h", prof.residuals["inner_h"], tol))
        gates.append(_gate("reflection_extension", radial.reflection_extension_residual(prof), tol))
        if s.get("symmetry", False):
            gates.append(_symmetry_gate(cfg, prof))
    report["gates"] = gates
    return report, all(g["passed"] for g in gates), prof


def _symmetry_gate(cfg: RunConfig, prof: radial.RadialProfile) -> dict:
    sym = radial.lift_symmetry_defect(prof, seed=cfg.seed)
    bound = cfg.tolerances["symmetry_factor"] * sym["spacing"]
    return _gate("symmetry_defect", sym["defect"], bound, spacing=sym["spacing"], rotations=sym["rotations"],
                 dilation=sym["t"])


def cmd_check_ellipticity(cfg: RunConfig) -> tuple[dict, bool]:
    data = cfg.make_data()
    rep = elliptic.check_ellipticity(data, cfg.samples, cfg.seed)
    report = {"ellipticity": rep}
    ok = rep["pass"]
    if ok:
        _, transfer = elliptic.make_curvature_data(data, cfg.samples, cfg.seed)
        report["curvature_data"] = transfer["transfer"]
        rng = np.random.default_rng(cfg.seed)
        kappa = rng.uniform(-1.0, 50.0, size=(cfg.samples, cfg.n))
        kappa = kappa[kappa.min(axis=1) > -1.0]
        dev = float(np.max(np.abs(elliptic.curvature_transform(kappa) - (0.5 - 1.0 / (1.0 + kappa)))))
        report["transform_consistency"] = dev
        ok = ok and transfer["transfer"]["pass"] and dev <= 1e-14
    return report, ok


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horolift", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed (u64)")
        sp.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = Path(args.out)
    try:
        cfg = RunConfig.load(args.config, args.command, args.seed, args.tol_scale)
        _workers()
        profile = None
        if cfg.command == "check-metric":
            body, ok = cmd_check_metric(cfg)
        elif cfg.command == "verify":
            body, ok = cmd_verify(cfg)
        elif cfg.command == "solve-radial":
            body, ok, profile = cmd_solve_radial(cfg)
        else:
            body, ok = cmd_check_ellipticity(cfg)
    except (ConfigError, DomainError, ValueError, KeyError, TypeError) as exc:
        print(f"horolift: input error: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, "command": cfg.command, "seed": cfg.seed, "passed": ok, **body}
    name = cfg.outputs.get("report", "report.json")
    write_atomic(out / name, dumps(report))
    if profile is not None:
        path = out / cfg.outputs.get("profile", "profile.csv")
        fd, tmp = tempfile.mkstemp(dir=out, prefix=".profile.")
        os.close(fd)
        radial.write_profile_csv(tmp, profile)
        os.replace(tmp, path)
    print(f"horolift {cfg.command}: {'pass' if ok else 'FAIL'} -> {out / name}")
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
