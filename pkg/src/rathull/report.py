"""Run configuration, stage orchestration and report/CSV output."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .certificates import (
    ORIENTATION,
    annulus_zero_identity,
    automorphism_check,
    constancy_certificate,
    expected_moment,
    exponent_lattice,
    laurent_gap,
    moment_report,
    two_to_one_winding,
)
from .errors import InvalidParams, RatHullError, VanishesOnSurface
from .fibration import CURVES, HYPOTHESIS_NOTICE, MAPS, fiber_model, gamma_curve, hull_decompose
from .numerics import DEFAULT_TOL, Tolerances
from .poly import BivariatePolynomial, linear
from .stokes import stokes_bounding_check
from .surfaces import (
    FAMILIES,
    KleinBottle,
    SurfaceFamily,
    family_from_dict,
    klein_identification_check,
    total_reality_scan,
    validate_family,
)

SCHEMA_VERSION = "1.0"
STAGES = ("validate", "total-real", "decompose", "certificates")
KLEIN_CERTIFICATES = ("constancy", "zero-identity", "moments", "laurent-gap", "lattice", "automorphism", "identification")
DEFAULT_CERTIFICATES = {
    "klein": KLEIN_CERTIFICATES,
    "klein-star": ("automorphism",),
    "hopf-torus": ("stokes",),
    "spin-torus": ("stokes",),
    "disc": ("stokes",),
}
DEFAULT_OPTIONS: dict[str, dict] = {
    "constancy": {
        "polynomials": [
            [[1, 0, 1, 0], [0, 0, -10, 0]],
            [[1, 0, 1, 0], [0, 0, -0.5, 0]],
            [[0, 1, 1, 0], [0, 0, -10, 0]],
            [[1, 0, 1, 0], [0, 0, 0, -10]],
            [[1, 0, 1, 0], [0, 0, -4, 0]],
        ],
        "phi_points": 256,
    },
    "zero-identity": {"c": [[0.5, 0], [4, 0], [10, 0], [0, 4], [-6, 0]]},
    "moments": {"psi": ["z^2", "inv_z", "conj_z"], "k_min": -16, "k_max": 16, "digits": 40},
    "laurent-gap": {"target": "conj_z", "N": [1, 2, 4, 8, 16, 32], "samples": 256},
    "lattice": {"j_range": [-5, 5], "l_range": [0, 3], "window": [-5, 5]},
    "automorphism": {"grid": 256, "annulus_samples": 64, "random_points": 1000},
    "identification": {"grid": 128},
    "stokes": {"resolution": 512},
}
MIN_SURFACE, MIN_GAMMA, MIN_CONTOUR = 64, 256, 256


@dataclass
class RunConfig:
    family: dict = field(default_factory=lambda: {"name": "klein"})
    rational_map: str | None = None
    avoidance: str | None = None
    surface_resolution: int = 256
    gamma_samples: int = 1024
    contour_samples: int = 2048
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    stages: list = field(default_factory=lambda: list(STAGES))
    certificates: list | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.family, str):
            self.family = {"name": self.family}
        if self.surface_resolution < MIN_SURFACE:
            raise InvalidParams(f"surface resolution must be >= {MIN_SURFACE}")
        if self.gamma_samples < MIN_GAMMA:
            raise InvalidParams(f"gamma samples must be >= {MIN_GAMMA}")
        if self.contour_samples < MIN_CONTOUR:
            raise InvalidParams(f"contour samples must be >= {MIN_CONTOUR}")
        bad = [s for s in self.stages if s not in STAGES]
        if bad:
            raise InvalidParams(f"unknown stages {bad}")
        if self.rational_map is not None and self.rational_map not in MAPS:
            raise InvalidParams(f"unknown fibering map {self.rational_map!r}; choose from {sorted(MAPS)}")
        if self.avoidance is not None and self.avoidance not in CURVES:
            raise InvalidParams(f"unknown avoidance curve {self.avoidance!r}; choose from {sorted(CURVES)}")
        try:
            self.tol
        except (TypeError, ValueError) as exc:
            raise InvalidParams(str(exc)) from exc

    @property
    def tol(self) -> Tolerances:
        return DEFAULT_TOL.replace(**self.tolerances)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise InvalidParams(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParams(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidParams("config must be a JSON object")
        return cls.from_dict(data)

    def option(self, name: str) -> dict:
        out = dict(DEFAULT_OPTIONS.get(name, {}))
        out.update(self.options.get(name, {}))
        return out

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "rational_map": self.rational_map,
            "avoidance": self.avoidance,
            "surface_resolution": self.surface_resolution,
            "gamma_samples": self.gamma_samples,
            "contour_samples": self.contour_samples,
            "tolerances": {k: getattr(self.tol, k) for k in ("zero_tol", "int_tol", "residual_tol")},
            "stages": list(self.stages),
            "certificates": self.certificates,
            "options": self.options,
        }


def _clean(x: Any) -> Any:
    """JSON-safe copy: complex -> [re, im], numpy -> python, non-finite -> None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(float(x.real)), _clean(float(x.imag))]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


@dataclass
class RunReport:
    config: dict
    results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values()) and not self.errors

    def to_dict(self) -> dict:
        return _clean({
            "schema_version": SCHEMA_VERSION,
            "package_version": __version__,
            "config": self.config,
            "hypothesis": HYPOTHESIS_NOTICE,
            "results": self.results,
            "verdicts": self.verdicts,
            "errors": self.errors,
            "verdict": self.passed,
            "files": sorted(self.files),
            "timings_file": "timings.json",
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# --- certificates ----------------------------------------------------------------

def _klein_of(family: SurfaceFamily) -> KleinBottle:
    if not isinstance(family, KleinBottle):
        raise InvalidParams(f"certificate needs the Klein bottle, not {family.name}")
    return KleinBottle(family.a, family.b)


def _cert_constancy(family, cfg: RunConfig):
    klein = _klein_of(family)
    opt = cfg.option("constancy")
    rows, ok = [], True
    for terms in opt["polynomials"]:
        P = BivariatePolynomial.from_terms(terms)
        try:
            led = constancy_certificate(P, klein, int(opt["phi_points"]), cfg.tol)
        except VanishesOnSurface as exc:
            rows.append({"polynomial": str(P), "status": "vanishes-on-surface", "detail": str(exc)})
            continue
        good = led.n_annulus == 0 and led.implied_annulus_count == 0
        ok &= good
        rows.append({"status": "certified" if good else "failed", **led.to_dict()})
    return {"polynomials": rows, "tol": cfg.tol.int_tol}, ok


def _cert_zero_identity(family, cfg: RunConfig):
    klein = _klein_of(family)
    rows, ok = [], True
    for re, im in cfg.option("zero-identity")["c"]:
        led = annulus_zero_identity(linear(cz=1, c0=-complex(re, im)), klein, cfg.tol)
        ok &= led.identity_residual == 0
        rows.append({"c": [re, im], **led.to_dict()})
    two = two_to_one_winding(klein, cfg.tol)
    ok &= two == (2, 2)
    return {"ledgers": rows, "boundary_winding_F0_Fminuspi": list(two)}, ok


def _cert_moments(family, cfg: RunConfig):
    klein = _klein_of(family)
    opt = cfg.option("moments")
    tol = cfg.tol.residual_tol
    out, ok = [], True
    for psi in opt["psi"]:
        digits = opt.get("digits")
        rep = moment_report(psi, int(opt["k_min"]), int(opt["k_max"]), cfg.contour_samples, klein,
                            None if digits is None else int(digits))
        d = rep.to_dict()
        exp = [expected_moment(psi, k, klein) for k in rep.ks]
        if all(e is not None for e in exp):
            dev = np.abs(rep.normalized - np.array(exp))
            d["expected"] = exp
            d["max_deviation_normalized"] = float(np.max(dev))
            d["max_deviation_raw"] = float(np.max(np.abs(rep.moments - np.array(exp))))
            d["passed"] = bool(max(np.max(dev), d["max_deviation_raw"]) < tol)
            ok &= d["passed"]
        out.append(d)
    return {"reports": out, "tol": tol, "verdict_basis": "raw moments and moments against z^k / sup_A |z^k|",
            "orientation": ORIENTATION}, ok


def _cert_gap(family, cfg: RunConfig):
    klein = _klein_of(family)
    opt = cfg.option("laurent-gap")
    rep = laurent_gap(opt["target"], (klein.inner_radius, klein.outer_radius), opt["N"], int(opt["samples"]))
    res = [r for _, r, _ in rep.rows]
    spread = max(res) - min(res)
    d = rep.to_dict()
    d["spread"] = spread
    return d, bool(spread < 1e-9 and min(res) > cfg.tol.residual_tol)


def _cert_lattice(family, cfg: RunConfig):
    opt = cfg.option("lattice")
    full = exponent_lattice(tuple(opt["j_range"]), tuple(opt["l_range"]), tuple(opt["window"]))
    flat = exponent_lattice(tuple(opt["j_range"]), (0, 0), tuple(opt["window"]))
    return {"fiber_circle": full.to_dict(), "zero_fiber_l_fixed_0": flat.to_dict()}, full.covered


def _cert_automorphism(family, cfg: RunConfig):
    opt = cfg.option("automorphism")
    rep = automorphism_check(_klein_of(family), int(opt["grid"]), int(opt["annulus_samples"]),
                             int(opt["random_points"]))
    return rep.to_dict(), rep.passed


def _cert_identification(family, cfg: RunConfig):
    rep = klein_identification_check(_klein_of(family), int(cfg.option("identification")["grid"]))
    ok = rep.max_identification_error < 1e-12 and rep.min_nonequivalent_distance > 0
    return {"max_identification_error": rep.max_identification_error,
            "min_nonequivalent_distance": rep.min_nonequivalent_distance, "grid": rep.resolution}, ok


def _cert_stokes(family, cfg: RunConfig):
    rep = stokes_bounding_check(family, resolution=int(cfg.option("stokes")["resolution"]),
                                tol=cfg.tol.residual_tol)
    exact_ok = all(r.residual < 1e-9 for r in rep.exact_rows)
    return rep.to_dict(), rep.passed and exact_ok


CERTIFICATES = {
    "constancy": _cert_constancy,
    "zero-identity": _cert_zero_identity,
    "moments": _cert_moments,
    "laurent-gap": _cert_gap,
    "lattice": _cert_lattice,
    "automorphism": _cert_automorphism,
    "identification": _cert_identification,
    "stokes": _cert_stokes,
}


# --- CSV -----------------------------------------------------------------------------

def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow(["%.17g" % float(x) for x in row])


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        data = np.array([[float(x) for x in row] for row in rd])
    return header, data


def _surface_rows(family: SurfaceFamily, u, v):
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    z, w = family.evaluate(u, v)
    return np.column_stack([u.ravel(), v.ravel(), z.real.ravel(), z.imag.ravel(), w.real.ravel(), w.imag.ravel()])


def write_curve_files(out: Path, family: SurfaceFamily, decomposition, samples: int = 256) -> list[str]:
    model = fiber_model(family)
    names = []
    gamma = gamma_curve(family, samples=max(samples, 256))
    write_csv(out / "gamma.csv", ["param", "t_re", "t_im"],
              np.column_stack([gamma.params, gamma.values.real, gamma.values.imag]))
    names.append("gamma.csv")

    u_name, v_name = family.param_names
    header = [u_name, v_name, "z_re", "z_im", "w_re", "w_im"]
    lo, hi = model.fiber_domain
    fiber_params = list(np.linspace(lo, hi, 9)[1:-1])
    for a in decomposition.attached:
        fiber_params.extend(a.boundary_params)
    circle = 2 * math.pi * np.arange(samples) / samples
    blocks = []
    for s in fiber_params:
        if model.circle_axis == 0:
            blocks.append(_surface_rows(family, circle, s))
        else:
            blocks.append(_surface_rows(family, s, circle))
    write_csv(out / "fiber_circles.csv", header, np.vstack(blocks))
    names.append("fiber_circles.csv")

    if decomposition.attached:
        rows = []
        for k, a in enumerate(decomposition.attached):
            lo_r = a.inner_radius or 0.0
            for rho in np.linspace(lo_r, a.outer_radius, 9):
                u = rho * np.exp(1j * circle)
                z, w = a.chart_map(u)
                rows.append(np.column_stack([np.full(samples, k), np.full(samples, rho), circle,
                                             z.real, z.imag, w.real, w.imag]))
        write_csv(out / "annulus.csv", ["component", "chart_radius", "chart_angle", "z_re", "z_im", "w_re", "w_im"],
                  np.vstack(rows))
        names.append("annulus.csv")

    if isinstance(family, KleinBottle):
        # F_phi(e^{is}) is the surface point at theta = s, so the disc boundary images are surface rows
        phis = np.linspace(-math.pi, 0, 9)
        write_csv(out / "disc_boundaries.csv", ["theta", "phi", "z_re", "z_im", "w_re", "w_im"],
                  np.vstack([_surface_rows(family, circle, p) for p in phis]))
        names.append("disc_boundaries.csv")
    return names


# --- orchestration ----------------------------------------------------------------------

def run(cfg: RunConfig) -> RunReport:
    """Execute the requested stages in order and collect a report.

    Invalid families raise (InvalidParams / ValidationFailed) before any
    stage runs; failures inside a stage are recorded and later stages still run.
    """
    family = family_from_dict(cfg.family)
    fam_name = family.name
    if cfg.rational_map is not None and cfg.rational_map != fiber_model(family).rational_map.descriptor:
        raise InvalidParams(f"{fam_name} is analysed with f = {fiber_model(family).rational_map.descriptor}")
    certs = cfg.certificates if cfg.certificates is not None else list(DEFAULT_CERTIFICATES[fam_name])
    unknown = [c for c in certs if c not in CERTIFICATES]
    if unknown:
        raise InvalidParams(f"unknown certificates {unknown}")
    if "certificates" in cfg.stages:
        for c in certs:
            if c in KLEIN_CERTIFICATES and c != "automorphism" and fam_name != "klein":
                raise InvalidParams(f"certificate {c} applies to the klein family only")
            if c == "automorphism" and fam_name not in ("klein", "klein-star"):
                raise InvalidParams("automorphism check applies to klein and klein-star")
            if c == "stokes" and fam_name in ("klein", "klein-star"):
                raise InvalidParams("the Stokes check covers hopf-torus, spin-torus and disc")
    t0 = time.perf_counter()
    validation = validate_family(family)
    report = RunReport(cfg.to_dict())
    report.results["family"] = family.to_dict()
    report.results["validation"] = validation.to_dict()
    report.timings["validate"] = time.perf_counter() - t0

    def stage(name, fn):
        t = time.perf_counter()
        try:
            result, ok = fn()
            report.results[name] = result
            report.verdicts[name] = bool(ok)
        except RatHullError as exc:
            report.errors[name] = f"{type(exc).__name__}: {exc}"
            report.verdicts[name] = False
        report.timings[name] = time.perf_counter() - t

    if "total-real" in cfg.stages:
        def total_real():
            rep = total_reality_scan(family, cfg.surface_resolution, validate=False)
            return {**rep.to_dict(), "tol": 0.0}, rep.passed
        stage("total_reality", total_real)

    decomposition = None
    if "decompose" in cfg.stages:
        def decompose():
            nonlocal decomposition
            V = CURVES[cfg.avoidance] if cfg.avoidance else None
            decomposition = hull_decompose(family, None, V, cfg.gamma_samples, validation)
            gamma = gamma_curve(family, samples=cfg.gamma_samples)
            d = decomposition.summary()
            d["gamma"] = gamma.summary()
            d["fibers"] = [
                {"param": r.param, "t": r.t, "circle_params": r.circle_params, "radii": r.radii,
                 "bounded": r.bounded, "excluded": r.excluded, "attached": r.attached}
                for r in decomposition.fibers
            ]
            ok = len(decomposition.attached) == 1 and decomposition.min_abs_F_on_attached > 0
            if isinstance(family, KleinBottle):
                a = decomposition.attached[0] if decomposition.attached else None
                ok &= a is not None and abs(a.inner_radius - family.inner_radius) < 1e-12 \
                    and abs(a.outer_radius - family.outer_radius) < 1e-12
            return d, ok
        stage("decomposition", decompose)

    if "certificates" in cfg.stages:
        for c in certs:
            stage(f"certificate:{c}", lambda c=c: CERTIFICATES[c](family, cfg))

    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        if decomposition is not None:
            report.files.extend(write_curve_files(out, family, decomposition))
        report.files.append("report.json")
        (out / "report.json").write_text(report.to_json() + "\n")
        (out / "timings.json").write_text(json.dumps(report.timings, indent=2, sort_keys=True) + "\n")
    return report


# --- text rendering ------------------------------------------------------------------------

def render_text(report: dict) -> str:
    lines = [
        f"rathull report (schema {report.get('schema_version')})",
        f"family: {report.get('results', {}).get('family', {}).get('name')}",
        f"verdict: {'PASS' if report.get('verdict') else 'FAIL'}",
    ]
    for name, ok in sorted(report.get("verdicts", {}).items()):
        lines.append(f"  {'pass' if ok else 'FAIL'}  {name}")
    for name, err in sorted(report.get("errors", {}).items()):
        lines.append(f"  error {name}: {err}")
    dec = report.get("results", {}).get("decomposition")
    if dec:
        lines.append(f"attached components: {len(dec['attached'])}")
        for a in dec["attached"]:
            t = complex(*a["t"])
            s = f"  {a['kind']} at t = {t:.12g} in chart {a['coordinate']}: radii [{a['inner_radius']}, {a['outer_radius']}]"
            if "latitude_bounds" in a:
                s += f", |z|^2-|w|^2 in {a['latitude_bounds']}"
            lines.append(s)
    tr = report.get("results", {}).get("total_reality")
    if tr:
        lines.append(f"min |det| = {tr['min_abs_det']:.6g} at {tr['argmin']} ({tr['resolution']}^2 grid)")
    lines.append(f"note: {report.get('hypothesis')}")
    return "\n".join(lines)


def gallery() -> list[dict]:
    out = []
    for name, cls in FAMILIES.items():
        fam = family_from_dict({"name": name})
        model = fiber_model(fam)
        out.append({
            "name": name,
            "params": fam.params_dict(),
            "rational_map": model.rational_map.descriptor,
            "avoidance": model.avoidance.descriptor,
            "certificates": list(DEFAULT_CERTIFICATES[name]),
        })
    return _clean(out)
