"""Command line entry point.

Exit codes: 0 when every requested check passes, 1 when any check fails
(the report is still written), 2 for invalid configuration or parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import RatHullError, ValidationFailed
from .report import RunConfig, gallery, render_text, run

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected KEY=VALUE")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory for report.json and CSV files")
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    p.add_argument("--family", help="gallery family name")
    p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE",
                   help="family parameter (JSON value), repeatable")
    p.add_argument("--resolution", type=int, help="surface grid N, or Gamma samples M for decompose")
    p.add_argument("--tol-zero", type=float, dest="zero_tol")
    p.add_argument("--tol-int", type=float, dest="int_tol")
    p.add_argument("--tol-residual", type=float, dest="residual_tol")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rathull", description="Rational hulls of fibered totally real surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="all stages from a configuration"))
    _common(sub.add_parser("total-real", help="tangent determinant scan"))
    _common(sub.add_parser("decompose", help="candidate hull from the fibration"))
    p = sub.add_parser("certify", help="certificates for a family")
    _common(p)
    p.add_argument("--cert", action="append", help="certificate name, repeatable")
    p = sub.add_parser("moments", help="boundary moments on the Klein annulus")
    _common(p)
    p.add_argument("--psi", action="append", help="boundary function: conj_z, z, inv_z, abs_z or z^m")
    p.add_argument("--k-min", type=int, default=-16)
    p.add_argument("--k-max", type=int, default=16)
    p.add_argument("--samples", type=int, help="quadrature points per circle")
    p = sub.add_parser("gap", help="Laurent approximation gap on the annulus circles")
    _common(p)
    p.add_argument("--target", default="conj_z")
    p.add_argument("--N", type=int, action="append", dest="N")
    sub.add_parser("gallery", help="list built-in families and defaults")
    p = sub.add_parser("report", help="render a stored JSON report as text")
    p.add_argument("path")
    return parser


STAGES_FOR = {
    "run": None,
    "total-real": ["validate", "total-real"],
    "decompose": ["validate", "decompose"],
    "certify": ["validate", "certificates"],
    "moments": ["validate", "certificates"],
    "gap": ["validate", "certificates"],
}


def config_from_args(args) -> RunConfig:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text()) if Path(args.config).exists() else None
        if not isinstance(data, dict):
            raise ValueError(f"cannot read config {args.config}")
    if args.family or args.param:
        fam = dict(data.get("family") or {"name": "klein"})
        if isinstance(fam, str):
            fam = {"name": fam}
        if args.family:
            if args.family != fam.get("name"):
                fam = {"name": args.family}
        if args.param:
            fam["params"] = {**(fam.get("params") or {}), **dict(args.param)}
        data["family"] = fam
    if args.out:
        data["out"] = args.out
    tols = {k: getattr(args, k) for k in ("zero_tol", "int_tol", "residual_tol") if getattr(args, k) is not None}
    if tols:
        data["tolerances"] = {**data.get("tolerances", {}), **tols}
    cmd = args.command
    if STAGES_FOR[cmd] is not None:
        data["stages"] = STAGES_FOR[cmd]
    if args.resolution is not None:
        data["gamma_samples" if cmd == "decompose" else "surface_resolution"] = args.resolution
    opts = dict(data.get("options") or {})
    if cmd == "certify" and args.cert:
        data["certificates"] = args.cert
    if cmd == "moments":
        data.setdefault("family", {"name": "klein"})
        data["certificates"] = ["moments"]
        m = dict(opts.get("moments") or {})
        m.update({"k_min": args.k_min, "k_max": args.k_max})
        if args.psi:
            m["psi"] = args.psi
        opts["moments"] = m
        if args.samples:
            data["contour_samples"] = args.samples
    if cmd == "gap":
        data.setdefault("family", {"name": "klein"})
        data["certificates"] = ["laurent-gap"]
        g = dict(opts.get("laurent-gap") or {})
        g["target"] = args.target
        if args.N:
            g["N"] = args.N
        opts["laurent-gap"] = g
    if opts:
        data["options"] = opts
    return RunConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gallery":
        for entry in gallery():
            print(json.dumps(entry, sort_keys=True))
        return EXIT_OK
    if args.command == "report":
        try:
            data = json.loads(Path(args.path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        print(render_text(data))
        return EXIT_OK
    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except (RatHullError, ValueError, TypeError, OSError) as exc:
        kind = type(exc).__name__
        if isinstance(exc, ValidationFailed):
            kind = "ValidationFailed"
        print(f"error: {kind}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.json:
        print(report.to_json())
    else:
        print(render_text(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
