"""Batch entry point: verification suites, sweeps and plot-ready data.

Every command builds a list of checks (name, inputs, computed, expected,
residual, pass) and exits nonzero when any check fails or when no check ran.
Bulk data go to ``--out`` as CSV (UTF-8, LF line endings) or, when the path
ends in ``.json``, the full report goes there as JSON.  Files are written to a
temporary sibling and renamed into place.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .epstein import (
    ExcludedRegionError,
    admissible_points,
    dome_check,
    epstein_flow,
    hemisphere_residual,
    identity_suite,
)
from .metrics import (
    DiskUnionScene,
    HalfPlaneScene,
    ImageDomainScene,
    RoundDiskScene,
    SceneParseError,
    UnsupportedSceneError,
    parse_scene,
    scene_field,
)
from .wvol import DescriptorError, bound_sweep, chain_verify, load_descriptors

DEFAULT_TOLERANCES = {
    "closed_form": 1e-9,
    "finite_difference": 1e-5,
    "flow_distance": 1e-6,
    "dome": 1e-6,
}

IDENTITY_TIMES = (0.0, 0.3, 0.7)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_CAPABILITY = 0, 1, 2, 3


class UsageError(ValueError):
    """Bad command line or input file."""


@dataclass
class Check:
    name: str
    inputs: dict
    computed: object
    expected: object
    residual: float
    tolerance: str
    passed: bool

    def as_json(self) -> dict:
        return {
            "name": self.name, "inputs": self.inputs, "computed": _jsonable(self.computed),
            "expected": _jsonable(self.expected), "residual": _jsonable(self.residual),
            "tolerance": self.tolerance, "pass": self.passed,
        }


@dataclass
class Report:
    command: str
    tolerances: dict
    config: dict
    checks: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def check(self, name, inputs, computed, expected, residual, tolerance):
        residual = float(residual)
        passed = residual < self.tolerances[tolerance]
        self.checks.append(Check(name, inputs, computed, expected, residual, tolerance, passed))
        return passed

    @property
    def summary(self) -> dict:
        passed = sum(c.passed for c in self.checks)
        return {"total": len(self.checks), "passed": passed, "failed": len(self.checks) - passed}

    @property
    def ok(self) -> bool:
        s = self.summary
        return s["total"] > 0 and s["failed"] == 0

    def as_json(self) -> dict:
        return {
            "header": {"command": self.command, "version": __version__,
                       "tolerances": self.tolerances, "config": self.config},
            "checks": [c.as_json() for c in self.checks],
            "summary": self.summary,
        }


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


# --- file output --------------------------------------------------------------

def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_outputs(report: Report, out) -> None:
    if out is None:
        return
    if str(out).endswith(".json"):
        atomic_write_text(out, json.dumps(report.as_json(), indent=2, sort_keys=True) + "\n")
    else:
        atomic_write_text(out, rows_to_csv(report.rows))


# --- input helpers ------------------------------------------------------------

def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def load_scene(path):
    if path is None:
        raise UsageError("this command needs --scene")
    try:
        return parse_scene(load_json(path))
    except SceneParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def parse_tolerances(items) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        if name not in tol:
            raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(sorted(tol))}")
        try:
            v = float(value)
        except ValueError:
            raise UsageError(f"tolerance {name!r} is not a number: {value!r}") from None
        if not v > 0 or not math.isfinite(v):
            raise UsageError(f"tolerance {name!r} must be positive")
        tol[name] = v
    return tol


def parse_range(text: str, flag: str) -> np.ndarray:
    """``a:b:n`` -> n evenly spaced values from a to b; a bare number is a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise UsageError(f"{flag}: the grid must be nonempty")
            return np.linspace(a, b, n)
    except ValueError:
        pass
    raise UsageError(f"{flag}: expected a:b:n or a number, got {text!r}")


def scene_candidates(scene, rng, k: int) -> list:
    """Random interior points of a scene, kept away from the boundary."""
    if isinstance(scene, ImageDomainScene):
        r = 0.8 * np.sqrt(rng.uniform(0.0, 1.0, k))
        th = rng.uniform(0.0, 2 * math.pi, k)
        return [scene.expr(z) for z in r * np.exp(1j * th)]
    if isinstance(scene, HalfPlaneScene):
        depth = rng.uniform(0.1, 2.0, k)
        along = rng.uniform(-2.0, 2.0, k)
        n = scene.normal
        return [(scene.offset - a) * n + b * 1j * n for a, b in zip(depth, along)]
    disks = scene.disks if isinstance(scene, (RoundDiskScene, DiskUnionScene)) else None
    if disks is None:
        raise UnsupportedSceneError(f"cannot sample {scene.kind} scenes")
    scale = max(d.radius for d in disks)
    out = []
    for _ in range(1000 * k):
        if len(out) == k:
            break
        d = disks[int(rng.integers(len(disks)))]
        rho = 0.9 * d.radius * math.sqrt(rng.uniform())
        z = d.center + rho * np.exp(2j * math.pi * rng.uniform())
        if scene.clearance(z) >= 0.05 * scale:
            out.append(complex(z))
    if len(out) < k:
        raise UsageError("the scene has no interior points away from its boundary")
    return out


def _zin(z) -> dict:
    return {"z": [z.real, z.imag]}


# --- commands -----------------------------------------------------------------

def cmd_verify_identities(args, report: Report) -> None:
    scene = load_scene(args.scene)
    field_ = scene_field(scene)
    rng = np.random.default_rng(args.seed)
    n = args.grid or 20
    pts = admissible_points(field_, scene_candidates(scene, rng, 50 * n), IDENTITY_TIMES, n)
    if len(pts) < n:
        raise UsageError(f"only {len(pts)} of {n} sample points avoid the singular heights")
    names = ("residual_3", "residual_4", "residual_6", "residual_7", "area_ratio_residual", "gauss_residual")
    for z in pts:
        for s in IDENTITY_TIMES:
            for t in IDENTITY_TIMES:
                rep = identity_suite(field_, z, s, t)
                inputs = {**_zin(z), "s": s, "t": t}
                for name in names:
                    report.check(name, inputs, getattr(rep, name), 0.0, getattr(rep, name), "finite_difference")
                report.check("flow_distance", inputs, abs(t - s) + rep.flow_distance_residual, abs(t - s),
                             rep.flow_distance_residual, "flow_distance")
                row = rep.row()
                row = {"z_re": row["z_re"], "z_im": row["z_im"], "t": row["t"], "s": s,
                       **{k: v for k, v in row.items() if k not in ("z_re", "z_im", "t")}}
                report.rows.append(row)


def cmd_epstein_sample(args, report: Report) -> None:
    scene = load_scene(args.scene)
    field_ = scene_field(scene)
    rng = np.random.default_rng(args.seed)
    times = [float(t) for t in args.times.split(",")] if args.times else [0.0]
    single = scene.disks[0] if isinstance(scene, RoundDiskScene) or (
        isinstance(scene, DiskUnionScene) and len(scene.disks) == 1) else None
    for z in scene_candidates(scene, rng, args.grid or 100):
        for t in times:
            ep = epstein_flow(field_, z, t)
            d = field_(z)
            inputs = {**_zin(z), "t": t}
            report.check("envelope", inputs, ep.residual, 0.0, ep.residual, "closed_form")
            row = {"z_re": z.real, "z_im": z.imag, "t": t, "u": d.u, "w_re": ep.x.w.real,
                   "w_im": ep.x.w.imag, "height": ep.x.t, "envelope_residual": ep.residual}
            if single is not None and t == 0.0:
                hr = hemisphere_residual(ep.x, single)
                report.check("hemisphere", inputs, hr, 0.0, hr, "closed_form")
                row["hemisphere_residual"] = hr
            report.rows.append(row)


def cmd_dome(args, report: Report) -> None:
    scene = load_scene(args.scene)
    if not isinstance(scene, DiskUnionScene) or len(scene.disks) != 2:
        raise UnsupportedSceneError("dome needs a disk-union scene with two disks")
    rng = np.random.default_rng(args.seed)
    n = args.grid or 12
    angle_done = False
    for z in scene_candidates(scene, rng, 20 * n):
        if len(report.rows) == n:
            break
        try:
            rep = dome_check(scene, z)
        except ExcludedRegionError:
            continue
        inputs = {**_zin(z), "region": rep.region}
        report.check("hemisphere", inputs, rep.hemisphere_residual, 0.0, rep.hemisphere_residual, "dome")
        report.check("support", inputs, rep.support_residual, 0.0, rep.support_residual, "dome")
        if not angle_done:
            report.check("bending_angle", {"disks": [[d.center.real, d.center.imag, d.radius] for d in scene.disks]},
                         rep.bending_angle, rep.bending_angle_expected, rep.angle_residual, "dome")
            angle_done = True
        report.rows.append({
            "z_re": z.real, "z_im": z.imag, "region": rep.region,
            "x_re": rep.point.w.real, "x_im": rep.point.w.imag, "x_t": rep.point.t,
            "hemisphere_residual": rep.hemisphere_residual, "support_residual": rep.support_residual,
            "bending_angle": rep.bending_angle,
        })


def cmd_bounds(args, report: Report) -> None:
    if args.descriptors is None:
        raise UsageError("bounds needs --descriptors")
    try:
        descriptors = load_descriptors(load_json(args.descriptors))
    except DescriptorError as exc:
        raise UsageError(f"{args.descriptors}: {exc}") from None
    tol = report.tolerances["closed_form"]
    for k, d in enumerate(descriptors):
        rep = chain_verify(d, tol)
        inputs = {"index": k, **d.to_json()}
        report.check("closure", inputs, rep.max_phi_two, rep.main_bound, rep.closure_residual, "closed_form")
        report.check("lower_le_upper", inputs, rep.w_lower, rep.w_upper_coarse,
                     max(0.0, rep.w_lower - rep.w_upper_coarse), "closed_form")
        report.check("within_main_bound", inputs, d.phi_two, rep.main_bound,
                     max(0.0, d.phi_two - rep.main_bound), "closed_form")
        report.check("anderson", inputs, d.lam_length, rep.anderson_bound,
                     max(0.0, d.lam_length - rep.anderson_bound), "closed_form")
        report.rows.append(rep.row())


def cmd_sweep(args, report: Report) -> None:
    Ls = parse_range(args.L, "--L")
    phis = parse_range(args.phi_inf, "--phi-inf")
    rows = bound_sweep([float(v) for v in Ls], [float(v) for v in phis], chi=args.chi)
    report.rows.extend(rows)
    for row in rows:
        inputs = {"L": row["L"], "phi_inf": row["phi_inf"]}
        report.check("closure", inputs, row["max_phi_two"], row["main_bound"], row["closure_residual"],
                     "closed_form")
        if row["phi_inf"] == 1.5:
            report.check("nehari_line", inputs, row["main_bound"], row["nehari_bound"],
                         abs(row["main_bound"] - row["nehari_bound"]), "closed_form")
        if row["L"] == 0.0:
            worst = max(abs(row["main_bound"]), abs(row["nehari_bound"]), abs(row["max_phi_two"]))
            report.check("zero_length", inputs, worst, 0.0, worst, "closed_form")
    grid = np.array([r["main_bound"] for r in rows]).reshape(len(phis), len(Ls))
    if len(Ls) > 1:
        drop = max(0.0, -float(np.diff(grid, axis=1).min()))
        report.check("monotone_in_L", {"chi": args.chi}, drop, 0.0, drop, "closed_form")
    if len(phis) > 1:
        drop = max(0.0, -float(np.diff(grid, axis=0).min()))
        report.check("monotone_in_phi_inf", {"chi": args.chi}, drop, 0.0, drop, "closed_form")


COMMANDS = {
    "verify-identities": cmd_verify_identities,
    "epstein-sample": cmd_epstein_sample,
    "dome": cmd_dome,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for random sampling (default 0)")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override a tolerance; repeatable")
    common.add_argument("--out", help="CSV data file, or JSON report when the name ends in .json")
    common.add_argument("--quiet", action="store_true", help="print only the summary line")

    parser = argparse.ArgumentParser(prog="epsteinlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-identities", parents=[common], help="Epstein flow identities on a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--grid", type=int, help="number of sample points (default 20)")

    p = sub.add_parser("epstein-sample", parents=[common], help="Epstein points of a scene's hyperbolic metric")
    p.add_argument("--scene", required=True)
    p.add_argument("--grid", type=int, help="number of sample points (default 100)")
    p.add_argument("--times", help="comma-separated flow times (default 0)")

    p = sub.add_parser("dome", parents=[common], help="projective metric of two disks against the dome")
    p.add_argument("--scene", required=True)
    p.add_argument("--grid", type=int, help="number of sample points (default 12)")

    p = sub.add_parser("bounds", parents=[common], help="inequality chain for projective descriptors")
    p.add_argument("--descriptors", required=True)

    p = sub.add_parser("sweep", parents=[common], help="bound surfaces over an (L, phi_inf) grid")
    p.add_argument("--L", default="0:10:41", help="range a:b:n (default 0:10:41)")
    p.add_argument("--phi-inf", default="0:3:13", help="range a:b:n (default 0:3:13)")
    p.add_argument("--chi", type=int, default=-2, help="Euler characteristic (default -2)")
    return parser


def run(args) -> Report:
    tolerances = parse_tolerances(args.tol)
    if getattr(args, "grid", None) is not None and args.grid < 1:
        raise UsageError("--grid must be positive")
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("tol", "quiet", "out")}
    report = Report(args.command, tolerances, config)
    COMMANDS[args.command](args, report)
    return report


def print_summary(report: Report, quiet: bool, stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    if not quiet:
        tol = ", ".join(f"{k}={v:g}" for k, v in report.tolerances.items())
        print(f"epsteinlab {report.command}  tolerances: {tol}", file=stream)
        failed = [c for c in report.checks if not c.passed]
        for c in failed[:20]:
            print(f"FAIL {c.name} {json.dumps(c.inputs, sort_keys=True)} residual={c.residual:.3e}", file=stream)
        if len(failed) > 20:
            print(f"... {len(failed) - 20} more failures", file=stream)
    s = report.summary
    status = "PASS" if report.ok else "FAIL"
    extra = " (no checks ran)" if s["total"] == 0 else ""
    print(f"{status}: {s['passed']}/{s['total']} checks passed, {s['failed']} failed{extra}", file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedSceneError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    write_outputs(report, args.out)
    print_summary(report, args.quiet)
    return EXIT_OK if report.ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
