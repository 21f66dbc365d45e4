"""Command-line front end and file schemas.

Subcommands: ``synthesize`` (build an optimal square composite),
``smooth`` (slope-calibrated smoothing of a synthesized file),
``verify`` (recompute diagnostics, exit 0 iff the file's constraints
hold), ``sweep`` (noise sweep with fitted scaling exponent), and
``export`` (CSV/JSON).  Pulse files are JSON; sweep files are CSV with
``#`` comment headers.  Output is deterministic: fixed field order, no
timestamps, full double precision in payloads, 10 significant digits on
the console.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from .errors import CurvePulseError
from .geometry import (
    PiecewiseConstantPulse,
    PulseWaveform,
    SampledPulse,
    closure_defect,
    curve_from_pulse,
    signed_area,
)
from .qsim import fidelity, perturbative_coeffs, propagate, sweep
from .smoothing import calibrate_to_slope, max_slope
from .synthesis import SynthesisSpec, synthesize_pulse, t_min

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def parse_angle(text: str) -> float:
    """Angle in radians, either decimal ("1.047") or a pi fraction
    ("pi", "pi/3", "2pi/3", "3*pi/4")."""
    s = text.strip().lower().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        pass
    m = re.fullmatch(r"(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?", s)
    if not m:
        raise argparse.ArgumentTypeError(
            f"cannot parse angle {text!r}; use radians or a pi fraction like pi/3"
        )
    num = float(m.group(1)) if m.group(1) else 1.0
    den = float(m.group(2)) if m.group(2) else 1.0
    return num * math.pi / den


# ---------------------------------------------------------------------------
# Pulse files


def pulse_file_dict(pulse: PulseWaveform, spec: SynthesisSpec, metadata: dict) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "spec": {"phi": spec.phi, "order": spec.order, "omega_max": spec.omega_max},
    }
    if isinstance(pulse, PiecewiseConstantPulse):
        doc["form"] = "piecewise"
        doc["segments"] = [[d, a] for d, a in pulse.segments]
    else:
        doc["form"] = "sampled"
        doc["t"] = pulse.t.tolist()
        doc["omega"] = pulse.omega.tolist()
    md = {
        "method": metadata.get("method", "square"),
        "smoothing": metadata.get("smoothing"),
        "residuals": metadata.get("residuals"),
        "total_time": pulse.total_time,
        "rotation_angle": pulse.rotation_angle(),
    }
    doc["metadata"] = md
    return doc


def write_pulse_file(path: str, pulse: PulseWaveform, spec: SynthesisSpec,
                     metadata: dict) -> None:
    with open(path, "w") as f:
        json.dump(pulse_file_dict(pulse, spec, metadata), f, indent=2)
        f.write("\n")


def read_pulse_file(path: str):
    """Returns (pulse, spec, metadata)."""
    with open(path) as f:
        doc = json.load(f)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise CurvePulseError(
            f"unsupported schema_version {doc.get('schema_version')!r}"
        )
    spec = SynthesisSpec(**doc["spec"])
    if doc["form"] == "piecewise":
        pulse = PiecewiseConstantPulse(tuple((d, a) for d, a in doc["segments"]))
    elif doc["form"] == "sampled":
        pulse = SampledPulse(np.array(doc["t"]), np.array(doc["omega"]))
    else:
        raise CurvePulseError(f"unknown pulse form {doc['form']!r}")
    return pulse, spec, doc.get("metadata", {})


# ---------------------------------------------------------------------------
# Subcommands


def cmd_synthesize(args) -> int:
    spec = SynthesisSpec(phi=args.phi, order=args.order, omega_max=args.omega_max)
    pulse = synthesize_pulse(spec)
    write_pulse_file(args.out, pulse, spec, {"method": "square"})
    print(f"T_min = {_fmt(t_min(spec))}")
    print("segment  duration      amplitude")
    for i, (d, a) in enumerate(pulse.segments, 1):
        print(f"{i:7d}  {_fmt(d):>12}  {_fmt(a):>12}")
    print(f"wrote {args.out}")
    return 0


def cmd_smooth(args) -> int:
    _, spec, metadata = read_pulse_file(args.in_path)
    if metadata.get("method") != "square":
        raise CurvePulseError("smoothing expects a synthesized square pulse file")
    grid = int(os.environ["DCG_GRID_POINTS"]) if "DCG_GRID_POINTS" in os.environ else None
    report = calibrate_to_slope(args.method, spec, args.slope, grid_points=grid)
    md = {
        "method": args.method,
        "smoothing": {k: v for k, v in report.pulse.meta.items() if k != "method"},
        "residuals": {
            "area": report.residual_area,
            "closure": report.residual_closure,
        },
    }
    write_pulse_file(args.out, report.pulse, spec, md)
    print(f"max_slope = {_fmt(report.max_slope)}")
    print(f"time_overhead = {_fmt(report.time_overhead)}")
    print(f"rotation_angle = {_fmt(report.rotation_angle)}")
    print(f"residual_area = {_fmt(report.residual_area)}")
    print(f"residual_closure = {_fmt(report.residual_closure)}")
    print(f"wrote {args.out}")
    return 0


def _wrapped_angle_error(angle: float, target: float) -> float:
    return abs((angle - target + math.pi) % (2 * math.pi) - math.pi)


def cmd_verify(args) -> int:
    pulse, spec, metadata = read_pulse_file(args.in_path)
    method = metadata.get("method", "square")
    curve = curve_from_pulse(pulse)
    closure = closure_defect(curve)
    area = signed_area(curve, require_closed=False)
    g1, g2 = perturbative_coeffs(pulse)
    rotation = pulse.rotation_angle()
    slope = max_slope(pulse)

    print(f"method = {method}")
    print(f"closure_defect = {_fmt(closure)}")
    print(f"signed_area = {_fmt(area)}")
    print(f"|g1| = {_fmt(abs(g1))}")
    print(f"|g2| = {_fmt(abs(g2))}")
    print(f"rotation_angle = {_fmt(rotation)}")
    print(f"max_amplitude = {_fmt(pulse.max_amplitude)}")
    print(f"max_slope = {_fmt(slope)}")

    checks = []
    angle_err = _wrapped_angle_error(rotation, spec.rotation_angle)
    if method == "square":
        checks.append(("rotation angle", angle_err <= 1e-9))
        checks.append(("amplitude bound", pulse.max_amplitude <= spec.omega_max * (1 + 1e-12)))
        checks.append(("first-order cancellation |g1|", abs(g1) <= 1e-8))
        if spec.order == 2:
            checks.append(("second-order cancellation |g2|", abs(g2) <= 1e-8))
        else:
            print(f"note: |g2| = {_fmt(abs(g2))} (informational; not required at order 1)")
    else:
        checks.append(("rotation angle", angle_err <= 1e-6))
        checks.append(("amplitude bound", pulse.max_amplitude <= spec.omega_max * (1 + 1e-6)))

    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}: {name}")
        ok = ok and passed
    print("verdict: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    pulse, spec, metadata = read_pulse_file(args.in_path)
    if args.points < 8:
        raise CurvePulseError("sweep needs at least 8 points")
    grid = np.geomspace(args.dbeta_min, args.dbeta_max, args.points)
    result = sweep(pulse, grid, spec.phi)
    with open(args.out, "w") as f:
        f.write(f"# pulse: {os.path.basename(args.in_path)} "
                f"method={metadata.get('method', 'square')} "
                f"phi={_fmt(spec.phi)} order={spec.order}\n")
        f.write(f"# fitted_exponent: {_fmt(result.fitted_exponent)}\n")
        f.write(f"# fit_window: [{_fmt(result.fit_window[0])}, "
                f"{_fmt(result.fit_window[1])}]\n")
        f.write("delta_beta,infidelity\n")
        for b, infid in result.points:
            f.write(f"{b!r},{infid!r}\n")
    print(f"fitted_exponent = {_fmt(result.fitted_exponent)}")
    print(f"wrote {args.out}")
    return 0


def cmd_export(args) -> int:
    pulse, spec, metadata = read_pulse_file(args.in_path)
    if args.format == "json":
        write_pulse_file(args.out, pulse, spec, metadata)
    else:
        grid_env = int(os.environ.get("DCG_GRID_POINTS", 0))
        with open(args.out, "w") as f:
            f.write("t,omega\n")
            if isinstance(pulse, PiecewiseConstantPulse):
                n = max(1024, grid_env)
                t = np.linspace(0.0, pulse.total_time, n)
                bounds = pulse.boundaries()
                idx = np.clip(np.searchsorted(bounds, t, side="right") - 1,
                              0, len(pulse.segments) - 1)
                omega = np.array([pulse.segments[i][1] for i in idx])
            else:
                t, omega = pulse.t, pulse.omega
            for ti, oi in zip(t, omega):
                f.write(f"{float(ti)!r},{float(oi)!r}\n")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvepulse",
        description="Synthesize, smooth, and verify noise-cancelling drive pulses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="build a time-optimal square composite")
    p.add_argument("--phi", type=parse_angle, required=True,
                   help="cusp angle in [0, pi]; radians or a pi fraction (pi/3)")
    p.add_argument("--order", type=int, choices=(1, 2), required=True)
    p.add_argument("--omega-max", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("smooth", help="slope-calibrated smoothing of a pulse file")
    p.add_argument("in_path")
    p.add_argument("--method", choices=("cs", "ds"), required=True)
    p.add_argument("--slope", type=float, required=True,
                   help="target peak |d omega/dt|")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("verify", help="recompute diagnostics; exit 0 iff PASS")
    p.add_argument("in_path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="noise sweep with fitted scaling exponent")
    p.add_argument("in_path")
    p.add_argument("--dbeta-min", type=float, required=True)
    p.add_argument("--dbeta-max", type=float, required=True)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="export a pulse file to csv or json")
    p.add_argument("in_path")
    p.add_argument("--format", choices=("csv", "json"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: cannot read {exc.filename}", file=sys.stderr)
        return 2
    except (CurvePulseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
