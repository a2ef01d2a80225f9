"""Command-line front end.

Exit codes: 0 success or match, 1 mismatch, 2 invalid input or guard-band
rejection, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from kjplus.kepler import (
    CRITICAL_JACOBI,
    GUARD_BAND,
    Direction,
    InvalidSpecError,
    KeplerConvergenceError,
    TorusOrbitSpec,
    default_samples,
    hill_radii,
    orbit_params,
    rotating_positions,
    sample_orbit,
    tangency_radius,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_MISMATCH, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


def _frac(x: Fraction | int) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _triple(t) -> dict | None:
    if t is None:
        return None
    return {"j_plus": int(t[0]), "j1": _frac(t[1]), "j2": _frac(t[2]) if Fraction(t[2]).denominator != 1 else int(t[2])}


def _dump(obj: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=True)


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _spec(args) -> TorusOrbitSpec:
    return TorusOrbitSpec(args.k, args.l, args.e, Direction.parse(args.direction))


def cmd_invariants(args) -> int:
    from kjplus.invariants import invariant_report

    spec = _spec(args)
    r = invariant_report(spec, args.samples, guard=args.guard)
    match = r.match if args.oracle == "cases" else r.match_layered
    out = {
        "k": spec.k,
        "l": spec.l,
        "e": spec.e,
        "direction": spec.direction.value,
        "regime": r.regime.value,
        "j_plus": r.j_plus,
        "w0": r.w0,
        "j1": _frac(r.j1),
        "j2": r.j2,
        "double_points": r.double_point_count,
        "faces": r.face_count,
        "preimage_components": r.preimage_components,
        "preimage_double_points": r.preimage_double_points,
        "closed_form": _triple(r.closed_form),
        "closed_form_layered": _triple(r.closed_form_layered),
        "oracle": args.oracle,
        "match": bool(match),
    }
    _write(_dump(out), args.output)
    return EXIT_OK if match else EXIT_MISMATCH


def _orbit_csv(spec: TorusOrbitSpec, n: int) -> str:
    p = orbit_params(spec)
    t = p.period * np.arange(n + 1) / n
    z = rotating_positions(t, p)
    z[0] = z[-1] = p.r_min
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "y"])
    for ti, zi in zip(t, z):
        w.writerow([repr(float(ti)), repr(float(zi.real)), repr(float(zi.imag))])
    return buf.getvalue()


def orbit_svg(spec: TorusOrbitSpec, n: int, overlays: set[str], size: int = 600) -> str:
    """Orbit path in a fixed square viewbox, with optional reference overlays."""
    from kjplus.topology import find_double_points

    p = orbit_params(spec)
    curve = sample_orbit(spec, n)
    z = curve.as_complex()
    radii = [p.r_max]
    hill = None
    if "hill" in overlays and p.c < CRITICAL_JACOBI:
        hill = hill_radii(p.c)
        radii.append(hill[0])
    r_inv = tangency_radius(p) if "rinv" in overlays else None
    if r_inv is not None:
        radii.append(r_inv)
    half = 1.1 * max(radii)
    scale = size / (2 * half)

    def xy(w: complex) -> tuple[float, float]:
        return ((w.real + half) * scale, (half - w.imag) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    cx, cy = xy(0j)
    if "rays" in overlays:
        for j in range(2 * spec.k):
            ex, ey = xy(half * 1.5 * np.exp(1j * j * math.pi / spec.k))
            parts.append(f'<line x1="{cx:.2f}" y1="{cy:.2f}" x2="{ex:.2f}" y2="{ey:.2f}" stroke="#bbb" stroke-width="0.5"/>')
    if hill is not None:
        for r in hill:
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r * scale:.2f}" fill="none" stroke="#c44" stroke-dasharray="4 3"/>')
    if r_inv is not None:
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r_inv * scale:.2f}" fill="none" stroke="#48c" stroke-dasharray="2 2"/>')
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, z))
    parts.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1"/>')
    if "doubles" in overlays:
        for d in find_double_points(curve):
            x, y = xy(complex(*d.location))
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#c44"/>')
    parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_orbit(args) -> int:
    spec = _spec(args)
    n = args.samples or default_samples(spec.k, spec.l)
    if args.format == "csv":
        text = _orbit_csv(spec, n)
    elif args.format == "svg":
        text = orbit_svg(spec, n, set(args.overlay or []))
    else:
        p = orbit_params(spec)
        text = _dump(
            {
                "k": spec.k, "l": spec.l, "e": spec.e, "direction": spec.direction.value,
                "E": p.E, "a": p.a, "L": p.L, "r_min": p.r_min, "r_max": p.r_max,
                "period": p.period, "c": p.c, "r_inv": tangency_radius(p),
            }
        )
    _write(text, args.output)
    return EXIT_OK


def cmd_scan(args) -> int:
    from kjplus.homotopy import scan_family

    grid = None
    if args.grid_points:
        grid = np.linspace(0.0, 1.0, args.grid_points + 2)[1:-1]
    events = scan_family(args.k, args.l, grid)
    _write(_dump({"k": args.k, "l": args.l, "events": [ev.as_dict() for ev in events]}), args.output)
    return EXIT_OK


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cmd_validate(args) -> int:
    from kjplus.grid import run_grid

    if args.k_max < 2:
        raise InvalidSpecError("--k-max must be at least 2")
    results = run_grid(args.k_max, args.samples, args.jobs)
    failures = [r for r in results if not r.passed(args.oracle)]
    if args.format == "json":
        rows = [
            {
                "k": r.spec.k, "l": r.spec.l, "e": r.spec.e, "direction": r.spec.direction.value,
                "regime": r.regime, "numeric": _triple(r.numeric), "closed_form": _triple(r.table),
                "closed_form_layered": _triple(r.layered), "pass": r.passed(args.oracle), "error": r.error,
            }
            for r in results
        ]
        _write(_dump({"k_max": args.k_max, "oracle": args.oracle, "cells": rows, "failures": len(failures)}), args.output)
    else:
        lines = [f"{'k':>2} {'l':>2} {'dir':<5} {'e':>7} {'J+':>5} {'J1':>7} {'J2':>5}  {'oracle':<18} status"]
        for r in results:
            s = r.spec
            ref = r.table if args.oracle == "cases" else r.layered
            if r.numeric is None:
                lines.append(f"{s.k:>2} {s.l:>2} {s.direction.value[:5]:<5} {s.e:>7.4f}  ERROR {r.error}")
                continue
            j, a, b = r.numeric
            oracle = "/".join(_fmt(x) for x in ref)
            lines.append(
                f"{s.k:>2} {s.l:>2} {s.direction.value[:5]:<5} {s.e:>7.4f} {j:>5} {_fmt(a):>7} {b:>5}  "
                f"{oracle:<18} {'pass' if r.passed(args.oracle) else 'FAIL'}"
            )
        lines.append(f"{len(results) - len(failures)}/{len(results)} cells pass ({args.oracle} closed forms)")
        for r in failures:
            lines.append(f"failing: ({r.spec.k},{r.spec.l}) {r.spec.direction.value} e={r.spec.e:.6f}")
        _write("\n".join(lines), args.output)
    return EXIT_OK if not failures else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kjplus", description="J+, J1 and J2 of rotating Kepler orbits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def orbit_args(p):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--l", type=int, required=True)
        p.add_argument("--e", type=float, required=True)
        p.add_argument("--direction", default="direct", help="direct or retrograde")
        p.add_argument("--samples", type=int, default=None, help="vertices per orbit (default depends on k, l)")

    def oracle_arg(p):
        p.add_argument(
            "--oracle",
            choices=("cases", "layered"),
            default="cases",
            help="closed forms to compare against: the per-case polynomials, or with J2 from the preimage layer sum",
        )

    p = sub.add_parser("invariants", help="compute J+, J1, J2 for one orbit")
    orbit_args(p)
    oracle_arg(p)
    p.add_argument("--guard", type=float, default=GUARD_BAND)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("orbit", help="emit orbit geometry")
    orbit_args(p)
    p.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
    p.add_argument("--overlay", action="append", choices=("hill", "rays", "rinv", "doubles"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("scan", help="list events along the eccentricity family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("validate", help="check the closed forms on a grid of orbits")
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("table", "json"), default="table")
    oracle_arg(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    from kjplus.invariants import PipelineError
    from kjplus.topology import TopologyError

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (PipelineError, TopologyError, KeplerConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
