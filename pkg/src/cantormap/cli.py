"""Command line around the construction, map, series, and gauges.

Every subcommand shares one flag vocabulary, emits CSV or a JSON
document {params, results, checks}, and is deterministic: the same
flags (seed included) produce byte-identical output.  Exit codes:
0 success, 1 failed verification, 2 bad arguments or domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import p_threshold, series_terms
from .construction import (
    DEFAULT_CELL_CAP,
    MIN_LEVEL,
    ConstructionParams,
    EnumerationCapError,
    enumerate_cells,
    image_side,
    image_square,
    preimage_side,
    preimage_square,
    validate_geometry,
)
from .mapping import fields_batch
from .measure import mass_distribution_bound, threshold_scan
from .render import render_svg
from .verify import run_verification

_COMMANDS = ("construct", "map", "series", "measure", "verify", "render")


def _add_common(sp: argparse.ArgumentParser, fmt_default: str, samples_default: int) -> None:
    sp.add_argument("--sigma", type=float, default=0.45, help="pre-image contraction, in (0, 1/2)")
    sp.add_argument("--beta", type=float, default=2.0, help="image-side log haircut exponent, > 0")
    sp.add_argument("--depth", type=int, default=6, help="working level / truncation depth")
    sp.add_argument("--p", type=float, default=0.5, help="sub-exponential gauge exponent")
    sp.add_argument(
        "--gauge-beta",
        type=float,
        nargs="+",
        default=[1.0, 2.0, 4.0],
        help="gauge exponents beta' for covering-sum scans",
    )
    sp.add_argument("--k-min", type=int, default=1000, help="smallest level of level sweeps")
    sp.add_argument("--k-max", type=int, default=1000000, help="largest level of level sweeps")
    sp.add_argument("--seed", type=int, default=0x5EED, help="seed for all sampling")
    sp.add_argument("--samples", type=int, default=samples_default, help="sample count (mesh lines for render)")
    sp.add_argument("--tol", type=float, default=None, help="override the series verdict margin")
    sp.add_argument("--format", choices=("csv", "json"), default=fmt_default, help="output format")
    sp.add_argument("--out", default="-", help="output path, - for stdout")
    sp.add_argument("--cap", type=int, default=DEFAULT_CELL_CAP, help="cell enumeration cap")
    sp.add_argument(
        "--debug-literal-radii",
        action="store_true",
        help="run with the rejected literal image radii (breaks gluing; for demonstration)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantormap",
        description="planar Cantor families joined by a sup-norm stretch map",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("construct", help="emit the level-k cells of the construction")
    _add_common(sp, "csv", 10000)
    sp = sub.add_parser("map", help="evaluate the stretch map and its fields at points")
    _add_common(sp, "csv", 10000)
    sp.add_argument("points", nargs="?", default=None, help="CSV of x,y points; default: seeded uniform sample")
    sp = sub.add_parser("series", help="grouped series terms and convergence verdicts")
    _add_common(sp, "csv", 10000)
    sp.add_argument("kind", nargs="?", choices=("tv", "subexp"), default="subexp", help="which series")
    sp = sub.add_parser("measure", help="covering-sum scans and the mass-distribution bound")
    _add_common(sp, "json", 10000)
    sp = sub.add_parser("verify", help="run the pinned acceptance suite")
    _add_common(sp, "json", 10000)
    sp = sub.add_parser("render", help="SVG of the warped mesh and image squares")
    _add_common(sp, "csv", 64)
    return parser


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _params_echo(args: argparse.Namespace) -> dict:
    keys = (
        "command", "sigma", "beta", "depth", "p", "gauge_beta", "k_min",
        "k_max", "seed", "samples", "tol", "format", "out", "cap",
        "debug_literal_radii",
    )
    d = vars(args)
    return {k: d[k] for k in keys if k in d}


def _json_doc(args: argparse.Namespace, results: dict, checks: list) -> str:
    doc = {"params": _params_echo(args), "results": results, "checks": checks}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _make_params(args: argparse.Namespace) -> ConstructionParams:
    return ConstructionParams(args.sigma, args.beta, depth_max=max(args.depth, 60))


def _geometric_levels(k_min: int, k_max: int, num: int) -> list[int]:
    if k_min < MIN_LEVEL:
        raise ValueError(f"--k-min must be at least {MIN_LEVEL}, got {k_min}")
    if k_max < k_min:
        raise ValueError(f"--k-max must be >= --k-min, got {k_max} < {k_min}")
    if k_min == k_max or num < 2:
        return [k_min]
    lo, hi = math.log(k_min), math.log(k_max)
    levels = {round(math.exp(lo + j * (hi - lo) / (num - 1))) for j in range(num)}
    levels.update((k_min, k_max))
    return sorted(levels)


def cmd_construct(args: argparse.Namespace) -> int:
    params = _make_params(args)
    cells = list(enumerate_cells(args.depth, params, cap=args.cap))
    side = preimage_side(args.depth, params)
    if args.format == "csv":
        rows = []
        for addr in cells:
            sq = preimage_square(addr, params)
            rows.append(
                [addr.level, addr.axis_path(0), addr.axis_path(1), sq.center[0], sq.center[1], side]
            )
        _emit(_csv_text(["level", "ax0_path", "ax1_path", "cx", "cy", "side"], rows), args.out)
        return 0
    report = validate_geometry(min(args.depth, 10), params)
    out_cells = []
    for addr in cells:
        pre = preimage_square(addr, params)
        img = image_square(addr, params)
        out_cells.append(
            {
                "level": addr.level,
                "ax0_path": addr.axis_path(0),
                "ax1_path": addr.axis_path(1),
                "pre_center": list(pre.center),
                "image_center": list(img.center),
            }
        )
    results = {
        "level": args.depth,
        "count": len(cells),
        "pre_side": side,
        "image_side": image_side(args.depth, params),
        "cells": out_cells,
    }
    checks = [
        {
            "name": "geometry_invariants",
            "status": "pass" if report.passed else "fail",
            "measured": f"{len(report.violations)} violations in {report.checks_run} checks",
            "target": "0 violations",
        }
    ]
    _emit(_json_doc(args, results, checks), args.out)
    return 0 if report.passed else 1


def _read_points(path: str) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append([float(row[0]), float(row[1])])
            except (ValueError, IndexError):
                if lineno == 1:
                    continue  # header row
                raise ValueError(f"bad point at {path}:{lineno}: {row!r}")
    if not rows:
        raise ValueError(f"no points found in {path}")
    return np.array(rows)


def cmd_map(args: argparse.Namespace) -> int:
    params = _make_params(args)
    if args.points is not None:
        pts = _read_points(args.points)
    else:
        rng = np.random.default_rng(args.seed)
        pts = rng.random((args.samples, 2))
    f = fields_batch(pts, args.depth, params)
    img, skel = f["image"], f["on_skeleton"]
    if args.format == "csv":
        rows = []
        for i in range(len(pts)):
            if skel[i]:
                dn = jc = kk = ""
            else:
                dn, jc, kk = f["derivative_norm"][i], f["jacobian"][i], f["distortion"][i]
            rows.append(
                [pts[i, 0], pts[i, 1], img[i, 0], img[i, 1], dn, jc, kk, int(skel[i])]
            )
        _emit(_csv_text(["x", "y", "fx", "fy", "dnorm", "jac", "K", "skeleton"], rows), args.out)
        return 0
    out_rows = []
    for i in range(len(pts)):
        on_skel = bool(skel[i])
        out_rows.append(
            {
                "x": pts[i, 0],
                "y": pts[i, 1],
                "fx": img[i, 0],
                "fy": img[i, 1],
                "dnorm": None if on_skel else f["derivative_norm"][i],
                "jac": None if on_skel else f["jacobian"][i],
                "K": None if on_skel else f["distortion"][i],
                "skeleton": on_skel,
                "level": int(f["level"][i]),
            }
        )
    _emit(_json_doc(args, {"rows": out_rows}, []), args.out)
    return 0


def cmd_series(args: argparse.Namespace) -> int:
    params = _make_params(args)
    margin = args.tol if args.tol is not None else 1e-3
    levels = _geometric_levels(args.k_min, args.k_max, num=25)
    diag = series_terms(args.kind, levels, params, p=args.p, margin=margin)
    if args.format == "csv":
        rows = [
            [t.level, t.log_term, r, diag.verdict]
            for t, r in zip(diag.terms, diag.ratios)
        ]
        _emit(_csv_text(["k", "log_term", "ratio", "verdict"], rows), args.out)
        return 0
    results = {
        "kind": diag.kind,
        "p": diag.p,
        "margin": diag.margin,
        "p_threshold": p_threshold(params),
        "limit_ratio": diag.limit_ratio,
        "verdict": diag.verdict,
        "terms": [
            {
                "k": t.level,
                "count_log2": t.count_log2,
                "log_per_frame": t.log_per_frame,
                "log_term": t.log_term,
                "ratio": r,
            }
            for t, r in zip(diag.terms, diag.ratios)
        ],
    }
    _emit(_json_doc(args, results, []), args.out)
    return 0


def cmd_measure(args: argparse.Namespace) -> int:
    params = _make_params(args)
    decades = int(round(math.log10(max(args.k_max, args.k_min) / args.k_min))) + 1
    levels = _geometric_levels(args.k_min, args.k_max, num=max(decades, 2))
    table = threshold_scan(args.gauge_beta, levels, params)
    checks = []
    for bp in sorted(table.verdicts):
        if bp < params.beta:
            want = "decreasing"
        elif bp == params.beta:
            want = "stationary"
        else:
            want = "growing"
        got = table.verdicts[bp]
        checks.append(
            {
                "name": f"scan[beta_prime={bp}]",
                "status": "pass" if got == want else "fail",
                "measured": got,
                "target": want,
            }
        )
    if args.format == "csv":
        rows = [
            [row.beta_prime, row.level, row.log_sum, table.verdicts[row.beta_prime]]
            for row in table.rows
        ]
        _emit(_csv_text(["beta_prime", "k", "log_sum", "verdict"], rows), args.out)
        return 0
    rep = mass_distribution_bound(params, k_max=args.k_max)
    results = {
        "m": rep.m,
        "at_k": rep.at_k,
        "lower_bound": rep.lower_bound,
        "first_admissible_k": rep.first_admissible_k,
    }
    _emit(_json_doc(args, results, checks), args.out)
    return 0 if all(c["status"] == "pass" for c in checks) else 1


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(seed=args.seed, literal=args.debug_literal_radii)
    if args.format == "csv":
        rows = [
            [c.criterion, c.name, c.status, c.measured, c.target]
            for c in report.checks
        ]
        _emit(_csv_text(["criterion", "name", "status", "measured", "target"], rows), args.out)
    else:
        results = {
            "passed": report.passed,
            "total": len(report.checks),
            "failed": sum(1 for c in report.checks if not c.passed),
        }
        _emit(_json_doc(args, results, [asdict(c) for c in report.checks]), args.out)
    return 0 if report.passed else 1


def cmd_render(args: argparse.Namespace) -> int:
    params = _make_params(args)
    svg = render_svg(params, depth=args.depth, grid=args.samples, cap=args.cap)
    _emit(svg, args.out)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "construct": cmd_construct,
        "map": cmd_map,
        "series": cmd_series,
        "measure": cmd_measure,
        "verify": cmd_verify,
        "render": cmd_render,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
