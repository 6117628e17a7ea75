"""Command-line entry point: ``qkcmap {suite, sweep, spectrum}``.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
errors.  Reports are JSON (suite, spectrum) or CSV (sweep).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import GeometryError
from .geometries import fs_higher, fs_uhm
from .invariants import curvature_report, injectivity_scan
from .parallel import point_map
from .suites import CASES, run_checks

MAX_TOL = 1e-2


@dataclass(frozen=True)
class SuiteConfig:
    case: str
    k: int = 1
    c: float = 0.0
    samples: int = 30
    seed: int = 0
    tol: float = 1e-9
    out: Optional[str] = None

    def validate(self) -> None:
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}")
        if self.samples < 10:
            raise ValueError("--samples must be >= 10")
        if not (0.0 < self.tol <= MAX_TOL):
            raise ValueError(f"--tol must lie in (0, {MAX_TOL}]")
        if not (self.c >= 0.0 and math.isfinite(self.c)):
            raise ValueError("--c must be a finite non-negative number")
        if self.k < 0:
            raise ValueError("--k must be >= 0")
        if self.case == "higher" and self.k < 1:
            raise ValueError("case 'higher' needs --k >= 1")


def run_suite(cfg: SuiteConfig) -> tuple[dict, int]:
    """Run the battery for ``cfg``; returns the report document and the exit status."""
    cfg.validate()
    t0 = time.perf_counter()
    records = run_checks(cfg.case, cfg.k, cfg.c, cfg.samples, cfg.seed, cfg.tol)
    elapsed = time.perf_counter() - t0
    overall = all(r.passed for r in records)
    doc = {
        "case": {key: val for key, val in asdict(cfg).items() if key != "out"},
        "checks": [r.to_json() for r in records],
        "pass": overall,
        "engine_version": __version__,
        "timing": {"seconds": round(elapsed, 6)},
    }
    return doc, 0 if overall else 1


def _metric_case(family: str, k: int, c: float):
    return fs_uhm(c) if family == "uhm" else fs_higher(k, c)


def sweep_rows(family: str, k: int, c: float, grid: np.ndarray) -> tuple[list[str], list[list[float]]]:
    case = _metric_case(family, k, c)
    rep = injectivity_scan(case, grid, mapper=point_map)
    header = ["rho", "norm_R2_computed", "norm_R2_closed_form"]
    if family == "uhm":
        header += ["lambda_1", "lambda_2", "lambda_3"]
    header.append("scal")
    rows = []
    for i, rho in enumerate(rep.rho):
        row = [rho, rep.norm_R2[i], rep.reference[i]]
        if family == "uhm":
            row += list(rep.eigenvalues[i])
        row.append(rep.scal[i])
        rows.append(row)
    return header, rows


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def write_json(path, doc) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qkcmap", description="HK/QK c-map verification engine")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("suite", help="run an invariant battery and write a JSON report")
    s.add_argument("--case", required=True, choices=CASES)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--c", type=float, default=0.0)
    s.add_argument("--samples", type=int, default=30)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out", default=None, help="JSON report path (default: stdout)")

    w = sub.add_parser("sweep", help="curvature norm along a rho grid, written as CSV")
    w.add_argument("--case", required=True, choices=("uhm", "higher"))
    w.add_argument("--k", type=int, default=1)
    w.add_argument("--c", type=float, default=0.0)
    w.add_argument("--rho-min", type=float, default=0.5)
    w.add_argument("--rho-max", type=float, default=5.0)
    w.add_argument("--points", type=int, default=200)
    w.add_argument("--out", default=None, help="CSV path (default: stdout)")

    q = sub.add_parser("spectrum", help="curvature-operator spectrum at one point")
    q.add_argument("--case", required=True, choices=("uhm", "higher"))
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--c", type=float, default=0.0)
    q.add_argument("--rho", type=float, default=1.0)
    q.add_argument("--out", default=None)
    return p


def _check_metric_args(parser, args) -> None:
    if not (args.c >= 0.0 and math.isfinite(args.c)):
        parser.error("--c must be a finite non-negative number")
    if args.case == "higher" and args.k < 1:
        parser.error("case 'higher' needs --k >= 1")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "suite":
        cfg = SuiteConfig(args.case, args.k, args.c, args.samples, args.seed, args.tol, args.out)
        try:
            cfg.validate()
        except ValueError as exc:
            parser.error(str(exc))
        doc, status = run_suite(cfg)
        write_json(cfg.out, doc)
        for rec in doc["checks"]:
            flag = "PASS" if rec["pass"] else "FAIL"
            print(f"[{flag}] {rec['name']}: {rec['max_residual']:.3e} ({rec['bound']} {rec['tol']:.1e})", file=sys.stderr)
        return status
    _check_metric_args(parser, args)
    if args.command == "sweep":
        if args.points < 10:
            parser.error("--points must be >= 10")
        if not (0.0 < args.rho_min < args.rho_max):
            parser.error("need 0 < --rho-min < --rho-max")
        grid = np.linspace(args.rho_min, args.rho_max, args.points)
        try:
            header, rows = sweep_rows(args.case, args.k, args.c, grid)
        except GeometryError as exc:
            print(f"sweep failed: {exc}", file=sys.stderr)
            return 1
        write_csv(args.out, header, rows)
        return 0
    if args.rho <= 0:
        parser.error("--rho must be positive")
    case = _metric_case(args.case, args.k, args.c)
    try:
        rep = curvature_report(case, case.base_point(args.rho))
    except GeometryError as exc:
        print(f"spectrum failed: {exc}", file=sys.stderr)
        return 1
    write_json(
        args.out,
        {
            "case": {"family": args.case, "k": args.k if args.case == "higher" else 0, "c": args.c, "rho": args.rho},
            "spectrum": [{"eigenvalue": lam, "multiplicity": mu} for lam, mu in rep.spectrum],
            "norm_R2": rep.norm_R2,
            "scal": rep.scal,
            "einstein_residual": rep.einstein_residual,
            "engine_version": __version__,
        },
    )
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
