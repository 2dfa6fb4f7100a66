"""Command-line front end.

Subcommands: ``include`` computes inclusion sets and writes report JSON,
region CSV, and SVG figures; ``converge`` runs Hausdorff convergence
studies; ``verify`` runs the randomized containment suite.

Exit codes: 0 success, 2 usage/config error, 3 numeric failure.  All
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import inclusion as inc
from . import pseudospec as ps
from .corpus import build_corpus, verify_containment
from .errors import SpecinclError
from .ingest import load_matrix
from .matrixcore import make_view, resolve_partition
from .penalty import eps_pi, eps_tau, eps_tau1, PenaltyParams
from .toeplitz import (
    convergence_study,
    jordan,
    jordan_symbol,
    laplacian,
    laplacian_symbol,
    spec_from_json,
)
from .viz import render_svg


class UsageError(Exception):
    pass


def _parse_complex(text: str) -> complex:
    t = text.strip().replace("i", "j")
    if t in ("j", "+j"):
        t = "1j"
    if t == "-j":
        t = "-1j"
    try:
        return complex(t)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def _parse_eps_list(text: str) -> list[float]:
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals or any(v < 0 for v in vals):
        raise UsageError(f"eps list must be nonnegative, got {text!r}")
    return vals


def _parse_grid(text, A, pad, default_nodes=256):
    if text in (None, "auto"):
        return ps.default_grid(A, pad=pad, nx=default_nodes, ny=default_nodes)
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) == 2:
        nx, ny = int(parts[0]), int(parts[1])
        return ps.default_grid(A, pad=pad, nx=nx, ny=ny)
    if len(parts) == 6:
        return ps.GridSpec(float(parts[0]), float(parts[1]), float(parts[2]),
                           float(parts[3]), int(parts[4]), int(parts[5]))
    raise UsageError("grid must be 'auto', 'nx,ny', or "
                     "'re_min,re_max,im_min,im_max,nx,ny'")


def _jobs_default(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("SPECINCL_JOBS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _load_input(args) -> np.ndarray:
    if args.builtin and args.input:
        raise UsageError("give either --input or --builtin, not both")
    if args.builtin:
        if not args.M:
            raise UsageError("--builtin needs --M")
        if args.builtin == "jordan":
            return jordan(args.M)
        if args.builtin == "laplacian":
            return laplacian(args.M)
        raise UsageError(f"unknown builtin {args.builtin!r}")
    if args.input:
        return load_matrix(args.input)
    raise UsageError("an input matrix is required (--input or --builtin)")


def cmd_include(args) -> int:
    A = _load_input(args)
    view = make_view(A, resolve_partition(args.partition, A))
    N = view.block_count

    methods = ([args.method] if args.method != "all"
               else ["tau", "tau1", "pi"])
    needs_n = any(m in ("tau", "pi", "tau1") for m in methods)
    if needs_n:
        if args.n is None:
            raise UsageError("--n is required for tau/pi/tau1 methods")
        if not (1 <= args.n <= N - 1):
            raise UsageError(f"--n must be in 1..{N - 1} for this partition")
    t = None
    if "pi" in methods:
        if args.t is None:
            raise UsageError("--t is required for the pi method")
        t = _parse_complex(args.t)
        if not view.partition.uniform:
            raise UsageError("pi method needs a uniform partition")
    eps_list = _parse_eps_list(args.eps)

    # one shared grid covering the worst inclusion level over the plan
    pad = 0.0
    if needs_n:
        p = inc.penalty_params(view, args.n, args.cnorm_mode)
        worst = max(eps_list)
        for m in methods:
            if m == "tau":
                n_hat = max(1, args.n - 2)
                p_hat = PenaltyParams.from_offdiag(p.r_L, p.r_U, p.c_norm, n_hat)
                pad = max(pad, worst + eps_tau(p_hat))
            elif m == "pi":
                pad = max(pad, worst + eps_pi(p))
            elif m == "tau1":
                pad = max(pad, worst + eps_tau1(p))
    grid = _parse_grid(args.grid, A, pad)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lams = ps.eig(A) if A.shape[0] <= 2000 else None
    jobs = _jobs_default(args.jobs)

    for method in methods:
        for eps in eps_list:
            report = inc.run_method(view, method, n=args.n, t=t, eps=eps,
                                    grid=grid, cnorm_mode=args.cnorm_mode,
                                    jobs=jobs)
            stem = f"{method}_n{args.n or 0}_eps{eps:g}"
            (out_dir / f"{stem}.json").write_text(report.to_json() + "\n",
                                                  encoding="ascii")
            ps.region_to_csv(report.region, out_dir / f"{stem}.csv")
            svg = render_svg(report.region, eigenvalues=lams,
                             title=f"{method}  n={args.n}  eps={eps:g}",
                             timestamp=not args.no_timestamp)
            (out_dir / f"{stem}.svg").write_text(svg, encoding="ascii")
            print(f"wrote {out_dir / stem}.{{json,csv,svg}}")
    return 0


def cmd_converge(args) -> int:
    if args.builtin == "jordan":
        symbol = jordan_symbol()
    elif args.builtin == "laplacian":
        symbol = laplacian_symbol()
    elif args.symbol:
        symbol = spec_from_json(Path(args.symbol).read_text(encoding="ascii"))
    else:
        raise UsageError("a symbol is required (--builtin or --symbol)")
    schedule = []
    for row in args.schedule.split(","):
        row = row.strip()
        if not row:
            continue
        parts = row.split(":")
        if len(parts) != 3:
            raise UsageError(f"schedule rows are M:n:w, got {row!r}")
        schedule.append(tuple(int(x) for x in parts))
    if not schedule:
        raise UsageError("empty schedule")
    eps = float(args.eps)

    result = convergence_study(symbol, eps, schedule,
                               grid_nodes=args.grid_nodes,
                               jobs=_jobs_default(args.jobs))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "convergence.csv"
    csv_path.write_text(result.to_csv(), encoding="ascii")
    verdict = "held" if result.monotone_within_slack else "violated"
    print(f"wrote {csv_path}")
    print(f"decrease-within-slack ({result.slack_cells} cells): {verdict}; "
          f"final d_H = {result.rows[-1].d_h:.6g}")
    return 0


def cmd_verify(args) -> int:
    eps_list = _parse_eps_list(args.eps)
    items = build_corpus(seed=args.seed, count=args.count,
                         orders=(args.order_min, args.order_max))
    scale = 0.5 if args.adversarial else 1.0
    records = verify_containment(items, eps_values=tuple(eps_list),
                                 penalty_scale=scale, max_n=args.max_n)
    violations = [r for r in records if not r.contained]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "verify_report.json"
    doc = {
        "seed": args.seed,
        "count": args.count,
        "orders": [args.order_min, args.order_max],
        "eps": eps_list,
        "penalty_scale": scale,
        "checks": len(records),
        "violations": len(violations),
        "records": [
            {**asdict(r), "t": None if r.t is None else [r.t.real, r.t.imag]}
            for r in records
        ],
    }
    report_path.write_text(json.dumps(doc, sort_keys=True) + "\n",
                           encoding="ascii")
    print(f"wrote {report_path}")
    print(f"{len(records)} checks, {len(violations)} violations")
    return 0 if not violations else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specincl",
        description="Spectral/pseudospectral inclusion sets for finite matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inc = sub.add_parser("include", help="compute inclusion sets")
    p_inc.add_argument("--input", help="matrix file (.mtx/.mm/.csv)")
    p_inc.add_argument("--builtin", choices=["jordan", "laplacian"])
    p_inc.add_argument("--M", type=int, help="order for --builtin")
    p_inc.add_argument("--partition", default="uniform:1",
                       help="size list, uniform:m, or auto-band")
    p_inc.add_argument("--method", default="all",
                       choices=["tau", "pi", "tau1", "gersh", "block-gersh",
                                "all"])
    p_inc.add_argument("--n", type=int)
    p_inc.add_argument("--t", help="unit-modulus complex, pi method only")
    p_inc.add_argument("--eps", default="0", help="comma-separated levels")
    p_inc.add_argument("--grid", default="auto")
    p_inc.add_argument("--cnorm-mode", default="auto",
                       choices=["auto", "exact", "frobenius", "mixed"])
    p_inc.add_argument("--jobs", type=int)
    p_inc.add_argument("--out-dir", default="out")
    p_inc.add_argument("--no-timestamp", action="store_true")
    p_inc.set_defaults(func=cmd_include)

    p_con = sub.add_parser("converge", help="Hausdorff convergence study")
    p_con.add_argument("--builtin", choices=["jordan", "laplacian"])
    p_con.add_argument("--symbol", help="ToeplitzSpec JSON file")
    p_con.add_argument("--eps", default="0.1")
    p_con.add_argument("--schedule", default="",
                       help="comma-separated M:n:w rows")
    p_con.add_argument("--grid-nodes", type=int, default=256)
    p_con.add_argument("--jobs", type=int)
    p_con.add_argument("--out-dir", default="out")
    p_con.set_defaults(func=cmd_converge)

    p_ver = sub.add_parser("verify", help="containment property suite")
    p_ver.add_argument("--seed", type=int, default=1)
    p_ver.add_argument("--count", type=int, default=12)
    p_ver.add_argument("--order-min", type=int, default=6)
    p_ver.add_argument("--order-max", type=int, default=16)
    p_ver.add_argument("--eps", default="0,0.1")
    p_ver.add_argument("--max-n", type=int, default=None)
    p_ver.add_argument("--adversarial", action="store_true",
                       help="halve penalties (negative control)")
    p_ver.add_argument("--jobs", type=int)
    p_ver.add_argument("--out-dir", default="out")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UsageError, SpecinclError) as exc:
        print(f"specincl: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"specincl: numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
