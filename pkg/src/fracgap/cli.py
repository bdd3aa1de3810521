"""Command-line front end: single computations, the verification suite, and
the canonical experiments, with JSON/CSV reports.

Exit codes: 0 success, 1 failed verdict, 2 usage error, 3 numerical failure.
Every subcommand is deterministic given its full configuration (including
the seed), so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bounds, geometry
from .constants import (
    StableParams,
    ball_exit_constant,
    ball_exit_time_exact,
    bound_constants,
    lambda1_upper_ball,
)
from .geometry import Ball, BallUnion, Box, Domain, IntervalUnion, load_mask
from .operator import AssemblyError, SolveError, assemble, exit_time
from .spectra import export_eigenpairs_csv, level_set_report
from .montecarlo import PathBudgetError, StableSamplerConfig, estimate_exit, survival_log_slope

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

CLI_ALPHA_RANGE = (0.3, 1.7)  # outside this the self-cell correction degrades


class UsageError(ValueError):
    pass


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 2.0:
        raise UsageError(f"alpha must lie in (0, 2), got {alpha}")
    if not CLI_ALPHA_RANGE[0] <= alpha <= CLI_ALPHA_RANGE[1]:
        warnings.warn(
            f"alpha = {alpha} is outside the recommended range {CLI_ALPHA_RANGE}; "
            "the near-diagonal correction degrades toward alpha = 2",
            stacklevel=2,
        )
    return alpha


def parse_domain(text: str) -> Domain:
    """Parse a --domain value: interval:a,b | intervals:a,b;c,d | box:x0,y0,x1,y1 |
    ball:c...,r | balls:c...,r;c...,r | mask:path."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise UsageError(f"bad domain {text!r}; expected kind:params")
    try:
        if kind == "interval":
            a, b = (float(t) for t in rest.split(","))
            return geometry.interval(a, b)
        if kind == "intervals":
            ivs = tuple(tuple(float(t) for t in piece.split(",")) for piece in rest.split(";"))
            return IntervalUnion(ivs)  # type: ignore[arg-type]
        if kind == "box":
            vals = [float(t) for t in rest.split(",")]
            if len(vals) == 2:
                return Box((vals[0],), (vals[1],))
            if len(vals) == 4:
                return Box((vals[0], vals[1]), (vals[2], vals[3]))
            raise UsageError("box needs 2 numbers (1D) or 4 numbers (2D)")
        if kind == "ball":
            vals = [float(t) for t in rest.split(",")]
            if len(vals) == 2:
                return Ball((vals[0],), vals[1])
            if len(vals) == 3:
                return Ball((vals[0], vals[1]), vals[2])
            raise UsageError("ball needs center coordinates then radius")
        if kind == "balls":
            balls = []
            for piece in rest.split(";"):
                vals = [float(t) for t in piece.split(",")]
                if len(vals) == 2:
                    balls.append(Ball((vals[0],), vals[1]))
                elif len(vals) == 3:
                    balls.append(Ball((vals[0], vals[1]), vals[2]))
                else:
                    raise UsageError("each ball needs center coordinates then radius")
            return BallUnion(tuple(balls))
        if kind == "mask":
            return load_mask(rest)
    except UsageError:
        raise
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad domain {text!r}: {exc}") from exc
    raise UsageError(f"unknown domain kind {kind!r}")


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """Layer values: defaults, then a JSON config file, then explicit flags."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config!r}: {exc}") from exc
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg.get("out") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(obj: dict, path: Path | None = None) -> None:
    text = json.dumps(obj, indent=2)
    print(text)
    if path is not None:
        path.write_text(text + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args: argparse.Namespace) -> int:
    cfg = _merge_config(args, {"alpha": 1.0, "dim": 1, "out": None})
    p = StableParams(_check_alpha(float(cfg["alpha"])), int(cfg["dim"]))
    c = bound_constants(p)
    report = {
        "kind": "constants_report",
        "alpha": p.alpha,
        "d": p.d,
        "a_norm": c.a_norm,
        "c_sup": c.c_sup,
        "c_gap_stated": c.c_gap_stated,
        "c_gap_derived": c.c_gap_derived,
        "c_var": c.c_var,
        "s_ball_center": c.s_ball_center,
        "ball_bound_r1": lambda1_upper_ball(p, 1.0),
    }
    path = _out_dir(cfg) / "constants.json" if cfg["out"] else None
    _emit(report, path)
    return EXIT_OK


def _level_set_json(rep) -> dict:
    return {
        "kind": "level_set_report",
        "sup_phi1": rep.sup_phi1,
        "size": int(len(rep.node_indices)),
        "measure": rep.measure,
        "sup_exit": rep.sup_exit,
        "sandwich": rep.sandwich,
        "sup_bound_rhs": rep.sup_bound_rhs,
        "sup_bound_ok": rep.sup_bound_ok,
        "volume_lower_rhs": rep.volume_lower_rhs,
        "volume_bound_ok": rep.volume_bound_ok,
    }


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "domain": None,
            "alpha": 1.0,
            "h": None,
            "k": 6,
            "out": None,
            "label": None,
            "prop_slack": bounds.PROP_SLACK_PER_H,
        },
    )
    if cfg["domain"] is None or cfg["h"] is None:
        raise UsageError("solve requires --domain and --h")
    domain = parse_domain(cfg["domain"]) if isinstance(cfg["domain"], str) else cfg["domain"]
    alpha = _check_alpha(float(cfg["alpha"]))
    p = StableParams(alpha, geometry.dimension(domain))
    grid, op, sol = bounds.solve_domain(domain, alpha, float(cfg["h"]), k=int(cfg["k"]))
    label = cfg["label"] or str(cfg["domain"]).partition(":")[0]
    report = bounds.build_report(sol, domain, p, label, float(cfg["prop_slack"]))
    lrep = level_set_report(sol, op)
    out = _out_dir(cfg)
    eig_path = out / "eigenpairs.csv"
    export_eigenpairs_csv(sol, op, eig_path)
    files = {"eigenpairs": str(eig_path)}
    bound_path = out / "bound_report.json"
    bound_path.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    files["bound_report"] = str(bound_path)
    ls_path = out / "level_set.json"
    ls_path.write_text(json.dumps(_level_set_json(lrep), indent=2) + "\n")
    files["level_set"] = str(ls_path)
    _emit(
        {
            "kind": "solve_report",
            "bound_report": report.to_json_dict(),
            "level_set": _level_set_json(lrep),
            "files": files,
        }
    )
    return EXIT_OK


def _exact_center_value(domain: Domain, p: StableParams) -> float | None:
    """Exact max exit time when the domain is a ball (or a single interval)."""
    if isinstance(domain, Ball):
        return ball_exit_time_exact(p, domain.radius, domain.center)
    if isinstance(domain, IntervalUnion) and len(domain.intervals) == 1:
        a, b = domain.intervals[0]
        return ((b - a) / 2.0) ** p.alpha * ball_exit_constant(p)
    return None


def cmd_exit_time(args: argparse.Namespace) -> int:
    cfg = _merge_config(args, {"domain": None, "alpha": 1.0, "h": None, "out": None})
    if cfg["domain"] is None or cfg["h"] is None:
        raise UsageError("exit-time requires --domain and --h")
    domain = parse_domain(cfg["domain"])
    alpha = _check_alpha(float(cfg["alpha"]))
    p = StableParams(alpha, geometry.dimension(domain))
    grid = geometry.rasterize(domain, float(cfg["h"]))
    op = assemble(grid, alpha)
    field = exit_time(op)
    out = _out_dir(cfg)
    csv_path = out / "exit_time.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", *(f"x{k+1}" for k in range(op.d)), "s"])
        for i in range(op.n):
            writer.writerow(
                [i, *(repr(float(c)) for c in op.centers[i]), repr(float(field.values[i]))]
            )
    exact = _exact_center_value(domain, p)
    max_s = float(field.values.max())
    _emit(
        {
            "kind": "exit_time_report",
            "alpha": alpha,
            "d": p.d,
            "h": float(cfg["h"]),
            "n": op.n,
            "max_exit_time": max_s,
            "exact_center_value": exact,
            "center_rel_err": None if exact is None else abs(max_s - exact) / exact,
            "files": {"exit_time": str(csv_path)},
        }
    )
    return EXIT_OK


def cmd_suite(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "alphas": "0.5,1.0,1.5",
            "h1d": 0.005,
            "h2d": 0.05,
            "k": 6,
            "workers": 1,
            "variant": "derived",
            "separations": "4,8,16,32",
            "two_ball_h": 0.02,
            "prop_slack": bounds.PROP_SLACK_PER_H,
            "out": None,
        },
    )
    alphas = [(_check_alpha(float(t))) for t in str(cfg["alphas"]).split(",")]
    if cfg["variant"] not in ("stated", "derived"):
        raise UsageError("variant must be 'stated' or 'derived'")
    reports = bounds.run_suite(
        alphas=alphas,
        h1d=float(cfg["h1d"]),
        h2d=float(cfg["h2d"]),
        k=int(cfg["k"]),
        workers=int(cfg["workers"]),
        prop_slack_per_h=float(cfg["prop_slack"]),
    )
    seps = [float(t) for t in str(cfg["separations"]).split(",")]
    tb_alpha = 1.0 if 1.0 in alphas else alphas[0]
    two_ball = bounds.two_ball_experiment(seps, StableParams(tb_alpha, 1), float(cfg["two_ball_h"]))
    gate = "thm2_" + cfg["variant"]
    passed = all(
        r.verdicts["thm1"] and r.verdicts[gate] and r.verdicts["prop"] for r in reports
    ) and all(l <= g for l, g in zip(two_ball.lower_bounds, two_ball.gaps))
    out = _out_dir(cfg)
    csv_path = out / "suite.csv"
    bounds.write_suite_csv(reports, csv_path)
    json_path = out / "suite.json"
    report = {
        "kind": "suite_report",
        "passed": bool(passed),
        "asserted_variant": cfg["variant"],
        "reports": [r.to_json_dict() for r in reports],
        "two_ball": two_ball.to_json_dict(),
        "files": {"csv": str(csv_path), "json": str(json_path)},
    }
    json_path.write_text(json.dumps(report, indent=2) + "\n")
    _emit(report)
    return EXIT_OK if passed else EXIT_VERDICT


def cmd_two_ball(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {"separations": "4,8,16,32", "alpha": 1.0, "dim": 1, "h": 0.02, "out": None},
    )
    seps = [float(t) for t in str(cfg["separations"]).split(",")]
    p = StableParams(_check_alpha(float(cfg["alpha"])), int(cfg["dim"]))
    res = bounds.two_ball_experiment(seps, p, float(cfg["h"]))
    out = _out_dir(cfg) if cfg["out"] else None
    if out is not None:
        csv_path = out / "two_ball.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["separation", "gap", "lambda1", "upper_bound", "lower_bound", "reference_decay"])
            for row in zip(res.separations, res.gaps, res.lambda1s, res.upper_bounds, res.lower_bounds, res.reference_decay):
                writer.writerow([repr(v) for v in row])
    _emit(res.to_json_dict(), out / "two_ball.json" if out is not None else None)
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "domain": None,
            "alpha": 1.0,
            "x0": None,
            "delta": 1e-3,
            "paths": 10000,
            "seed": 1,
            "grid_h": None,
            "out": None,
        },
    )
    if cfg["domain"] is None:
        raise UsageError("mc requires --domain")
    domain = parse_domain(cfg["domain"])
    d = geometry.dimension(domain)
    alpha = _check_alpha(float(cfg["alpha"]))
    sampler = StableSamplerConfig(
        alpha=alpha, d=d, delta=float(cfg["delta"]), seed=int(cfg["seed"]), paths=int(cfg["paths"])
    )
    if cfg["x0"] is None:
        _, x0 = geometry.inscribed_radius(domain)
    else:
        x0 = np.array([float(t) for t in str(cfg["x0"]).split(",")])
    est = estimate_exit(sampler, domain, x0)
    try:
        slope = survival_log_slope(est)
    except ValueError:
        slope = None
    grid_h = cfg["grid_h"]
    if grid_h is None and d == 1:
        grid_h = 0.005
    grid_lambda1 = grid_exit = None
    if grid_h is not None:
        grid, op, sol = bounds.solve_domain(domain, alpha, float(grid_h), k=2)
        grid_lambda1 = float(sol.lambdas[0])
        node = int(np.argmin(np.sum((op.centers - x0) ** 2, axis=1)))
        grid_exit = float(exit_time(op).values[node])
    out = _out_dir(cfg)
    surv_path = out / "survival.csv"
    with open(surv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "survival", "ci"])
        for t, s, ci in zip(est.ts, est.survival, est.survival_ci):
            writer.writerow([repr(float(t)), repr(float(s)), repr(float(ci))])
    report = {
        "kind": "mc_report",
        "alpha": alpha,
        "d": d,
        "delta": sampler.delta,
        "paths": sampler.paths,
        "seed": sampler.seed,
        "mean_exit_time": est.mean_exit_time,
        "ci_halfwidth": est.ci_halfwidth,
        "survival_log_slope": slope,
        "grid_lambda1": grid_lambda1,
        "grid_mean_exit_at_start": grid_exit,
        "mc_vs_grid_exit_delta": None if grid_exit is None else est.mean_exit_time - grid_exit,
        "mc_slope_vs_grid_lambda1": None
        if (grid_lambda1 is None or slope is None)
        else abs(-slope - grid_lambda1) / grid_lambda1,
        "files": {"survival": str(surv_path)},
    }
    json_path = out / "mc_report.json"
    json_path.write_text(json.dumps(report, indent=2) + "\n")
    _emit(report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracgap",
        description="Killed stable process toolkit: spectra, exit times, and bound verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="JSON file with defaults; flags override")
        sp.add_argument("--out", help="output directory for report files")

    sp = sub.add_parser("constants", help="closed-form constants for (alpha, d)")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--dim", type=int)
    add_common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("solve", help="eigenpairs plus bound and level-set reports")
    sp.add_argument("--domain")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--h", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--label")
    sp.add_argument("--prop-slack", dest="prop_slack", type=float)
    add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("exit-time", help="expected exit time field")
    sp.add_argument("--domain")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--h", type=float)
    add_common(sp)
    sp.set_defaults(func=cmd_exit_time)

    sp = sub.add_parser("suite", help="full verification suite plus decay experiment")
    sp.add_argument("--alphas")
    sp.add_argument("--h1d", type=float)
    sp.add_argument("--h2d", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--variant", choices=("stated", "derived"))
    sp.add_argument("--separations")
    sp.add_argument("--two-ball-h", dest="two_ball_h", type=float)
    sp.add_argument("--prop-slack", dest="prop_slack", type=float)
    add_common(sp)
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("two-ball", help="gap decay across two separating components")
    sp.add_argument("--separations")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--h", type=float)
    add_common(sp)
    sp.set_defaults(func=cmd_two_ball)

    sp = sub.add_parser("mc", help="Monte Carlo exit-time estimate with survival table")
    sp.add_argument("--domain")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--x0")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--paths", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--grid-h", dest="grid_h", type=float)
    add_common(sp)
    sp.set_defaults(func=cmd_mc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AssemblyError, SolveError, PathBudgetError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # UsageError, bad domain/mask/config values, too-coarse grids
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
