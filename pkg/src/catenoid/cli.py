"""Command-line front end.

Every command prints a JSON envelope ``{command, inputs, results, meta}``.
Exit codes: 0 ok, 2 usage, 3 numerical failure, 4 I/O, 5 no inner branch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .core import (
    CatenoidError,
    Critical,
    DegenerateInput,
    Dimensionless,
    GridTooCoarse,
    NotInner,
    OutOfRange,
    RingConfig,
    TwoSolutions,
    to_dimensionless,
)
from .existence import (
    CRITICAL_BAND,
    ROOT_TOL,
    Space,
    classify,
    critical_curve,
    critical_distance_from_w,
    critical_w,
    g_inverse,
    phase_grid,
)
from .geometry import area_report, f_critical, goldschmidt_area, metastability_crossover
from .numerics import DEFAULT_GRID_N, EIG_REL_TOL
from .stability import (
    StabilityProblem,
    ground_eigenvalue,
    ratio_family_from_rings,
    ratio_family_path,
    spectrum,
    unstable_mode_exact,
    unstable_mode_perturbative,
)

log = logging.getLogger("catenoid")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO, EXIT_DOMAIN = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _finite(name: str, x: float) -> float:
    if not math.isfinite(x):
        raise UsageError(f"--{name} must be finite")
    return x


def _meta(args, **extra) -> dict:
    meta = {
        "version": __version__,
        "grid": getattr(args, "grid", None),
        "tolerances": {
            "root_rel_tol": getattr(args, "tol", ROOT_TOL),
            "critical_band": getattr(args, "band", CRITICAL_BAND),
            "eigenvalue_rel_tol": EIG_REL_TOL,
        },
    }
    meta.update(extra)
    return meta


def _clean(obj):
    # plain JSON types only; -0.0 printed as 0.0
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return int(obj)
    return float(obj) + 0.0


def _envelope(command: str, inputs: dict, results: dict, meta: dict) -> dict:
    return _clean({"command": command, "inputs": inputs, "results": results, "meta": meta})


def _write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _rings_from_args(args) -> tuple[RingConfig, dict]:
    physical = [args.r1, args.r2, args.d]
    scale_free = [args.xi, args.rho]
    if all(v is not None for v in (args.r1, args.r2, args.d)) and all(v is None for v in scale_free):
        rings = RingConfig(args.r1, args.r2, args.d)
        return rings, {"r1": rings.r1, "r2": rings.r2, "d": rings.d}
    if all(v is not None for v in scale_free) and args.r1 is None and args.r2 is None:
        d = 1.0 if args.d is None else args.d
        params = Dimensionless.from_xi_rho(_finite("xi", args.xi), _finite("rho", args.rho))
        rings = params.to_rings(d)
        return rings, {"xi": params.xi, "rho": params.rho, "d": d}
    raise UsageError("give either --r1 --r2 --d or --xi --rho [--d]")


def _solution_dict(sol) -> dict:
    return {"branch": sol.branch.value, "w": sol.w, "b": sol.b, "a": sol.a}


def _area_dict(rep) -> dict:
    out = {
        "a_catenoid": rep.a_catenoid,
        "a_goldschmidt": rep.a_goldschmidt,
        "difference": rep.difference,
        "branch": rep.branch.value,
    }
    if rep.f_value is not None:
        out["f_value"] = rep.f_value
    return out


def _branches(result) -> list:
    if isinstance(result, TwoSolutions):
        return [result.outer, result.inner]
    if isinstance(result, Critical):
        return [result.solution]
    return []


def cmd_solve(args) -> dict:
    rings, inputs = _rings_from_args(args)
    params = to_dimensionless(rings)
    result = classify(params, rel_tol=args.tol, d=rings.d, band=args.band)
    branches = []
    for sol in _branches(result):
        f_value = f_critical(sol.w) if isinstance(result, Critical) else None
        branches.append(
            {
                **_solution_dict(sol),
                "lambda0": ground_eigenvalue(sol.b, sol.w, args.grid),
                "area": _area_dict(area_report(sol, rings, f_value)),
            }
        )
    results = {
        "classification": result.kind,
        "reflected": bool(getattr(result, "reflected", False)),
        "xi": params.xi,
        "rho": params.rho,
        "branches": branches,
        "goldschmidt_area": goldschmidt_area(rings),
    }
    return _envelope("solve", inputs, results, _meta(args))


def cmd_phase_diagram(args) -> dict:
    space = Space.XI_RHO if args.space == "xi-rho" else Space.BW
    x_steps = args.x_steps if args.x_steps is not None else args.steps
    y_steps = args.y_steps if args.y_steps is not None else args.steps
    bounds = (args.x_min, args.x_max, args.y_min, args.y_max)
    if x_steps < 2 or y_steps < 2:
        raise UsageError("need at least 2 steps per axis")
    if not all(math.isfinite(v) for v in bounds) or min(bounds) < 0:
        raise UsageError("bounds must be finite and non-negative")
    if not (args.x_max > args.x_min and args.y_max > args.y_min):
        raise UsageError("each axis needs max > min")
    if args.format == "csv" and not args.out:
        raise UsageError("--format csv needs --out")
    x_range, y_range = (args.x_min, args.x_max), (args.y_min, args.y_max)
    grid = phase_grid(space, x_range, y_range, (x_steps, y_steps))
    curve = critical_curve(space, x_range, y_range, args.curve_points)

    def records(rows):
        return [
            {"space": r.space.value, "coord1": r.coord1, "coord2": r.coord2, "region": r.region.value}
            for r in rows
        ]

    inputs = {
        "space": space.value,
        "x_range": list(x_range),
        "y_range": list(y_range),
        "steps": [x_steps, y_steps],
        "curve_points": args.curve_points,
    }
    counts = {}
    for r in grid:
        counts[r.region.value] = counts.get(r.region.value, 0) + 1
    results = {"region_counts": dict(sorted(counts.items()))}
    if args.format == "csv":
        header = ("space", "coord1", "coord2", "region")
        as_rows = lambda rows: [(r.space.value, _fmt(r.coord1), _fmt(r.coord2), r.region.value) for r in rows]
        out = Path(args.out)
        curve_path = out.with_name(out.stem + "_curve" + (out.suffix or ".csv"))
        _write_csv(str(out), header, as_rows(grid))
        _write_csv(str(curve_path), header, as_rows(curve))
        results["files"] = {"grid": str(out), "critical_curve": str(curve_path)}
    else:
        results["grid"] = records(grid)
        results["critical_curve"] = records(curve)
    return _envelope("phase-diagram", inputs, results, _meta(args))


def cmd_spectrum(args) -> dict:
    if not (math.isfinite(args.w) and args.w > 0) or not math.isfinite(args.b):
        raise UsageError("--w must be positive and --b finite")
    if args.modes < 1:
        raise UsageError("--modes must be at least 1")
    problem = StabilityProblem.on_interval(args.b, args.w, args.grid)
    modes = spectrum(problem, args.modes, vectors=bool(args.dump_modes))
    if args.dump_modes:
        header = ["v"] + [f"psi_{j}" for j in range(len(modes))]
        rows = [
            [_fmt(v)] + [_fmt(m.values[i]) for m in modes]
            for i, v in enumerate(modes[0].grid)
        ]
        _write_csv(args.dump_modes, header, rows)
    results = {"eigenvalues": [m.eigenvalue for m in modes], "modes": [m.summary() for m in modes]}
    inputs = {"b": args.b, "w": args.w, "modes": args.modes}
    return _envelope("spectrum", inputs, results, _meta(args))


def cmd_unstable(args) -> dict:
    physical = all(v is not None for v in (args.r1, args.r2, args.d))
    perturb = args.b is not None and args.epsilon is not None
    if physical == perturb:
        raise UsageError("give either --r1 --r2 --d or --b --epsilon")
    if physical:
        rings = RingConfig(args.r1, args.r2, args.d)
        inputs = {"r1": rings.r1, "r2": rings.r2, "d": rings.d}
        result = classify(to_dimensionless(rings), rel_tol=args.tol, d=rings.d, band=args.band)
        if not isinstance(result, TwoSolutions):
            raise DomainError(f"{result.kind}: these rings have no inner catenoid")
        b, w = result.inner.b, result.inner.w
        w_c, b_path = ratio_family_from_rings(rings.r1, rings.r2)
        epsilon = w - w_c
    else:
        if not (math.isfinite(args.b) and math.isfinite(args.epsilon)):
            raise UsageError("--b and --epsilon must be finite")
        if not args.epsilon > 0:
            raise DomainError("epsilon must be positive for an inner catenoid")
        inputs = {"b": args.b, "epsilon": args.epsilon}
        b_path = ratio_family_path(args.b)
        w_c = critical_w(args.b)
        epsilon = args.epsilon
        b, w = b_path(epsilon), w_c + epsilon
    if not epsilon > 0:
        raise DomainError("configuration is critical: no inner branch")
    try:
        mode = unstable_mode_exact(b, w, n=args.grid)
    except NotInner as exc:
        raise DomainError(str(exc)) from exc
    pert = unstable_mode_perturbative(b_path, w_c, epsilon)
    if args.dump_mode:
        _write_csv(args.dump_mode, ("v", "psi"), [(_fmt(v), _fmt(p)) for v, p in zip(mode.grid, mode.values)])
    lam0 = ground_eigenvalue(b, w, args.grid)
    results = {
        "b": b,
        "w": w,
        "w_c": w_c,
        "epsilon": epsilon,
        "exact": {
            "k": math.sqrt(mode.k2),
            "k2": mode.k2,
            "beta": mode.beta,
            "eigenvalue": mode.eigenvalue,
            "k_roots": [float(k) for k in mode.k_roots],
        },
        "perturbative": {
            "k2": pert.k2,
            "delta": pert.delta,
            "gamma0": pert.gamma0,
            "gamma": pert.gamma,
            "beta": pert.beta,
        },
        "relative_gap": abs(mode.k2 - pert.k2) / mode.k2,
        "fd_lambda0": lam0,
        "fd_mismatch": abs(mode.eigenvalue - lam0),
    }
    return _envelope("unstable", inputs, results, _meta(args))


def cmd_areas(args) -> dict:
    rings = RingConfig(args.r1, args.r2, args.d)
    inputs = {"r1": rings.r1, "r2": rings.r2, "d": rings.d}
    result = classify(to_dimensionless(rings), rel_tol=args.tol, d=rings.d, band=args.band)
    a_g = goldschmidt_area(rings)
    reports = []
    for sol in _branches(result):
        f_value = f_critical(sol.w) if isinstance(result, Critical) else None
        rep = area_report(sol, rings, f_value)
        reports.append({**_area_dict(rep), "catenoid_smaller": rep.difference < 0})
    big, small = max(rings.r1, rings.r2), min(rings.r1, rings.r2)
    cross = metastability_crossover(small / big, big)
    results = {
        "classification": result.kind,
        "goldschmidt_area": a_g,
        "branches": reports,
        "crossover": {
            "d_star": cross.d_star,
            "d_c": cross.d_c,
            "beyond_crossover": rings.d > cross.d_star,
        },
    }
    return _envelope("areas", inputs, results, _meta(args))


def cmd_critical_distance(args) -> dict:
    if not (args.r1 > 0 and args.r2 > 0 and math.isfinite(args.r1) and math.isfinite(args.r2)):
        raise UsageError("radii must be positive and finite")
    w_c = g_inverse((args.r1 - args.r2) / (args.r1 + args.r2))
    results = {"w_c": w_c, "d_c": critical_distance_from_w(args.r1, args.r2, w_c)}
    return _envelope("critical-distance", {"r1": args.r1, "r2": args.r2}, results, _meta(args))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catenoid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--tol", type=float, default=ROOT_TOL, help="relative root tolerance")
        p.add_argument(
            "--band", type=float, default=CRITICAL_BAND, help="tangency band for Critical"
        )
        if grid:
            p.add_argument("--grid", type=int, default=DEFAULT_GRID_N, help="interior grid points")

    p = sub.add_parser("solve", help="classify rings and report both branches")
    for name in ("r1", "r2", "d", "xi", "rho"):
        p.add_argument(f"--{name}", type=float)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("phase-diagram", help="region labels on a grid plus the critical curve")
    p.add_argument("--space", choices=("xi-rho", "b-w"), required=True)
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=2.0)
    p.add_argument("--y-min", type=float, default=0.0)
    p.add_argument("--y-max", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=50, help="steps on both axes")
    p.add_argument("--x-steps", type=int)
    p.add_argument("--y-steps", type=int)
    p.add_argument("--curve-points", type=int, default=200)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    common(p, grid=False)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of the stability operator")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--dump-modes")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("unstable", help="unstable mode of the inner catenoid")
    for name in ("r1", "r2", "d", "b", "epsilon"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--dump-mode")
    common(p)
    p.set_defaults(func=cmd_unstable)

    p = sub.add_parser("areas", help="catenoid and Goldschmidt areas")
    for name in ("r1", "r2", "d"):
        p.add_argument(f"--{name}", type=float, required=True)
    common(p, grid=False)
    p.set_defaults(func=cmd_areas)

    p = sub.add_parser("critical-distance", help="largest d for given radii")
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    common(p, grid=False)
    p.set_defaults(func=cmd_critical_distance)
    return parser


def load_schema(command: str) -> dict:
    """Published JSON schema of a command's output envelope."""
    name = command.replace("-", "_") + ".schema.json"
    return json.loads(resources.files("catenoid").joinpath("schemas", name).read_text("utf-8"))


def _configure_logging() -> None:
    level = os.environ.get("CATENOID_LOG", "error").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", DEFAULT_GRID_N) < 16:
        parser.error("--grid must be at least 16")
    try:
        envelope = args.func(args)
        text = json.dumps(envelope, indent=2, allow_nan=False)
    except (UsageError, DegenerateInput, GridTooCoarse) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CatenoidError, ArithmeticError, ValueError) as exc:
        log.debug("numerical failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(text + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
