"""Command-line front end: problem ingestion, solving, export.

Subcommands: solve, poly, recover, export, ingest-hp.  Specs and reports
are JSON; sample and plot data are CSV.  Angles are radians in [0, 2pi).
Re-running a spec with BEP_THREADS fixed yields a byte-identical report.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from dataclasses import asdict

import numpy as np

from .arcs import ArcSet
from .fourier import Grid, GridFunction
from .poly import PolyProblem, convergence_study, solve_fbep
from .recovery import quenching_function, recover_sequence
from .solver import BepProblem, SolverOptions, solve_bep

FORMAT_VERSION = 1
EXPORT_KINDS = ("boundary_modulus", "lambda", "convergence", "recovery")


class SpecError(ValueError):
    """Malformed problem spec; message names the offending field."""


# ---------------------------------------------------------------------------
# builtins

def _builtin_half_z(theta):
    return 0.5 * np.exp(1j * theta)


def _builtin_const2(theta):
    return np.full(theta.shape, 2.0 + 0.0j)


def _builtin_conj_z(theta):
    return np.exp(-1j * theta)


BUILTINS = {
    "half_z": _builtin_half_z,
    "const2": _builtin_const2,
    "conj_z": _builtin_conj_z,
}


# ---------------------------------------------------------------------------
# spec loading

def load_spec(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}")


def problem_from_spec(spec: dict) -> BepProblem:
    if "arcs_I" not in spec:
        raise SpecError("missing field 'arcs_I'")
    try:
        arcs = ArcSet([(float(a), float(b)) for a, b in spec["arcs_I"]])
    except (TypeError, ValueError) as exc:
        raise SpecError(f"invalid 'arcs_I': {exc}")
    grid_n = int(spec.get("grid_n", 4096))
    try:
        grid = Grid(grid_n)
    except ValueError as exc:
        raise SpecError(f"invalid 'grid_n': {exc}")
    snapped = arcs.snapped(grid)
    f = _load_f(spec.get("f"), grid, snapped)
    M = _load_m(spec.get("M", {"constant": 1.0}), grid, snapped)
    options = _load_options(spec.get("solver", {}), grid_n)
    return BepProblem(I=snapped, f=f, M=M, options=options)


def _load_f(node, grid: Grid, I: ArcSet) -> GridFunction:
    if node is None:
        raise SpecError("missing field 'f'")
    mask = I.mask(grid)
    if "builtin" in node:
        name = node["builtin"]
        if name not in BUILTINS:
            raise SpecError(
                f"unknown builtin {name!r} in 'f'; valid: {sorted(BUILTINS)}"
            )
        vals = BUILTINS[name](grid.theta)
        return GridFunction(grid, np.where(mask, vals, 0.0))
    if "samples" in node:
        rows = np.asarray(node["samples"], dtype=float)
        if rows.ndim != 2 or rows.shape[1] != 3:
            raise SpecError("'f.samples' must be rows of [theta, re, im]")
        theta, re, im = rows[:, 0], rows[:, 1], rows[:, 2]
        for t in theta:
            if not I.contains_angle(float(t)):
                raise SpecError(f"'f.samples' angle {t:.6f} lies outside I")
        vals = _interp_angles(grid.theta, theta % (2 * np.pi), re + 1j * im)
        return GridFunction(grid, np.where(mask, vals, 0.0))
    raise SpecError("'f' must contain 'builtin' or 'samples'")


def _load_m(node, grid: Grid, I: ArcSet) -> GridFunction:
    J_mask = ~I.mask(grid)
    if "constant" in node:
        val = float(node["constant"])
        if val <= 0:
            raise SpecError("'M.constant' must be positive")
        return GridFunction.constant(grid, val)
    if "samples" in node:
        rows = np.asarray(node["samples"], dtype=float)
        if rows.ndim != 2 or rows.shape[1] != 2:
            raise SpecError("'M.samples' must be rows of [theta, value]")
        theta, vals = rows[:, 0], rows[:, 1]
        for t in theta:
            if I.contains_angle(float(t)):
                raise SpecError(f"'M.samples' angle {t:.6f} lies outside J")
        interp = _interp_angles(grid.theta, theta % (2 * np.pi), vals.astype(complex))
        out = np.where(J_mask, interp.real, 1.0)
        return GridFunction(grid, out.astype(complex))
    raise SpecError("'M' must contain 'constant' or 'samples'")


def _interp_angles(target, theta, values):
    order = np.argsort(theta)
    th = theta[order]
    vals = values[order]
    thp = np.concatenate([th, th[:1] + 2 * np.pi])
    vp = np.concatenate([vals, vals[:1]])
    shifted = np.where(target < th[0], target + 2 * np.pi, target)
    re = np.interp(shifted, thp, vp.real)
    im = np.interp(shifted, thp, vp.imag)
    return re + 1j * im


_OPTION_FIELDS = (
    "max_iters",
    "tol_gap",
    "tol_saturation",
    "armijo_c",
    "backtrack_factor",
    "initial_step",
    "lambda_floor",
    "cg_tol",
    "interior_cells",
)


def _load_options(node: dict, grid_n: int) -> SolverOptions:
    kwargs = {"grid_n": grid_n}
    for key in _OPTION_FIELDS:
        if key in node:
            kwargs[key] = node[key]
    if node.get("method") in ("fixed_point",):
        kwargs["method"] = "fixed_point"
    try:
        return SolverOptions(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"invalid 'solver' options: {exc}")


def _spec_method(spec: dict) -> str:
    method = spec.get("solver", {}).get("method", "dual_ascent")
    if method in ("dual_ascent", "fixed_point"):
        return "dual_ascent"
    if method in ("poly", "both"):
        return method
    raise SpecError(
        f"unknown solver.method {method!r}; valid: dual_ascent, poly, both"
    )


# ---------------------------------------------------------------------------
# reporting

def _samples_block(grid, values, mask=None):
    rows = []
    for k in range(grid.n):
        if mask is not None and not mask[k]:
            continue
        v = values[k]
        rows.append([float(grid.theta[k]), float(v.real), float(v.imag)])
    return rows


def build_report(problem: BepProblem, sol, spec: dict) -> dict:
    grid = problem.grid
    snapped = problem.I.snapped(grid)
    j_mask = ~snapped.mask(grid)
    lam_rows = [
        [float(grid.theta[k]), float(sol.lam.values[k].real)]
        for k in range(grid.n)
        if j_mask[k]
    ]
    return {
        "g0": _samples_block(grid, sol.g0_boundary.values),
        "lambda": lam_rows,
        "scalars": {
            "primal": sol.primal,
            "dual": sol.dual,
            "gap": sol.gap,
            "saturation_residual": sol.saturation_residual,
            "critical_residual": sol.critical_residual,
            "iterations": sol.iterations,
            "converged": sol.converged,
        },
        "provenance": _provenance(problem, spec, "dual_ascent"),
    }


def _provenance(problem: BepProblem, spec: dict, solver_name: str) -> dict:
    snapped = problem.I.snapped(problem.grid)
    return {
        "format_version": FORMAT_VERSION,
        "grid_n": problem.grid.n,
        "solver": solver_name,
        "options": asdict(problem.options),
        "snapped_arcs": [[float(a), float(b)] for a, b in snapped.arcs],
        "bep_threads": os.environ.get("BEP_THREADS"),
    }


def write_json(obj: dict, path: str):
    text = json.dumps(obj, indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_solve(args) -> int:
    spec = load_spec(args.spec)
    problem = problem_from_spec(spec)
    method = _spec_method(spec)
    if method == "poly":
        return cmd_poly_from_spec(spec, problem, args.output, degrees=None)
    sol = solve_bep(problem)
    report = build_report(problem, sol, spec)
    if method == "both":
        degree = int(spec.get("solver", {}).get("degree", 32))
        psol = solve_fbep(PolyProblem(problem.I, problem.f, degree))
        diff = sol.g0.coeffs.copy()
        diff[: degree + 1] -= psol.coeffs
        report["cross_validation"] = {
            "degree": degree,
            "l2_diff_circle": float(np.linalg.norm(diff)),
            "primal_diff": float(abs(psol.primal - sol.primal)),
        }
        report["provenance"]["solver"] = "both"
    write_json(report, args.output)
    return 0 if sol.converged else 2


def cmd_poly_from_spec(spec, problem, output, degrees) -> int:
    if degrees is None:
        degrees = [int(spec.get("solver", {}).get("degree", 32))]
    sol = solve_bep(problem)
    rows = convergence_study(problem, degrees, bep_solution=sol)
    report = build_report(problem, sol, spec)
    report["convergence"] = [
        [r.degree, r.err_circle, r.err_j, r.primal] for r in rows
    ]
    report["provenance"]["solver"] = "poly"
    write_json(report, output)
    return 0 if sol.converged else 2


def cmd_poly(args) -> int:
    spec = load_spec(args.spec)
    problem = problem_from_spec(spec)
    degrees = [int(d) for d in args.degrees.split(",") if d.strip()]
    if not degrees:
        raise SpecError("no degrees given")
    return cmd_poly_from_spec(spec, problem, args.output, degrees)


def cmd_recover(args) -> int:
    spec = load_spec(args.spec)
    problem = problem_from_spec(spec)
    z = complex(args.z.replace("i", "j"))
    phi = quenching_function(problem.I, args.strength, problem.grid)
    seq = recover_sequence(problem.f, phi, z, args.nmax)
    report = {
        "recovery": [
            [k + 1, float(v.real), float(v.imag)] for k, v in enumerate(seq)
        ],
        "recovery_params": {
            "z": [z.real, z.imag],
            "strength": args.strength,
            "n_max": args.nmax,
        },
        "provenance": _provenance(problem, spec, "recover"),
    }
    write_json(report, args.output)
    return 0


def cmd_export(args) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    kind = args.kind
    if kind not in EXPORT_KINDS:
        raise SpecError(
            f"unknown export kind {kind!r}; valid kinds: {', '.join(EXPORT_KINDS)}"
        )
    out = args.output or f"{kind}.csv"
    rows, header = _export_rows(report, kind)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return 0


def _export_rows(report, kind):
    if kind == "boundary_modulus":
        if "g0" not in report:
            raise SpecError("report has no 'g0' block")
        rows = [
            [t, float(np.hypot(re, im))] for t, re, im in report["g0"]
        ]
        return sorted(rows), ["theta", "value"]
    if kind == "lambda":
        if "lambda" not in report:
            raise SpecError("report has no 'lambda' block")
        return sorted([[t, v] for t, v in report["lambda"]]), ["theta", "value"]
    if kind == "convergence":
        if "convergence" not in report:
            raise SpecError("report has no 'convergence' block")
        rows = [[int(n), err] for n, err, _ej, _p in report["convergence"]]
        return sorted(rows), ["n", "error"]
    if kind == "recovery":
        if "recovery" not in report:
            raise SpecError("report has no 'recovery' block")
        vals = [complex(re, im) for _n, re, im in report["recovery"]]
        limit = vals[-1]
        rows = [
            [int(n), abs(complex(re, im) - limit)]
            for n, re, im in report["recovery"]
        ]
        return sorted(rows), ["n", "error"]
    raise SpecError(f"unknown export kind {kind!r}")


def cmd_ingest_hp(args) -> int:
    rows = []
    try:
        with open(args.data, "r", encoding="utf-8") as fh:
            for line in csv.reader(fh):
                if not line or line[0].strip().lower() in ("omega", "w", "#"):
                    continue
                rows.append([float(x) for x in line[:3]])
    except FileNotFoundError:
        raise SpecError(f"data file not found: {args.data}")
    if len(rows) < 8:
        raise SpecError("need at least 8 half-plane samples")
    data = np.asarray(rows)
    omega = data[:, 0]
    if np.unique(omega).size != omega.size:
        raise SpecError("omega values must be distinct")
    if not np.all(np.diff(omega) > 0):
        warnings.warn("omega values not monotone; sorting")
        order = np.argsort(omega)
        data = data[order]
        omega = data[:, 0]
    w1, w2 = (float(x) for x in args.band.split(","))
    sel = (omega >= w1) & (omega <= w2)
    if np.count_nonzero(sel) < 8:
        raise SpecError("fewer than 8 samples inside the band")
    omega = omega[sel]
    fvals = data[sel, 1] + 1j * data[sel, 2]
    w = 1j * omega
    z = (w - 1.0) / (w + 1.0)
    weight = 1.0 / (1.0 + w)
    theta = np.angle(z) % (2 * np.pi)
    disk_vals = fvals * weight
    order = np.argsort(theta)
    theta, disk_vals = theta[order], disk_vals[order]
    spec = {
        "grid_n": args.grid_n,
        "arcs_I": [[float(theta[0]), float(theta[-1])]],
        "f": {
            "samples": [
                [float(t), float(v.real), float(v.imag)]
                for t, v in zip(theta, disk_vals)
            ]
        },
        "M": {"constant": 1.0},
        "solver": {"method": "dual_ascent"},
    }
    write_json(spec, args.output)
    return 0


def halfplane_to_disk(omega):
    """Boundary Moebius map i*omega -> (w-1)/(w+1) and its isometry weight."""
    w = 1j * np.asarray(omega, dtype=float)
    return (w - 1.0) / (w + 1.0), 1.0 / (1.0 + w)


def disk_to_halfplane(z):
    """Inverse boundary map: z on the circle -> omega on the imaginary axis."""
    z = np.asarray(z, dtype=complex)
    return ((1.0 + z) / (1.0 - z)).imag


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bep",
        description="Bounded extremal problems in the Hardy space of the disk",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the continuous solver on a spec")
    p.add_argument("spec")
    p.add_argument("-o", "--output", default="report.json")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("poly", help="polynomial solver / convergence study")
    p.add_argument("spec")
    p.add_argument("--degrees", default="4,8,16,32")
    p.add_argument("-o", "--output", default="report.json")
    p.set_defaults(fn=cmd_poly)

    p = sub.add_parser("recover", help="Carleman recovery sequence at a point")
    p.add_argument("spec")
    p.add_argument("--z", default="0.0+0.0i")
    p.add_argument("--nmax", type=int, default=200)
    p.add_argument("--strength", type=float, default=1.0)
    p.add_argument("-o", "--output", default="report.json")
    p.set_defaults(fn=cmd_recover)

    p = sub.add_parser("export", help="export plot data from a report")
    p.add_argument("report")
    p.add_argument("--kind", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("ingest-hp", help="ingest half-plane frequency data")
    p.add_argument("data")
    p.add_argument("--band", required=True, help="w1,w2")
    p.add_argument("--grid-n", type=int, default=4096)
    p.add_argument("-o", "--output", default="spec.json")
    p.set_defaults(fn=cmd_ingest_hp)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
