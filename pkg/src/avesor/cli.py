"""Command-line interface: solve problems, print parameter tables, emit
curve data, run the verification scans, and reproduce benchmark tables.

Exit codes: 0 success (and solver converged / all checks passed), 1 solver
did not converge or a verification check failed, 2 usage error, 3 numerical
breakdown.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import appendix, params, problems, solvers
from ._backend import backend_name, kernels
from .errors import (
    AvesorError,
    DomainError,
    NoConvergentOmegaError,
    NumericalBreakdownError,
    SingularMatrixError,
)
from .spectral import nu_estimate

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_METHODS = ("sorlo", "sorlaopt", "sorlopt", "sorlno", "newton")

# The default stopping tolerance; --tol 1e-6 is the documented looser preset
# for problems whose residual stalls above 1e-8.
_DEFAULT_TOL = 1e-8


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    """Normalized invocation: one command plus everything it needs."""

    command: str
    problem_specs: list = field(default_factory=list)
    method: str | None = None
    explicit_omega: float | None = None
    tol: float = _DEFAULT_TOL
    max_iter: int = 100
    nu_override: float | None = None
    output_format: str = "table"
    output_path: str | None = None
    grid: np.ndarray | None = None
    with_sweep: bool = False
    what: str | None = None
    nus: list | None = None
    resolution: float | None = None
    methods: list | None = None


def _parse_grid(spec):
    """MATLAB-style grid 'start:step:stop', inclusive of both ends."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be start:step:stop, got {spec!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"non-numeric grid component in {spec!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"empty grid {spec!r}")
    return np.arange(start, stop + step / 2, step)


def _parse_problem_specs(spec):
    """Expand 'ex41:1000,2000', 'ex41:1000..5000[:step]' or 'mm:path[,bpath]'."""
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind in ("ex41", "ex42"):
        if not rest:
            raise UsageError(f"{kind} needs at least one size, e.g. {kind}:1000")
        sizes = []
        for chunk in rest.split(","):
            try:
                if ".." in chunk:
                    # a..b[:step], step defaulting to a (so 1000..5000 steps by 1000)
                    lo_text, hi_text = chunk.split("..")
                    hi_parts = hi_text.split(":")
                    lo, hi = int(lo_text), int(hi_parts[0])
                    step = int(hi_parts[1]) if len(hi_parts) > 1 else lo
                    if step <= 0 or hi < lo:
                        raise UsageError(f"bad range {chunk!r}")
                    sizes.extend(range(lo, hi + 1, step))
                else:
                    sizes.append(int(chunk))
            except UsageError:
                raise
            except ValueError:
                raise UsageError(f"bad size {chunk!r} in {spec!r}") from None
        return [(kind, s) for s in sizes]
    if kind == "mm":
        if not rest:
            raise UsageError("mm needs a file path, e.g. mm:matrix.mtx[,b.txt]")
        paths = rest.split(",")
        if len(paths) > 2:
            raise UsageError("mm takes at most a matrix path and a vector path")
        return [("mm", tuple(paths))]
    raise UsageError(f"unknown problem kind {kind!r} (expected ex41, ex42 or mm)")


def _instantiate(spec_item):
    kind, arg = spec_item
    if kind == "ex41":
        return problems.gen_ex41(arg)
    if kind == "ex42":
        return problems.gen_ex42(arg)
    paths = arg
    A = problems.load_matrix_market(paths[0])
    if len(paths) == 2:
        b = problems.load_vector(paths[1])
        return problems.AveProblem(A, b, label=f"mm:{paths[0]}")
    xs = problems.alternating_solution(A.n)
    return problems.AveProblem(A, problems.build_b(A, xs), x_star=xs, label=f"mm:{paths[0]}")


def _resolve_nu(problem, config):
    if config.nu_override is not None:
        return config.nu_override
    if problem.nu is not None:
        return problem.nu
    return nu_estimate(problem.A).nu


def _parse_method(text):
    text = text.lower()
    if text in _METHODS:
        return text, None
    if text.startswith("sor:"):
        try:
            omega = float(text[4:])
        except ValueError:
            raise UsageError(f"bad omega in method {text!r}") from None
        if not 0.0 < omega < 2.0:
            raise UsageError(f"omega must lie in (0, 2), got {omega}")
        return "sor", omega
    raise UsageError(f"unknown method {text!r}")


def _method_omega(name, explicit_omega, nu, problem, config):
    """Relaxation parameter for a named method (None for newton)."""
    if name == "newton":
        return None
    if name == "sor":
        return explicit_omega
    if name == "sorlo":
        # For symmetric A the spectral radius of A^{-1} equals nu.
        return params.omega_guo(nu)
    if name == "sorlaopt":
        return params.omega_aopt(nu)
    if name == "sorlopt":
        return params.omega_opt(nu)
    if name == "sorlno":
        grid = config.grid if config.grid is not None else _parse_grid("0.001:0.001:1.999")
        settings = solvers.SolverSettings(tol=config.tol, max_iter=config.max_iter)
        omega, _ = solvers.sweep_optimal(problem, grid, settings)
        return omega
    raise UsageError(f"unknown method {name!r}")


def _fmt17(x):
    return format(float(x), ".17g")


def _emit(rows, columns, config, table_formats=None):
    """Render rows as an aligned table, CSV, or JSON, to stdout or a file."""
    fmt = config.output_format
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            cells = []
            for col in columns:
                v = row.get(col, "")
                if isinstance(v, float):
                    cells.append(_fmt17(v))
                else:
                    cells.append(str(v))
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps(rows, indent=2, default=float) + "\n"
    else:
        table_formats = table_formats or {}
        rendered = [columns]
        for row in rows:
            cells = []
            for col in columns:
                v = row.get(col, "")
                if isinstance(v, float):
                    cells.append(format(v, table_formats.get(col, ".6g")))
                else:
                    cells.append(str(v))
            rendered.append(cells)
        widths = [max(len(r[i]) for r in rendered) for i in range(len(columns))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rendered]
        text = "\n".join(lines) + "\n"
    if config.output_path:
        with open(config.output_path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_method(problem, name, omega, config):
    settings = solvers.SolverSettings(omega=omega, tol=config.tol, max_iter=config.max_iter)
    started = time.perf_counter()
    if name == "newton":
        report = solvers.generalized_newton(problem, settings)
    else:
        report = solvers.sor_like(problem, settings)
    elapsed = time.perf_counter() - started
    return report, elapsed


def cmd_solve(config):
    problem = _instantiate(config.problem_specs[0])
    name, explicit = _parse_method(config.method)
    nu = _resolve_nu(problem, config) if name != "newton" else None
    omega = _method_omega(name, explicit, nu, problem, config)
    report, elapsed = _run_method(problem, name, omega, config)
    row = {
        "problem": problem.label,
        "method": config.method,
        "omega": omega if omega is not None else "",
        "nu": nu if nu is not None else "",
        "iterations": report.iterations,
        "converged": report.converged,
        "residual": float(report.residual_history[-1]),
        "cpu_seconds": elapsed,
    }
    _emit([row], list(row.keys()), config,
          table_formats={"omega": ".4f", "nu": ".4f", "residual": ".4e", "cpu_seconds": ".3f"})
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _bundle_row(label, nu, problem, config):
    bundle = params.param_bundle(nu)
    row = {
        "problem": label,
        "nu": bundle.nu,
        "omega_o": bundle.omega_o,
    }
    if config.with_sweep:
        if problem is None:
            raise UsageError("--with-sweep needs a problem, not a bare --nu")
        grid = config.grid if config.grid is not None else _parse_grid("0.001:0.001:1.999")
        settings = solvers.SolverSettings(tol=config.tol, max_iter=config.max_iter)
        omega_no, _ = solvers.sweep_optimal(problem, grid, settings)
        row["omega_no"] = omega_no
    row.update(
        {
            "omega_aopt": bundle.omega_aopt,
            "omega_opt": bundle.omega_opt,
            "sqrt_lambda_max": bundle.tnorm_at_opt,
            "eta_over_tau": bundle.eta_ratio_at_aopt,
            "region_case": bundle.region.case,
            "region_lo": bundle.region.lo,
            "region_hi": bundle.region.hi,
        }
    )
    return row


def cmd_params(config):
    rows = []
    if config.nus:
        for nu in config.nus:
            if not 0.0 < nu < 1.0:
                raise UsageError(f"nu must lie in (0, 1), got {nu}")
            rows.append(_bundle_row(f"nu={nu:g}", nu, None, config))
    else:
        for spec_item in config.problem_specs:
            problem = _instantiate(spec_item)
            nu = _resolve_nu(problem, config)
            rows.append(_bundle_row(problem.label, nu, problem, config))
    if not rows:
        raise UsageError("params needs --problem or --nu")
    columns = list(rows[0].keys())
    fmts = {c: ".4f" for c in columns if c not in ("problem", "region_case")}
    _emit(rows, columns, config, table_formats=fmts)
    return EXIT_OK


def cmd_region(config):
    rows = []
    if config.nus:
        nu_values = [(f"nu={nu:g}", nu) for nu in config.nus]
    else:
        nu_values = []
        for spec_item in config.problem_specs:
            problem = _instantiate(spec_item)
            nu_values.append((problem.label, _resolve_nu(problem, config)))
    if not nu_values:
        raise UsageError("region needs --problem or --nu")
    for label, nu in nu_values:
        if not 0.0 < nu < 1.0:
            raise UsageError(f"nu must lie in (0, 1), got {nu}")
        region = params.convergent_region(nu)
        rows.append(
            {"problem": label, "nu": nu, "case": region.case, "lo": region.lo, "hi": region.hi}
        )
    _emit(rows, ["problem", "nu", "case", "lo", "hi"], config,
          table_formats={"nu": ".4f", "lo": ".4f", "hi": ".4f"})
    return EXIT_OK


def cmd_sweep(config):
    problem = _instantiate(config.problem_specs[0])
    grid = config.grid if config.grid is not None else _parse_grid("0.001:0.001:1.999")
    settings = solvers.SolverSettings(tol=config.tol, max_iter=config.max_iter)
    started = time.perf_counter()
    omega_no, report = solvers.sweep_optimal(problem, grid, settings)
    elapsed = time.perf_counter() - started
    row = {
        "problem": problem.label,
        "omega_no": omega_no,
        "iterations": report.iterations,
        "residual": float(report.residual_history[-1]),
        "grid_points": int(np.atleast_1d(grid).size),
        "cpu_seconds": elapsed,
    }
    _emit([row], list(row.keys()), config,
          table_formats={"omega_no": ".3f", "residual": ".4e", "cpu_seconds": ".3f"})
    return EXIT_OK


def cmd_curves(config):
    what = config.what
    nus = config.nus or []
    if what != "roots" and not nus:
        raise UsageError("curves needs --nu (one or more values)")
    rows = []
    if what == "roots":
        grid = config.grid if config.grid is not None else _parse_grid("0.005:0.005:0.995")
        for nu in grid:
            nu = float(nu)
            if not 0.0 < nu < 1.0:
                continue
            region = params.convergent_region(nu)
            rows.append(
                {"nu": nu, "case": region.case, "omega_lo": region.lo, "omega_hi": region.hi}
            )
        columns = ["nu", "case", "omega_lo", "omega_hi"]
    else:
        evaluators = {
            "f": params.f_eval,
            "lambda": lambda nu, w: params.tnorm(nu, w) ** 2,
            "eta": params.eta,
            "g1prime": None,
        }
        if what not in evaluators:
            raise UsageError(f"unknown curve kind {what!r}")
        default = "0.001:0.001:0.999" if what == "g1prime" else "0.01:0.01:1.99"
        grid = config.grid if config.grid is not None else _parse_grid(default)
        for nu in nus:
            if not 0.0 < nu < 1.0:
                raise UsageError(f"nu must lie in (0, 1), got {nu}")
            if what == "g1prime":
                inside = grid[(grid > 0.0) & (grid < 1.0)]
                vals = kernels.g1prime_grid(np.array([nu]), inside)[0]
                for w, v in zip(inside, vals):
                    rows.append({"omega": float(w), "value": float(v), "nu": nu})
            else:
                fn = evaluators[what]
                for w in grid:
                    w = float(w)
                    if not 0.0 < w < 2.0:
                        continue
                    rows.append({"omega": w, "value": float(fn(nu, w)), "nu": nu})
        columns = ["omega", "value"] + (["nu"] if len(nus) > 1 else [])
    _emit(rows, columns, config)
    return EXIT_OK


def cmd_verify_appendix(config):
    resolution = config.resolution if config.resolution is not None else 0.001
    if resolution <= 0 or resolution >= 0.5:
        raise UsageError(f"resolution must lie in (0, 0.5), got {resolution}")
    rows = []

    delta_report = appendix.scan_delta_signs(step=resolution)
    rows.append(
        {
            "check": "endpoint discriminants positive on both nu ranges",
            "passed": delta_report.passed,
            "min_value": float(delta_report.min_value),
            "argmin": f"nu={delta_report.argmin[0]:.4g} ({delta_report.argmin[1]})",
            "violations": len(delta_report.violations),
        }
    )

    axis = np.arange(resolution, 1.0, resolution)
    axis = axis[(axis > 0.0) & (axis < 1.0)]
    scan = appendix.scan_g1_derivative(axis, axis)
    rows.append(
        {
            "check": "derivative slope positive on (0,1)x(0,1)",
            "passed": scan.passed and not scan.skipped,
            "min_value": float(scan.min_value),
            "argmin": f"(nu, omega) = ({scan.argmin[0]:.4f}, {scan.argmin[1]:.4f})",
            "violations": len(scan.violations) + len(scan.skipped),
        }
    )

    mono = appendix.check_root_monotonicity(np.arange(0.01, 1.0, 0.01))
    rows.append(
        {
            "check": "region endpoints monotone and real",
            "passed": mono.passed,
            "min_value": float(mono.min_value),
            "argmin": f"nu={mono.argmin[0]:.4g} ({mono.argmin[1]})",
            "violations": len(mono.violations),
        }
    )

    border = params.convergent_region(np.sqrt(2.0) / 2.0)
    rows.append(
        {
            "check": "borderline region endpoints (0.4579, 1)",
            "passed": abs(border.lo - 0.4579) < 1e-4 and border.hi == 1.0,
            "min_value": float(border.lo),
            "argmin": f"computed ({border.lo:.4f}, {border.hi:.4f})",
            "violations": 0,
        }
    )

    if config.output_format in ("csv", "json"):
        _emit(rows, ["check", "passed", "min_value", "argmin", "violations"], config)
    else:
        lines = [
            f"[{'PASS' if row['passed'] else 'FAIL'}] {row['check']}: "
            f"min {row['min_value']:.6g} at {row['argmin']}"
            + (f", {row['violations']} violations" if row["violations"] else "")
            + "\n"
            for row in rows
        ]
        if config.output_path:
            with open(config.output_path, "w", encoding="ascii") as fh:
                fh.writelines(lines)
        else:
            sys.stdout.writelines(lines)
    return EXIT_OK if all(row["passed"] for row in rows) else EXIT_NOT_CONVERGED


def cmd_bench(config):
    if not config.problem_specs:
        raise UsageError("bench needs --suite")
    methods = config.methods or list(_METHODS)
    rows = []
    for spec_item in config.problem_specs:
        problem = _instantiate(spec_item)
        nu = _resolve_nu(problem, config)
        for method in methods:
            name, explicit = _parse_method(method)
            omega = _method_omega(name, explicit, nu, problem, config)
            report, elapsed = _run_method(problem, name, omega, config)
            rows.append(
                {
                    "problem": problem.label,
                    "method": method,
                    "omega": omega if omega is not None else "",
                    "iterations": report.iterations if report.converged else "-",
                    "converged": report.converged,
                    "residual": float(report.residual_history[-1]) if report.converged else "-",
                    "cpu_seconds": elapsed,  # wall-clock; not comparable across machines
                }
            )
    _emit(
        rows,
        ["problem", "method", "omega", "iterations", "converged", "residual", "cpu_seconds"],
        config,
        table_formats={"omega": ".4f", "residual": ".4e", "cpu_seconds": ".4f"},
    )
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="avesor",
        description=(
            "Solvers and parameter theory for absolute value equations "
            "Ax - |x| - b = 0 with ||A^-1||_2 < 1 "
            f"(kernel backend: {backend_name()})"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, problem=True, fmt=True):
        if problem:
            p.add_argument("--problem", help="ex41:N | ex42:M | mm:path[,bpath]")
        p.add_argument("--nu", help="comma-separated nu values (overrides estimation)")
        p.add_argument("--tol", type=float, default=_DEFAULT_TOL,
                       help="residual stopping tolerance (default 1e-8; use 1e-6 for "
                            "problems whose residual stalls)")
        p.add_argument("--max-iter", type=int, default=100, help="iteration cap (default 100)")
        if fmt:
            p.add_argument("--format", choices=("table", "csv", "json"), default="table")
            p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("solve", help="run one solver on one problem")
    add_common(p)
    p.add_argument("--method", required=True,
                   help="sorlo | sorlaopt | sorlopt | sorlno | newton | sor:OMEGA")
    p.add_argument("--grid", help="omega grid start:step:stop for sorlno")

    p = sub.add_parser("params", help="derived-parameter table for problems or nu values")
    add_common(p)
    p.add_argument("--with-sweep", action="store_true",
                   help="also compute the numerically optimal omega (full solves)")
    p.add_argument("--grid", help="omega grid for --with-sweep (default 0.001:0.001:1.999)")

    p = sub.add_parser("region", help="convergent omega interval for problems or nu values")
    add_common(p)

    p = sub.add_parser("sweep", help="numerically optimal omega by exhaustive grid sweep")
    add_common(p)
    p.add_argument("--grid", help="omega grid start:step:stop (default 0.001:0.001:1.999)")

    p = sub.add_parser("curves", help="CSV curve data for plotting")
    add_common(p)
    p.add_argument("--what", required=True, choices=("f", "lambda", "eta", "g1prime", "roots"))
    p.add_argument("--grid", help="abscissa grid start:step:stop")

    p = sub.add_parser("verify-appendix", help="run the verification scans")
    p.add_argument("--resolution", type=float, default=0.001,
                   help="grid step for the scans (default 0.001)")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("bench", help="iteration-count table across problems and methods")
    p.add_argument("--suite", required=True, help="e.g. ex41:1000,2000 or ex41:1000..5000")
    p.add_argument("--methods", help="comma-separated subset of "
                                     "sorlo,sorlaopt,sorlopt,sorlno,newton")
    p.add_argument("--nu", help="comma-separated nu override")
    p.add_argument("--tol", type=float, default=_DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--grid", help="omega grid for sorlno")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", help="write output to this path instead of stdout")
    return parser


def _config_from_args(args):
    config = RunConfig(command=args.command)
    config.tol = getattr(args, "tol", _DEFAULT_TOL)
    config.max_iter = getattr(args, "max_iter", 100)
    config.output_format = getattr(args, "format", "table")
    config.output_path = getattr(args, "out", None)
    config.method = getattr(args, "method", None)
    config.with_sweep = getattr(args, "with_sweep", False)
    config.what = getattr(args, "what", None)
    config.resolution = getattr(args, "resolution", None)
    if getattr(args, "grid", None):
        config.grid = _parse_grid(args.grid)
    nu_text = getattr(args, "nu", None)
    if nu_text:
        try:
            values = [float(t) for t in nu_text.split(",")]
        except ValueError:
            raise UsageError(f"bad --nu value list {nu_text!r}") from None
        config.nus = values
        if len(values) == 1:
            config.nu_override = values[0]
    problem_text = getattr(args, "problem", None) or getattr(args, "suite", None)
    if problem_text:
        config.problem_specs = _parse_problem_specs(problem_text)
    methods_text = getattr(args, "methods", None)
    if methods_text:
        config.methods = [t.strip() for t in methods_text.split(",") if t.strip()]
    return config


_COMMANDS = {
    "solve": cmd_solve,
    "params": cmd_params,
    "region": cmd_region,
    "sweep": cmd_sweep,
    "curves": cmd_curves,
    "verify-appendix": cmd_verify_appendix,
    "bench": cmd_bench,
}


def run(argv=None):
    """Parse arguments and run the selected command; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports its own usage errors
        return int(exc.code or 0)
    try:
        config = _config_from_args(args)
        if args.command in ("solve", "sweep"):
            if not config.problem_specs:
                raise UsageError(f"{args.command} needs --problem")
            if len(config.problem_specs) != 1:
                raise UsageError(f"{args.command} takes exactly one problem")
        if config.tol <= 0:
            raise UsageError("tol must be positive")
        if config.max_iter < 1:
            raise UsageError("max-iter must be at least 1")
        return _COMMANDS[args.command](config)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NumericalBreakdownError, SingularMatrixError, NoConvergentOmegaError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (AvesorError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
