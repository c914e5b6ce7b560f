"""Error norms, reproduction of the published error tables, CSV emission.

The L2 norm is the plain root-sum-of-squares over the sampled points, with
no 1/N or grid-spacing factor, to stay comparable with the printed tables;
it therefore depends on the grid size.
"""

import math
from dataclasses import dataclass

import numpy as np

from rkkse.errors import ContractError
from rkkse.solver import solve


def l2_error(errors):
    """Unnormalized Euclidean norm of an error vector."""
    errors = np.asarray(list(errors), dtype=float)
    if errors.size == 0:
        raise ContractError("l2_error needs a nonempty error list")
    return float(math.sqrt(np.sum(errors * errors)))


def linf_error(errors):
    """Maximum absolute entry of an error vector."""
    errors = np.asarray(list(errors), dtype=float)
    if errors.size == 0:
        raise ContractError("linf_error needs a nonempty error list")
    return float(np.max(np.abs(errors)))


@dataclass(frozen=True)
class ErrorReport:
    """Per-point and aggregate errors of one solve against the reference."""

    rows: tuple        # (zeta, tau, exact, approximate, absolute error)
    l2: float
    linf: float
    config: tuple      # (alpha, n, scheme, sweeps)

    @classmethod
    def build(cls, problem, solution, points, scheme, sweeps):
        rows = []
        for zeta, tau in points:
            exact = problem.reference.value(zeta, tau)
            approx = solution.evaluate(zeta, tau)
            rows.append((zeta, tau, exact, approx, abs(exact - approx)))
        errs = [r[4] for r in rows]
        return cls(
            rows=tuple(rows),
            l2=l2_error(errs),
            linf=linf_error(errs),
            config=(problem.alpha.alpha, solution.n, scheme, sweeps),
        )


def table_zeta_points(problem, count=11):
    """The tabulated abscissae: exact rationals i/(count+1) mapped into [a, b]."""
    return [
        problem.a + i * (problem.b - problem.a) / (count + 1.0)
        for i in range(1, count + 1)
    ]


def table_abs_errors(problem, n=12, tau=None, zeta_points=None,
                     scheme="diagonal-grid", sweeps=12):
    """Absolute-error table: one row per zeta point at a fixed tau."""
    if tau is None:
        tau = 0.5 * problem.T
    pts = zeta_points or table_zeta_points(problem)
    sol = solve(problem, n, scheme=scheme, sweeps=sweeps)
    return ErrorReport.build(problem, sol, [(z, tau) for z in pts], scheme, sweeps)


def convergence_table(problem_factory, n_list, tau_list, scheme="diagonal-grid",
                      sweeps=12):
    """Norm reports for each (n, tau) pair over the standard zeta grid.

    problem_factory: a KseProblem, reused for every n.  Returns a list of
    ErrorReport of length len(n_list) * len(tau_list), n-major.
    """
    if not n_list or not tau_list:
        raise ContractError("n_list and tau_list must be nonempty")
    problem = problem_factory
    pts = table_zeta_points(problem)
    reports = []
    for n in n_list:
        sol = solve(problem, n, scheme=scheme, sweeps=sweeps)
        for tau in tau_list:
            reports.append(
                ErrorReport.build(problem, sol, [(z, tau) for z in pts], scheme, sweeps)
            )
    return reports


def format_report(report, label=""):
    lines = []
    if label:
        lines.append(label)
    lines.append(f"{'zeta':>12} {'tau':>8} {'exact':>16} {'approx':>16} {'abs error':>12}")
    for zeta, tau, exact, approx, err in report.rows:
        lines.append(
            f"{zeta:12.6f} {tau:8.4f} {exact:16.10f} {approx:16.10f} {err:12.5e}"
        )
    lines.append(f"L2 = {report.l2:.6e}   Linf = {report.linf:.6e}")
    return "\n".join(lines)


def emit_surface(problem, solution, grid, destination):
    """Write `zeta,tau,exact,approx,abs_error` rows over a rows x cols grid.

    grid: (rows, cols) interior resolution, at least 2 x 2; row-major over
    zeta then tau; 15 significant digits; deterministic output.
    """
    rows, cols = grid
    if rows < 2 or cols < 2:
        raise ContractError(f"surface grid must be at least 2x2, got {rows}x{cols}")
    zs = [problem.a + i * (problem.b - problem.a) / (rows + 1.0) for i in range(1, rows + 1)]
    ts = [j * problem.T / (cols + 1.0) for j in range(1, cols + 1)]
    lines = ["zeta,tau,exact,approx,abs_error"]
    for z in zs:
        for t in ts:
            exact = problem.reference.value(z, t)
            approx = solution.evaluate(z, t)
            lines.append(
                f"{z:.15g},{t:.15g},{exact:.15g},{approx:.15g},{abs(exact - approx):.15g}"
            )
    payload = "\n".join(lines) + "\n"
    try:
        if hasattr(destination, "write"):
            destination.write(payload)
        else:
            with open(destination, "w") as fh:
                fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write surface file: {exc}") from exc
    return destination
