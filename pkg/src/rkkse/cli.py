"""Command-line front end.

Subcommands: solve, table, converge, surface, selftest.  Problem parameters
come from --config (key = value lines: alpha, beta, gamma, mu, nu, a, b, T)
or default to the worked configuration; --alpha overrides.  Exit codes map
error categories: domain=2, accuracy=3, degeneracy=4, divergence=5, io=6,
contract=7, construction=8.
"""

import argparse
import sys

import numpy as np

from rkkse import __version__, _core
from rkkse.errors import EXIT_CODES, RkkseError
from rkkse.operator import KseProblem, load_problem

TABLE_ALPHAS = {1: 0.5, 2: 0.75, 3: 0.85, 4: 0.95}
SCHEME_NAMES = {"diagonal": "diagonal-grid", "halton": "halton"}


def _build_problem(args, alpha=None):
    alpha = alpha if alpha is not None else getattr(args, "alpha", None)
    if getattr(args, "config", None):
        overrides = {} if alpha is None else {"alpha": alpha}
        return load_problem(args.config, **overrides)
    return KseProblem.paper_config(alpha=0.5 if alpha is None else alpha)


def _scheme(args):
    return SCHEME_NAMES[args.scheme]


def cmd_solve(args):
    from rkkse.metrics import ErrorReport
    from rkkse.solver import default_validation_grid, solve

    problem = _build_problem(args)
    sol = solve(problem, args.n, scheme=_scheme(args), sweeps=args.sweeps)
    grid = default_validation_grid(problem)
    report = ErrorReport.build(problem, sol, grid, _scheme(args), args.sweeps)
    print(
        f"solve: alpha={problem.alpha.alpha} n={args.n} scheme={args.scheme} "
        f"sweeps_run={sol.sweeps_run} backend={_core.BACKEND}"
    )
    print(f"validation points: {len(grid)}")
    print(f"L2   = {report.l2:.6e}")
    print(f"Linf = {report.linf:.6e}")
    return 0


def cmd_table(args):
    from rkkse.metrics import format_report, table_abs_errors

    alpha = TABLE_ALPHAS[args.which]
    problem = _build_problem(args, alpha=alpha)
    report = table_abs_errors(
        problem, n=args.n, scheme=_scheme(args), sweeps=args.sweeps
    )
    print(
        format_report(
            report,
            label=f"table {args.which}: absolute errors at tau={0.5 * problem.T}, "
            f"alpha={alpha}, n={args.n}",
        )
    )
    if args.csv:
        lines = ["zeta,tau,exact,approx,abs_error"]
        for zeta, tau, exact, approx, err in report.rows:
            lines.append(f"{zeta:.15g},{tau:.15g},{exact:.15g},{approx:.15g},{err:.15g}")
        with open(args.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.csv}")
    return 0


def cmd_converge(args):
    from rkkse.metrics import convergence_table

    n_list = [int(x) for x in args.n_list.split(",")]
    tau_list = [float(x) for x in args.tau_list.split(",")]
    alpha_list = [float(x) for x in args.alpha_list.split(",")]
    rows = []
    for alpha in alpha_list:
        problem = _build_problem(args, alpha=alpha)
        reports = convergence_table(
            problem, n_list, tau_list, scheme=_scheme(args), sweeps=args.sweeps
        )
        for rep in reports:
            rows.append((alpha, rep.config[1], rep.rows[0][1], rep.l2, rep.linf))
    print(f"{'alpha':>7} {'n':>4} {'tau':>8} {'L2':>14} {'Linf':>14}")
    for alpha, n, tau, l2, linf in rows:
        print(f"{alpha:7.3f} {n:4d} {tau:8.4f} {l2:14.6e} {linf:14.6e}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("alpha,n,tau,l2,linf\n")
            for alpha, n, tau, l2, linf in rows:
                fh.write(f"{alpha:.15g},{n},{tau:.15g},{l2:.15g},{linf:.15g}\n")
        print(f"wrote {args.csv}")
    return 0


def cmd_surface(args):
    from rkkse.metrics import emit_surface
    from rkkse.solver import solve

    problem = _build_problem(args)
    rows, cols = (int(x) for x in args.grid.lower().split("x"))
    sol = solve(problem, args.n, scheme=_scheme(args), sweeps=args.sweeps)
    emit_surface(problem, sol, (rows, cols), args.csv)
    print(f"wrote {args.csv} ({rows}x{cols} grid)")
    return 0


def cmd_selftest(args):
    from rkkse import kernels
    from rkkse.basis import CollocationBasis, make_collocation
    from rkkse.fracalc import PiecewisePolynomial, caputo_numeric, caputo_piecewise
    from rkkse.operator import apply_L, residual_from_bundle, rhs_M

    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        print(f"  {'PASS' if ok else 'FAIL'}  {name}" + (f" ({detail})" if detail else ""))
        failures += 0 if ok else 1

    print("kernel verification:")
    for fam in (kernels.family1(), kernels.family2(), kernels.family4()):
        rep = kernels.verify_kernel(fam)
        for line in rep.lines():
            print(f"    {line}")
        check(f"order-{fam.order} kernel ({fam.source})", rep.passed)
    cand = kernels.rk4_selection_report()
    check(
        "printed order-4 candidate rejected, reconstruction shipped",
        (not cand.passed) and kernels.family4().source == "reconstructed",
    )

    print("fractional calculus oracles:")
    p = PiecewisePolynomial.single([0.0, 0.0, 1.0], 0.0, 1.0)   # t^2
    exact = caputo_piecewise(p, 0.5, 0.25)
    # Gamma(3)/Gamma(2.5) * 0.25^1.5
    check("caputo t^2 exact route", abs(exact - 0.18806319451592323) < 1e-12, f"{exact:.12f}")
    quad = caputo_numeric(lambda s: 2.0 * s, 0.5, 0.25, tol=1e-12)
    check("caputo t^2 quadrature route", abs(quad - exact) < 1e-10)

    print("orthonormality (paper configuration, n=8):")
    problem = KseProblem.paper_config(alpha=0.5)
    basis = CollocationBasis(problem, make_collocation(8, "diagonal-grid", problem))
    G = basis.gram()
    xi = basis.xi()
    worst = float(np.max(np.abs(xi @ G @ xi.T - np.eye(8))))
    check("xi G xi^T = I", worst <= 1e-8, f"worst {worst:.2e}")

    print("operator recombination identity:")
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        z = rng.uniform(problem.a + 0.05, problem.b - 0.05)
        t = rng.uniform(0.05, problem.T)
        vb = rng.normal(size=4)
        capv, capf = rng.normal(size=2)
        fb = problem.lifting.bundle(z, t)
        lhs = apply_L(problem, (*vb, capv), (z, t)) - rhs_M(
            problem, vb, (z, t), caputo_f_value=capf
        )
        wb = tuple(v + f for v, f in zip(vb, fb))
        rhs = residual_from_bundle(problem, wb, capv + capf)
        worst = max(worst, abs(lhs - rhs))
    check("L v - M recombines to the residual", worst <= 1e-9, f"worst {worst:.2e}")

    print(f"selftest: {'all checks passed' if failures == 0 else f'{failures} failures'}")
    return 0 if failures == 0 else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rkkse",
        description="Reproducing-kernel collocation solver for the "
        "time-fractional Kudryashov-Sinelshchikov equation",
    )
    parser.add_argument("--version", action="version", version=f"rkkse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=12):
        p.add_argument("--config", help="problem file with key = value lines")
        p.add_argument("--n", type=int, default=n_default, help="number of basis functions")
        p.add_argument(
            "--scheme", choices=sorted(SCHEME_NAMES), default="diagonal",
            help="collocation sequence",
        )
        p.add_argument("--sweeps", type=int, default=12, help="Picard sweep budget")

    p = sub.add_parser("solve", help="solve and print summary norms")
    common(p)
    p.add_argument("--alpha", type=float, help="fractional order in (0, 1]")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="reproduce an absolute-error table")
    common(p)
    p.add_argument("--which", type=int, choices=sorted(TABLE_ALPHAS), required=True)
    p.add_argument("--csv", help="also write the rows to this path")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("converge", help="L2/Linf norms over n and tau lists")
    common(p)
    p.add_argument("--n-list", default="6,12", help="comma-separated basis sizes")
    p.add_argument("--tau-list", default="0.25,0.5,0.75", help="comma-separated times")
    p.add_argument("--alpha-list", default="0.5,0.75,0.95", help="comma-separated orders")
    p.add_argument("--csv", help="also write the rows to this path")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("surface", help="emit solution surface data as CSV")
    common(p)
    p.add_argument("--alpha", type=float, help="fractional order in (0, 1]")
    p.add_argument("--grid", default="20x20", help="RxC interior grid resolution")
    p.add_argument("--csv", required=True, help="output path")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("selftest", help="kernel, Caputo, orthonormality and identity checks")
    p.set_defaults(func=cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RkkseError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_CODES["io"]


if __name__ == "__main__":
    sys.exit(main())
