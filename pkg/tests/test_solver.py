"""Picard solver: structure, fixed point, evaluation, error sequences."""

import numpy as np
import pytest

import rkkse.solver as solver_mod
from rkkse.errors import ContractError, DivergenceError
from rkkse.metrics import linf_error
from rkkse.operator import KseProblem, QuadraticReference, residual
from rkkse.solver import default_validation_grid, error_sequence, solve


@pytest.fixture(scope="module")
def manufactured():
    ref = QuadraticReference(alpha=0.5, nu=0.75)
    problem = KseProblem(
        alpha=0.5, beta=-1.0, gamma=0.0, mu=0.0, nu=0.75, reference=ref
    )
    return problem, ref


class TestStructure:
    def test_homogeneous_traces(self, solved):
        sol = solved(alpha=0.5, n=8)
        p = sol.problem
        for t in (0.0, 0.3, 1.0):
            assert abs(sol.homogeneous(p.a, t)) <= 1e-9
            assert abs(sol.homogeneous(p.b, t)) <= 1e-9
        for z in (0.2, 0.5, 0.8):
            assert abs(sol.homogeneous(z, 0.0)) <= 1e-9

    def test_initial_condition(self, solved):
        sol = solved(alpha=0.5, n=8)
        p = sol.problem
        for z in (0.1, 0.45, 0.9):
            assert abs(sol.evaluate(z, 0.0) - p.lifting.value(z, 0.0)) <= 1e-9
            assert abs(sol.evaluate(z, 0.0) - p.reference.value(z, 0.0)) <= 1e-9

    def test_derivative_consistency(self, solved):
        sol = solved(alpha=0.5, n=8)
        rng = np.random.default_rng(0)
        h = 1e-6
        for _ in range(10):
            z, t = rng.uniform(0.1, 0.9), rng.uniform(0.1, 1.0)
            fd = (sol.evaluate(z + h, t) - sol.evaluate(z - h, t)) / (2 * h)
            assert abs(sol.evaluate(z, t, d_zeta=1) - fd) <= 1e-5

    def test_dtau_consistency(self, solved):
        sol = solved(alpha=0.5, n=8)
        h = 1e-6
        for z, t in [(0.3, 0.5), (0.7, 0.8)]:
            fd = (sol.evaluate(z, t + h) - sol.evaluate(z, t - h)) / (2 * h)
            assert abs(sol.dtau(z, t) - fd) <= 1e-5

    def test_coefficient_count(self, solved):
        sol = solved(alpha=0.5, n=8)
        assert sol.n == 8 and len(sol.coefficients) == 8

    def test_evaluate_contract(self, solved):
        sol = solved(alpha=0.5, n=8)
        with pytest.raises(ContractError):
            sol.evaluate(0.5, 0.5, d_zeta=4)

    def test_sweeps_contract(self, paper_problem):
        with pytest.raises(ContractError):
            solve(paper_problem, 4, sweeps=0)


class TestFixedPoint:
    def test_sweep_changes_decrease(self, solved):
        sol = solved(alpha=0.5, n=12)
        changes = sol.sweep_changes
        assert len(changes) >= 2
        for a, b in zip(changes[1:], changes[2:]):
            assert b <= a

    def test_collocation_residual(self, solved):
        # at the fixed point the equation holds at the collocation nodes,
        # checked through the fully independent residual route
        sol = solved(alpha=0.5, n=8)
        p = sol.problem
        for z, t in sol.basis.colloc.points:
            assert abs(residual(p, sol, (z, t), tol=1e-10)) <= 1e-6

    def test_table1_center_value(self, solved):
        # approximate value at (zeta, tau) = (0.5, 0.5): published 0.176569,
        # reference 0.176567; the solver must sit within the coarse bound
        sol = solved(alpha=0.5, n=12)
        assert abs(sol.evaluate(0.5, 0.5) - 0.176567) <= 1e-4

    def test_classical_limit_solve(self):
        # at alpha = 1 the reference is an exact solution, so the validation
        # error is a true discretization error
        p = KseProblem.paper_config(alpha=1.0)
        sol = solve(p, 12)
        errs = [abs(sol.evaluate(i / 10.0, j / 10.0) - p.reference.value(i / 10.0, j / 10.0))
                for i in range(1, 10) for j in range(1, 10)]
        assert max(errs) <= 1e-4

    def test_degenerate_fixed_point_is_zero(self):
        p = KseProblem(alpha=0.5, beta=-4.0, gamma=0.1, mu=-0.75, nu=0.75)
        sol = solve(p, 6)
        assert np.max(np.abs(sol.coefficients)) <= 1e-9

    def test_single_pass_close_to_fixed_point(self, paper_problem):
        # the nonlinearity is quadratic in a ~1e-5 quantity, so one pass is
        # already near the fixed point
        one = solve(paper_problem, 6, sweeps=1)
        many = solve(paper_problem, 6, sweeps=12)
        for z, t in [(0.3, 0.4), (0.6, 0.9)]:
            assert abs(one.evaluate(z, t) - many.evaluate(z, t)) <= 1e-8


class TestManufactured:
    def test_exactly_recovered(self, manufactured):
        problem, ref = manufactured
        sol = solve(problem, 8)
        errs = [
            abs(sol.evaluate(i / 10.0, j / 10.0) - ref.value(i / 10.0, j / 10.0))
            for i in range(1, 10)
            for j in range(1, 10)
        ]
        assert max(errs) <= 1e-4

    def test_error_sequence_floor(self, manufactured):
        # the lifting reproduces the quadratic truth exactly, so both errors
        # sit at the quadrature noise floor; the improvement ratio only
        # applies above it
        problem, _ = manufactured
        seq = dict(error_sequence(problem, [4, 16]))
        assert seq[16] <= max(0.2 * seq[4], 1e-9)


class TestErrorSequence:
    def test_single_entry_matches_linf(self, solved, paper_problem):
        grid = default_validation_grid(paper_problem)
        seq = error_sequence(paper_problem, [8], validation_grid=grid)
        sol = solved(alpha=0.5, n=8)
        ref = paper_problem.reference
        want = linf_error([sol.evaluate(z, t) - ref.value(z, t) for z, t in grid])
        assert seq[0][0] == 8
        assert seq[0][1] == pytest.approx(want, rel=1e-12)

    def test_requires_increasing_n(self, paper_problem):
        with pytest.raises(ContractError):
            error_sequence(paper_problem, [12, 6])

    def test_residual_improves_with_n(self, paper_problem):
        # the equation residual of w_n drops sharply from n=6 to n=12 (the
        # solver converges to the equation's solution)
        pts = [(i / 4.0, j / 4.0) for i in range(1, 4) for j in range(1, 4)]
        res = {}
        for n in (6, 12):
            sol = solve(paper_problem, n)
            res[n] = max(abs(residual(paper_problem, sol, pt, tol=1e-10)) for pt in pts)
        assert res[12] < res[6]


class TestOrderRange:
    @pytest.mark.parametrize("alpha", [0.1, 0.99])
    def test_extreme_orders_solve(self, alpha):
        # the quadrature layers must hold up across the admissible order range
        p = KseProblem.paper_config(alpha=alpha)
        sol = solve(p, 6)
        for pt in sol.basis.colloc.points:
            assert abs(residual(p, sol, pt, tol=1e-9)) <= 1e-6


class TestNonUnitDomain:
    def test_manufactured_on_general_rectangle(self):
        ref = QuadraticReference(alpha=0.5, nu=0.75, a0=0.8, b0=-0.3, c0=0.1)
        p = KseProblem(alpha=0.5, beta=-1.0, gamma=0.0, mu=0.0, nu=0.75,
                       a=-1.0, b=2.0, T=2.0, reference=ref)
        sol = solve(p, 10)
        errs = [abs(sol.evaluate(-1.0 + 3.0 * i / 10, 2.0 * j / 10)
                    - ref.value(-1.0 + 3.0 * i / 10, 2.0 * j / 10))
                for i in range(1, 10) for j in range(1, 11)]
        assert max(errs) <= 1e-9

    def test_chain_rule_scalings_via_residual(self):
        # the independent physical-space residual vanishes at the nodes only
        # if the unit-coordinate basis carries the right 1/h^m and T^-alpha
        # factors end to end
        p = KseProblem.paper_config(alpha=0.5, a=0.2, b=0.8, T=0.5)
        sol = solve(p, 8)
        for pt in sol.basis.colloc.points:
            assert abs(residual(p, sol, pt, tol=1e-10)) <= 1e-6
        for t in (0.1, 0.3, 0.5):
            assert abs(sol.homogeneous(0.2, t)) <= 1e-9
            assert abs(sol.homogeneous(0.8, t)) <= 1e-9


class TestDivergenceGuard:
    def test_guard_raises(self, paper_problem, monkeypatch):
        # no physical configuration in range diverges within the sweep
        # budget, so drive the guard with an explosive right-hand side
        state = {"scale": 1.0}

        def explosive_rhs(problem, bundle, point, caputo_f_value=None, **kw):
            state["scale"] *= 40.0
            return state["scale"] * (1.0 + abs(bundle[0])) ** 2

        monkeypatch.setattr(solver_mod, "rhs_M", explosive_rhs)
        with pytest.raises(DivergenceError):
            solve(paper_problem, 6, sweeps=8)
