"""Collocation basis: point sequences, psi structure, Gram, orthonormalization."""

import numpy as np
import pytest

from rkkse.basis import (
    CollocationBasis,
    CollocationSet,
    fill_distance,
    gram_schmidt_xi,
    make_collocation,
    orthonormalize,
)
from rkkse.errors import ContractError, DegeneracyError
from rkkse.fracalc import PiecewisePolynomial
from rkkse.kernels import rk2, rk4
from rkkse.operator import KseProblem
from rkkse.solver import solve


def vdc_string(m, base):
    """Independent radical-inverse: digit reversal through string arithmetic."""
    digits = []
    while m > 0:
        m, r = divmod(m, base)
        digits.append(r)
    return sum(d * base ** -(i + 1) for i, d in enumerate(digits))


class TestMakeCollocation:
    def test_first_diagonal_point_is_center(self):
        cs = make_collocation(1, "diagonal-grid", (0.0, 1.0, 1.0))
        assert cs.points == ((0.5, 0.5),)

    def test_halton_first_four(self):
        cs = make_collocation(4, "halton", (0.0, 1.0, 1.0))
        want = [(vdc_string(m, 2), vdc_string(m, 3)) for m in range(1, 5)]
        for (gz, gt), (wz, wt) in zip(cs.points, want):
            assert gz == pytest.approx(wz, abs=1e-15)
            assert gt == pytest.approx(wt, abs=1e-15)

    @pytest.mark.parametrize("scheme", ["diagonal-grid", "halton"])
    def test_prefix_property(self, scheme):
        small = make_collocation(8, scheme, (0.0, 1.0, 1.0))
        large = make_collocation(16, scheme, (0.0, 1.0, 1.0))
        assert large.points[:8] == small.points

    @pytest.mark.parametrize("scheme", ["diagonal-grid", "halton"])
    def test_points_distinct_and_interior(self, scheme):
        cs = make_collocation(40, scheme, (0.0, 2.0, 3.0))
        assert len(set(cs.points)) == 40
        for z, t in cs.points:
            assert 0.0 < z < 2.0
            assert 0.0 < t <= 3.0

    def test_domain_mapping(self):
        cs = make_collocation(1, "diagonal-grid", (-1.0, 3.0, 2.0))
        assert cs.points == ((1.0, 1.0),)

    def test_contract(self):
        with pytest.raises(ContractError):
            make_collocation(0, "diagonal-grid", (0.0, 1.0, 1.0))
        with pytest.raises(ContractError):
            make_collocation(4, "sobol", (0.0, 1.0, 1.0))

    def test_fill_distance_decay(self):
        # density proxy: the dyadic anti-diagonal traversal halves the fill
        # distance about every two quadruplings; halton every quadrupling
        h = {n: fill_distance(make_collocation(n, "diagonal-grid", (0, 1, 1)).points)
             for n in (6, 24, 96)}
        assert h[24] <= 0.75 * h[6]
        assert h[96] <= 0.55 * h[6]
        hh = {n: fill_distance(make_collocation(n, "halton", (0, 1, 1)).points)
              for n in (6, 24, 96)}
        assert hh[24] <= 0.65 * hh[6]
        assert hh[96] <= 0.65 * hh[24]


@pytest.fixture(scope="module")
def basis6(paper_problem):
    return CollocationBasis(paper_problem, make_collocation(6, "diagonal-grid", paper_problem))


class TestPsi:
    def test_vanishes_on_data_manifolds(self, paper_problem, basis6):
        p = paper_problem
        for j in range(basis6.n):
            for t in (0.2, 0.7, 1.0):
                assert abs(basis6.psi(j, p.a, t)) <= 1e-12
                assert abs(basis6.psi(j, p.b, t)) <= 1e-12
            for z in (0.15, 0.5, 0.9):
                assert abs(basis6.psi(j, z, 0.0)) <= 1e-12

    def test_continuity(self, basis6):
        rng = np.random.default_rng(0)
        for j in range(basis6.n):
            z, t = rng.uniform(0.1, 0.9), rng.uniform(0.1, 1.0)
            assert abs(basis6.psi(j, z + 1e-7, t) - basis6.psi(j, z, t)) <= 1e-4

    def test_derivative_order_limit(self, basis6):
        with pytest.raises(ContractError):
            basis6.psi(0, 0.5, 0.5, d_zeta=4)

    def test_manufactured_span_reconstruction(self, paper_problem):
        # a target inside span{psi_1..psi_4} is recovered exactly from its
        # collocation data through the orthonormal coefficients
        basis = CollocationBasis(
            paper_problem, make_collocation(4, "diagonal-grid", paper_problem)
        )
        rng = np.random.default_rng(1)
        a = rng.normal(size=4)
        G = basis.gram()
        data = G @ a                      # (L v*)(node_i) for v* = sum a_j psi_j
        xi = basis.xi()
        B = xi @ data
        beta = B @ xi
        for _ in range(10):
            z, t = rng.uniform(0.1, 0.9), rng.uniform(0.1, 1.0)
            want = sum(a[j] * basis.psi(j, z, t) for j in range(4))
            got = sum(beta[j] * basis.psi(j, z, t) for j in range(4))
            assert abs(got - want) <= 1e-6


class TestGram:
    def test_symmetry_raw(self, basis6):
        basis6.gram()
        assert basis6.gram_asymmetry <= 1e-8

    def test_diagonal_positive(self, basis6):
        G = basis6.gram()
        assert np.all(np.diag(G) > 0.0)

    def test_classical_tensor_quadrature_oracle(self):
        # at alpha = 1 every psi is a sum of two separable terms, so the
        # inner product factorizes into order-4 and order-2 one-dimensional
        # inner products computable by exact quadrature
        problem = KseProblem.paper_config(alpha=1.0)
        basis = CollocationBasis(problem, make_collocation(3, "diagonal-grid", problem))
        G = np.array([[basis.gram_entry(i, j) for j in range(3)] for i in range(3)])

        def pp_inner(p, q, r):
            tot = sum(p(0.0, deriv=i) * q(0.0, deriv=i) for i in range(r))
            cuts = sorted(set(p.breakpoints) | set(q.breakpoints))
            xg, wg = np.polynomial.legendre.leggauss(8)
            for a, b in zip(cuts[:-1], cuts[1:]):
                mid, half = 0.5 * (a + b), 0.5 * (b - a)
                tot += half * sum(
                    w * p(mid + half * x, deriv=r) * q(mid + half * x, deriv=r)
                    for x, w in zip(xg, wg)
                )
            return tot

        def separable_terms(basis, j):
            spatial = None
            for m in range(4):
                term = basis.chat[j][m] * basis.slices[j][m]
                spatial = term if spatial is None else spatial + term
            tj = basis.unit_nodes[j][1]
            # classical time factor of the Caputo term: d/du R2(u,t)|_{u=tj},
            # linear-in-t pieces split at tj
            dpp = PiecewisePolynomial(
                [0.0, tj, 1.0],
                [[0.0, 1.0, 0.5, 0.0],
                 [tj + 0.5 * tj * tj, 1.0 + tj, 0.0, 0.0]],
            )
            breaks, coefs = basis.r2secs[j]
            r2pp = PiecewisePolynomial(breaks, coefs)
            return [
                (spatial, r2pp),
                (basis.time_scale * basis.slices[j][0], dpp),
            ]

        for i in range(3):
            for j in range(3):
                want = 0.0
                for (ui, vi) in separable_terms(basis, i):
                    for (uj, vj) in separable_terms(basis, j):
                        want += pp_inner(ui, uj, 4) * pp_inner(vi, vj, 2)
                assert abs(G[i, j] - want) <= 1e-6


class TestOrthonormalize:
    def test_identity(self):
        assert np.allclose(orthonormalize(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        xi = orthonormalize(np.diag([4.0, 9.0]))
        assert np.allclose(xi, np.diag([0.5, 1.0 / 3.0]), atol=1e-14)

    def test_two_by_two_hand_gram_schmidt(self):
        xi = orthonormalize(np.array([[2.0, 1.0], [1.0, 2.0]]))
        s2, s6 = np.sqrt(2.0), np.sqrt(6.0)
        assert np.allclose(xi, [[1.0 / s2, 0.0], [-1.0 / s6, 2.0 / s6]], atol=1e-12)

    def test_orthonormality_n24(self, solved):
        sol = solved(alpha=0.5, n=24)
        G = sol.basis.gram()
        xi = sol.basis.xi()
        assert np.max(np.abs(xi @ G @ xi.T - np.eye(24))) <= 1e-8

    def test_recursion_equivalence_n8(self, solved):
        sol = solved(alpha=0.5, n=8)
        G = sol.basis.gram()
        assert np.max(np.abs(orthonormalize(G) - gram_schmidt_xi(G))) <= 1e-8

    def test_lower_triangular_positive_diagonal(self, basis6):
        xi = basis6.xi()
        assert np.allclose(xi, np.tril(xi))
        assert np.all(np.diag(xi) > 0.0)

    def test_degeneracy_error_names_index(self, paper_problem):
        dup = CollocationSet(
            points=((0.5, 0.5), (0.5, 0.5), (0.25, 0.5)),
            scheme="diagonal-grid",
            domain=(0.0, 1.0, 1.0),
        )
        basis = CollocationBasis(paper_problem, dup)
        with pytest.raises(DegeneracyError) as ei:
            basis.xi()
        assert ei.value.index == 1


class TestCompleteness:
    def test_bessel_residual_monotone(self, paper_problem):
        # projecting the kernel section at a fixed off-node point: captured
        # energy grows with n and never exceeds K(x0, x0)
        x0, t0 = 0.35, 0.65
        cap = {}
        for n in (4, 8, 16):
            basis = CollocationBasis(
                paper_problem, make_collocation(n, "diagonal-grid", paper_problem)
            )
            xi = basis.xi()
            psis = np.array([basis.psi_unit(j, x0, t0) for j in range(n)])
            cap[n] = float(np.sum((xi @ psis) ** 2))
        k_diag = rk4(x0, x0) * rk2(t0, t0)
        assert cap[4] <= cap[8] <= cap[16]
        assert cap[16] <= k_diag + 1e-9
        assert k_diag - cap[16] >= -1e-9

    def test_permutation_covariance(self, paper_problem):
        base = make_collocation(10, "diagonal-grid", paper_problem)
        rng = np.random.default_rng(42)
        perm = rng.permutation(10)
        shuffled = CollocationSet(
            points=tuple(base.points[k] for k in perm),
            scheme="diagonal-grid",
            domain=base.domain,
        )
        sol_a = solve(paper_problem, 10, collocation=base, sweeps=20)
        sol_b = solve(paper_problem, 10, collocation=shuffled, sweeps=20)
        for z in (0.2, 0.5, 0.8):
            for t in (0.25, 0.75):
                assert abs(sol_a.evaluate(z, t) - sol_b.evaluate(z, t)) <= 1e-6
