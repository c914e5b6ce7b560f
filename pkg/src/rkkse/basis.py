"""Collocation points, the trial functions psi_i, their Gram matrix and the
lower-triangular orthonormalization coefficients.

psi_i is the linear operator applied, in the source variables, to the tensor
kernel and frozen at the i-th collocation node.  All kernel algebra happens
in unit coordinates (x, t) = ((zeta-a)/(b-a), tau/T); the operator
coefficients are evaluated at physical points and carry the chain-rule
factors 1/h^m and T^(-alpha).

Gram entries use the representer identity <psi_i, psi_j> = (L psi_j)(node_i),
whose only non-polynomial piece is the doubly fractional time term
D^a_t [D^a_u R2(u, t)|_{u=t_j}]; that one goes through adaptive quadrature
over exact inner evaluations.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from rkkse import _core, kernels
from rkkse._purecore import _r2_section
from rkkse.errors import ContractError, DegeneracyError, DomainError
from rkkse.fracalc import caputo_numeric
from rkkse.operator import l_coefficients

SCHEMES = ("diagonal-grid", "halton")


def _vdc(m, base=2):
    f, r = 1.0, 0.0
    while m > 0:
        m, rem = divmod(m, base)
        f /= base
        r += f * rem
    return r


def _diagonal_grid_unit(n):
    """Dyadic interior grids of refinement levels (p, q), anti-diagonal order.

    Level l holds the odd multiples of 2^-l; level pairs are visited by
    increasing p+q, then increasing p, points lexicographically inside.
    The first point is the square's center and prefixes are stable.
    """
    pts = []
    s = 2
    while len(pts) < n:
        for p in range(1, s):
            q = s - p
            for x in (k * 2.0**-p for k in range(1, 2**p, 2)):
                for t in (k * 2.0**-q for k in range(1, 2**q, 2)):
                    pts.append((x, t))
                    if len(pts) == n:
                        return pts
        s += 1
    return pts


def _halton_unit(n):
    """Halton points in bases (2, 3), starting at index 1 to stay interior."""
    return [(_vdc(m, 2), _vdc(m, 3)) for m in range(1, n + 1)]


@dataclass(frozen=True)
class CollocationSet:
    """Ordered collocation points in the open-closed region (a,b) x (0,T]."""

    points: tuple
    scheme: str
    domain: tuple                  # (a, b, T)

    @property
    def n(self):
        return len(self.points)

    def unit_points(self):
        a, b, T = self.domain
        return [((z - a) / (b - a), t / T) for z, t in self.points]


def make_collocation(n, scheme="diagonal-grid", domain=(0.0, 1.0, 1.0)):
    """First n points of the chosen deterministic dense sequence."""
    if n < 1:
        raise ContractError(f"need n >= 1, got {n}")
    if hasattr(domain, "a"):
        domain = (domain.a, domain.b, domain.T)
    a, b, T = domain
    if scheme == "diagonal-grid":
        unit = _diagonal_grid_unit(n)
    elif scheme == "halton":
        unit = _halton_unit(n)
    else:
        raise ContractError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    pts = tuple((a + (b - a) * x, T * t) for x, t in unit)
    return CollocationSet(points=pts, scheme=scheme, domain=(a, b, T))


def fill_distance(points, domain=(0.0, 1.0, 1.0), probe=33):
    """Largest distance from a probe-grid point of the domain to the point set."""
    a, b, T = domain
    pts = np.asarray(points, dtype=float)
    worst = 0.0
    for z in np.linspace(a, b, probe):
        for t in np.linspace(0.0, T, probe):
            d = np.min(np.hypot(pts[:, 0] - z, pts[:, 1] - t))
            worst = max(worst, float(d))
    return worst


def _r2_du(at, idx):
    """d/du R2(u, idx) at u = at (classical time-kernel slope)."""
    if at <= idx:
        return idx + at * idx - 0.5 * at * at
    return idx + 0.5 * idx * idx


class CollocationBasis:
    """Trial functions, Gram matrix and orthonormalization for one problem."""

    def __init__(self, problem, colloc, caputo_tol=1e-11):
        self.problem = problem
        self.colloc = colloc
        self.caputo_tol = caputo_tol
        self.alpha = problem.alpha.alpha
        self.h = problem.b - problem.a
        self.time_scale = problem.T ** (-self.alpha)
        self.unit_nodes = colloc.unit_points()
        fam4 = kernels.family4()
        self.chat = []
        self.slices = []
        self.r2secs = []
        for (z, t), (x, u) in zip(colloc.points, self.unit_nodes):
            c = l_coefficients(problem, z, t)
            self.chat.append([c[m] / self.h**m for m in range(4)])
            self.slices.append([fam4.slice_d1(x, m) for m in range(4)])
            self.r2secs.append(_r2_section(u))
        self.chat = np.asarray(self.chat)
        self._gram = None
        self._gram_asymmetry = None
        self._xi = None

    @property
    def n(self):
        return self.colloc.n

    # -- time-kernel pieces ------------------------------------------------

    def _d_time(self, j, t):
        """D_j(t) = Caputo in u of R2(u, t) at u = t_j (unit time)."""
        tj = self.unit_nodes[j][1]
        if self.alpha == 1.0:
            return _r2_du(tj, t)
        return _core.r2_caputo(tj, t, self.alpha)

    def _cap_r2(self, j, tstar):
        """Caputo in t of R2(t_j, t), evaluated at t = tstar."""
        tj = self.unit_nodes[j][1]
        if self.alpha == 1.0:
            return _r2_du(tstar, tj)
        return _core.r2_caputo(tstar, tj, self.alpha)

    def _dd_time(self, j, tstar):
        """Doubly fractional term: Caputo in t of D_j, at t = tstar."""
        tj = self.unit_nodes[j][1]
        if self.alpha == 1.0:
            return 1.0 + min(tj, tstar)
        return caputo_numeric(
            lambda ts: _core.r2_caputo_dt_array(tj, ts, self.alpha),
            self.alpha,
            tstar,
            tol=self.caputo_tol,
            breakpoints=(tj,),
            vectorized=True,
        )

    # -- psi and its derivatives (unit coordinates) -------------------------

    def psi_unit(self, j, x, t, dx=0):
        breaks, coefs = self.r2secs[j]
        r2 = _core.pp_eval(breaks, coefs, t, 0)
        spatial = 0.0
        for m in range(4):
            spatial += self.chat[j][m] * self.slices[j][m](x, deriv=dx)
        return spatial * r2 + self.time_scale * self.slices[j][0](x, deriv=dx) * self._d_time(j, t)

    def psi_capt_unit(self, j, x, tstar):
        """Caputo in t of psi_j(x, .) at tstar (unit coordinates)."""
        cap = self._cap_r2(j, tstar)
        spatial = 0.0
        for m in range(4):
            spatial += self.chat[j][m] * self.slices[j][m](x)
        return spatial * cap + self.time_scale * self.slices[j][0](x) * self._dd_time(j, tstar)

    def psi(self, j, zeta, tau, d_zeta=0):
        """psi_j and its zeta-derivatives at a physical point."""
        if d_zeta > 3 or d_zeta < 0:
            raise ContractError(f"psi derivatives limited to order 3, got {d_zeta}")
        p = self.problem
        if not p.in_domain(zeta, tau):
            raise DomainError(f"({zeta}, {tau}) outside the problem domain")
        x = (zeta - p.a) / self.h
        t = tau / p.T
        return self.psi_unit(j, x, t, dx=d_zeta) / self.h**d_zeta

    # -- Gram matrix ---------------------------------------------------------

    def gram_entry(self, i, j):
        """<psi_i, psi_j> via (L psi_j)(node_i)."""
        xi_, ti_ = self.unit_nodes[i]
        val = self.time_scale * self.psi_capt_unit(j, xi_, ti_)
        for m in range(4):
            val += self.chat[i][m] * self.psi_unit(j, xi_, ti_, dx=m)
        return val

    def gram(self):
        """Symmetrized Gram matrix; raw asymmetry kept for diagnostics."""
        if self._gram is None:
            n = self.n
            G = np.empty((n, n))
            for i in range(n):
                for j in range(n):
                    G[i, j] = self.gram_entry(i, j)
            self._gram_asymmetry = float(np.max(np.abs(G - G.T)))
            self._gram = 0.5 * (G + G.T)
        return self._gram

    @property
    def gram_asymmetry(self):
        self.gram()
        return self._gram_asymmetry

    def xi(self):
        if self._xi is None:
            self._xi = orthonormalize(self.gram())
        return self._xi

    def psi_node_table(self):
        """PSI[q, j, d] = d-th zeta-derivative of psi_j at collocation node q."""
        n = self.n
        tab = np.empty((n, n, 4))
        for q, (xq, tq) in enumerate(self.unit_nodes):
            for j in range(n):
                for d in range(4):
                    tab[q, j, d] = self.psi_unit(j, xq, tq, dx=d) / self.h**d
        return tab


def psi(basis, i, point, d_zeta=0):
    """Functional front for the i-th trial function at a physical point."""
    return basis.psi(i, point[0], point[1], d_zeta=d_zeta)


def _plain_cholesky(G, pivot_floor=1e-12):
    """Row-by-row Cholesky naming the first (numerically) non-positive pivot."""
    n = len(G)
    L = np.zeros_like(G)
    for i in range(n):
        for j in range(i + 1):
            s = G[i, j] - np.dot(L[i, :j], L[j, :j])
            if i == j:
                if s <= pivot_floor * abs(G[i, i]):
                    raise DegeneracyError(
                        f"Gram matrix lost positive definiteness at index {i} "
                        "(collocation points too close or kernel invalid)",
                        index=i,
                    )
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


def orthonormalize(gram):
    """Lower-triangular xi with xi G xi^T = I, positive diagonal.

    Computed as the inverse of the Cholesky factor (mathematically the
    classical Gram-Schmidt recursion, numerically stabler), followed by one
    refinement pass that squares the residual orthogonality error.
    """
    G = np.asarray(gram, dtype=float)
    L = _plain_cholesky(G)
    n = len(G)
    xi = solve_triangular(L, np.eye(n), lower=True)
    E = xi @ G @ xi.T
    F = _plain_cholesky(0.5 * (E + E.T))
    xi = solve_triangular(F, xi, lower=True)
    return xi


def gram_schmidt_xi(gram):
    """The classical triangular recursion (d_ik, c_ik); kept as a small-n oracle.

    xi_11 = 1/||psi_1||; c_ik = <psi_i, Psi_k>; d_i^2 = ||psi_i||^2 - sum c_ik^2;
    row i is (-sum_{k=j..i-1} c_ik xi_kj) / d_i off-diagonal and 1/d_i on it.
    """
    G = np.asarray(gram, dtype=float)
    n = len(G)
    xi = np.zeros((n, n))
    xi[0, 0] = 1.0 / math.sqrt(G[0, 0])
    for i in range(1, n):
        c = np.array([float(xi[k, : k + 1] @ G[i, : k + 1]) for k in range(i)])
        d2 = G[i, i] - float(np.dot(c, c))
        if d2 <= 0.0:
            raise DegeneracyError(
                f"Gram-Schmidt breakdown at index {i}", index=i
            )
        d = math.sqrt(d2)
        for j in range(i):
            xi[i, j] = -float(np.dot(c[j:i], xi[j:i, j])) / d
        xi[i, i] = 1.0 / d
    return xi
