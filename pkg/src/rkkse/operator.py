"""Problem definition for the time-fractional Kudryashov-Sinelshchikov equation.

The governing equation (density w, parameters beta, gamma, mu, nu) is

    D^a_t w + g w w_z + w_zzz - (1+b) w_z w_zz - w w_zzz
        - nu w_zz - mu w w_zz - mu w_z^2 = 0

on [a, b] x [0, T] with initial trace w(z, 0) and boundary traces w(a, t),
w(b, t) taken from a reference solution.  The homogenizing substitution
w = v + f splits the equation into a linear operator L acting on v and a
nonlinear right-hand side M; the two recombine exactly to the residual of
w = v + f, which the tests enforce.

The built-in reference is the traveling kink

    w(z, t) = A0 + A1 tanh(z - speed * t^alpha / Gamma(1+alpha)),
    A0 = (-4 + g - mu nu) / (-4 + g + mu^2),
    A1 = -2 (mu + nu) / (-4 + g + mu^2),
    speed = g * A0,

an exact solution of the classical (alpha = 1) equation when beta = -4; for
alpha < 1 it is the tabulated reference, not an exact solution.
"""

import math
from dataclasses import dataclass, field

from rkkse.errors import ContractError, DomainError
from rkkse.fracalc import FractionalOrder, caputo_numeric, gamma_fn


def _tanh_deriv(x, j):
    t = math.tanh(x)
    if j == 0:
        return t
    s = 1.0 - t * t
    if j == 1:
        return s
    if j == 2:
        return -2.0 * t * s
    if j == 3:
        return -2.0 * s * (1.0 - 3.0 * t * t)
    raise ContractError(f"tanh derivative order {j} unsupported")


class TravelingWaveReference:
    """Kink reference solution with the fractional traveling-wave phase."""

    def __init__(self, alpha, beta, gamma, mu, nu):
        den = -4.0 + gamma + mu * mu
        self.alpha = alpha
        self.a0 = (-4.0 + gamma - mu * nu) / den
        self.a1 = -2.0 * (mu + nu) / den
        self.speed = gamma * self.a0

    def _phase(self, tau):
        return tau ** self.alpha / gamma_fn(1.0 + self.alpha)

    def _dphase(self, tau):
        return tau ** (self.alpha - 1.0) / gamma_fn(self.alpha)

    def value(self, zeta, tau):
        return self.a0 + self.a1 * math.tanh(zeta - self.speed * self._phase(tau))

    def dzeta(self, zeta, tau, j):
        if j == 0:
            return self.value(zeta, tau)
        return self.a1 * _tanh_deriv(zeta - self.speed * self._phase(tau), j)

    def dtau(self, zeta, tau, j=0):
        arg = zeta - self.speed * self._phase(tau)
        return -self.a1 * _tanh_deriv(arg, j + 1) * self.speed * self._dphase(tau)


class QuadraticReference:
    """Manufactured solution A0 z^2 + B0 z + C0 + 2 nu A0 t^alpha / Gamma(1+alpha).

    Solves the equation exactly when gamma = mu = 0 and beta = -1 (the third
    spatial derivative vanishes identically, so the remaining nonlinear term
    drops on this solution).
    """

    def __init__(self, alpha, nu, a0=1.0, b0=0.0, c0=0.0):
        self.alpha = alpha
        self.nu = nu
        self.a0, self.b0, self.c0 = a0, b0, c0

    def value(self, zeta, tau):
        rise = 2.0 * self.nu * self.a0 * tau ** self.alpha / gamma_fn(1.0 + self.alpha)
        return self.a0 * zeta * zeta + self.b0 * zeta + self.c0 + rise

    def dzeta(self, zeta, tau, j):
        if j == 0:
            return self.value(zeta, tau)
        if j == 1:
            return 2.0 * self.a0 * zeta + self.b0
        if j == 2:
            return 2.0 * self.a0
        return 0.0

    def dtau(self, zeta, tau, j=0):
        if j > 0:
            return 0.0
        return 2.0 * self.nu * self.a0 * tau ** (self.alpha - 1.0) / gamma_fn(self.alpha)


@dataclass(frozen=True)
class KseProblem:
    """Equation parameters, domain and reference solution."""

    alpha: FractionalOrder
    beta: float
    gamma: float
    mu: float
    nu: float
    a: float = 0.0
    b: float = 1.0
    T: float = 1.0
    reference: object = None
    lifting: object = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if not isinstance(self.alpha, FractionalOrder):
            object.__setattr__(self, "alpha", FractionalOrder(float(self.alpha)))
        if not self.a < self.b:
            raise DomainError(f"need a < b, got a={self.a}, b={self.b}")
        if not self.T > 0.0:
            raise DomainError(f"need T > 0, got T={self.T}")
        if abs(-4.0 + self.gamma + self.mu**2) < 1e-12:
            raise DomainError("degenerate parameters: -4 + gamma + mu^2 vanishes")
        if self.reference is None:
            object.__setattr__(
                self,
                "reference",
                TravelingWaveReference(
                    self.alpha.alpha, self.beta, self.gamma, self.mu, self.nu
                ),
            )
        object.__setattr__(self, "lifting", Lifting(self))

    @classmethod
    def paper_config(cls, alpha=0.5, **overrides):
        """The worked configuration: beta=-4, gamma=0.1, nu=0.75, mu=-16/3."""
        params = dict(alpha=alpha, beta=-4.0, gamma=0.1, mu=-16.0 / 3.0, nu=0.75)
        params.update(overrides)
        return cls(**params)

    def in_domain(self, zeta, tau):
        return self.a <= zeta <= self.b and 0.0 <= tau <= self.T


CONFIG_KEYS = ("alpha", "beta", "gamma", "mu", "nu", "a", "b", "T")


def parse_config(text):
    """Parse `key = value` lines (also `key: value`); keys per CONFIG_KEYS."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, _, val = line.partition(sep)
                break
        else:
            raise DomainError(f"config line {lineno}: expected `key = value`, got {raw!r}")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise DomainError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise DomainError(f"config line {lineno}: non-numeric value {val.strip()!r}")
    return values


def load_problem(path, **overrides):
    with open(path) as fh:
        values = parse_config(fh.read())
    values.update(overrides)
    missing = [k for k in ("alpha", "beta", "gamma", "mu", "nu") if k not in values]
    if missing:
        raise DomainError(f"config missing keys: {', '.join(missing)}")
    return KseProblem(**values)


class Lifting:
    """Closed-form function absorbing the initial and boundary traces.

    f(z, t) = w0(z) + pa(z) E1(t) + pb(z) E2(t) + chi(z) (D1(t) + 2 E1(t)/h)

    with w0 the initial trace, E1/E2 the boundary increments, D1 the left
    boundary slope increment, pa/pb the quadratic blending weights and
    chi(z) = (z-a)(b-z)/h.  By construction f matches the reference on the
    initial and both lateral boundaries, and its z-slope at z = a.
    """

    def __init__(self, problem):
        self.problem = problem
        self.ref = problem.reference
        self._caputo_cache = {}

    def _increments(self, tau):
        ref, p = self.ref, self.problem
        e1 = ref.value(p.a, tau) - ref.value(p.a, 0.0)
        e2 = ref.value(p.b, tau) - ref.value(p.b, 0.0)
        d1 = ref.dzeta(p.a, tau, 1) - ref.dzeta(p.a, 0.0, 1)
        return e1, e2, d1

    def value(self, zeta, tau, d_zeta=0):
        if d_zeta > 3 or d_zeta < 0:
            raise ContractError(f"lifting derivatives limited to order 3, got {d_zeta}")
        p = self.problem
        h = p.b - p.a
        e1, e2, d1 = self._increments(tau)
        base = self.ref.dzeta(zeta, 0.0, d_zeta) if d_zeta else self.ref.value(zeta, 0.0)
        if d_zeta == 0:
            pa = ((p.b - zeta) / h) ** 2
            pb = ((zeta - p.a) / h) ** 2
            chi = (zeta - p.a) * (p.b - zeta) / h
        elif d_zeta == 1:
            pa = -2.0 * (p.b - zeta) / h**2
            pb = 2.0 * (zeta - p.a) / h**2
            chi = (p.a + p.b - 2.0 * zeta) / h
        elif d_zeta == 2:
            pa = 2.0 / h**2
            pb = 2.0 / h**2
            chi = -2.0 / h
        else:
            pa = pb = chi = 0.0
        return base + pa * e1 + pb * e2 + chi * (d1 + 2.0 * e1 / h)

    def dtau(self, zeta, tau):
        p = self.problem
        h = p.b - p.a
        e1 = self.ref.dtau(p.a, tau)
        e2 = self.ref.dtau(p.b, tau)
        d1 = self.ref.dtau(p.a, tau, 1)
        pa = ((p.b - zeta) / h) ** 2
        pb = ((zeta - p.a) / h) ** 2
        chi = (zeta - p.a) * (p.b - zeta) / h
        return pa * e1 + pb * e2 + chi * (d1 + 2.0 * e1 / h)

    def caputo(self, zeta, tau, tol=1e-9):
        """Caputo derivative in tau of the lifting at fixed zeta (memoized).

        The reference's time dependence enters through tau^alpha, so the
        integrand carries a known tau^(alpha-1) factor at the origin; the
        quadrature is told about it.
        """
        key = (zeta, tau, tol)
        hit = self._caputo_cache.get(key)
        if hit is None:
            alpha = self.problem.alpha.alpha
            hit = caputo_numeric(
                lambda s: self.dtau(zeta, s),
                alpha,
                tau,
                tol=tol,
                left_exponent=alpha - 1.0 if alpha < 1.0 else None,
            )
            self._caputo_cache[key] = hit
        return hit

    def bundle(self, zeta, tau):
        """f and its zeta-derivatives up to order 3 at (zeta, tau)."""
        return tuple(self.value(zeta, tau, j) for j in range(4))


def lifting_f(problem, zeta, tau, d_zeta=0):
    """The homogenizing lifting and its zeta-derivatives up to order 3."""
    if not problem.in_domain(zeta, tau):
        raise DomainError(f"({zeta}, {tau}) outside the problem domain")
    return problem.lifting.value(zeta, tau, d_zeta)


def caputo_f(problem, zeta, tau, tol=1e-9):
    """Caputo derivative in tau of the lifting, via adaptive quadrature."""
    if tau <= 0.0 or tau > problem.T:
        raise DomainError(f"caputo_f requires tau in (0, T], got {tau}")
    return problem.lifting.caputo(zeta, tau, tol)


def l_coefficients(problem, zeta, tau, f_bundle=None):
    """Coefficients (c0, c1, c2, c3) of L v = D^a v + c0 v + c1 v_z + c2 v_zz + c3 v_zzz."""
    f, f1, f2, f3 = f_bundle if f_bundle is not None else problem.lifting.bundle(zeta, tau)
    g, b, mu, nu = problem.gamma, problem.beta, problem.mu, problem.nu
    c0 = g * f1 - f3 - mu * f2
    c1 = g * f - (1.0 + b) * f2 - 2.0 * mu * f1
    c2 = -(1.0 + b) * f1 - nu - mu * f
    c3 = 1.0 - f
    return c0, c1, c2, c3


def apply_L(problem, v_bundle, point, f_bundle=None):
    """The linear operator on the bundle (v, v_z, v_zz, v_zzz, D^a_t v)."""
    v, v1, v2, v3, capv = v_bundle
    c0, c1, c2, c3 = l_coefficients(problem, *point, f_bundle=f_bundle)
    return capv + c0 * v + c1 * v1 + c2 * v2 + c3 * v3


def rhs_M(problem, v_bundle, point, caputo_f_value=None, f_bundle=None, tol=1e-9):
    """Nonlinear right-hand side M on the bundle (v, v_z, v_zz, v_zzz).

    Signs follow the recombination identity L v - M = residual(v + f); the
    gamma cross terms sit in L, the self terms here.
    """
    v, v1, v2, v3 = v_bundle
    zeta, tau = point
    f, f1, f2, f3 = f_bundle if f_bundle is not None else problem.lifting.bundle(zeta, tau)
    if caputo_f_value is None:
        caputo_f_value = 0.0 if f_bundle is not None else caputo_f(problem, zeta, tau, tol)
    g, b, mu, nu = problem.gamma, problem.beta, problem.mu, problem.nu
    return (
        -caputo_f_value
        - g * (v * v1 + f * f1)
        - f3
        + (1.0 + b) * (v1 * v2 + f1 * f2)
        + (v * v3 + f * f3)
        + nu * f2
        + mu * (v * v2 + f * f2)
        + mu * (v1 * v1 + f1 * f1)
    )


def residual(problem, w, point, tol=1e-9):
    """Full equation residual of an evaluable w at an interior point.

    w must expose value(z, t), dzeta(z, t, j) for j <= 3 and dtau(z, t); the
    Caputo term is computed by adaptive quadrature of dtau.
    """
    zeta, tau = point
    if not problem.in_domain(zeta, tau) or tau <= 0.0:
        raise DomainError(f"residual point ({zeta}, {tau}) must be interior with tau > 0")
    alpha = problem.alpha.alpha
    cap = caputo_numeric(
        lambda s: w.dtau(zeta, s),
        alpha,
        tau,
        tol=tol,
        left_exponent=alpha - 1.0 if alpha < 1.0 else None,
    )
    return residual_from_bundle(
        problem,
        (w.value(zeta, tau),) + tuple(w.dzeta(zeta, tau, j) for j in (1, 2, 3)),
        cap,
    )


def residual_from_bundle(problem, w_bundle, caputo_w):
    """Residual with the Caputo term supplied (matched symbolically by callers)."""
    w, w1, w2, w3 = w_bundle
    g, b, mu, nu = problem.gamma, problem.beta, problem.mu, problem.nu
    return (
        caputo_w
        + g * w * w1
        + w3
        - (1.0 + b) * w1 * w2
        - w * w3
        - nu * w2
        - mu * w * w2
        - mu * w1 * w1
    )
