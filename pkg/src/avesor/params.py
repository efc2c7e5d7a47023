"""Scalar theory of the SOR-like iteration for Ax - |x| - b = 0.

With nu = ||A^{-1}||_2 < 1 and relaxation parameter omega in (0, 2), the
iteration error is contracted by the 2x2 nonnegative matrix

    T = [[a, c],
         [a, a + c]],      a = |1 - omega|,  c = omega^2 * nu,

measured in the omega-weighted seminorm sqrt(||e_x||^2 + ||e_y||^2/omega^2).
Everything in this module is a pure scalar function of (nu, omega): the
contraction norm ||T||_2, the sign function whose negativity delimits the
convergent omega-interval, the closed-form interval endpoints, and the
optimal, approximate-optimal and competing relaxation parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, NonDifferentiablePointError, NumericalBreakdownError

__all__ = [
    "TAU",
    "Region",
    "ParamBundle",
    "tnorm",
    "f_eval",
    "g_eval",
    "g_derivative",
    "omega_opt",
    "omega_aopt",
    "omega_guo",
    "eta",
    "convergent_region",
    "param_bundle",
]

# Contraction-bound constant: ||T||_2 <= eta(nu, omega) / TAU on (0, 2).
TAU = 2.0 / (3.0 + math.sqrt(5.0))

_SQRT_HALF = math.sqrt(2.0) / 2.0

# |2 nu^2 - 1| below this switches to the borderline-case region endpoints,
# since the general closed forms divide by 2 nu^2 - 1.
_BRANCH_TOL = 1e-10

# Lower region endpoint at the borderline value nu = sqrt(2)/2 (closed form);
# the upper endpoint there is exactly 1.
_OMEGA_BORDER_LO = (
    -1.0 / 7.0 - math.sqrt(2.0) / 28.0 + math.sqrt(242.0 + 64.0 * math.sqrt(2.0)) / 28.0
)

_BISECTION_MAX_STEPS = 200


def _check_nu(nu):
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu!r}")


def _check_omega(omega):
    if not 0.0 < omega < 2.0:
        raise DomainError(f"omega must lie in (0, 2), got {omega!r}")


def tnorm(nu, omega):
    """Contraction norm ||T||_2 of the 2x2 error-propagation matrix.

    The larger eigenvalue of H = T^T T solves
    lam^2 - (3a^2 + 2c^2 + 2ac) lam + a^4 = 0, so

        ||T||_2^2 = (w + sqrt(w^2 - 4a^4)) / 2,   w = 3a^2 + 2c^2 + 2ac.
    """
    _check_nu(nu)
    _check_omega(omega)
    a = abs(1.0 - omega)
    c = omega * omega * nu
    w = 3.0 * a * a + 2.0 * c * c + 2.0 * a * c
    return math.sqrt((w + math.sqrt(w * w - 4.0 * a ** 4)) / 2.0)


def f_eval(nu, omega):
    """Convergence sign function: 3a^2 + 2c^2 + 2ac - a^4 - 1.

    Negative exactly where the sufficient convergence condition holds, i.e.
    strictly inside the convergent omega-interval.
    """
    _check_nu(nu)
    _check_omega(omega)
    a = abs(1.0 - omega)
    c = omega * omega * nu
    return 3.0 * a * a + 2.0 * c * c + 2.0 * a * c - a ** 4 - 1.0


def g_eval(nu, omega):
    """Twice the squared contraction norm, written out as a function of omega.

    g(omega) = 3(w-1)^2 + 2 nu^2 w^4 + 2 nu w^2 |w-1|
               + sqrt([...]^2 - 4 (w-1)^4)

    Continuous on (0, 2) but not differentiable at omega = 1; minimizing g is
    equivalent to minimizing the contraction norm.
    """
    _check_nu(nu)
    _check_omega(omega)
    w = omega
    r = 3.0 * (w - 1.0) ** 2 + 2.0 * nu * nu * w ** 4 + 2.0 * nu * w * w * abs(w - 1.0)
    return r + math.sqrt(r * r - 4.0 * (w - 1.0) ** 4)


def _r_low(nu, w):
    # radicand base on the decreasing branch (omega < 1): |w-1| = 1-w
    return 3.0 * (w - 1.0) ** 2 + 2.0 * nu * nu * w ** 4 + 2.0 * nu * w * w * (1.0 - w)


def _s_low(nu, w):
    return 6.0 * (w - 1.0) + 8.0 * nu * nu * w ** 3 + 2.0 * nu * (2.0 * w - 3.0 * w * w)


def _g_derivative_low(nu, w):
    r = _r_low(nu, w)
    s = _s_low(nu, w)
    return s + (r * s - 8.0 * (w - 1.0) ** 3) / math.sqrt(r * r - 4.0 * (w - 1.0) ** 4)


def _g_derivative_high(nu, w):
    rr = 3.0 * (w - 1.0) ** 2 + 2.0 * nu * nu * w ** 4 + 2.0 * nu * w * w * (w - 1.0)
    t = 6.0 * (w - 1.0) + 8.0 * nu * nu * w ** 3 + 2.0 * nu * (3.0 * w * w - 2.0 * w)
    return t + (rr * t - 8.0 * (w - 1.0) ** 3) / math.sqrt(rr * rr - 4.0 * (w - 1.0) ** 4)


def g_derivative(nu, omega):
    """Derivative of ``g_eval`` in omega, piecewise across the kink at 1.

    On (0, 1) the derivative is s + (r s - 8(w-1)^3) / sqrt(r^2 - 4(w-1)^4)
    with r = 3(w-1)^2 + 2 nu^2 w^4 + 2 nu w^2 (1-w) and s = r'; on (1, 2) the
    same expression with the absolute value resolved the other way.  Raises
    ``NonDifferentiablePointError`` at omega = 1.
    """
    _check_nu(nu)
    _check_omega(omega)
    if omega == 1.0:
        raise NonDifferentiablePointError("g is not differentiable at omega = 1")
    if omega < 1.0:
        return _g_derivative_low(nu, omega)
    return _g_derivative_high(nu, omega)


def omega_opt(nu, tol=1e-12):
    """Relaxation parameter minimizing the contraction norm ||T||_2.

    Equals 1 for nu <= 1/4.  For nu > 1/4 the derivative of g on (0, 1) has a
    unique root, located by bisection on (0, 1); the bisection stops when
    |g'(omega)| <= tol or the bracket width drops below tol.
    """
    _check_nu(nu)
    if tol <= 0:
        raise DomainError("tol must be positive")
    if nu <= 0.25:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(_BISECTION_MAX_STEPS):
        mid = 0.5 * (lo + hi)
        val = _g_derivative_low(nu, mid)
        if abs(val) <= tol or (hi - lo) <= tol:
            return mid
        if val > 0.0:
            hi = mid
        else:
            lo = mid
    raise NumericalBreakdownError(
        f"bisection for the optimal parameter did not converge within {_BISECTION_MAX_STEPS} steps"
    )


def omega_aopt(nu):
    """Closed-form approximate-optimal parameter (sqrt(4 nu + 1) - 1)/(2 nu).

    This is the positive solution of 1 - omega = nu omega^2, evaluated in the
    rationalized form 2/(1 + sqrt(4 nu + 1)) which stays accurate as nu -> 0.
    It minimizes eta(nu, .) over (0, 2).
    """
    _check_nu(nu)
    return 2.0 / (1.0 + math.sqrt(4.0 * nu + 1.0))


def omega_guo(rho):
    """Competing parameter 2/(1 + sqrt(1 - rho)) with rho = rho(A^{-1}).

    May fall outside the convergent omega-interval, in which case the
    iteration run with it diverges.
    """
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho!r}")
    return 2.0 / (1.0 + math.sqrt(1.0 - rho))


def eta(nu, omega):
    """max(|1 - omega|, nu omega^2); eta/TAU bounds the contraction norm."""
    _check_nu(nu)
    _check_omega(omega)
    return max(abs(1.0 - omega), nu * omega * omega)


@dataclass(frozen=True)
class Region:
    """Open interval of omega on which the iteration provably converges.

    ``case`` records which branch of the closed-form endpoints applies:
    "Omega1" for nu below sqrt(2)/2, "Omega2" above, "Omega3" at the
    borderline value.
    """

    case: str
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 < self.lo < self.hi < 2.0:
            raise DomainError(f"degenerate region ({self.lo}, {self.hi})")

    def __contains__(self, omega):
        return self.lo < omega < self.hi

    @property
    def width(self):
        return self.hi - self.lo


def _endpoints_below(nu):
    """Roots of f_eval bracketing the convergent interval for nu < sqrt(2)/2."""
    beta = 2.0 * nu * nu - 1.0
    gamma = math.sqrt(-(nu - 1.0) * (nu + 5.0))
    zeta = math.sqrt(-(nu + 1.0) * (nu - 5.0))
    alpha = 4.0 - 2.0 * nu
    xi = 4.0 + 2.0 * nu
    disc_lo = -(8.0 * nu ** 3 - 16.0 * nu ** 2 + 4.0 * nu - 1.0) - (8.0 * nu ** 2 - 2.0 * nu) * gamma
    lo = -alpha / (4.0 * beta) + gamma / (2.0 * beta) - math.sqrt(disc_lo) / (2.0 * beta)
    disc_hi = (8.0 * nu ** 3 + 16.0 * nu ** 2 + 4.0 * nu + 1.0) + (8.0 * nu ** 2 + 2.0 * nu) * zeta
    hi = -xi / (4.0 * beta) - zeta / (2.0 * beta) + math.sqrt(disc_hi) / (2.0 * beta)
    return lo, hi


def _endpoints_above(nu):
    """Roots of f_eval bracketing the convergent interval for nu > sqrt(2)/2."""
    beta = 2.0 * nu * nu - 1.0
    gamma = math.sqrt(-(nu - 1.0) * (nu + 5.0))
    alpha = 4.0 - 2.0 * nu
    base = -(8.0 * nu ** 3 - 16.0 * nu ** 2 + 4.0 * nu - 1.0)
    swing = (8.0 * nu ** 2 - 2.0 * nu) * gamma
    lo = -alpha / (4.0 * beta) + gamma / (2.0 * beta) + math.sqrt(base - swing) / (2.0 * beta)
    hi = -alpha / (4.0 * beta) - gamma / (2.0 * beta) + math.sqrt(base + swing) / (2.0 * beta)
    return lo, hi


def convergent_region(nu):
    """Convergent omega-interval for a given nu, from the closed-form roots.

    The interval shrinks as nu grows and collapses toward the golden-ratio
    point (sqrt(5)-1)/2 as nu -> 1.  Within 1e-10 of the branch point
    2 nu^2 = 1 the dedicated borderline endpoints are used, because the
    general closed forms divide by 2 nu^2 - 1.
    """
    _check_nu(nu)
    beta = 2.0 * nu * nu - 1.0
    if abs(beta) < _BRANCH_TOL:
        return Region("Omega3", _OMEGA_BORDER_LO, 1.0)
    if nu < _SQRT_HALF:
        lo, hi = _endpoints_below(nu)
        return Region("Omega1", lo, hi)
    lo, hi = _endpoints_above(nu)
    return Region("Omega2", lo, hi)


@dataclass(frozen=True)
class ParamBundle:
    """All derived parameters for one problem: nu plus every omega choice.

    ``tnorm_at_opt`` is the contraction norm at the optimal parameter and
    ``eta_ratio_at_aopt`` the upper bound eta/tau at the approximate-optimal
    one; the former never exceeds the latter.
    """

    nu: float
    omega_o: float
    omega_aopt: float
    omega_opt: float
    tnorm_at_opt: float
    eta_ratio_at_aopt: float
    region: Region
    tau: float = field(default=TAU)

    def __post_init__(self):
        if self.omega_aopt not in self.region or self.omega_opt not in self.region:
            raise DomainError("optimal parameters fell outside the convergent region")
        if not self.tnorm_at_opt < 1.0:
            raise DomainError("contraction norm at the optimal parameter must be < 1")
        if self.tnorm_at_opt > self.eta_ratio_at_aopt:
            raise DomainError("contraction norm exceeded its eta/tau upper bound")


def param_bundle(nu):
    """Assemble every derived parameter for a problem with the given nu."""
    _check_nu(nu)
    w_opt = omega_opt(nu)
    w_aopt = omega_aopt(nu)
    return ParamBundle(
        nu=nu,
        omega_o=omega_guo(nu),
        omega_aopt=w_aopt,
        omega_opt=w_opt,
        tnorm_at_opt=tnorm(nu, w_opt),
        eta_ratio_at_aopt=eta(nu, w_aopt) / TAU,
        region=convergent_region(nu),
    )
