"""Special functions and semi-infinite quadrature.

Primitives shared by the kernel and operator layers: Euler Gamma, Bessel
J_nu of real order nu >= -1/2, a recurrence self-test for the Bessel
implementation, and an integrator for semi-infinite integrands whose decay
is controlled by an envelope rho^p * exp(-rho^d).

The integrator has two regimes.  Mildly oscillatory or smooth integrands go
through adaptive Gauss-Kronrod on the truncated interval.  Heavily
oscillatory integrands (Bessel factors with large argument scale) are summed
over half-period panels with a fixed Gauss rule per panel; the panel sums
are accumulated with compensated summation so the cancellation between
half-waves does not eat the result.  Both regimes report an error estimate
that includes the analytic bound on the truncated tail.

All functions here are pure and safe to call from multiple threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sint
from scipy import special as _sps

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "QuadratureError",
    "gamma",
    "bessel_j",
    "check_bessel_recurrence",
    "integrate_semi_infinite",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for the semi-infinite integrator.

    abs_tol / rel_tol  target absolute and relative accuracy; a result is
                       acceptable when its error estimate is below
                       max(abs_tol, rel_tol * |value|).
    max_subdivisions   adaptive subdivision budget for the Gauss-Kronrod
                       regime.
    tail_cut_epsilon   the integration interval is truncated where the decay
                       envelope falls below tail_cut_epsilon * abs_tol; the
                       radius found this way is then doubled for safety.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2048
    tail_cut_epsilon: float = 1e-2

    def __post_init__(self) -> None:
        # the truncation threshold is tail_cut_epsilon * abs_tol, so a zero
        # abs_tol would push the radius to infinity
        if self.abs_tol <= 0 or self.rel_tol < 0:
            raise ValueError("need abs_tol > 0 and rel_tol >= 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")
        if not 0 < self.tail_cut_epsilon < 1:
            raise ValueError("tail_cut_epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class IntegralResult:
    """Value of a quadrature together with its accounting."""

    value: float
    error_estimate: float
    evaluations: int

    def __post_init__(self) -> None:
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be non-negative")


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget is exhausted before convergence.

    Carries the best estimate obtained so far in ``best``.
    """

    def __init__(self, message: str, best: IntegralResult):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# Gamma

def gamma(x: float) -> float:
    """Euler Gamma for real x, rejecting the poles at 0, -1, -2, ...

    Delegates to the C library implementation, which is good to a couple of
    ulp on the range used here.
    """
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma pole at x={x}")
    return math.gamma(x)


# ---------------------------------------------------------------------------
# Bessel J of real order >= -1/2

_SERIES_CUTOFF = 12.0


def bessel_j(nu: float, z: float) -> float:
    """Bessel function of the first kind, real order nu >= -1/2, z >= 0.

    Uses the ascending power series for z <= max(12, 2*nu) and the large
    argument (Hankel) expansion seeded at the reduced order mu in
    [-1/2, 1/2) followed by upward recurrence otherwise.  The recurrence is
    run only while the order stays below z/2, which keeps it stable.

    Near a zero of J_nu the relative error is unbounded, as for any fixed
    precision implementation; accuracy should be read against the envelope
    sqrt(2 / (pi z)).
    """
    if nu < -0.5:
        raise ValueError("order must satisfy nu >= -1/2")
    if z < 0.0:
        raise ValueError("argument must be non-negative")
    if z == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        return math.inf
    if z <= max(_SERIES_CUTOFF, 2.0 * nu):
        return _bessel_series(nu, z)
    return _bessel_large_z(nu, z)


def _bessel_series(nu: float, z: float) -> float:
    # sum_k (-1)^k (z/2)^{nu+2k} / (k! Gamma(nu+k+1)); terms by recurrence,
    # exact accumulation with fsum to tame the alternating cancellation.
    q = 0.25 * z * z
    term = (0.5 * z) ** nu / math.gamma(nu + 1.0)
    terms = [term]
    peak = abs(term)
    for k in range(1, 400):
        term *= -q / (k * (nu + k))
        terms.append(term)
        peak = max(peak, abs(term))
        if abs(term) < 1e-18 * peak and k > 4:
            break
    return math.fsum(terms)


def _bessel_series_deriv(nu: float, z: float) -> float:
    # term-wise derivative of the power series: each term picks up a factor
    # (nu + 2k)/z, which stays exact through the same recurrence.
    q = 0.25 * z * z
    term = (0.5 * z) ** nu / math.gamma(nu + 1.0)
    terms = [term * nu / z]
    peak = abs(term)
    for k in range(1, 400):
        term *= -q / (k * (nu + k))
        terms.append(term * (nu + 2.0 * k) / z)
        peak = max(peak, abs(term))
        if abs(term) < 1e-18 * peak and k > 4:
            break
    return math.fsum(terms)


def _hankel_pq(mu: float, z: float) -> tuple[float, float]:
    # P and Q factors of the large-z expansion for small order mu.
    # Truncated at the smallest term, the standard optimal cut.
    mu4 = 4.0 * mu * mu
    p_acc = 1.0
    q_acc = 0.0
    c = 1.0
    prev = math.inf
    for k in range(1, 60):
        c *= (mu4 - (2 * k - 1) ** 2) / (8.0 * k * z)
        if abs(c) >= prev:
            break
        prev = abs(c)
        if k % 2 == 1:
            q_acc += c if k % 4 == 1 else -c
        else:
            p_acc += c if k % 4 == 0 else -c
        if abs(c) < 1e-18:
            break
    return p_acc, q_acc


def _bessel_large_z(nu: float, z: float) -> float:
    n = math.floor(nu + 0.5)
    mu = nu - n  # reduced order in [-1/2, 1/2)
    vals = []
    for order in (mu, mu + 1.0):
        p, q = _hankel_pq(order, z)
        w = z - order * (0.5 * math.pi) - 0.25 * math.pi
        vals.append(math.sqrt(2.0 / (math.pi * z)) * (p * math.cos(w) - q * math.sin(w)))
    if n == 0:
        return vals[0]
    if n == 1:
        return vals[1]
    j_prev, j_cur = vals
    for i in range(1, n):
        order = mu + i
        j_prev, j_cur = j_cur, (2.0 * order / z) * j_cur - j_prev
    return j_cur


def check_bessel_recurrence(nu: float, z: float) -> float:
    """Residual of z J'_nu(z) - nu J_nu(z) + z J_{nu+1}(z), ideally zero.

    In the power-series regime J' comes from the term-wise derivative of
    the series, which tracks the z^nu singularity of negative orders that
    no finite difference could.  In the asymptotic regime a five-point
    stencil with a deliberately large step is used instead: there the
    evaluation error of bessel_j, not rounding, is what the division by h
    amplifies, and the fourth-order stencil keeps truncation negligible.
    """
    if z <= 0.0:
        raise ValueError("recurrence check needs z > 0")
    if z <= max(_SERIES_CUTOFF, 2.0 * nu):
        deriv = _bessel_series_deriv(nu, z)
    else:
        h = 1e-2
        deriv = (
            bessel_j(nu, z - 2.0 * h)
            - 8.0 * bessel_j(nu, z - h)
            + 8.0 * bessel_j(nu, z + h)
            - bessel_j(nu, z + 2.0 * h)
        ) / (12.0 * h)
    return abs(z * deriv - nu * bessel_j(nu, z) + z * bessel_j(nu + 1.0, z))


# ---------------------------------------------------------------------------
# Semi-infinite quadrature

_OSC_PANEL_THRESHOLD = 40  # half-periods beyond which we leave QUADPACK

_GL_NODES_MAIN = 16
_GL_NODES_CHECK = 12
_GRADE_LEVELS = 30  # dyadic refinement toward rho=0; the envelope exponent
                    # d < 2 makes exp(-rho^d) only C^1 at the origin


def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _truncation_radius(decay_exponent: float, poly_power: float, target: float) -> float:
    """Smallest rho with rho^p e^{-rho^d} < target, then doubled."""

    def log_env(r: float) -> float:
        return poly_power * math.log(r) - r ** decay_exponent

    log_target = math.log(target)
    # start past the envelope mode so log_env is decreasing
    lo = max(1.0, (max(poly_power, 0.0) / decay_exponent) ** (1.0 / decay_exponent) if poly_power > 0 else 1.0)
    hi = lo
    for _ in range(200):
        if log_env(hi) < log_target:
            break
        hi *= 2.0
    else:
        raise ValueError("failed to bracket the truncation radius")
    lo = max(lo, hi / 2.0) if hi > lo else lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if log_env(mid) < log_target:
            hi = mid
        else:
            lo = mid
    return 2.0 * hi


def _tail_bound(decay_exponent: float, poly_power: float, radius: float) -> float:
    """Closed form bound on int_radius^inf rho^p e^{-rho^d} drho."""
    q = (poly_power + 1.0) / decay_exponent
    return _sps.gamma(q) * _sps.gammaincc(q, radius ** decay_exponent) / decay_exponent


def _panel_edges(radius: float, osc_scale: float | None) -> np.ndarray:
    step = math.pi / osc_scale if osc_scale else 0.5
    step = min(step, 0.5)
    main = np.arange(step, radius, step)
    graded = step * 0.5 ** np.arange(_GRADE_LEVELS, 0, -1)
    return np.concatenate([[0.0], graded, main, [radius]])


def _panel_sum(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, n: int) -> tuple[float, int]:
    xg, wg = _leggauss(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = mid[:, None] + half[:, None] * xg[None, :]
    w = half[:, None] * wg[None, :]
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    per_panel = np.einsum("ij,ij->i", vals, w)
    return math.fsum(per_panel.tolist()), x.size


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig,
    *,
    decay_exponent: float,
    poly_power: float = 0.0,
    osc_scale: float | None = None,
) -> IntegralResult:
    """Integrate f over [0, infinity) given its decay envelope.

    Parameters
    ----------
    f : callable
        Integrand.  Must accept a numpy array of abscissas and return the
        integrand values elementwise (the adaptive branch also calls it with
        scalars).
    cfg : QuadratureConfig
    decay_exponent, poly_power : float
        The caller guarantees |f(rho)| <= rho**poly_power *
        exp(-rho**decay_exponent) up to a moderate constant for large rho.
        These control where the interval is truncated and the analytic bound
        added for the discarded tail.
    osc_scale : float, optional
        Dominant oscillation rate of f (for a factor J_nu(r * rho) pass r).
        Beyond roughly forty half-periods the integral is summed panel by
        panel between estimated zero crossings instead of adaptively.

    Returns
    -------
    IntegralResult

    Raises
    ------
    QuadratureError
        If the adaptive branch exhausts its subdivision budget while the
        error estimate is still above tolerance.  The exception carries the
        best estimate.
    """
    if decay_exponent <= 0:
        raise ValueError("decay_exponent must be positive")
    target = cfg.tail_cut_epsilon * max(cfg.abs_tol, 1e-280)
    radius = _truncation_radius(decay_exponent, poly_power, target)
    tail = _tail_bound(decay_exponent, poly_power, radius)

    half_periods = (osc_scale or 0.0) * radius / math.pi
    if half_periods > _OSC_PANEL_THRESHOLD:
        edges = _panel_edges(radius, osc_scale)
        value, n_main = _panel_sum(f, edges, _GL_NODES_MAIN)
        check, n_check = _panel_sum(f, edges, _GL_NODES_CHECK)
        err = abs(value - check) + tail
        return IntegralResult(value, err, n_main + n_check)

    points = None
    if osc_scale:
        zeros = np.arange(1, 41) * math.pi / osc_scale
        points = [z for z in zeros.tolist() if z < radius]
    value, abserr, info, *warn = _sint.quad(
        f,
        0.0,
        radius,
        epsabs=0.5 * cfg.abs_tol,
        epsrel=0.5 * cfg.rel_tol,
        limit=cfg.max_subdivisions,
        points=points or None,
        full_output=1,
    )
    err = abserr + tail
    result = IntegralResult(value, err, int(info["neval"]))
    if warn and err > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
        raise QuadratureError(f"quadrature did not converge: {warn[0]}", best=result)
    return result
