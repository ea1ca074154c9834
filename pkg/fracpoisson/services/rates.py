"""Cumulants, Legendre-Fenchel conjugation and rate functions.

Rate functions are extended-real valued; ``math.inf`` is the infinite state.
Closed forms are used for nu in {1, 1/2}; every other case goes through
:func:`conjugate`, and ``numeric=True`` forces the numeric path so that
closed forms can be cross-checked.
"""

import math
from typing import Callable, Literal, Optional, Tuple

import structlog
from scipy.optimize import brentq, minimize_scalar
from scipy.special import xlogy

from fracpoisson.config import get_settings
from fracpoisson.errors import DomainError, NumericalError
from fracpoisson.schemas.params import FracParams
from fracpoisson.schemas.rates import RateEvaluation, RateMethod

logger = structlog.get_logger(__name__)

Interval = Tuple[float, float]
ScalarFunction = Callable[[float], float]

_MAX_HALVINGS = 1100
_LOG_FLOAT_MAX = 709.0


# ---------------------------------------------------------------------------
# Cumulants
# ---------------------------------------------------------------------------


def kappa(p: FracParams, theta: float) -> float:
    """log E[exp(theta T)] for one holding time (extended real)."""
    if p.is_classical:
        if theta >= p.lam:
            return math.inf
        return p.h * math.log(p.lam / (p.lam - theta))
    if theta > 0.0:
        return math.inf
    return p.h * math.log(p.lam / (p.lam + (-theta) ** p.nu))


def limit_cgf(p: FracParams, theta: float) -> float:
    """Limiting scaled cumulant of M(t): lim (1/t) log E[exp(theta M(t))].

    lambda (e^(theta/h) - 1) for nu == 1, and
    (lambda (e^(theta/h) - 1))^(1/nu) on theta >= 0 (zero below) for nu < 1.
    """
    if theta / p.h > _LOG_FLOAT_MAX:
        return math.inf
    base = p.lam * math.expm1(theta / p.h)
    if p.is_classical:
        return base
    if theta < 0.0:
        return 0.0
    try:
        return base ** (1.0 / p.nu)
    except OverflowError:
        return math.inf


def limit_cgf_weighted(nu: float, lam: float, theta: float) -> float:
    """lim (1/t) log E[exp(theta A(t))] = lambda^(1/nu) (e^(theta/nu) - 1)."""
    if theta / nu > _LOG_FLOAT_MAX:
        return math.inf
    return lam ** (1.0 / nu) * math.expm1(theta / nu)


# ---------------------------------------------------------------------------
# Legendre-Fenchel conjugation
# ---------------------------------------------------------------------------


class _Objective:
    """theta -> theta x - f(theta), with contract checks."""

    def __init__(self, f: ScalarFunction, x: float):
        self.f = f
        self.x = x

    def __call__(self, theta: float) -> float:
        value = self.f(theta)
        if math.isnan(value):
            raise NumericalError(
                f"conjugated function returned NaN at theta={theta}", theta=theta
            )
        if value == math.inf:
            return -math.inf
        return theta * self.x - value


def _start_point(lo: float, hi: float) -> float:
    if lo < 0.0 < hi:
        return 0.0
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(hi):
        return hi - 1.0
    return lo + 1.0


def _expand(
    g: _Objective, start: float, edge: float, direction: float, cap: float
) -> Tuple[float, float, bool]:
    """Walk from ``start`` towards ``edge`` while g keeps increasing.

    Returns:
        (a, b, unbounded): a bracket [min, max] containing the maximizer, or
        ``unbounded`` when g still grows beyond ``cap``.
    """
    previous, current = start, start
    g_current = g(start)
    finite_edge = math.isfinite(edge)
    for k in range(_MAX_HALVINGS):
        if finite_edge:
            candidate = edge - (edge - start) * 2.0 ** (-(k + 1))
            if candidate == current:
                candidate = edge
        else:
            candidate = start + direction * 2.0**k
        g_candidate = g(candidate)
        if g_candidate <= g_current or candidate == edge:
            if candidate == edge and g_candidate > g_current:
                previous, current = current, candidate
            lo, hi = sorted((previous, candidate))
            return lo, hi, False
        if not finite_edge and abs(candidate) > cap:
            return start, candidate, True
        previous, current, g_current = current, candidate, g_candidate
    lo, hi = sorted((previous, current))
    return lo, hi, False


def conjugate(
    f: ScalarFunction,
    x: float,
    domain: Interval = (-math.inf, math.inf),
    method: RateMethod = RateMethod.NUMERIC_CONJUGATE,
) -> RateEvaluation:
    """Evaluate sup over theta in ``domain`` of theta x - f(theta).

    The maximizer of the concave objective is bracketed by geometric steps
    (doubling towards an infinite edge, halving the distance to a finite
    one) and refined with bounded Brent / golden-section search.

    Args:
        f: Convex function, finite inside ``domain``; it may be +inf at the
            domain edges.
        x: Query point.
        domain: Closed interval of admissible theta.
        method: Method tag recorded in the result.

    Returns:
        RateEvaluation with the value (``math.inf`` when unbounded) and the
        maximizing theta.

    Raises:
        NumericalError: If f returns NaN inside the domain.
    """
    settings = get_settings()
    lo, hi = domain
    g = _Objective(f, x)
    start = _start_point(lo, hi)
    g_start = g(start)
    if g_start == -math.inf:
        raise NumericalError(
            f"conjugated function is infinite at interior point {start}", theta=start
        )

    delta = 1e-6 * (1.0 + abs(start))
    right = min(start + delta, hi)
    left = max(start - delta, lo)
    if right > start and g(right) > g_start:
        a, b, unbounded = _expand(g, start, hi, 1.0, settings.conjugate_theta_cap)
    elif left < start and g(left) > g_start:
        a, b, unbounded = _expand(g, start, lo, -1.0, settings.conjugate_theta_cap)
    else:
        a, b, unbounded = left, right, False

    if unbounded:
        logger.debug("conjugate_unbounded", x=x, theta=b)
        return RateEvaluation(x=x, value=math.inf, method=method, argmax_theta=None)

    scale = max(abs(a), abs(b), 1e-300)
    result = minimize_scalar(
        lambda theta: -max(g(theta), -1e300),
        bounds=(a, b),
        method="bounded",
        options={"xatol": settings.conjugate_xtol * scale, "maxiter": 2000},
    )
    best_theta, best_value = float(result.x), g(float(result.x))
    for theta in (a, b):
        value = g(theta)
        if value > best_value:
            best_theta, best_value = theta, value
    return RateEvaluation(x=x, value=best_value, method=method, argmax_theta=best_theta)


def legendre(f: ScalarFunction, domain: Interval = (-math.inf, math.inf)) -> Callable[[float], RateEvaluation]:
    """Return x -> conjugate(f, x, domain)."""

    def f_star(x: float) -> RateEvaluation:
        return conjugate(f, x, domain)

    return f_star


# ---------------------------------------------------------------------------
# Rate functions of the renewal version
# ---------------------------------------------------------------------------


def _kappa_domain(p: FracParams) -> Interval:
    return (-math.inf, p.lam) if p.is_classical else (-math.inf, 0.0)


def rate_T(p: FracParams, x: float, numeric: bool = False) -> RateEvaluation:
    """Rate function of the empirical mean of holding times.

    I(x) = sup_theta {theta x - kappa(theta)}; infinite for x <= 0.
    """
    if p.is_classical and not numeric:
        if x <= 0.0:
            return RateEvaluation(x=x, value=math.inf, method=RateMethod.CLOSED_NU1)
        ratio = p.lam * x / p.h
        return RateEvaluation(
            x=x,
            value=p.h * (ratio - 1.0 - math.log(ratio)),
            method=RateMethod.CLOSED_NU1,
            argmax_theta=p.lam - p.h / x,
        )
    if p.nu == 0.5 and not numeric:
        if x <= 0.0:
            return RateEvaluation(x=x, value=math.inf, method=RateMethod.CLOSED_NU_HALF)
        lam, h = p.lam, p.h
        root = 0.5 * math.sqrt(lam * lam + 2.0 * h / x) - 0.5 * lam
        value = -x * root * root + h * math.log(0.5 + 0.5 * math.sqrt(1.0 + 2.0 * h / (lam * lam * x)))
        return RateEvaluation(
            x=x, value=value, method=RateMethod.CLOSED_NU_HALF, argmax_theta=-root * root
        )
    if x <= 0.0:
        return RateEvaluation(x=x, value=math.inf, method=RateMethod.NUMERIC_CONJUGATE)
    return conjugate(lambda theta: kappa(p, theta), x, _kappa_domain(p))


def rate_M(p: FracParams, x: float, numeric: bool = False) -> RateEvaluation:
    """Rate function of M(t)/t.

    x I_T(1/x) for x > 0, lambda 1_{nu=1} at x = 0 and +inf for x < 0.
    ``numeric=True`` evaluates the conjugate of the limiting cumulant
    instead, which coincides with the same function.
    """
    if numeric:
        if x < 0.0:
            return RateEvaluation(x=x, value=math.inf, method=RateMethod.NUMERIC_CONJUGATE)
        return conjugate(lambda theta: limit_cgf(p, theta), x)
    if p.is_classical:
        method = RateMethod.CLOSED_NU1
        if x < 0.0:
            return RateEvaluation(x=x, value=math.inf, method=method)
        hx = p.h * x
        return RateEvaluation(
            x=x,
            value=float(xlogy(hx, hx / p.lam)) - hx + p.lam,
            method=method,
            argmax_theta=p.h * math.log(hx / p.lam) if x > 0.0 else None,
        )
    method = RateMethod.CLOSED_NU_HALF if p.nu == 0.5 else RateMethod.NUMERIC_CONJUGATE
    if x < 0.0:
        return RateEvaluation(x=x, value=math.inf, method=method)
    if x == 0.0:
        return RateEvaluation(x=x, value=0.0, method=method)
    if p.nu == 0.5:
        lam, h = p.lam, p.h
        theta = h * math.log(0.5 + 0.5 * math.sqrt(1.0 + 2.0 * h * x / (lam * lam)))
        root = 0.5 * math.sqrt(lam * lam + 2.0 * h * x) - 0.5 * lam
        return RateEvaluation(x=x, value=x * theta - root * root, method=method, argmax_theta=theta)
    inner = rate_T(p, 1.0 / x)
    return RateEvaluation(x=x, value=x * inner.value, method=method, argmax_theta=inner.argmax_theta)


# ---------------------------------------------------------------------------
# Alternative version and the subordinated representation
# ---------------------------------------------------------------------------


def rate_A(nu: float, lam: float, x: float, numeric: bool = False) -> RateEvaluation:
    """Rate function of A(t)/t.

    nu x log(nu x / lambda^(1/nu)) - nu x + lambda^(1/nu) for x >= 0 (with
    0 log 0 = 0), +inf for x < 0.
    """
    if not 0.0 < nu <= 1.0 or not lam > 0.0:
        raise DomainError(f"rate_A needs nu in (0, 1] and lambda > 0, got {nu}, {lam}")
    if x < 0.0:
        return RateEvaluation(x=x, value=math.inf, method=RateMethod.ALTERNATIVE_A)
    if numeric:
        return conjugate(lambda theta: limit_cgf_weighted(nu, lam, theta), x)
    level = lam ** (1.0 / nu)
    nx = nu * x
    return RateEvaluation(
        x=x,
        value=float(xlogy(nx, nx / level)) - nx + level,
        method=RateMethod.ALTERNATIVE_A,
        argmax_theta=nu * math.log(nx / level) if x > 0.0 else None,
    )


def brownian_rate(y: float) -> float:
    """Rate of |B(2t)|/t: y^2 / 4 on y >= 0, +inf below."""
    return y * y / 4.0 if y >= 0.0 else math.inf


def poisson_conditional_rate(lam: float, x: float, y: float) -> float:
    """Rate K(x|y) of N_lambda(y_t t)/t when y_t -> y.

    Poisson conjugate x log(x / (lambda y)) - x + lambda y for y > 0, and the
    indicator of {0} when y == 0.
    """
    if x < 0.0 or y < 0.0:
        return math.inf
    if y == 0.0:
        return 0.0 if x == 0.0 else math.inf
    return float(xlogy(x, x / (lam * y))) - x + lam * y


def composition_rate(lam: float, x: float) -> RateEvaluation:
    """inf over y >= 0 of K(x|y) + y^2/4, the rate of N_lambda(|B(2t)|)/t.

    The minimizer solves -x/y + lambda + y/2 = 0, found by Brent's method on
    the bracket (0, x/lambda + 2 sqrt(x) + 1]; it must coincide with
    sqrt(lambda^2 + 2x) - lambda.

    Raises:
        NumericalError: If the numeric minimizer and the analytic one differ.
    """
    if x < 0.0:
        return RateEvaluation(x=x, value=math.inf, method=RateMethod.COMPOSITION)
    if x == 0.0:
        return RateEvaluation(x=x, value=0.0, method=RateMethod.COMPOSITION, argmin_y=0.0)
    guess = math.sqrt(lam * lam + 2.0 * x) - lam
    upper = x / lam + 2.0 * math.sqrt(x) + 1.0
    lower = min(guess, upper) * 1e-6
    y_star = brentq(lambda y: -x / y + lam + 0.5 * y, lower, upper, xtol=1e-15, rtol=1e-15)
    if abs(y_star - guess) > 1e-9 * (1.0 + guess):
        raise NumericalError(
            f"composition minimizer {y_star} differs from analytic {guess}", x=x, lam=lam
        )
    value = poisson_conditional_rate(lam, x, y_star) + brownian_rate(y_star)
    return RateEvaluation(x=x, value=value, method=RateMethod.COMPOSITION, argmin_y=y_star)


def glynn_whitt_residual(
    p: FracParams, theta: float, identity: Literal["lambda", "kappa"] = "lambda"
) -> float:
    """Residual of the inversion identities between kappa and the limit cumulant.

    ``lambda``: Lambda(theta) = -kappa^{-1}(-theta), checked as
    |kappa(-Lambda(theta)) + theta| on theta in R (nu == 1) or theta >= 0.
    ``kappa``: kappa(theta) = -Lambda^{-1}(-theta), checked as
    |Lambda(-kappa(theta)) + theta| on theta < lambda (nu == 1) or theta <= 0.

    Raises:
        DomainError: If theta is outside the identity's range.
    """
    if identity == "lambda":
        if not p.is_classical and theta < 0.0:
            raise DomainError(f"identity holds for theta >= 0 when nu < 1, got {theta}")
        return abs(kappa(p, -limit_cgf(p, theta)) + theta)
    if p.is_classical and theta >= p.lam:
        raise DomainError(f"identity holds for theta < lambda when nu = 1, got {theta}")
    if not p.is_classical and theta > 0.0:
        raise DomainError(f"identity holds for theta <= 0 when nu < 1, got {theta}")
    return abs(limit_cgf(p, -kappa(p, theta)) + theta)
