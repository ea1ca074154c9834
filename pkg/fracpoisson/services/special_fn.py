"""Mittag-Leffler functions, Pochhammer symbols and the large-argument asymptotic.

The series

    E_{a,b}(z)      = sum_r z^r / Gamma(a r + b)
    E^g_{a,b}(z)    = sum_r (g)_r z^r / (r! Gamma(a r + b))

are summed term-by-term in log space: every term is represented by
log|term| and a sign, scaled by the largest term and added with compensated
summation. A warning is logged when the rounding error, about eps times the
largest term, exceeds ``ml_abs_tol`` and ``ml_rel_tol`` of the sum.
Summation stops once ``ml_stop_run`` consecutive terms fall below
``ml_truncation_rtol`` times the partial sum. Plain-scale evaluation is
limited to |z| <= ``ml_series_guard``; beyond it ``log_ml`` switches to the
leading asymptotic term. On negative arguments E_{1,1} and E_{1/2,1} are
evaluated through their elementary forms.
"""

import math
from typing import Optional, Tuple

import numpy as np
import structlog
from scipy.special import erfcx, gammaln, gammasgn

from fracpoisson.config import get_settings
from fracpoisson.errors import DomainError, NumericalError, SeriesRangeError

logger = structlog.get_logger(__name__)

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)
_LOG_EPS = math.log(np.finfo(float).eps)


def pochhammer_log(gamma: float, r: int) -> float:
    """Return log((gamma)_r) = log Gamma(gamma + r) - log Gamma(gamma).

    Args:
        gamma: Pochhammer parameter, must be positive.
        r: Non-negative integer order.

    Returns:
        The log rising factorial; exactly 0 for r == 0.

    Raises:
        DomainError: If gamma <= 0 or r < 0.
    """
    if not gamma > 0.0:
        raise DomainError(f"pochhammer_log needs gamma > 0, got {gamma}")
    if r < 0:
        raise DomainError(f"pochhammer_log needs r >= 0, got {r}")
    if r == 0:
        return 0.0
    return float(gammaln(gamma + r) - gammaln(gamma))


def _coefficients(
    alpha: float, beta: float, gamma: Optional[float], r: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """log|c_r| and sign(c_r) for the (generalized) Mittag-Leffler series."""
    arg = alpha * r + beta
    poles = (arg <= 0.0) & (arg == np.floor(arg))
    safe_arg = np.where(poles, 1.0, arg)
    log_abs = np.where(poles, -np.inf, -gammaln(safe_arg))
    sign = np.where(poles, 0.0, gammasgn(safe_arg))
    if gamma is not None and gamma != 1.0:
        log_abs = log_abs + gammaln(gamma + r) - gammaln(gamma) - gammaln(r + 1.0)
    return log_abs, sign


def _peak_index(alpha: float, z: float) -> float:
    """Approximate index of the largest series term."""
    if abs(z) <= 1.0:
        return 0.0
    return abs(z) ** (1.0 / alpha) / alpha


def _series(
    alpha: float, beta: float, z: float, gamma: Optional[float] = None
) -> Tuple[float, float]:
    """Sum the series in log space.

    Returns:
        (log|S|, sign(S)); log|S| is -inf when the sum vanishes.

    Raises:
        NumericalError: If truncation needs more than ``ml_max_terms`` terms.
    """
    settings = get_settings()
    log_abs_z = math.log(abs(z)) if z != 0.0 else -math.inf
    log_rtol = math.log(settings.ml_truncation_rtol)
    run = settings.ml_stop_run

    if z == 0.0:
        log_c, sign_c = _coefficients(alpha, beta, gamma, np.zeros(1))
        return float(log_c[0]), float(sign_c[0])

    peak = _peak_index(alpha, z)
    if peak > settings.ml_max_terms:
        raise NumericalError(
            f"Mittag-Leffler series at z={z} needs more than {settings.ml_max_terms} terms",
            alpha=alpha,
            beta=beta,
            z=z,
        )
    chunk = int(2.0 * peak) + 4 * run
    log_parts = []
    sign_parts = []
    start = 0
    while True:
        r = np.arange(start, start + chunk, dtype=float)
        log_c, sign_c = _coefficients(alpha, beta, gamma, r)
        log_terms = log_c + r * log_abs_z
        signs = sign_c * (np.where(r % 2.0 == 1.0, -1.0, 1.0) if z < 0.0 else 1.0)
        log_parts.append(log_terms)
        sign_parts.append(signs)
        start += chunk

        all_logs = np.concatenate(log_parts)
        all_signs = np.concatenate(sign_parts)
        finite = np.isfinite(all_logs)
        if not finite.any():
            return -math.inf, 0.0
        scale = float(all_logs[finite].max())
        scaled = np.where(finite, all_signs * np.exp(all_logs - scale), 0.0)
        total = math.fsum(scaled.tolist())

        tail = all_logs[-run:]
        decreasing = all_logs[-1] <= all_logs[-2]
        if total != 0.0:
            threshold = scale + math.log(abs(total)) + log_rtol
            if decreasing and float(tail.max()) < threshold:
                break
        elif decreasing and float(tail.max()) < scale + log_rtol:
            break
        if start >= settings.ml_max_terms:
            raise NumericalError(
                f"Mittag-Leffler series did not converge within {start} terms",
                alpha=alpha,
                beta=beta,
                z=z,
            )
        chunk = min(2 * chunk, settings.ml_max_terms)

    if total == 0.0:
        return -math.inf, 0.0
    log_sum = scale + math.log(abs(total))
    lost = scale - log_sum
    # rounding error of the scaled sum is about eps times the largest term
    log_error = scale + _LOG_EPS
    log_target = max(math.log(settings.ml_abs_tol), math.log(settings.ml_rel_tol) + log_sum)
    if lost > settings.ml_cancellation_warn_nats or log_error > log_target:
        logger.warning(
            "ml_series_cancellation",
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            z=z,
            nats_lost=lost,
            meets_target=log_error <= log_target,
        )
    logger.debug("ml_series_done", alpha=alpha, beta=beta, z=z, terms=start)
    return log_sum, math.copysign(1.0, total)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0.0:
        raise DomainError(f"Mittag-Leffler functions need alpha > 0, got {alpha}")


def _to_plain(log_abs: float, sign: float, z: float) -> float:
    if log_abs > _LOG_FLOAT_MAX:
        raise SeriesRangeError(
            f"E(z) overflows at z={z}; use log_ml or asymptotic_ml", z=z
        )
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs)


def _elementary(alpha: float, beta: float, z: float) -> Optional[float]:
    """Elementary forms used on z < 0, where the series cancels.

    E_{1,1}(z) = e^z and E_{1/2,1}(-x) = e^(x^2) erfc(x).
    """
    if z >= 0.0 or beta != 1.0:
        return None
    if alpha == 1.0:
        return math.exp(z)
    if alpha == 0.5:
        return float(erfcx(-z))
    return None


def ml(alpha: float, beta: float, z: float) -> float:
    """Evaluate the Mittag-Leffler function E_{alpha,beta}(z).

    Args:
        alpha: Series exponent step, positive.
        beta: Offset in Gamma(alpha r + beta).
        z: Real argument with |z| <= ``ml_series_guard``.

    Returns:
        E_{alpha,beta}(z).

    Raises:
        SeriesRangeError: If |z| exceeds the guard or the value overflows.
    """
    _check_alpha(alpha)
    guard = get_settings().ml_series_guard
    if abs(z) > guard:
        raise SeriesRangeError(
            f"|z|={abs(z)} exceeds the series guard {guard}; use log_ml or asymptotic_ml",
            z=z,
        )
    value = _elementary(alpha, beta, z)
    if value is not None:
        return value
    log_abs, sign = _series(alpha, beta, z)
    return _to_plain(log_abs, sign, z)


def ml_generalized(alpha: float, beta: float, gamma: float, z: float) -> float:
    """Evaluate the generalized Mittag-Leffler function E^gamma_{alpha,beta}(z).

    Same guard and errors as :func:`ml`; ``gamma == 1`` reduces to it.
    """
    _check_alpha(alpha)
    if not gamma > 0.0:
        raise DomainError(f"ml_generalized needs gamma > 0, got {gamma}")
    if gamma == 1.0:
        return ml(alpha, beta, z)
    guard = get_settings().ml_series_guard
    if abs(z) > guard:
        raise SeriesRangeError(
            f"|z|={abs(z)} exceeds the series guard {guard}; use log_ml or asymptotic_ml",
            z=z,
        )
    log_abs, sign = _series(alpha, beta, z, gamma=gamma)
    return _to_plain(log_abs, sign, z)


def log_asymptotic_ml(nu: float, beta: float, z: float) -> float:
    """Log of the leading term (1/nu) z^((1-beta)/nu) exp(z^(1/nu))."""
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"asymptotic needs nu in (0, 1], got {nu}")
    if not z > 0.0:
        raise DomainError(f"asymptotic needs z > 0, got {z}")
    return -math.log(nu) + (1.0 - beta) / nu * math.log(z) + z ** (1.0 / nu)


def asymptotic_ml(nu: float, beta: float, z: float) -> float:
    """Leading-order asymptotic of E_{nu,beta}(z) as z grows.

    Intended for ratio tests only; no error bound is attached.
    """
    log_value = log_asymptotic_ml(nu, beta, z)
    if log_value > _LOG_FLOAT_MAX:
        raise SeriesRangeError(
            f"asymptotic overflows at z={z}; use log_asymptotic_ml", z=z
        )
    return math.exp(log_value)


def log_ml(alpha: float, beta: float, z: float) -> float:
    """Evaluate log E_{alpha,beta}(z) for z >= 0 without overflow.

    Within the guard the series is summed by max-term scaling. Beyond the
    guard, or when the series would need more than ``ml_max_terms`` terms,
    the leading asymptotic term is used instead.

    Raises:
        DomainError: If z < 0 or the series sum is not positive.
    """
    _check_alpha(alpha)
    if z < 0.0:
        raise DomainError(f"log_ml needs z >= 0, got {z}")
    settings = get_settings()
    if z > settings.ml_series_guard or _peak_index(alpha, z) > settings.ml_max_terms:
        logger.debug("log_ml_asymptotic", alpha=alpha, beta=beta, z=z)
        return -math.log(alpha) + (1.0 - beta) / alpha * math.log(z) + z ** (1.0 / alpha)
    log_abs, sign = _series(alpha, beta, z)
    if sign <= 0.0:
        raise DomainError(
            f"E_{{{alpha},{beta}}}({z}) is not positive; its log is undefined"
        )
    return log_abs
