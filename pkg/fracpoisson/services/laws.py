"""Exact laws and samplers.

Renewal version: holding times with the generalized Mittag-Leffler law,
sampled as a Gamma mixture of positive stable variables. Alternative
version: the weighted Poisson law of A(t), handled entirely in log space.
"""

import math
from typing import Optional, Tuple, Union

import numpy as np
import structlog
from scipy.special import gammaln, logsumexp

from fracpoisson.config import get_settings
from fracpoisson.errors import DomainError, NumericalError, SeriesRangeError
from fracpoisson.schemas.params import FracParams, WeightedPoissonLaw
from fracpoisson.services.special_fn import log_ml, ml, ml_generalized

logger = structlog.get_logger(__name__)

FloatOrArray = Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# Renewal version: holding times
# ---------------------------------------------------------------------------


def holding_pdf(p: FracParams, t: float) -> float:
    """Density lambda^h t^(nu h - 1) E^h_{nu,nu h}(-lambda t^nu) on (0, inf).

    For plotting and validation only; samplers never evaluate it.

    Raises:
        SeriesRangeError: If lambda * t**nu exceeds the series guard.
    """
    if t <= 0.0:
        return 0.0
    z = p.lam * t**p.nu
    if z > get_settings().ml_series_guard:
        raise SeriesRangeError(
            f"holding_pdf argument lambda*t^nu={z} exceeds the series guard", t=t
        )
    value = p.lam**p.h * t ** (p.nu * p.h - 1.0) * ml_generalized(p.nu, p.nu * p.h, p.h, -z)
    return max(value, 0.0)


def survival_holding(p: FracParams, t: float) -> float:
    """P(T > t) = E_{nu,1}(-lambda t^nu), available for h == 1."""
    if p.h != 1.0:
        raise DomainError(f"survival_holding has a closed form only for h=1, got h={p.h}")
    if t <= 0.0:
        return 1.0
    if p.is_classical:
        return math.exp(-p.lam * t)
    return ml(p.nu, 1.0, -p.lam * t**p.nu)


def tilted_holding_pdf(p: FracParams, c: float, theta: float, t: float) -> float:
    """Density of the holding time under the exponential tilt e^{-c theta t}.

    For nu == 1 this is the Gamma(h, lambda + c theta) density; for nu < 1
    it is e^{-c theta t} (lambda + (c theta)^nu)^h t^(nu h - 1) E^h(-lambda t^nu),
    which is not a generalized Mittag-Leffler density unless theta == 0.
    """
    if p.is_classical:
        rate = p.lam + c * theta
        if rate <= 0.0:
            raise DomainError(f"tilt theta={theta} needs lambda + c*theta > 0")
        if t <= 0.0:
            return 0.0
        return math.exp(
            p.h * math.log(rate) - gammaln(p.h) + (p.h - 1.0) * math.log(t) - rate * t
        )
    if theta < 0.0:
        raise DomainError(f"tilt theta={theta} < 0 is undefined for nu < 1")
    if t <= 0.0:
        return 0.0
    base = holding_pdf(p, t) / p.lam**p.h
    return math.exp(-c * theta * t) * (p.lam + (c * theta) ** p.nu) ** p.h * base


def sample_positive_stable(
    nu: float, rng: np.random.Generator, size: Optional[int] = None
) -> FloatOrArray:
    """Draw S with E[exp(-s S)] = exp(-s^nu) by Kanter's representation.

    S = sin(nu U) / sin(U)^(1/nu) * (sin((1 - nu) U) / E)^((1 - nu)/nu)
    with U uniform on (0, pi) and E standard exponential.
    """
    if not 0.0 < nu < 1.0:
        raise DomainError(f"positive stable sampling needs 0 < nu < 1, got {nu}")
    n = 1 if size is None else size
    u = rng.uniform(np.nextafter(0.0, 1.0), np.pi, size=n)
    e = np.maximum(rng.standard_exponential(size=n), np.finfo(float).tiny)
    log_s = (
        np.log(np.sin(nu * u))
        - np.log(np.sin(u)) / nu
        + (1.0 - nu) / nu * (np.log(np.sin((1.0 - nu) * u)) - np.log(e))
    )
    draws = np.exp(log_s)
    return float(draws[0]) if size is None else draws


def sample_holding(
    p: FracParams, rng: np.random.Generator, size: Optional[int] = None
) -> FloatOrArray:
    """Draw holding times as G^(1/nu) * S_nu with G ~ Gamma(h, rate lambda).

    Conditioning on G gives E[exp(-s T) | G] = exp(-s^nu G), and the Gamma
    Laplace transform then yields (lambda / (lambda + s^nu))^h.
    """
    n = 1 if size is None else size
    g = rng.gamma(p.h, 1.0 / p.lam, size=n)
    if p.is_classical:
        draws = g
    else:
        draws = g ** (1.0 / p.nu) * sample_positive_stable(p.nu, rng, size=n)
    return float(draws[0]) if size is None else draws


# ---------------------------------------------------------------------------
# Alternative version: weighted Poisson law of A(t)
# ---------------------------------------------------------------------------


def wp_weight(nu: float, k: int) -> float:
    """Weight k! / Gamma(nu k + 1); it does not depend on t."""
    return math.exp(gammaln(k + 1.0) - gammaln(nu * k + 1.0))


def _log_normalizer(law: WeightedPoissonLaw) -> float:
    return log_ml(law.nu, 1.0, law.intensity)


def _log_terms(law: WeightedPoissonLaw, k: np.ndarray, log_norm: float) -> np.ndarray:
    return k * math.log(law.intensity) - gammaln(law.nu * k + 1.0) - log_norm


def _peak(law: WeightedPoissonLaw) -> float:
    return law.intensity ** (1.0 / law.nu) / law.nu


def wp_log_pmf(law: WeightedPoissonLaw, k: int) -> float:
    """log P(A(t) = k); the point mass at 0 when lambda t^nu == 0."""
    if k < 0:
        return -math.inf
    if law.is_point_mass:
        return 0.0 if k == 0 else -math.inf
    return float(_log_terms(law, np.array([float(k)]), _log_normalizer(law))[0])


def wp_log_pmf_grid(law: WeightedPoissonLaw, ks: np.ndarray) -> np.ndarray:
    """Vectorized wp_log_pmf over nonnegative integers ``ks``."""
    k = np.asarray(ks, dtype=float)
    if law.is_point_mass:
        return np.where(k == 0.0, 0.0, -np.inf)
    return _log_terms(law, k, _log_normalizer(law))


def wp_mean(law: WeightedPoissonLaw) -> float:
    """E[A(t)] = (z / nu) E_{nu,nu}(z) / E_{nu,1}(z) with z = lambda t^nu."""
    if law.is_point_mass:
        return 0.0
    z = law.intensity
    return math.exp(
        math.log(z) - math.log(law.nu) + log_ml(law.nu, law.nu, z) - log_ml(law.nu, 1.0, z)
    )


def wp_log_mgf(law: WeightedPoissonLaw, theta: float) -> float:
    """log E[exp(theta A(t))] = log E_{nu,1}(e^theta z) - log E_{nu,1}(z)."""
    if law.is_point_mass:
        return 0.0
    z = law.intensity
    return log_ml(law.nu, 1.0, math.exp(theta) * z) - log_ml(law.nu, 1.0, z)


def _scan(
    law: WeightedPoissonLaw, start: int, stop_rule: str
) -> Tuple[np.ndarray, np.ndarray]:
    """Walk k = start, start+1, ... until the stop rule fires.

    ``stop_rule`` is ``remainder`` (geometric bound on what is left is below
    ``tail_rel_remainder`` of the accumulated sum) or ``nats`` (the last term
    is ``tail_nats`` below the running maximum). Both only fire once terms
    are decreasing; successive term ratios decrease in k, so the geometric
    bound is valid from then on.
    """
    settings = get_settings()
    log_norm = _log_normalizer(law)
    chunk = max(256, int(_peak(law) - start) + 256)
    ks = []
    logs = []
    position = start
    while True:
        k = np.arange(position, position + chunk, dtype=float)
        ks.append(k)
        logs.append(_log_terms(law, k, log_norm))
        position += chunk
        all_logs = np.concatenate(logs)
        last, before = all_logs[-1], all_logs[-2]
        if last < before:
            if stop_rule == "nats":
                if last < all_logs.max() - settings.tail_nats:
                    break
            else:
                ratio = math.exp(last - before)
                if ratio == 0.0:
                    break
                log_remainder = last + math.log(ratio / (1.0 - ratio))
                if log_remainder < logsumexp(all_logs) + math.log(settings.tail_rel_remainder):
                    break
        if position - start >= settings.max_pmf_terms:
            raise NumericalError(
                f"weighted Poisson scan exceeded {settings.max_pmf_terms} terms",
                nu=law.nu,
                lam=law.lam,
                t=law.t,
            )
        chunk *= 2
    return np.concatenate(ks).astype(np.int64), np.concatenate(logs)


def wp_support(law: WeightedPoissonLaw) -> Tuple[np.ndarray, np.ndarray]:
    """Support points k = 0..K_max and their log pmf.

    K_max is where the pmf has dropped ``tail_nats`` below its maximum.
    """
    if law.is_point_mass:
        return np.zeros(1, dtype=np.int64), np.zeros(1)
    return _scan(law, 0, "nats")


def wp_log_tail(law: WeightedPoissonLaw, threshold: float) -> float:
    """log P(A(t) >= threshold), exact up to the adaptive truncation."""
    start = max(0, math.ceil(threshold))
    if start == 0:
        return 0.0
    if law.is_point_mass:
        return -math.inf
    _, logs = _scan(law, start, "remainder")
    return float(logsumexp(logs))


def sample_wp(
    law: WeightedPoissonLaw, rng: np.random.Generator, size: Optional[int] = None
) -> Union[int, np.ndarray]:
    """Inverse-CDF draws from the weighted Poisson law.

    Raises:
        NumericalError: If the cumulative mass at K_max misses 1 by more
            than ``cdf_deficit_tol`` (guard misconfiguration).
    """
    n = 1 if size is None else size
    if law.is_point_mass:
        draws = np.zeros(n, dtype=np.int64)
        return 0 if size is None else draws
    ks, logs = wp_support(law)
    cdf = np.exp(np.logaddexp.accumulate(logs))
    deficit = 1.0 - cdf[-1]
    if deficit > get_settings().cdf_deficit_tol:
        raise NumericalError(
            f"cumulative mass {cdf[-1]!r} at k={ks[-1]} misses 1 by {deficit:.3e}",
            nu=law.nu,
            lam=law.lam,
            t=law.t,
        )
    index = np.searchsorted(cdf, rng.random(n), side="right")
    draws = ks[np.minimum(index, ks.size - 1)]
    return int(draws[0]) if size is None else draws
