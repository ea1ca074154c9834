"""Renewal simulation, LDP profiles and the subordinated-representation oracle."""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats
from scipy.integrate import quad
from scipy.special import erfcx, gammaln, xlogy

from fracpoisson.config import get_settings
from fracpoisson.errors import DomainError, InputError, InsufficientReplicationsError, NumericalError
from fracpoisson.schemas.params import FracParams, WeightedPoissonLaw
from fracpoisson.schemas.simulation import RenewalPath, ProfileRow
from fracpoisson.services.laws import sample_holding, sample_wp, wp_log_tail
from fracpoisson.services.rates import rate_A, rate_M
from fracpoisson.tasks.worker import run_chunks

logger = structlog.get_logger(__name__)

_FIRST_BLOCK = 16


# ---------------------------------------------------------------------------
# Single paths
# ---------------------------------------------------------------------------


def simulate_count(p: FracParams, t: float, rng: np.random.Generator) -> int:
    """M(t): number of partial sums of holding times that are <= t."""
    if t <= 0.0:
        raise DomainError(f"horizon must be positive, got {t}")
    total, count, block = 0.0, 0, _FIRST_BLOCK
    while True:
        sums = total + np.cumsum(sample_holding(p, rng, size=block))
        inside = int(np.searchsorted(sums, t, side="right"))
        count += inside
        if inside < block:
            return count
        total = float(sums[-1])
        block *= 2


def simulate_path(p: FracParams, t: float, rng: np.random.Generator) -> RenewalPath:
    """Arrival epochs T1, T1 + T2, ... up to the horizon ``t``."""
    if t <= 0.0:
        raise DomainError(f"horizon must be positive, got {t}")
    arrivals: List[float] = []
    total, block = 0.0, _FIRST_BLOCK
    while True:
        sums = total + np.cumsum(sample_holding(p, rng, size=block))
        inside = int(np.searchsorted(sums, t, side="right"))
        arrivals.extend(sums[:inside].tolist())
        if inside < block:
            break
        total = float(sums[-1])
        block *= 2
    return RenewalPath(params=p, horizon=t, arrivals=arrivals, count=len(arrivals))


def count_grid(
    p: FracParams, t_grid: Sequence[float], size: int, rng: np.random.Generator
) -> np.ndarray:
    """Counts M(t) for ``size`` independent paths at every t of the grid.

    Returns:
        Integer array of shape (size, len(t_grid)).
    """
    grid = np.asarray(t_grid, dtype=float)
    horizon = float(grid.max())
    counts = np.zeros((size, grid.size), dtype=np.int64)
    totals = np.zeros(size)
    active = np.arange(size)
    while active.size:
        totals[active] += sample_holding(p, rng, size=active.size)
        counts[active] += totals[active, None] <= grid[None, :]
        active = active[totals[active] <= horizon]
    return counts


def _count_chunk(
    rng: np.random.Generator, size: int, p: FracParams, t_grid: Tuple[float, ...]
) -> np.ndarray:
    return count_grid(p, t_grid, size, rng)


def simulate_counts(
    p: FracParams,
    t_grid: Sequence[float],
    n_rep: int,
    seed: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Counts of ``n_rep`` paths on ``t_grid``, reproducible from (seed, n_rep)."""
    if not t_grid or min(t_grid) <= 0.0:
        raise InputError(f"t_grid must be nonempty and positive, got {list(t_grid)}")
    parts = run_chunks(_count_chunk, n_rep, seed, (p, tuple(t_grid)), workers)
    return np.concatenate(parts, axis=0)


def _holding_chunk(rng: np.random.Generator, size: int, p: FracParams) -> np.ndarray:
    return sample_holding(p, rng, size=size)


def _weighted_chunk(rng: np.random.Generator, size: int, law: WeightedPoissonLaw) -> np.ndarray:
    return sample_wp(law, rng, size=size)


def draw_samples(
    kind: str,
    p: FracParams,
    t: Optional[float],
    n_rep: int,
    seed: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Draw ``n_rep`` holding times, counts M(t) or weighted-Poisson A(t)."""
    if kind == "holding":
        parts = run_chunks(_holding_chunk, n_rep, seed, (p,), workers)
        return np.concatenate(parts)
    if t is None or t <= 0.0:
        raise InputError(f"sampling {kind} needs a horizon t > 0")
    if kind == "count":
        return simulate_counts(p, [t], n_rep, seed, workers)[:, 0]
    if kind == "weighted":
        law = WeightedPoissonLaw(nu=p.nu, lam=p.lam, t=t)
        return np.concatenate(run_chunks(_weighted_chunk, n_rep, seed, (law,), workers))
    raise InputError(f"unknown sample kind '{kind}'")


# ---------------------------------------------------------------------------
# LDP profiles
# ---------------------------------------------------------------------------


def renewal_log_tail_exact(p: FracParams, t: float, threshold: float) -> float:
    """log P(M(t) >= threshold) for nu == 1.

    M(t) >= n exactly when the n-th arrival, a Gamma(n h, lambda) variable,
    is <= t.
    """
    if not p.is_classical:
        raise DomainError("exact renewal tails are only available for nu = 1")
    n = max(0, math.ceil(threshold))
    if n == 0:
        return 0.0
    return float(stats.gamma.logcdf(t, a=n * p.h, scale=1.0 / p.lam))


def _renewal_limit(p: FracParams, x: float) -> float:
    if p.is_classical and x <= p.lam / p.h:
        return 0.0
    return rate_M(p, x).value


def ldp_profile_renewal(
    p: FracParams,
    x: float,
    t_grid: Sequence[float],
    n_rep: int,
    seed: int,
    workers: Optional[int] = None,
    exact: Optional[bool] = None,
) -> List[ProfileRow]:
    """Rows (t, -(1/t) log P(M(t)/t >= x)) with the rate function as limit.

    Exact Gamma tails are used for nu == 1 unless ``exact=False``. Monte
    Carlo cells carry the delta-method error sqrt(p(1-p)/n) / (p t); a cell
    without hits reports the rule-of-three bound -(1/t) log(3/n) as a lower
    bound on the normalized rate.

    Raises:
        InsufficientReplicationsError: If no Monte Carlo cell has a hit.
    """
    if not t_grid or min(t_grid) <= 0.0:
        raise InputError(f"t_grid must be nonempty and positive, got {list(t_grid)}")
    limit = _renewal_limit(p, x) if x > 0.0 else 0.0
    if x <= 0.0:
        return [ProfileRow(t=t, estimate=0.0, std_error=0.0, kind="exact", limit=limit) for t in t_grid]
    if exact is None:
        exact = p.is_classical
    if exact:
        return [
            ProfileRow(
                t=t,
                estimate=-renewal_log_tail_exact(p, t, x * t) / t,
                kind="exact",
                limit=limit,
            )
            for t in t_grid
        ]

    counts = simulate_counts(p, t_grid, n_rep, seed, workers)
    rows = []
    for j, t in enumerate(t_grid):
        hits = int(np.count_nonzero(counts[:, j] >= x * t))
        if hits == 0:
            logger.warning("zero_hit_cell", t=t, x=x, n_rep=n_rep)
            rows.append(
                ProfileRow(t=t, estimate=-math.log(3.0 / n_rep) / t, kind="lower_bound", limit=limit)
            )
            continue
        p_hat = hits / n_rep
        std_error = math.sqrt(p_hat * (1.0 - p_hat) / n_rep) / (p_hat * t)
        rows.append(
            ProfileRow(t=t, estimate=-math.log(p_hat) / t, std_error=std_error, kind="point", limit=limit)
        )
    if all(row.kind == "lower_bound" for row in rows):
        raise InsufficientReplicationsError(
            f"no replication reached M(t)/t >= {x} at any t; increase n_rep",
            x=x,
            n_rep=n_rep,
            t_grid=list(t_grid),
        )
    return rows


def ldp_profile_weighted(
    nu: float, lam: float, x: float, t_grid: Sequence[float]
) -> List[ProfileRow]:
    """Exact rows (t, -(1/t) log P(A(t)/t >= x)) from weighted-Poisson tails."""
    if not t_grid or min(t_grid) <= 0.0:
        raise InputError(f"t_grid must be nonempty and positive, got {list(t_grid)}")
    mean_rate = lam ** (1.0 / nu) / nu
    limit = rate_A(nu, lam, x).value if x > mean_rate else 0.0
    rows = []
    for t in t_grid:
        log_tail = wp_log_tail(WeightedPoissonLaw(nu=nu, lam=lam, t=t), x * t) if x > 0.0 else 0.0
        rows.append(ProfileRow(t=t, estimate=-log_tail / t, kind="exact", limit=limit))
    return rows


# ---------------------------------------------------------------------------
# Subordinated representation N_lambda(|B(2t)|) at fixed t
# ---------------------------------------------------------------------------


def _subordinated_integrand(y: float, lam: float, t: float, k: int) -> float:
    # Poisson(k; lambda y) times the density of |B(2t)|
    log_poisson = float(xlogy(k, lam * y)) - lam * y - float(gammaln(k + 1.0))
    log_halfnormal = -y * y / (4.0 * t) - 0.5 * math.log(math.pi * t)
    return math.exp(log_poisson + log_halfnormal)


def subordinated_pmf(lam: float, t: float, k: int) -> float:
    """P(N_lambda(|B(2t)|) = k) by adaptive quadrature.

    [0, inf) is split at the half-normal ``halfnormal_split_quantile``; the
    tail is mapped to (0, 1) by y = q - sigma log u.

    Raises:
        NumericalError: If the quadrature error estimate exceeds ``quad_abs_tol``.
    """
    if lam <= 0.0 or t <= 0.0:
        raise DomainError(f"subordinated_pmf needs lambda, t > 0, got {lam}, {t}")
    if k < 0:
        return 0.0
    settings = get_settings()
    sigma = math.sqrt(2.0 * t)
    split = float(stats.halfnorm.ppf(settings.halfnormal_split_quantile, scale=sigma))
    tol = settings.quad_abs_tol

    body, body_err = quad(
        _subordinated_integrand, 0.0, split, args=(lam, t, k), epsabs=tol, epsrel=0.0, limit=200
    )
    tail, tail_err = quad(
        lambda u: _subordinated_integrand(split - sigma * math.log(u), lam, t, k) * sigma / u,
        0.0,
        1.0,
        epsabs=tol,
        epsrel=0.0,
        limit=200,
    )
    if body_err + tail_err > tol:
        raise NumericalError(
            f"quadrature for P(N(|B(2t)|)={k}) did not reach {tol}",
            lam=lam,
            t=t,
            k=k,
            abserr=body_err + tail_err,
        )
    return min(max(body + tail, 0.0), 1.0)


def subordinated_zero_mass(lam: float, t: float) -> float:
    """Closed form P(N_lambda(|B(2t)|) = 0) = e^(lambda^2 t) erfc(lambda sqrt(t))."""
    return float(erfcx(lam * math.sqrt(t)))


def compare_subordinated(
    lam: float,
    t: float,
    n_rep: int,
    seed: int,
    workers: Optional[int] = None,
    mass: float = 0.99,
) -> Tuple[List[Dict[str, float]], Dict[str, float]]:
    """Empirical pmf of M_{1/2,1,lambda}(t) against subordinated_pmf.

    Bins are k = 0..K, K the first index where the exact cumulative mass
    reaches ``mass``, plus one pooled bin for k > K.

    Returns:
        (rows, summary): per-k rows and the chi-square statistic, p-value and K.
    """
    exact: List[float] = []
    while not exact or math.fsum(exact) < mass:
        if len(exact) >= get_settings().max_pmf_terms:
            raise NumericalError(f"subordinated pmf never reached mass {mass}", lam=lam, t=t)
        exact.append(subordinated_pmf(lam, t, len(exact)))
    k_max = len(exact) - 1

    p = FracParams(nu=0.5, h=1.0, lam=lam)
    counts = simulate_counts(p, [t], n_rep, seed, workers)[:, 0]
    observed = np.bincount(np.minimum(counts, k_max + 1), minlength=k_max + 2)

    probabilities = np.array(exact + [max(1.0 - math.fsum(exact), 0.0)])
    probabilities /= probabilities.sum()
    statistic, p_value = stats.chisquare(observed, probabilities * n_rep)
    rows = [
        {"k": k, "empirical": observed[k] / n_rep, "exact": exact[k]} for k in range(k_max + 1)
    ]
    summary = {"chi2": float(statistic), "p_value": float(p_value), "k_max": k_max}
    logger.info("subordinated_comparison", lam=lam, t=t, **summary)
    return rows, summary
