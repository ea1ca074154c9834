"""Ruin probabilities of the fractional renewal risk model.

The reserve u + c t - sum of claims can only go below zero at claim epochs,
so ruin is the first passage of the random walk S_n = sum (U_k - c T_k)
above u. Importance sampling tilts both components by the Lundberg root w.
"""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import brentq

from fracpoisson.config import get_settings
from fracpoisson.errors import (
    ConditionC1Error,
    DomainError,
    InputError,
    NetProfitConditionError,
    SimulationError,
)
from fracpoisson.schemas.ruin import RuinModel, RuinSummary
from fracpoisson.schemas.simulation import McEstimate
from fracpoisson.services.laws import sample_holding
from fracpoisson.services.rates import kappa
from fracpoisson.tasks.worker import mean_and_std_error, run_chunks

logger = structlog.get_logger(__name__)

_MAX_BRACKET_STEPS = 200


def kappa_tilde(model: RuinModel, theta: float) -> float:
    """log E[e^(theta U)] + kappa(-c theta), extended real."""
    claim_term = model.claims.log_mgf(theta)
    if claim_term == math.inf:
        return math.inf
    return claim_term + kappa(model.frac, -model.c * theta)


def lundberg_root(model: RuinModel) -> float:
    """Positive root w of kappa_tilde inside the claim MGF domain.

    Raises:
        NetProfitConditionError: For nu == 1 when c <= lambda E[U] / h.
        ConditionC1Error: When no sign change is found inside the domain.
    """
    frac, claims = model.frac, model.claims
    settings = get_settings()
    if frac.is_classical and model.c <= frac.lam * claims.mean / frac.h:
        raise NetProfitConditionError(
            f"net profit condition violated: c={model.c} <= lambda E[U] / h="
            f"{frac.lam * claims.mean / frac.h}",
            c=model.c,
            lam=frac.lam,
            h=frac.h,
            claim_mean=claims.mean,
        )

    bound = claims.mgf_bound
    lo = min(bound, 1.0) / 2.0
    for _ in range(_MAX_BRACKET_STEPS):
        if kappa_tilde(model, lo) < 0.0:
            break
        lo /= 2.0
    else:
        raise ConditionC1Error("kappa_tilde is not negative right of 0", claims=claims.spec())

    hi = None
    for k in range(1, _MAX_BRACKET_STEPS):
        if math.isfinite(bound):
            candidate = lo + (bound - lo) * (1.0 - 2.0**-k)
            if candidate >= bound:
                break
        else:
            candidate = lo * 2.0**k
            if candidate > settings.conjugate_theta_cap:
                break
        if kappa_tilde(model, candidate) > 0.0:
            hi = candidate
            break
        lo = candidate
    if hi is None:
        raise ConditionC1Error(
            "kappa_tilde has no sign change inside the claim MGF domain",
            claims=claims.spec(),
            bound=bound,
        )

    w = brentq(lambda theta: kappa_tilde(model, theta), lo, hi, xtol=settings.root_xtol)
    residual = abs(kappa_tilde(model, w))
    if residual > settings.root_check_tol or not w < bound:
        raise ConditionC1Error(
            f"root {w} fails verification (residual {residual:.3e})", w=w, bound=bound
        )
    logger.info("lundberg_root_found", w=w, nu=frac.nu, c=model.c, claims=claims.spec())
    return float(w)


def tilted_drift(model: RuinModel, theta: float) -> float:
    """E_theta[U] - c E_theta[T] under the exponential tilt at ``theta``."""
    frac = model.frac
    claim_mean = model.claims.tilt(theta).mean
    s = model.c * theta
    if frac.is_classical:
        if frac.lam + s <= 0.0:
            raise DomainError(f"tilt theta={theta} needs lambda + c theta > 0")
        hold_mean = frac.h / (frac.lam + s)
    else:
        if s < 0.0:
            raise DomainError(f"tilt theta={theta} < 0 is undefined for nu < 1")
        if s == 0.0:
            return -math.inf
        hold_mean = frac.h * frac.nu * s ** (frac.nu - 1.0) / (frac.lam + s**frac.nu)
    return claim_mean - model.c * hold_mean


class TiltedSampler:
    """Draws (claim, holding time) pairs under the tilt at ``theta``.

    Claims use the closed-form tilt of their law. Holding times are
    Gamma(h, lambda + c theta) for nu == 1; for nu < 1 untilted proposals
    are accepted with probability e^(-c theta T).
    """

    def __init__(self, model: RuinModel, theta: float):
        frac = model.frac
        if frac.is_classical and frac.lam + model.c * theta <= 0.0:
            raise DomainError(f"tilt theta={theta} needs lambda + c theta > 0")
        if not frac.is_classical and theta < 0.0:
            raise DomainError(f"tilt theta={theta} < 0 is undefined for nu < 1")
        self.model = model
        self.theta = theta
        self.claims = model.claims.tilt(theta)
        self.proposals = 0
        self.accepted = 0

    @property
    def expected_acceptance(self) -> float:
        """(lambda / (lambda + (c theta)^nu))^h, i.e. e^kappa(-c theta)."""
        frac = self.model.frac
        if frac.is_classical:
            return 1.0
        return math.exp(kappa(frac, -self.model.c * self.theta))

    @property
    def acceptance_rate(self) -> Optional[float]:
        if self.proposals == 0:
            return None
        return self.accepted / self.proposals

    def _holding_times(self, rng: np.random.Generator, size: int) -> np.ndarray:
        frac = self.model.frac
        s = self.model.c * self.theta
        if frac.is_classical:
            return rng.gamma(frac.h, 1.0 / (frac.lam + s), size=size)
        if s == 0.0:
            return sample_holding(frac, rng, size=size)
        out = np.empty(size)
        filled = 0
        while filled < size:
            batch = int((size - filled) / self.expected_acceptance) + 16
            proposal = sample_holding(frac, rng, size=batch)
            keep = proposal[rng.random(batch) < np.exp(-s * proposal)]
            self.proposals += batch
            self.accepted += keep.size
            take = min(keep.size, size - filled)
            out[filled : filled + take] = keep[:take]
            filled += take
        return out

    def sample(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        claims = self.claims.sample(rng, size)
        return claims, self._holding_times(rng, size)


def sample_tilted_pair(
    model: RuinModel, theta: float, rng: np.random.Generator
) -> Tuple[float, float]:
    """One independent (claim, holding time) draw under the tilt at ``theta``."""
    claims, holds = TiltedSampler(model, theta).sample(rng, 1)
    return float(claims[0]), float(holds[0])


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def _is_chunk(
    rng: np.random.Generator, size: int, model: RuinModel, w: float, u: float, step_cap: int
) -> Tuple[np.ndarray, np.ndarray, int, int]:
    sampler = TiltedSampler(model, w)
    level = np.zeros(size)
    passage = np.zeros(size)
    steps = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    step = 0
    while active.size:
        step += 1
        if step > step_cap:
            raise SimulationError(
                f"{active.size} replications did not pass u={u} within {step_cap} steps",
                w=w,
                u=u,
                step_cap=step_cap,
            )
        claims, holds = sampler.sample(rng, active.size)
        level[active] += claims - model.c * holds
        passed = level[active] > u
        done = active[passed]
        passage[done] = level[done]
        steps[done] = step
        active = active[~passed]
    return np.exp(-w * passage), steps, sampler.proposals, sampler.accepted


def ruin_is(
    model: RuinModel,
    u: float,
    n_rep: int,
    seed: int,
    workers: Optional[int] = None,
    w: Optional[float] = None,
) -> McEstimate:
    """Importance-sampling estimate of the ruin probability at capital ``u``.

    Every replication runs under the tilt at the Lundberg root until S
    passes u and contributes e^(-w S_tau) <= e^(-w u).

    Raises:
        SimulationError: If the tilted drift is not positive, a replication
            hits ``ruin_step_cap`` or the estimate leaves (0, 1).
    """
    if u <= 0.0:
        raise InputError(f"initial capital must be positive, got {u}")
    settings = get_settings()
    if w is None:
        w = lundberg_root(model)
    drift = tilted_drift(model, w)
    if not drift > 0.0:
        raise SimulationError(f"tilted drift {drift} is not positive at w={w}", w=w)

    parts = run_chunks(_is_chunk, n_rep, seed, (model, w, u, int(settings.ruin_step_cap)), workers)
    weights = np.concatenate([part[0] for part in parts])
    steps = np.concatenate([part[1] for part in parts])
    proposals = sum(part[2] for part in parts)
    accepted = sum(part[3] for part in parts)

    value, std_error = mean_and_std_error(weights)
    if not 0.0 < value < 1.0:
        raise SimulationError(f"ruin estimate {value} outside (0, 1)", u=u, w=w)
    acceptance = accepted / proposals if proposals else None
    if acceptance is not None:
        logger.debug("tilted_acceptance", rate=acceptance, proposals=proposals)
    return McEstimate(
        value=value,
        std_error=std_error,
        n_rep=n_rep,
        seed=seed,
        hits=n_rep,
        diagnostics={
            "w": w,
            "tilted_drift": drift,
            "mean_steps": float(steps.mean()),
            "max_weight": float(weights.max()),
            "acceptance_rate": acceptance,
        },
    )


def _crude_chunk(
    rng: np.random.Generator,
    size: int,
    model: RuinModel,
    u: float,
    step_horizon: int,
    prune_level: Optional[float],
) -> Tuple[int, int]:
    level = np.zeros(size)
    active = np.arange(size)
    hits = 0
    pruned = 0
    for _ in range(step_horizon):
        if not active.size:
            break
        claims = model.claims.sample(rng, active.size)
        holds = sample_holding(model.frac, rng, size=active.size)
        level[active] += claims - model.c * holds
        passed = level[active] > u
        hits += int(np.count_nonzero(passed))
        keep = ~passed
        if prune_level is not None:
            hopeless = level[active] < prune_level
            pruned += int(np.count_nonzero(hopeless & keep))
            keep &= ~hopeless
        active = active[keep]
    return hits, pruned


def ruin_crude(
    model: RuinModel,
    u: float,
    n_rep: int,
    step_horizon: int,
    seed: int,
    workers: Optional[int] = None,
) -> McEstimate:
    """Untilted estimate of P(passage above u within ``step_horizon`` claims).

    It underestimates the ruin probability and is flagged accordingly.
    When a Lundberg root exists, walks below u - crude_prune_nats / w are
    dropped; by Lundberg's inequality they would pass with probability
    below e^(-crude_prune_nats).
    """
    if u <= 0.0:
        raise InputError(f"initial capital must be positive, got {u}")
    if step_horizon < 0:
        raise InputError(f"step_horizon must be nonnegative, got {step_horizon}")
    settings = get_settings()
    if step_horizon == 0:
        return McEstimate(
            value=0.0,
            std_error=0.0,
            n_rep=n_rep,
            seed=seed,
            hits=0,
            upper_bound=3.0 / n_rep,
            lower_bound_estimator=True,
            diagnostics={"step_horizon": 0},
        )

    try:
        w: Optional[float] = lundberg_root(model)
    except ConditionC1Error:
        w = None
    prune_level = u - settings.crude_prune_nats / w if w else None

    parts = run_chunks(_crude_chunk, n_rep, seed, (model, u, step_horizon, prune_level), workers)
    hits = sum(part[0] for part in parts)
    pruned = sum(part[1] for part in parts)
    if pruned:
        logger.debug("crude_ruin_pruned", pruned=pruned, prune_level=prune_level)

    value = hits / n_rep
    upper_bound = None
    if hits == 0:
        upper_bound = 3.0 / n_rep
        logger.warning("crude_ruin_no_hits", u=u, n_rep=n_rep, upper_bound=upper_bound)
    return McEstimate(
        value=value,
        std_error=math.sqrt(value * (1.0 - value) / n_rep),
        n_rep=n_rep,
        seed=seed,
        hits=hits,
        upper_bound=upper_bound,
        lower_bound_estimator=True,
        diagnostics={"step_horizon": step_horizon, "pruned": pruned, "w": w},
    )


def lundberg_slope_check(
    model: RuinModel,
    u_grid: Sequence[float],
    n_rep: int,
    seed: int,
    workers: Optional[int] = None,
) -> RuinSummary:
    """Least-squares slope of log ruin_is(u) against u, compared with -w.

    Raises:
        InputError: If ``u_grid`` has fewer than three points or is not
            strictly increasing.
    """
    grid = [float(u) for u in u_grid]
    if len(grid) < 3:
        raise InputError(f"u_grid needs at least 3 points, got {len(grid)}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError(f"u_grid must be strictly increasing, got {grid}")

    w = lundberg_root(model)
    estimates = [ruin_is(model, u, n_rep, seed, workers, w=w) for u in grid]
    values = [est.value for est in estimates]
    slope = float(np.polyfit(grid, np.log(values), 1)[0])
    rel_gap = abs(slope + w) / w
    logger.info("lundberg_slope", slope=slope, w=w, rel_gap=rel_gap)
    return RuinSummary(
        w=w,
        u_grid=grid,
        estimates=values,
        std_errors=[est.std_error for est in estimates],
        slope=slope,
        rel_gap=rel_gap,
        acceptance_rate=estimates[0].diagnostics.get("acceptance_rate"),
    )


def efficiency_report(
    model: RuinModel,
    u: float,
    n_rep: int,
    step_horizon: int,
    seed: int,
    workers: Optional[int] = None,
) -> Dict[str, Any]:
    """Relative variance of ruin_is against ruin_crude at the same budget.

    The variance-reduction factor is reported only; it is None when the
    crude run has no hit.
    """
    tilted = ruin_is(model, u, n_rep, seed, workers)
    crude = ruin_crude(model, u, n_rep, step_horizon, seed, workers)

    def relative_variance(est: McEstimate) -> Optional[float]:
        if est.value <= 0.0:
            return None
        return est.std_error**2 * est.n_rep / est.value**2

    is_rv, crude_rv = relative_variance(tilted), relative_variance(crude)
    factor = crude_rv / is_rv if is_rv and crude_rv else None
    return {
        "u": u,
        "is_estimate": tilted.value,
        "is_std_error": tilted.std_error,
        "crude_estimate": crude.value,
        "crude_std_error": crude.std_error,
        "is_relative_variance": is_rv,
        "crude_relative_variance": crude_rv,
        "variance_reduction": factor,
    }


def ruin_table(summary: RuinSummary) -> List[Dict[str, float]]:
    """CSV rows (u, estimate, std_error) of a slope check."""
    return [
        {"u": u, "estimate": est, "std_error": se}
        for u, est, se in zip(summary.u_grid, summary.estimates, summary.std_errors)
    ]
