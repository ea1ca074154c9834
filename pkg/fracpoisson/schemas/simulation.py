"""Monte Carlo result schemas."""

import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracpoisson.schemas.params import FracParams


class RenewalPath(BaseModel):
    """Arrival epochs of one renewal path on [0, horizon]."""

    model_config = ConfigDict(frozen=True)

    params: FracParams
    horizon: float = Field(..., gt=0.0)
    arrivals: List[float]
    count: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _consistent(self) -> "RenewalPath":
        if self.count != len(self.arrivals):
            raise ValueError("count must equal the number of arrivals")
        if any(b <= a for a, b in zip(self.arrivals, self.arrivals[1:])):
            raise ValueError("arrivals must be strictly increasing")
        if self.arrivals and self.arrivals[-1] > self.horizon:
            raise ValueError("arrival beyond horizon")
        return self


class McEstimate(BaseModel):
    """A Monte Carlo estimate, reproducible from (seed, n_rep).

    ``upper_bound`` carries the rule-of-three bound 3 / n_rep when no
    replication hit the event; ``lower_bound_estimator`` flags estimators
    that are biased low by construction (horizon-capped crude ruin).
    """

    model_config = ConfigDict(frozen=True)

    value: float
    std_error: float = Field(..., ge=0.0)
    n_rep: int = Field(..., gt=0)
    seed: int
    hits: Optional[int] = None
    upper_bound: Optional[float] = None
    lower_bound_estimator: bool = False
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _finite(self) -> "McEstimate":
        if not math.isfinite(self.std_error):
            raise ValueError("std_error must be finite")
        return self

    def interval(self, n_sigma: float = 3.0) -> tuple[float, float]:
        """Symmetric confidence interval ``value +- n_sigma * std_error``."""
        half = n_sigma * self.std_error
        return self.value - half, self.value + half


class ProfileRow(BaseModel):
    """One row of an LDP profile: -(1/t) log P(X(t)/t >= x).

    ``kind`` is ``exact`` for tail sums, ``point`` for Monte Carlo with hits
    and ``lower_bound`` when no replication hit and ``estimate`` is the
    rule-of-three bound on the normalized rate.
    """

    model_config = ConfigDict(frozen=True)

    t: float
    estimate: float
    std_error: Optional[float] = None
    kind: Literal["exact", "point", "lower_bound"]
    limit: Optional[float] = None

    @property
    def gap(self) -> Optional[float]:
        if self.limit is None or math.isinf(self.limit):
            return None
        return self.limit - self.estimate
