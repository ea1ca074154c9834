"""Insurance model schemas: light-tailed claim laws and the ruin model.

Each claim law knows its log-MGF, the right end of its finiteness domain,
its exponential tilt (closed form within the family) and how to sample.
"""

import math
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fracpoisson.errors import DomainError, InputError
from fracpoisson.schemas.params import FracParams


class ExponentialClaims(BaseModel):
    """Exponential claim sizes with rate ``mu``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["exponential"] = "exponential"
    mu: float = Field(..., gt=0.0)

    @property
    def mgf_bound(self) -> float:
        return self.mu

    @property
    def mean(self) -> float:
        return 1.0 / self.mu

    def log_mgf(self, theta: float) -> float:
        if theta >= self.mu:
            return math.inf
        return math.log(self.mu / (self.mu - theta))

    def tilt(self, theta: float) -> "ExponentialClaims":
        if theta >= self.mu:
            raise DomainError(f"tilt theta={theta} outside (-inf, {self.mu})")
        return ExponentialClaims(mu=self.mu - theta)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.mu, size=size)

    def spec(self) -> str:
        return f"exp:{self.mu!r}"


class GammaClaims(BaseModel):
    """Gamma claim sizes with ``shape`` and ``rate``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["gamma"] = "gamma"
    shape: float = Field(..., gt=0.0)
    rate: float = Field(..., gt=0.0)

    @property
    def mgf_bound(self) -> float:
        return self.rate

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    def log_mgf(self, theta: float) -> float:
        if theta >= self.rate:
            return math.inf
        return self.shape * math.log(self.rate / (self.rate - theta))

    def tilt(self, theta: float) -> "GammaClaims":
        if theta >= self.rate:
            raise DomainError(f"tilt theta={theta} outside (-inf, {self.rate})")
        return GammaClaims(shape=self.shape, rate=self.rate - theta)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, 1.0 / self.rate, size=size)

    def spec(self) -> str:
        return f"gamma:{self.shape!r},{self.rate!r}"


class DeterministicClaims(BaseModel):
    """Every claim equals ``m``; the tilt leaves it unchanged."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["deterministic"] = "deterministic"
    m: float = Field(..., gt=0.0)

    @property
    def mgf_bound(self) -> float:
        return math.inf

    @property
    def mean(self) -> float:
        return self.m

    def log_mgf(self, theta: float) -> float:
        return theta * self.m

    def tilt(self, theta: float) -> "DeterministicClaims":
        return self

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.m)

    def spec(self) -> str:
        return f"det:{self.m!r}"


ClaimLaw = Annotated[
    Union[ExponentialClaims, GammaClaims, DeterministicClaims],
    Field(discriminator="kind"),
]


def parse_claim_law(text: str) -> Union[ExponentialClaims, GammaClaims, DeterministicClaims]:
    """Parse ``exp:MU``, ``gamma:SHAPE,RATE`` or ``det:M``.

    Raises:
        InputError: If the text does not name a supported law.
    """
    name, _, args = text.strip().partition(":")
    try:
        values = [float(v) for v in args.split(",")] if args else []
        if name in ("exp", "exponential") and len(values) == 1:
            return ExponentialClaims(mu=values[0])
        if name == "gamma" and len(values) == 2:
            return GammaClaims(shape=values[0], rate=values[1])
        if name in ("det", "deterministic") and len(values) == 1:
            return DeterministicClaims(m=values[0])
    except ValueError as exc:
        raise InputError(f"Invalid claim law '{text}': {exc}") from exc
    raise InputError(f"Unknown claim law '{text}' (use exp:MU, gamma:SHAPE,RATE or det:M)")


class RuinModel(BaseModel):
    """Reserve u + c t - sum of claims, claims arriving at renewal epochs."""

    model_config = ConfigDict(frozen=True)

    frac: FracParams
    c: float = Field(..., gt=0.0)
    claims: ClaimLaw


class RuinSummary(BaseModel):
    """Summary emitted by the ``ruin`` command."""

    w: float
    u_grid: List[float]
    estimates: List[float]
    std_errors: List[float]
    slope: Optional[float] = None
    rel_gap: Optional[float] = None
    acceptance_rate: Optional[float] = None
