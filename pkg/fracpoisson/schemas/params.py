"""Parameter schemas for the renewal and weighted-Poisson versions."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class FracParams(BaseModel):
    """The triple (nu, h, lambda) of the renewal fractional Poisson process.

    Holding times are i.i.d. generalized Mittag-Leffler with
    E[exp(-s T)] = (lambda / (lambda + s**nu))**h.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    nu: float = Field(..., gt=0.0, le=1.0)
    h: float = Field(default=1.0, gt=0.0)
    lam: float = Field(..., gt=0.0, alias="lambda")

    @property
    def is_classical(self) -> bool:
        """True when holding times are Gamma (nu == 1)."""
        return self.nu == 1.0


class WeightedPoissonLaw(BaseModel):
    """Law of A(t) for the alternative (weighted Poisson) version.

    P(A = k) = (lambda t^nu)^k / Gamma(nu k + 1) / E_{nu,1}(lambda t^nu).
    ``lam == 0`` or ``t == 0`` is the point mass at zero.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    nu: float = Field(..., gt=0.0, le=1.0)
    lam: float = Field(..., ge=0.0, alias="lambda")
    t: float = Field(..., ge=0.0)

    @property
    def intensity(self) -> float:
        """The Mittag-Leffler argument lambda * t**nu."""
        return self.lam * self.t**self.nu

    @property
    def is_point_mass(self) -> bool:
        return self.intensity == 0.0


class EntropyQuery(BaseModel):
    """Relative entropy query between two weighted-Poisson laws.

    ``t is None`` asks for the normalized limit as t grows.
    """

    model_config = ConfigDict(frozen=True)

    nu: float = Field(..., gt=0.0, le=1.0)
    lambda1: float = Field(..., ge=0.0)
    lambda2: float = Field(..., ge=0.0)
    t: Optional[float] = Field(default=None, gt=0.0)

    def law(self, which: int) -> WeightedPoissonLaw:
        """The finite-t law Q_{nu, lambda_which, t}."""
        if self.t is None:
            raise ValueError("law() needs a finite t")
        lam = self.lambda1 if which == 1 else self.lambda2
        return WeightedPoissonLaw(nu=self.nu, lam=lam, t=self.t)
