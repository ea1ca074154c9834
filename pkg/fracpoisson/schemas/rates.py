"""Rate function evaluation record."""

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator


class RateMethod(str, Enum):
    """How a rate value was obtained."""

    CLOSED_NU1 = "closed_nu1"
    CLOSED_NU_HALF = "closed_nu_half"
    NUMERIC_CONJUGATE = "numeric_conjugate"
    COMPOSITION = "composition"
    ALTERNATIVE_A = "alternative_A"


class RateEvaluation(BaseModel):
    """Result of a rate-function query at a single point.

    ``value`` is an extended real: ``math.inf`` is the tagged infinite state
    and never stands in for "large". ``argmax_theta`` is the maximizing
    theta of a numeric conjugate; ``argmin_y`` the minimizing mixing level
    of the composition formula.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    x: float
    value: float
    method: RateMethod
    argmax_theta: Optional[float] = None
    argmin_y: Optional[float] = None

    @field_validator("value")
    @classmethod
    def _nonnegative(cls, value: float) -> float:
        if math.isnan(value):
            raise ValueError("rate value is NaN")
        if value < 0.0:
            # roundoff at the zero of the rate
            if value > -1e-9:
                return 0.0
            raise ValueError(f"rate value {value} is negative")
        return value

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)
