"""Run configuration echoed into every CLI output."""

from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class Subcommand(str, Enum):
    ML_EVAL = "ml-eval"
    PMF = "pmf"
    SAMPLE = "sample"
    RATE = "rate"
    ENTROPY = "entropy"
    LDP_PROFILE = "ldp-profile"
    COMPARE_SUBORDINATED = "compare-subordinated"
    RUIN = "ruin"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Full effective configuration of one CLI run, defaults included."""

    subcommand: Subcommand
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int
    n_rep: int = Field(..., gt=0)
    workers: int = Field(default=1, ge=1)
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
