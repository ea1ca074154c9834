"""Pydantic schemas shared by services, tasks and the CLI."""

from fracpoisson.schemas.params import EntropyQuery, FracParams, WeightedPoissonLaw
from fracpoisson.schemas.rates import RateEvaluation, RateMethod
from fracpoisson.schemas.ruin import (
    ClaimLaw,
    DeterministicClaims,
    ExponentialClaims,
    GammaClaims,
    RuinModel,
    RuinSummary,
    parse_claim_law,
)
from fracpoisson.schemas.run import OutputFormat, RunConfig, Subcommand
from fracpoisson.schemas.simulation import McEstimate, ProfileRow, RenewalPath

__all__ = [
    "ClaimLaw",
    "DeterministicClaims",
    "EntropyQuery",
    "ExponentialClaims",
    "FracParams",
    "GammaClaims",
    "McEstimate",
    "OutputFormat",
    "ProfileRow",
    "RateEvaluation",
    "RateMethod",
    "RenewalPath",
    "RuinModel",
    "RuinSummary",
    "RunConfig",
    "Subcommand",
    "WeightedPoissonLaw",
    "parse_claim_law",
]
