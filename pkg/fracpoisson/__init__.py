"""Fractional Poisson processes: special functions, exact laws, large
deviation rate functions and ruin probabilities."""

__version__ = "0.1.0"
