"""Stateless numerical services: special functions, exact laws, rates, entropy."""
