"""Chunked Monte Carlo work: simulation, LDP profiles and ruin estimation."""
