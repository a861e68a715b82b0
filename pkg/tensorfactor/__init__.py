"""Tensor factor model estimation for tensor-valued time series, built with a typed, reproducible stack."""

__version__ = "0.1.0"
