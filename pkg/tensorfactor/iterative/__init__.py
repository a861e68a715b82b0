"""Iterative projection estimation of tensor factor models.

Classes:
    IterConfig: Configuration of a run (ranks, lags, flavors, tolerance, sweep cap).
    MethodPreset: A named fragment of IterConfig, e.g. iTOPUP or TIPUP-1TOPUP.
    EstimationResult: Loadings, factors, residuals and diagnostics of a run.
    RunReport: The array-free summary of a run.
"""

from .config import PRESETS, IterConfig, MethodPreset, default_max_iter, method_preset
from .engine import EstimationResult, RunReport, estimate, project_series, run
