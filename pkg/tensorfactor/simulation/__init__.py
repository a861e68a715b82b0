"""Simulated tensor factor models: specs, data generation and analytic signal strengths.

Classes:
    Setting: Enum of the three reference settings.
    ModelSpec: Parameters of a simulated model.
    GroundTruth: A drawn data set with every latent component.
"""

from .generator import ar1_paths, equicorrelation_sqrt, generate, random_loadings, replication_rngs
from .models import GroundTruth, ModelSpec, Setting, preset
from .population import ar1_autocovariance, population_moment, population_signal
