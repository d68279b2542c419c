"""On-off power control for single-hop wireless networks with fading channels."""

from fadingnet.fading import RAYLEIGH, FadingKind, FadingModel
from fadingnet.network import NetworkParams, ThroughputReport, evaluate
from fadingnet.rng import Seed

__version__ = "0.1.0"

__all__ = ["FadingKind", "FadingModel", "RAYLEIGH", "NetworkParams", "ThroughputReport", "Seed", "evaluate"]
