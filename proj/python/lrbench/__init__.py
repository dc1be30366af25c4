"""Learning-rate strategy benchmark on a synthetic Gaussian-mixture task."""

from ._lrbench import (
    ConfigError,
    PhaseDetector,
    RunFailure,
    adaptive_alpha,
    benchmark,
    defaults,
    depth_blend,
    discriminative_rates,
    generate_data,
    roster,
    schedule,
    train,
    trust_ratio,
)

__all__ = [
    "ConfigError",
    "PhaseDetector",
    "RunFailure",
    "adaptive_alpha",
    "benchmark",
    "defaults",
    "depth_blend",
    "discriminative_rates",
    "generate_data",
    "roster",
    "schedule",
    "train",
    "trust_ratio",
]
