"""wgibbs: single-site Gibbs sampling with pluggable scan schedulers.

The scheduler decides which coordinate to update next. Besides the classic
systematic and uniform random scans, WeightedScan adapts selection
probabilities online, proportional to the square root of each coordinate's
estimated jump size, which maximizes a mean-field proxy of expected squared
jumping distance. Validation oracles (exact augmented-chain stationarity
checks, a closed-form-free simplex optimizer, a brute-force jump-distance
simulator) ship alongside so the theory can be re-verified at any time via
`wgibbs validate`.
"""

from .engine import ChainConfig, ChainTrace, GibbsModel, gibbs_step, run_chain
from .schedulers import (FixedWeightScan, ScanScheduler, SystematicScan,
                         UniformScan, VarianceAccumulator, WeightedScan,
                         WeightedScanConfig, selection_weights,
                         systematic_index)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "ChainTrace",
    "GibbsModel",
    "gibbs_step",
    "run_chain",
    "ScanScheduler",
    "SystematicScan",
    "UniformScan",
    "FixedWeightScan",
    "WeightedScan",
    "WeightedScanConfig",
    "VarianceAccumulator",
    "selection_weights",
    "systematic_index",
    "__version__",
]
