"""Scan schedulers: the rules that pick which coordinate a Gibbs chain updates next.

Three flavors are provided. SystematicScan cycles 0..d-1 forever. UniformScan
picks coordinates independently and uniformly. WeightedScan keeps an online
estimate of each coordinate's jump size (how much the coordinate moves per
revisit) and selects coordinates with probability proportional to the square
root of that estimate, refreshed periodically. Square-root weighting minimizes
the sum of jump_size/weight over the probability simplex, which is the
mean-field proxy for maximizing expected squared jumping distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScanScheduler",
    "SystematicScan",
    "UniformScan",
    "FixedWeightScan",
    "WeightedScan",
    "WeightedScanConfig",
    "VarianceAccumulator",
    "selection_weights",
    "systematic_index",
]

# Floor for the auto regularizer so weights stay strictly positive even when
# every jump estimate is still zero.
REG_FLOOR = 1e-8
REG_SCALE = 0.01


def systematic_index(step: int, dim: int) -> int:
    """Coordinate visited at 1-based step `step` under a systematic scan.

    Returns 0-based indices; step t visits (t-1) mod dim.
    """
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return (step - 1) % dim


def selection_weights(jump_sizes: np.ndarray, reg: float) -> np.ndarray:
    """Selection probabilities proportional to sqrt(jump_size) + reg.

    q_i = (sqrt(jump_sizes[i]) + reg) / sum_j (sqrt(jump_sizes[j]) + reg).

    reg must be positive whenever any jump size is zero, otherwise the
    corresponding coordinate would never be visited again.
    """
    jump_sizes = np.asarray(jump_sizes, dtype=np.float64)
    if jump_sizes.ndim != 1 or jump_sizes.size == 0:
        raise ValueError("jump_sizes must be a nonempty 1-d array")
    if not np.all(np.isfinite(jump_sizes)):
        raise ValueError("jump_sizes must be finite")
    if np.any(jump_sizes < 0):
        raise ValueError("jump_sizes must be nonnegative")
    if reg < 0:
        raise ValueError(f"reg must be nonnegative, got {reg}")
    if reg == 0 and np.any(jump_sizes == 0):
        raise ValueError("reg must be positive when any jump size is zero")
    raw = np.sqrt(jump_sizes) + reg
    total = raw.sum()
    if total <= 0:
        raise ValueError("all jump sizes are zero and reg is zero")
    return raw / total


class VarianceAccumulator:
    """One-pass per-coordinate moment tracker (Welford update).

    Feeds arrive one scalar at a time, tagged with the coordinate they belong
    to. Exposes two jump-size readouts: twice the population variance (the
    expected squared jump of a coordinate resampled from a fixed conditional)
    and the plain running mean (for models whose summaries already are squared
    displacements).
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.counts = np.zeros(dim, dtype=np.int64)
        self._mean = np.zeros(dim, dtype=np.float64)
        self._m2 = np.zeros(dim, dtype=np.float64)

    def feed(self, index: int, value: float) -> None:
        n = self.counts[index] + 1
        self.counts[index] = n
        delta = value - self._mean[index]
        self._mean[index] += delta / n
        self._m2[index] += delta * (value - self._mean[index])

    def means(self) -> np.ndarray:
        """Running means; coordinates never fed report 0."""
        return np.where(self.counts > 0, self._mean, 0.0)

    def jump_sizes(self) -> np.ndarray:
        """2 * population variance per coordinate; undefined (n < 2) reports 0."""
        out = np.zeros(self.dim, dtype=np.float64)
        seen = self.counts >= 2
        out[seen] = 2.0 * self._m2[seen] / self.counts[seen]
        # tiny negative residue from cancellation is clipped, not an error
        np.maximum(out, 0.0, out=out)
        return out


@dataclass
class WeightedScanConfig:
    """Knobs for WeightedScan.

    update_period: recompute weights every this many draws; None means once
        per sweep (dim draws).
    reg: additive regularizer on sqrt(jump size); None means the relative
        rule 0.01 * mean(sqrt(jump sizes)), floored at 1e-8, recomputed at
        every update.
    adapt_after_burn_in: when False the weights freeze at the end of burn-in.
    """

    update_period: int | None = None
    reg: float | None = None
    adapt_after_burn_in: bool = True

    def __post_init__(self):
        if self.update_period is not None and self.update_period < 1:
            raise ValueError(f"update_period must be >= 1, got {self.update_period}")
        if self.reg is not None and self.reg < 0:
            raise ValueError(f"reg must be nonnegative, got {self.reg}")


class ScanScheduler:
    """Base class: pick the next coordinate, optionally learn from summaries."""

    # engine skips computing scalar summaries for schedulers that ignore them
    wants_summaries = False

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim

    def next_index(self, step: int, rng: np.random.Generator) -> int:
        """Coordinate to update at global 1-based step `step`."""
        raise NotImplementedError

    def observe(self, index: int, value: float) -> None:
        """Ingest the updated coordinate's scalar summary. Default: ignore."""

    def on_burn_in_end(self) -> None:
        """Called by the engine once, when the burn-in step count is reached."""

    def weight_snapshots(self) -> list[tuple[int, np.ndarray]]:
        """(step, weights) pairs recorded at each weight refresh."""
        return []


class SystematicScan(ScanScheduler):
    """Deterministic cyclic scan 0, 1, ..., d-1, 0, 1, ..."""

    def next_index(self, step: int, rng: np.random.Generator) -> int:
        return systematic_index(step, self.dim)


class UniformScan(ScanScheduler):
    """Independent uniform coordinate choice each step."""

    def next_index(self, step: int, rng: np.random.Generator) -> int:
        return int(rng.integers(self.dim))


class FixedWeightScan(ScanScheduler):
    """Independent draws from a fixed selection distribution."""

    def __init__(self, weights: np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
        super().__init__(weights.size)
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        self.weights = weights / weights.sum()
        self._cum = np.cumsum(self.weights)
        self._cum[-1] = 1.0

    def next_index(self, step: int, rng: np.random.Generator) -> int:
        return int(np.searchsorted(self._cum, rng.random(), side="right"))


class WeightedScan(ScanScheduler):
    """Adaptive scan: selection probability tracks sqrt of estimated jump size.

    Starts uniform. Before the first draw and every `update_period` draws
    after, recomputes weights from the accumulator via selection_weights.
    When nothing has been fed yet the recompute yields uniform weights (zero
    estimates, positive regularizer), so sequential warm-up passes are useful
    but not required.

    statistic selects the accumulator readout: "twice_variance" for scalar
    coordinates (Gaussian values, spins), "mean" for models whose summaries
    are already squared displacements (document blocks).
    """

    wants_summaries = True

    def __init__(self, dim: int, config: WeightedScanConfig | None = None,
                 statistic: str = "twice_variance"):
        super().__init__(dim)
        if statistic not in ("twice_variance", "mean"):
            raise ValueError(f"unknown statistic {statistic!r}")
        self.config = config or WeightedScanConfig()
        self.statistic = statistic
        self.accumulator = VarianceAccumulator(dim)
        self.weights = np.full(dim, 1.0 / dim)
        self._period = self.config.update_period or dim
        self._draws = 0
        self._frozen = False
        self._buffer: np.ndarray = np.empty(0, dtype=np.int64)
        self._buffer_pos = 0
        self._snapshots: list[tuple[int, np.ndarray]] = []

    def observe(self, index: int, value: float) -> None:
        self.accumulator.feed(index, value)

    def on_burn_in_end(self) -> None:
        if not self.config.adapt_after_burn_in:
            self._frozen = True

    def current_jump_sizes(self) -> np.ndarray:
        if self.statistic == "mean":
            return np.maximum(self.accumulator.means(), 0.0)
        return self.accumulator.jump_sizes()

    def _refresh(self, step: int, rng: np.random.Generator) -> None:
        if not self._frozen:
            jumps = self.current_jump_sizes()
            reg = self.config.reg
            if reg is None:
                reg = max(REG_SCALE * np.sqrt(jumps).mean(), REG_FLOOR)
            self.weights = selection_weights(jumps, reg)
            self._snapshots.append((step, self.weights.copy()))
        # draws between refreshes are iid from the frozen weights, so the
        # whole block can be drawn up front
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        self._buffer = np.searchsorted(cum, rng.random(self._period), side="right")
        self._buffer_pos = 0

    def next_index(self, step: int, rng: np.random.Generator) -> int:
        if self._draws % self._period == 0 or self._buffer_pos >= self._buffer.size:
            self._refresh(step, rng)
        self._draws += 1
        idx = int(self._buffer[self._buffer_pos])
        self._buffer_pos += 1
        return idx

    def weight_snapshots(self) -> list[tuple[int, np.ndarray]]:
        return list(self._snapshots)
