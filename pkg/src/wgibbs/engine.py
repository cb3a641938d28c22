"""Single-site Gibbs engine.

The engine owns the loop: pick a coordinate (scheduler), resample it from its
full conditional (model), record. State is a flat float64 vector; what the
entries mean is the model's business (values, spins, block summaries).

Seeding: one integer seed spawns two independent substreams, one consumed
only by the scheduler and one only by the model's conditional draws. Swapping
schedulers therefore never perturbs the model-noise stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .schedulers import ScanScheduler, systematic_index

__all__ = ["GibbsModel", "ChainConfig", "ChainTrace", "gibbs_step", "run_chain", "spawn_rngs"]


class GibbsModel:
    """Contract a sampling target implements.

    dim: number of coordinates (variables or blocks).
    jump_statistic: which accumulator readout a weighted scheduler should use
        for this model, "twice_variance" or "mean".
    """

    dim: int
    jump_statistic = "twice_variance"

    def conditional_sample(self, state: np.ndarray, index: int,
                           rng: np.random.Generator) -> float:
        """Draw coordinate `index` from its full conditional given the rest."""
        raise NotImplementedError

    def scalar_summary(self, state: np.ndarray, index: int) -> float:
        """Scalar fed to an adaptive scheduler after coordinate `index` updates."""
        return float(state[index])


@dataclass
class ChainConfig:
    """Run-length bookkeeping, all in single-variable steps.

    total_iterations: number of single-variable updates to perform.
    burn_in: steps regarded as burn-in by downstream diagnostics; also the
        point where a non-adapting weighted scheduler freezes.
    thinning: record the state every this many steps.
    initial_sweeps: full sequential passes performed before the scheduler is
        consulted, so adaptive schedulers start with one summary per
        coordinate per pass.
    """

    total_iterations: int
    burn_in: int = 0
    seed: int = 0
    thinning: int = 1
    initial_sweeps: int = 2

    def __post_init__(self):
        if self.total_iterations < 1:
            raise ValueError(f"total_iterations must be >= 1, got {self.total_iterations}")
        if not 0 <= self.burn_in < self.total_iterations:
            raise ValueError(f"burn_in must be in [0, total_iterations), got {self.burn_in}")
        if self.thinning < 1:
            raise ValueError(f"thinning must be >= 1, got {self.thinning}")
        if self.initial_sweeps < 0:
            raise ValueError(f"initial_sweeps must be >= 0, got {self.initial_sweeps}")


@dataclass
class ChainTrace:
    """What a run leaves behind.

    samples: (floor(total_iterations / thinning), dim) states, recorded at
        steps thinning, 2*thinning, ... Burn-in rows are included; slicing is
        the caller's choice.
    selected_indices: coordinate updated at every step, length total_iterations.
    weight_snapshots: (step, weights) pairs from adaptive schedulers, empty
        otherwise.
    """

    samples: np.ndarray
    selected_indices: np.ndarray
    weight_snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)
    seed: int = 0

    @property
    def dim(self) -> int:
        return self.samples.shape[1]


def spawn_rngs(seed: int, n: int = 2) -> list[np.random.Generator]:
    """Independent generators derived from one seed (SeedSequence spawning)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def gibbs_step(model: GibbsModel, state: np.ndarray, index: int,
               rng: np.random.Generator) -> np.ndarray:
    """One single-site update, pure: returns a copy differing only at `index`."""
    if not 0 <= index < model.dim:
        raise IndexError(f"index {index} out of range for dim {model.dim}")
    if state.shape != (model.dim,):
        raise ValueError(f"state must have shape ({model.dim},), got {state.shape}")
    out = np.array(state, dtype=np.float64)
    out[index] = model.conditional_sample(out, index, rng)
    return out


def run_chain(model: GibbsModel, scheduler: ScanScheduler, config: ChainConfig,
              initial_state: np.ndarray, callback=None,
              callback_every: int | None = None) -> ChainTrace:
    """Run a single-site Gibbs chain and return its trace.

    The first initial_sweeps * dim steps visit coordinates sequentially
    regardless of the scheduler; the scheduler takes over afterwards but its
    accumulator (if any) is fed from step one. `callback(step, state)`, if
    given, fires every callback_every steps (default: once per dim steps)
    and must not mutate the state.
    """
    d = model.dim
    if scheduler.dim != d:
        raise ValueError(f"scheduler dim {scheduler.dim} != model dim {d}")
    initial_state = np.asarray(initial_state, dtype=np.float64)
    if initial_state.shape != (d,):
        raise ValueError(f"initial_state must have shape ({d},), got {initial_state.shape}")

    total = config.total_iterations
    scheduler_rng, model_rng = spawn_rngs(config.seed)
    warmup_steps = config.initial_sweeps * d
    if callback_every is None:
        callback_every = d

    state = initial_state.copy()
    n_rows = total // config.thinning
    samples = np.empty((n_rows, d), dtype=np.float64)
    selected = np.empty(total, dtype=np.int64)
    feed = scheduler.wants_summaries
    row = 0

    for t in range(1, total + 1):
        if t <= warmup_steps:
            i = systematic_index(t, d)
        else:
            i = scheduler.next_index(t, scheduler_rng)
        state[i] = model.conditional_sample(state, i, model_rng)
        selected[t - 1] = i
        if feed:
            scheduler.observe(i, model.scalar_summary(state, i))
        if t == config.burn_in:
            scheduler.on_burn_in_end()
        if t % config.thinning == 0:
            samples[row] = state
            row += 1
        if callback is not None and t % callback_every == 0:
            callback(t, state)

    return ChainTrace(samples=samples, selected_indices=selected,
                      weight_snapshots=scheduler.weight_snapshots(),
                      seed=config.seed)
