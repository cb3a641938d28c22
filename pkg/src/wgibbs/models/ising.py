"""Binary image denoising with a grid Markov random field.

The truth is a spin image x in {-1,+1}^(h x w), observed through additive
Gaussian noise y = x + noise_sd * N(0, 1). The posterior couples neighboring
spins (4-neighborhood, coupling J) and anchors each spin to its observation:

    p(x | y)  propto  exp( J * sum_{edges} x_i x_j - sum_i (y_i - x_i)^2 / (2 noise_sd^2) )

Flipping one site only touches its edge terms and its own observation, so the
single-site conditional is a logistic in the local field:

    P(x_i = +1 | rest) = sigmoid( 2 J * sum_{j ~ i} x_j + 2 y_i / noise_sd^2 )

Coordinates are flattened row-major; state vectors hold spins as +-1.0 floats.
"""

from __future__ import annotations

import math

import numpy as np

from ..engine import GibbsModel

__all__ = [
    "IsingDenoiseTarget",
    "corrupt_image",
    "ising_flip_probability",
    "make_shapes_image",
    "binarize_image",
]


def ising_flip_probability(neighbor_sum: float, observation: float,
                           coupling: float, noise_sd: float) -> float:
    """P(spin = +1) given its neighbors' spin sum and its noisy observation."""
    field = 2.0 * coupling * neighbor_sum + 2.0 * observation / noise_sd ** 2
    if field >= 0:
        return 1.0 / (1.0 + math.exp(-field))
    e = math.exp(field)
    return e / (1.0 + e)


def corrupt_image(image: np.ndarray, noise_sd: float,
                  rng: np.random.Generator) -> np.ndarray:
    """Observation model: image plus iid Gaussian pixel noise.

    noise_sd = 0 returns the image unchanged (noiseless limit).
    """
    image = np.asarray(image, dtype=np.float64)
    if noise_sd < 0:
        raise ValueError(f"noise_sd must be nonnegative, got {noise_sd}")
    return image + noise_sd * rng.normal(size=image.shape)


def binarize_image(gray: np.ndarray) -> np.ndarray:
    """Grayscale to spins: at or above the median maps to +1, below to -1."""
    gray = np.asarray(gray, dtype=np.float64)
    return np.where(gray >= np.median(gray), 1.0, -1.0)


def make_shapes_image(height: int, width: int) -> np.ndarray:
    """Deterministic test scene: a disk, a bar and stripes, as +-1 spins."""
    if height < 8 or width < 8:
        raise ValueError("image must be at least 8 x 8")
    img = -np.ones((height, width))
    rows, cols = np.mgrid[0:height, 0:width]
    cy, cx = height * 0.42, width * 0.34
    radius = min(height, width) * 0.22
    img[(rows - cy) ** 2 + (cols - cx) ** 2 <= radius ** 2] = 1.0
    img[int(height * 0.15):int(height * 0.85),
        int(width * 0.68):int(width * 0.80)] = 1.0
    stripe_top = int(height * 0.88)
    period = max(2, width // 8)
    img[stripe_top:, :] = np.where((cols[stripe_top:, :] // period) % 2 == 0, 1.0, -1.0)
    return img


class IsingDenoiseTarget(GibbsModel):

    def __init__(self, noisy: np.ndarray, coupling: float = 1.0,
                 noise_sd: float = 1.0):
        noisy = np.asarray(noisy, dtype=np.float64)
        if noisy.ndim != 2:
            raise ValueError("noisy observation must be 2-d")
        if noise_sd <= 0:
            raise ValueError(f"noise_sd must be positive, got {noise_sd}")
        self.height, self.width = noisy.shape
        self.dim = self.height * self.width
        self.noisy = noisy
        self.coupling = coupling
        self.noise_sd = noise_sd
        self._field = (2.0 * noisy / noise_sd ** 2).reshape(-1)
        self._nbr_flat, self._nbr_start = self._grid_neighbors()

    def _grid_neighbors(self) -> tuple[np.ndarray, np.ndarray]:
        h, w = self.height, self.width
        flat = []
        start = np.zeros(h * w + 1, dtype=np.int64)
        for r in range(h):
            for c in range(w):
                i = r * w + c
                for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if 0 <= rr < h and 0 <= cc < w:
                        flat.append(rr * w + cc)
                start[i + 1] = len(flat)
        return np.array(flat, dtype=np.int64), start

    def neighbor_sum(self, state: np.ndarray, index: int) -> float:
        lo, hi = self._nbr_start[index], self._nbr_start[index + 1]
        return float(state[self._nbr_flat[lo:hi]].sum())

    def conditional_probability_up(self, state: np.ndarray, index: int) -> float:
        field = 2.0 * self.coupling * self.neighbor_sum(state, index) + self._field[index]
        if field >= 0:
            return 1.0 / (1.0 + math.exp(-field))
        e = math.exp(field)
        return e / (1.0 + e)

    def conditional_sample(self, state: np.ndarray, index: int,
                           rng: np.random.Generator) -> float:
        p_up = self.conditional_probability_up(state, index)
        return 1.0 if rng.random() < p_up else -1.0

    def unnormalized_log_density(self, state: np.ndarray) -> float:
        grid = state.reshape(self.height, self.width)
        pair = (grid[:, :-1] * grid[:, 1:]).sum() + (grid[:-1, :] * grid[1:, :]).sum()
        data = ((self.noisy - grid) ** 2).sum() / (2.0 * self.noise_sd ** 2)
        return float(self.coupling * pair - data)

    def threshold_start(self) -> np.ndarray:
        """Initial spins: sign of the noisy observation."""
        start = np.where(self.noisy >= 0, 1.0, -1.0)
        return start.reshape(-1)
