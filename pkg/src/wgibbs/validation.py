"""Independent checks for the weighted-scan machinery.

Everything here is an oracle: exact linear algebra on enumerable chains, a
brute-force mean-field simulator, and a numeric simplex optimizer. None of it
reuses the formulas it is meant to confirm, so agreement is evidence rather
than tautology.

The augmented-chain construction: a random-scan Gibbs sampler with selection
weights q is a Markov chain on pairs (state, last updated coordinate) with
kernel P((x,i),(y,j)) = q_j * P_i(x,y), where P_i is the single-site kernel
for coordinate i. Its stationary distribution is pi_aug(x,i) = q_i * pi(x);
stationarity_residual measures how far that claim is from holding exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .engine import GibbsModel

__all__ = [
    "FiniteChainSpec",
    "TabularModel",
    "augmented_transition_matrix",
    "augmented_stationary",
    "stationarity_residual",
    "random_finite_chain_spec",
    "scan_objective",
    "esjd_closed_form",
    "esjd_monte_carlo",
    "optimal_weights_numeric",
]


class TabularModel(GibbsModel):
    """Gibbs target on a small enumerated product space.

    joint is a nonnegative array with one axis per variable; entry
    joint[x_0, ..., x_{d-1}] is the (unnormalized) probability of that
    configuration. Conditionals are computed by direct summation, so this is
    the ground truth any hand-derived conditional can be checked against.
    State vectors hold category indices stored as floats.
    """

    def __init__(self, joint: np.ndarray):
        joint = np.asarray(joint, dtype=np.float64)
        if joint.ndim < 1:
            raise ValueError("joint must have at least one axis")
        if np.any(joint < 0) or joint.sum() <= 0:
            raise ValueError("joint must be nonnegative with positive mass")
        self.joint = joint / joint.sum()
        self.dim = joint.ndim
        self.cards = joint.shape

    def conditional_probs(self, state: np.ndarray, index: int) -> np.ndarray:
        """Exact conditional distribution of coordinate `index` given the rest."""
        sel: list[object] = [int(v) for v in state]
        sel[index] = slice(None)
        slice_ = self.joint[tuple(sel)]
        total = slice_.sum()
        if total <= 0:
            raise ValueError("conditioning event has zero probability")
        return slice_ / total

    def conditional_sample(self, state: np.ndarray, index: int,
                           rng: np.random.Generator) -> float:
        probs = self.conditional_probs(state, index)
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        return float(np.searchsorted(cum, rng.random(), side="right"))

    def states(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(c) for c in self.cards)))

    def joint_vector(self) -> np.ndarray:
        """Stationary distribution as a flat vector over states()."""
        return self.joint.reshape(-1)

    def site_kernel(self, index: int) -> np.ndarray:
        """Single-site Gibbs kernel P_index as an |Omega| x |Omega| matrix."""
        states = self.states()
        pos = {s: n for n, s in enumerate(states)}
        n = len(states)
        kernel = np.zeros((n, n))
        for a, s in enumerate(states):
            probs = self.conditional_probs(np.array(s, dtype=np.float64), index)
            for v, p in enumerate(probs):
                t = list(s)
                t[index] = v
                kernel[a, pos[tuple(t)]] = p
        return kernel


@dataclass
class FiniteChainSpec:
    """Fully enumerated random-scan sampler: target, site kernels, weights."""

    pi: np.ndarray                      # stationary distribution over states
    kernels: list[np.ndarray]           # one row-stochastic matrix per coordinate
    weights: np.ndarray                 # selection distribution over coordinates
    states: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        self.pi = np.asarray(self.pi, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        n = self.pi.size
        if abs(self.pi.sum() - 1.0) > 1e-9 or np.any(self.pi < 0):
            raise ValueError("pi must be a probability vector")
        if len(self.kernels) != self.weights.size:
            raise ValueError("one kernel per selection weight required")
        if abs(self.weights.sum() - 1.0) > 1e-9 or np.any(self.weights <= 0):
            raise ValueError("weights must be strictly positive and sum to 1")
        for k in self.kernels:
            if k.shape != (n, n):
                raise ValueError("kernel shape must match pi")
            if np.any(k < 0) or np.max(np.abs(k.sum(axis=1) - 1.0)) > 1e-9:
                raise ValueError("kernels must be row-stochastic")
            if np.max(np.abs(self.pi @ k - self.pi)) > 1e-9:
                raise ValueError("each site kernel must preserve pi")

    @classmethod
    def from_tabular(cls, model: TabularModel, weights: np.ndarray) -> "FiniteChainSpec":
        return cls(pi=model.joint_vector(),
                   kernels=[model.site_kernel(i) for i in range(model.dim)],
                   weights=np.asarray(weights, dtype=np.float64),
                   states=model.states())


def augmented_transition_matrix(spec: FiniteChainSpec) -> np.ndarray:
    """Kernel on (state, coordinate) pairs; block (i,j) is weights[j] * P_i."""
    n = spec.pi.size
    d = spec.weights.size
    out = np.zeros((n * d, n * d))
    for i in range(d):
        for j in range(d):
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = spec.weights[j] * spec.kernels[i]
    return out


def augmented_stationary(spec: FiniteChainSpec) -> np.ndarray:
    """Claimed stationary vector on pairs: weights[i] * pi(x)."""
    return np.concatenate([w * spec.pi for w in spec.weights])


def stationarity_residual(spec: FiniteChainSpec) -> float:
    """max |pi_aug^T P - pi_aug^T|; zero iff pi_aug is exactly stationary."""
    p = augmented_transition_matrix(spec)
    pi_aug = augmented_stationary(spec)
    return float(np.max(np.abs(pi_aug @ p - pi_aug)))


def random_finite_chain_spec(rng: np.random.Generator, max_states: int = 16,
                             max_dim: int = 3) -> FiniteChainSpec:
    """Random small product-space target with exact Gibbs kernels."""
    dim = int(rng.integers(1, max_dim + 1))
    # random per-variable cardinalities keeping the product bounded
    cards = []
    budget = max_states
    for k in range(dim):
        remaining = dim - k - 1
        hi = max(2, budget // (2 ** remaining))
        cards.append(int(rng.integers(2, hi + 1)))
        budget //= cards[-1]
    joint = rng.dirichlet(np.ones(int(np.prod(cards)))).reshape(cards)
    # keep mass bounded away from zero so conditionals are well defined
    joint = joint + 1e-3
    model = TabularModel(joint)
    weights = rng.dirichlet(np.ones(dim)) * 0.9 + 0.1 / dim
    return FiniteChainSpec.from_tabular(model, weights)


def scan_objective(weights: np.ndarray, jump_sizes: np.ndarray) -> float:
    """sum_i jump_sizes[i] / weights[i], the quantity square-root weights minimize."""
    weights = np.asarray(weights, dtype=np.float64)
    jump_sizes = np.asarray(jump_sizes, dtype=np.float64)
    if weights.shape != jump_sizes.shape:
        raise ValueError("weights and jump_sizes must have the same shape")
    if np.any(weights <= 0):
        raise ValueError("weights must be strictly positive")
    return float(np.sum(jump_sizes / weights))


def esjd_closed_form(weights: np.ndarray, jump_sizes: np.ndarray, lag: int) -> float:
    """Expected squared displacement over `lag` steps of an independent-
    coordinate chain: sum_i (1 - (1 - q_i)^lag) * jump_sizes[i].

    A coordinate contributes its jump size iff it was visited at least once.
    """
    weights = np.asarray(weights, dtype=np.float64)
    jump_sizes = np.asarray(jump_sizes, dtype=np.float64)
    if lag < 1:
        raise ValueError(f"lag must be >= 1, got {lag}")
    return float(np.sum((1.0 - (1.0 - weights) ** lag) * jump_sizes))


def esjd_monte_carlo(weights: np.ndarray, jump_sizes: np.ndarray, lag: int,
                     trials: int, rng: np.random.Generator) -> tuple[float, float]:
    """Simulate the visit process esjd_closed_form integrates analytically.

    Per trial: draw `lag` coordinate selections from `weights`; every visited
    coordinate redraws its value, unvisited ones keep it. Values are normal
    with variance jump_sizes[i] / 2, so a revisited coordinate's squared
    displacement has mean jump_sizes[i]. Returns (estimate, standard error).
    """
    weights = np.asarray(weights, dtype=np.float64)
    jump_sizes = np.asarray(jump_sizes, dtype=np.float64)
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    if lag < 1:
        raise ValueError(f"lag must be >= 1, got {lag}")
    d = weights.size
    scale = np.sqrt(jump_sizes / 2.0)
    visits = rng.multinomial(lag, weights, size=trials) > 0
    before = rng.normal(size=(trials, d)) * scale
    redrawn = rng.normal(size=(trials, d)) * scale
    after = np.where(visits, redrawn, before)
    totals = ((after - before) ** 2).sum(axis=1)
    est = float(totals.mean())
    se = float(totals.std(ddof=1) / np.sqrt(trials))
    return est, se


def _objective_gradient(theta: np.ndarray, jump_sizes: np.ndarray):
    """Objective, gradient and Hessian of sum d_i/q_i under q = softmax(theta)."""
    theta = theta - theta.max()
    expt = np.exp(theta)
    q = expt / expt.sum()
    ratio = jump_sizes / q
    value = ratio.sum()
    grad = q * value - ratio
    hess = np.diag(q * value + ratio) - np.outer(ratio, q) - np.outer(q, ratio)
    return value, grad, hess, q


def optimal_weights_numeric(jump_sizes: np.ndarray, tol: float = 1e-10,
                            max_iter: int = 500) -> np.ndarray:
    """Minimize scan_objective over the simplex, no closed form used.

    Softmax parameterization, Newton steps with Armijo backtracking on the
    objective, and near the floor of the basin acceptance switches to
    whatever shrinks the gradient norm, down to tol. Jump sizes are
    normalized to unit scale first (the argmin is scale invariant), so tol
    is meaningful regardless of the input's magnitude. The softmax flat
    direction is pinned with a rank-one shift of the Hessian.
    """
    jump_sizes = np.asarray(jump_sizes, dtype=np.float64)
    if np.any(jump_sizes <= 0):
        raise ValueError("jump_sizes must be strictly positive")
    jump_sizes = jump_sizes / jump_sizes.max()
    d = jump_sizes.size
    theta = np.zeros(d)

    value, grad, hess, q = _objective_gradient(theta, jump_sizes)
    for _ in range(max_iter):
        gnorm = np.linalg.norm(grad)
        if gnorm <= tol:
            break
        try:
            shift = max(value, 1.0) * np.ones((d, d)) / d
            step = np.linalg.solve(hess + shift, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        if not np.all(np.isfinite(step)) or step @ grad >= 0:
            step = -grad
        accepted = False
        alpha = 1.0
        for _ in range(60):
            cand = theta + alpha * step
            cval, cgrad, chess, cq = _objective_gradient(cand, jump_sizes)
            sufficient = cval <= value + 1e-4 * alpha * (grad @ step)
            polishing = cval <= value + 1e-12 * abs(value) and \
                np.linalg.norm(cgrad) < gnorm
            if sufficient or polishing:
                theta, value, grad, hess, q = cand, cval, cgrad, chess, cq
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
    return q
