"""Chain quality metrics: autocorrelation, effective sample size, empirical
squared jumping distance, PCA projections, reconstruction error, and the LDA
likelihood family.

Conventions. Series are 1-d arrays; sample matrices are (n_samples, dim) with
one row per recorded state. Autocorrelations use the biased normalization
(divide by n and the lag-0 autocovariance), the standard choice that keeps
estimated spectra nonnegative.
"""

from __future__ import annotations

import warnings

import numpy as np

__all__ = [
    "autocorrelation",
    "autocorrelation_curve",
    "mean_autocorrelation_curve",
    "effective_sample_size",
    "ess_report",
    "esjd_empirical",
    "esjd_empirical_se",
    "pca_project",
    "relative_l2_error",
    "lda_log_likelihood",
    "lda_perplexity",
]


def _check_series(series: np.ndarray) -> np.ndarray:
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1 or series.size < 2:
        raise ValueError("series must be 1-d with at least 2 entries")
    if np.ptp(series) == 0:
        raise ValueError("series is constant; autocorrelation undefined")
    return series


def autocorrelation_curve(series: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased autocorrelation estimates at lags 0..max_lag, via FFT."""
    series = _check_series(series)
    n = series.size
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must be in [0, {n}), got {max_lag}")
    centered = series - series.mean()
    # circular convolution on a zero-padded grid gives linear autocovariance
    size = 1 << int(np.ceil(np.log2(2 * n - 1)))
    f = np.fft.rfft(centered, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:max_lag + 1]
    return acov / acov[0]


def autocorrelation(series: np.ndarray, lag: int) -> float:
    """Biased autocorrelation estimate at a single lag."""
    return float(autocorrelation_curve(series, lag)[lag])


def mean_autocorrelation_curve(samples: np.ndarray, max_lag: int) -> np.ndarray:
    """Autocorrelation curve averaged over coordinates of a sample matrix.

    Constant coordinates (never updated, or degenerate) are skipped.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2:
        raise ValueError("samples must be 2-d (n_samples, dim)")
    curves = []
    for j in range(samples.shape[1]):
        col = samples[:, j]
        if np.ptp(col) == 0:
            continue
        curves.append(autocorrelation_curve(col, max_lag))
    if not curves:
        raise ValueError("all coordinates are constant")
    return np.mean(curves, axis=0)


def effective_sample_size(series: np.ndarray, max_lag: int | None = None) -> float:
    """N / (1 + 2 sum rho_k) with the initial-positive-sequence truncation.

    Lag-pair sums gamma_m = rho_{2m} + rho_{2m+1} are positive for a
    reversible chain; summation stops at the first nonpositive pair (or at
    max_lag if given). A nonpositive truncated denominator is a degenerate
    estimate: warns and reports N.
    """
    series = _check_series(series)
    n = series.size
    if max_lag is None:
        max_lag = n - 1
    if not 1 <= max_lag < n:
        raise ValueError(f"max_lag must be in [1, {n}), got {max_lag}")
    rho = autocorrelation_curve(series, max_lag)
    # pad with a zero so the last odd lag forms a pair
    if rho.size % 2 == 1:
        rho = np.append(rho, 0.0)
    pair_sums = rho[0::2] + rho[1::2]
    tau = 0.0
    for g in pair_sums:
        if g <= 0:
            break
        tau += 2.0 * g
    tau -= 1.0
    if tau <= 0:
        warnings.warn("nonpositive autocorrelation-time estimate; reporting N")
        return float(n)
    return float(n / tau)


def ess_report(samples: np.ndarray, max_lag: int | None = None) -> dict:
    """Per-coordinate ESS plus the minimum. Constant coordinates report NaN."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2:
        raise ValueError("samples must be 2-d (n_samples, dim)")
    per = np.full(samples.shape[1], np.nan)
    for j in range(samples.shape[1]):
        col = samples[:, j]
        if np.ptp(col) == 0:
            continue
        per[j] = effective_sample_size(col, max_lag)
    finite = per[np.isfinite(per)]
    minimum = float(finite.min()) if finite.size else float("nan")
    return {"per_coordinate": per, "min": minimum}


def esjd_empirical(samples: np.ndarray, lag: int = 1) -> float:
    """Mean squared displacement between recorded states `lag` rows apart.

    The lag counts recorded rows; with thinning this is thinning * lag
    single-variable steps of the underlying chain. Lag 0 is 0 by definition.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2:
        raise ValueError("samples must be 2-d (n_samples, dim)")
    if not 0 <= lag < samples.shape[0]:
        raise ValueError(f"lag must be in [0, {samples.shape[0]}), got {lag}")
    if lag == 0:
        return 0.0
    diffs = samples[lag:] - samples[:-lag]
    return float((diffs ** 2).sum(axis=1).mean())


def esjd_empirical_se(samples: np.ndarray, lag: int = 1, n_batches: int = 30) -> float:
    """Batch-means standard error for esjd_empirical.

    Displacement terms overlap and the chain itself mixes slowly, so the
    naive iid standard error understates; batch means absorb the
    autocorrelation.
    """
    samples = np.asarray(samples, dtype=np.float64)
    diffs = samples[lag:] - samples[:-lag]
    totals = (diffs ** 2).sum(axis=1)
    if totals.size < 2 * n_batches:
        raise ValueError("not enough displacement terms for batching")
    usable = (totals.size // n_batches) * n_batches
    batches = totals[:usable].reshape(n_batches, -1).mean(axis=1)
    return float(batches.std(ddof=1) / np.sqrt(n_batches))


def pca_project(samples: np.ndarray, n_components: int = 2) -> np.ndarray:
    """Scores on the top principal components of a sample matrix.

    Sign convention: each component's largest-magnitude loading is positive,
    so projections are reproducible. Directions beyond the matrix rank get
    zero scores.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise ValueError("samples must be 2-d with at least 2 rows")
    if not 1 <= n_components <= samples.shape[1]:
        raise ValueError(f"n_components must be in [1, {samples.shape[1]}]")
    centered = samples - samples.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    scores = np.zeros((samples.shape[0], n_components))
    # rank cutoff relative to the largest singular value
    cut = s[0] * max(samples.shape) * np.finfo(np.float64).eps if s.size else 0.0
    for c in range(min(n_components, s.size)):
        if s[c] <= cut:
            break
        loading = vt[c]
        sign = 1.0 if loading[np.argmax(np.abs(loading))] >= 0 else -1.0
        scores[:, c] = sign * u[:, c] * s[c]
    return scores


def relative_l2_error(reference: np.ndarray, estimate: np.ndarray) -> float:
    """||reference - estimate||_F / ||reference||_F."""
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if reference.shape != estimate.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {estimate.shape}")
    denom = np.linalg.norm(reference)
    if denom == 0:
        raise ValueError("reference has zero norm")
    return float(np.linalg.norm(reference - estimate) / denom)


def lda_log_likelihood(model) -> float:
    """Training log likelihood under the model's point estimates.

    sum over tokens of log sum_k theta_hat[doc, k] * phi_hat[k, word].
    """
    phi = model.phi_hat()
    theta = model.theta_hat()
    predictive = theta @ phi
    total = 0.0
    for m, doc in enumerate(model.docs):
        total += float(np.log(predictive[m, doc]).sum())
    return total


def lda_perplexity(model, heldout_docs, rng: np.random.Generator,
                   fold_in_sweeps: int = 20) -> float:
    """Held-out perplexity: exp(-log likelihood / token count).

    Document mixtures for the held-out set are estimated by fold-in: token
    topics are resampled for `fold_in_sweeps` passes under the frozen trained
    topic-word distributions, then point-estimate mixtures score the tokens.
    """
    theta = model.fold_in(heldout_docs, rng, sweeps=fold_in_sweeps)
    phi = model.phi_hat()
    loglik = 0.0
    count = 0
    for m, doc in enumerate(heldout_docs):
        doc = np.asarray(doc, dtype=np.intp)
        predictive = theta[m] @ phi
        loglik += float(np.log(predictive[doc]).sum())
        count += doc.size
    if count == 0:
        raise ValueError("held-out set has no tokens")
    return float(np.exp(-loglik / count))
