"""Experiment drivers: one full run per scheduler, written to disk.

Layout of an experiment directory:

    config.ini            canonical config actually used
    experiment.json       resolved dimensions, seed, shared-data facts
    <data artifacts>      kind-specific (clean/noisy images, generated corpus)
    <scheduler>/          one subdirectory per scheduler that ran
        trace.csv         recorded states, one row per retained step
        ess.csv           effective sample size per coordinate
        esjd.csv          empirical squared jumping distance by lag
        summary.json      resolved params plus headline metrics
        weights.csv       weight snapshots (weighted scheduler only)
        ...               kind-specific metric files

Every scheduler sees the same seed, so the engine's model-noise substream is
identical across them; the data itself (covariance draw, noise, corpus,
initial assignments) comes from separate named streams and is shared.

All outputs are deterministic functions of (config, seed): byte-identical
reruns are a supported invariant, so nothing here writes timestamps.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig, serialize_config
from .diagnostics import (ess_report, esjd_empirical, lda_log_likelihood,
                          lda_perplexity, mean_autocorrelation_curve,
                          pca_project, relative_l2_error)
from .engine import ChainConfig, run_chain
from .formats import (gray_to_spins, load_corpus, load_vocab, read_pgm,
                      save_corpus, save_vocab, spins_to_gray, write_csv,
                      write_float_matrix, write_pgm)
from .models import (CollapsedLda, GaussianTarget, IsingDenoiseTarget,
                     LdaDocumentBlocks, corrupt_image, make_bars_corpus,
                     make_covariance, make_shapes_image)
from .schedulers import (ScanScheduler, SystematicScan, UniformScan,
                         WeightedScan, WeightedScanConfig)

__all__ = ["run_experiment", "compare_report", "run_validation"]

# distinct named entropy streams so shared data never collides with the
# engine's scheduler/model substreams
_STREAM_COV = 0x0C0F
_STREAM_NOISE = 0x7015
_STREAM_CORPUS = 0xC0D8
_STREAM_INIT = 0x1217
_STREAM_EVAL = 0xE7A1


def _data_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def make_scheduler(name: str, dim: int, cfg: ExperimentConfig,
                   statistic: str) -> ScanScheduler:
    if name == "systematic":
        return SystematicScan(dim)
    if name == "random":
        return UniformScan(dim)
    if name == "weighted":
        wcfg = WeightedScanConfig(update_period=cfg.update_period, reg=cfg.reg,
                                  adapt_after_burn_in=cfg.adapt_after_burn_in)
        return WeightedScan(dim, wcfg, statistic=statistic)
    raise ConfigError(f"unknown scheduler {name!r}")


def _post_rows(samples: np.ndarray, burn_in: int, thinning: int) -> np.ndarray:
    return samples[burn_in // thinning:]


def _write_common(out: Path, trace, post: np.ndarray, thinning: int) -> dict:
    steps = [(r + 1) * thinning for r in range(trace.samples.shape[0])]
    d = trace.samples.shape[1]
    write_csv(out / "trace.csv", ["step"] + [f"x{j}" for j in range(d)],
              ([s] + list(row) for s, row in zip(steps, trace.samples)))
    ess = ess_report(post) if post.shape[0] >= 4 else \
        {"per_coordinate": np.full(d, np.nan), "min": float("nan")}
    write_csv(out / "ess.csv", ["coordinate", "ess"],
              ([j, ess["per_coordinate"][j]] for j in range(d)))
    esjd_rows = []
    for lag in range(1, min(11, post.shape[0])):
        esjd_rows.append([lag, lag * thinning, esjd_empirical(post, lag)])
    write_csv(out / "esjd.csv", ["lag_rows", "lag_steps", "esjd"], esjd_rows)
    if trace.weight_snapshots:
        write_csv(out / "weights.csv",
                  ["step"] + [f"q{j}" for j in range(d)],
                  ([s] + list(q) for s, q in trace.weight_snapshots))
    counts = np.bincount(trace.selected_indices, minlength=d)
    return {"ess_min": ess["min"],
            "esjd_lag1": esjd_rows[0][2] if esjd_rows else None,
            "selection_counts": counts.tolist()}


def _write_summary(out: Path, payload: dict) -> None:
    (out / "summary.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n")


def _base_summary(cfg: ExperimentConfig, name: str, total: int, burn: int) -> dict:
    return {
        "kind": cfg.kind,
        "scheduler": name,
        "seed": cfg.seed,
        "model": cfg.model,
        "chain": {"steps": total, "burn_in": burn, "thinning": cfg.thinning,
                  "initial_sweeps": cfg.initial_sweeps},
    }


def run_experiment(cfg: ExperimentConfig, out_root: Path) -> Path:
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "config.ini").write_text(serialize_config(cfg))
    driver = {"gaussian": _run_gaussian, "ising": _run_ising, "lda": _run_lda}
    driver[cfg.kind](cfg, out_root)
    return out_root


def _run_gaussian(cfg: ExperimentConfig, out_root: Path) -> None:
    d = cfg.model["dimension"]
    total, burn = cfg.resolve_lengths(d)
    cov = make_covariance(d, cfg.model["rank"], cfg.model["eps"],
                          cfg.model["ridge"], _data_rng(cfg.seed, _STREAM_COV))
    target = GaussianTarget(np.zeros(d), cov)
    start = target.overdispersed_start()
    (out_root / "experiment.json").write_text(json.dumps(
        {"kind": "gaussian", "model": cfg.model, "seed": cfg.seed,
         "marginal_sd": np.sqrt(np.diag(cov)).tolist()},
        sort_keys=True, indent=2) + "\n")

    for name in cfg.schedulers:
        out = out_root / name
        out.mkdir(exist_ok=True)
        sched = make_scheduler(name, d, cfg, target.jump_statistic)
        chain_cfg = ChainConfig(total_iterations=total, burn_in=burn,
                                seed=cfg.seed, thinning=cfg.thinning,
                                initial_sweeps=cfg.initial_sweeps)
        trace = run_chain(target, sched, chain_cfg, start)
        post = _post_rows(trace.samples, burn, cfg.thinning)
        summary = _base_summary(cfg, name, total, burn)
        summary.update(_write_common(out, trace, post, cfg.thinning))

        max_lag = min(100, post.shape[0] - 2)
        if max_lag >= 1:
            curve = mean_autocorrelation_curve(post, max_lag)
            write_csv(out / "autocorrelation.csv", ["lag", "mean_rho"],
                      ([lag, curve[lag]] for lag in range(max_lag + 1)))
            summary["autocorr_lag1_mean"] = float(curve[1])
        scores = pca_project(trace.samples, 2)
        burn_rows = burn // cfg.thinning
        shown = scores[:burn_rows] if burn_rows else scores
        write_csv(out / "pca_trace.csv", ["step", "pc1", "pc2"],
                  ([(r + 1) * cfg.thinning, row[0], row[1]]
                   for r, row in enumerate(shown)))
        summary["sample_variance"] = post.var(axis=0, ddof=1).tolist() \
            if post.shape[0] > 1 else None
        _write_summary(out, summary)


def _resolve_image(spec: str) -> np.ndarray:
    if spec.startswith("shapes:"):
        h, w = (int(p) for p in spec[len("shapes:"):].split("x"))
        return make_shapes_image(h, w)
    return gray_to_spins(read_pgm(spec))


def _run_ising(cfg: ExperimentConfig, out_root: Path) -> None:
    truth = _resolve_image(cfg.model["image"])
    h, w = truth.shape
    d = h * w
    total, burn = cfg.resolve_lengths(d)
    noisy = corrupt_image(truth, cfg.model["noise_sd"],
                          _data_rng(cfg.seed, _STREAM_NOISE))
    target = IsingDenoiseTarget(noisy, cfg.model["coupling"], cfg.model["noise_sd"])
    start = target.threshold_start()
    truth_flat = truth.reshape(-1)
    start_error = relative_l2_error(truth_flat, start)
    write_pgm(out_root / "clean.pgm", spins_to_gray(truth))
    write_float_matrix(out_root / "noisy.f32m", noisy)
    (out_root / "experiment.json").write_text(json.dumps(
        {"kind": "ising", "model": cfg.model, "seed": cfg.seed,
         "height": h, "width": w, "threshold_error": start_error},
        sort_keys=True, indent=2) + "\n")

    for name in cfg.schedulers:
        out = out_root / name
        out.mkdir(exist_ok=True)
        sched = make_scheduler(name, d, cfg, target.jump_statistic)
        chain_cfg = ChainConfig(total_iterations=total, burn_in=burn,
                                seed=cfg.seed, thinning=cfg.thinning,
                                initial_sweeps=cfg.initial_sweeps)
        trace = run_chain(target, sched, chain_cfg, start)
        post = _post_rows(trace.samples, burn, cfg.thinning)
        summary = _base_summary(cfg, name, total, burn)
        summary.update(_write_common(out, trace, post, cfg.thinning))

        running = np.cumsum(trace.samples, axis=0) \
            / np.arange(1, trace.samples.shape[0] + 1)[:, None]
        errors = [relative_l2_error(truth_flat, running[r])
                  for r in range(running.shape[0])]
        write_csv(out / "error.csv", ["step", "iteration", "error"],
                  ([(r + 1) * cfg.thinning, (r + 1) * cfg.thinning / d, e]
                   for r, e in enumerate(errors)))
        posterior_mean = post.mean(axis=0) if post.shape[0] else running[-1]
        recovered = np.where(posterior_mean >= 0, 1.0, -1.0).reshape(h, w)
        write_pgm(out / "recovered.pgm", spins_to_gray(recovered))
        summary["final_error"] = errors[-1]
        summary["threshold_error"] = start_error
        summary["recovered_error"] = relative_l2_error(truth, recovered)
        _write_summary(out, summary)


def _load_lda_data(cfg: ExperimentConfig, out_root: Path):
    m = cfg.model
    if m["corpus"] == "bars":
        grid = m["grid"]
        docs, _ = make_bars_corpus(m["n_docs"], m["doc_length"],
                                   _data_rng(cfg.seed, _STREAM_CORPUS), grid)
        vocab = [f"r{i // grid}c{i % grid}" for i in range(grid * grid)]
        save_corpus(out_root / "corpus.txt", docs)
        save_vocab(out_root / "vocab.txt", vocab)
    else:
        docs = load_corpus(m["corpus"])
        vocab = load_vocab(m["vocab"])
    held = m.get("heldout")
    if held is None:
        heldout = None
    elif held.startswith("bars:"):
        heldout, _ = make_bars_corpus(int(held[len("bars:"):]), m["doc_length"],
                                      _data_rng(cfg.seed, _STREAM_EVAL), m["grid"])
    else:
        heldout = load_corpus(held)
    return docs, vocab, heldout


def _run_lda(cfg: ExperimentConfig, out_root: Path) -> None:
    docs, vocab, heldout = _load_lda_data(cfg, out_root)
    m = cfg.model
    lda = CollapsedLda(docs, m["n_topics"], len(vocab), m["alpha"], m["beta"])
    lda.init_assignments(_data_rng(cfg.seed, _STREAM_INIT))
    initial_z = [z.copy() for z in lda.assignments]
    adapter = LdaDocumentBlocks(lda)
    d = adapter.dim
    total, burn = cfg.resolve_lengths(d)
    resolved = dict(cfg.model, alpha=lda.alpha, beta=lda.beta)
    (out_root / "experiment.json").write_text(json.dumps(
        {"kind": "lda", "model": resolved, "seed": cfg.seed,
         "n_docs": len(docs), "vocab_size": len(vocab),
         "n_tokens": int(sum(doc.size for doc in docs))},
        sort_keys=True, indent=2) + "\n")

    for name in cfg.schedulers:
        out = out_root / name
        out.mkdir(exist_ok=True)
        lda.assignments = [z.copy() for z in initial_z]
        lda.recount()
        sched = make_scheduler(name, d, cfg, adapter.jump_statistic)
        chain_cfg = ChainConfig(total_iterations=total, burn_in=burn,
                                seed=cfg.seed, thinning=cfg.thinning,
                                initial_sweeps=cfg.initial_sweeps)
        logliks: list[tuple[int, float]] = []
        perplexities: list[tuple[int, float]] = []

        def record(step, state):
            iteration = step // d
            logliks.append((iteration, lda_log_likelihood(lda)))
            if heldout is not None:
                eval_rng = np.random.default_rng([cfg.seed, _STREAM_EVAL, iteration])
                perplexities.append(
                    (iteration, lda_perplexity(lda, heldout, eval_rng)))

        trace = run_chain(adapter, sched, chain_cfg, adapter.initial_state(),
                          callback=record, callback_every=d)
        post = _post_rows(trace.samples, burn, cfg.thinning)
        summary = _base_summary(cfg, name, total, burn)
        summary.update(_write_common(out, trace, post, cfg.thinning))

        write_csv(out / "loglik.csv", ["iteration", "loglik"], logliks)
        if heldout is not None:
            write_csv(out / "perplexity.csv", ["iteration", "perplexity"],
                      perplexities)
            summary["final_perplexity"] = perplexities[-1][1] if perplexities else None
        phi = lda.phi_hat()
        write_csv(out / "topics.csv",
                  ["topic"] + list(vocab),
                  ([k] + list(phi[k]) for k in range(phi.shape[0])))
        summary["final_loglik"] = logliks[-1][1] if logliks else None
        _write_summary(out, summary)


_COMPARE_METRIC = {
    "gaussian": ("autocorrelation.csv", "lag", "mean_rho"),
    "ising": ("error.csv", "iteration", "error"),
    "lda": ("loglik.csv", "iteration", "loglik"),
}


def compare_report(dirs) -> tuple[list[str], list[list[str]]]:
    """Merge the primary metric of several scheduler runs of one experiment.

    Returns (header, rows) with the metric key in column one and one column
    per run. Runs must agree on kind, model and chain settings; seeds and
    schedulers may differ.
    """
    from .formats import read_csv_rows

    if len(dirs) < 2:
        raise ConfigError("compare needs at least two run directories")
    summaries = []
    for d in dirs:
        path = Path(d) / "summary.json"
        if not path.exists():
            raise ConfigError(f"{d}: not a run directory (no summary.json)")
        summaries.append(json.loads(path.read_text()))
    kinds = {s["kind"] for s in summaries}
    if len(kinds) != 1:
        raise ConfigError(f"cannot compare different experiment kinds: {sorted(kinds)}")
    kind = kinds.pop()
    reference = (summaries[0]["model"], summaries[0]["chain"])
    for s, d in zip(summaries[1:], dirs[1:]):
        if (s["model"], s["chain"]) != reference:
            raise ConfigError(f"{d}: model/chain settings differ from {dirs[0]}")

    metric_file, key_col, value_col = _COMPARE_METRIC[kind]
    tables = []
    names = []
    for s, d in zip(summaries, dirs):
        header, rows = read_csv_rows(Path(d) / metric_file)
        ki, vi = header.index(key_col), header.index(value_col)
        tables.append({row[ki]: row[vi] for row in rows})
        base = s["scheduler"]
        name = base
        n = 2
        while name in names:
            name = f"{base}_{n}"
            n += 1
        names.append(name)
    # preserve the first run's row order
    header0, rows0 = read_csv_rows(Path(dirs[0]) / metric_file)
    ki = header0.index(key_col)
    ordered_keys = [row[ki] for row in rows0]
    out_rows = []
    for key in ordered_keys:
        if all(key in t for t in tables):
            out_rows.append([key] + [t[key] for t in tables])
    return [key_col] + names, out_rows


def run_validation(trials: int | None, seed: int = 0, log=print) -> bool:
    """Randomized oracle suite behind the `validate` subcommand."""
    from .validation import (esjd_closed_form, esjd_monte_carlo,
                             optimal_weights_numeric, random_finite_chain_spec,
                             scan_objective, stationarity_residual)

    rng = np.random.default_rng([seed, 0x5EED])
    ok = True

    n_specs = trials or 50
    worst = 0.0
    for _ in range(n_specs):
        worst = max(worst, stationarity_residual(random_finite_chain_spec(rng)))
    passed = worst <= 1e-10
    ok &= passed
    log(f"stationarity residual over {n_specs} random chains: "
        f"max {worst:.3e} {'PASS' if passed else 'FAIL'} (need <= 1e-10)")

    n_lemma = trials or 100
    worst_coord = worst_obj = 0.0
    for _ in range(n_lemma):
        dim = int(rng.integers(2, 11))
        jumps = rng.uniform(0.01, 100.0, dim)
        q = optimal_weights_numeric(jumps)
        analytic = np.sqrt(jumps) / np.sqrt(jumps).sum()
        worst_coord = max(worst_coord, float(np.max(np.abs(q - analytic))))
        bound = np.sqrt(jumps).sum() ** 2
        worst_obj = max(worst_obj,
                        abs(scan_objective(q, jumps) - bound) / bound)
    passed = worst_coord <= 1e-6 and worst_obj <= 1e-9
    ok &= passed
    log(f"square-root weight optimality over {n_lemma} draws: "
        f"max coordinate error {worst_coord:.3e}, objective gap {worst_obj:.3e} "
        f"{'PASS' if passed else 'FAIL'} (need <= 1e-6 / 1e-9)")

    n_esjd = min(trials or 5, 20)
    worst_sigma = 0.0
    for _ in range(n_esjd):
        dim = int(rng.integers(2, 8))
        weights = rng.dirichlet(np.ones(dim))
        jumps = rng.uniform(0.1, 5.0, dim)
        lag = int(rng.integers(1, 9))
        est, se = esjd_monte_carlo(weights, jumps, lag, 10 ** 5, rng)
        closed = esjd_closed_form(weights, jumps, lag)
        worst_sigma = max(worst_sigma, abs(est - closed) / se)
    passed = worst_sigma <= 3.0
    ok &= passed
    log(f"jump-distance simulation vs closed form over {n_esjd} configs: "
        f"max deviation {worst_sigma:.2f} standard errors "
        f"{'PASS' if passed else 'FAIL'} (need <= 3)")
    return bool(ok)
