"""Experiment runners: seeded Monte Carlo sweeps against the theory oracles.

Each runner returns (columns, rows) ready for the output module. Monte Carlo
fan-out is trial-level: trial t of a sweep uses the seed derived from
(config seed, stage, t), results are reduced in trial order, and the worker
count therefore never changes any output byte.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..design import (
    cutoff_indices,
    gain_profile,
    masked_surrogate,
    optimal_mask,
    optimal_surrogate,
    scaling_exponent,
)
from ..estimators import (
    STAGE_TARGET,
    ProblemInstance,
    derive_seed,
    empirical_excess_risk,
    fit,
    sample_dataset,
    two_stage_fit,
)
from ..spectrum import as_spectrum, power_law_signal, power_law_spectrum, solve_tau
from ..theory import one_stage_risk, two_stage_risk
from .config import ExperimentConfig, two_stage_m_grid

RESULT_COLUMNS = (
    "experiment",
    "p",
    "alpha",
    "beta_exp",
    "sigma_t_sq",
    "sigma_s_sq",
    "trials",
    "seed",
    "kind",
    "n",
    "m",
    "source",
    "theory_bias",
    "theory_variance",
    "theory_total",
    "mc_mean",
    "mc_se",
)

GAIN_COLUMNS = (
    "experiment",
    "p",
    "alpha",
    "beta_exp",
    "n",
    "i",
    "eigenvalue",
    "zeta",
    "beta_star",
    "beta_opt",
    "gain",
    "masked",
    "threshold_amplify",
    "threshold_mask",
)

MASK_COLUMNS = (
    "experiment",
    "p",
    "alpha",
    "n",
    "mask_size",
    "predicted_count",
    "abs_error",
    "tolerance",
    "within",
)

SLOPE_COLUMNS = (
    "experiment",
    "p",
    "alpha",
    "beta_exp",
    "sigma_t_sq",
    "n",
    "target_total",
    "optimal_total",
    "slope_target",
    "slope_optimal",
    "predicted_slope",
)


def _fan_out(fn, trials: int, workers: int) -> np.ndarray:
    """Run fn(0..trials-1), reducing in trial order regardless of worker count."""
    if workers <= 1:
        values = [fn(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, t) for t in range(trials)]
            values = [f.result() for f in futures]
    return np.asarray(values, dtype=np.float64)


def mc_one_stage_risks(
    spectrum, beta_star, surrogate_values, sigma_sq, n, trials, seed, workers=1
) -> np.ndarray:
    """Per-trial empirical excess risks of the fit on surrogate-labeled data.

    The trial seed depends only on (seed, trial), not on the surrogate, so
    runs with different surrogate kinds at the same seed share their design
    matrices and noise draws trial for trial (paired comparisons).
    """
    lam = as_spectrum(spectrum)

    def one_trial(t: int) -> float:
        ds = sample_dataset(
            lam, surrogate_values, sigma_sq, n, derive_seed(seed, STAGE_TARGET, t)
        )
        fitted = fit(ds.design, ds.labels).fitted
        return empirical_excess_risk(fitted, beta_star, lam)

    return _fan_out(one_trial, trials, workers)


def mc_two_stage_risks(inst: ProblemInstance, trials, seed, workers=1) -> np.ndarray:
    """Per-trial empirical excess risks of the full two-stage pipeline."""

    def one_trial(t: int) -> float:
        _, beta_s2t = two_stage_fit(inst, seed, trial=t)
        return empirical_excess_risk(beta_s2t, inst.beta_star, inst.spectrum_t)

    return _fan_out(one_trial, trials, workers)


def mean_and_se(risks: np.ndarray) -> tuple[float, float | None]:
    mean = float(np.mean(risks))
    if risks.size < 2:
        return mean, None
    return mean, float(np.std(risks, ddof=1) / math.sqrt(risks.size))


def surrogate_values_for_kind(kind: str, spectrum, beta_star, n, stats) -> np.ndarray:
    if kind == "ground-truth":
        return np.asarray(beta_star, dtype=np.float64)
    if kind == "optimal":
        return optimal_surrogate(spectrum, beta_star, n, stats=stats).values
    if kind == "masked":
        return masked_surrogate(beta_star, optimal_mask(spectrum, n, stats=stats)).values
    raise ValueError(f"unknown surrogate kind {kind!r}")


def run_risk_vs_n(cfg: ExperimentConfig):
    """Theory and Monte Carlo excess risk per (n, surrogate kind)."""
    alpha = cfg.alpha_scalar()
    spectrum = power_law_spectrum(cfg.p, alpha)
    beta_star = power_law_signal(cfg.p, alpha, cfg.beta_exp)
    rows = []
    for n in cfg.n:
        stats = solve_tau(spectrum, n)
        for kind in cfg.kinds:
            values = surrogate_values_for_kind(kind, spectrum, beta_star, n, stats)
            report = one_stage_risk(
                spectrum, beta_star, values, n, cfg.sigma_t_sq, stats=stats
            )
            base = (
                cfg.experiment,
                cfg.p,
                alpha,
                cfg.beta_exp,
                cfg.sigma_t_sq,
                cfg.sigma_s_sq,
                cfg.trials,
                cfg.seed,
                kind,
                n,
                None,
            )
            rows.append(
                base
                + ("theory", report.bias, report.variance, report.total, None, None)
            )
            risks = mc_one_stage_risks(
                spectrum,
                beta_star,
                values,
                cfg.sigma_t_sq,
                n,
                cfg.trials,
                cfg.seed,
                cfg.workers,
            )
            mc_mean, mc_se = mean_and_se(risks)
            rows.append(
                base
                + (
                    "monte-carlo",
                    report.bias,
                    report.variance,
                    report.total,
                    mc_mean,
                    mc_se,
                )
            )
    return RESULT_COLUMNS, rows


def run_two_stage_grid(cfg: ExperimentConfig, beta_star=None):
    """Theory (two-stage oracle) vs Monte Carlo (two_stage_fit) over an (alpha, n, m) grid.

    Grid points with n >= p or m >= p are outside the fixed-point regime and
    are skipped with a warning rather than failing the sweep. Pass beta_star
    to replace the power-law signal (the spectrum stays power-law).
    """
    rows = []
    m_grid = two_stage_m_grid(cfg)
    for alpha in cfg.alpha:
        spectrum = power_law_spectrum(cfg.p, alpha)
        signal = (
            power_law_signal(cfg.p, alpha, cfg.beta_exp)
            if beta_star is None
            else np.asarray(beta_star, dtype=np.float64)
        )
        for n, m in zip(cfg.n, m_grid):
            if n >= cfg.p or m >= cfg.p:
                print(
                    f"warning: skipping grid point n={n}, m={m}: "
                    f"two-stage theory needs n < p and m < p (p={cfg.p})",
                    file=sys.stderr,
                )
                continue
            inst = ProblemInstance(
                spectrum_t=spectrum,
                spectrum_s=spectrum,
                beta_star=signal,
                sigma_t_sq=cfg.sigma_t_sq,
                sigma_s_sq=cfg.sigma_s_sq,
                n=n,
                m=m,
            )
            report = two_stage_risk(inst)
            base = (
                cfg.experiment,
                cfg.p,
                alpha,
                cfg.beta_exp,
                cfg.sigma_t_sq,
                cfg.sigma_s_sq,
                cfg.trials,
                cfg.seed,
                "two-stage",
                n,
                m,
            )
            rows.append(
                base
                + ("theory", report.bias, report.variance, report.total, None, None)
            )
            risks = mc_two_stage_risks(inst, cfg.trials, cfg.seed, cfg.workers)
            mc_mean, mc_se = mean_and_se(risks)
            rows.append(
                base
                + (
                    "monte-carlo",
                    report.bias,
                    report.variance,
                    report.total,
                    mc_mean,
                    mc_se,
                )
            )
    return RESULT_COLUMNS, rows


def run_gain_profile(cfg: ExperimentConfig, spectrum=None, beta_star=None):
    """Per-coordinate profile: eigenvalue, shrinkage, optimal surrogate, mask bit.

    The spectrum and signal default to the power-law family named by the
    config; explicit overrides let other families (isotropic, custom) reuse
    the same table machinery, at the price of blank alpha/beta_exp columns.
    """
    n = cfg.n_scalar()
    if spectrum is None:
        alpha = cfg.alpha_scalar()
        lam = power_law_spectrum(cfg.p, alpha)
    else:
        alpha = None
        lam = as_spectrum(spectrum)
    if beta_star is None:
        beta_exp = cfg.beta_exp if alpha is not None else None
        signal = (
            power_law_signal(cfg.p, alpha, cfg.beta_exp)
            if alpha is not None
            else np.ones_like(lam)
        )
    else:
        beta_exp = None
        signal = np.asarray(beta_star, dtype=np.float64)
    p = lam.size

    stats = solve_tau(lam, n)
    profile = gain_profile(lam, n, stats=stats)
    mask = optimal_mask(lam, n, stats=stats)
    optimal = optimal_surrogate(lam, signal, n, stats=stats)
    threshold_amplify = profile.threshold_amplify
    threshold_mask = math.sqrt(threshold_amplify)
    rows = []
    for i in range(p):
        rows.append(
            (
                cfg.experiment,
                p,
                alpha,
                beta_exp,
                n,
                i + 1,
                float(lam[i]),
                float(stats.zeta[i]),
                float(signal[i]),
                float(optimal.values[i]),
                float(profile.gains[i]),
                1 if i in mask else 0,
                threshold_amplify,
                threshold_mask,
            )
        )
    return GAIN_COLUMNS, rows


def run_mask_count(cfg: ExperimentConfig):
    """Optimal-mask size against the asymptotic count n * C2 per (alpha, n)."""
    rows = []
    for alpha in cfg.alpha:
        spectrum = power_law_spectrum(cfg.p, alpha)
        for n in cfg.n:
            size = len(optimal_mask(spectrum, n))
            _, i_mask = cutoff_indices(alpha, n)
            abs_error = abs(size - i_mask)
            tolerance = 0.05 * n + 5.0
            rows.append(
                (
                    cfg.experiment,
                    cfg.p,
                    alpha,
                    n,
                    size,
                    i_mask,
                    abs_error,
                    tolerance,
                    1 if abs_error <= tolerance else 0,
                )
            )
    return MASK_COLUMNS, rows


def scaling_slope_table(cfg: ExperimentConfig):
    """Theory-only risk decay series plus fitted log-log slopes.

    Returns (columns, rows, summary) where summary maps
    {"slope_target", "slope_optimal", "predicted"} to floats (None for a
    series not requested via kinds).
    """
    alpha = cfg.alpha_scalar()
    spectrum = power_law_spectrum(cfg.p, alpha)
    beta_star = power_law_signal(cfg.p, alpha, cfg.beta_exp)
    want_target = "ground-truth" in cfg.kinds
    want_optimal = "optimal" in cfg.kinds

    n_values = sorted(cfg.n)
    target_totals = []
    optimal_totals = []
    for n in n_values:
        stats = solve_tau(spectrum, n)
        if want_target:
            target_totals.append(
                one_stage_risk(
                    spectrum, beta_star, beta_star, n, cfg.sigma_t_sq, stats=stats
                ).total
            )
        if want_optimal:
            values = optimal_surrogate(spectrum, beta_star, n, stats=stats).values
            optimal_totals.append(
                one_stage_risk(
                    spectrum, beta_star, values, n, cfg.sigma_t_sq, stats=stats
                ).total
            )

    def fitted_slope(totals):
        return float(np.polyfit(np.log(n_values), np.log(totals), 1)[0])

    slope_target = fitted_slope(target_totals) if want_target else None
    slope_optimal = fitted_slope(optimal_totals) if want_optimal else None
    predicted = -scaling_exponent(alpha, cfg.beta_exp)

    rows = []
    for idx, n in enumerate(n_values):
        rows.append(
            (
                cfg.experiment,
                cfg.p,
                alpha,
                cfg.beta_exp,
                cfg.sigma_t_sq,
                n,
                target_totals[idx] if want_target else None,
                optimal_totals[idx] if want_optimal else None,
                slope_target,
                slope_optimal,
                predicted,
            )
        )
    summary = {
        "slope_target": slope_target,
        "slope_optimal": slope_optimal,
        "predicted": predicted,
    }
    return SLOPE_COLUMNS, rows, summary


def run_scaling_slope(cfg: ExperimentConfig):
    """Fitted log-log slopes (target, optimal) and the predicted slope."""
    _, _, summary = scaling_slope_table(cfg)
    return summary["slope_target"], summary["slope_optimal"], summary["predicted"]
