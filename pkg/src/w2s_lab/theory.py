"""Deterministic risk oracles for ridgeless regression with designed surrogates.

All risks are population excess risks of the minimum-norm interpolator in the
overparameterized proportional regime, measured against the ground truth
beta_star under the target covariance:

    R = E || Sigma_t^(1/2) (beta_hat - beta_star) ||^2.

The closed forms live entirely in spectral coordinates. With stats
(tau, zeta, Omega) from the fixed point at sample count n:

  one stage, labels from a fixed surrogate beta_s with noise sigma^2:
      bias     = sum_i lambda_i ((1 - zeta_i) beta_s_i - beta_star_i)^2
      variance = Omega * (sigma^2 + sum_i lambda_i zeta_i^2 beta_s_i^2) / (1 - Omega)

  the label-noise amplification constant, kappa = p/n:
      gamma^2 = kappa * (sigma^2 + sum_i lambda_i zeta_i^2 beta_s_i^2) / (1 - Omega)

  so variance = gamma^2 * n * Omega / p. The two-stage form composes two fixed
  points and adds the stage-one estimation error propagated through stage two.

Dense-matrix reference implementations of the same quantities (slow, p <= a few
hundred) live in the reference module and are cross-checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import ProblemInstance
from .spectrum import SpectralStats, as_spectrum, solve_tau


@dataclass(frozen=True)
class RiskReport:
    """An excess-risk value split into bias and variance, with its source.

    Theory reports satisfy total = bias + variance by construction. Reports
    with source "monte-carlo" additionally carry the trial count and the
    standard error of the per-trial totals; both stay None for theory reports.
    """

    bias: float
    variance: float
    total: float
    source: str = "theory"
    trials: int | None = None
    se: float | None = None


def _stats_for(spectrum: np.ndarray, n: int, stats: SpectralStats | None) -> SpectralStats:
    if stats is None:
        return solve_tau(spectrum, n)
    if stats.n != int(n) or not np.array_equal(stats.eigenvalues, spectrum):
        raise ValueError("stats were solved for a different spectrum or sample count")
    return stats


def _check_omega(omega: float) -> None:
    if not 0.0 < omega < 1.0:
        raise RuntimeError(f"internal inconsistency: Omega={omega} outside (0, 1)")


def _noise_energy(stats: SpectralStats, beta_s: np.ndarray, sigma_sq: float) -> float:
    lam = stats.eigenvalues
    terms = lam * stats.zeta**2 * beta_s**2
    return sigma_sq + float(np.sum(terms[::-1]))


def gamma_t_sq(stats: SpectralStats, beta_s, sigma_sq: float) -> float:
    """Noise-amplification constant gamma^2 for labels from beta_s.

    gamma^2 = kappa * (sigma^2 + sum_i lambda_i zeta_i^2 beta_s_i^2) / (1 - Omega)
    with kappa = p/n. Satisfies gamma^2 >= kappa * sigma^2, and solves the
    self-consistency relation gamma^2 = kappa * (sigma^2 + R(beta_s; beta_s))
    where R(beta_s; beta_s) is the one-stage risk of estimating beta_s from
    its own labels.
    """
    beta_s = np.asarray(beta_s, dtype=np.float64)
    if beta_s.shape != stats.eigenvalues.shape:
        raise ValueError("beta_s must match the spectrum length")
    if sigma_sq < 0.0:
        raise ValueError(f"sigma_sq must be >= 0, got {sigma_sq}")
    _check_omega(stats.omega)
    kappa = stats.p / stats.n
    return kappa * _noise_energy(stats, beta_s, sigma_sq) / (1.0 - stats.omega)


def one_stage_risk(
    spectrum,
    beta_star,
    beta_s,
    n: int,
    sigma_sq: float,
    stats: SpectralStats | None = None,
) -> RiskReport:
    """Excess risk of a single ridgeless fit whose labels come from beta_s.

    Args:
        spectrum: covariance eigenvalues, non-increasing.
        beta_star: ground truth the risk is measured against.
        beta_s: vector generating the labels (beta_s = beta_star recovers the
            standard self-labeled fit).
        n: sample count, 1 <= n < p.
        sigma_sq: label noise variance, >= 0.
        stats: optional precomputed SpectralStats for this (spectrum, n).

    Returns:
        RiskReport with total = bias + variance exactly.
    """
    lam = as_spectrum(spectrum)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    beta_s = np.asarray(beta_s, dtype=np.float64)
    if beta_star.shape != lam.shape or beta_s.shape != lam.shape:
        raise ValueError("beta_star and beta_s must match the spectrum length")
    if sigma_sq < 0.0:
        raise ValueError(f"sigma_sq must be >= 0, got {sigma_sq}")
    st = _stats_for(lam, n, stats)
    _check_omega(st.omega)
    one_minus_zeta = st.one_minus_zeta()
    bias_terms = lam * (one_minus_zeta * beta_s - beta_star) ** 2
    bias = float(np.sum(bias_terms[::-1]))
    variance = st.omega * _noise_energy(st, beta_s, sigma_sq) / (1.0 - st.omega)
    return RiskReport(bias=bias, variance=variance, total=bias + variance)


def omniscient_risk(
    spectrum,
    beta_star,
    sigma_sq: float,
    n: int,
    stats: SpectralStats | None = None,
) -> RiskReport:
    """Excess risk of the standard fit on ground-truth labels (beta_s = beta_star)."""
    return one_stage_risk(spectrum, beta_star, beta_star, n, sigma_sq, stats=stats)


def two_stage_risk(
    inst: ProblemInstance,
    stats_s: SpectralStats | None = None,
    stats_t: SpectralStats | None = None,
) -> RiskReport:
    """Expected excess risk of the estimated-surrogate pipeline.

    Stage one estimates beta_s from m samples under spectrum_s (noise
    sigma_s_sq); stage two refits it from n fresh samples under spectrum_t
    (noise sigma_t_sq). The expectation is over both stages. With fixed-point
    stats (tau_s, zeta_s, Omega_s) at m and (tau_t, zeta_t, Omega_t) at n:

        bias  = sum_i lambda_t_i (1 - (1-zeta_t_i)(1-zeta_s_i))^2 beta_star_i^2
        gamma_s^2 = (p/m) (sigma_s^2 + sum_i lambda_s_i zeta_s_i^2 beta_star_i^2)
                    / (1 - Omega_s)
        E[gamma_t^2] = (p/n) (sigma_t^2 + sum_i lambda_t_i zeta_t_i^2
                       [(1-zeta_s_i)^2 beta_star_i^2
                        + (gamma_s^2/p) lambda_s_i/(lambda_s_i+tau_s)^2])
                       / (1 - Omega_t)
        variance = E[gamma_t^2] n Omega_t / p
                   + (gamma_s^2/p) sum_i lambda_t_i (1-zeta_t_i)^2
                     lambda_s_i/(lambda_s_i+tau_s)^2

    Note (1-zeta_s_i)^2/lambda_s_i = lambda_s_i/(lambda_s_i+tau_s)^2; the
    latter form is used so denormal tail eigenvalues never divide by zero.
    """
    if inst.n >= inst.p or inst.m >= inst.p:
        raise ValueError(
            f"two-stage formulas need n < p and m < p, got n={inst.n}, m={inst.m}, p={inst.p}"
        )
    st_s = _stats_for(inst.spectrum_s, inst.m, stats_s)
    st_t = _stats_for(inst.spectrum_t, inst.n, stats_t)
    _check_omega(st_s.omega)
    _check_omega(st_t.omega)

    lam_s = inst.spectrum_s
    lam_t = inst.spectrum_t
    beta_sq = inst.beta_star**2
    p = inst.p
    one_minus_zeta_s = st_s.one_minus_zeta()
    one_minus_zeta_t = st_t.one_minus_zeta()
    zeta_t = st_t.zeta
    shrink_s = lam_s / (lam_s + st_s.tau) ** 2  # (1-zeta_s)^2 / lambda_s

    bias_terms = lam_t * (1.0 - one_minus_zeta_t * one_minus_zeta_s) ** 2 * beta_sq
    bias = float(np.sum(bias_terms[::-1]))

    gamma_s_sq = gamma_t_sq(st_s, inst.beta_star, inst.sigma_s_sq)

    label_energy = lam_t * zeta_t**2 * (
        one_minus_zeta_s**2 * beta_sq + (gamma_s_sq / p) * shrink_s
    )
    exp_gamma_t = (
        (p / inst.n)
        * (inst.sigma_t_sq + float(np.sum(label_energy[::-1])))
        / (1.0 - st_t.omega)
    )

    variance_stage2 = exp_gamma_t * inst.n * st_t.omega / p
    carry_terms = lam_t * one_minus_zeta_t**2 * shrink_s
    variance_carry = (gamma_s_sq / p) * float(np.sum(carry_terms[::-1]))
    variance = variance_stage2 + variance_carry
    return RiskReport(bias=bias, variance=variance, total=bias + variance)


def monte_carlo_report(spectrum, beta_star, fitted) -> RiskReport:
    """Empirical RiskReport from a batch of fitted coefficient vectors.

    Args:
        spectrum: eigenvalues the risk is evaluated under.
        beta_star: ground-truth coefficients, shape (p,).
        fitted: fitted vectors, shape (trials, p), one row per trial.

    Returns:
        RiskReport with source "monte-carlo". The split uses the exact
        decomposition of the mean excess risk around the mean fitted vector:
        bias is the risk of the averaged estimate, variance the mean weighted
        spread around it, and total their sum. se is the standard error of the
        per-trial totals (None with a single trial).
    """
    lam = as_spectrum(spectrum)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    fitted = np.asarray(fitted, dtype=np.float64)
    if fitted.ndim != 2 or fitted.shape[1] != lam.size or beta_star.shape != lam.shape:
        raise ValueError(
            f"fitted must be (trials, p) matching the spectrum, got {fitted.shape}"
        )
    trials = fitted.shape[0]
    center = fitted.mean(axis=0)
    bias = float(np.sum((lam * (center - beta_star) ** 2)[::-1]))
    variance = float(np.mean(np.sum(lam[None, :] * (fitted - center) ** 2, axis=1)))
    per_trial = np.sum(lam[None, :] * (fitted - beta_star) ** 2, axis=1)
    se = float(np.std(per_trial, ddof=1) / np.sqrt(trials)) if trials > 1 else None
    return RiskReport(
        bias=bias,
        variance=variance,
        total=bias + variance,
        source="monte-carlo",
        trials=trials,
        se=se,
    )


def covariance_shift_map(beta_star, spectrum_s, spectrum_t) -> np.ndarray:
    """Coefficients that re-express source-covariance data in the target frame.

    Returns beta_s with beta_s_i = sqrt(lambda_s_i / lambda_t_i) * beta_star_i,
    i.e. A beta_star for the unique positive diagonal A with
    diag(spectrum_s) = A diag(spectrum_t) A.

    The map transports datasets, not fitted coefficients. A design drawn with
    row covariance diag(spectrum_s) and labels design @ beta_star + noise turns,
    after rescaling column i by sqrt(lambda_t_i / lambda_s_i), into a design
    with row covariance diag(spectrum_t) whose labels read
    design' @ (A beta_star) + noise: the same dataset, viewed in the target
    frame, is a surrogate-labeled target problem. Risks computed through that
    shared view agree in distribution. Refitting the minimum-norm interpolator
    directly on the raw source design is a different estimator (the fit does
    not commute with a non-orthogonal column scaling) and its risk under the
    target spectrum is not the mapped instance's risk; the verify suite pins
    both the agreement and that separation.
    """
    lam_s = as_spectrum(spectrum_s)
    lam_t = as_spectrum(spectrum_t)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    if lam_s.shape != lam_t.shape or beta_star.shape != lam_t.shape:
        raise ValueError("spectra and beta_star must share one length")
    return np.sqrt(lam_s / lam_t) * beta_star


def to_spectral_coordinates(cov: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a covariance matrix and rotate a vector into its eigenbasis.

    Args:
        cov: symmetric positive definite matrix.
        beta: vector of matching dimension.

    Returns:
        (spectrum, beta_bar): eigenvalues sorted non-increasing and the rotated
        coefficients, satisfying cov = U diag(spectrum) U^T, beta_bar = U^T beta.
        Every risk formula in this package is invariant under this change of
        basis, so downstream code only ever sees the pair.
    """
    cov = np.asarray(cov, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"cov must be square, got shape {cov.shape}")
    if beta.shape != (cov.shape[0],):
        raise ValueError(f"beta shape {beta.shape} does not match cov {cov.shape}")
    scale = max(1.0, float(np.max(np.abs(cov))))
    if float(np.max(np.abs(cov - cov.T))) > 1e-10 * scale:
        raise ValueError("cov must be symmetric")
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    if w[0] <= 0.0:
        raise ValueError(f"cov must be positive definite, smallest eigenvalue {w[0]:g}")
    order = slice(None, None, -1)  # eigh returns ascending
    return w[order].copy(), (v.T @ beta)[order].copy()
