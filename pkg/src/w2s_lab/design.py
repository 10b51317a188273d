"""Designers: risk-optimal surrogates, optimal feature masks, scaling predictions.

The one-stage risk is a separable quadratic in the surrogate vector, so the
minimizer has a closed per-coordinate form. Masking is the restriction of the
surrogate to {0, beta_star_i}; its optimal support also separates, into a
threshold rule on the shrinkage factors. A brute-force oracle over all
supports is kept for small p so the threshold rule can be checked against
exhaustive search, and power-law asymptotics predict where the thresholds
land and how fast the optimal risks decay.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .spectrum import SpectralStats, as_spectrum, solve_tau
from .theory import one_stage_risk


@dataclass(frozen=True, eq=False)
class SurrogateParam:
    """A surrogate vector plus the design rule that produced it."""

    values: np.ndarray
    kind: str
    support: frozenset | None = None


@dataclass(frozen=True, eq=False)
class GainProfile:
    """Per-coordinate optimal gain beta_opt_i / beta_star_i (signal independent).

    gains_i exceeds 1 (amplification) exactly when 1 - zeta_i > Omega, i.e.
    zeta_i < threshold_amplify with threshold_amplify = 1 - Omega.
    """

    gains: np.ndarray
    threshold_amplify: float


def _stats_for(lam: np.ndarray, n: int, stats: SpectralStats | None) -> SpectralStats:
    if stats is None:
        return solve_tau(lam, n)
    if stats.n != int(n) or not np.array_equal(stats.eigenvalues, lam):
        raise ValueError("stats were solved for a different spectrum or sample count")
    return stats


def _gains(stats: SpectralStats) -> np.ndarray:
    one_minus = stats.one_minus_zeta()
    ratio = stats.omega / (1.0 - stats.omega)
    return one_minus / (one_minus**2 + ratio * stats.zeta**2)


def gain_profile(spectrum, n: int, stats: SpectralStats | None = None) -> GainProfile:
    """Optimal per-coordinate gains for sample count n, independent of the signal."""
    lam = as_spectrum(spectrum)
    st = _stats_for(lam, n, stats)
    return GainProfile(gains=_gains(st), threshold_amplify=1.0 - st.omega)


def optimal_surrogate(
    spectrum, beta_star, n: int, stats: SpectralStats | None = None
) -> SurrogateParam:
    """Minimizer of the one-stage risk over all surrogate vectors.

    beta_opt_i = beta_star_i * (1 - zeta_i) / ((1 - zeta_i)^2
                 + zeta_i^2 * Omega / (1 - Omega))

    For an isotropic spectrum the fixed point gives Omega = 1 - zeta exactly,
    every gain collapses to 1, and the optimal surrogate is beta_star itself;
    anisotropy is what creates room for improvement.
    """
    lam = as_spectrum(spectrum)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    if beta_star.shape != lam.shape:
        raise ValueError("beta_star must match the spectrum length")
    st = _stats_for(lam, n, stats)
    return SurrogateParam(values=_gains(st) * beta_star, kind="optimal")


def optimal_mask(spectrum, n: int, stats: SpectralStats | None = None) -> frozenset:
    """Risk-optimal support for a masked surrogate: keep i iff zeta_i^2 < 1 - Omega.

    The inequality is strict, so coordinates exactly on the threshold are
    dropped (keeping them changes nothing in exact arithmetic; dropping gives
    the smaller support). Indices are 0-based positions into the spectrum.
    """
    lam = as_spectrum(spectrum)
    st = _stats_for(lam, n, stats)
    keep = np.flatnonzero(st.zeta**2 < 1.0 - st.omega)
    return frozenset(int(i) for i in keep)


def masked_surrogate(beta_star, support) -> SurrogateParam:
    """Surrogate equal to beta_star on `support` and zero elsewhere."""
    beta_star = np.asarray(beta_star, dtype=np.float64)
    sup = frozenset(int(i) for i in support)
    for i in sup:
        if i < 0 or i >= beta_star.size:
            raise IndexError(f"mask index {i} out of range for length {beta_star.size}")
    values = np.zeros_like(beta_star)
    if sup:
        idx = sorted(sup)
        values[idx] = beta_star[idx]
    return SurrogateParam(values=values, kind="masked", support=sup)


def brute_force_mask(
    spectrum, beta_star, n: int, sigma_sq: float, stats: SpectralStats | None = None
) -> frozenset:
    """Exhaustive argmin of the one-stage risk over all 2^p masked supports.

    Only for p <= 20. Ties are broken toward the smaller support, then
    lexicographically on the sorted index tuple, which makes the result
    deterministic and comparable with optimal_mask.
    """
    lam = as_spectrum(spectrum)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    p = lam.size
    if p > 20:
        raise ValueError(f"brute force is limited to p <= 20, got p={p}")
    if beta_star.shape != lam.shape:
        raise ValueError("beta_star must match the spectrum length")
    st = _stats_for(lam, n, stats)

    best_key = None
    best_support = None
    indices = range(p)
    for size in range(p + 1):
        for combo in itertools.combinations(indices, size):
            values = np.zeros(p)
            if combo:
                values[list(combo)] = beta_star[list(combo)]
            risk = one_stage_risk(lam, beta_star, values, n, sigma_sq, stats=st).total
            key = (risk, size, combo)
            if best_key is None or key < best_key:
                best_key = key
                best_support = combo
    return frozenset(best_support)


def cutoff_indices(alpha: float, n: int) -> tuple[float, float]:
    """Asymptotic feature-index cutoffs for a power-law spectrum at sample count n.

    Returns (i_gain, i_mask): below i_gain the optimal gain amplifies
    (gain > 1), below i_mask coordinates survive the optimal mask. Both scale
    linearly in n:

        i_gain = n * alpha sin(pi/alpha) / (pi (alpha - 1)^(1/alpha))
        i_mask = n * alpha sin(pi/alpha) / (pi (sqrt(alpha) - 1)^(1/alpha))

    and i_mask > i_gain for every alpha > 1.
    """
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    base = alpha * math.sin(math.pi / alpha) / math.pi
    i_gain = n * base / (alpha - 1.0) ** (1.0 / alpha)
    i_mask = n * base / (math.sqrt(alpha) - 1.0) ** (1.0 / alpha)
    return i_gain, i_mask


def scaling_exponent(alpha: float, beta_exp: float) -> float:
    """Predicted decay exponent of the optimal-surrogate risk, risk ~ n^-e.

    e = beta_exp - 1 in the signal-limited regime beta_exp < 2*alpha + 1 and
    e = 2*alpha in the approximation-limited regime beta_exp > 2*alpha + 1.
    The boundary beta_exp = 2*alpha + 1 carries a logarithmic correction and
    is rejected.
    """
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if not beta_exp > 1.0:
        raise ValueError(f"beta_exp must be > 1, got {beta_exp}")
    boundary = 2.0 * alpha + 1.0
    if beta_exp == boundary:
        raise ValueError(
            f"beta_exp = 2*alpha + 1 = {boundary} is the boundary case and has no pure power law"
        )
    return beta_exp - 1.0 if beta_exp < boundary else 2.0 * alpha


def benign_region_check(alpha: float, p: int, n: int) -> bool:
    """Whether (alpha, p, n) certifiably lies in the masked-helps regime.

    True when alpha > 4 and n falls strictly inside the window

        max(2a, p*a/(a-1)^2 + a^2/(a-1)^2)
          < n <
        min((p+1)(a-2)/a,
            p*(3 + 2^-a)/(4 + 2^-(a-2)),
            p*pi*(sqrt(2a/5) - 1)^(1/a)/(a sin(pi/a)) - (p+1)/(a-1)) - 1

    with a = alpha. Inside the window, dropping every coordinate with
    zeta_i^2 > 1 - Omega strictly improves on the standard target-only fit for
    any signal that has mass on a dropped coordinate. Total in (alpha, p, n);
    returns False instead of raising when the hypotheses fail.
    """
    if p < 1 or n < 1:
        return False
    if not alpha > 4.0:
        return False
    a = alpha
    lower = max(2.0 * a, p * a / (a - 1.0) ** 2 + a**2 / (a - 1.0) ** 2)
    upper = (
        min(
            (p + 1.0) * (a - 2.0) / a,
            p * (3.0 + 2.0 ** (-a)) / (4.0 + 2.0 ** (-(a - 2.0))),
            p * math.pi * (math.sqrt(2.0 * a / 5.0) - 1.0) ** (1.0 / a)
            / (a * math.sin(math.pi / a))
            - (p + 1.0) / (a - 1.0),
        )
        - 1.0
    )
    return lower < n < upper
