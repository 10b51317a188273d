"""Covariance eigenstructure and the effective-regularization fixed point.

Everything downstream (risk oracles, surrogate designers, the Monte Carlo
harness) consumes covariances through their eigenvalue sequence in the
diagonalizing basis, sorted non-increasing. Given a spectrum and a sample
count n < p, the central object is the effective regularization tau: the
unique positive root of

    sum_i lambda_i / (lambda_i + tau) = n.

The left side is continuous and strictly decreasing in tau, from p (tau -> 0)
to 0 (tau -> infinity), so for n < p the root exists and is unique. From tau
we derive the shrinkage factors zeta_i = tau/(lambda_i + tau) and the
variance-inflation statistic Omega = (1/n) * sum_i (1 - zeta_i)^2, which
together parameterize every closed-form risk in this package.

All functions here are eigenvalue-only (no p x p matrices), so p up to 1e7 is
practical for asymptotic checks. Sums over the spectrum accumulate the tail
first (smallest eigenvalues first) for reproducible floating-point results
when the tail is near the denormal range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU_RTOL = 1e-12
TAU_ATOL = 1e-12
TAU_MAX_ITER = 200

_EPS = float(np.finfo(np.float64).eps)


class NonConvergenceError(RuntimeError):
    """The fixed-point solver could not certify its bracket or tolerance."""


class HypothesisViolatedError(ValueError):
    """Inputs fall outside the hypothesis of a non-asymptotic bound."""


def as_spectrum(eigenvalues) -> np.ndarray:
    """Validate and return a spectrum as a float64 array.

    Requirements: one-dimensional, length >= 1, strictly positive entries,
    sorted non-increasing (ties allowed).
    """
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if lam.ndim != 1 or lam.size < 1:
        raise ValueError("spectrum must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(lam)) or not np.all(lam > 0.0):
        raise ValueError("spectrum entries must be finite and > 0")
    if np.any(np.diff(lam) > 0.0):
        raise ValueError("spectrum must be sorted non-increasing")
    return lam


@dataclass(frozen=True, eq=False)
class SpectralStats:
    """Fixed-point statistics (tau, zeta, Omega) of a spectrum at sample count n.

    Attributes:
        tau: effective regularization, the positive fixed-point root.
        zeta: per-coordinate shrinkage tau/(lambda_i + tau), non-decreasing.
        omega: (1/n) * sum (1 - zeta_i)^2, in (0, 1) whenever n < p.
        n: sample count the fixed point was solved at.
        eigenvalues: the spectrum the statistics belong to.
    """

    tau: float
    zeta: np.ndarray
    omega: float
    n: int
    eigenvalues: np.ndarray

    @property
    def p(self) -> int:
        return int(self.eigenvalues.size)

    def one_minus_zeta(self) -> np.ndarray:
        # computed as lambda/(lambda+tau) directly; no cancellation for tiny tail
        lam = self.eigenvalues
        return lam / (lam + self.tau)


def _tail_first_sum(values: np.ndarray) -> float:
    """Sum with the smallest-magnitude tail first (spectra are head-sorted)."""
    return float(np.sum(values[::-1]))


def fixed_point_residual(spectrum, tau: float, n: int) -> float:
    """Signed residual sum_i lambda_i/(lambda_i + tau) - n at a candidate tau."""
    lam = as_spectrum(spectrum)
    return _tail_first_sum(lam / (lam + tau)) - float(n)


def solve_tau(spectrum, n: int) -> SpectralStats:
    """Solve the effective-regularization fixed point by certified bisection.

    Args:
        spectrum: eigenvalues, non-increasing, all positive.
        n: sample count with 1 <= n < p.

    Returns:
        SpectralStats with residual |sum lambda/(lambda+tau) - n| <= atol + rtol*n.

    Raises:
        ValueError: if n >= p (no positive root exists) or n < 1.
        NonConvergenceError: if the bracket cannot be certified or the residual
            tolerance is unreachable within the iteration cap.

    The bracket [lambda_p * eps, lambda_1 * p / n] is valid because the map is
    strictly decreasing: at the left end the sum is close to p > n, at the
    right end each term is below lambda_1 / (lambda_1 * p / n) = n / p, so the
    sum is below n. Bisection is unconditionally convergent, and identical
    inputs always reproduce bit-identical tau.
    """
    lam = as_spectrum(spectrum)
    p = lam.size
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n >= p:
        raise ValueError(f"no solution: need n < p, got n={n}, p={p}")

    lam_tail_first = lam[::-1]

    def residual(tau: float) -> float:
        return float(np.sum(lam_tail_first / (lam_tail_first + tau))) - n

    lo = float(lam[-1]) * _EPS
    hi = float(lam[0]) * p / n
    f_lo = residual(lo)
    f_hi = residual(hi)
    if not (f_lo > 0.0 > f_hi):
        raise NonConvergenceError(
            f"bracket certification failed: f({lo:g})={f_lo:g}, f({hi:g})={f_hi:g}"
        )

    tol = TAU_ATOL + TAU_RTOL * n
    tau = None
    for _ in range(TAU_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # bracket exhausted at float resolution; accept mid only if within tolerance
            break
        f_mid = residual(mid)
        if abs(f_mid) <= tol:
            tau = mid
            break
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    if tau is None:
        mid = 0.5 * (lo + hi)
        if abs(residual(mid)) <= tol:
            tau = mid
        else:
            raise NonConvergenceError(
                f"residual tolerance {tol:g} unreachable within {TAU_MAX_ITER} iterations"
            )

    one_minus_zeta = lam / (lam + tau)
    zeta = tau / (lam + tau)
    omega = _tail_first_sum(one_minus_zeta**2) / n
    return SpectralStats(tau=float(tau), zeta=zeta, omega=float(omega), n=n, eigenvalues=lam)


def power_law_spectrum(p: int, alpha: float) -> np.ndarray:
    """Spectrum lambda_i = i^(-alpha) for i = 1..p.

    Requires p >= 1 and alpha > 1 (summability of the head-heavy tail).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    idx = np.arange(1, p + 1, dtype=np.float64)
    return idx ** (-alpha)


def power_law_signal(p: int, alpha: float, beta_exp: float) -> np.ndarray:
    """Signal coefficients beta_i = i^((alpha - beta_exp)/2).

    Chosen so that the per-coordinate signal energy satisfies
    lambda_i * beta_i^2 = i^(-beta_exp) when lambda_i = i^(-alpha).
    Requires alpha > 1 and beta_exp > 1.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if not beta_exp > 1.0:
        raise ValueError(f"beta_exp must be > 1, got {beta_exp}")
    idx = np.arange(1, p + 1, dtype=np.float64)
    return idx ** (0.5 * (alpha - beta_exp))


def tau_asymptotic(alpha: float, n: int) -> float:
    """Large-p approximation tau ~ c * n^(-alpha), c = (pi/(alpha*sin(pi/alpha)))^alpha."""
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    c = (math.pi / (alpha * math.sin(math.pi / alpha))) ** alpha
    return c * float(n) ** (-alpha)


def omega_asymptotic(alpha: float) -> float:
    """Large-p, large-n limit of Omega for a power-law spectrum: (alpha-1)/alpha."""
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    return (alpha - 1.0) / alpha


def _tau_hypothesis_k(alpha: float) -> float:
    return (3.0 + 2.0 ** (-alpha)) / (4.0 + 2.0 ** (-(alpha - 2.0)))


def tau_bounds_nonasymptotic(alpha: float, p: int, n: int) -> tuple[float, float]:
    """Finite-(n, p) interval certain to contain tau for a power-law spectrum.

    Valid under the hypothesis n < p*k with k = (3 + 2^-alpha)/(4 + 2^-(alpha-2)).
    The bounds on tau^-1 are c*n^alpha <= tau^-1 <= c*(n + 1 + (p+1)/(alpha-1))^alpha
    with c = (alpha*sin(pi/alpha)/pi)^alpha; the returned interval inverts them.

    Returns:
        (lower, upper) with lower <= tau <= upper.

    Raises:
        HypothesisViolatedError: when n >= p*k.
    """
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if p < 1 or n < 1:
        raise ValueError(f"p and n must be >= 1, got p={p}, n={n}")
    k = _tau_hypothesis_k(alpha)
    if n >= p * k:
        raise HypothesisViolatedError(
            f"requires n < p*k = {p * k:.4g} (k={k:.4g} at alpha={alpha}), got n={n}"
        )
    c_inv = (alpha * math.sin(math.pi / alpha) / math.pi) ** alpha
    stretched = n + 1.0 + (p + 1.0) / (alpha - 1.0)
    lower = 1.0 / (c_inv * stretched**alpha)
    upper = 1.0 / (c_inv * float(n) ** alpha)
    return lower, upper


def omega_lower_bound(alpha: float, p: int, n: int) -> float:
    """Finite-(n, p) lower bound on Omega for a power-law spectrum.

    Valid under p*k1 + alpha^2/(alpha-1)^2 < n < p*k2, where k1 = alpha/(alpha-1)^2
    and k2 is the same constant as in tau_bounds_nonasymptotic. The bound is

        (alpha-1)/alpha - (1/alpha)*((n + 1 + (p+1)/(alpha-1))/(p+1))^(2*alpha-1) - 1/n.

    Raises:
        HypothesisViolatedError: when n falls outside the window.
    """
    if not alpha > 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if p < 1 or n < 1:
        raise ValueError(f"p and n must be >= 1, got p={p}, n={n}")
    k1 = alpha / (alpha - 1.0) ** 2
    k2 = _tau_hypothesis_k(alpha)
    low_edge = p * k1 + alpha**2 / (alpha - 1.0) ** 2
    high_edge = p * k2
    if not (low_edge < n < high_edge):
        raise HypothesisViolatedError(
            f"requires {low_edge:.4g} < n < {high_edge:.4g}, got n={n}"
        )
    stretched = (n + 1.0 + (p + 1.0) / (alpha - 1.0)) / (p + 1.0)
    return (alpha - 1.0) / alpha - stretched ** (2.0 * alpha - 1.0) / alpha - 1.0 / n
