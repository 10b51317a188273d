"""Tests for the fixed-point solver, spectrum builders, and finite-sample bounds."""

import math

import numpy as np
import pytest

from w2s_lab import (
    HypothesisViolatedError,
    SpectralStats,
    fixed_point_residual,
    omega_asymptotic,
    omega_lower_bound,
    power_law_signal,
    power_law_spectrum,
    solve_tau,
    tau_asymptotic,
    tau_bounds_nonasymptotic,
)
from w2s_lab.spectrum import TAU_ATOL, TAU_RTOL, as_spectrum


class TestSolveTau:
    def test_two_point_spectrum_exact_root(self):
        """For eigenvalues (1, 1/4) and n=1 the root is tau = 1/2 by hand."""
        stats = solve_tau(np.array([1.0, 0.25]), 1)
        assert stats.tau == pytest.approx(0.5, abs=1e-10)
        assert stats.zeta[0] == pytest.approx(1.0 / 3.0, abs=1e-10)
        assert stats.zeta[1] == pytest.approx(2.0 / 3.0, abs=1e-10)
        assert stats.omega == pytest.approx(5.0 / 9.0, abs=1e-10)

    def test_isotropic_closed_form(self):
        # flat spectrum: tau = lam * (p - n) / n exactly
        for lam, p, n in [(1.0, 10, 4), (3.5, 50, 49), (0.2, 6, 1)]:
            stats = solve_tau(np.full(p, lam), n)
            assert stats.tau == pytest.approx(lam * (p - n) / n, rel=1e-10)
            assert stats.omega == pytest.approx(n / p, rel=1e-10)

    def test_residual_within_certified_tolerance(self):
        rng = np.random.default_rng(101)
        for _ in range(20):
            p = int(rng.integers(3, 40))
            n = int(rng.integers(1, p))
            lam = np.sort(rng.uniform(0.05, 4.0, size=p))[::-1]
            stats = solve_tau(lam, n)
            res = fixed_point_residual(lam, stats.tau, n)
            assert abs(res) <= TAU_ATOL + TAU_RTOL * n

    def test_bitwise_determinism(self):
        lam = power_law_spectrum(200, 1.7)
        a = solve_tau(lam, 60)
        b = solve_tau(lam, 60)
        assert a.tau == b.tau
        assert np.array_equal(a.zeta, b.zeta)

    def test_scale_covariance(self):
        """Scaling the spectrum by c scales tau by c and leaves zeta alone."""
        lam = power_law_spectrum(80, 2.2)
        base = solve_tau(lam, 25)
        scaled = solve_tau(4.0 * lam, 25)
        assert scaled.tau == pytest.approx(4.0 * base.tau, rel=1e-10)
        assert scaled.omega == pytest.approx(base.omega, rel=1e-10)

    def test_rejects_n_at_least_p(self):
        with pytest.raises(ValueError):
            solve_tau(np.array([1.0, 0.5]), 2)
        with pytest.raises(ValueError):
            solve_tau(np.array([1.0, 0.5]), 0)

    def test_rejects_bad_spectra(self):
        with pytest.raises(ValueError):
            solve_tau(np.array([1.0, -0.5, 0.1]), 1)
        with pytest.raises(ValueError):
            solve_tau(np.array([0.5, 1.0]), 1)  # not non-increasing


class TestSpectralStats:
    def test_shrinkage_complement(self):
        lam = power_law_spectrum(30, 1.5)
        stats = solve_tau(lam, 10)
        assert np.allclose(stats.zeta + stats.one_minus_zeta(), 1.0, atol=1e-14)
        assert stats.p == 30
        assert stats.n == 10

    def test_zeta_non_decreasing(self):
        """Smaller eigenvalues shrink harder, so zeta grows along the index."""
        stats = solve_tau(power_law_spectrum(50, 2.0), 20)
        assert np.all(np.diff(stats.zeta) >= 0.0)
        assert np.all(stats.zeta > 0.0)
        assert np.all(stats.zeta < 1.0)

    def test_is_frozen(self):
        stats = solve_tau(np.array([1.0, 0.25]), 1)
        assert isinstance(stats, SpectralStats)
        with pytest.raises(Exception):
            stats.tau = 0.0


class TestBuilders:
    def test_power_law_spectrum_values(self):
        lam = power_law_spectrum(5, 2.0)
        assert lam == pytest.approx([1.0, 0.25, 1.0 / 9.0, 0.0625, 0.04])

    def test_power_law_spectrum_rejects_small_alpha(self):
        with pytest.raises(ValueError):
            power_law_spectrum(10, 1.0)
        with pytest.raises(ValueError):
            power_law_spectrum(0, 2.0)

    def test_signal_matches_spectral_profile(self):
        """The signal is built so lambda_i * beta_i^2 = i^(-beta_exp)."""
        p, alpha, beta_exp = 40, 1.6, 2.3
        lam = power_law_spectrum(p, alpha)
        beta = power_law_signal(p, alpha, beta_exp)
        idx = np.arange(1, p + 1, dtype=np.float64)
        assert lam * beta**2 == pytest.approx(idx**-beta_exp, rel=1e-12)

    def test_as_spectrum_normalizes(self):
        lam = as_spectrum([2.0, 1.0, 0.5])
        assert lam.dtype == np.float64
        assert lam.shape == (3,)


class TestAsymptotics:
    def test_tau_asymptotic_alpha_two(self):
        # c = (pi / (alpha sin(pi/alpha)))^alpha is (pi/2)^2 at alpha = 2
        assert tau_asymptotic(2.0, 10) == pytest.approx((math.pi / 2.0) ** 2 / 100.0, rel=1e-12)

    def test_tau_asymptotic_tracks_solver(self):
        """At large p/n the solver approaches the predicted c * n^-alpha rate."""
        alpha, n = 2.0, 100
        stats = solve_tau(power_law_spectrum(100000, alpha), n)
        assert stats.tau == pytest.approx(tau_asymptotic(alpha, n), rel=10.0 / n)

    def test_omega_asymptotic(self):
        assert omega_asymptotic(2.0) == pytest.approx(0.5)
        assert omega_asymptotic(5.0) == pytest.approx(0.8)
        with pytest.raises(ValueError):
            omega_asymptotic(1.0)


class TestFiniteSampleBounds:
    def test_tau_bounds_contain_solver_root(self):
        alpha, p, n = 2.0, 1000, 100
        lower, upper = tau_bounds_nonasymptotic(alpha, p, n)
        tau = solve_tau(power_law_spectrum(p, alpha), n).tau
        assert lower <= tau <= upper
        assert lower > 0.0

    def test_tau_bounds_hypothesis_guard(self):
        # k(2) = 3.25 / 5 = 0.65, so n = 99 with p = 100 is out of range
        with pytest.raises(HypothesisViolatedError):
            tau_bounds_nonasymptotic(2.0, 100, 99)

    def test_omega_lower_bound_value(self):
        bound = omega_lower_bound(5.0, 1000, 400)
        assert bound == pytest.approx(0.79332, abs=5e-5)
        exact = solve_tau(power_law_spectrum(1000, 5.0), 400).omega
        assert bound <= exact

    def test_omega_lower_bound_window_guard(self):
        with pytest.raises(HypothesisViolatedError):
            omega_lower_bound(5.0, 1000, 100)
        with pytest.raises(HypothesisViolatedError):
            omega_lower_bound(5.0, 1000, 900)
