"""Tests for the closed-form risk formulas against hand values and blunt re-derivations."""

import numpy as np
import pytest

from w2s_lab import (
    ProblemInstance,
    RiskReport,
    covariance_shift_map,
    empirical_excess_risk,
    gamma_t_sq,
    monte_carlo_report,
    omniscient_risk,
    one_stage_risk,
    power_law_signal,
    power_law_spectrum,
    sample_dataset,
    solve_tau,
    to_spectral_coordinates,
    two_stage_fit,
    two_stage_risk,
)


def _reference_tau(lam, n):
    """Plain 120-step bisection, kept independent of the library solver."""
    lo, hi = 1e-13, float(lam[0]) * lam.size
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if np.sum(lam / (lam + mid)) > n:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _reference_one_stage(lam, beta_star, beta_s, n, sigma_sq):
    """Re-derive the one-stage risk with no shared code beyond numpy."""
    tau = _reference_tau(lam, n)
    shrink = lam / (lam + tau)
    zeta = 1.0 - shrink
    omega = np.sum(shrink**2) / n
    bias = np.sum(lam * (shrink * beta_s - beta_star) ** 2)
    variance = omega * (sigma_sq + np.sum(lam * zeta**2 * beta_s**2)) / (1.0 - omega)
    return bias, variance


class TestOneStage:
    def test_hand_worked_two_point_instance(self):
        """Eigenvalues (1, 1/4), n=1, noiseless self-labeled fit at beta = (1, 1)."""
        lam = np.array([1.0, 0.25])
        ones = np.ones(2)
        report = one_stage_risk(lam, ones, ones, 1, 0.0)
        assert report.bias == pytest.approx(2.0 / 9.0, abs=1e-10)
        assert report.variance == pytest.approx(5.0 / 18.0, abs=1e-10)
        assert report.total == pytest.approx(0.5, abs=1e-10)

    def test_matches_reference_derivation(self):
        rng = np.random.default_rng(300)
        for _ in range(15):
            p = int(rng.integers(5, 60))
            n = int(rng.integers(1, p))
            lam = np.sort(rng.uniform(0.02, 3.0, size=p))[::-1]
            beta_star = rng.normal(size=p)
            beta_s = rng.normal(size=p)
            sigma_sq = float(rng.uniform(0.0, 1.5))
            report = one_stage_risk(lam, beta_star, beta_s, n, sigma_sq)
            bias, variance = _reference_one_stage(lam, beta_star, beta_s, n, sigma_sq)
            assert report.bias == pytest.approx(bias, rel=1e-10, abs=1e-12)
            assert report.variance == pytest.approx(variance, rel=1e-10, abs=1e-12)

    def test_total_is_exact_sum(self):
        lam = power_law_spectrum(30, 1.8)
        beta = power_law_signal(30, 1.8, 2.4)
        report = one_stage_risk(lam, beta, 0.5 * beta, 9, 0.3)
        assert report.total == report.bias + report.variance
        assert report.variance >= 0.0

    def test_monotone_in_noise(self):
        lam = power_law_spectrum(25, 2.0)
        beta = np.ones(25)
        totals = [one_stage_risk(lam, beta, beta, 8, s).total for s in (0.0, 0.1, 0.4, 1.0)]
        assert totals == sorted(totals)
        assert totals[0] < totals[-1]

    def test_precomputed_stats_reused_bitwise(self):
        lam = power_law_spectrum(40, 1.5)
        beta = power_law_signal(40, 1.5, 2.0)
        stats = solve_tau(lam, 12)
        with_stats = one_stage_risk(lam, beta, beta, 12, 0.2, stats=stats)
        without = one_stage_risk(lam, beta, beta, 12, 0.2)
        assert with_stats.total == without.total

    def test_mismatched_stats_rejected(self):
        lam = power_law_spectrum(20, 2.0)
        wrong = solve_tau(lam, 5)
        with pytest.raises(ValueError):
            one_stage_risk(lam, np.ones(20), np.ones(20), 6, 0.1, stats=wrong)

    def test_shape_and_noise_validation(self):
        lam = power_law_spectrum(6, 2.0)
        with pytest.raises(ValueError):
            one_stage_risk(lam, np.ones(5), np.ones(6), 2, 0.1)
        with pytest.raises(ValueError):
            one_stage_risk(lam, np.ones(6), np.ones(6), 2, -0.1)


class TestOmniscient:
    def test_equals_self_labeled_one_stage(self):
        lam = power_law_spectrum(35, 1.7)
        beta = power_law_signal(35, 1.7, 1.9)
        a = omniscient_risk(lam, beta, 0.25, 11)
        b = one_stage_risk(lam, beta, beta, 11, 0.25)
        assert a.bias == b.bias
        assert a.variance == b.variance

    def test_isotropic_pure_noise_oracle(self):
        """Flat spectrum, zero signal, unit noise, n = p/2: risk is exactly 1."""
        report = omniscient_risk(np.ones(2), np.zeros(2), 1.0, 1)
        assert report.bias == pytest.approx(0.0, abs=1e-12)
        assert report.total == pytest.approx(1.0, abs=1e-10)


class TestGamma:
    def test_hand_value(self):
        stats = solve_tau(np.array([1.0, 0.25]), 1)
        assert gamma_t_sq(stats, np.ones(2), 0.0) == pytest.approx(1.0, abs=1e-9)

    def test_affine_in_noise(self):
        """gamma^2 grows by kappa * sigma_sq / (1 - omega) per unit of noise."""
        lam = power_law_spectrum(30, 2.2)
        stats = solve_tau(lam, 10)
        beta = power_law_signal(30, 2.2, 1.5)
        base = gamma_t_sq(stats, beta, 0.0)
        bumped = gamma_t_sq(stats, beta, 0.7)
        kappa = 30 / 10
        assert bumped - base == pytest.approx(kappa * 0.7 / (1.0 - stats.omega), rel=1e-10)


class TestTwoStage:
    def _instance(self, **overrides):
        p = 40
        kwargs = dict(
            spectrum_t=power_law_spectrum(p, 2.0),
            spectrum_s=power_law_spectrum(p, 1.5),
            beta_star=power_law_signal(p, 2.0, 1.8),
            sigma_t_sq=0.05,
            sigma_s_sq=0.1,
            n=12,
            m=16,
        )
        kwargs.update(overrides)
        return ProblemInstance(**kwargs)

    def test_zero_signal_zero_noise_is_exactly_zero(self):
        inst = self._instance(beta_star=np.zeros(40), sigma_t_sq=0.0, sigma_s_sq=0.0)
        report = two_stage_risk(inst)
        assert report.bias == 0.0
        assert report.variance == 0.0
        assert report.total == 0.0

    def test_total_is_exact_sum_and_nonnegative(self):
        report = two_stage_risk(self._instance())
        assert report.total == report.bias + report.variance
        assert report.bias >= 0.0
        assert report.variance >= 0.0

    def test_monotone_in_stage_two_noise(self):
        totals = [
            two_stage_risk(self._instance(sigma_t_sq=s)).total for s in (0.0, 0.2, 0.8)
        ]
        assert totals == sorted(totals)

    def test_simulation_agreement_desk_scale(self):
        """400 paired-pipeline trials land within 4 SE of the formula."""
        inst = self._instance()
        theory = two_stage_risk(inst).total
        risks = np.empty(400)
        for t in range(400):
            _, beta_s2t = two_stage_fit(inst, 9090, trial=t)
            risks[t] = empirical_excess_risk(beta_s2t, inst.beta_star, inst.spectrum_t)
        se = risks.std(ddof=1) / np.sqrt(risks.size)
        assert abs(risks.mean() - theory) <= 4.0 * se
        assert risks.mean() == pytest.approx(theory, rel=0.2)

    def test_rejects_saturated_sample_counts(self):
        with pytest.raises(ValueError):
            two_stage_risk(self._instance(n=40))
        with pytest.raises(ValueError):
            two_stage_risk(self._instance(m=41))


class TestCovarianceShiftMap:
    def test_identity_when_spectra_match(self):
        lam = power_law_spectrum(10, 2.0)
        beta = power_law_signal(10, 2.0, 1.5)
        assert covariance_shift_map(beta, lam, lam) == pytest.approx(beta, rel=1e-14)

    def test_four_to_one_ratio_doubles(self):
        lam_t = power_law_spectrum(6, 1.5)
        beta = np.ones(6)
        mapped = covariance_shift_map(beta, 4.0 * lam_t, lam_t)
        assert mapped == pytest.approx(2.0 * np.ones(6), rel=1e-14)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            covariance_shift_map(np.ones(4), power_law_spectrum(4, 2.0), power_law_spectrum(5, 2.0))

    def test_transport_identity_on_shared_draw(self):
        """Column-rescaled source data is target data labeled by the mapped vector.

        With one shared seed the two datasets come from the same gaussian table,
        so the identity can be checked directly rather than in distribution.
        """
        p, n = 15, 8
        lam_s = power_law_spectrum(p, 1.4)
        lam_t = power_law_spectrum(p, 2.6)
        beta_star = power_law_signal(p, 2.6, 1.7)
        mapped = covariance_shift_map(beta_star, lam_s, lam_t)
        ds_source = sample_dataset(lam_s, beta_star, 0.0, n, 606)
        ds_target = sample_dataset(lam_t, mapped, 0.0, n, 606)
        transported = ds_source.design * np.sqrt(lam_t / lam_s)[None, :]
        assert transported == pytest.approx(ds_target.design, rel=1e-12, abs=1e-12)
        assert ds_source.labels == pytest.approx(ds_target.labels, rel=1e-12, abs=1e-12)


class TestSpectralCoordinates:
    def test_recovers_diagonal_instance(self):
        lam = power_law_spectrum(12, 1.9)
        beta = power_law_signal(12, 1.9, 2.1)
        spectrum, beta_bar = to_spectral_coordinates(np.diag(lam), beta)
        assert spectrum == pytest.approx(lam, rel=1e-12)
        assert np.abs(beta_bar) == pytest.approx(np.abs(beta), rel=1e-9)

    def test_risk_invariant_under_rotation(self):
        """A dense covariance and its spectral pair give the same self-labeled risk."""
        rng = np.random.default_rng(17)
        p, n = 14, 5
        lam = np.sort(rng.uniform(0.1, 3.0, size=p))[::-1]
        beta = rng.normal(size=p)
        basis, _ = np.linalg.qr(rng.normal(size=(p, p)))
        cov = basis @ np.diag(lam) @ basis.T
        spectrum, beta_bar = to_spectral_coordinates(cov, basis @ beta)
        direct = one_stage_risk(lam, beta, beta, n, 0.3)
        rotated = one_stage_risk(spectrum, beta_bar, beta_bar, n, 0.3)
        assert rotated.total == pytest.approx(direct.total, rel=1e-8)

    def test_rejects_asymmetric_and_indefinite(self):
        with pytest.raises(ValueError):
            to_spectral_coordinates(np.array([[1.0, 0.5], [0.0, 1.0]]), np.ones(2))
        with pytest.raises(ValueError):
            to_spectral_coordinates(np.diag([1.0, -0.5]), np.ones(2))
        with pytest.raises(ValueError):
            to_spectral_coordinates(np.eye(3), np.ones(2))


class TestMonteCarloReport:
    def test_decomposition_is_exact(self):
        rng = np.random.default_rng(23)
        lam = power_law_spectrum(10, 2.0)
        beta_star = power_law_signal(10, 2.0, 1.5)
        fitted = beta_star[None, :] + rng.normal(size=(50, 10))
        report = monte_carlo_report(lam, beta_star, fitted)
        assert report.source == "monte-carlo"
        assert report.trials == 50
        assert report.total == report.bias + report.variance
        assert report.se is not None and report.se > 0.0

    def test_single_trial_has_no_standard_error(self):
        lam = power_law_spectrum(5, 2.0)
        report = monte_carlo_report(lam, np.ones(5), np.ones((1, 5)))
        assert report.trials == 1
        assert report.se is None

    def test_tracks_closed_form(self):
        lam = power_law_spectrum(30, 2.0)
        beta = power_law_signal(30, 2.0, 1.6)
        theory = one_stage_risk(lam, beta, beta, 10, 0.1)
        fitted = np.empty((300, 30))
        for t in range(300):
            ds = sample_dataset(lam, beta, 0.1, 10, 5000 + t)
            fitted[t] = np.linalg.lstsq(ds.design, ds.labels, rcond=None)[0]
        report = monte_carlo_report(lam, beta, fitted)
        assert abs(report.total - theory.total) <= 4.0 * report.se
        assert report.bias == pytest.approx(theory.bias, rel=0.25, abs=0.05)

    def test_rejects_flat_input(self):
        with pytest.raises(ValueError):
            monte_carlo_report(power_law_spectrum(5, 2.0), np.ones(5), np.ones(5))


class TestRiskReport:
    def test_theory_defaults(self):
        report = RiskReport(bias=0.1, variance=0.2, total=0.3)
        assert report.source == "theory"
        assert report.trials is None
        assert report.se is None
