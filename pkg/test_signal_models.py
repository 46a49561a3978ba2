"""
test_signal_models.py — Unit tests for the belief models (signal_models.py)

Tests cover:
  - closed-form and tabulated partial moments
  - cdf_at_belief / truncated_mean under a re-based belief
  - mirror relabelling and its involution
  - discrete tables: validation, atom shares at the marginal signal
  - precision families: rotation around the prior, the rho-derivative of eta
  - models rebuilt from a target nondisclosure curve

Run with:  pytest test_signal_models.py -v
"""

import numpy as np
import pytest

import signal_models
from conftest import STEEP_FIXED_POINT, steep_psi
from belief_core import eta, eta_fixed_point
from errors import (
    ConfigError,
    ConvergenceError,
    DegenerateCurveError,
    DomainError,
    EmptyEventError,
    InvalidCurveError,
)
from signal_models import (
    CURVE_TOL,
    ContinuousSignalModel,
    DiscreteSignalModel,
    beta_precision_family,
    beta_precision_model,
    cdf_at_belief,
    four_signal_model,
    mirror,
    model_from_curve_samples,
    model_from_target_curve,
    normal_precision_model,
    precision_eta_derivative,
    precision_eta_derivative_quadrature,
    truncated_mean,
)


# ── Helpers ────────────────────────────────────────────────────────────────

def three_point_table(middle=0.5):
    """Signals (0, middle, 1); only middle = 0.5 is consistent at prior 1/2."""
    return DiscreteSignalModel(0.5, [0.0, middle, 1.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5])


# ── Continuous models ──────────────────────────────────────────────────────

class TestContinuousModels:

    def test_uniform_moments_closed_form(self, uniform):
        m = uniform.lower_moments(1.0)
        assert m == pytest.approx([1.0, 0.5, 1.0 / 3.0], abs=1e-14)
        assert uniform.lower_moments(0.4) == pytest.approx([0.4, 0.08, 0.064 / 3.0], abs=1e-14)

    def test_lower_moments_vectorized(self, uniform):
        m = uniform.lower_moments(np.array([0.1, 0.2, 0.3]))
        assert m.shape == (3, 3)

    def test_beta_with_unit_precision_is_uniform(self):
        model = beta_precision_model(1.0)
        assert model.lower_moments(0.4) == pytest.approx([0.4, 0.08, 0.064 / 3.0], abs=1e-12)

    def test_tabulated_moments_match_closed_form(self, uniform):
        tabulated = ContinuousSignalModel(0.5, lambda s: np.ones_like(s), name="flat")
        grid = np.linspace(0.0, 1.0, 17)
        assert np.allclose(tabulated.lower_moments(grid), uniform.lower_moments(grid), atol=1e-10)

    def test_unnormalized_density_is_scaled(self):
        doubled = ContinuousSignalModel(0.5, lambda s: 2.0 * np.ones_like(s), name="doubled")
        assert doubled.lower_moments(1.0)[0] == pytest.approx(1.0, abs=1e-10)

    def test_rejects_prior_inconsistent_with_density(self):
        with pytest.raises(ConfigError, match="martingale"):
            ContinuousSignalModel(0.3, lambda s: np.ones_like(s), name="bad")

    def test_rejects_bad_support(self):
        with pytest.raises(ConfigError):
            ContinuousSignalModel(0.5, lambda s: np.ones_like(s), 0.6, 0.4)

    def test_normal_model_is_martingale_consistent(self):
        model = normal_precision_model(2.0)
        assert model.lower_moments(1.0)[1] == pytest.approx(0.5, abs=1e-8)

    def test_conditional_lower(self, uniform):
        q0, q1 = uniform.conditional_lower(0.5)
        assert float(q1) == pytest.approx(0.25, abs=1e-14)
        assert float(q0) == pytest.approx(0.75, abs=1e-14)

    def test_belief_outside_support_raises(self, uniform):
        with pytest.raises(DomainError):
            eta(uniform, 1.5, 0.8)

    def test_sampler_reproduces_conditional_mean(self, uniform):
        rng = np.random.default_rng(7)
        signals = uniform.sample_signals(rng, np.ones(200_000, dtype=int))
        # E[s | omega = 1] = E[s^2] / prior
        assert signals.mean() == pytest.approx(2.0 / 3.0, abs=3e-3)


# ── cdf_at_belief / truncated_mean ─────────────────────────────────────────

class TestRebasedLaws:

    def test_cdf_at_prior_is_belief_cdf(self, uniform):
        assert cdf_at_belief(uniform, 0.5, 0.3) == pytest.approx(0.3, abs=1e-14)

    def test_cdf_at_certain_state(self, uniform):
        # F_1(s) = s^2 for the uniform model
        assert cdf_at_belief(uniform, 1.0, 0.5) == pytest.approx(0.25, abs=1e-14)

    def test_truncated_mean_below(self, uniform):
        assert truncated_mean(uniform, 0.5, 0.5, "below") == pytest.approx(0.25, abs=1e-14)

    def test_truncated_mean_above(self, uniform):
        assert truncated_mean(uniform, 0.5, 0.5, "above") == pytest.approx(0.75, abs=1e-14)

    def test_empty_event_raises(self, uniform):
        with pytest.raises(EmptyEventError):
            truncated_mean(uniform, 0.5, 0.0, "below")

    def test_unknown_side_raises(self, uniform):
        with pytest.raises(DomainError):
            truncated_mean(uniform, 0.5, 0.5, "sideways")

    def test_belief_must_be_probability(self, uniform):
        with pytest.raises(DomainError):
            cdf_at_belief(uniform, 1.2, 0.5)


# ── Mirror ─────────────────────────────────────────────────────────────────

class TestMirror:

    def test_mirror_is_involution(self, uniform, four_signal):
        assert mirror(mirror(uniform)) is uniform
        assert mirror(mirror(four_signal)) is four_signal

    def test_mirror_flips_prior_and_moments(self, beta_model):
        twin = mirror(beta_model)
        assert twin.prior == pytest.approx(1.0 - beta_model.prior)
        # F'(s) = 1 - F(1 - s) for a continuous law
        for s in (0.2, 0.45, 0.8):
            assert twin.lower_moments(s)[0] == pytest.approx(1.0 - beta_model.lower_moments(1.0 - s)[0], abs=1e-12)

    def test_discrete_mirror_table(self, four_signal):
        twin = mirror(four_signal)
        assert np.allclose(twin.values, [0.0, 0.3, 0.7, 1.0])
        assert np.allclose(twin.prob_given_0, four_signal.prob_given_1[::-1])


# ── Discrete models ────────────────────────────────────────────────────────

class TestDiscreteModels:

    def test_four_signal_table(self, four_signal):
        assert np.allclose(four_signal.values, [0.0, 0.3, 0.7, 1.0])
        assert np.allclose(four_signal.mass, [0.15, 0.35, 0.35, 0.15])

    def test_atom_share_at_marginal_signal(self, four_signal):
        disclosed = four_signal.lower_moments(0.7, weight=1.0)
        withheld = four_signal.lower_moments(0.7, weight=0.0)
        assert disclosed[0] == pytest.approx(0.5)
        assert withheld[0] == pytest.approx(0.85)
        half = four_signal.lower_moments(0.7, weight=0.5)
        assert half[0] == pytest.approx(0.675)

    def test_nondisclosure_likelihoods(self, four_signal):
        q0, q1 = four_signal.conditional_lower(0.7, 1.0)
        assert 0.2 + 0.8 * float(q1) == pytest.approx(0.368, abs=1e-12)
        assert 0.2 + 0.8 * float(q0) == pytest.approx(0.832, abs=1e-12)

    def test_consistent_table_accepted(self):
        model = three_point_table()
        assert model.support_lo == 0.0 and model.support_hi == 1.0

    def test_inconsistent_signal_value_rejected(self):
        with pytest.raises(ConfigError, match="inconsistent"):
            three_point_table(0.4)

    def test_columns_must_sum_to_one(self):
        with pytest.raises(ConfigError, match="sums to"):
            DiscreteSignalModel(0.5, [0.0, 0.5, 1.0], [0.4, 0.4, 0.0], [0.0, 0.4, 0.6])

    def test_values_must_increase(self):
        with pytest.raises(ConfigError, match="increasing"):
            DiscreteSignalModel(0.5, [0.5, 0.0, 1.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5])

    def test_four_signal_needs_informative_gamma(self):
        with pytest.raises(ConfigError):
            four_signal_model(0.5, 0.7)
        with pytest.raises(ConfigError):
            four_signal_model(0.4, 0.7)


# ── Precision families ─────────────────────────────────────────────────────

class TestPrecisionFamilies:

    def test_beta_family_rotates_around_prior(self):
        family = beta_precision_family()
        assert family.rotation_holds(0.5, 1.0)
        assert family.rotation_holds(1.0, 2.0)

    def test_nonpositive_precision_rejected(self):
        with pytest.raises(DomainError):
            beta_precision_model(0.0)

    def test_eta_derivative_forms_agree(self):
        family = beta_precision_family()
        direct = precision_eta_derivative(family, 0.3, 0.8, 0.5)
        quadrature = precision_eta_derivative_quadrature(family, 0.3, 0.8, 0.5)
        assert np.isfinite(direct)
        assert direct == pytest.approx(quadrature, rel=1e-3, abs=1e-6)

    def test_eta_derivative_vanishes_at_support_ends(self):
        family = beta_precision_family()
        assert precision_eta_derivative(family, 0.0, 0.8, 0.5) == 0.0
        assert precision_eta_derivative(family, 1.0, 0.8, 0.5) == 0.0

    def test_sign_disagreement_raises(self, monkeypatch):
        family = beta_precision_family()
        quadrature = precision_eta_derivative_quadrature(family, 0.3, 0.8, 0.5)
        assert abs(quadrature) > 1e-6
        monkeypatch.setattr(signal_models, "precision_eta_derivative_quadrature", lambda *args: -quadrature)
        with pytest.raises(ConvergenceError, match="sign mismatch"):
            precision_eta_derivative(family, 0.3, 0.8, 0.5)

    @pytest.mark.slow
    def test_precision_lowers_eta_below_fixed_point(self):
        family = beta_precision_family()
        rng = np.random.default_rng(20240917)
        for _ in range(50):
            rho = float(rng.uniform(0.5, 3.0))
            p = float(rng.uniform(0.4, 0.95))
            fixed = eta_fixed_point(family.model(rho), p)
            s_hat = float(rng.uniform(0.1, 0.95)) * fixed
            direct = precision_eta_derivative(family, s_hat, p, rho)
            quadrature = precision_eta_derivative_quadrature(family, s_hat, p, rho)
            assert direct < 0.0, f"d eta / d rho = {direct:.3e} at rho={rho:.3f}, p={p:.3f}, s_hat={s_hat:.4f}"
            assert np.sign(quadrature) == -1.0


# ── Target nondisclosure curves ────────────────────────────────────────────

class TestTargetCurves:

    def test_steep_curve_is_reproduced(self, steep_curve):
        prior, p, model = steep_curve
        assert prior == pytest.approx(0.5)
        assert 0.0 < p < 1.0
        for s in (0.1, 0.25, 0.5, 0.65, 0.9):
            assert float(eta(model, s, p)) == pytest.approx(float(steep_psi(s)), abs=5e-4), \
                f"eta should follow the target curve at s = {s}"

    def test_curve_fixed_point_is_eta_fixed_point(self, steep_curve):
        _, p, model = steep_curve
        assert float(eta(model, STEEP_FIXED_POINT, p)) == pytest.approx(STEEP_FIXED_POINT, abs=1e-4)

    def test_curve_model_mass_and_mean(self, steep_curve):
        prior, _, model = steep_curve
        mass, mean, _ = model.lower_moments(model.support_hi)
        assert model.tolerance == CURVE_TOL
        assert mass == pytest.approx(1.0, abs=1e-10)
        assert abs(mean - prior) <= CURVE_TOL

    def test_constant_curve_is_degenerate(self):
        with pytest.raises(DegenerateCurveError):
            model_from_target_curve(lambda s: 0.5 + 0.0 * np.asarray(s), lambda s: 0.0 * np.asarray(s))

    def test_oscillating_curve_is_invalid(self):
        psi = lambda s: 0.5 + 0.1 * np.sin(2.0 * np.pi * np.asarray(s))  # noqa: E731
        psi_prime = lambda s: 0.2 * np.pi * np.cos(2.0 * np.pi * np.asarray(s))  # noqa: E731
        with pytest.raises(InvalidCurveError):
            model_from_target_curve(psi, psi_prime)

    def test_curve_ends_must_match(self):
        with pytest.raises(InvalidCurveError):
            model_from_target_curve(lambda s: 0.5 - 0.2 * np.asarray(s), lambda s: -0.2 + 0.0 * np.asarray(s))

    def test_too_few_samples(self):
        with pytest.raises(ConfigError):
            model_from_curve_samples([0.0, 0.5, 1.0], [0.5, 0.4, 0.5])

    def test_samples_must_increase(self):
        with pytest.raises(ConfigError):
            model_from_curve_samples([0.0, 0.5, 0.4, 1.0], [0.5, 0.4, 0.4, 0.5])
