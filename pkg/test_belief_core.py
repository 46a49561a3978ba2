"""
test_belief_core.py — Unit tests for the shared Bayesian machinery (belief_core.py)

Tests cover:
  - bayes_update / combine_beliefs / transform_posterior
  - nondisclosure beliefs for upward and downward senders, and their fixed point
  - message laws of one sender seen from a vantage belief
  - the concealment payoff U: both evaluation forms, the c = 0 identity,
    the bracket between eta and s_i, and how U moves with the other
    sender's informedness and threshold over seeded draws
  - joint message laws of many senders and their likelihood-ratio binning
  - sender and profile validation

Run with:  pytest test_belief_core.py -v
"""

import numpy as np
import pytest

import belief_core
from conftest import UNIFORM_FIXED_POINT
from belief_core import (
    COLUMN_CAP,
    FORM_AGREEMENT_TOL,
    SenderSpec,
    ThresholdProfile,
    bayes_update,
    check_prior,
    combine_beliefs,
    compress_likelihoods,
    concealment_payoff_curve,
    concealment_payoff_forms,
    concealment_payoff_many,
    concealment_payoff_U,
    disclosure_probability,
    eta,
    eta_downward,
    eta_fixed_point,
    expected_posterior_after_disclosure,
    frame_model,
    joint_message_columns,
    message_branch,
    message_distribution,
    nondisclosure_belief,
    to_frame,
    transform_posterior,
)
from errors import ConfigError, ConvergenceError, DomainError, UndefinedTransformError
from signal_models import beta_precision_model


UP_08 = SenderSpec(0.8, "up")
UP_06 = SenderSpec(0.6, "up")
DOWN_08 = SenderSpec(0.8, "down")


# ── Elementary updates ─────────────────────────────────────────────────────

class TestElementaryUpdates:

    def test_bayes_update(self):
        assert float(bayes_update(0.5, 0.2, 0.8)) == pytest.approx(0.8)

    def test_zero_probability_event_keeps_belief(self):
        assert float(bayes_update(0.3, 0.0, 0.0)) == pytest.approx(0.3)

    def test_certain_state_is_absorbing(self):
        assert float(bayes_update(1.0, 0.7, 0.1)) == 1.0
        assert float(bayes_update(0.0, 0.7, 0.1)) == 0.0

    def test_combine_beliefs(self):
        assert float(combine_beliefs(0.7, 0.7, 0.5)) == pytest.approx(0.49 / 0.58)

    def test_combine_with_uninformative_belief(self):
        assert float(combine_beliefs(0.3, 0.5, 0.5)) == pytest.approx(0.3)

    def test_transform_identity(self):
        for beta in (0.0, 0.2, 0.6, 1.0):
            assert transform_posterior(beta, 0.4, 0.4) == pytest.approx(beta)

    def test_transform_moves_to_dm_interim(self):
        # beta equal to i's interim belief maps to the DM's interim belief
        assert transform_posterior(0.5, 0.25, 0.5) == pytest.approx(0.25)

    def test_transform_is_monotone(self):
        betas = np.linspace(0.0, 1.0, 11)
        out = transform_posterior(betas, 0.3, 0.6)
        assert np.all(np.diff(out) > 0.0)

    def test_transform_undefined_for_certain_sender(self):
        with pytest.raises(UndefinedTransformError):
            transform_posterior(0.4, 0.5, 1.0)
        with pytest.raises(UndefinedTransformError):
            transform_posterior(0.4, 0.5, 0.0)

    def test_transform_domain(self):
        with pytest.raises(DomainError):
            transform_posterior(0.4, 0.0, 0.5)
        with pytest.raises(DomainError):
            transform_posterior(1.4, 0.5, 0.5)


# ── Nondisclosure belief ───────────────────────────────────────────────────

class TestNondisclosureBelief:

    def test_eta_four_signal(self, four_signal):
        assert eta(four_signal, 0.7, 0.8) == pytest.approx(0.368 / 1.2, abs=1e-12)

    def test_eta_at_support_ends_is_prior(self, uniform, beta_model):
        for model in (uniform, beta_model):
            assert eta(model, model.support_lo, 0.8) == pytest.approx(model.prior, abs=1e-12)
            assert eta(model, model.support_hi, 0.8) == pytest.approx(model.prior, abs=1e-12)

    def test_eta_is_vectorized(self, uniform):
        out = eta(uniform, np.array([0.1, 0.5, 0.9]), 0.8)
        assert out.shape == (3,)

    def test_uniform_fixed_point(self, uniform):
        assert eta_fixed_point(uniform, 0.8) == pytest.approx(UNIFORM_FIXED_POINT, abs=1e-10)

    def test_eta_crosses_diagonal_once(self, uniform):
        grid = np.linspace(0.01, 0.99, 99)
        gap = eta(uniform, grid, 0.8) - grid
        assert np.all(gap[grid < UNIFORM_FIXED_POINT - 1e-3] > 0.0)
        assert np.all(gap[grid > UNIFORM_FIXED_POINT + 1e-3] < 0.0)

    def test_eta_falls_in_p(self, uniform):
        assert eta(uniform, 0.4, 0.9) < eta(uniform, 0.4, 0.5)

    def test_downward_mirror_symmetry(self, uniform):
        # the uniform model is its own mirror
        assert eta_downward(uniform, 1.0 - 0.3, 0.8) == pytest.approx(1.0 - eta(uniform, 0.3, 0.8), abs=1e-12)

    def test_nondisclosure_belief_dispatch(self, uniform):
        assert nondisclosure_belief(uniform, UP_08, 0.4) == pytest.approx(eta(uniform, 0.4, 0.8))
        assert nondisclosure_belief(uniform, DOWN_08, 0.6) == pytest.approx(eta_downward(uniform, 0.6, 0.8))

    def test_interim_prior_shifts_belief(self, uniform):
        assert eta(uniform, 0.4, 0.8, interim_prior=0.7) > eta(uniform, 0.4, 0.8)

    def test_frames(self, uniform):
        assert frame_model(uniform, UP_08) is uniform
        assert frame_model(uniform, DOWN_08) is uniform.mirror()
        assert to_frame(DOWN_08, to_frame(DOWN_08, 0.3)) == pytest.approx(0.3)


# ── Message laws ───────────────────────────────────────────────────────────

class TestMessageLaws:

    def test_disclosure_probability(self, uniform):
        # p * Pr[s > 1/2]
        assert disclosure_probability(uniform, UP_08, 0.5) == pytest.approx(0.4, abs=1e-12)

    def test_message_distribution_sums_to_one(self, uniform, four_signal):
        for model in (uniform, four_signal):
            dist = message_distribution(model, UP_06, 0.3, vantage=0.35)
            assert dist.nondisclosure_mass + dist.disclosure_mass == pytest.approx(1.0, abs=1e-12)

    def test_downward_branch_discloses_low_signals(self, uniform):
        branch = message_branch(uniform, DOWN_08, 0.6)
        assert branch.values.max() <= 0.6 + 1e-12

    def test_vantage_must_be_probability(self, uniform):
        with pytest.raises(DomainError):
            message_distribution(uniform, UP_06, 0.3, vantage=1.5)


# ── Concealment payoff ─────────────────────────────────────────────────────

class TestConcealmentPayoff:

    def test_forms_agree(self, uniform, four_signal):
        for model in (uniform, four_signal):
            direct, via_t = concealment_payoff_forms(model, 0.7 if model.is_discrete else 0.4,
                                                     0.7 if model.is_discrete else 0.4, UP_08, 0.3, UP_06)
            assert abs(direct - via_t) <= FORM_AGREEMENT_TOL

    def test_forms_agree_for_downward_sender(self, beta_model):
        direct, via_t = concealment_payoff_forms(beta_model, 0.6, 0.6, DOWN_08, 0.4, UP_06)
        assert abs(direct - via_t) <= FORM_AGREEMENT_TOL

    def test_threshold_type_at_fixed_point_earns_its_belief(self, uniform):
        # eta(s0) = s0 puts DM and sender on the same interim belief
        u = concealment_payoff_U(uniform, UNIFORM_FIXED_POINT, UNIFORM_FIXED_POINT, UP_08, 0.5, UP_06)
        assert u == pytest.approx(UNIFORM_FIXED_POINT, abs=1e-9)

    def test_payoff_between_eta_and_signal(self, uniform):
        u = concealment_payoff_U(uniform, 0.5, 0.5, UP_08, 0.5, UP_06)
        eta_half = eta(uniform, 0.5, 0.8)
        assert eta_half == pytest.approx(1.0 / 3.0)
        assert eta_half < u < 0.5

    def test_silent_other_sender_gives_eta(self, uniform):
        # j never discloses, so only i's silence is informative
        u = concealment_payoff_U(uniform, 0.5, 0.5, UP_08, 1.0, UP_06)
        assert u == pytest.approx(eta(uniform, 0.5, 0.8), abs=1e-9)

    def test_disclosure_is_a_martingale(self, uniform):
        assert expected_posterior_after_disclosure(uniform, 0.6, UP_06, 0.4) == pytest.approx(0.6, abs=1e-10)

    def test_form_disagreement_raises(self, uniform, monkeypatch):
        monkeypatch.setattr(belief_core, "concealment_payoff_forms", lambda *args, **kwargs: (0.40, 0.41))
        with pytest.raises(ConvergenceError, match="forms disagree"):
            concealment_payoff_U(uniform, 0.5, 0.5, UP_08, 0.5, UP_06)

    def test_certain_type_uses_direct_form(self, four_signal):
        # T is undefined at s_i = 1, so only the direct form carries U there
        args = (four_signal, 1.0, 1.0, UP_08, 0.3, DOWN_08)
        direct, via_t = concealment_payoff_forms(*args, weight_i=0.0)
        assert via_t == pytest.approx(1.0)
        assert direct < 0.99
        assert concealment_payoff_U(*args, weight_i=0.0) == direct

    def test_prior_must_match_model(self, uniform):
        with pytest.raises(DomainError):
            check_prior(uniform, 0.4)
        with pytest.raises(DomainError):
            concealment_payoff_U(uniform, 0.5, 0.5, UP_08, 0.5, UP_06, prior=0.3)


class TestPayoffBounds:
    """U of a threshold type against another sender's evidence, over seeded random draws."""

    QUAD_TOL = 1e-8

    @staticmethod
    def draws(models, seed, count):
        rng = np.random.default_rng(seed)
        for _ in range(count):
            model = models[int(rng.integers(len(models)))]
            i = SenderSpec(rng.uniform(0.3, 0.95), ("up", "down")[int(rng.integers(2))])
            j = SenderSpec(rng.uniform(0.2, 0.8), ("up", "down")[int(rng.integers(2))])
            yield model, i, j, rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng

    def gap(self, model, x, i, s_hat_j, j):
        return abs(concealment_payoff_U(model, x, x, i, s_hat_j, j) - x)

    def test_payoff_strictly_between_eta_and_signal(self, uniform, beta_model):
        checked = 0
        for model, i, j, x, s_hat_j, _ in self.draws((uniform, beta_model, beta_precision_model(2.0)), 17, 200):
            silent = float(nondisclosure_belief(model, i, x))
            if abs(silent - x) < 0.02:
                continue
            u = concealment_payoff_U(model, x, x, i, s_hat_j, j)
            lo, hi = sorted((silent, x))
            assert lo < u < hi, (model.name, i, j, x, s_hat_j, silent, u)
            checked += 1
        assert checked >= 100

    def test_more_informed_other_sender_pulls_payoff_to_signal(self, uniform, beta_model):
        for model, i, j, x, s_hat_j, rng in self.draws((uniform, beta_model), 19, 200):
            better = SenderSpec(rng.uniform(j.p, 0.95), j.bias)
            case = (model.name, i, j, better.p, x, s_hat_j)
            assert self.gap(model, x, i, s_hat_j, better) <= self.gap(model, x, i, s_hat_j, j) + self.QUAD_TOL, case

    def test_garbled_other_sender_leaves_payoff_further_from_signal(self, uniform, beta_model):
        for model, i, j, x, s_hat_j, rng in self.draws((uniform, beta_model), 23, 200):
            other = rng.uniform(0.1, 0.9)
            # an upward sender discloses less at a higher threshold, a downward one at a lower
            lower, higher = sorted((s_hat_j, other))
            quiet, loud = (higher, lower) if j.is_up else (lower, higher)
            case = (model.name, i, j, x, quiet, loud)
            assert self.gap(model, x, i, quiet, j) >= self.gap(model, x, i, loud, j) - self.QUAD_TOL, case


# ── Many senders ───────────────────────────────────────────────────────────

class TestJointMessages:

    def small_branches(self, model, count):
        senders = [SenderSpec(0.6, "up"), SenderSpec(0.7, "down"), SenderSpec(0.5, "up"), SenderSpec(0.8, "down")]
        thresholds = [0.4, 0.6, 0.45, 0.55]
        return [message_branch(model, senders[k % 4], thresholds[k % 4], cells=4, nodes=16) for k in range(count)]

    def test_many_form_matches_two_sender_form(self, uniform):
        branch = message_branch(uniform, UP_06, 0.45)
        grid = np.linspace(0.1, 0.9, 9)
        two = concealment_payoff_curve(uniform, grid, grid, 0.8, branch)
        many = concealment_payoff_many(uniform, grid, grid, 0.8, [branch])
        assert np.allclose(two, many, atol=1e-12)

    def test_binning_keeps_state_totals(self):
        rng = np.random.default_rng(3)
        a0, a1 = rng.random(5000), rng.random(5000)
        b0, b1 = compress_likelihoods(a0, a1, bins=64)
        assert b0.size <= 64
        assert b0.sum() == pytest.approx(a0.sum(), rel=1e-12)
        assert b1.sum() == pytest.approx(a1.sum(), rel=1e-12)

    def test_binning_keeps_one_state_profiles(self):
        b0, b1 = compress_likelihoods([0.0, 0.2, 0.3, 0.5], [0.4, 0.0, 0.3, 0.3], bins=2)
        pairs = set(zip(np.round(b0, 12), np.round(b1, 12)))
        assert (0.2, 0.0) in pairs and (0.0, 0.4) in pairs
        assert b0.sum() == pytest.approx(1.0) and b1.sum() == pytest.approx(1.0)

    def test_five_senders_stay_bounded(self, uniform):
        a0, a1 = joint_message_columns(self.small_branches(uniform, 5))
        assert a0.size <= COLUMN_CAP
        assert a0.sum() == pytest.approx(1.0, abs=1e-10)
        assert a1.sum() == pytest.approx(1.0, abs=1e-10)

    def test_binned_payoff_close_to_exact(self, uniform):
        branches = self.small_branches(uniform, 3)
        grid = np.linspace(0.2, 0.8, 5)
        exact = concealment_payoff_many(uniform, grid, grid, 0.8, branches, cap=None)
        binned = concealment_payoff_many(uniform, grid, grid, 0.8, branches)
        assert joint_message_columns(branches, cap=None)[0].size > COLUMN_CAP
        assert np.allclose(binned, exact, atol=5e-5)

    def test_order_of_other_senders_is_irrelevant(self, uniform):
        first, second = self.small_branches(uniform, 2)
        grid = np.linspace(0.1, 0.9, 9)
        forward = concealment_payoff_many(uniform, grid, grid, 0.8, [first, second])
        backward = concealment_payoff_many(uniform, grid, grid, 0.8, [second, first])
        assert np.allclose(forward, backward, atol=1e-12)


# ── Validation ─────────────────────────────────────────────────────────────

class TestValidation:

    def test_sender_probability(self):
        with pytest.raises(ConfigError):
            SenderSpec(0.0)
        with pytest.raises(ConfigError):
            SenderSpec(1.2)

    def test_sender_bias(self):
        with pytest.raises(ConfigError):
            SenderSpec(0.5, "left")

    def test_flipped(self):
        assert SenderSpec(0.5, "up").flipped() == SenderSpec(0.5, "down")

    def test_profile_weights(self):
        profile = ThresholdProfile((0.3, 0.6))
        assert profile.marginal_weights == (1.0, 1.0)
        with pytest.raises(ConfigError):
            ThresholdProfile((0.3, 0.6), (1.0,))
        with pytest.raises(ConfigError):
            ThresholdProfile((0.3,), (1.5,))

    def test_profile_within_support(self, uniform):
        with pytest.raises(DomainError):
            ThresholdProfile((0.3, 1.4)).check_within(uniform)
