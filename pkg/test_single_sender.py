"""
test_single_sender.py — Unit tests for the single-sender benchmark (single_sender.py)

Tests cover:
  - scan_roots: sign changes and tangent roots
  - rule violations of discrete (atom, weight) rules
  - solve_single on continuous and discrete models: uniqueness for c <= 0,
    multiplicity and welfare ranking for c > 0, boundary equilibria
  - sender welfare
  - (p, c) sweeps and their monotonicity checks
  - the uncertain-bias variant

Run with:  pytest test_single_sender.py -v
"""

import numpy as np
import pytest

from conftest import UNIFORM_FIXED_POINT
from belief_core import SenderSpec, eta_fixed_point
from errors import BoundaryNotSupportedError, ConfigError
from single_sender import (
    extremal_single,
    rule_violation,
    scan_roots,
    sender_welfare,
    solve_single,
    solve_uncertain_bias,
    sweep_single,
)


UP_08 = SenderSpec(0.8, "up")
DOWN_08 = SenderSpec(0.8, "down")


# ── Root scanning ──────────────────────────────────────────────────────────

class TestScanRoots:

    def test_sign_change(self):
        fn = lambda x: x * x - 0.2  # noqa: E731
        grid = np.linspace(0.0, 1.0, 11)
        roots, tangents = scan_roots(grid, fn(grid), fn)
        assert roots == pytest.approx([np.sqrt(0.2)], abs=1e-9)
        assert tangents == [False]

    def test_root_on_grid_point(self):
        fn = lambda x: x * x - 0.25  # noqa: E731
        grid = np.linspace(0.0, 1.0, 11)
        roots, _ = scan_roots(grid, fn(grid), fn)
        assert roots == pytest.approx([0.5])

    def test_tangent_root(self):
        fn = lambda x: (x - 0.33) ** 2  # noqa: E731
        grid = np.linspace(0.0, 1.0, 11)
        roots, tangents = scan_roots(grid, fn(grid), fn)
        assert len(roots) == 1
        assert roots[0] == pytest.approx(0.33, abs=1e-4)
        assert tangents == [True]

    def test_no_root(self):
        fn = lambda x: x + 1.0  # noqa: E731
        grid = np.linspace(0.0, 1.0, 11)
        assert scan_roots(grid, fn(grid), fn) == ([], [])


# ── Discrete rules ─────────────────────────────────────────────────────────

class TestRuleViolation:

    def test_consistent_rule(self):
        # gaps are disclose-minus-conceal at each atom
        assert rule_violation([-0.1, 0.2, 0.3], 1, 1.0) == 0.0

    def test_marginal_atom_should_not_disclose(self):
        assert rule_violation([-0.1, 0.2, 0.3], 0, 1.0) == pytest.approx(0.1)

    def test_higher_atom_concealing_is_a_violation(self):
        assert rule_violation([-0.1, -0.2, 0.3], 0, 1.0) == pytest.approx(0.2)

    def test_mixing_needs_indifference(self):
        assert rule_violation([-0.1, 0.0, 0.3], 1, 0.5) == 0.0
        assert rule_violation([-0.1, 0.05, 0.3], 1, 0.5) == pytest.approx(0.05)


# ── solve_single ───────────────────────────────────────────────────────────

class TestSolveSingle:

    def test_uniform_unique_at_zero_cost(self, uniform, fast_options):
        sols = solve_single(uniform, UP_08, 0.0, fast_options)
        assert len(sols) == 1
        eq = sols[0]
        assert eq.kind == "interior"
        assert eq.threshold == pytest.approx(UNIFORM_FIXED_POINT, abs=1e-8)
        assert eq.nondisclosure_belief == pytest.approx(eq.threshold, abs=1e-8)
        assert eq.sender_welfare == pytest.approx(0.5)

    def test_downward_sender_mirrors(self, uniform, fast_options):
        sols = solve_single(uniform, DOWN_08, 0.0, fast_options)
        assert len(sols) == 1
        assert sols[0].threshold == pytest.approx(1.0 - UNIFORM_FIXED_POINT, abs=1e-8)

    def test_unravelling_rejected(self, uniform, fast_options):
        with pytest.raises(ConfigError):
            solve_single(uniform, SenderSpec(1.0), 0.0, fast_options)

    def test_concealment_cost_lowers_threshold(self, uniform, fast_options):
        free = solve_single(uniform, UP_08, 0.0, fast_options)[0].threshold
        costly_hiding = solve_single(uniform, UP_08, -0.05, fast_options)
        assert len(costly_hiding) == 1
        assert costly_hiding[0].threshold < free

    def test_large_cost_gives_boundary(self, uniform, fast_options):
        sols = solve_single(uniform, UP_08, 0.6, fast_options)
        assert sols[-1].kind == "boundary_hi"
        assert sols[-1].threshold == pytest.approx(1.0)
        assert sols[-1].dm_welfare == pytest.approx(-0.25, abs=1e-10)

    def test_steep_curve_multiplicity(self, steep_curve, fast_options):
        _, p, model = steep_curve
        sols = solve_single(model, SenderSpec(p), 0.25, fast_options)
        interior = [e for e in sols if e.kind == "interior"]
        assert len(interior) == 3, f"expected three interior equilibria, got {[e.threshold for e in sols]}"
        assert all(0.5 < e.threshold < 0.8 for e in interior)
        lowest, highest = extremal_single(model, SenderSpec(p), 0.25, fast_options)
        assert lowest.threshold < highest.threshold
        # more disclosure helps the DM and costs the sender
        assert lowest.dm_welfare > highest.dm_welfare
        assert lowest.sender_welfare < highest.sender_welfare

    def test_extremal_coincide_when_unique(self, uniform, fast_options):
        lowest, highest = extremal_single(uniform, UP_08, -0.02, fast_options)
        assert lowest == highest

    def test_four_signal_best_equilibrium(self, four_signal, fast_options):
        sols = solve_single(four_signal, UP_08, 0.36, fast_options)
        at_gamma = [e for e in sols if abs(e.threshold - 0.7) < 1e-12 and e.marginal_weight == 1.0]
        assert at_gamma, f"disclosing {{0.7, 1}} should be an equilibrium, got {sols}"
        assert at_gamma[0].nondisclosure_belief == pytest.approx(0.3067, abs=5e-5)
        assert at_gamma[0].dm_welfare == pytest.approx(-0.1864, abs=5e-5)
        assert max(e.dm_welfare for e in sols) == pytest.approx(-0.1864, abs=5e-5)


# ── Sender welfare ─────────────────────────────────────────────────────────

class TestSenderWelfare:

    def test_zero_cost_is_prior(self, uniform):
        assert sender_welfare(uniform, 0.4, UP_08, 0.0) == pytest.approx(0.5)

    def test_never_disclosing_is_prior(self, uniform):
        assert sender_welfare(uniform, 1.0, UP_08, 0.3) == pytest.approx(0.5)

    def test_four_signal_value(self, four_signal):
        # 1/2 - p * Pr[s >= gamma] * c
        assert sender_welfare(four_signal, 0.7, UP_08, 0.36) == pytest.approx(0.356, abs=1e-12)

    def test_downward_orientation(self, uniform):
        assert sender_welfare(uniform, 0.5, DOWN_08, 0.1) == pytest.approx(0.5 - 0.4 * 0.1)


# ── Sweeps ─────────────────────────────────────────────────────────────────

class TestSweepSingle:

    def test_uniform_sweep_is_monotone(self, uniform, fast_options):
        result = sweep_single(uniform, UP_08, [0.4, 0.6, 0.8], [-0.05, 0.0, 0.05], fast_options)
        assert len(result.table) == 9
        assert result.violations == []
        assert list(result.table.columns[:4]) == ["p", "c", "lowest_threshold", "highest_threshold"]

    def test_zero_cost_rows_hit_fixed_point(self, uniform, fast_options):
        result = sweep_single(uniform, UP_08, [0.5, 0.9], [0.0], fast_options)
        for _, row in result.table.iterrows():
            assert row["lowest_threshold"] == pytest.approx(eta_fixed_point(uniform, row["p"]), abs=1e-8)


# ── Uncertain bias ─────────────────────────────────────────────────────────

class TestUncertainBias:

    def test_symmetric_zero_cost(self, uniform, fast_options):
        sols = solve_uncertain_bias(uniform, 0.8, 0.0, 0.5, fast_options)
        assert any(abs(e.s_u - 0.5) < 1e-8 and abs(e.s_d - 0.5) < 1e-8 for e in sols)

    def test_thresholds_straddle_belief(self, uniform, fast_options):
        for e in solve_uncertain_bias(uniform, 0.8, 0.05, 0.7, fast_options):
            assert e.s_u - e.s_d == pytest.approx(0.1, abs=1e-10)
            assert e.s_d < e.nondisclosure_belief < e.s_u

    def test_concealment_cost_reverses_order(self, uniform, fast_options):
        for e in solve_uncertain_bias(uniform, 0.8, -0.05, 0.5, fast_options):
            assert e.s_d > e.s_u

    def test_lambda_range(self, uniform, fast_options):
        with pytest.raises(ConfigError):
            solve_uncertain_bias(uniform, 0.8, 0.0, 1.5, fast_options)

    def test_cost_too_large(self, uniform, fast_options):
        with pytest.raises(BoundaryNotSupportedError):
            solve_uncertain_bias(uniform, 0.8, 0.6, 0.5, fast_options)
