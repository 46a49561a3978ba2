"""
Decision-maker welfare, the induced posterior distribution, a seeded Monte
Carlo oracle, deviation checks and the four-signal worked examples.
"""

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd

from belief_core import (
    SenderSpec,
    ThresholdProfile,
    bayes_update,
    check_prior,
    concealment_likelihoods,
    concealment_payoff_curve,
    concealment_payoff_many,
    concealment_payoff_U,
    eta,
    frame_model,
    joint_likelihood_columns,
    message_branch,
    to_frame,
)
from errors import ConfigError, GoldenMismatchError
from signal_models import ATOM_TOL, BRANCH_CELLS, BRANCH_NODES, SignalModel, four_signal_model

logger = logging.getLogger(__name__)

GENERATOR      = "Philox"
DEFAULT_STREAMS = 8
VIOLATION_TOL  = 1e-7
GOLDEN_TOL     = 5e-5
MERGE_DECIMALS = 12


# ── Posterior distributions ────────────────────────────────────────────────


@dataclass(frozen=True)
class DensityBranch:
    """Quadrature view of a continuous piece of the posterior law."""

    label: str
    values: np.ndarray
    masses: np.ndarray

    @property
    def mass(self) -> float:
        return float(self.masses.sum())

    @property
    def interval(self):
        return float(self.values.min()), float(self.values.max())


@dataclass(frozen=True)
class PosteriorDistribution:
    atom_values: np.ndarray
    atom_masses: np.ndarray
    branches: List[DensityBranch] = field(default_factory=list)

    @property
    def atoms(self):
        return list(zip(self.atom_values.tolist(), self.atom_masses.tolist()))

    def _points(self):
        values = [self.atom_values] + [b.values for b in self.branches]
        masses = [self.atom_masses] + [b.masses for b in self.branches]
        return np.concatenate(values), np.concatenate(masses)

    def expect(self, fn) -> float:
        values, masses = self._points()
        return float(np.sum(masses * fn(values)))

    def total_mass(self) -> float:
        return float(self._points()[1].sum())

    def mean(self) -> float:
        return self.expect(lambda mu: mu)

    def second_moment(self) -> float:
        return self.expect(lambda mu: mu * mu)

    def to_frame(self) -> pd.DataFrame:
        rows = [{"part": "atom", "label": "", "posterior": v, "mass": m} for v, m in self.atoms]
        for b in self.branches:
            rows.extend({"part": "branch", "label": b.label, "posterior": v, "mass": m}
                        for v, m in zip(b.values.tolist(), b.masses.tolist()))
        return pd.DataFrame(rows, columns=["part", "label", "posterior", "mass"])


def _merge_atoms(values, masses):
    if not values:
        return np.empty(0), np.empty(0)
    values = np.concatenate(values)
    masses = np.concatenate(masses)
    keep = masses > 0.0
    keys = np.round(values[keep], MERGE_DECIMALS)
    unique, inverse = np.unique(keys, return_inverse=True)
    merged = np.zeros(unique.size)
    np.add.at(merged, inverse, masses[keep])
    return unique, merged


def _event_points(prior, columns):
    """Posterior and mass for every combination of the given likelihood columns."""
    a0, a1 = joint_likelihood_columns(columns)
    mass = prior * a1 + (1.0 - prior) * a0
    keep = mass > 0.0
    return bayes_update(prior, a0[keep], a1[keep]), mass[keep]


def _simultaneous(model, prior, profile, senders, cells, nodes):
    branches = [
        message_branch(model, s, t, w, cells, nodes)
        for s, t, w in zip(senders, profile.thresholds, profile.marginal_weights)
    ]
    atom_values, atom_masses, density = [], [], []
    for mask in itertools.product((False, True), repeat=len(branches)):
        columns = []
        for discloses, b in zip(mask, branches):
            if discloses:
                columns.append((b.disclosed_q0, b.disclosed_q1))
            else:
                columns.append((np.array([b.conceal_l0]), np.array([b.conceal_l1])))
        posts, masses = _event_points(prior, columns)
        if posts.size == 0:
            continue
        if not any(mask) or model.is_discrete:
            atom_values.append(posts)
            atom_masses.append(masses)
        else:
            label = "+".join(f"s{k + 1}" for k, d in enumerate(mask) if d) + " disclose"
            density.append(DensityBranch(label, posts, masses))
    values, masses = _merge_atoms(atom_values, atom_masses)
    return PosteriorDistribution(values, masses, density)


def _sequential(model, prior, profile, senders, policy, cells, nodes):
    first, second = senders
    b1 = message_branch(model, first, profile.thresholds[0], profile.marginal_weights[0], cells, nodes)
    weight_2 = profile.marginal_weights[1]
    atom_values, atom_masses = [], []
    disclosed_posts, disclosed_masses = [], []

    for v, q0, q1 in zip(b1.values, b1.disclosed_q0, b1.disclosed_q1):
        b2 = message_branch(model, second, float(policy.after_disclosure(v)), weight_2, cells, nodes)
        a0, a1 = b2.likelihood_columns()
        posts, masses = _event_points(prior, [(np.array([q0]), np.array([q1])), (a0, a1)])
        disclosed_posts.append(posts)
        disclosed_masses.append(masses)

    b2 = message_branch(model, second, float(policy.after_silence), weight_2, cells, nodes)
    l0, l1 = np.array([b1.conceal_l0]), np.array([b1.conceal_l1])
    both_silent, silent_mass = _event_points(prior, [(l0, l1), (np.array([b2.conceal_l0]), np.array([b2.conceal_l1]))])
    atom_values.append(both_silent)
    atom_masses.append(silent_mass)
    posts, masses = _event_points(prior, [(l0, l1), (b2.disclosed_q0, b2.disclosed_q1)])

    if model.is_discrete:
        atom_values.extend(disclosed_posts + [posts])
        atom_masses.extend(disclosed_masses + [masses])
        branches = []
    else:
        branches = [DensityBranch("s2 discloses after s1 silence", posts, masses)] if posts.size else []
        if disclosed_posts:
            branches.append(DensityBranch("s1 discloses", np.concatenate(disclosed_posts),
                                          np.concatenate(disclosed_masses)))
    values, masses = _merge_atoms(atom_values, atom_masses)
    return PosteriorDistribution(values, masses, branches)


def correlated_conceal_probability(values, sender: SenderSpec, threshold, weight):
    """Pr[the sender, if informed, withholds the shared signal] at each value."""
    if sender.is_up:
        below = values < threshold - ATOM_TOL
    else:
        below = values > threshold + ATOM_TOL
    tie = np.abs(values - threshold) <= ATOM_TOL
    return below.astype(float) + (1.0 - weight) * tie


def _correlated_points(model, profile, senders, cells, nodes):
    if model.is_discrete:
        values, q0, q1 = model.interval_branch(model.support_lo, model.support_hi)
    else:
        cuts = np.unique(np.clip([model.support_lo, *profile.thresholds, model.support_hi],
                                 model.support_lo, model.support_hi))
        pieces = [model.interval_branch(a, b, cells, nodes) for a, b in zip(cuts[:-1], cuts[1:])]
        values, q0, q1 = (np.concatenate(part) for part in zip(*pieces))
    silent = np.ones_like(values)
    for s, t, w in zip(senders, profile.thresholds, profile.marginal_weights):
        silent *= (1.0 - s.p) + s.p * correlated_conceal_probability(values, s, t, w)
    return values, q0, q1, silent


def _correlated(model, prior, profile, senders, cells, nodes):
    values, q0, q1, silent = _correlated_points(model, profile, senders, cells, nodes)
    disclosed = (prior * q1 + (1.0 - prior) * q0) * (1.0 - silent)
    a0, a1 = np.sum(q0 * silent), np.sum(q1 * silent)
    none_mass = prior * a1 + (1.0 - prior) * a0
    atom_v = [np.array([float(bayes_update(prior, a0, a1))])]
    atom_m = [np.array([none_mass])]
    if model.is_discrete:
        atom_v.append(values)
        atom_m.append(disclosed)
        branches = []
    else:
        branches = [DensityBranch("shared signal disclosed", values, disclosed)]
    merged_v, merged_m = _merge_atoms(atom_v, atom_m)
    return PosteriorDistribution(merged_v, merged_m, branches)


def posterior_distribution(model: SignalModel, prior, profile: ThresholdProfile, senders: Sequence[SenderSpec],
                           game_kind: str = "simultaneous", policy=None,
                           cells: int = BRANCH_CELLS, nodes: int = BRANCH_NODES) -> PosteriorDistribution:
    """The DM's law of final posteriors under a threshold profile.

    game_kind: simultaneous (also single/two/many), sequential (needs the
    sender-2 policy) or correlated (one shared signal).
    """
    prior = check_prior(model, prior)
    if len(profile) != len(senders):
        raise ConfigError(f"{len(profile)} thresholds for {len(senders)} senders")
    profile.check_within(model)
    if game_kind in ("simultaneous", "single", "two", "many"):
        return _simultaneous(model, prior, profile, senders, cells, nodes)
    if game_kind == "sequential":
        if policy is None or len(senders) != 2:
            raise ConfigError("sequential posterior needs two senders and a sender-2 policy")
        return _sequential(model, prior, profile, senders, policy, cells, nodes)
    if game_kind == "correlated":
        return _correlated(model, prior, profile, senders, cells, nodes)
    raise ConfigError(f"unknown game kind '{game_kind}'")


# ── Welfare ────────────────────────────────────────────────────────────────


def dm_welfare_quadratic(dist: PosteriorDistribution) -> float:
    return -dist.expect(lambda mu: mu * (1.0 - mu))


@dataclass(frozen=True)
class ActionProblem:
    """u_DM(a, omega). Either a closed-form value of each posterior or a max over an action grid."""

    utility: Optional[Callable] = None
    actions: Optional[np.ndarray] = None
    value: Optional[Callable] = None
    name: str = "custom"

    def value_at(self, mu):
        mu = np.asarray(mu, dtype=float)
        if self.value is not None:
            return self.value(mu)
        actions = np.linspace(0.0, 1.0, 1024) if self.actions is None else np.asarray(self.actions, dtype=float)
        payoff = (mu[:, None] * self.utility(actions[None, :], 1.0)
                  + (1.0 - mu[:, None]) * self.utility(actions[None, :], 0.0))
        return payoff.max(axis=1)


def quadratic_loss_problem(closed_form: bool = True, grid: int = 1024) -> ActionProblem:
    utility = lambda a, omega: -(a - omega) ** 2  # noqa: E731
    if closed_form:
        return ActionProblem(utility, value=lambda mu: -mu * (1.0 - mu), name="quadratic")
    return ActionProblem(utility, actions=np.linspace(0.0, 1.0, grid), name="quadratic-grid")


def binary_action_problem(reward: float = 1.0) -> ActionProblem:
    """Guess the state; reward for a match, zero otherwise."""
    utility = lambda a, omega: reward * (a == omega)  # noqa: E731
    return ActionProblem(utility, actions=np.array([0.0, 1.0]), name="binary")


def dm_welfare_general(dist: PosteriorDistribution, problem: ActionProblem) -> float:
    return dist.expect(problem.value_at)


# ── Monte Carlo ────────────────────────────────────────────────────────────


@dataclass
class SimReport:
    n_draws: int
    seed: int
    streams: int
    game_kind: str
    mean_posterior: float
    mean_posterior_se: float
    dm_welfare: float
    dm_welfare_se: float
    sender_payoffs: List[float]
    sender_payoffs_se: List[float]
    disclosure_rates: List[float]
    generator: str = GENERATOR

    def to_text(self) -> str:
        sep = "=" * 70
        lines = [
            sep,
            f"MONTE CARLO  game={self.game_kind}  draws={self.n_draws:,}  seed={self.seed}  "
            f"streams={self.streams}  generator={self.generator}",
            sep,
            f"  mean posterior        : {self.mean_posterior:.10f}  (se {self.mean_posterior_se:.2e})",
            f"  DM welfare -E[mu(1-mu)]: {self.dm_welfare:.10f}  (se {self.dm_welfare_se:.2e})",
        ]
        for k, (v, se, rate) in enumerate(zip(self.sender_payoffs, self.sender_payoffs_se, self.disclosure_rates)):
            lines.append(f"  sender {k + 1} payoff       : {v:.10f}  (se {se:.2e})  disclosure rate {rate:.6f}")
        lines.append(sep)
        return "\n".join(lines)


def _stream_sizes(n, streams):
    base, extra = divmod(n, streams)
    return [base + (1 if k < extra else 0) for k in range(streams)]


def _generators(seed, streams):
    children = np.random.SeedSequence(seed).spawn(streams)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _disclosure_draw(rng, sender, threshold, weight, signals, informed):
    """Who discloses, applying the marginal-atom weight with an extra uniform."""
    if sender.is_up:
        strict = signals > threshold + ATOM_TOL
    else:
        strict = signals < threshold - ATOM_TOL
    tie = np.abs(signals - threshold) <= ATOM_TOL
    coin = rng.random(signals.shape) < weight
    return informed & (strict | (tie & coin))


def _signal_likelihoods(prior, signals):
    """Likelihood pair of a disclosed private belief, up to a common factor."""
    return (1.0 - signals) / (1.0 - prior), signals / prior


def _simulate_batch(rng, size, model, prior, profile, senders, c, game_kind, policy, silent_belief):
    states = (rng.random(size) < prior).astype(int)
    k_senders = len(senders)
    disclosed = np.zeros((k_senders, size), dtype=bool)

    if game_kind == "correlated":
        shared = model.sample_signals(rng, states)
        for k, (s, t, w) in enumerate(zip(senders, profile.thresholds, profile.marginal_weights)):
            informed = rng.random(size) < s.p
            disclosed[k] = _disclosure_draw(rng, s, t, w, shared, informed)
        anyone = disclosed.any(axis=0)
        posterior = np.where(anyone, shared, silent_belief)
    else:
        a0 = np.ones(size)
        a1 = np.ones(size)
        posterior = None
        for k, (s, t, w) in enumerate(zip(senders, profile.thresholds, profile.marginal_weights)):
            informed = rng.random(size) < s.p
            signals = model.sample_signals(rng, states)
            if game_kind == "sequential" and k == 1:
                interim = bayes_update(prior, a0, a1)
                t = np.where(disclosed[0], policy.after_disclosure(interim), policy.after_silence)
            disclosed[k] = _disclosure_draw(rng, s, t, w, signals, informed)
            l0, l1 = concealment_likelihoods(model, s, t, w)
            d0, d1 = _signal_likelihoods(prior, signals)
            a0 = a0 * np.where(disclosed[k], d0, l0)
            a1 = a1 * np.where(disclosed[k], d1, l1)
        posterior = bayes_update(prior, a0, a1)

    payoffs = np.empty((k_senders, size))
    for k, s in enumerate(senders):
        own = posterior if s.is_up else 1.0 - posterior
        payoffs[k] = own - c * disclosed[k]
    quantities = np.vstack([posterior, -posterior * (1.0 - posterior), payoffs, disclosed.astype(float)])
    return quantities.sum(axis=1), (quantities ** 2).sum(axis=1)


def _reduce(results, n):
    total = np.zeros_like(results[0][0])
    square = np.zeros_like(results[0][1])
    for s1, s2 in results:
        total += s1
        square += s2
    mean = total / n
    var = np.maximum(square / n - mean ** 2, 0.0) * n / max(n - 1, 1)
    return mean, np.sqrt(var / n)


def monte_carlo(model: SignalModel, prior, profile: ThresholdProfile, senders: Sequence[SenderSpec],
                game_kind: str = "simultaneous", n: int = 1_000_000, seed: int = 20240917, c: float = 0.0,
                policy=None, streams: int = DEFAULT_STREAMS, threads: Optional[int] = None) -> SimReport:
    """Simulate the game under `profile`; deterministic for a given (seed, streams)."""
    prior = check_prior(model, prior)
    if n < 1:
        raise ConfigError(f"number of draws must be positive, got {n}")
    if game_kind in ("single", "two", "many"):
        game_kind = "simultaneous"
    if game_kind == "sequential" and policy is None:
        raise ConfigError("sequential simulation needs the sender-2 policy")
    silent_belief = None
    if game_kind == "correlated":
        silent_belief = _correlated_silence_belief(model, prior, profile, senders)
        logger.debug(f"correlated silence belief {silent_belief:.10f}")

    sizes = _stream_sizes(n, streams)
    generators = _generators(seed, streams)
    workers = threads or os.cpu_count() or 1
    logger.info(f"Monte Carlo: {n:,} draws, {streams} streams, {workers} threads, seed {seed}")

    def run(k):
        if sizes[k] == 0:
            width = 2 + 2 * len(senders)
            return np.zeros(width), np.zeros(width)
        return _simulate_batch(generators[k], sizes[k], model, prior, profile, senders, c,
                               game_kind, policy, silent_belief)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, range(streams)))
    mean, se = _reduce(results, n)
    k = len(senders)
    return SimReport(
        n_draws=n, seed=seed, streams=streams, game_kind=game_kind,
        mean_posterior=float(mean[0]), mean_posterior_se=float(se[0]),
        dm_welfare=float(mean[1]), dm_welfare_se=float(se[1]),
        sender_payoffs=mean[2:2 + k].tolist(), sender_payoffs_se=se[2:2 + k].tolist(),
        disclosure_rates=mean[2 + k:].tolist(),
    )


def _correlated_silence_belief(model, prior, profile, senders):
    values, q0, q1, silent = _correlated_points(model, profile, senders, BRANCH_CELLS, BRANCH_NODES)
    return float(bayes_update(prior, np.sum(q0 * silent), np.sum(q1 * silent)))


def simulate_concealment_payoff(model: SignalModel, s_i: float, s_hat_i: float, sender_i: SenderSpec,
                                s_hat_j: float, sender_j: SenderSpec, n: int = 1_000_000,
                                seed: int = 20240917, streams: int = DEFAULT_STREAMS,
                                weight_i: float = 1.0, weight_j: float = 1.0):
    """(mean, se) of the DM posterior a silent type s_i expects, by sampling j's message."""
    prior = model.prior
    l0_i, l1_i = concealment_likelihoods(model, sender_i, s_hat_i, weight_i)
    eta_i = float(bayes_update(prior, l0_i, l1_i))
    l0_j, l1_j = concealment_likelihoods(model, sender_j, s_hat_j, weight_j)

    def run(rng, size):
        states = (rng.random(size) < s_i).astype(int)
        informed = rng.random(size) < sender_j.p
        signals = model.sample_signals(rng, states)
        shown = _disclosure_draw(rng, sender_j, s_hat_j, weight_j, signals, informed)
        posts = np.where(shown, bayes_update(signals, l0_i, l1_i), bayes_update(eta_i, l0_j, l1_j))
        return np.array([posts.sum()]), np.array([(posts ** 2).sum()])

    results = [run(rng, size) for rng, size in zip(_generators(seed, streams), _stream_sizes(n, streams))]
    mean, se = _reduce(results, n)
    return float(mean[0]), float(se[0])


# ── Deviation checks ───────────────────────────────────────────────────────


@dataclass
class DeviationReport:
    max_violation: float
    per_sender: List[float]
    worst_signal: List[float]
    passed: bool

    def __str__(self):
        parts = ", ".join(f"s{k + 1}: {v:.3e} at {s:.6g}" for k, (v, s) in
                          enumerate(zip(self.per_sender, self.worst_signal)))
        return f"max violation {self.max_violation:.3e} ({parts}) -> {'equilibrium' if self.passed else 'NOT an equilibrium'}"


def verify_equilibrium(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec],
                       profile: ThresholdProfile, signal_grid_size: int = 512,
                       cells: int = BRANCH_CELLS, nodes: int = BRANCH_NODES,
                       tolerance: float = VIOLATION_TOL) -> DeviationReport:
    """Disclose-minus-conceal gaps at grid signals with the DM's conjectures held at the profile."""
    check_prior(model, prior)
    profile.check_within(model)
    per_sender, worst = [], []
    for i, sender_i in enumerate(senders):
        frame = frame_model(model, sender_i)
        x_i = float(to_frame(sender_i, profile.thresholds[i]))
        w_i = profile.marginal_weights[i]
        others = []
        for j, sender_j in enumerate(senders):
            if j == i:
                continue
            fsender = sender_j if sender_i.is_up else sender_j.flipped()
            t_j = float(to_frame(sender_i, profile.thresholds[j]))
            others.append(message_branch(frame, fsender, t_j, profile.marginal_weights[j], cells, nodes))
        if frame.is_discrete:
            grid = frame.values
        else:
            grid = np.linspace(frame.support_lo, frame.support_hi, signal_grid_size)
        if len(others) == 1:
            conceal = concealment_payoff_curve(frame, grid, x_i, sender_i.p, others[0], w_i)
        else:
            conceal = concealment_payoff_many(frame, grid, x_i, sender_i.p, others, w_i)
        gap = grid - c - conceal
        below = grid < x_i - ATOM_TOL
        above = grid > x_i + ATOM_TOL
        at = ~(below | above)
        violation = np.zeros_like(gap)
        violation[below] = np.maximum(gap[below], 0.0)
        violation[above] = np.maximum(-gap[above], 0.0)
        if frame.is_discrete and at.any():
            if w_i >= 1.0:
                violation[at] = np.maximum(-gap[at], 0.0)
            elif w_i <= 0.0:
                violation[at] = np.maximum(gap[at], 0.0)
            else:
                violation[at] = np.abs(gap[at])
        k = int(np.argmax(violation))
        per_sender.append(float(violation[k]))
        worst.append(float(to_frame(sender_i, grid[k])))
    top = max(per_sender) if per_sender else 0.0
    return DeviationReport(top, per_sender, worst, top <= tolerance)


# ── Four-signal examples ───────────────────────────────────────────────────


@dataclass
class GoldenRow:
    example: str
    quantity: str
    computed: float
    published: float
    comparison: str
    passed: bool


@dataclass
class GoldenTable:
    rows: List[GoldenRow]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> List[GoldenRow]:
        return [r for r in self.rows if not r.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.rows])

    def to_text(self) -> str:
        sep = "=" * 70
        lines = [sep, f"FOUR-SIGNAL EXAMPLES  (gamma = delta = 0.7, p = 0.8, prior = 1/2, tolerance {self.tolerance:g})", sep]
        for r in self.rows:
            flag = "PASS" if r.passed else "FAIL"
            lines.append(f"  [{flag}] {r.example:<10} {r.quantity:<52} {r.computed:>9.4f}  "
                         f"(published {r.published:.4f}{'; ' + r.comparison if r.comparison else ''})")
        lines.append(sep)
        lines.append(f"  {'ALL EXAMPLES PASS' if self.passed else 'FAILED: ' + ', '.join(sorted({r.example for r in self.failures()}))}")
        lines.append(sep)
        return "\n".join(lines)


def worked_examples_report(strict: bool = False, tolerance: float = GOLDEN_TOL) -> GoldenTable:
    """Recompute the four-signal welfare examples through the general machinery."""
    gamma, delta, p = 0.7, 0.7, 0.8
    model = four_signal_model(gamma, delta)
    up, down = SenderSpec(p, "up"), SenderSpec(p, "down")
    lo, hi = model.support_lo, model.support_hi
    rows = []

    def row(example, quantity, computed, published, comparison="", holds=True):
        ok = abs(computed - published) <= tolerance and holds
        rows.append(GoldenRow(example, quantity, float(computed), published, comparison, bool(ok)))

    def welfare(profile, senders):
        return dm_welfare_quadratic(posterior_distribution(model, None, profile, senders))

    # single sender disclosing {gamma, 1}
    c = 0.36
    eta_half = eta(model, gamma, p)
    row("one sender", "nondisclosure belief, disclose-set {s^h, s_bar}", eta_half, 0.3067)
    row("one sender", "DM welfare, best single-sender equilibrium",
        welfare(ThresholdProfile((gamma,)), [up]), -0.1864)

    # two opposed senders at c = 0.36
    step1 = concealment_payoff_U(model, hi, hi, up, 1.0 - gamma, down, weight_i=0.0, weight_j=1.0)
    row("c = 0.36", "step 1: conceal s_bar, s1 conjectured silent", step1, 0.6273,
        f"< 1 - c = {1 - c:.2f}", step1 < 1.0 - c)
    step2 = concealment_payoff_U(model, gamma, gamma, up, lo, down)
    row("c = 0.36", "step 2: conceal s^h, s1 conjectured at 1/2", step2, 0.3414,
        f"> gamma - c = {gamma - c:.2f}", step2 > gamma - c)
    check = concealment_payoff_U(model, gamma, hi, up, lo, down)
    row("c = 0.36", "equilibrium check: conceal s^h", check, 0.464,
        f"> gamma - c = {gamma - c:.2f}", check > gamma - c)
    row("c = 0.36", "DM welfare, unique two-sender equilibrium",
        welfare(ThresholdProfile((hi, lo)), [up, down]), -0.19)

    # two opposed senders at c = 0.38
    c = 0.38
    s2_conceal = 1.0 - concealment_payoff_U(model, lo, lo, down, gamma, up, weight_i=0.0, weight_j=1.0)
    row("c = 0.38", "s2 own payoff from concealing s_low", s2_conceal, 0.6273,
        f"> 1 - c = {1 - c:.2f}", s2_conceal > 1.0 - c)
    row("c = 0.38", "s1 nondisclosure belief", eta_half, 0.3067,
        f"< gamma - c = {gamma - c:.2f}", eta_half < gamma - c)
    row("c = 0.38", "DM welfare, s1 reveals {s^h, s_bar}, s2 silent",
        welfare(ThresholdProfile((gamma, lo), (1.0, 0.0)), [up, down]), -0.1864)

    table = GoldenTable(rows, tolerance)
    for r in table.failures():
        logger.error(f"{r.example}: {r.quantity} = {r.computed:.6f}, published {r.published}")
        if strict:
            raise GoldenMismatchError(r.example, f"{r.quantity} = {r.computed:.6f}, published {r.published}")
    return table
