"""
Several senders with conditionally independent signals.

  - best responses of one sender to another's threshold
  - extremal equilibria by monotone best-response iteration
  - a brute-force grid/lattice oracle for the iterative solvers
  - many senders, sequential reporting, one perfectly shared signal
  - senders with non-linear (power) utility and the curvature of W

Each sender is solved in his own frame: x = s for an upward sender and
x = 1 - s for a downward one, so a lower x always means more disclosure.
Profiles handed back to callers are in the original orientation.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize
from scipy.interpolate import PchipInterpolator

from belief_core import (
    SenderSpec,
    ThresholdProfile,
    bayes_update,
    check_prior,
    combine_beliefs,
    concealment_payoff_curve,
    concealment_payoff_joint,
    concealment_posteriors,
    disclosure_posteriors,
    eta,
    frame_model,
    joint_message_columns,
    message_branch,
    to_frame,
)
from config import SolverOptions
from errors import BoundaryNotSupportedError, ConfigError, ConvergenceError, DomainError
from signal_models import SignalModel
from single_sender import (
    END_GUARD,
    FramePoint,
    discrete_strategies,
    frame_position,
    rule_residual,
    rule_violations,
    scan_roots,
    sender_welfare,
    solve_single,
    threshold_solutions,
)
from welfare_sim import dm_welfare_quadratic, posterior_distribution

logger = logging.getLogger(__name__)

POWER_FLOOR   = 1e-12
MONOTONE_GRID = 257
MERGE_DIGITS  = 7

__all__ = [
    "ThresholdProfile",
    "ResponsePoint",
    "BestResponse",
    "TwoSenderEquilibrium",
    "UtilitySpec",
    "TwoSenderGame",
    "best_response_set",
    "solve_extremal_complements",
    "solve_extremal_substitutes",
    "enumerate_equilibria_grid",
    "ManySenderEquilibrium",
    "solve_many_senders",
    "SequentialPolicy",
    "SequentialEquilibrium",
    "SequentialResult",
    "solve_sequential",
    "CorrelatedEquilibrium",
    "correlated_nondisclosure_belief",
    "solve_correlated",
    "threshold_type_payoffs",
    "nonlinear_best_response",
    "utility_gap_W",
    "curvature_H",
    "curvature_sign_H",
    "compare_single_vs_two",
]


# ── Types ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ResponsePoint:
    threshold: float
    weight: float
    kind: str
    tangent: bool = False


class BestResponse(NamedTuple):
    """Best-response set of one sender; smallest and largest are original-orientation thresholds."""

    smallest: float
    largest: float
    all: List[ResponsePoint]


@dataclass(frozen=True)
class TwoSenderEquilibrium:
    profile: ThresholdProfile
    kind: str                          # smallest | largest | i_maximal | j_maximal | grid_point
    residuals: Tuple[float, ...]
    dm_welfare: float
    sender_welfare: Tuple[float, ...]
    iterations: int = 0
    trace: Tuple[Tuple[float, ...], ...] = ()

    @property
    def thresholds(self):
        return self.profile.thresholds


@dataclass(frozen=True)
class UtilitySpec:
    """Sender utility V over the DM's final posterior (original orientation).

    power: V(b) = gamma * b**alpha. For a downward sender pass a decreasing V,
    e.g. power with gamma of the opposite sign.
    """

    kind: str = "linear"               # linear | power | custom
    alpha: float = 1.0
    gamma: float = 1.0
    fn: Optional[Callable] = None
    name: str = ""

    @classmethod
    def linear(cls):
        return cls("linear", name="linear")

    @classmethod
    def power(cls, alpha: float, gamma: float = 1.0):
        if alpha == 0.0 or gamma == 0.0:
            raise ConfigError(f"power utility needs alpha, gamma != 0 (got alpha={alpha}, gamma={gamma})")
        return cls("power", alpha, gamma, name=f"{gamma:g}*b^{alpha:g}")

    @classmethod
    def custom(cls, fn: Callable, name: str = "custom"):
        return cls("custom", fn=fn, name=name)

    def __call__(self, beta):
        beta = np.asarray(beta, dtype=float)
        if self.kind == "linear":
            return beta
        if self.kind == "power":
            if self.alpha < 0.0:
                beta = np.maximum(beta, POWER_FLOOR)
            return self.gamma * beta ** self.alpha
        if self.kind == "custom":
            return np.asarray(self.fn(beta), dtype=float)
        raise ConfigError(f"unknown utility kind '{self.kind}'")

    def direction(self) -> int:
        """+1 strictly increasing on [0, 1], -1 strictly decreasing, 0 otherwise."""
        if self.kind == "power":
            return int(np.sign(self.alpha * self.gamma))
        steps = np.diff(self(np.linspace(0.0, 1.0, MONOTONE_GRID)))
        if np.all(steps > 0.0):
            return 1
        if np.all(steps < 0.0):
            return -1
        return 0

    def check_for(self, sender: SenderSpec):
        wanted = 1 if sender.is_up else -1
        if self.direction() != wanted:
            raise ConfigError(
                f"utility '{self.name or self.kind}' must be strictly "
                f"{'increasing' if sender.is_up else 'decreasing'} for a {sender.bias}-biased sender"
            )


# ── Two senders ────────────────────────────────────────────────────────────


def _oriented_kind(sender: SenderSpec, kind: str) -> str:
    if sender.is_up:
        return kind
    return {"boundary_lo": "boundary_hi", "boundary_hi": "boundary_lo"}.get(kind, kind)


class TwoSenderGame:
    """Two senders with independent signals about the same state."""

    def __init__(self, model: SignalModel, c: float, senders: Sequence[SenderSpec],
                 options: Optional[SolverOptions] = None, prior=None):
        if len(senders) != 2:
            raise ConfigError(f"a two-sender game needs two senders, got {len(senders)}")
        self.model = model
        self.prior = check_prior(model, prior)
        self.c = float(c)
        self.senders = tuple(senders)
        self.options = options or SolverOptions()
        self.frames = tuple(frame_model(model, s) for s in self.senders)

    # frame helpers

    def bottom(self, k):
        """Most-disclosing rule of sender k, as (x, weight)."""
        return self.frames[k].support_lo, 1.0

    def top(self, k):
        """Never-disclosing rule of sender k."""
        frame = self.frames[k]
        return frame.support_hi, (0.0 if frame.is_discrete else 1.0)

    def position(self, k, rule):
        return frame_position(self.frames[k], *rule)

    def original(self, k, x):
        return float(to_frame(self.senders[k], x))

    def branch(self, i, x_j, w_j=1.0):
        """Law of the other sender's message in sender i's frame, his frame threshold being x_j."""
        j = 1 - i
        t_j = to_frame(self.senders[j], x_j)
        other = self.senders[j] if self.senders[i].is_up else self.senders[j].flipped()
        return message_branch(self.frames[i], other, to_frame(self.senders[i], t_j), w_j,
                              self.options.branch_cells, self.options.branch_nodes)

    def excess(self, i, x_j, w_j=1.0):
        """Concealment minus disclosure payoff of sender i, given the other's frame rule."""
        frame, p_i, c = self.frames[i], self.senders[i].p, self.c
        branch = self.branch(i, x_j, w_j)

        def excess(x, s, w=1.0):
            return concealment_payoff_curve(frame, s, x, p_i, branch, w) - np.asarray(s, dtype=float) + c
        return excess

    def responses(self, i, x_j, w_j=1.0, grid_size=None) -> List[FramePoint]:
        return threshold_solutions(self.frames[i], self.excess(i, x_j, w_j), self.options, grid_size)

    def residual(self, i, rules) -> float:
        j = 1 - i
        return rule_residual(self.frames[i], self.excess(i, *rules[j]), *rules[i])

    # results

    def equilibrium(self, rules, kind, iterations=0, trace=()) -> TwoSenderEquilibrium:
        thresholds = tuple(self.original(k, x) for k, (x, _) in enumerate(rules))
        weights = tuple(w for _, w in rules)
        profile = ThresholdProfile(thresholds, weights)
        dist = posterior_distribution(self.model, self.prior, profile, self.senders,
                                      cells=self.options.branch_cells, nodes=self.options.branch_nodes)
        return TwoSenderEquilibrium(
            profile=profile,
            kind=kind,
            residuals=tuple(self.residual(k, rules) for k in range(2)),
            dm_welfare=dm_welfare_quadratic(dist),
            sender_welfare=tuple(sender_welfare(self.model, t, s, self.c, w)
                                 for s, t, w in zip(self.senders, thresholds, weights)),
            iterations=iterations,
            trace=tuple(trace),
        )

    def iterate(self, start, select, kind) -> TwoSenderEquilibrium:
        """Simultaneous best-response iteration from a lattice corner.

        select[k] is "min" or "max": which end of sender k's best-response set
        to follow. Stops when successive positions agree within tarski_tol and
        certifies the limit.
        """
        opts = self.options
        rules = [tuple(r) for r in start]
        trace = [tuple(self.position(k, r) for k, r in enumerate(rules))]
        for it in range(1, opts.tarski_max_iter + 1):
            new = []
            for i in range(2):
                points = self.responses(i, *rules[1 - i])
                if not points:
                    raise ConvergenceError(f"sender {i + 1} has no best response at iteration {it}", trace)
                pt = points[0] if select[i] == "min" else points[-1]
                new.append((pt.x, pt.weight))
            trace.append(tuple(self.position(k, r) for k, r in enumerate(new)))
            logger.debug(f"{kind} iteration {it}: {trace[-1]}")
            rules = new
            if max(abs(a - b) for a, b in zip(trace[-1], trace[-2])) <= opts.tarski_tol:
                eq = self.equilibrium(rules, kind, it, trace)
                if max(eq.residuals) > opts.certify_tol:
                    raise ConvergenceError(
                        f"{kind} limit {eq.thresholds} fails certification (residuals {eq.residuals})", trace
                    )
                logger.info(f"{kind} equilibrium {eq.thresholds} after {it} iterations")
                return eq
        raise ConvergenceError(f"{kind} iteration did not settle within {opts.tarski_max_iter} steps", trace)


def _best_response(sender: SenderSpec, points: Sequence[FramePoint]) -> BestResponse:
    found = sorted(
        (ResponsePoint(float(to_frame(sender, pt.x)), pt.weight, _oriented_kind(sender, pt.kind), pt.tangent)
         for pt in points),
        key=lambda r: r.threshold,
    )
    if not found:
        raise ConvergenceError("empty best-response set")
    return BestResponse(found[0].threshold, found[-1].threshold, found)


def best_response_set(model: SignalModel, prior, c: float, i: SenderSpec, j: SenderSpec, s_hat_j: float,
                      weight_j: float = 1.0, options: Optional[SolverOptions] = None) -> BestResponse:
    """Every threshold of sender i that is optimal, and self-confirming, against j's threshold s_hat_j."""
    game = TwoSenderGame(model, c, (i, j), options, prior)
    x_j = float(to_frame(j, model.check_support(s_hat_j)))
    return _best_response(i, game.responses(0, x_j, weight_j))


def solve_extremal_complements(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec],
                               options: Optional[SolverOptions] = None):
    """(smallest, largest) equilibria when c <= 0, in the frame order (smallest discloses most)."""
    if c > 0.0:
        raise ConfigError(f"strategic complements need c <= 0, got c = {c}")
    game = TwoSenderGame(model, c, senders, options, prior)
    smallest = game.iterate([game.bottom(0), game.bottom(1)], ("min", "min"), "smallest")
    largest = game.iterate([game.top(0), game.top(1)], ("max", "max"), "largest")
    return smallest, largest


def solve_extremal_substitutes(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec],
                               options: Optional[SolverOptions] = None):
    """(i_maximal, j_maximal) equilibria when c > 0.

    Flipping the sign of j's threshold makes the best-response map monotone;
    its smallest fixed point minimizes x_i while maximizing x_j.
    """
    if c <= 0.0:
        raise ConfigError(f"strategic substitutes need c > 0, got c = {c}")
    game = TwoSenderGame(model, c, senders, options, prior)
    j_maximal = game.iterate([game.bottom(0), game.top(1)], ("min", "max"), "j_maximal")
    i_maximal = game.iterate([game.top(0), game.bottom(1)], ("max", "min"), "i_maximal")
    return i_maximal, j_maximal


# ── Grid oracle ────────────────────────────────────────────────────────────


def _discrete_rule_gaps(frame, p_i, branch, rules, c):
    """Disclose-minus-conceal gaps, shape (rules, atoms), for every rule of one sender."""
    values = frame.values
    n = values.size
    ks = np.array([k for k, _ in rules])
    ws = np.array([w for _, w in rules])
    strict = np.array(frame.conditional_lower(values, 1.0))
    inclusive = np.array(frame.conditional_lower(values, 0.0))
    q0 = ws * strict[0][ks] + (1.0 - ws) * inclusive[0][ks]
    q1 = ws * strict[1][ks] + (1.0 - ws) * inclusive[1][ks]
    l0, l1 = (1.0 - p_i) + p_i * q0, (1.0 - p_i) + p_i * q1
    eta_i = bayes_update(frame.prior, l0, l1)
    s = np.tile(values, len(rules))
    posts, masses = concealment_posteriors(s, np.repeat(l0, n), np.repeat(l1, n), np.repeat(eta_i, n), branch)
    conceal = np.sum(posts * masses, axis=1).reshape(len(rules), n)
    return values[None, :] - c - conceal, ks, ws


def _enumerate_discrete(game: TwoSenderGame):
    opts = game.options
    lattices = [discrete_strategies(f, opts.weight_grid) for f in game.frames]
    shape = (len(lattices[0]), len(lattices[1]))
    optimal = [np.zeros(shape, dtype=bool), np.zeros(shape, dtype=bool)]

    def column(i, r_j):
        j = 1 - i
        k_j, w_j = lattices[j][r_j]
        frame = game.frames[i]
        branch = game.branch(i, game.frames[j].values[k_j], w_j)
        gaps, ks, ws = _discrete_rule_gaps(frame, game.senders[i].p, branch, lattices[i], game.c)
        return rule_violations(gaps, ks, ws) <= opts.certify_tol

    with ThreadPoolExecutor(max_workers=opts.threads) as pool:
        cols0 = list(pool.map(lambda r: column(0, r), range(shape[1])))
        cols1 = list(pool.map(lambda r: column(1, r), range(shape[0])))
    optimal[0][:] = np.array(cols0).T
    optimal[1][:] = np.array(cols1)
    found = []
    for r0, r1 in zip(*np.nonzero(optimal[0] & optimal[1])):
        (k0, w0), (k1, w1) = lattices[0][r0], lattices[1][r1]
        found.append([(game.frames[0].values[k0], w0), (game.frames[1].values[k1], w1)])
    return found


def _excess_matrix(game: TwoSenderGame, i, grid_i, grid_j):
    """E[a, b]: sender i's excess at own threshold grid_i[a] against the other's grid_j[b]."""
    def column(x_j):
        return np.asarray(game.excess(i, x_j)(grid_i, grid_i), dtype=float)

    with ThreadPoolExecutor(max_workers=game.options.threads) as pool:
        return np.array(list(pool.map(column, grid_j))).T


def _enumerate_continuous(game: TwoSenderGame, resolution):
    opts = game.options
    grids = [np.linspace(f.support_lo, f.support_hi, resolution) for f in game.frames]
    e0 = _excess_matrix(game, 0, grids[0], grids[1])          # [a, b]
    e1 = _excess_matrix(game, 1, grids[1], grids[0]).T        # [a, b]
    found = []

    # both interior: cells where both excess surfaces change sign
    def corners(e):
        stack = np.stack([e[:-1, :-1], e[1:, :-1], e[:-1, 1:], e[1:, 1:]])
        return stack.min(axis=0), stack.max(axis=0)

    lo0, hi0 = corners(e0)
    lo1, hi1 = corners(e1)
    cells = np.argwhere((lo0 <= 0.0) & (hi0 >= 0.0) & (lo1 <= 0.0) & (hi1 >= 0.0))

    def system(v):
        return [float(np.ravel(game.excess(0, v[1])(v[0], v[0]))[0]),
                float(np.ravel(game.excess(1, v[0])(v[1], v[1]))[0])]

    for a, b in cells:
        start = [0.5 * (grids[0][a] + grids[0][a + 1]), 0.5 * (grids[1][b] + grids[1][b + 1])]
        sol = optimize.root(system, start, method="hybr", options={"xtol": opts.root_tol})
        x0, x1 = sol.x
        inside = all(f.support_lo + END_GUARD < x < f.support_hi - END_GUARD for f, x in zip(game.frames, (x0, x1)))
        if sol.success and inside:
            found.append([(float(x0), 1.0), (float(x1), 1.0)])

    # one or both senders at a support end
    for i in range(2):
        j = 1 - i
        frame = game.frames[i]
        for end in (frame.support_lo, frame.support_hi):
            for pt in game.responses(j, end, grid_size=resolution):
                rules = [None, None]
                rules[i], rules[j] = (end, 1.0), (pt.x, pt.weight)
                if game.residual(i, rules) <= opts.certify_tol:
                    found.append(rules)
    return found


def enumerate_equilibria_grid(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec],
                              resolution: Optional[int] = None,
                              options: Optional[SolverOptions] = None) -> List[TwoSenderEquilibrium]:
    """Brute-force search for every equilibrium.

    Continuous models: both excess surfaces on a resolution x resolution grid,
    each cell where both change sign polished by a 2-d root solve, plus every
    support-end profile. Discrete models: the full lattice of (atom, weight)
    rules on the weight grid.
    """
    options = options or SolverOptions()
    resolution = resolution or options.grid_resolution
    if resolution > 4096:
        raise ConfigError(f"grid resolution {resolution} exceeds 4096 per axis")
    game = TwoSenderGame(model, c, senders, options, prior)
    raw = _enumerate_discrete(game) if model.is_discrete else _enumerate_continuous(game, resolution)

    seen, result = set(), []
    for rules in raw:
        key = tuple(round(game.position(k, r), MERGE_DIGITS) for k, r in enumerate(rules))
        if key in seen:
            continue
        seen.add(key)
        eq = game.equilibrium(rules, "grid_point")
        if max(eq.residuals) <= options.certify_tol:
            result.append(eq)
    result.sort(key=lambda e: e.profile.thresholds)
    logger.info(f"grid enumeration ({'lattice' if model.is_discrete else resolution}): {len(result)} equilibria")
    return result


# ── Many senders ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ManySenderEquilibrium:
    profile: ThresholdProfile
    residuals: Tuple[float, ...]
    iterations: int
    dm_welfare: float

    @property
    def thresholds(self):
        return self.profile.thresholds


def _many_excess(model, senders, rules, i, c, cells, nodes):
    frame = frame_model(model, senders[i])
    branches = []
    for j, sender_j in enumerate(senders):
        if j == i:
            continue
        t_j = to_frame(sender_j, rules[j][0])
        other = sender_j if senders[i].is_up else sender_j.flipped()
        branches.append(message_branch(frame, other, to_frame(senders[i], t_j), rules[j][1], cells, nodes))
    p_i = senders[i].p
    joint = joint_message_columns(branches)

    def excess(x, s, w=1.0):
        return concealment_payoff_joint(frame, s, x, p_i, joint, w) - np.asarray(s, dtype=float) + c
    return frame, excess


def solve_many_senders(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec],
                       options: Optional[SolverOptions] = None) -> ManySenderEquilibrium:
    """Equilibrium of a game with two or more senders.

    c <= 0: simultaneous iteration of smallest best responses from full
    disclosure, which climbs to the smallest equilibrium. c > 0: round-robin
    iteration from no disclosure.
    """
    options = options or SolverOptions()
    prior = check_prior(model, prior)
    senders = list(senders)
    if len(senders) < 2:
        raise ConfigError("solve_many_senders needs at least two senders")
    two = len(senders) == 2
    cells = options.branch_cells if two else options.many_branch_cells
    grid = options.scan_grid if two else options.many_scan_grid
    frames = [frame_model(model, s) for s in senders]
    if c <= 0.0:
        rules = [(f.support_lo, 1.0) for f in frames]
    else:
        rules = [(f.support_hi, 0.0 if f.is_discrete else 1.0) for f in frames]
    positions = [frame_position(f, *r) for f, r in zip(frames, rules)]
    trace = [tuple(positions)]

    for it in range(1, options.tarski_max_iter + 1):
        current = list(rules)
        source = rules if c <= 0.0 else current
        for i in range(len(senders)):
            frame, excess = _many_excess(model, senders, source, i, c, cells, options.branch_nodes)
            points = threshold_solutions(frame, excess, options, grid)
            if not points:
                raise ConvergenceError(f"sender {i + 1} has no best response at iteration {it}", trace)
            current[i] = (points[0].x, points[0].weight)
        trace.append(tuple(frame_position(f, *r) for f, r in zip(frames, current)))
        logger.debug(f"many-sender iteration {it}: {trace[-1]}")
        rules = current
        if max(abs(a - b) for a, b in zip(trace[-1], trace[-2])) <= options.tarski_tol:
            break
    else:
        raise ConvergenceError(f"many-sender iteration did not settle within {options.tarski_max_iter} steps", trace)

    residuals = []
    for i in range(len(senders)):
        frame, excess = _many_excess(model, senders, rules, i, c, cells, options.branch_nodes)
        residuals.append(rule_residual(frame, excess, *rules[i]))
    if max(residuals) > options.certify_tol:
        raise ConvergenceError(f"many-sender limit fails certification (residuals {residuals})", trace)
    profile = ThresholdProfile(tuple(float(to_frame(s, x)) for s, (x, _) in zip(senders, rules)),
                               tuple(w for _, w in rules))
    dist = posterior_distribution(model, prior, profile, senders, cells=cells, nodes=options.branch_nodes)
    logger.info(f"{len(senders)} senders: thresholds {profile.thresholds} after {it} iterations")
    return ManySenderEquilibrium(profile, tuple(residuals), it, dm_welfare_quadratic(dist))


# ── Sequential reporting ───────────────────────────────────────────────────


@dataclass
class SequentialPolicy:
    """Sender 2's threshold after sender 1 spoke.

    after_disclosure is tabulated over the DM's interim belief (which equals
    the disclosed signal) and interpolated monotonically; after_silence is the
    threshold at the nondisclosure belief of sender 1's equilibrium.
    """

    beliefs: np.ndarray
    thresholds: np.ndarray
    after_silence: float
    support: Tuple[float, float] = (0.0, 1.0)
    _interp: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        self._interp = PchipInterpolator(self.beliefs, self.thresholds, extrapolate=True)

    def after_disclosure(self, mu):
        out = np.clip(self._interp(np.asarray(mu, dtype=float)), *self.support)
        return float(out) if np.ndim(out) == 0 else out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"interim_belief": self.beliefs, "s2_threshold": self.thresholds})


@dataclass(frozen=True)
class SequentialEquilibrium:
    threshold_1: float
    kind: str
    nondisclosure_belief: float
    policy: SequentialPolicy
    dm_welfare: float

    @property
    def after_silence(self) -> float:
        return self.policy.after_silence


@dataclass(frozen=True)
class SequentialResult:
    lowest: SequentialEquilibrium
    highest: SequentialEquilibrium
    all: List[SequentialEquilibrium]


def interim_threshold(model: SignalModel, sender: SenderSpec, mu: float, c: float,
                      options: Optional[SolverOptions] = None) -> float:
    """Sender 2's most-disclosing equilibrium threshold once the DM's belief is mu."""
    options = options or SolverOptions()
    frame = frame_model(model, sender)
    mu_f = float(to_frame(sender, mu))
    if mu_f <= 0.0 or mu_f >= 1.0:
        # the state is known: evidence cannot move the DM
        x = frame.support_hi if c >= 0.0 else frame.support_lo
        return float(to_frame(sender, x))
    p = sender.p

    def excess(x, s, w=1.0):
        conceal = np.asarray(eta(frame, x, p, mu_f, w), dtype=float)
        return conceal - combine_beliefs(mu_f, np.asarray(s, dtype=float), frame.prior) + c

    points = threshold_solutions(frame, excess, options, options.sequential_scan)
    if not points:
        raise ConvergenceError(f"sender 2 subgame at interim belief {mu:.6g} has no equilibrium")
    return float(to_frame(sender, points[0].x))


def solve_sequential(model: SignalModel, prior, c: float, sender1: SenderSpec, sender2: SenderSpec,
                     options: Optional[SolverOptions] = None) -> SequentialResult:
    """Sender 1 reports first; sender 2 re-solves a single-sender game at the DM's interim belief."""
    options = options or SolverOptions()
    prior = check_prior(model, prior)
    if model.is_discrete:
        raise ConfigError("sequential reporting is solved for continuous signal models only")
    if sender2.p >= 1.0 and c <= 0.0:
        raise ConfigError("p2 = 1 without a disclosure cost unravels sender 2's subgame")

    beliefs = np.linspace(model.support_lo, model.support_hi, options.policy_grid)
    try:
        table = np.array([interim_threshold(model, sender2, mu, c, options) for mu in beliefs])
    except ConvergenceError as e:
        raise ConvergenceError(f"sequential policy tabulation failed: {e}", e.trace) from e

    frame = frame_model(model, sender1)
    other = sender2 if sender1.is_up else sender2.flipped()
    p1 = sender1.p

    def silence_threshold(x):
        mu_phi = float(to_frame(sender1, eta(frame, x, p1)))
        return mu_phi, interim_threshold(model, sender2, mu_phi, c, options)

    def excess(x, s, w=1.0):
        xs, ss = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)),
                                     np.atleast_1d(np.asarray(s, dtype=float)))
        out = np.empty(xs.shape)
        for k, (xk, sk) in enumerate(zip(xs, ss)):
            _, t2 = silence_threshold(xk)
            branch = message_branch(frame, other, to_frame(sender1, t2), 1.0,
                                    options.branch_cells, options.branch_nodes)
            out[k] = concealment_payoff_curve(frame, sk, xk, p1, branch)[0] - sk + c
        return out

    points = threshold_solutions(frame, excess, options, options.sequential_scan)
    if not points:
        raise ConvergenceError("sender 1 has no equilibrium threshold in the sequential game")
    found = []
    for pt in points:
        mu_phi, t2 = silence_threshold(pt.x)
        policy = SequentialPolicy(beliefs, table, t2, (model.support_lo, model.support_hi))
        t1 = float(to_frame(sender1, pt.x))
        dist = posterior_distribution(model, prior, ThresholdProfile((t1, t2)), [sender1, sender2],
                                      "sequential", policy, options.branch_cells, options.branch_nodes)
        found.append(SequentialEquilibrium(t1, _oriented_kind(sender1, pt.kind), mu_phi, policy,
                                           dm_welfare_quadratic(dist)))
    found.sort(key=lambda e: e.threshold_1)
    logger.info(f"sequential: {len(found)} sender-1 equilibria, thresholds {[e.threshold_1 for e in found]}")
    return SequentialResult(found[0], found[-1], found)


# ── One shared signal ──────────────────────────────────────────────────────


@dataclass(frozen=True)
class CorrelatedEquilibrium:
    profile: ThresholdProfile
    kind: str                          # same_bias | opposing
    nondisclosure_belief: float
    dm_welfare: float
    effective_p: Optional[float] = None

    @property
    def thresholds(self):
        return self.profile.thresholds


def correlated_nondisclosure_belief(model: SignalModel, p_up: float, p_down: float, s_up, s_down):
    """DM belief when neither sender reveals the shared signal.

    The upward sender hides signals below s_up, the downward one signals above
    s_down; silence comes from each informedness pair in turn.
    """
    below_up = model.lower_moments(s_up)
    through_down = model.lower_moments(s_down, weight=0.0)
    full = model.total_moments()
    between = np.maximum(below_up - through_down, 0.0)
    w = ((1.0 - p_up) * (1.0 - p_down) * full
         + p_up * (1.0 - p_down) * below_up
         + (1.0 - p_up) * p_down * (full - through_down)
         + p_up * p_down * between)
    return w[..., 1] / w[..., 0]


def _correlated_welfare(model, prior, profile, senders, options):
    dist = posterior_distribution(model, prior, profile, senders, "correlated",
                                  cells=options.branch_cells, nodes=options.branch_nodes)
    return dm_welfare_quadratic(dist)


def solve_correlated(model: SignalModel, prior, c: float, sender1: SenderSpec, sender2: SenderSpec,
                     options: Optional[SolverOptions] = None) -> List[CorrelatedEquilibrium]:
    """Both senders may learn one shared signal, independently of each other.

    Same bias: a single sender informed with probability p1 + p2 - p1 p2.
    Opposing biases: thresholds s_up = y + a, s_down = y - b around the joint
    nondisclosure belief y, where a = c / Pr[other silent at s_up] and b likewise.
    """
    options = options or SolverOptions()
    prior = check_prior(model, prior)
    senders = [sender1, sender2]

    if sender1.bias == sender2.bias:
        p_eff = sender1.p + sender2.p - sender1.p * sender2.p
        found = []
        for eq in solve_single(model, SenderSpec(p_eff, sender1.bias), c, options, prior):
            w = eq.marginal_weight
            profile = ThresholdProfile((eq.threshold, eq.threshold), (w, w))
            found.append(CorrelatedEquilibrium(profile, "same_bias", eq.nondisclosure_belief,
                                               _correlated_welfare(model, prior, profile, senders, options), p_eff))
        return found

    u, d = (0, 1) if sender1.is_up else (1, 0)
    p_u, p_d = senders[u].p, senders[d].p
    if c > 0.0:
        a_up, a_down = c, c
    elif c < 0.0:
        if p_u >= 1.0 or p_d >= 1.0:
            raise BoundaryNotSupportedError("a concealment cost with a surely informed sender has no interior solution")
        a_up, a_down = c / (1.0 - p_d), c / (1.0 - p_u)
    else:
        a_up = a_down = 0.0
    lo, hi = model.support_lo, model.support_hi
    y_lo, y_hi = max(lo - a_up, lo + a_down), min(hi - a_up, hi + a_down)
    if y_lo >= y_hi:
        raise BoundaryNotSupportedError(f"c = {c} leaves no room for interior thresholds")
    grid = np.linspace(y_lo, y_hi, options.scan_grid)

    def residual(y):
        return correlated_nondisclosure_belief(model, p_u, p_d, y + a_up, y - a_down) - y

    roots, _ = scan_roots(grid, residual(grid), lambda y: float(residual(y)), options.root_tol)
    found = []
    for y in roots:
        thresholds = [0.0, 0.0]
        thresholds[u], thresholds[d] = y + a_up, y - a_down
        if not all(lo < t < hi for t in thresholds):
            continue
        profile = ThresholdProfile(tuple(float(t) for t in thresholds))
        found.append(CorrelatedEquilibrium(profile, "opposing", float(y),
                                           _correlated_welfare(model, prior, profile, senders, options)))
    if not found:
        raise BoundaryNotSupportedError(f"no interior correlated equilibrium for c = {c}, p = ({p_u}, {p_d})")
    return found


# ── Payoff curves ──────────────────────────────────────────────────────────


def threshold_type_payoffs(model: SignalModel, senders: Sequence[SenderSpec], s_hat_j: float, grid,
                           weight_j: float = 1.0, options: Optional[SolverOptions] = None) -> np.ndarray:
    """U of each threshold type s_i = s_hat_i on grid for senders[0], j playing s_hat_j (original orientation)."""
    i, j = senders
    game = TwoSenderGame(model, 0.0, senders, options)
    x = to_frame(i, model.check_support(np.asarray(grid, dtype=float)))
    branch = game.branch(0, float(to_frame(j, model.check_support(s_hat_j))), weight_j)
    return to_frame(i, concealment_payoff_curve(game.frames[0], x, x, i.p, branch))


# ── Non-linear utility ─────────────────────────────────────────────────────


def nonlinear_best_response(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec], V: UtilitySpec,
                            s_hat_j: float, weight_j: float = 1.0,
                            options: Optional[SolverOptions] = None) -> BestResponse:
    """Best responses of senders[0] with utility V over the DM posterior.

    Concealing yields E[V(DM posterior)] over j's message at vantage s_i;
    disclosing yields E[V(posterior with s_i revealed)] - c.
    """
    i, j = senders
    V.check_for(i)
    game = TwoSenderGame(model, c, senders, options, prior)
    frame = game.frames[0]
    branch = game.branch(0, float(to_frame(j, model.check_support(s_hat_j))), weight_j)
    p_i = i.p

    def v_frame(b):
        return V(to_frame(i, b))

    def excess(x, s, w=1.0):
        xs, ss = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)),
                                     np.atleast_1d(np.asarray(s, dtype=float)))
        q0, q1 = frame.conditional_lower(xs, w)
        l0, l1 = (1.0 - p_i) + p_i * np.atleast_1d(q0), (1.0 - p_i) + p_i * np.atleast_1d(q1)
        eta_i = bayes_update(frame.prior, l0, l1)
        posts, masses = concealment_posteriors(ss, l0, l1, eta_i, branch)
        shown, shown_masses = disclosure_posteriors(ss, frame.prior, branch)
        conceal = np.sum(masses * v_frame(posts), axis=1)
        disclose = np.sum(shown_masses * v_frame(shown), axis=1)
        return conceal - disclose + c

    return _best_response(i, threshold_solutions(frame, excess, game.options))


def utility_gap_W(beta, r, V: UtilitySpec):
    """W(b, r) = V(T(b, r)) - V(b) with T(b, r) = b / (b + (1 - b) r)."""
    beta = np.asarray(beta, dtype=float)
    moved = beta / (beta + (1.0 - beta) * r)
    return V(moved) - V(beta)


def curvature_H(beta, alpha: float, r: float):
    """Expression sharing the sign of d2W/db2 for V(b) = b**alpha."""
    beta = np.asarray(beta, dtype=float)
    if np.any((beta < 0.0) | (beta > 1.0)):
        raise DomainError(f"beta = {beta} must lie in [0, 1]")
    if r <= 0.0:
        raise DomainError(f"r = {r} must be positive")
    base = beta + (1.0 - beta) * r
    return alpha * ((1.0 - alpha) + r * (2.0 * beta * (r - 1.0) - r * (1.0 - alpha)) / base ** (alpha + 2.0))


def curvature_sign_H(beta, alpha: float, r: float):
    out = np.sign(curvature_H(beta, alpha, r))
    return int(out) if np.ndim(out) == 0 else out.astype(int)


# ── Welfare comparison ─────────────────────────────────────────────────────


def compare_single_vs_two(model: SignalModel, prior, c: float, senders: Sequence[SenderSpec],
                          options: Optional[SolverOptions] = None) -> pd.DataFrame:
    """DM welfare of each sender's best single-sender equilibrium next to the named two-sender ones."""
    options = options or SolverOptions()
    rows = []
    for k, s in enumerate(senders):
        sols = solve_single(model, s, c, options, prior)
        best = max(sols, key=lambda e: e.dm_welfare)
        rows.append({"game": f"single sender {k + 1}", "kind": best.kind,
                     "s1": best.threshold if k == 0 else np.nan, "s2": best.threshold if k == 1 else np.nan,
                     "dm_welfare": best.dm_welfare})
    if model.is_discrete:
        named = enumerate_equilibria_grid(model, prior, c, senders, options=options)
    elif c <= 0.0:
        named = list(solve_extremal_complements(model, prior, c, senders, options))
    else:
        named = list(solve_extremal_substitutes(model, prior, c, senders, options))
    for eq in named:
        rows.append({"game": "two senders", "kind": eq.kind, "s1": eq.thresholds[0], "s2": eq.thresholds[1],
                     "dm_welfare": eq.dm_welfare})
    return pd.DataFrame(rows, columns=["game", "kind", "s1", "s2", "dm_welfare"])
