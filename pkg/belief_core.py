"""
Bayesian machinery shared by every solver.

  - nondisclosure belief eta (upward senders; downward ones through the mirror)
  - the posterior transform T between agents with different interim beliefs
  - sender j's message law seen from an arbitrary vantage belief
  - the concealment payoff U of a threshold type, in two independent forms

Inside the solvers every sender is handled in his own "frame": the model as
is for an upward sender, its mirror for a downward one. Public functions take
and return beliefs in the original orientation.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from errors import ConfigError, ConvergenceError, DomainError, UndefinedTransformError
from signal_models import BRANCH_CELLS, BRANCH_NODES, SignalModel

logger = logging.getLogger(__name__)

FORM_AGREEMENT_TOL    = 2e-8
PAYOFF_CHUNK_ELEMENTS = 1 << 20
COLUMN_CAP            = 65536
RATIO_BINS            = 4096


# ── Types ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SenderSpec:
    p: float
    bias: str = "up"

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ConfigError(f"probability informed p = {self.p} must lie in (0, 1]")
        if self.bias not in ("up", "down"):
            raise ConfigError(f"bias must be 'up' or 'down', got {self.bias!r}")

    @property
    def is_up(self) -> bool:
        return self.bias == "up"

    def flipped(self) -> "SenderSpec":
        return SenderSpec(self.p, "down" if self.is_up else "up")


@dataclass(frozen=True)
class ThresholdProfile:
    """One threshold per sender; marginal_weights only matter for discrete models."""

    thresholds: Tuple[float, ...]
    marginal_weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        thresholds = tuple(float(t) for t in self.thresholds)
        weights = self.marginal_weights
        weights = tuple(1.0 for _ in thresholds) if weights is None else tuple(float(w) for w in weights)
        if len(weights) != len(thresholds):
            raise ConfigError("one marginal weight per threshold is required")
        if any(not 0.0 <= w <= 1.0 for w in weights):
            raise ConfigError(f"marginal weights {weights} must lie in [0, 1]")
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "marginal_weights", weights)

    def __len__(self):
        return len(self.thresholds)

    def check_within(self, model: SignalModel):
        for t in self.thresholds:
            model.check_support(t)


@dataclass(frozen=True)
class MessageDistribution:
    """Law of m_j in S u {phi} from one vantage belief."""

    nondisclosure_mass: float
    values: np.ndarray
    masses: np.ndarray

    @property
    def disclosure_mass(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class MessageBranch:
    """State-conditional law of one sender's message.

    disclosed_q0/q1 are Pr[m = value | state] over the disclosed points and
    conceal_l0/l1 are Pr[m = phi | state]; each state's total is one.
    """

    values: np.ndarray
    disclosed_q0: np.ndarray
    disclosed_q1: np.ndarray
    conceal_l0: float
    conceal_l1: float

    def at(self, vantage: float) -> MessageDistribution:
        masses = vantage * self.disclosed_q1 + (1.0 - vantage) * self.disclosed_q0
        silent = vantage * self.conceal_l1 + (1.0 - vantage) * self.conceal_l0
        return MessageDistribution(float(silent), self.values, masses)

    def mirrored(self) -> "MessageBranch":
        order = slice(None, None, -1)
        return MessageBranch(
            (1.0 - self.values)[order],
            self.disclosed_q1[order],
            self.disclosed_q0[order],
            self.conceal_l1,
            self.conceal_l0,
        )

    def likelihood_columns(self):
        """(A0, A1): Pr[message | state] over disclosed points followed by phi."""
        a0 = np.append(self.disclosed_q0, self.conceal_l0)
        a1 = np.append(self.disclosed_q1, self.conceal_l1)
        return a0, a1


# ── Elementary updates ─────────────────────────────────────────────────────


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def bayes_update(mu, l0, l1):
    """Posterior on state 1 from belief mu after an event of likelihoods (l0, l1).

    Zero-probability events leave the belief unchanged, which keeps mu in {0, 1}
    absorbing.
    """
    mu = np.asarray(mu, dtype=float)
    num = mu * l1
    den = num + (1.0 - mu) * l0
    safe = np.where(den > 0.0, den, 1.0)
    return np.where(den > 0.0, num / safe, mu)


def _transform(beta, mu_dm, mu_i):
    """T without argument checks; mu_i in {0, 1} forces beta to be certain."""
    beta = np.asarray(beta, dtype=float)
    interior = (mu_i > 0.0) & (mu_i < 1.0) & (mu_dm > 0.0) & (mu_dm < 1.0)
    mi = np.where(interior, mu_i, 0.5)
    md = np.where(interior, mu_dm, 0.5)
    ratio = ((1.0 - md) / md) * (mi / (1.0 - mi))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = beta / (beta + (1.0 - beta) * ratio)
    return np.where(interior, out, np.where(mu_dm <= 0.0, 0.0, np.where(mu_dm >= 1.0, 1.0, beta)))


def transform_posterior(beta_i, mu_dm, mu_i):
    """Carry i's posterior beta_i to the DM, whose interim belief is mu_dm instead of mu_i."""
    if not (0.0 < mu_dm < 1.0):
        raise DomainError(f"mu_dm = {mu_dm} must lie in (0, 1)")
    beta = np.asarray(beta_i, dtype=float)
    if np.any((beta < 0.0) | (beta > 1.0)):
        raise DomainError(f"beta_i = {beta_i} must lie in [0, 1]")
    if not (0.0 < mu_i < 1.0):
        if np.any((beta > 0.0) & (beta < 1.0)):
            raise UndefinedTransformError(f"T is undefined for mu_i = {mu_i} with interior beta")
        return _scalar_or_array(beta, beta_i)
    return _scalar_or_array(_transform(beta, mu_dm, mu_i), beta_i)


def combine_beliefs(a, b, prior):
    """Posterior from two conditionally independent private beliefs a and b."""
    b = np.asarray(b, dtype=float)
    return bayes_update(a, (1.0 - b) / (1.0 - prior), b / prior)


def _check_probability(name, value):
    if np.any(np.asarray(value) < 0.0) or np.any(np.asarray(value) > 1.0):
        raise DomainError(f"{name} = {value} must lie in [0, 1]")


def check_prior(model: SignalModel, prior: Optional[float]) -> float:
    if prior is None:
        return model.prior
    if abs(prior - model.prior) > 1e-12:
        raise DomainError(f"prior {prior} does not match the model prior {model.prior}")
    return model.prior


def frame_model(model: SignalModel, sender: SenderSpec) -> SignalModel:
    """The model as seen by an upward version of `sender`."""
    return model if sender.is_up else model.mirror()


def to_frame(sender: SenderSpec, s):
    """Involution between original beliefs and `sender`'s frame."""
    if sender.is_up:
        return s
    return 1.0 - s


# ── Nondisclosure belief ───────────────────────────────────────────────────


def concealment_likelihoods(model: SignalModel, sender: SenderSpec, s_hat, weight=1.0):
    """(L0, L1) = Pr[m = phi | state] for a sender with threshold s_hat."""
    if sender.is_up:
        q0, q1 = model.conditional_lower(s_hat, weight)
        return (1.0 - sender.p) + sender.p * q0, (1.0 - sender.p) + sender.p * q1
    m0, m1 = model.mirror().conditional_lower(1.0 - np.asarray(s_hat, dtype=float), weight)
    return (1.0 - sender.p) + sender.p * m1, (1.0 - sender.p) + sender.p * m0


def eta(model: SignalModel, s_hat, p: float, interim_prior: Optional[float] = None, weight: float = 1.0):
    """DM posterior after phi from an upward sender with threshold s_hat."""
    s_hat = model.check_support(s_hat)
    mu = model.prior if interim_prior is None else interim_prior
    _check_probability("interim_prior", mu)
    l0, l1 = concealment_likelihoods(model, SenderSpec(p, "up"), s_hat, weight)
    return _scalar_or_array(bayes_update(mu, l0, l1), s_hat)


def eta_downward(model: SignalModel, s_hat, p: float, interim_prior: Optional[float] = None, weight: float = 1.0):
    """DM posterior after phi from a downward sender; evaluated on the mirror."""
    s_hat = model.check_support(s_hat)
    mu = model.prior if interim_prior is None else interim_prior
    _check_probability("interim_prior", mu)
    return _scalar_or_array(1.0 - np.asarray(eta(model.mirror(), 1.0 - s_hat, p, 1.0 - mu, weight)), s_hat)


def nondisclosure_belief(model: SignalModel, sender: SenderSpec, s_hat, interim_prior=None, weight=1.0):
    if sender.is_up:
        return eta(model, s_hat, sender.p, interim_prior, weight)
    return eta_downward(model, s_hat, sender.p, interim_prior, weight)


def eta_fixed_point(model: SignalModel, p: float, prior: Optional[float] = None, tol: float = 1e-12) -> float:
    """Unique s with eta(s) = s, which lies in (lo, prior) for continuous models."""
    mu = model.prior if prior is None else prior
    lo, hi = model.support_lo, model.support_hi

    def gap(s):
        return float(eta(model, s, p, mu)) - s

    if gap(lo) <= 0.0:
        return lo
    return brentq(gap, lo, hi, xtol=tol)


# ── Message laws ───────────────────────────────────────────────────────────


def message_branch(model: SignalModel, sender: SenderSpec, s_hat, weight=1.0,
                   cells=BRANCH_CELLS, nodes=BRANCH_NODES) -> MessageBranch:
    """State-conditional law of a sender's message, in the original orientation."""
    s_hat = float(model.check_support(s_hat))
    if not sender.is_up:
        up = message_branch(model.mirror(), sender.flipped(), 1.0 - s_hat, weight, cells, nodes)
        return up.mirrored()
    values, q0, q1 = model.upper_branch(s_hat, weight, cells, nodes)
    l0, l1 = concealment_likelihoods(model, sender, s_hat, weight)
    return MessageBranch(values, sender.p * q0, sender.p * q1, float(l0), float(l1))


def disclosure_probability(model: SignalModel, sender: SenderSpec, s_hat, weight=1.0, vantage=None) -> float:
    """Ex-ante probability that the sender discloses, seen from `vantage` (default the prior)."""
    mu = model.prior if vantage is None else vantage
    l0, l1 = concealment_likelihoods(model, sender, model.check_support(s_hat), weight)
    return float(1.0 - (mu * l1 + (1.0 - mu) * l0))


def message_distribution(model: SignalModel, sender: SenderSpec, s_hat_j, vantage: float,
                         weight: float = 1.0) -> MessageDistribution:
    _check_probability("vantage", vantage)
    return message_branch(model, sender, s_hat_j, weight).at(vantage)


# ── Concealment payoff ─────────────────────────────────────────────────────


def _vantage_masses(vantage, branch: MessageBranch):
    v = np.asarray(vantage, dtype=float)[:, None]
    a0, a1 = branch.likelihood_columns()
    return v * a1 + (1.0 - v) * a0


def concealment_posteriors(s_i, l0_i, l1_i, eta_i, branch: MessageBranch):
    """DM posteriors when i conceals, over j's messages, with their vantage-s_i masses.

    Rows follow s_i; columns are j's disclosed points then phi.
    """
    disclosed = bayes_update(branch.values[None, :], l0_i[:, None], l1_i[:, None])
    silent = bayes_update(eta_i, branch.conceal_l0, branch.conceal_l1)[:, None]
    return np.hstack([disclosed, silent]), _vantage_masses(s_i, branch)


def disclosure_posteriors(s_i, prior, branch: MessageBranch):
    """DM posteriors when i discloses s_i, over j's messages, with their masses."""
    s_i = np.asarray(s_i, dtype=float)
    disclosed = combine_beliefs(s_i[:, None], branch.values[None, :], prior)
    silent = bayes_update(s_i, branch.conceal_l0, branch.conceal_l1)[:, None]
    return np.hstack([disclosed, silent]), _vantage_masses(s_i, branch)


def _transform_form(s_i, eta_i, branch: MessageBranch):
    a0, a1 = branch.likelihood_columns()
    beta = bayes_update(s_i[:, None], a0[None, :], a1[None, :])
    posts = _transform(beta, eta_i[:, None], s_i[:, None])
    return np.sum(_vantage_masses(s_i, branch) * posts, axis=1)


def _own_likelihoods(frame, p_i, s_hat_i, weight_i):
    q0, q1 = frame.conditional_lower(s_hat_i, weight_i)
    return (1.0 - p_i) + p_i * np.atleast_1d(q0), (1.0 - p_i) + p_i * np.atleast_1d(q1)


def concealment_payoff_curve(frame: SignalModel, s_i, s_hat_i, p_i: float, branch: MessageBranch,
                             weight_i: float = 1.0) -> np.ndarray:
    """Vectorized U in i's frame (i upward), j's branch already expressed in that frame.

    s_i and s_hat_i broadcast against each other; the threshold-type scan passes
    the same array for both.
    """
    s_i, s_hat_i = np.broadcast_arrays(np.atleast_1d(np.asarray(s_i, dtype=float)),
                                       np.atleast_1d(np.asarray(s_hat_i, dtype=float)))
    l0_i, l1_i = _own_likelihoods(frame, p_i, s_hat_i, weight_i)
    eta_i = bayes_update(frame.prior, l0_i, l1_i)
    posts, masses = concealment_posteriors(s_i, l0_i, l1_i, eta_i, branch)
    return np.sum(posts * masses, axis=1)


def concealment_payoff_transform_curve(frame: SignalModel, s_i, s_hat_i, p_i: float, branch: MessageBranch,
                                       weight_i: float = 1.0) -> np.ndarray:
    """U through T: i's own posterior over m_j carried to the DM's interim belief."""
    s_i, s_hat_i = np.broadcast_arrays(np.atleast_1d(np.asarray(s_i, dtype=float)),
                                       np.atleast_1d(np.asarray(s_hat_i, dtype=float)))
    l0_i, l1_i = _own_likelihoods(frame, p_i, s_hat_i, weight_i)
    eta_i = bayes_update(frame.prior, l0_i, l1_i)
    return _transform_form(s_i, eta_i, branch)


def _frame_arguments(model, s_i, s_hat_i, sender_i, s_hat_j, sender_j):
    """Express a two-sender evaluation in i's frame."""
    frame = frame_model(model, sender_i)
    if sender_i.is_up:
        return frame, s_i, s_hat_i, sender_j, s_hat_j
    return frame, 1.0 - s_i, 1.0 - s_hat_i, sender_j.flipped(), 1.0 - s_hat_j


def concealment_payoff_forms(model: SignalModel, s_i, s_hat_i, sender_i: SenderSpec, s_hat_j,
                             sender_j: SenderSpec, prior=None, weight_i=1.0, weight_j=1.0,
                             cells=BRANCH_CELLS, nodes=BRANCH_NODES):
    """(direct, transform) evaluations of U, in the original orientation."""
    check_prior(model, prior)
    for s in (s_i, s_hat_i, s_hat_j):
        model.check_support(s)
    frame, fs_i, fs_hat_i, fsender_j, fs_hat_j = _frame_arguments(model, s_i, s_hat_i, sender_i, s_hat_j, sender_j)
    branch = message_branch(frame, fsender_j, fs_hat_j, weight_j, cells, nodes)
    direct = float(concealment_payoff_curve(frame, fs_i, fs_hat_i, sender_i.p, branch, weight_i)[0])
    via_t = float(concealment_payoff_transform_curve(frame, fs_i, fs_hat_i, sender_i.p, branch, weight_i)[0])
    if not sender_i.is_up:
        direct, via_t = 1.0 - direct, 1.0 - via_t
    return direct, via_t


def concealment_payoff_U(model: SignalModel, s_i, s_hat_i, sender_i: SenderSpec, s_hat_j,
                         sender_j: SenderSpec, prior=None, weight_i=1.0, weight_j=1.0,
                         cells=BRANCH_CELLS, nodes=BRANCH_NODES) -> float:
    """Expected DM posterior for type s_i when he conceals and j plays threshold s_hat_j."""
    direct, via_t = concealment_payoff_forms(model, s_i, s_hat_i, sender_i, s_hat_j, sender_j,
                                             prior, weight_i, weight_j, cells, nodes)
    # T needs an interior private belief; a certain type has only the direct form
    if 0.0 < float(s_i) < 1.0 and abs(direct - via_t) > FORM_AGREEMENT_TOL:
        raise ConvergenceError(
            f"U forms disagree at s_i={s_i}: direct {direct:.12g} vs transform {via_t:.12g}"
        )
    return direct


def expected_posterior_after_disclosure(model: SignalModel, s_i, sender_j: SenderSpec, s_hat_j,
                                        prior=None, weight_j=1.0) -> float:
    """Vantage-s_i mean of the DM posterior when i discloses s_i; equals s_i."""
    prior = check_prior(model, prior)
    branch = message_branch(model, sender_j, s_hat_j, weight_j)
    posts, masses = disclosure_posteriors(np.atleast_1d(float(s_i)), prior, branch)
    return float(np.sum(posts * masses))


# ── Many senders ───────────────────────────────────────────────────────────


def compress_likelihoods(a0, a1, bins: int = RATIO_BINS):
    """Merge message profiles whose likelihood ratios fall in the same log-ratio bin.

    Each bin keeps the summed Pr[profile | state] of its members, so both
    state totals and the mean DM posterior are unchanged. Profiles impossible
    in one state get one column each.
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    both = (a0 > 0.0) & (a1 > 0.0)
    only0 = (a0 > 0.0) & ~both
    only1 = (a1 > 0.0) & ~both
    out0, out1 = [], []
    if np.any(both):
        log_ratio = np.log(a1[both]) - np.log(a0[both])
        lo, hi = log_ratio.min(), log_ratio.max()
        if hi > lo:
            idx = np.minimum(((log_ratio - lo) / (hi - lo) * bins).astype(np.intp), bins - 1)
        else:
            idx = np.zeros(log_ratio.size, dtype=np.intp)
        m0 = np.bincount(idx, weights=a0[both], minlength=bins)
        m1 = np.bincount(idx, weights=a1[both], minlength=bins)
        filled = m0 > 0.0
        logger.debug(f"re-binned {log_ratio.size} message profiles into {int(filled.sum())} ratio columns")
        out0.append(m0[filled])
        out1.append(m1[filled])
    if np.any(only0):
        out0.append(np.array([a0[only0].sum()]))
        out1.append(np.zeros(1))
    if np.any(only1):
        out0.append(np.zeros(1))
        out1.append(np.array([a1[only1].sum()]))
    if not out0:
        return np.empty(0), np.empty(0)
    return np.concatenate(out0), np.concatenate(out1)


def joint_likelihood_columns(columns, cap: Optional[int] = COLUMN_CAP, bins: int = RATIO_BINS):
    """(A0, A1) over every joint profile of per-sender likelihood columns.

    Senders are folded in one at a time. Whenever the next product would pass
    `cap` profiles the accumulated columns are re-binned on the log likelihood
    ratio, so memory stays at bins times one sender's column count however
    many senders there are. cap=None keeps every profile.
    """
    a0, a1 = np.ones(1), np.ones(1)
    for b0, b1 in columns:
        b0 = np.asarray(b0, dtype=float)
        b1 = np.asarray(b1, dtype=float)
        if cap is not None and a0.size * b0.size > cap:
            a0, a1 = compress_likelihoods(a0, a1, bins)
        a0 = np.outer(a0, b0).ravel()
        a1 = np.outer(a1, b1).ravel()
        keep = (a0 > 0.0) | (a1 > 0.0)
        a0, a1 = a0[keep], a1[keep]
    if cap is not None and a0.size > cap:
        a0, a1 = compress_likelihoods(a0, a1, bins)
    return a0, a1


def joint_message_columns(branches: Sequence[MessageBranch], cap: Optional[int] = COLUMN_CAP,
                          bins: int = RATIO_BINS):
    """(A0, A1) over the joint messages of several senders."""
    return joint_likelihood_columns([b.likelihood_columns() for b in branches], cap, bins)


def concealment_payoff_joint(frame: SignalModel, s_i, s_hat_i, p_i: float, joint, weight_i: float = 1.0) -> np.ndarray:
    """U in i's frame against precomputed joint message columns joint = (A0, A1).

    The DM posterior with i silent is pi L1 A1 / (pi L1 A1 + (1 - pi) L0 A0).
    """
    s_i, s_hat_i = np.broadcast_arrays(np.atleast_1d(np.asarray(s_i, dtype=float)),
                                       np.atleast_1d(np.asarray(s_hat_i, dtype=float)))
    l0_i, l1_i = _own_likelihoods(frame, p_i, s_hat_i, weight_i)
    a0, a1 = joint
    out = np.empty(s_i.shape)
    chunk = max(1, PAYOFF_CHUNK_ELEMENTS // max(a0.size, 1))
    for start in range(0, s_i.size, chunk):
        rows = slice(start, start + chunk)
        v = s_i[rows, None]
        posts = bayes_update(frame.prior, l0_i[rows, None] * a0, l1_i[rows, None] * a1)
        out[rows] = np.sum((v * a1 + (1.0 - v) * a0) * posts, axis=1)
    return out


def concealment_payoff_many(frame: SignalModel, s_i, s_hat_i, p_i: float, branches: Sequence[MessageBranch],
                            weight_i: float = 1.0, cap: Optional[int] = COLUMN_CAP) -> np.ndarray:
    """U in i's frame against any number of other senders."""
    return concealment_payoff_joint(frame, s_i, s_hat_i, p_i, joint_message_columns(branches, cap), weight_i)
