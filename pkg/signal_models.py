"""
Two-state signal structures.

A model is described by the prior pi and the unconditional distribution of an
informed sender's private belief s (his posterior on state 1 given only his own
signal). The state-conditional laws are derived, never stored:

    f(s|1) = s * f_pi(s) / pi        f(s|0) = (1 - s) * f_pi(s) / (1 - pi)

Everything downstream only needs the partial moments

    m_k(s) = integral over {t < s} of t**k dF_pi(t),   k = 0, 1, 2

so both the continuous and the discrete model expose `lower_moments`, plus a
quadrature/atom view of the region above a threshold (`upper_branch`).
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize, special, stats
from scipy.interpolate import CubicSpline

from errors import (
    ConfigError,
    ConvergenceError,
    DegenerateCurveError,
    DomainError,
    EmptyEventError,
    InvalidCurveError,
)

logger = logging.getLogger(__name__)

QUAD_CELLS     = 1024
QUAD_ABS_TOL   = 1e-10
MODEL_TOL      = 1e-8
CURVE_TOL      = 1e-5     # mean-vs-prior gap of a target-curve density; see model_from_target_curve
ATOM_TOL       = 1e-12
SUPPORT_SLACK  = 1e-12
BRANCH_CELLS   = 16
BRANCH_NODES   = 16
SAMPLER_POINTS = 4097
CURVE_WINDOW   = 1e-5
SIGN_NOISE     = 1e-9

_GL_LOW_X, _GL_LOW_W   = np.polynomial.legendre.leggauss(10)
_GL_HIGH_X, _GL_HIGH_W = np.polynomial.legendre.leggauss(20)


def _moment_stack(values, x):
    """Stack [f, x f, x^2 f] along a new trailing axis."""
    return np.stack([values, x * values, x * x * values], axis=-1)


def _gauss_legendre(density, a, b, nodes, weights):
    """Integrate the three moment integrands over every [a_k, b_k]."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * nodes
    vals = _moment_stack(density(x), x)
    return np.sum(vals * (weights * half)[..., None], axis=-2)


def _composite_nodes(a, b, cells, nodes):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, cells + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    x = 0.5 * (lo + hi) + half * gx
    w = half * gw
    return x.ravel(), w.ravel()


class SignalModel:
    """Common surface of continuous and discrete signal structures."""

    prior: float
    support_lo: float
    support_hi: float
    name: str
    is_discrete: bool = False

    def lower_moments(self, s, weight=1.0):
        """Partial moments (m0, m1, m2) of the region below s.

        For discrete models an atom sitting exactly at s contributes the share
        (1 - weight), so weight is the disclosure probability of the marginal
        atom. Continuous models ignore weight.
        """
        raise NotImplementedError

    def upper_branch(self, s, weight=1.0, cells=BRANCH_CELLS, nodes=BRANCH_NODES):
        """(values, q0, q1): the region above s as points with state-conditional masses."""
        raise NotImplementedError

    def interval_branch(self, a, b, cells=BRANCH_CELLS, nodes=BRANCH_NODES):
        """(values, q0, q1) over the closed interval [a, b]."""
        raise NotImplementedError

    def mirror(self):
        """Relabelled model (s -> 1 - s); cached, and its own mirror is this model."""
        with self._mirror_lock:
            if self._mirror is None:
                twin = self._build_mirror()
                twin._mirror = self
                self._mirror = twin
            return self._mirror

    def _build_mirror(self):
        raise NotImplementedError

    def sample_signals(self, rng, states):
        raise NotImplementedError

    # ── shared helpers ───────────────────────────────────────────────────

    def check_support(self, s):
        arr = np.asarray(s, dtype=float)
        if np.any(arr < self.support_lo - SUPPORT_SLACK) or np.any(arr > self.support_hi + SUPPORT_SLACK):
            raise DomainError(
                f"belief {s} outside the support [{self.support_lo}, {self.support_hi}] of model '{self.name}'"
            )
        return np.clip(arr, self.support_lo, self.support_hi)

    def conditional_lower(self, s, weight=1.0):
        """State-conditional probabilities (q0, q1) of the region below s."""
        m = self.lower_moments(s, weight)
        q1 = m[..., 1] / self.prior
        q0 = (m[..., 0] - m[..., 1]) / (1.0 - self.prior)
        return np.clip(q0, 0.0, 1.0), np.clip(q1, 0.0, 1.0)

    def total_moments(self):
        return self.lower_moments(self.support_hi, weight=0.0)

    def cdf_at_belief(self, belief, s):
        s = self.check_support(s)
        if not 0.0 <= belief <= 1.0:
            raise DomainError(f"belief {belief} is not a probability")
        q0, q1 = self.conditional_lower(s, weight=0.0)
        return belief * q1 + (1.0 - belief) * q0

    def truncated_mean(self, belief, s, side="below"):
        s = float(self.check_support(s))
        if not 0.0 <= belief <= 1.0:
            raise DomainError(f"belief {belief} is not a probability")
        m = self.lower_moments(s, weight=1.0)
        full = self.total_moments()
        if side == "below":
            region = m
        elif side == "above":
            # atoms at s are excluded from both strict regions
            region = full - self.lower_moments(s, weight=0.0)
        else:
            raise DomainError(f"side must be 'below' or 'above', got {side!r}")
        pi = self.prior
        # mass and first moment under the re-based law f_belief
        mass = belief * region[1] / pi + (1.0 - belief) * (region[0] - region[1]) / (1.0 - pi)
        first = belief * region[2] / pi + (1.0 - belief) * (region[1] - region[2]) / (1.0 - pi)
        if mass <= 0.0:
            raise EmptyEventError(
                f"conditioning event {{t {'<' if side == 'below' else '>'} {s}}} has zero probability"
            )
        return float(first / mass)


# ── Continuous models ──────────────────────────────────────────────────────


class ContinuousSignalModel(SignalModel):
    """Belief density f_pi on [support_lo, support_hi].

    `density` must accept numpy arrays. When `moments` is given it must return
    the exact partial moments with a trailing axis of length 3; otherwise they
    are tabulated once at construction on a `cells`-cell grid with adaptive
    composite Gauss-Legendre quadrature and the density is normalized.
    """

    def __init__(
        self,
        prior: float,
        density: Callable,
        support_lo: float = 0.0,
        support_hi: float = 1.0,
        moments: Optional[Callable] = None,
        *,
        name: str = "continuous",
        tolerance: float = MODEL_TOL,
        cells: int = QUAD_CELLS,
    ):
        if not (0.0 <= support_lo < support_hi <= 1.0):
            raise ConfigError(f"model '{name}': support [{support_lo}, {support_hi}] must satisfy 0 <= lo < hi <= 1")
        if not (0.0 < prior < 1.0):
            raise ConfigError(f"model '{name}': prior {prior} must lie in (0, 1)")
        if not (support_lo < prior < support_hi):
            raise ConfigError(f"model '{name}': prior {prior} must lie inside the support")

        self.prior = float(prior)
        self.support_lo = float(support_lo)
        self.support_hi = float(support_hi)
        self.name = name
        self.tolerance = tolerance
        self._raw_density = density
        self._mirror = None
        self._mirror_lock = threading.Lock()

        if moments is None:
            self._scale = 1.0
            self._grid = np.linspace(self.support_lo, self.support_hi, cells + 1)
            cell_moments = self._tabulate_cells()
            total = cell_moments[:, 0].sum()
            if not np.isfinite(total) or total <= 0.0:
                raise ConfigError(f"model '{name}': belief density does not integrate to a positive mass")
            self._scale = 1.0 / total
            self._cum = np.vstack([np.zeros(3), np.cumsum(cell_moments, axis=0)]) * self._scale
            self._moments = self._tabulated_moments
        else:
            self._scale = 1.0
            self._moments = moments

        full = self.lower_moments(self.support_hi)
        if abs(full[0] - 1.0) > tolerance:
            raise ConfigError(f"model '{name}': total mass {full[0]:.12g} differs from 1")
        if abs(full[1] - self.prior) > tolerance:
            raise ConfigError(
                f"model '{name}': mean belief {full[1]:.12g} differs from the prior {self.prior} "
                f"(martingale consistency)"
            )
        self._sampler = self._build_sampler()

    def __repr__(self):
        return f"ContinuousSignalModel(name={self.name!r}, prior={self.prior}, support=[{self.support_lo}, {self.support_hi}])"

    # quadrature table

    def _tabulate_cells(self):
        a, b = self._grid[:-1], self._grid[1:]
        coarse = _gauss_legendre(self._raw_density, a, b, _GL_LOW_X, _GL_LOW_W)
        fine = _gauss_legendre(self._raw_density, a, b, _GL_HIGH_X, _GL_HIGH_W)
        bad = np.flatnonzero(np.max(np.abs(fine - coarse), axis=1) > QUAD_ABS_TOL)
        for k in bad:
            for order in range(3):
                fine[k, order], _ = integrate.quad(
                    lambda t, order=order: float(self._raw_density(np.float64(t))) * t ** order,
                    a[k], b[k], epsabs=QUAD_ABS_TOL, limit=200,
                )
        if bad.size:
            logger.debug(f"model '{self.name}': {bad.size} quadrature cells refined adaptively")
        return fine

    def _tabulated_moments(self, s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        cells = len(self._grid) - 1
        idx = np.clip(np.searchsorted(self._grid, flat, side="right") - 1, 0, cells - 1)
        start = self._grid[idx]
        partial = _gauss_legendre(self.density, start, flat, _GL_HIGH_X, _GL_HIGH_W)
        return (self._cum[idx] + partial).reshape(s.shape + (3,))

    # public surface

    def density(self, s):
        return self._raw_density(np.asarray(s, dtype=float)) * self._scale

    def lower_moments(self, s, weight=1.0):
        s = np.clip(np.asarray(s, dtype=float), self.support_lo, self.support_hi)
        return np.asarray(self._moments(s), dtype=float)

    def upper_branch(self, s, weight=1.0, cells=BRANCH_CELLS, nodes=BRANCH_NODES):
        return self.interval_branch(s, self.support_hi, cells, nodes)

    def interval_branch(self, a, b, cells=BRANCH_CELLS, nodes=BRANCH_NODES):
        a = float(np.clip(a, self.support_lo, self.support_hi))
        b = float(np.clip(b, self.support_lo, self.support_hi))
        pi = self.prior
        if b <= a:
            return np.empty(0), np.empty(0), np.empty(0)
        x, w = _composite_nodes(a, b, cells, nodes)
        mass = self.density(x) * w
        q1 = x * mass / pi
        q0 = (1.0 - x) * mass / (1.0 - pi)
        # pin the branch totals to the exact partial moments
        part = self.lower_moments(b) - self.lower_moments(a)
        exact_q1 = part[1] / pi
        exact_q0 = (part[0] - part[1]) / (1.0 - pi)
        if q1.sum() > 0.0:
            q1 *= exact_q1 / q1.sum()
        if q0.sum() > 0.0:
            q0 *= exact_q0 / q0.sum()
        return x, q0, q1

    def _build_mirror(self):
        full = self.total_moments()
        lo, hi = self.support_lo, self.support_hi

        def density(s):
            return self.density(1.0 - np.asarray(s, dtype=float))

        def moments(s):
            u = 1.0 - np.asarray(s, dtype=float)
            above = full - self.lower_moments(u)
            m0 = above[..., 0]
            m1 = above[..., 0] - above[..., 1]
            m2 = above[..., 0] - 2.0 * above[..., 1] + above[..., 2]
            return np.stack([m0, m1, m2], axis=-1)

        return ContinuousSignalModel(
            1.0 - self.prior, density, 1.0 - hi, 1.0 - lo, moments,
            name=f"mirror({self.name})", tolerance=max(self.tolerance, MODEL_TOL),
        )

    def _build_sampler(self):
        grid = np.linspace(self.support_lo, self.support_hi, SAMPLER_POINTS)
        q0, q1 = self.conditional_lower(grid, weight=0.0)
        return grid, np.maximum.accumulate(q0), np.maximum.accumulate(q1)

    def sample_signals(self, rng, states):
        grid, q0, q1 = self._sampler
        states = np.asarray(states)
        u = rng.random(states.shape)
        return np.where(states == 1, np.interp(u, q1, grid), np.interp(u, q0, grid))


# ── Discrete models ────────────────────────────────────────────────────────


class DiscreteSignalModel(SignalModel):
    """Finite signal table: rows of (signal value, Pr[signal | 0], Pr[signal | 1])."""

    is_discrete = True

    def __init__(self, prior, values, prob_given_0, prob_given_1, *, name="discrete", tolerance=1e-9):
        values = np.asarray(values, dtype=float)
        p0 = np.asarray(prob_given_0, dtype=float)
        p1 = np.asarray(prob_given_1, dtype=float)
        if not (0.0 < prior < 1.0):
            raise ConfigError(f"model '{name}': prior {prior} must lie in (0, 1)")
        if not (values.ndim == 1 and values.shape == p0.shape == p1.shape and values.size >= 2):
            raise ConfigError(f"model '{name}': table needs at least two rows of (signal, p0, p1)")
        for k, (v, a, b) in enumerate(zip(values, p0, p1)):
            if not (0.0 <= v <= 1.0):
                raise ConfigError(f"model '{name}' row {k}: signal value {v} is not a belief in [0, 1]")
            if a < 0.0 or b < 0.0:
                raise ConfigError(f"model '{name}' row {k}: negative probability ({a}, {b})")
            if k and v <= values[k - 1]:
                raise ConfigError(f"model '{name}' row {k}: signal values must be strictly increasing")
            mass = prior * b + (1.0 - prior) * a
            if mass <= 0.0:
                if v not in (0.0, 1.0):
                    raise ConfigError(f"model '{name}' row {k}: zero-probability atom at interior belief {v}")
                continue
            implied = prior * b / mass
            if abs(implied - v) > tolerance:
                raise ConfigError(
                    f"model '{name}' row {k}: signal value {v} is inconsistent with its likelihoods "
                    f"(posterior {implied:.10g} at prior {prior})"
                )
        if abs(p0.sum() - 1.0) > tolerance:
            raise ConfigError(f"model '{name}': column Pr[signal | 0] sums to {p0.sum():.12g}, not 1")
        if abs(p1.sum() - 1.0) > tolerance:
            raise ConfigError(f"model '{name}': column Pr[signal | 1] sums to {p1.sum():.12g}, not 1")

        self.prior = float(prior)
        self.values = values
        self.prob_given_0 = p0
        self.prob_given_1 = p1
        self.mass = self.prior * p1 + (1.0 - self.prior) * p0
        self.support_lo = float(values[0])
        self.support_hi = float(values[-1])
        self.name = name
        self._mirror = None
        self._mirror_lock = threading.Lock()

    def __repr__(self):
        rows = ", ".join(f"({v:g}, {a:g}, {b:g})" for v, a, b in zip(self.values, self.prob_given_0, self.prob_given_1))
        return f"DiscreteSignalModel(name={self.name!r}, prior={self.prior}, rows=[{rows}])"

    def atom_index(self, s):
        """Index of the atom at s, or None."""
        hit = np.flatnonzero(np.abs(self.values - s) <= ATOM_TOL)
        return int(hit[0]) if hit.size else None

    def lower_moments(self, s, weight=1.0):
        s = np.asarray(s, dtype=float)
        v = self.values
        below = (v < s[..., None] - ATOM_TOL).astype(float)
        at = (np.abs(v - s[..., None]) <= ATOM_TOL).astype(float)
        share = below + (1.0 - weight) * at
        powers = np.stack([np.ones_like(v), v, v * v], axis=-1) * self.mass[:, None]
        return share @ powers

    def upper_branch(self, s, weight=1.0, cells=BRANCH_CELLS, nodes=BRANCH_NODES):
        v = self.values
        share = (v > s + ATOM_TOL).astype(float) + weight * (np.abs(v - s) <= ATOM_TOL)
        keep = share > 0.0
        return v[keep], (self.prob_given_0 * share)[keep], (self.prob_given_1 * share)[keep]

    def interval_branch(self, a, b, cells=BRANCH_CELLS, nodes=BRANCH_NODES):
        v = self.values
        keep = (v >= a - ATOM_TOL) & (v <= b + ATOM_TOL)
        return v[keep], self.prob_given_0[keep], self.prob_given_1[keep]

    def _build_mirror(self):
        return DiscreteSignalModel(
            1.0 - self.prior,
            (1.0 - self.values)[::-1],
            self.prob_given_1[::-1],
            self.prob_given_0[::-1],
            name=f"mirror({self.name})",
        )

    def sample_signals(self, rng, states):
        states = np.asarray(states)
        idx0 = rng.choice(self.values.size, size=states.shape, p=self.prob_given_0)
        idx1 = rng.choice(self.values.size, size=states.shape, p=self.prob_given_1)
        return self.values[np.where(states == 1, idx1, idx0)]


# ── Module-level operations ───────────────────────────────────────────────


def cdf_at_belief(model: SignalModel, belief: float, s: float) -> float:
    return float(model.cdf_at_belief(belief, s))


def truncated_mean(model: SignalModel, belief: float, s: float, side: str = "below") -> float:
    return model.truncated_mean(belief, s, side)


def mirror(model: SignalModel) -> SignalModel:
    """Relabel states: s -> 1 - s, prior -> 1 - prior. An involution."""
    return model.mirror()


# ── Model families ─────────────────────────────────────────────────────────


def uniform_model(support_lo=0.0, support_hi=1.0):
    """Uniform belief density; the prior is the midpoint of the support."""
    width = support_hi - support_lo
    prior = 0.5 * (support_lo + support_hi)

    def density(s):
        return np.ones_like(np.asarray(s, dtype=float)) / width

    def moments(s):
        t = np.asarray(s, dtype=float) - support_lo
        lo = support_lo
        m0 = t / width
        m1 = (lo * t + 0.5 * t * t) / width
        m2 = (lo * lo * t + lo * t * t + t ** 3 / 3.0) / width
        return np.stack([m0, m1, m2], axis=-1)

    return ContinuousSignalModel(prior, density, support_lo, support_hi, moments,
                                 name=f"uniform[{support_lo:g},{support_hi:g}]")


def beta_precision_model(rho: float) -> ContinuousSignalModel:
    """Symmetric Beta belief model f ~ [s(1-s)]^(1/rho - 1) at prior 1/2."""
    if not rho > 0.0:
        raise DomainError(f"precision rho must be positive, got {rho}")
    a = 1.0 / rho
    dist = stats.beta(a, a)
    second = (a + 1.0) / (2.0 * (2.0 * a + 1.0))

    def moments(s):
        s = np.asarray(s, dtype=float)
        return np.stack([
            special.betainc(a, a, s),
            0.5 * special.betainc(a + 1.0, a, s),
            second * special.betainc(a + 2.0, a, s),
        ], axis=-1)

    return ContinuousSignalModel(0.5, dist.pdf, 0.0, 1.0, moments, name=f"beta(rho={rho:g})")


def normal_precision_model(rho: float, prior: float = 0.5) -> ContinuousSignalModel:
    """Beliefs induced by a primitive signal y = omega + eps, eps ~ N(0, 1/rho)."""
    if not rho > 0.0:
        raise DomainError(f"precision rho must be positive, got {rho}")
    root = np.sqrt(rho)
    base = special.logit(prior)

    def density(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            y = 0.5 + (special.logit(s) - base) / rho
            f_y = root * (prior * stats.norm.pdf((y - 1.0) * root) + (1.0 - prior) * stats.norm.pdf(y * root))
            f_s = f_y / (rho * s * (1.0 - s))
        return np.where(np.isfinite(f_s), f_s, 0.0)

    return ContinuousSignalModel(prior, density, 0.0, 1.0, name=f"normal(rho={rho:g})")


def four_signal_model(gamma: float, delta: float, prior: float = 0.5) -> DiscreteSignalModel:
    """Symmetric four-signal table with beliefs (0, 1 - gamma, gamma, 1).

    With probability delta the signal is noisy (1 - gamma or gamma); otherwise
    it reveals the state.
    """
    if not (0.5 < gamma < 1.0 and 0.0 < delta < 1.0):
        raise ConfigError(f"four-signal model needs 1/2 < gamma < 1 and 0 < delta < 1, got ({gamma}, {delta})")
    if prior != 0.5:
        raise ConfigError("four-signal model beliefs (0, 1 - gamma, gamma, 1) assume prior 1/2")
    values = [0.0, 1.0 - gamma, gamma, 1.0]
    p0 = [1.0 - delta, gamma * delta, (1.0 - gamma) * delta, 0.0]
    p1 = [0.0, (1.0 - gamma) * delta, gamma * delta, 1.0 - delta]
    return DiscreteSignalModel(prior, values, p0, p1, name=f"four_signal(gamma={gamma:g}, delta={delta:g})")


@dataclass
class PrecisionFamily:
    """rho -> ContinuousSignalModel, with rotation around the prior as rho grows."""

    kind: str
    build: Callable[[float], ContinuousSignalModel]
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def model(self, rho: float) -> ContinuousSignalModel:
        with self._lock:
            if rho not in self._cache:
                self._cache[rho] = self.build(rho)
            return self._cache[rho]

    def rotation_holds(self, rho_a: float, rho_b: float, points: int = 100) -> bool:
        """sign[F^b(s) - F^a(s)] = sign[pi - s] at interior grid points, for rho_b > rho_a."""
        low, high = sorted((rho_a, rho_b))
        ma, mb = self.model(low), self.model(high)
        grid = np.linspace(ma.support_lo, ma.support_hi, points + 2)[1:-1]
        diff = mb.lower_moments(grid)[:, 0] - ma.lower_moments(grid)[:, 0]
        expected = np.sign(ma.prior - grid)
        checked = (np.abs(diff) > 1e-12) & (np.abs(grid - ma.prior) > 1e-9)
        return bool(np.all(np.sign(diff[checked]) == expected[checked]))


def beta_precision_family() -> PrecisionFamily:
    return PrecisionFamily("beta", beta_precision_model)


def normal_precision_family(prior: float = 0.5) -> PrecisionFamily:
    return PrecisionFamily("normal", lambda rho: normal_precision_model(rho, prior))


def _eta_at_prior(model, s_hat, p):
    m = model.lower_moments(s_hat)
    return ((1.0 - p) * model.prior + p * m[..., 1]) / (1.0 - p + p * m[..., 0])


def _richardson(fn, x, h, rounds=8, tol=1e-10):
    """Central difference of fn at x with step halving and Richardson extrapolation."""
    previous = None
    estimate = np.nan
    for _ in range(rounds):
        d_h = (fn(x + h) - fn(x - h)) / (2.0 * h)
        d_half = (fn(x + h / 2) - fn(x - h / 2)) / h
        estimate = d_half + (d_half - d_h) / 3.0
        if previous is not None and abs(estimate - previous) <= tol * max(1.0, abs(estimate)):
            return estimate
        previous = estimate
        h /= 2.0
    return estimate


def precision_eta_derivative(family: PrecisionFamily, s_hat: float, p: float, rho: float) -> float:
    """d eta / d rho by adaptive central differences in rho."""
    base = family.model(rho)
    s_hat = float(base.check_support(s_hat))
    if s_hat <= base.support_lo or s_hat >= base.support_hi:
        return 0.0
    step = 1e-3 * max(1.0, abs(rho))
    step = min(step, 0.5 * rho)
    try:
        value = _richardson(lambda r: float(_eta_at_prior(family.model(r), s_hat, p)), rho, step)
    except (DomainError, ConfigError) as e:
        raise DomainError(f"precision family '{family.kind}' is not differentiable at rho={rho}: {e}") from e
    if not np.isfinite(value):
        raise ConvergenceError(f"precision derivative is not finite at rho={rho}, s_hat={s_hat}")
    closed = precision_eta_derivative_quadrature(family, s_hat, p, rho)
    if np.sign(closed) != np.sign(value) and min(abs(value), abs(closed)) > SIGN_NOISE:
        raise ConvergenceError(
            f"precision derivative sign mismatch at rho={rho}, s_hat={s_hat}: "
            f"difference quotient {value:.3e} vs quadrature form {closed:.3e}"
        )
    return float(value)


def precision_eta_derivative_quadrature(family: PrecisionFamily, s_hat: float, p: float, rho: float) -> float:
    """The same derivative from p/(1-p+pF) * [(s - eta) dF/drho(s) - int_lo^s dF/drho]."""
    model = family.model(rho)
    if s_hat <= model.support_lo or s_hat >= model.support_hi:
        return 0.0
    step = min(1e-3 * max(1.0, abs(rho)), 0.5 * rho)

    def dF(t):
        return _richardson(lambda r: float(family.model(r).lower_moments(t)[0]), rho, step, rounds=4)

    cdf = float(model.lower_moments(s_hat)[0])
    eta = float(_eta_at_prior(model, s_hat, p))
    integral, _ = integrate.quad(dF, model.support_lo, s_hat, epsabs=1e-10, limit=100)
    return p / (1.0 - p + p * cdf) * ((s_hat - eta) * dF(s_hat) - integral)


# ── Models from a target nondisclosure curve ───────────────────────────────


@dataclass(frozen=True)
class CurveRate:
    """d log H / ds = psi'(s) / (s - psi(s)), bridged linearly across the fixed point."""

    psi: Callable
    psi_prime: Callable
    fixed_point: float
    window: float = CURVE_WINDOW

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        lo_edge = self.fixed_point - self.window
        hi_edge = self.fixed_point + self.window
        left, right = self._raw(lo_edge), self._raw(hi_edge)
        inside = np.abs(s - self.fixed_point) < self.window
        frac = (s - lo_edge) / (2.0 * self.window)
        bridged = left + frac * (right - left)
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = self._raw(np.where(inside, lo_edge, s))
        return np.where(inside, bridged, raw)

    def _raw(self, s):
        return self.psi_prime(s) / (s - self.psi(s))


def model_from_target_curve(psi, psi_prime, support_lo=0.0, support_hi=1.0, grid=512):
    """Build (prior, p, model) whose nondisclosure belief reproduces psi.

    Solves H' = psi' H / (s - psi) with H(lo) = 1 by an adaptive Runge-Kutta
    integrator, then p = 1 - 1/H(hi) and f_pi = (1 - p) H' / p.

    The tabulated density is renormalized, so its mass is one to rounding.
    Its mean only matches the prior to CURVE_TOL: the integrator's relative
    tolerance and the linear bridge over the fixed-point window both enter
    it, and the model is checked at that looser level.
    """
    prior = float(psi(support_lo))
    if not 0.0 < prior < 1.0:
        raise InvalidCurveError(f"psi(lo) = {prior} is not an interior prior")
    if abs(float(psi(support_hi)) - prior) > 1e-8:
        raise InvalidCurveError(f"psi(lo) = {prior} but psi(hi) = {float(psi(support_hi))}; both ends must equal the prior")

    s = np.linspace(support_lo, support_hi, grid)
    slope = np.asarray(psi_prime(s), dtype=float)
    if np.max(np.abs(slope)) < 1e-12:
        raise DegenerateCurveError("psi is constant, which only an uninformed sender (p = 0) produces")
    gap = s - np.asarray(psi(s), dtype=float)
    checked = (np.abs(gap) > 1e-9) & (np.abs(slope) > 1e-12)
    if np.any(np.sign(gap[checked]) != np.sign(slope[checked])):
        bad = s[checked][np.sign(gap[checked]) != np.sign(slope[checked])][0]
        raise InvalidCurveError(f"sign[s - psi(s)] != sign[psi'(s)] at s = {bad:.6g}")

    fixed_point = optimize.brentq(lambda t: t - float(psi(t)), support_lo, support_hi, xtol=1e-14)
    rate = CurveRate(psi, psi_prime, fixed_point)
    window = rate.window
    left_end, right_start = fixed_point - window, fixed_point + window

    def rhs(t, y):
        return [float(rate(t))]

    left = integrate.solve_ivp(rhs, (support_lo, left_end), [0.0], method="RK45",
                               rtol=1e-9, atol=1e-12, dense_output=True)
    bridge = 0.5 * (float(rate(left_end)) + float(rate(right_start))) * 2.0 * window
    start = float(left.y[0, -1]) + bridge
    right = integrate.solve_ivp(rhs, (right_start, support_hi), [start], method="RK45",
                                rtol=1e-9, atol=1e-12, dense_output=True)
    if not (left.success and right.success):
        raise InvalidCurveError(f"curve ODE integration failed: {left.message or right.message}")

    log_h_hi = float(right.y[0, -1])
    p = 1.0 - np.exp(-log_h_hi)
    if p <= 1e-12:
        raise DegenerateCurveError("H(hi) = 1 gives p = 0")

    def log_h(t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        lm = t <= left_end
        rm = t >= right_start
        mid = ~(lm | rm)
        out[lm] = left.sol(t[lm])[0] if lm.any() else out[lm]
        out[rm] = right.sol(t[rm])[0] if rm.any() else out[rm]
        if mid.any():
            frac = (t[mid] - left_end) / (2.0 * window)
            out[mid] = float(left.y[0, -1]) + frac * bridge
        return out

    def density(t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        val = (1.0 - p) / p * np.exp(log_h(flat)) * rate(flat)
        return np.maximum(val, 0.0).reshape(t.shape)

    model = ContinuousSignalModel(prior, density, support_lo, support_hi,
                                  name="target_curve", tolerance=CURVE_TOL)
    mean_gap = abs(float(model.lower_moments(support_hi)[1]) - prior)
    logger.info(f"curve model: prior={prior:.6g}, p={p:.6g}, fixed point={fixed_point:.6g}, mean gap={mean_gap:.2e}")
    return prior, float(p), model


def model_from_curve_samples(s_values, psi_values):
    """Spline a sampled target curve and hand it to model_from_target_curve."""
    s_values = np.asarray(s_values, dtype=float)
    psi_values = np.asarray(psi_values, dtype=float)
    if s_values.ndim != 1 or s_values.size < 4 or s_values.shape != psi_values.shape:
        raise ConfigError("curve samples need at least four (s, psi) rows")
    if np.any(np.diff(s_values) <= 0.0):
        raise ConfigError("curve sample abscissae must be strictly increasing")
    spline = CubicSpline(s_values, psi_values)
    return model_from_target_curve(spline, spline.derivative(), float(s_values[0]), float(s_values[-1]))
