"""
Single-sender benchmark: every equilibrium threshold, extremal selection,
sender welfare, (p, c) sweeps and the uncertain-bias variant.

Downward senders are solved on the mirrored model and mapped back.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import optimize

from belief_core import (
    SenderSpec,
    ThresholdProfile,
    check_prior,
    disclosure_probability,
    eta,
    frame_model,
    to_frame,
)
from config import SolverOptions
from errors import BoundaryNotSupportedError, ConfigError, ConvergenceError, DomainError, MonotonicityError
from signal_models import SignalModel
from welfare_sim import dm_welfare_quadratic, posterior_distribution

logger = logging.getLogger(__name__)

TANGENT_TOL = 1e-9
END_GUARD   = 1e-9


@dataclass(frozen=True)
class SingleEquilibrium:
    threshold: float
    kind: str                      # interior | boundary_lo | boundary_hi
    nondisclosure_belief: float
    sender_welfare: float
    dm_welfare: float
    tangent: bool = False
    marginal_weight: float = 1.0


@dataclass(frozen=True)
class UncertainBiasEquilibrium:
    s_u: float
    s_d: float
    nondisclosure_belief: float


@dataclass
class SweepResult:
    table: pd.DataFrame
    violations: List[str] = field(default_factory=list)


# ── Root scanning ──────────────────────────────────────────────────────────


def scan_roots(grid, values, fn, xtol=1e-10, tangent_tol=TANGENT_TOL):
    """Roots of fn on [grid[0], grid[-1]] from a sampled sign pattern.

    Each sign change is refined by Brent's method. A grid point where |fn| has
    a local minimum without a sign change is polished with a bounded scalar
    minimization and kept as a tangent root when it reaches tangent_tol.
    Returns (roots, tangent_flags), sorted.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    found = []
    for k in range(grid.size - 1):
        a, b = values[k], values[k + 1]
        if a == 0.0:
            found.append((grid[k], False))
        elif a * b < 0.0:
            found.append((optimize.brentq(fn, grid[k], grid[k + 1], xtol=xtol), False))
    if values[-1] == 0.0:
        found.append((grid[-1], False))

    mag = np.abs(values)
    for k in range(1, grid.size - 1):
        if values[k - 1] * values[k + 1] <= 0.0 or values[k] * values[k - 1] <= 0.0:
            continue
        if mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1]:
            sign = np.sign(values[k])
            res = optimize.minimize_scalar(lambda x: sign * fn(x), bounds=(grid[k - 1], grid[k + 1]),
                                           method="bounded", options={"xatol": 1e-13})
            if abs(fn(res.x)) <= tangent_tol:
                logger.warning(f"tangent root at {res.x:.10f} (|g| = {abs(fn(res.x)):.2e})")
                found.append((float(res.x), True))
    found.sort()
    return [r for r, _ in found], [t for _, t in found]


# ── Solving ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FramePoint:
    """A threshold rule in an upward frame; weight is the disclosure share of the atom at x."""

    x: float
    kind: str
    tangent: bool = False
    weight: float = 1.0


def eta_excess(frame, p, c, interim_prior=None):
    """Concealment minus disclosure payoff for a lone upward sender."""
    def excess(x, s, w=1.0):
        conceal = np.asarray(eta(frame, x, p, interim_prior, w), dtype=float)
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(conceal, np.broadcast_shapes(conceal.shape, s.shape)) - s + c
    return excess


def rule_violations(gaps, ks, ws):
    """Best-response violation of each rule (k, w), rows of gaps holding every atom's disclose-minus-conceal gap."""
    gaps = np.atleast_2d(np.asarray(gaps, dtype=float))
    ks = np.atleast_1d(np.asarray(ks, dtype=int))
    ws = np.atleast_1d(np.asarray(ws, dtype=float))
    idx = np.arange(gaps.shape[1])[None, :]
    rows = ks[:, None]
    low = np.where(idx < rows, np.maximum(gaps, 0.0), 0.0).max(axis=1)
    high = np.where(idx > rows, np.maximum(-gaps, 0.0), 0.0).max(axis=1)
    at = gaps[np.arange(ks.size), ks]
    own = np.where(ws >= 1.0, np.maximum(-at, 0.0), np.where(ws <= 0.0, np.maximum(at, 0.0), np.abs(at)))
    return np.maximum(np.maximum(low, high), own)


def rule_violation(gaps, k, w):
    return float(rule_violations(gaps, [k], [w])[0])


def rule_residual(frame, excess, x, w=1.0):
    """Equilibrium-condition residual of threshold x (weight w) for an upward sender."""
    if frame.is_discrete:
        k = frame.atom_index(x)
        if k is None:
            raise DomainError(f"{x} is not a signal value of model '{frame.name}'")
        return rule_violation(-np.asarray(excess(frame.values[k], frame.values, w), dtype=float), k, w)
    e = float(np.ravel(excess(x, x, w))[0])
    if x <= frame.support_lo + END_GUARD:
        return max(e, 0.0)
    if x >= frame.support_hi - END_GUARD:
        return max(-e, 0.0)
    return abs(e)


def discrete_strategies(model, weight_grid):
    """Monotone disclosure rules as (atom index, marginal weight), without duplicates.

    (k, 0) discloses the same set as (k + 1, 1), so weight 0 is only used to
    express "conceal everything" at the top atom.
    """
    weights = np.linspace(0.0, 1.0, weight_grid)[1:]
    rules = [(k, float(w)) for k in range(model.values.size) for w in weights]
    rules.append((model.values.size - 1, 0.0))
    return rules


def frame_position(frame, x, weight=1.0):
    """Place of a rule in the disclosure order; larger means less disclosure."""
    if not frame.is_discrete:
        return float(x)
    return int(np.argmin(np.abs(frame.values - x))) + (1.0 - weight)


def _continuous_solutions(frame, excess, options, grid_size):
    lo, hi = frame.support_lo, frame.support_hi
    grid = np.linspace(lo, hi, grid_size)
    values = np.asarray(excess(grid, grid), dtype=float)

    def fn(x):
        return float(np.ravel(excess(x, x))[0])

    out = []
    if values[0] <= options.boundary_slack:
        out.append(FramePoint(lo, "boundary_lo"))
    roots, tangents = scan_roots(grid, values, fn, options.root_tol)
    for r, tangent in zip(roots, tangents):
        if lo + END_GUARD < r < hi - END_GUARD:
            out.append(FramePoint(float(r), "interior", tangent))
    if values[-1] >= -options.boundary_slack:
        out.append(FramePoint(hi, "boundary_hi"))
    return out


def _discrete_solutions(frame, excess, options):
    values = frame.values
    last = values.size - 1
    tol = options.certify_tol
    weights = np.linspace(0.0, 1.0, options.weight_grid)

    def gaps(k, w):
        return -np.asarray(excess(values[k], values, w), dtype=float)

    out = []
    for k in range(values.size):
        if rule_violation(gaps(k, 1.0), k, 1.0) <= tol:
            out.append(FramePoint(float(values[k]), "boundary_lo" if k == 0 else "interior"))
        # mixing at atom k: its own gap must vanish
        at = np.array([gaps(k, w)[k] for w in weights])
        roots, tangents = scan_roots(weights, at, lambda w: float(gaps(k, w)[k]), options.root_tol)
        for w, tangent in zip(roots, tangents):
            if END_GUARD < w < 1.0 - END_GUARD and rule_violation(gaps(k, w), k, w) <= tol:
                out.append(FramePoint(float(values[k]), "interior", tangent, float(w)))
    if rule_violation(gaps(last, 0.0), last, 0.0) <= tol:
        out.append(FramePoint(float(values[last]), "boundary_hi", weight=0.0))
    return out


def threshold_solutions(frame, excess, options, grid_size=None) -> List[FramePoint]:
    """Every self-confirming threshold rule of an upward sender, in disclosure order.

    excess(x, s, w) is the payoff of concealing minus that of disclosing for
    signals s when the DM conjectures threshold x with marginal weight w. A
    continuous threshold x solves excess(x, x) = 0, or sits at lo with
    excess <= 0 or at hi with excess >= 0.
    """
    if frame.is_discrete:
        points = _discrete_solutions(frame, excess, options)
    else:
        points = _continuous_solutions(frame, excess, options, grid_size or options.scan_grid)
    points.sort(key=lambda pt: frame_position(frame, pt.x, pt.weight))
    return points


def solve_single(model: SignalModel, sender: SenderSpec, c: float, options: Optional[SolverOptions] = None,
                 prior=None) -> List[SingleEquilibrium]:
    """Every equilibrium of the single-sender game, sorted by threshold."""
    options = options or SolverOptions()
    prior = check_prior(model, prior)
    if sender.p >= 1.0 and c <= 0.0:
        raise ConfigError("p = 1 without a disclosure cost unravels to full disclosure; use p < 1 or c > 0")
    frame = frame_model(model, sender)
    up = SenderSpec(sender.p, "up")
    points = threshold_solutions(frame, eta_excess(frame, sender.p, c), options)
    if not points:
        raise ConvergenceError(f"no equilibrium threshold located for p={sender.p}, c={c}")

    flip = {"boundary_lo": "boundary_hi", "boundary_hi": "boundary_lo", "interior": "interior"}
    result = []
    for pt in points:
        x, kind, tangent, w = pt.x, pt.kind, pt.tangent, pt.weight
        eta_x = float(eta(frame, x, sender.p, weight=w))
        own_welfare = frame.prior - disclosure_probability(frame, up, x, w) * c
        threshold = x if sender.is_up else 1.0 - x
        dist = posterior_distribution(model, prior, ThresholdProfile((threshold,), (w,)), [sender])
        result.append(SingleEquilibrium(
            threshold=threshold,
            kind=kind if sender.is_up else flip[kind],
            nondisclosure_belief=eta_x if sender.is_up else 1.0 - eta_x,
            sender_welfare=own_welfare,
            dm_welfare=dm_welfare_quadratic(dist),
            tangent=tangent,
            marginal_weight=w,
        ))
    result.sort(key=lambda e: (e.threshold, -e.marginal_weight if sender.is_up else e.marginal_weight))
    if c <= 0.0 and len(result) > 1 and not frame.is_discrete:
        logger.warning(f"{len(result)} equilibria found with c = {c} <= 0 where uniqueness holds")
    logger.debug(f"solve_single(p={sender.p}, bias={sender.bias}, c={c}): {len(result)} equilibria")
    return result


def extremal_single(model: SignalModel, sender: SenderSpec, c: float, options: Optional[SolverOptions] = None,
                    prior=None):
    """(lowest, highest) threshold equilibria; identical when unique."""
    sols = solve_single(model, sender, c, options, prior)
    return sols[0], sols[-1]


def sender_welfare(model: SignalModel, threshold: float, sender: SenderSpec, c: float, weight: float = 1.0) -> float:
    """Ex-ante payoff in the sender's own orientation: prior - Pr[disclose] * c."""
    own_prior = model.prior if sender.is_up else 1.0 - model.prior
    return own_prior - disclosure_probability(model, sender, threshold, weight) * c


# ── Sweeps ─────────────────────────────────────────────────────────────────


def _order_key(model, sender, eq: SingleEquilibrium):
    return frame_position(frame_model(model, sender), to_frame(sender, eq.threshold), eq.marginal_weight)


def direction_violations(keys, tangent, labels, increasing, noise, what):
    found = []
    for k in range(1, len(keys)):
        if tangent[k] or tangent[k - 1]:
            continue
        step = keys[k] - keys[k - 1]
        if (increasing and step < -noise) or (not increasing and step > noise):
            found.append(f"{what} between {labels[k - 1]} and {labels[k]}: change {step:+.3e}")
    return found


def sweep_single(model: SignalModel, sender: SenderSpec, p_values: Sequence[float], c_values: Sequence[float],
                 options: Optional[SolverOptions] = None, threads: Optional[int] = None,
                 strict: bool = False) -> SweepResult:
    """Extremal thresholds over a (p, c) grid with the comparative-statics checks.

    Thresholds (in the sender's orientation) must weakly fall in p and weakly
    rise in c; changes against the direction beyond monotone_noise are reported,
    and raise MonotonicityError when strict.
    """
    options = options or SolverOptions()
    cells = [(float(p), float(c)) for p in p_values for c in c_values]

    def solve_cell(cell):
        p, c = cell
        spec = SenderSpec(p, sender.bias)
        return spec, solve_single(model, spec, c, options)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        solved = list(pool.map(solve_cell, cells))

    rows, keys = [], {}
    for (p, c), (spec, sols) in zip(cells, solved):
        lowest, highest = sols[0], sols[-1]
        rows.append({
            "p": p, "c": c,
            "lowest_threshold": lowest.threshold, "highest_threshold": highest.threshold,
            "lowest_eta": lowest.nondisclosure_belief, "highest_eta": highest.nondisclosure_belief,
            "dm_welfare_best": max(e.dm_welfare for e in sols),
            "sender_welfare_best": max(e.sender_welfare for e in sols),
            "n_equilibria": len(sols),
        })
        keys[(p, c)] = (
            _order_key(model, spec, sols[0]), _order_key(model, spec, sols[-1]),
            sols[0].tangent or sols[-1].tangent,
        )
    table = pd.DataFrame(rows)

    violations = []
    p_sorted, c_sorted = sorted(set(float(p) for p in p_values)), sorted(set(float(c) for c in c_values))
    for which, idx in (("lowest", 0), ("highest", 1)):
        for c in c_sorted:
            column = [keys[(p, c)] for p in p_sorted]
            violations += direction_violations([k[idx] for k in column], [k[2] for k in column],
                                           [f"p={p:g}" for p in p_sorted], False, options.monotone_noise,
                                           f"{which} threshold rises in p at c={c:g}")
        for p in p_sorted:
            row = [keys[(p, c)] for c in c_sorted]
            violations += direction_violations([k[idx] for k in row], [k[2] for k in row],
                                           [f"c={c:g}" for c in c_sorted], True, options.monotone_noise,
                                           f"{which} threshold falls in c at p={p:g}")
    for v in violations:
        logger.warning(v)
    if violations and strict:
        raise MonotonicityError("; ".join(violations))
    logger.info(f"sweep_single: {len(cells)} cells, {len(violations)} monotonicity violations")
    return SweepResult(table, violations)


# ── Uncertain bias ─────────────────────────────────────────────────────────


def pooled_nondisclosure_belief(model: SignalModel, p: float, lam: float, s_u, s_d):
    """DM belief after phi when the sender is upward with probability lam."""
    pi = model.prior
    up = model.lower_moments(s_u)
    down = model.lower_moments(s_d, weight=0.0)
    full = model.total_moments()
    num = (1.0 - p) * pi + lam * p * up[..., 1] + (1.0 - lam) * p * (full[1] - down[..., 1])
    den = (1.0 - p) + lam * p * up[..., 0] + (1.0 - lam) * p * (full[0] - down[..., 0])
    return num / den


def solve_uncertain_bias(model: SignalModel, p: float, c: float, lam: float,
                         options: Optional[SolverOptions] = None) -> List[UncertainBiasEquilibrium]:
    """Interior solutions of s_u - c = eta = s_d + c, i.e. s_u = s_d + 2c."""
    options = options or SolverOptions()
    if not (0.0 <= lam <= 1.0):
        raise ConfigError(f"lambda = {lam} must lie in [0, 1]")
    SenderSpec(p)
    lo, hi = model.support_lo, model.support_hi
    a, b = lo + abs(c), hi - abs(c)
    if a >= b:
        raise BoundaryNotSupportedError(f"|c| = {abs(c)} leaves no room for interior thresholds")
    grid = np.linspace(a, b, options.scan_grid)

    def residual(y):
        return pooled_nondisclosure_belief(model, p, lam, y + c, y - c) - y

    values = residual(grid)
    roots, _ = scan_roots(grid, values, lambda y: float(residual(y)), options.root_tol)
    found = []
    for y in roots:
        s_u, s_d = y + c, y - c
        if lo < s_u < hi and lo < s_d < hi:
            found.append(UncertainBiasEquilibrium(float(s_u), float(s_d), float(y)))
    if not found:
        raise BoundaryNotSupportedError(
            f"no interior uncertain-bias equilibrium for p={p}, c={c}, lambda={lam}"
        )
    if len(found) > 1:
        logger.info(f"uncertain bias: {len(found)} interior solutions")
    return found
