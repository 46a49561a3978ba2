"""
Command-line front end for the disclosure-equilibrium engine.

    python cli.py solve     --config configs/two_sender_c036.json --out results
    python cli.py sweep     --config configs/uniform_single.json --axis p1=0.2:0.9:8 --axis c=-0.1:0.1:5
    python cli.py curves    --config configs/uniform_two.json
    python cli.py simulate  --config configs/uniform_two.json --seed 7
    python cli.py examples

Exit codes: 0 success, 1 worked-example mismatch, 2 solver failure
(convergence or no interior solution), 3 configuration error.
"""

import argparse
import itertools
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from belief_core import SenderSpec, ThresholdProfile, nondisclosure_belief, to_frame
from config import RunConfig, SweepAxis, env_overrides, load_config
from errors import BoundaryNotSupportedError, ConfigError, ConvergenceError, DomainError
from multi_sender import (
    SequentialPolicy,
    UtilitySpec,
    enumerate_equilibria_grid,
    nonlinear_best_response,
    solve_correlated,
    solve_extremal_complements,
    solve_extremal_substitutes,
    solve_many_senders,
    solve_sequential,
    threshold_type_payoffs,
)
from single_sender import direction_violations, sender_welfare, solve_single, solve_uncertain_bias, sweep_single
from welfare_sim import (
    GOLDEN_TOL,
    PosteriorDistribution,
    worked_examples_report,
    monte_carlo,
    posterior_distribution,
    verify_equilibrium,
)

logger = logging.getLogger(__name__)

EXIT_OK          = 0
EXIT_GOLDEN      = 1
EXIT_CONVERGENCE = 2
EXIT_CONFIG      = 3

FLOAT_FORMAT = "%.17g"
SEP = "=" * 70


# ── Game dispatch ──────────────────────────────────────────────────────────


@dataclass
class SolveOutcome:
    """Everything one configured solve produced, ready for reporting."""

    game: str
    table: pd.DataFrame
    thresholds: List[tuple]
    kinds: List[str]
    welfares: List[float]
    notes: List[str] = field(default_factory=list)
    senders: Sequence[SenderSpec] = ()
    profile: Optional[ThresholdProfile] = None
    game_kind: str = "simultaneous"
    policy: Optional[SequentialPolicy] = None
    posterior: Optional[PosteriorDistribution] = None

    @property
    def best_welfare(self) -> float:
        finite = [w for w in self.welfares if np.isfinite(w)]
        return max(finite) if finite else float("nan")


def game_inputs(config: RunConfig, rho=None, p_overrides=None):
    """(model, senders) for a config, with sweep overrides applied."""
    model, implied_p = config.model.build_with_informedness(rho)
    p_overrides = dict(p_overrides or {})
    if implied_p is not None and 0 not in p_overrides:
        logger.info(f"target curve implies p = {implied_p:.10g} for sender 1")
        p_overrides[0] = implied_p
    senders = config.sender_specs(p_overrides)
    if config.game == "correlated":
        first = senders[0]
        bias = first.bias if config.correlated_bias == "same" else first.flipped().bias
        senders[1] = SenderSpec(senders[1].p, bias)
    return model, senders


def _solve_single_game(model, senders, c, config, out):
    sols = solve_single(model, senders[0], c, config.solver)
    out.table = pd.DataFrame([{
        "kind": e.kind, "threshold": e.threshold, "marginal_weight": e.marginal_weight,
        "nondisclosure_belief": e.nondisclosure_belief, "sender_welfare": e.sender_welfare,
        "dm_welfare": e.dm_welfare, "tangent": e.tangent,
    } for e in sols])
    out.thresholds = [(e.threshold,) for e in sols]
    out.kinds = [e.kind for e in sols]
    out.welfares = [e.dm_welfare for e in sols]
    best = max(sols, key=lambda e: e.dm_welfare)
    out.profile = ThresholdProfile((best.threshold,), (best.marginal_weight,))
    if len(sols) > 1:
        out.notes.append(f"{len(sols)} equilibria; lowest threshold {sols[0].threshold:.10g}, "
                         f"highest {sols[-1].threshold:.10g}")


def _solve_uncertain_bias(model, senders, c, config, out):
    sols = solve_uncertain_bias(model, senders[0].p, c, config.lam, config.solver)
    out.table = pd.DataFrame([{"s_u": e.s_u, "s_d": e.s_d, "nondisclosure_belief": e.nondisclosure_belief,
                               "s_u_minus_s_d": e.s_u - e.s_d} for e in sols])
    out.thresholds = [(e.s_u, e.s_d) for e in sols]
    out.kinds = ["interior"] * len(sols)
    out.welfares = [float("nan")] * len(sols)
    out.notes.append(f"lambda = {config.lam:g}: upward type discloses above s_u, downward type below s_d")


def _solve_two(model, senders, c, config, out):
    options = config.solver
    if model.is_discrete:
        eqs = enumerate_equilibria_grid(model, None, c, senders, options=options)
    elif c <= 0.0:
        eqs = list(solve_extremal_complements(model, None, c, senders, options))
    else:
        eqs = list(solve_extremal_substitutes(model, None, c, senders, options))
    if not eqs:
        raise ConvergenceError("no two-sender equilibrium located on the strategy lattice")
    out.table = pd.DataFrame([{
        "kind": e.kind, "s1": e.thresholds[0], "s2": e.thresholds[1],
        "w1": e.profile.marginal_weights[0], "w2": e.profile.marginal_weights[1],
        "residual_1": e.residuals[0], "residual_2": e.residuals[1], "dm_welfare": e.dm_welfare,
        "sender_welfare_1": e.sender_welfare[0], "sender_welfare_2": e.sender_welfare[1],
        "iterations": e.iterations,
    } for e in eqs])
    out.thresholds = [tuple(e.thresholds) for e in eqs]
    out.kinds = [e.kind for e in eqs]
    out.welfares = [e.dm_welfare for e in eqs]
    best = max(eqs, key=lambda e: e.dm_welfare)
    out.profile = best.profile

    distinct = {tuple(round(t, 9) for t in e.thresholds) for e in eqs}
    if len(distinct) == 1:
        out.notes.append(f"unique equilibrium: s1 = {eqs[0].thresholds[0]:.10g}, s2 = {eqs[0].thresholds[1]:.10g}")
    singles = [solve_single(model, s, c, options) for s in senders]
    for k, sols in enumerate(singles):
        out.notes.append(f"single-sender game {k + 1}: best DM welfare {max(e.dm_welfare for e in sols):.10g}")
    if c == 0.0:
        gap = max(abs(t - sols[0].threshold) for e in eqs for t, sols in zip(e.thresholds, singles))
        verdict = "equal" if gap <= 1e-6 else "DIFFER from"
        out.notes.append(f"c = 0: thresholds {verdict} the single-sender fixed points (max gap {gap:.2e})")

    if config.utility.kind == "power":
        V = UtilitySpec.power(config.utility.alpha, config.utility.gamma)
        br = nonlinear_best_response(model, None, c, senders, V, best.thresholds[1],
                                     best.profile.marginal_weights[1], options)
        out.notes.append(f"sender 1 with V = {V.name} against s2 = {best.thresholds[1]:.10g}: "
                         f"best responses [{br.smallest:.10g}, {br.largest:.10g}]")


def _solve_many(model, senders, c, config, out):
    eq = solve_many_senders(model, None, c, senders, config.solver)
    out.table = pd.DataFrame([{
        "sender": k + 1, "bias": s.bias, "p": s.p, "threshold": t, "marginal_weight": w, "residual": r,
    } for k, (s, t, w, r) in enumerate(zip(senders, eq.thresholds, eq.profile.marginal_weights, eq.residuals))])
    out.thresholds = [tuple(eq.thresholds)]
    out.kinds = ["smallest" if c <= 0.0 else "round_robin"]
    out.welfares = [eq.dm_welfare]
    out.profile = eq.profile
    out.notes.append(f"converged after {eq.iterations} iterations")


def _solve_sequential(model, senders, c, config, out):
    result = solve_sequential(model, None, c, senders[0], senders[1], config.solver)
    out.table = pd.DataFrame([{
        "kind": e.kind, "s1": e.threshold_1, "s2_after_silence": e.after_silence,
        "nondisclosure_belief_1": e.nondisclosure_belief, "dm_welfare": e.dm_welfare,
    } for e in result.all])
    out.thresholds = [(e.threshold_1, e.after_silence) for e in result.all]
    out.kinds = [e.kind for e in result.all]
    out.welfares = [e.dm_welfare for e in result.all]
    best = max(result.all, key=lambda e: e.dm_welfare)
    out.profile = ThresholdProfile((best.threshold_1, best.after_silence))
    out.policy = best.policy
    out.game_kind = "sequential"
    if c == 0.0:
        single = solve_single(model, senders[0], 0.0, config.solver)[0].threshold
        out.notes.append(f"c = 0: sender 1 threshold {result.lowest.threshold_1:.10g}, "
                         f"single-sender {single:.10g}")
    table = best.policy.to_frame()
    out.notes.append("sender 2 policy after disclosure (interim belief -> threshold):")
    out.notes.extend(f"  {mu:.6f} -> {t:.10g}" for mu, t in zip(table["interim_belief"], table["s2_threshold"]))


def _solve_correlated(model, senders, c, config, out):
    eqs = solve_correlated(model, None, c, senders[0], senders[1], config.solver)
    out.table = pd.DataFrame([{
        "kind": e.kind, "s1": e.thresholds[0], "s2": e.thresholds[1],
        "nondisclosure_belief": e.nondisclosure_belief,
        "effective_p": np.nan if e.effective_p is None else e.effective_p, "dm_welfare": e.dm_welfare,
    } for e in eqs])
    out.thresholds = [tuple(e.thresholds) for e in eqs]
    out.kinds = [e.kind for e in eqs]
    out.welfares = [e.dm_welfare for e in eqs]
    best = max(eqs, key=lambda e: e.dm_welfare)
    out.profile = best.profile
    out.game_kind = "correlated"


SOLVERS = {
    "single": _solve_single_game,
    "uncertain_bias": _solve_uncertain_bias,
    "two": _solve_two,
    "many": _solve_many,
    "sequential": _solve_sequential,
    "correlated": _solve_correlated,
}


def solve_config(config: RunConfig, rho=None, p_overrides=None, c=None, with_posterior=True) -> SolveOutcome:
    """Run the solver the config names; the posterior law is attached for the DM-preferred equilibrium."""
    model, senders = game_inputs(config, rho, p_overrides)
    c = config.c if c is None else c
    out = SolveOutcome(config.game, pd.DataFrame(), [], [], [], senders=senders)
    logger.info(f"solving game={config.game} c={c:g} senders={[(s.p, s.bias) for s in senders]} model={model!r}")
    SOLVERS[config.game](model, senders, c, config, out)
    if with_posterior and out.profile is not None:
        out.posterior = posterior_distribution(model, None, out.profile, senders, out.game_kind, out.policy,
                                               config.solver.branch_cells, config.solver.branch_nodes)
        if out.game_kind == "simultaneous":
            report = verify_equilibrium(model, None, c, senders, out.profile,
                                        cells=config.solver.branch_cells, nodes=config.solver.branch_nodes,
                                        tolerance=config.solver.certify_tol)
            out.notes.append(f"deviation check: {report}")
    return out


# ── Reports and files ──────────────────────────────────────────────────────


def _header(config: RunConfig, title: str) -> List[str]:
    senders = ", ".join(f"(p={s.p:g}, {s.bias})" for s in config.senders)
    return [
        SEP,
        title,
        SEP,
        f"  game    : {config.game}",
        f"  model   : {config.model.kind} (prior {config.model.prior:g})",
        f"  senders : {senders}",
        f"  c       : {config.c:g}",
        f"  solver  : {config.solver.describe()}",
        SEP,
    ]


def _comment_lines(config: RunConfig) -> str:
    return (f"# game={config.game} model={config.model.kind} c={config.c:g}\n"
            f"# solver: {config.solver.describe()}\n")


def write_csv(path: Path, table: pd.DataFrame, config: RunConfig, footer: Sequence[str] = ()):
    """CSV with a config/tolerance preamble and an optional trailing comment block."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(_comment_lines(config))
        table.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        for line in footer:
            f.write(f"# {line}\n")
    logger.info(f"wrote {path} ({len(table)} rows)")


def solve_report(config: RunConfig, outcome: SolveOutcome) -> str:
    lines = _header(config, "EQUILIBRIUM REPORT")
    lines.append("EQUILIBRIA")
    with pd.option_context("display.width", 200, "display.max_columns", None):
        lines.append(outcome.table.to_string(index=False, float_format=lambda v: f"{v:.10g}"))
    lines.append(SEP)
    if outcome.posterior is not None:
        dist = outcome.posterior
        lines += [
            "WELFARE (DM-preferred equilibrium)",
            f"  thresholds            : {outcome.profile.thresholds}",
            f"  DM welfare -E[mu(1-mu)]: {dist.second_moment() - dist.mean():.10f}",
            f"  posterior mean        : {dist.mean():.10f}  (total mass {dist.total_mass():.12f})",
            SEP,
        ]
    if outcome.notes:
        lines.append("NOTES")
        lines.extend(f"  {n}" for n in outcome.notes)
        lines.append(SEP)
    return "\n".join(lines) + "\n"


def cmd_solve(config: RunConfig) -> SolveOutcome:
    out_dir = Path(config.out)
    outcome = solve_config(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(solve_report(config, outcome), encoding="utf-8")
    write_csv(out_dir / "equilibria.csv", outcome.table, config)
    if outcome.posterior is not None:
        write_csv(out_dir / "posterior.csv", outcome.posterior.to_frame(), config)
    logger.info(f"report written to {out_dir / 'report.txt'}")
    return outcome


# ── Sweeps ─────────────────────────────────────────────────────────────────


def _axis_values(config: RunConfig, name: str, default):
    for axis in config.axes:
        if axis.name == name:
            return [float(v) for v in axis.values()]
    return [default]


def _sweep_single(config: RunConfig):
    frames, violations = [], []
    p_values = _axis_values(config, "p1", config.senders[0].p)
    c_values = _axis_values(config, "c", config.c)
    for rho in _axis_values(config, "rho", config.model.rho):
        model, senders = game_inputs(config, rho)
        result = sweep_single(model, senders[0], p_values, c_values, config.solver, config.solver.threads)
        table = result.table
        table.insert(2, "rho", np.nan if rho is None else rho)
        frames.append(table)
        prefix = "" if rho is None else f"rho={rho:g}: "
        violations += [prefix + v for v in result.violations]
    return pd.concat(frames, ignore_index=True), violations


def _sweep_cell(config: RunConfig, cell):
    p1, p2, c, rho = cell
    overrides = {0: p1} if len(config.senders) < 2 else {0: p1, 1: p2}
    row = {"p1": p1, "p2": p2 if len(config.senders) > 1 else np.nan, "c": c,
           "rho": np.nan if rho is None else rho}
    try:
        outcome = solve_config(config, rho, overrides, c, with_posterior=False)
    except (ConvergenceError, BoundaryNotSupportedError) as e:
        logger.warning(f"sweep cell {cell}: {e}")
        row.update(s1_lo=np.nan, s1_hi=np.nan, s2_lo=np.nan, s2_hi=np.nan, dm_welfare=np.nan,
                   kind="failed", n_equilibria=0)
        return row
    firsts = [t[0] for t in outcome.thresholds]
    seconds = [t[1] for t in outcome.thresholds if len(t) > 1]
    row.update(
        s1_lo=min(firsts), s1_hi=max(firsts),
        s2_lo=min(seconds) if seconds else np.nan, s2_hi=max(seconds) if seconds else np.nan,
        dm_welfare=outcome.best_welfare, kind="/".join(outcome.kinds), n_equilibria=len(outcome.kinds),
    )
    return row


def _expected_direction(game, axis, sender_index, c):
    """+1 weakly rising, -1 weakly falling, 0 unchecked, in the sender's own frame."""
    if game in ("two", "many"):
        own = (axis == "p1" and sender_index == 0) or (axis == "p2" and sender_index == 1)
        if own:
            return -1
        return 0 if c == 0.0 else (1 if c > 0.0 else -1)
    if game == "sequential" and axis == "p2" and sender_index == 0:
        return 0 if c == 0.0 else (1 if c > 0.0 else -1)
    return 0


def sweep_violations(config: RunConfig, table: pd.DataFrame) -> List[str]:
    """Comparative-statics checks along the p1 / p2 axes of a multi-sender sweep."""
    found = []
    names = [a.name for a in config.axes]
    senders = config.sender_specs()
    if config.game == "correlated":
        first = senders[0]
        senders[1] = SenderSpec(senders[1].p, first.bias if config.correlated_bias == "same" else first.flipped().bias)
    for axis in ("p1", "p2"):
        if axis not in names:
            continue
        others = [n for n in ("p1", "p2", "c", "rho") if n != axis and n in names]
        groups = table.groupby(others, sort=True) if others else [((), table)]
        for key, group in groups:
            group = group.sort_values(axis)
            c = float(group["c"].iloc[0])
            for k, column in enumerate(("s1", "s2")):
                if k >= len(senders):
                    continue
                direction = _expected_direction(config.game, axis, k, c)
                if direction == 0:
                    continue
                for end in ("lo", "hi"):
                    values = to_frame(senders[k], group[f"{column}_{end}"].to_numpy())
                    labels = [f"{axis}={v:g}" for v in group[axis]]
                    found += direction_violations(
                        values, [False] * len(values), labels, direction > 0, config.solver.monotone_noise,
                        f"{column}_{end} {'falls' if direction > 0 else 'rises'} in {axis} at {key}",
                    )
    for v in found:
        logger.warning(v)
    return found


def cmd_sweep(config: RunConfig):
    if not config.axes:
        raise ConfigError("sweep needs at least one --axis NAME=start:stop:num")
    names = [a.name for a in config.axes]
    if len(set(names)) != len(names):
        raise ConfigError(f"repeated sweep axis in {names}")
    if "p2" in names and len(config.senders) < 2:
        raise ConfigError("axis p2 needs a game with a second sender")

    if config.game == "single":
        table, violations = _sweep_single(config)
    else:
        default_p2 = config.senders[1].p if len(config.senders) > 1 else None
        cells = list(itertools.product(
            _axis_values(config, "p1", config.senders[0].p),
            _axis_values(config, "p2", default_p2),
            _axis_values(config, "c", config.c),
            _axis_values(config, "rho", config.model.rho),
        ))
        logger.info(f"sweep: {len(cells)} cells, game={config.game}")
        with ThreadPoolExecutor(max_workers=config.solver.threads) as pool:
            rows = list(pool.map(lambda cell: _sweep_cell(config, cell), cells))
        table = pd.DataFrame(rows)
        violations = sweep_violations(config, table)

    footer = [f"monotonicity checks (noise band {config.solver.monotone_noise:g}):"]
    footer += [f"VIOLATION {v}" for v in violations] or ["all checked directions hold"]
    path = Path(config.out) / "sweep.csv"
    write_csv(path, table, config, footer)
    return table, violations


# ── Curves ─────────────────────────────────────────────────────────────────


def curve_table(config: RunConfig) -> pd.DataFrame:
    """eta, the concealment payoff U of threshold types and the disclosure payoff on one grid."""
    model, senders = game_inputs(config)
    first = senders[0]
    grid = np.linspace(model.support_lo, model.support_hi, config.solver.curve_grid)
    c = config.c
    table = pd.DataFrame({
        "s": grid,
        "eta": np.asarray(nondisclosure_belief(model, first, grid), dtype=float),
        "disclosure_payoff": grid - c if first.is_up else grid + c,
    })
    if len(senders) >= 2 and config.game in ("two", "many"):
        second = senders[1]
        fixed = solve_single(model, second, c, config.solver)[0].threshold
        far = model.support_hi if second.is_up else model.support_lo
        for label, s_hat in (("U_at_single_threshold", fixed), ("U_at_midpoint", 0.5 * (fixed + far))):
            table[label] = threshold_type_payoffs(model, senders[:2], s_hat, grid, options=config.solver)
            logger.info(f"{label}: sender 2 threshold {s_hat:.10g}, p2 = {second.p:g}")
    return table


def cmd_curves(config: RunConfig) -> pd.DataFrame:
    table = curve_table(config)
    write_csv(Path(config.out) / "curves.csv", table, config)
    return table


# ── Simulation ─────────────────────────────────────────────────────────────


def cmd_simulate(config: RunConfig) -> str:
    outcome = solve_config(config)
    if outcome.profile is None:
        raise ConfigError(f"game '{config.game}' has no threshold profile to simulate")
    model, senders = game_inputs(config)
    opts = config.solver
    report = monte_carlo(model, None, outcome.profile, senders, outcome.game_kind, n=opts.mc_draws,
                         seed=opts.seed, c=config.c, policy=outcome.policy, streams=opts.mc_streams,
                         threads=opts.threads)
    dist = outcome.posterior
    analytic = dist.second_moment() - dist.mean()
    lines = _header(config, "SIMULATION") + [report.to_text(), "ANALYTIC VS SIMULATED"]

    def compare(label, exact, sim, se):
        z = (sim - exact) / se if se > 0 else 0.0
        flag = "ok" if abs(z) <= 3.0 else "OUTSIDE 3 SE"
        lines.append(f"  {label:<22}: analytic {exact:.10f}  simulated {sim:.10f}  z = {z:+.2f}  {flag}")

    compare("mean posterior", model.prior, report.mean_posterior, report.mean_posterior_se)
    compare("DM welfare", analytic, report.dm_welfare, report.dm_welfare_se)
    if outcome.game_kind == "simultaneous":
        weights = outcome.profile.marginal_weights
        for k, (s, t, w) in enumerate(zip(senders, outcome.profile.thresholds, weights)):
            own = sender_welfare(model, t, s, config.c, w)
            compare(f"sender {k + 1} payoff", own, report.sender_payoffs[k], report.sender_payoffs_se[k])
    lines.append(SEP)
    text = "\n".join(lines) + "\n"
    path = Path(config.out) / "simulation.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"simulation written to {path}")
    return text


# ── Four-signal examples ───────────────────────────────────────────────────


def cmd_examples(tolerance: float = GOLDEN_TOL, out: Optional[str] = None):
    table = worked_examples_report(strict=False, tolerance=tolerance)
    text = table.to_text() + "\n"
    print(text, end="")
    if out is not None:
        path = Path(out) / "examples.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return table


# ── Entry point ────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Equilibria of voluntary-disclosure games with message costs.",
    )
    parser.add_argument("command", choices=["solve", "sweep", "curves", "examples", "simulate"])
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output directory (default: config 'out' or $DISCLOSURE_OUT)")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed")
    parser.add_argument("--threads", type=int, help="worker threads for sweeps, grids and simulation")
    parser.add_argument("--tolerance", type=float, help="golden/acceptance tolerance")
    parser.add_argument("--axis", action="append", default=[], metavar="NAME=start:stop:num",
                        help="sweep axis over p1, p2, c or rho; repeat for a 2-d grid")
    return parser


def _configure_logging():
    level = os.getenv("DISCLOSURE_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def run(args) -> int:
    if args.command == "examples":
        tolerance = args.tolerance
        out = args.out
        if args.config:
            config = load_config(args.config).with_overrides(tolerance=args.tolerance, out=args.out)
            tolerance, out = config.solver.tolerance, out or config.out
        if tolerance is None:
            tolerance = env_overrides().get("tolerance", GOLDEN_TOL)
        out = out or env_overrides().get("out")
        table = cmd_examples(tolerance, out)
        return EXIT_OK if table.passed else EXIT_GOLDEN

    if not args.config:
        raise ConfigError(f"'{args.command}' needs --config PATH")
    axes = [SweepAxis.parse(text) for text in args.axis]
    config = load_config(args.config).with_overrides(
        seed=args.seed, threads=args.threads, tolerance=args.tolerance, out=args.out, axes=axes,
    )
    if args.command == "solve":
        cmd_solve(config)
    elif args.command == "sweep":
        cmd_sweep(config)
    elif args.command == "curves":
        cmd_curves(config)
    elif args.command == "simulate":
        cmd_simulate(config)
    return EXIT_OK


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConvergenceError, BoundaryNotSupportedError) as e:
        trace = getattr(e, "trace", None)
        logger.error(f"solver failed: {e}")
        if trace:
            logger.error(f"last iterates: {trace[-5:]}")
        return EXIT_CONVERGENCE
    except (ConfigError, DomainError) as e:
        logger.error(f"configuration error: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
