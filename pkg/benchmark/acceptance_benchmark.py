#!/usr/bin/env python3
"""
acceptance_benchmark.py
=======================

Timed acceptance gates for the disclosure-equilibrium engine. Each gate
recomputes a reference quantity through the public solver API and checks
both the value and the wall-clock budget:

    1. GOLDEN       : the four-signal worked examples (eta, deviation payoffs,
                      DM welfare) within tolerance, budget 2 s
    2. UNIQUENESS   : full strategy-lattice enumeration of the four-signal
                      two-sender game at c = 0.36 finds exactly one
                      equilibrium, budget 30 s
    3. MONTE CARLO  : seeded simulation agrees with the exact DM welfare,
                      mean posterior and sender payoffs within 3 standard
                      errors on every fixture, budget 60 s

--------------------------------------------------------------------------
USAGE
--------------------------------------------------------------------------
    # full run
    python benchmark/acceptance_benchmark.py

    # quick smoke test with fewer draws
    python benchmark/acceptance_benchmark.py --draws 100000

    # pin the seed and the worker count
    python benchmark/acceptance_benchmark.py --seed 7 --threads 4

OUTPUTS
    acceptance_results.csv   one row per checked quantity
    acceptance_summary.json  gate verdicts and runtimes
    acceptance_summary.txt   human-readable report

Exit status is 1 when any gate fails.
"""

import argparse
import json
import logging
import os
import sys
import time
from datetime import datetime, timezone

import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from belief_core import SenderSpec, ThresholdProfile                      # noqa: E402
from config import SolverOptions                                         # noqa: E402
from multi_sender import enumerate_equilibria_grid                        # noqa: E402
from signal_models import (                                               # noqa: E402
    beta_precision_model,
    four_signal_model,
    normal_precision_model,
    uniform_model,
)
from single_sender import sender_welfare                                  # noqa: E402
from welfare_sim import (                                                 # noqa: E402
    GOLDEN_TOL,
    dm_welfare_quadratic,
    monte_carlo,
    posterior_distribution,
    worked_examples_report,
)

logger = logging.getLogger("acceptance_benchmark")


# ===========================================================================
# Config
# ===========================================================================
GOLDEN_BUDGET     = 2.0      # seconds
UNIQUENESS_BUDGET = 30.0
MC_BUDGET         = 60.0
MC_SE_BAND        = 3.0
DEFAULT_DRAWS     = 1_000_000


def mc_fixtures():
    """(name, model, senders, profile, c) simulated against the exact values."""
    up8, down8, up6 = SenderSpec(0.8, "up"), SenderSpec(0.8, "down"), SenderSpec(0.6, "up")
    uniform = uniform_model()
    return [
        ("uniform single", uniform, [up8], ThresholdProfile((0.5,)), 0.1),
        ("uniform opposed", uniform, [up8, down8], ThresholdProfile((0.4, 0.6)), 0.05),
        ("uniform aligned", uniform, [up8, up6], ThresholdProfile((0.5, 0.45)), -0.03),
        ("four-signal c=0.36", four_signal_model(0.7, 0.7), [up8, down8], ThresholdProfile((1.0, 0.0)), 0.36),
        ("four-signal mixed", four_signal_model(0.7, 0.7), [up8, down8],
         ThresholdProfile((0.7, 0.0), (0.5, 1.0)), 0.0),
        ("beta rho=2", beta_precision_model(2.0), [SenderSpec(0.7, "up")], ThresholdProfile((0.4,)), 0.1),
        ("beta rho=0.5 opposed", beta_precision_model(0.5), [SenderSpec(0.7, "up"), SenderSpec(0.5, "down")],
         ThresholdProfile((0.55, 0.45)), 0.0),
        ("normal rho=1.5", normal_precision_model(1.5), [SenderSpec(0.7, "up"), SenderSpec(0.5, "down")],
         ThresholdProfile((0.55, 0.45)), 0.02),
        ("normal single", normal_precision_model(3.0), [SenderSpec(0.9, "down")], ThresholdProfile((0.6,)), -0.05),
        ("uniform p=1 rival", uniform, [up6, SenderSpec(1.0, "down")], ThresholdProfile((0.5, 0.3)), 0.0),
    ]


# ===========================================================================
# Gates
# ===========================================================================
def gate_golden(tolerance):
    t0 = time.perf_counter()
    table = worked_examples_report(tolerance=tolerance)
    elapsed = time.perf_counter() - t0
    rows = [{
        "gate": "golden", "item": f"{r.example}: {r.quantity}", "computed": r.computed,
        "reference": r.published, "band": tolerance, "passed": r.passed,
    } for r in table.rows]
    return rows, elapsed, table.passed and elapsed < GOLDEN_BUDGET


def gate_uniqueness():
    up, down = SenderSpec(0.8, "up"), SenderSpec(0.8, "down")
    t0 = time.perf_counter()
    eqs = enumerate_equilibria_grid(four_signal_model(0.7, 0.7), None, 0.36, [up, down],
                                    options=SolverOptions(weight_grid=101))
    elapsed = time.perf_counter() - t0
    distinct = {(round(e.thresholds[0], 9), round(e.thresholds[1], 9),
                 round(e.profile.marginal_weights[0], 9), round(e.profile.marginal_weights[1], 9)) for e in eqs}
    ok = len(distinct) == 1 and (1.0, 0.0, 1.0, 1.0) in distinct
    rows = [{
        "gate": "uniqueness", "item": "equilibria found (four-signal, c = 0.36)", "computed": len(distinct),
        "reference": 1, "band": 0, "passed": ok,
    }]
    return rows, elapsed, ok and elapsed < UNIQUENESS_BUDGET


def gate_monte_carlo(draws, seed, streams, threads):
    rows = []
    t0 = time.perf_counter()
    for k, (name, model, senders, profile, c) in enumerate(mc_fixtures()):
        exact = posterior_distribution(model, None, profile, senders)
        report = monte_carlo(model, None, profile, senders, n=draws, seed=seed + k, c=c,
                             streams=streams, threads=threads)
        checks = [
            ("mean posterior", model.prior, report.mean_posterior, report.mean_posterior_se),
            ("DM welfare", dm_welfare_quadratic(exact), report.dm_welfare, report.dm_welfare_se),
        ]
        for j, (s, t, w) in enumerate(zip(senders, profile.thresholds, profile.marginal_weights)):
            checks.append((f"sender {j + 1} payoff", sender_welfare(model, t, s, c, w),
                           report.sender_payoffs[j], report.sender_payoffs_se[j]))
        for label, reference, simulated, se in checks:
            band = MC_SE_BAND * se + 1e-12
            rows.append({
                "gate": "monte_carlo", "item": f"{name}: {label}", "computed": simulated,
                "reference": reference, "band": band, "passed": abs(simulated - reference) <= band,
            })
        print(f"  [{k + 1:2d}/{len(mc_fixtures())}] {name:<22} "
              f"welfare {report.dm_welfare:+.6f}  (exact {dm_welfare_quadratic(exact):+.6f})")
    elapsed = time.perf_counter() - t0
    ok = all(r["passed"] for r in rows if r["gate"] == "monte_carlo")
    return rows, elapsed, ok and elapsed < MC_BUDGET


def main():
    ap = argparse.ArgumentParser(description="Disclosure-equilibrium acceptance benchmark")
    ap.add_argument("--draws", type=int, default=DEFAULT_DRAWS, help="Monte Carlo draws per fixture")
    ap.add_argument("--seed", type=int, default=SolverOptions().seed)
    ap.add_argument("--streams", type=int, default=SolverOptions().mc_streams)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--tolerance", type=float, default=GOLDEN_TOL, help="golden-value tolerance")
    ap.add_argument("--out-prefix", default="acceptance")
    args = ap.parse_args()

    logging.basicConfig(
        level=os.getenv("DISCLOSURE_LOG_LEVEL", "WARNING").upper(),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    gates = {}
    rows = []
    print("[benchmark] golden values ...")
    r, elapsed, ok = gate_golden(args.tolerance)
    rows += r
    gates["golden"] = {"seconds": round(elapsed, 3), "budget": GOLDEN_BUDGET, "passed": ok}

    print("[benchmark] discrete uniqueness ...")
    r, elapsed, ok = gate_uniqueness()
    rows += r
    gates["uniqueness"] = {"seconds": round(elapsed, 3), "budget": UNIQUENESS_BUDGET, "passed": ok}

    print(f"[benchmark] Monte Carlo ({args.draws:,} draws per fixture) ...")
    try:
        r, elapsed, ok = gate_monte_carlo(args.draws, args.seed, args.streams, args.threads)
    except KeyboardInterrupt:
        print("\n[benchmark] Interrupted; writing the gates finished so far.")
        r, elapsed, ok = [], float("nan"), False
    rows += r
    gates["monte_carlo"] = {"seconds": round(elapsed, 3), "budget": MC_BUDGET, "passed": ok}

    # --- write outputs -----------------------------------------------------
    csv_path = f"{args.out_prefix}_results.csv"
    pd.DataFrame(rows).to_csv(csv_path, index=False, float_format="%.17g")

    failed_items = [row["item"] for row in rows if not row["passed"]]
    summary = {
        "generated_utc": datetime.now(timezone.utc).isoformat(),
        "draws": args.draws,
        "seed": args.seed,
        "streams": args.streams,
        "tolerance": args.tolerance,
        "gates": gates,
        "failed_items": failed_items,
        "passed": all(g["passed"] for g in gates.values()),
    }
    with open(f"{args.out_prefix}_summary.json", "w") as f:
        json.dump(summary, f, indent=2)

    def verdict(name):
        g = gates[name]
        return f"{'PASS' if g['passed'] else 'FAIL'}  {g['seconds']:.2f} s  (budget {g['budget']:.0f} s)"

    report = f"""\
================================================================
Disclosure Equilibrium Acceptance Benchmark — Summary
================================================================
Generated : {summary['generated_utc']}
Draws     : {args.draws:,}   seed = {args.seed}   streams = {args.streams}
Tolerance : {args.tolerance:g}

GOLDEN VALUES          : {verdict('golden')}
DISCRETE UNIQUENESS    : {verdict('uniqueness')}
MONTE CARLO ORACLE     : {verdict('monte_carlo')}

Failed items           : {len(failed_items)}
{chr(10).join('    ' + item for item in failed_items)}
================================================================
Full per-item results: {csv_path}
"""
    with open(f"{args.out_prefix}_summary.txt", "w") as f:
        f.write(report)
    print("\n" + report)
    if not summary["passed"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
