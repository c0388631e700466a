#!/usr/bin/env python3
"""Tabulate the bias/penalty tradeoff and back it with simulation.

For a fixed product k = r (R + 2), shrinking the tolerated bias delta means
raising the penalty R like k/delta. Each table row checks the honest
sender's simulated gain against the closed-form value r at that penalty.

Example:
    python3 scripts/bias_tradeoff_table.py --k 20 --deltas 0.1,0.05,0.01 --rounds 50000
"""

import argparse
import sys

from trinegamble.analytics import penalty_for_bias
from trinegamble.montecarlo import SimConfig, compare_stats, enumerate_exact, simulate
from trinegamble.protocol import ProtocolParams
from trinegamble.strategies import BobStrategy, HonestAlice


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=20.0, help="fixed product r*(R+2), > 2")
    ap.add_argument("--deltas", default="0.1,0.05,0.01,0.005",
                    help="comma-separated bias levels in (0, 1)")
    ap.add_argument("--rounds", type=int, default=50_000, help="MC rounds per row")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    deltas = [float(x) for x in args.deltas.split(",") if x.strip()]
    print(f"{'delta':>10} {'penalty_R':>12} {'exact_gain':>12} "
          f"{'mc_gain':>12} {'mc_stderr':>10} {'z':>7}")
    worst = 0.0
    for i, delta in enumerate(deltas):
        R = penalty_for_bias(delta, args.k)
        params = ProtocolParams(r=delta, R=R)
        exact = enumerate_exact(HonestAlice(), params)
        result = simulate(SimConfig(rounds=args.rounds, seed=args.seed + i,
                                    params=params, alice=HonestAlice(),
                                    bob=BobStrategy.honest_optimal()))
        z = compare_stats(result, exact.g_alice)
        worst = max(worst, abs(z))
        print(f"{delta:>10.4g} {R:>12.4f} {exact.g_alice:>12.6f} "
              f"{result.mean_gain_alice:>12.6f} {result.stderr:>10.6f} {z:>+7.2f}")
    print(f"# worst |z| = {worst:.2f}", file=sys.stderr)
    return 0 if worst < 4.0 else 2


if __name__ == "__main__":
    raise SystemExit(main())
