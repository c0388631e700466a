#!/usr/bin/env python3
"""Scan random entangled sender policies for gain above the honest level.

Each policy keeps half of a random pure two-qubit state, measures it in a
random per-guess basis after hearing the guess, and claims from one of
three table styles. A policy "beats honest" when its simulated mean gain
exceeds r by more than 4 standard errors. Finding none is evidence, not
proof; the scan covers sampled policies only.

Example:
    python3 scripts/entangled_attack_scan.py --policies 25 --rounds 20000
"""

import argparse
import sys

import numpy as np

from trinegamble.montecarlo import SimConfig, simulate
from trinegamble.protocol import ProtocolParams
from trinegamble.strategies import BobStrategy, random_entangled_policy


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--policies", type=int, default=25, help="number of random policies")
    ap.add_argument("--rounds", type=int, default=20_000, help="MC rounds per policy")
    ap.add_argument("--rate-r", type=float, default=0.05)
    ap.add_argument("--penalty-R", type=float, default=398.0)
    ap.add_argument("--seed", type=int, default=0, help="base seed for policies and runs")
    ap.add_argument("--quiet", action="store_true", help="summary line only")
    args = ap.parse_args(argv)

    params = ProtocolParams(r=args.rate_r, R=args.penalty_R)
    if not args.quiet:
        print(f"{'policy':>7} {'mean_gain':>11} {'stderr':>9} {'excess':>9} {'flag':>5}")
    offenders = 0
    worst = -float("inf")
    for i in range(args.policies):
        alice = random_entangled_policy(np.random.default_rng(args.seed + i))
        result = simulate(SimConfig(rounds=args.rounds, seed=args.seed + i,
                                    params=params, alice=alice,
                                    bob=BobStrategy.honest_optimal()))
        excess = result.mean_gain_alice - args.rate_r
        margin = excess - 4.0 * result.stderr
        worst = max(worst, margin)
        beat = margin > 0.0
        offenders += beat
        if not args.quiet:
            print(f"{i:>7d} {result.mean_gain_alice:>11.5f} {result.stderr:>9.5f} "
                  f"{excess:>+9.5f} {'BEAT' if beat else '':>5}")
    print(f"# {offenders}/{args.policies} policies beat honest at "
          f"(r, R) = ({args.rate_r}, {args.penalty_R}); worst margin {worst:+.5f}",
          file=sys.stderr)
    return 2 if offenders else 0


if __name__ == "__main__":
    raise SystemExit(main())
