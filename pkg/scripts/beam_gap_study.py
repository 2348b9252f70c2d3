"""Beam width versus solution quality.

For each QFT size and a batch of random circuits, solve exactly (where that
is cheap) and with beam widths 1..256, and report the average gap to the
optimum. Also counts instances where a wider beam did worse than a narrower
one, since the width is not guaranteed to help monotonically.

    python scripts/beam_gap_study.py --qft 5 6 7 8 --random 100
"""
import argparse
import random
import time

from nnroute import QuantumCircuit, SolverConfig, generate_qft, solve_beam, solve_exact_dp, solve_greedy
from nnroute.bench import row_by_name

WIDTHS = (1, 2, 4, 8, 16, 32, 64, 128, 256)


def beam_costs(c, widths):
    return [solve_beam(c, SolverConfig(mode="beam", beam_width=w)).objective for w in widths]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qft", type=int, nargs="*", default=[5, 6, 7, 8])
    parser.add_argument("--random", type=int, default=100, help="number of random circuits")
    parser.add_argument("--n", type=int, default=6)
    parser.add_argument("--m", type=int, default=15)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rows = row_by_name()
    print("| instance | optimum | greedy | " + " | ".join(f"W={w}" for w in WIDTHS) + " | time, all W [s] |")
    print("|---" * (len(WIDTHS) + 4) + "|")
    for n in args.qft:
        c = generate_qft(n)
        optimum = rows[c.name].swaps_expected
        start = time.perf_counter()
        costs = beam_costs(c, WIDTHS)
        elapsed = time.perf_counter() - start
        print(f"| {c.name} | {optimum} | {solve_greedy(c).objective} | "
              + " | ".join(map(str, costs)) + f" | {elapsed:.1f} |")

    if not args.random:
        return 0
    rng = random.Random(args.seed)
    gaps = {w: 0.0 for w in WIDTHS}
    hits = {w: 0 for w in WIDTHS}
    non_monotone = 0
    for _ in range(args.random):
        pairs = [tuple(rng.sample(range(args.n), 2)) for _ in range(args.m)]
        c = QuantumCircuit.from_pairs(args.n, pairs)
        opt = solve_exact_dp(c).objective
        costs = beam_costs(c, WIDTHS)
        non_monotone += any(b > a for a, b in zip(costs, costs[1:]))
        for w, cost in zip(WIDTHS, costs):
            gaps[w] += (cost - opt) / max(opt, 1)
            hits[w] += cost == opt
    print()
    print(f"{args.random} random circuits, n={args.n}, m={args.m}")
    print("| W | mean relative gap | optimal found |")
    print("|---|---|---|")
    for w in WIDTHS:
        print(f"| {w} | {100 * gaps[w] / args.random:.1f}% | {hits[w]}/{args.random} |")
    print(f"\ninstances where some wider beam was worse: {non_monotone}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
