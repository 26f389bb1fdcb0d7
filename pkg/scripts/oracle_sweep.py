"""Compare solve() with the brute-force oracle on a stream of random instances."""

import argparse
import random
import time

from fourblock.acceptance import oracle_params
from fourblock.instance import random_instance
from fourblock.oracle import brute_force_solve
from fourblock.solver import SolveOptions, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--no-box-presolve", action="store_true")
    args = ap.parse_args()
    rnd = random.Random(args.seed)
    opts = SolveOptions(domain_box=not args.no_box_presolve)
    bad = 0
    for k in range(args.count):
        p = oracle_params(rnd)
        inst = random_instance(p, args.seed * 1000 + k)
        start = time.perf_counter()
        got = solve(inst, opts)
        ref = brute_force_solve(inst, min(p.rhs_bound, p.box_bound))
        ok = (got.status, got.objective) == (ref.status, ref.value)
        bad += not ok
        print(f"{k:4d} s={p.s} d={p.d} m={p.m} t={p.t} n={p.n} {got.status:<10} "
              f"{str(got.objective):>6} {'ok' if ok else 'MISMATCH'} "
              f"{got.stats.get('guesses', 0):>5} guesses {time.perf_counter() - start:6.2f}s")
    print(f"{args.count - bad}/{args.count} agree")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
