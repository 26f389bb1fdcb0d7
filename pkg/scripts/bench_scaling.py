"""Guess counts and runtime of the full algorithm against the number of bricks."""

import argparse

from fourblock.acceptance import bench_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="2,4,8,16,32")
    args = ap.parse_args()
    ns = [int(x) for x in args.ns.split(",")]
    print(f"{'n':>4} {'|H|':>5} {'faces':>6} {'guesses':>8} {'guesses/n':>9} {'seconds':>8}")
    for r in bench_rows(ns):
        print(f"{r['n']:>4} {r['lifted_hyperplanes']:>5} {r['faces']:>6} {r['guesses']:>8} "
              f"{r['guesses'] / r['n']:>9.2f} {r['wall_time']:>8.2f}")


if __name__ == "__main__":
    main()
