"""Desk-scale sweep over the six simulated structures and the four hybrid
methods (plus the random-orientation skeleton baseline), for both noises.

    python scripts/run_table2.py --seeds 20 --out results/
"""
import argparse
from pathlib import Path

from hybridcd.bench import ALL_METHODS, report_csv, report_table, run_benchmark
from hybridcd.datagen import STRUCTURES
from hybridcd.hybrid import DiscoveryConfig

STRUCTURE_ORDER = ["v-structure", "fork", "diamond", "unfaithful-diamond",
                   "cyclic-fork", "cyclic-diamond"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--T", type=int, default=1000)
    ap.add_argument("--gamma", type=int, default=5)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--noise", nargs="+", default=["uniform", "gaussian"])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    assert set(STRUCTURE_ORDER) == set(STRUCTURES)

    args.out.mkdir(parents=True, exist_ok=True)
    cfg = DiscoveryConfig(args.gamma, args.alpha)
    for noise in args.noise:
        reps = run_benchmark(ALL_METHODS, STRUCTURE_ORDER, noise, args.seeds, args.T, cfg,
                             args.workers)
        print(f"\n== {noise} noise ==")
        print(report_table(reps))
        (args.out / f"table_{noise}.csv").write_text(report_csv(reps))


if __name__ == "__main__":
    main()
