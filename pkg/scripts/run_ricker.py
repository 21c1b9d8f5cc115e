"""Ricker food-web benchmark for S = 5 and S = 10 species.

    python scripts/run_ricker.py --seeds 10
"""
import argparse
from pathlib import Path

from hybridcd.bench import ALL_METHODS, report_csv, report_table, run_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--species", type=int, nargs="+", default=[5, 10])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for S in args.species:
        reps = run_benchmark(ALL_METHODS, ["ricker"], n_seeds=args.seeds,
                             workers=args.workers, species=S)
        print(f"\n== Ricker, S = {S} ==")
        print(report_table(reps))
        (args.out / f"ricker_{S}.csv").write_text(report_csv(reps))


if __name__ == "__main__":
    main()
