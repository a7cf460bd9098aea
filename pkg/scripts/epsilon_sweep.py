"""Rectangle-transfer experiments on measured x-axis timings.

For each square size, tune the square and every smooth-height rectangle, then
report (a) the smallest rectangle height whose near-best m set contains the
square's best m, for several eps, and (b) how the best m of a fixed-height
rectangle performs on the square. Timings are cached, so reruns are cheap.
"""
import argparse

from hybridconv.experiments import epsilon_table, skinny_table, write_csv
from hybridconv.tuner import RecordCache


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--squares", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.0, 0.05, 0.1, 0.25, 0.5, 1.0])
    ap.add_argument("--height", type=int, default=32)
    ap.add_argument("--reps", type=int, default=2)
    ap.add_argument("--cache", default="results/records")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    cache = RecordCache(args.cache)
    eps_rows = epsilon_table(args.squares, args.eps, args.reps, cache)
    skinny_rows = skinny_table(args.squares, args.height, args.reps, cache)
    print(f"wrote {write_csv(eps_rows, f'{args.out}/epsilon_table.csv')}")
    print(f"wrote {write_csv(skinny_rows, f'{args.out}/skinny_table.csv')}")
    for r in skinny_rows:
        status = "miss" if r["time_at_transfer"] is None else \
            f"{r['time_at_transfer'] / r['time_best']:.2f}x best"
        print(f"Lx={r['Lx']}: transfer m={r['m_transfer']} ({status}), best m={r['m_best']}")


if __name__ == "__main__":
    main()
