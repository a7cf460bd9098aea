"""Padding-error curve: relative L2 error vs direct convolution as L_g sweeps 2..64.

Writes a CSV with one row per (L_f, L_g, offset). Rows with offset >= 0 should
sit at rounding level; offset -1 aliases.
"""
import argparse

from hybridconv.experiments import padding_error_curve, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/l2_curve.csv")
    ap.add_argument("--lf", type=int, nargs="+", default=[2, 12])
    ap.add_argument("--lg-max", type=int, default=64)
    ap.add_argument("--offsets", type=int, nargs="+", default=[-1, 0, 1, 2, 5])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = padding_error_curve(args.lf, range(2, args.lg_max + 1), args.offsets, args.seed)
    path = write_csv(rows, args.out)
    for off in sorted(set(args.offsets)):
        errs = [r["l2_error"] for r in rows if r["offset"] == off]
        if errs:
            print(f"offset {off:+d}: {len(errs)} rows, error range [{min(errs):.2e}, {max(errs):.2e}]")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
