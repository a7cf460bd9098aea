"""Benchmark a prime-length problem (default L_f=64, L_g=509, M=572).

Compares direct, next-smooth and next-power-of-two explicit padding with the
tuned hybrid method on the current backend. The ratio is hardware dependent.
"""
import argparse
import sys

from hybridconv.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lf", type=int, default=64)
    ap.add_argument("--lg", type=int, default=509)
    ap.add_argument("--M", type=int, default=572)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--out", default="results/bench_prime")
    ap.add_argument("--backend", default=None)
    args = ap.parse_args()

    argv = ["bench", f"-Lx={args.lf}", f"-Ly={args.lg}", f"-Mx={args.M}",
            f"-R={args.reps}", f"-out={args.out}", "-t"]
    if args.backend:
        argv.append(f"-backend={args.backend}")
    sys.exit(cli_main(argv))


if __name__ == "__main__":
    main()
