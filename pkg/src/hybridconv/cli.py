"""Command-line front end.

Flags use the single-dash ``-name=value`` style, e.g.::

    hybridconv tune -Lx=512 -Ly=32 -Mx=1024 -My=64 -T=1

Exit status: 0 on success, 1 for usage errors, 2 for runtime errors.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from . import numeric
from .dealias1d import direct_conv, explicit_conv, hybrid_conv_1d
from .dealias2d import ConvMode, direct_conv_2d, hybrid_conv_2d, image_convolve, kernel_names
from .formats import PnmImage, emit_timing_lines, read_pnm, write_pnm
from .tuner import (RecordCache, SearchSpace, TimingRecord, conv_problem, grid_search,
                    per_dimension_tune, time_conv)

SUBCOMMANDS = ("conv1d", "conv2d", "image", "tune", "bench", "multiples")
BENCH_COLUMNS = ["strategy", "Lx", "Ly", "Mx", "My", "m", "lambda", "mean_seconds"]
GATE_TOL = 1e-9


class UsageError(Exception):
    def __init__(self, message: str, usage: str = ""):
        super().__init__(message)
        self.usage = usage


class GateFailure(RuntimeError):
    pass


@dataclass
class CliInvocation:
    subcommand: str
    flags: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hybridconv", allow_abbrev=False,
                     description="Hybrid-dealiased FFT convolution tools.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, allow_abbrev=False)
        p.add_argument("-T", type=_positive_int, default=1, help="FFT worker threads")
        p.add_argument("-R", type=_positive_int, default=2, help="timing repetitions")
        p.add_argument("-t", action="store_true", help="print the full timing table")
        p.add_argument("-seed", type=int, default=0)
        p.add_argument("-backend", choices=numeric.available_backends(), default=None)
        return p

    p = add("conv1d", "convolve two 1D sequences (random or from -in JSON)")
    p.add_argument("-Lx", type=_positive_int, help="length of f")
    p.add_argument("-Ly", type=_positive_int, help="length of g")
    p.add_argument("-Mx", type=_positive_int, help="padded length (default L_f+L_g-1)")
    p.add_argument("-m", type=_positive_int)
    p.add_argument("-lambda", dest="lam", type=_positive_int, default=1)
    p.add_argument("-in", dest="input")
    p.add_argument("-out")

    p = add("conv2d", "convolve two random Ly x Lx arrays")
    p.add_argument("-Lx", type=_positive_int, required=True)
    p.add_argument("-Ly", type=_positive_int, required=True)
    p.add_argument("-Mx", type=_positive_int)
    p.add_argument("-My", type=_positive_int)
    p.add_argument("-m", type=_positive_int)
    p.add_argument("-lambda", dest="lam", type=_positive_int, default=1)
    p.add_argument("-mode", choices=[m.value for m in ConvMode], default="full")
    p.add_argument("-out")

    p = add("image", "filter a binary PGM/PPM image")
    p.add_argument("-in", dest="input", required=True)
    p.add_argument("-out", required=True)
    p.add_argument("-kernel", choices=kernel_names(), default="identity")
    p.add_argument("-mode", choices=[m.value for m in ConvMode], default="same_big")
    p.add_argument("-m", type=_positive_int)
    p.add_argument("-lambda", dest="lam", type=_positive_int, default=1)

    p = add("tune", "per-axis parameter search for an Lx x Ly problem padded to Mx x My")
    for flag in ("-Lx", "-Ly", "-Mx", "-My"):
        p.add_argument(flag, type=_positive_int, required=True)
    p.add_argument("-cache", default="records")
    p.add_argument("-smooth", action="store_true", help="search 7-smooth m instead of divisors")

    p = add("bench", "time direct, explicit and tuned hybrid 1D convolution")
    p.add_argument("-Lx", type=_positive_int, required=True, help="length of f")
    p.add_argument("-Ly", type=_positive_int, required=True, help="length of g")
    p.add_argument("-Mx", type=_positive_int, help="padded length (default L_f+L_g-1)")
    p.add_argument("-out", default=".")
    p.add_argument("-cache", default=None, help="record directory (default <out>/records)")

    p = sub.add_parser("multiples", help="list 7-smooth sizes up to a bound", allow_abbrev=False)
    p.add_argument("-bound", type=_positive_int, required=True)
    for cap in ("-amax", "-bmax", "-cmax", "-dmax"):
        p.add_argument(cap, type=int, default=None)
    return parser


def parse_args(argv: Sequence[str]) -> CliInvocation:
    parser = _build_parser()
    ns = parser.parse_args(list(argv))
    flags = {k: v for k, v in vars(ns).items() if k != "subcommand"}
    if ns.subcommand == "conv1d" and flags.get("input") is None:
        missing = [f"-{k}" for k in ("Lx", "Ly") if flags.get(k) is None]
        if missing:
            raise UsageError(f"conv1d needs {' and '.join(missing)} (or -in)",
                             parser.format_usage())
    return CliInvocation(ns.subcommand, flags)


def _workers(n: int):
    if n > 1 and numeric.current_backend() == "scipy":
        import scipy.fft
        return scipy.fft.set_workers(n)
    return contextlib.nullcontext()


def _random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _rel_err(a, b) -> float:
    scale = np.linalg.norm(b)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / (scale if scale else 1.0))


def _complex_list(a) -> list:
    return [[float(z.real), float(z.imag)] for z in np.ravel(a)]


def _load_sequence(items) -> np.ndarray:
    return np.array([complex(*v) if isinstance(v, list) else complex(v) for v in items])


# --- subcommands -------------------------------------------------------------

def _cmd_conv1d(flags: dict, out: IO[str]) -> int:
    rng = np.random.default_rng(flags["seed"])
    if flags["input"]:
        data = json.loads(Path(flags["input"]).read_text())
        f, g = _load_sequence(data["f"]), _load_sequence(data["g"])
    else:
        f, g = _random_complex(rng, flags["Lx"]), _random_complex(rng, flags["Ly"])
    if f.size > g.size:
        f, g = g, f
    N = f.size + g.size - 1
    M = flags["Mx"] or N
    m = flags["m"] or f.size
    lam = flags["lam"]
    start = time.perf_counter()
    h = hybrid_conv_1d(f, g, M, m, lam)
    elapsed = time.perf_counter() - start
    err = _rel_err(h, direct_conv(f, g)[:h.size])
    out.write(f"L_f {f.size}  L_g {g.size}  M {M}  fft size {m}  ratio {lam}\n")
    out.write(f"relative L2 error vs direct: {err:.3e}\nseconds: {elapsed:.6g}\n")
    if flags["out"]:
        payload = {"M": M, "m": m, "lambda": lam, "h": _complex_list(h), "l2_error": err}
        Path(flags["out"]).write_text(json.dumps(payload))
    return 0


def _cmd_conv2d(flags: dict, out: IO[str]) -> int:
    rng = np.random.default_rng(flags["seed"])
    Lx, Ly = flags["Lx"], flags["Ly"]
    f = _random_complex(rng, (Ly, Lx))
    g = _random_complex(rng, (Ly, Lx))
    Mx, My = flags["Mx"] or 2 * Lx - 1, flags["My"] or 2 * Ly - 1
    m = flags["m"] or min(Lx, Ly)
    start = time.perf_counter()
    h = hybrid_conv_2d(f, g, (My, Mx), m, flags["lam"], flags["mode"])
    elapsed = time.perf_counter() - start
    ref = direct_conv_2d(f, g)
    out.write(f"shape {h.shape}  seconds {elapsed:.6g}\n")
    if flags["mode"] == "full" and Mx >= 2 * Lx - 1 and My >= 2 * Ly - 1:
        out.write(f"relative L2 error vs direct: {_rel_err(h, ref):.3e}\n")
    if flags["out"]:
        np.save(flags["out"], h)
    return 0


def _cmd_image(flags: dict, out: IO[str]) -> int:
    src = read_pnm(flags["input"])
    result = image_convolve(src.to_array(), flags["kernel"], flags["mode"],
                            m=flags["m"], lam=flags["lam"])
    write_pnm(PnmImage.from_array(result), flags["out"])
    out.write(f"wrote {flags['out']} ({result.shape[1]}x{result.shape[0]}, "
              f"kernel {flags['kernel']}, mode {flags['mode']})\n")
    return 0


def _cmd_tune(flags: dict, out: IO[str]) -> int:
    Lx, Ly, Mx, My = flags["Lx"], flags["Ly"], flags["Mx"], flags["My"]
    if Lx > Mx or Ly > My:
        raise ValueError(f"padded sizes ({Mx}, {My}) must cover ({Lx}, {Ly})")
    shape = [(Lx, Mx), (Ly, My)]
    if flags["smooth"]:
        spaces = [SearchSpace.smooth(M) for _, M in shape]
    else:
        spaces = [SearchSpace.from_divisors(L, L, M) for L, M in shape]
    tv, results = per_dimension_tune(shape, spaces, repetitions=flags["R"],
                                     copies=flags["T"], prune=True)
    ms, ts = results[0].per_m()
    record = TimingRecord((Lx, Ly, Mx, My), ms, ts, flags["R"])
    path = RecordCache(flags["cache"]).put(record.problem, record)
    emit_timing_lines(record, sink=out)
    for name, ax in zip("xy", tv.axes):
        out.write(f"axis {name}: fft size {ax.m}, ratio {ax.lam}, copies {ax.C}\n")
    if flags["t"]:
        for name, res in zip("xy", results):
            for m, lam, t in res.trials:
                out.write(f"  {name} {m:>6} {lam:>4} {t:.6g}\n")
    out.write(f"record: {path}\n")
    return 0


def _gate(f, g, m, lam) -> float:
    """Hybrid vs direct on a truncated copy of the problem."""
    ft, gt = f[:min(f.size, 16)], g[:min(g.size, 64)]
    if ft.size > gt.size:
        ft, gt = gt, ft
    N = ft.size + gt.size - 1
    ref = direct_conv(ft, gt)
    err = max(_rel_err(hybrid_conv_1d(ft, gt, N, m, lam), ref),
              _rel_err(explicit_conv(ft, gt, numeric.next_pow2(N))[:N], ref))
    if err > GATE_TOL:
        raise GateFailure(f"correctness gate failed for m={m}, lambda={lam}: "
                          f"relative error {err:.3e} > {GATE_TOL}")
    return err


def run_bench(inv: CliInvocation, out: IO[str] = sys.stdout) -> int:
    flags = inv.flags
    rng = np.random.default_rng(flags["seed"])
    Lf, Lg = sorted((flags["Lx"], flags["Ly"]))
    N = Lf + Lg - 1
    M = flags["Mx"] or N
    if M < Lg:
        raise ValueError(f"padded length {M} shorter than input {Lg}")
    reps = flags["R"]
    f, g = _random_complex(rng, Lf), _random_complex(rng, Lg)
    key = (Lf, Lg, M, 1)

    _gate(f, g, Lf, 1)
    space = SearchSpace.from_divisors(Lf, Lg, M)
    problem = conv_problem(Lf, Lg, M, seed=flags["seed"])
    tuned = grid_search(space, problem, repetitions=reps, max_block=max(M, Lg))
    _gate(f, g, tuned.m, tuned.lam)
    full_err = _rel_err(hybrid_conv_1d(f, g, M, tuned.m, tuned.lam), direct_conv(f, g)[:min(M, N)])
    if M >= N and full_err > GATE_TOL:
        raise GateFailure(f"tuned hybrid disagrees with direct: {full_err:.3e}")

    rows = []

    def row(strategy, m, lam, seconds):
        rows.append(dict(zip(BENCH_COLUMNS, [strategy, Lf, Lg, M, 1, m, lam, seconds])))

    if Lf * Lg <= 1 << 20:
        row("direct", None, None, time_conv(lambda: direct_conv(f, g), reps))
    for label, size in (("explicit_smooth", numeric.next_smooth(max(M, N))),
                        ("explicit_pow2", numeric.next_pow2(max(M, N)))):
        row(label, size, 1, time_conv(lambda: explicit_conv(f, g, size), reps))
    row("hybrid", tuned.m, tuned.lam,
        time_conv(lambda: hybrid_conv_1d(f, g, M, tuned.m, tuned.lam), reps))

    ms, ts = tuned.per_m()
    record = TimingRecord(key, ms, ts, reps)
    emit_timing_lines(record, optimal_time=tuned.time, sink=out)
    by = {r["strategy"]: r["mean_seconds"] for r in rows}
    ratio = by["hybrid"] / by["explicit_pow2"]
    out.write(f"hybrid / explicit_pow2 time ratio: {ratio:.4g}\n")
    if flags["t"]:
        for r in rows:
            out.write(f"  {r['strategy']:<16} {r['mean_seconds']:.6g}\n")

    outdir = Path(flags["out"])
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "bench.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
            w.writeheader()
            w.writerows({k: ("" if v is None else v) for k, v in r.items()} for r in rows)
        summary = {"rows": rows, "ratio_hybrid_over_explicit_pow2": ratio,
                   "gate": "pass", "backend": numeric.current_backend()}
        (outdir / "bench.json").write_text(json.dumps(summary, indent=2))
        RecordCache(flags["cache"] or outdir / "records").put(key, record)
    except OSError as exc:
        raise OSError(f"could not write benchmark output under {outdir}: {exc}") from exc
    return 0


def _cmd_multiples(flags: dict, out: IO[str]) -> int:
    bound = flags["bound"]
    default_cap = bound.bit_length()
    caps = [default_cap if flags[c] is None else flags[c] for c in ("amax", "bmax", "cmax", "dmax")]
    out.write(" ".join(map(str, numeric.generate_multiples(*caps, bound))) + "\n")
    return 0


_HANDLERS = {
    "conv1d": _cmd_conv1d,
    "conv2d": _cmd_conv2d,
    "image": _cmd_image,
    "tune": _cmd_tune,
    "bench": lambda flags, out: run_bench(CliInvocation("bench", flags), out),
    "multiples": _cmd_multiples,
}


def main(argv: Sequence[str] | None = None, out: IO[str] | None = None,
         err: IO[str] | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        inv = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        err.write(exc.usage + f"hybridconv: error: {exc}\n")
        return 1
    previous = numeric.current_backend()
    try:
        if inv.flags.get("backend"):
            numeric.use_backend(inv.flags["backend"])
        with _workers(inv.flags.get("T", 1)):
            return _HANDLERS[inv.subcommand](inv.flags, out)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        err.write(f"hybridconv: error: {exc}\n")
        return 2
    finally:
        numeric.use_backend(previous)


if __name__ == "__main__":
    sys.exit(main())
