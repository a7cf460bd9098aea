"""Data generation used by the scripts in ``scripts/`` and the acceptance suite."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dealias1d import direct_conv, hybrid_conv_1d_raw
from .numeric import divisors, generate_multiples
from .tuner import (RecordCache, SearchSpace, TimingRecord, epsilon_smallest_rectangle,
                    per_dimension_tune, skinny_estimate)


def aliasing_plan(L_f: int, M: int) -> tuple[int, int]:
    """(m, lam) with lam*m dividing M, so the executed length is exactly M."""
    m = max(d for d in divisors(M) if d <= L_f)
    return m, 1


def padding_error(f: np.ndarray, g: np.ndarray, M: int) -> tuple[float, int, int]:
    """Relative L2 error of hybrid output padded to ``M`` against direct summation.

    Returns (error, m, lam). Output entries the padded transform cannot hold
    count as zeros, so insufficient padding shows up as error.
    """
    if f.size > g.size:
        f, g = g, f
    ref = direct_conv(f, g)
    m, lam = aliasing_plan(f.size, M)
    h = hybrid_conv_1d_raw(f, g, M, m, lam)
    got = np.zeros_like(ref)
    n = min(h.size, ref.size)
    got[:n] = h[:n]
    return float(np.linalg.norm(got - ref) / np.linalg.norm(ref)), m, lam


def padding_error_curve(L_f_values: Sequence[int] = (2, 12), L_g_values: Iterable[int] = range(2, 65),
                        pad_offsets: Sequence[int] = (-1, 0, 1, 2, 5), seed: int = 0) -> list[dict]:
    """Error vs padded length for fixed ``L_f`` and a sweep of ``L_g``.

    ``M = L_f + L_g - 1 + offset`` for each offset; offsets below zero alias.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for L_f in L_f_values:
        for L_g in L_g_values:
            f = rng.standard_normal(L_f) + 1j * rng.standard_normal(L_f)
            g = rng.standard_normal(L_g) + 1j * rng.standard_normal(L_g)
            N = L_f + L_g - 1
            for off in pad_offsets:
                M = N + off
                if M < max(L_f, L_g):
                    continue
                err, m, lam = padding_error(f, g, M)
                rows.append({"L_f": L_f, "L_g": L_g, "M": M, "offset": off,
                             "m": m, "lambda": lam, "l2_error": err})
    return rows


def write_csv(rows: list[dict], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    return path


def smooth_sizes(bound: int, lower: int = 2) -> list[int]:
    return [n for n in generate_multiples(12, 12, 12, 12, bound) if n >= lower]


def x_axis_record(Lx: int, Ly: int, repetitions: int = 2, cache: RecordCache | None = None,
                  smooth: bool = False) -> TimingRecord:
    """Tune an ``Lx x Ly`` problem padded to ``2Lx x 2Ly``; keep the x-axis timings.

    Reads from / writes to ``cache`` when given.
    """
    key = (Lx, Ly, 2 * Lx, 2 * Ly)
    if cache is not None:
        try:
            return cache.get(key)
        except KeyError:
            pass
    spaces = [SearchSpace.smooth(2 * Lx) if smooth else SearchSpace.from_divisors(Lx, Lx, 2 * Lx),
              SearchSpace([1])]
    # only the x axis matters here; a single y candidate keeps the y search trivial
    _, results = per_dimension_tune([(Lx, 2 * Lx), (Ly, 2 * Ly)], spaces,
                                    repetitions=repetitions, prune=True)
    ms, ts = results[0].per_m()
    rec = TimingRecord(key, ms, ts, repetitions)
    if cache is not None:
        cache.put(key, rec)
    return rec


def epsilon_table(squares: Sequence[int], eps_values: Sequence[float], repetitions: int = 2,
                  cache: RecordCache | None = None) -> list[dict]:
    """Smallest rectangle height per (square, eps) over smooth heights <= square."""
    rows = []
    for Lx in squares:
        square = x_axis_record(Lx, Lx, repetitions, cache)
        rects = {Ly: x_axis_record(Lx, Ly, repetitions, cache) for Ly in smooth_sizes(Lx)}
        for eps in eps_values:
            rows.append({"Lx": Lx, "eps": eps,
                         "Ly": epsilon_smallest_rectangle(square, rects, eps)})
    return rows


def skinny_table(squares: Sequence[int], height: int = 32, repetitions: int = 2,
                 cache: RecordCache | None = None) -> list[dict]:
    rows = []
    for Lx in squares:
        rep = skinny_estimate(x_axis_record(Lx, Lx, repetitions, cache),
                              x_axis_record(Lx, min(height, Lx), repetitions, cache))
        rows.append({"Lx": Lx, "m_transfer": rep.m_transfer, "time_at_transfer": rep.time_at_transfer,
                     "m_best": rep.m_best, "time_best": rep.time_best})
    return rows
