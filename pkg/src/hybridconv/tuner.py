"""Choosing FFT decomposition parameters by measurement.

Every search takes an injectable ``clock`` (a zero-argument callable returning
seconds) so the selection logic can be tested against synthetic cost tables.
"""
from __future__ import annotations

import itertools
import json
import os
import random
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .dealias1d import HybridPlan1D, _hybrid_raw
from .numeric import divisors, generate_multiples

Clock = Callable[[], float]
Problem = Callable[[int, int], object]


@dataclass(frozen=True)
class AxisTune:
    """Parameters for one dimension: lengths, FFT size and execution knobs."""

    L: int
    M: int
    m: int
    lam: int = 1
    C: int = 1
    D: int = 1
    I: bool = False

    def __post_init__(self):
        if self.L > self.M:
            raise ValueError(f"L={self.L} exceeds M={self.M}")
        if min(self.m, self.lam, self.C, self.D) < 1:
            raise ValueError("m, lam, C and D must be >= 1")


@dataclass(frozen=True)
class TuneVector:
    axes: tuple[AxisTune, ...]
    time: float = float("nan")

    def __getitem__(self, i: int) -> AxisTune:
        return self.axes[i]

    def __len__(self) -> int:
        return len(self.axes)


@dataclass
class TimingRecord:
    problem: tuple[int, int, int, int]
    m_values: list[int]
    time_values: list[float]
    repetitions: int = 1

    def __post_init__(self):
        self.problem = tuple(int(v) for v in self.problem)
        self.m_values = [int(v) for v in self.m_values]
        self.time_values = [float(v) for v in self.time_values]
        if len(self.problem) != 4 or min(self.problem) < 1:
            raise ValueError(f"problem key must be 4 positive integers, got {self.problem}")
        if not self.m_values or len(self.m_values) != len(self.time_values):
            raise ValueError("m_values and time_values must be nonempty and equally long")
        if any(t <= 0 for t in self.time_values):
            raise ValueError("time values must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    def best(self) -> tuple[int, float]:
        """(m, time) at the first minimal time."""
        i = min(range(len(self.time_values)), key=self.time_values.__getitem__)
        return self.m_values[i], self.time_values[i]


@dataclass
class SearchSpace:
    m_candidates: list[int]
    lam_candidates: list[int] = field(default_factory=lambda: [1])

    def __post_init__(self):
        for name in ("m_candidates", "lam_candidates"):
            vals = getattr(self, name)
            if not vals:
                raise ValueError(f"{name} is empty")
            if len(set(vals)) != len(vals):
                raise ValueError(f"{name} has duplicates: {vals}")
            if min(vals) < 1:
                raise ValueError(f"{name} must be positive")

    def pairs(self, max_block: int | None = None) -> list[tuple[int, int]]:
        """All (m, lam) pairs, ascending; optionally only those with lam*m <= max_block."""
        out = sorted(itertools.product(self.m_candidates, self.lam_candidates))
        if max_block is not None:
            out = [(m, lam) for m, lam in out if m * lam <= max_block]
        return out

    def __len__(self) -> int:
        return len(self.m_candidates) * len(self.lam_candidates)

    @classmethod
    def from_divisors(cls, L_f: int, L_g: int, M: int) -> "SearchSpace":
        return cls(sorted(set(divisors(L_f)) | {M}), divisors(L_g))

    @classmethod
    def smooth(cls, M: int, lam_candidates: Sequence[int] = (1,)) -> "SearchSpace":
        return cls(generate_multiples(12, 12, 12, 12, M), list(lam_candidates))


@dataclass
class SearchResult:
    m: int
    lam: int
    time: float
    trials: list[tuple[int, int, float]] = field(default_factory=list)

    def __iter__(self):
        return iter((self.m, self.lam, self.time))

    def per_m(self) -> tuple[list[int], list[float]]:
        """Best time for each distinct m, in ascending m."""
        best: dict[int, float] = {}
        for m, _, t in self.trials:
            best[m] = min(t, best.get(m, float("inf")))
        ms = sorted(best)
        return ms, [best[m] for m in ms]


def time_conv(problem: Callable[[], object], repetitions: int = 2,
              clock: Clock = time.perf_counter) -> float:
    """Mean wall time of ``problem()`` over ``repetitions`` runs."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    total = 0.0
    for _ in range(repetitions):
        start = clock()
        problem()
        total += clock() - start
    return total / repetitions


def _measure(pairs: Iterable[tuple[int, int]], problem: Problem, clock: Clock,
             repetitions: int) -> SearchResult:
    best = None
    trials = []
    for m, lam in sorted(pairs):
        t = time_conv(lambda: problem(m, lam), repetitions, clock)
        trials.append((m, lam, t))
        # strict < keeps the lexicographically smallest pair on ties
        if best is None or t < best[2]:
            best = (m, lam, t)
    if best is None:
        raise ValueError("search space is empty")
    return SearchResult(*best, trials=trials)


def grid_search(space: SearchSpace, problem: Problem, clock: Clock = time.perf_counter,
                repetitions: int = 2, max_block: int | None = None) -> SearchResult:
    """Time every (m, lam) pair; ties go to the smallest pair."""
    return _measure(space.pairs(max_block), problem, clock, repetitions)


def random_search(space: SearchSpace, n_samples: int, seed: int, problem: Problem,
                  clock: Clock = time.perf_counter, repetitions: int = 2,
                  max_block: int | None = None) -> SearchResult:
    """Time ``n_samples`` pairs drawn without replacement (all pairs if more)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    pairs = space.pairs(max_block)
    chosen = random.Random(seed).sample(pairs, min(n_samples, len(pairs)))
    return _measure(chosen, problem, clock, repetitions)


def conv_problem(L_f: int, L_g: int, M: int, batch: int = 1, seed: int = 0) -> Problem:
    """A timed 1D workload: ``batch`` hybrid convolutions of random data."""
    rng = np.random.default_rng(seed)
    shape_f = (batch, L_f) if batch > 1 else (L_f,)
    shape_g = (batch, L_g) if batch > 1 else (L_g,)
    f = rng.standard_normal(shape_f) + 1j * rng.standard_normal(shape_f)
    g = rng.standard_normal(shape_g) + 1j * rng.standard_normal(shape_g)

    def run(m: int, lam: int):
        return _hybrid_raw(f, g, HybridPlan1D.build(L_f, L_g, M, m, lam))

    return run


def per_dimension_tune(shape: Sequence[tuple[int, int]], spaces: Sequence[SearchSpace],
                       make_problem: Callable[[int, int, int], Problem] | None = None,
                       clock: Clock = time.perf_counter, repetitions: int = 2,
                       copies: int = 1, prune: bool = False) -> tuple[TuneVector, list[SearchResult]]:
    """Search each axis separately rather than the joint grid.

    ``shape`` lists ``(L, M)`` per axis. ``make_problem(axis, L, M)`` builds
    the 1D workload for an axis; by default it is a batch of equal-length
    convolutions along that axis, one per row of the other axes. With
    ``prune`` an axis skips pairs whose block ``lam*m`` exceeds its ``M``.
    """
    if len(shape) != len(spaces):
        raise ValueError("need one search space per axis")
    if make_problem is None:
        def make_problem(axis, L, M):
            others = [l for i, (l, _) in enumerate(shape) if i != axis]
            return conv_problem(L, L, M, batch=int(np.prod(others)) if others else 1)

    results = []
    axes = []
    for axis, ((L, M), space) in enumerate(zip(shape, spaces)):
        res = grid_search(space, make_problem(axis, L, M), clock, repetitions,
                          max_block=M if prune else None)
        results.append(res)
        axes.append(AxisTune(L=L, M=M, m=res.m, lam=res.lam, C=copies))
    return TuneVector(tuple(axes), time=sum(r.time for r in results)), results


# --- selection heuristics over cached timings --------------------------------

def sort_lists_topk(A: Sequence, B: Sequence[float], k: int):
    """First ``k`` entries of A and B sorted by B, plus their original indices."""
    if len(A) != len(B):
        raise ValueError(f"length mismatch: {len(A)} vs {len(B)}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    order = sorted(range(len(B)), key=B.__getitem__)[:k]
    return [A[i] for i in order], [B[i] for i in order], order


def sort_lists_eps(A: Sequence, B: Sequence[float], eps: float):
    """Entries of A whose time is within ``eps`` of the spread above the best.

    Threshold is ``t_best + eps*(t_worst - t_best)``; the second list holds
    each kept time normalized to [0, 1] over that spread.
    """
    if len(A) != len(B):
        raise ValueError(f"length mismatch: {len(A)} vs {len(B)}")
    if not A:
        raise ValueError("empty input")
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    order = sorted(range(len(B)), key=B.__getitem__)
    t_best, t_worst = B[order[0]], B[order[-1]]
    spread = t_worst - t_best
    if spread == 0:
        return [A[i] for i in order], [0.0] * len(order)
    # B <= t_best + eps*spread, tested on the normalized value so eps=1 keeps t_worst exactly
    norm = [(B[i] - t_best) / spread for i in order]
    kept = [(A[i], v) for i, v in zip(order, norm) if v <= eps]
    return [a for a, _ in kept], [v for _, v in kept]


def epsilon_smallest_rectangle(square: TimingRecord, rects: Mapping[int, TimingRecord],
                               eps: float) -> int | None:
    """Smallest rectangle height whose near-best m set contains the square's best m."""
    if not rects:
        raise ValueError("no rectangle records")
    m_star, _ = square.best()
    for Ly in sorted(rects):
        rec = rects[Ly]
        near, _ = sort_lists_eps(rec.m_values, rec.time_values, eps)
        if m_star in near:
            return Ly
    return None


@dataclass(frozen=True)
class SkinnyReport:
    m_transfer: int
    time_at_transfer: float | None
    m_best: int
    time_best: float

    @property
    def hit(self) -> bool:
        return self.time_at_transfer is not None

    @property
    def slowdown(self) -> float | None:
        return None if self.time_at_transfer is None else self.time_at_transfer / self.time_best


def skinny_estimate(square: TimingRecord, rect: TimingRecord) -> SkinnyReport:
    """Reuse the rectangle's best m on the square and look up what it costs there."""
    m_transfer, _ = rect.best()
    m_best, t_best = square.best()
    t = None
    if m_transfer in square.m_values:
        t = square.time_values[square.m_values.index(m_transfer)]
    return SkinnyReport(m_transfer, t, m_best, t_best)


# --- record cache -------------------------------------------------------------

class RecordNotFound(KeyError):
    pass


class RecordCache:
    """One JSON file per problem key, named ``rec_Lx<Lx>_Ly<Ly>_Mx<Mx>_My<My>``.

    File content::

        {"problem": [Lx, Ly, Mx, My], "m_values": [...],
         "time_values": [...], "repetitions": R}
    """

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    @staticmethod
    def filename(key: Sequence[int]) -> str:
        Lx, Ly, Mx, My = (int(v) for v in key)
        return f"rec_Lx{Lx}_Ly{Ly}_Mx{Mx}_My{My}"

    def path(self, key: Sequence[int]) -> Path:
        return self.directory / self.filename(key)

    def put(self, key: Sequence[int], record: TimingRecord) -> Path:
        key = tuple(int(v) for v in key)
        if len(key) != 4 or min(key) < 1:
            raise ValueError(f"invalid key {key}")
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = {"problem": list(record.problem), "m_values": record.m_values,
                   "time_values": record.time_values, "repetitions": record.repetitions}
        target = self.path(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp_")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, target)
        return target

    def get(self, key: Sequence[int]) -> TimingRecord:
        target = self.path(key)
        try:
            payload = json.loads(target.read_text())
        except FileNotFoundError:
            raise RecordNotFound(tuple(key)) from None
        return TimingRecord(**payload)

    def keys(self) -> list[tuple[int, int, int, int]]:
        out = []
        for p in sorted(self.directory.glob("rec_Lx*_Ly*_Mx*_My*")) if self.directory.exists() else []:
            parts = p.name[4:].split("_")
            out.append(tuple(int(s[2:]) for s in parts))
        return out
