"""One-dimensional dealiased convolution.

Three routes to the same linear convolution ``h_k = sum_p f_p g_{k-p}``:

* :func:`direct_conv` -- brute-force reference.
* :func:`explicit_conv` -- zero pad both inputs to ``M`` and use one FFT each.
* :func:`hybrid_conv_1d` -- pad explicitly only to a multiple of the FFT size
  ``m`` and reach ``M`` implicitly through residue transforms, pairing the
  residues of the shorter input with those of the longer one.

All transforms follow the sign/normalization convention of
:mod:`hybridconv.numeric`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .numeric import as_buffer, ceilquotient, fft


@lru_cache(maxsize=4096)
def _phase_line(R: int, n: int, qm: int) -> np.ndarray:
    """exp(2*pi*i*R*j/qm) for j in [0, n)."""
    j = (np.arange(n, dtype=np.int64) * (R % qm)) % qm
    out = np.exp(2j * np.pi * j / qm)
    out.setflags(write=False)
    return out


def direct_conv(f, g) -> np.ndarray:
    """Full linear convolution by direct summation, length L_f + L_g - 1."""
    f = as_buffer(f, "f")
    g = as_buffer(g, "g")
    if f.size > g.size:
        f, g = g, f
    h = np.zeros(f.size + g.size - 1, dtype=np.complex128)
    for p, fp in enumerate(f):
        h[p:p + g.size] += fp * g
    return h


def explicit_conv(f, g, M: int) -> np.ndarray:
    """M-point cyclic convolution of the zero-padded inputs.

    When ``M >= L_f + L_g - 1`` the result is the linear convolution followed
    by zeros; otherwise the tail wraps onto the head.
    """
    f = as_buffer(f, "f")
    g = as_buffer(g, "g")
    if M < max(f.size, g.size):
        raise ValueError(f"padded length M={M} is shorter than an input "
                         f"(L_f={f.size}, L_g={g.size})")
    F = fft(np.pad(f, (0, M - f.size)), "forward")
    G = fft(np.pad(g, (0, M - g.size)), "forward")
    return fft(F * G, "backward")


class ResidueTriple(NamedTuple):
    ell_f: int
    lam: int
    r_f: int


def residue_match(ell_g: int, r_g: int, lam: int, q_g: int) -> ResidueTriple:
    """Map output index ``q_g*ell_g + r_g`` of the long input onto the short one.

    Returns ``(ell_f, lam_idx, r_f)`` with
    ``q_g*ell_g + r_g == lam*q_g*ell_f + r_f``.
    """
    if lam < 1 or q_g < 1:
        raise ValueError("lam and q_g must be positive")
    if not 0 <= r_g < q_g:
        raise ValueError(f"residue r_g={r_g} outside [0, q_g={q_g})")
    if ell_g < 0:
        raise ValueError("ell_g must be nonnegative")
    ell_f, lam_idx = divmod(ell_g, lam)
    return ResidueTriple(ell_f, lam_idx, q_g * lam_idx + r_g)


def _padded_blocks(x: np.ndarray, L: int, p: int, m: int) -> np.ndarray:
    if x.shape[-1] < L:
        raise ValueError(f"input has {x.shape[-1]} samples, expected at least L={L}")
    x = x[..., :L]
    if p * m > L:
        pad = [(0, 0)] * (x.ndim - 1) + [(0, p * m - L)]
        x = np.pad(x, pad)
    return x.reshape(x.shape[:-1] + (p, m))


def forward_residue(f, m: int, L: int, p: int, q: int, r: int,
                    lam: int = 1, M: int | None = None) -> np.ndarray:
    """Residue ``r`` of the forward transform of ``f`` zero-padded to ``q*m``.

    With ``lam == 1`` the result is ``[F_{q*l + r} for l in range(m)]``.
    With ``lam > 1`` it holds ``lam`` residues ``R = Q*k + r`` (``Q`` being
    ``ceil(M / (lam*m))``) interleaved at stride ``lam``, so entry
    ``lam*l + k`` is ``F_{q*l + Q*k + r}``. Operates on the last axis; leading
    axes are batch dimensions.
    """
    x = np.asarray(f, dtype=np.complex128)
    if min(m, L, p, q, lam) < 1:
        raise ValueError("m, L, p, q and lam must all be positive")
    if p != ceilquotient(L, m):
        raise ValueError(f"p={p} inconsistent with ceil(L/m)={ceilquotient(L, m)}")
    if p > q:
        raise ValueError(f"p={p} exceeds q={q}: input longer than padded length")
    if M is None:
        M = q * m
    Q = ceilquotient(M, lam * m)
    if q != lam * Q:
        raise ValueError(f"q={q} disagrees with lam*ceil(M/(lam*m))={lam * Q}")
    if not 0 <= r < Q:
        raise ValueError(f"residue r={r} outside [0, {Q})")

    blocks = _padded_blocks(x, L, p, m)
    qm = q * m
    phase = np.stack([_phase_line(Q * k + r, p * m, qm).reshape(p, m)
                      for k in range(lam)])
    W = np.einsum("...ts,kts->...ks", blocks, phase)
    W = fft(W, "forward")
    return np.swapaxes(W, -1, -2).reshape(x.shape[:-1] + (lam * m,))


def backward_residue(F_block, accumulator: np.ndarray, m: int, L: int,
                     q: int, r: int) -> np.ndarray:
    """Add residue ``r``'s share of an inverse transform into ``accumulator``.

    After all ``q`` residues have been added, ``accumulator[:L] / (q*m)`` is
    the backward transform of the assembled spectrum. ``accumulator`` is
    updated in place and returned.
    """
    F = np.asarray(F_block, dtype=np.complex128)
    if F.shape[-1] != m:
        raise ValueError(f"F_block has length {F.shape[-1]}, expected m={m}")
    if accumulator.shape[-1] < L:
        raise ValueError(f"accumulator length {accumulator.shape[-1]} < L={L}")
    if L > q * m:
        raise ValueError(f"L={L} exceeds q*m={q * m}")
    if not 0 <= r < q:
        raise ValueError(f"residue r={r} outside [0, {q})")
    # m * backward == sum_l exp(-2 pi i s l / m) F_l
    W = m * fft(F, "backward")
    reps = ceilquotient(L, m)
    tiled = np.tile(W, (1,) * (W.ndim - 1) + (reps,))[..., :L]
    accumulator[..., :L] += tiled * np.conj(_phase_line(r, L, q * m))
    return accumulator


@dataclass(frozen=True)
class HybridPlan1D:
    """Decomposition constants for one unequal-length hybrid convolution."""

    L_f: int
    L_g: int
    M: int
    m: int
    lam: int
    p_f: int
    p_g: int
    q_g: int
    q_f: int
    M1: int
    Q_m: int

    @classmethod
    def build(cls, L_f: int, L_g: int, M: int, m: int, lam: int) -> "HybridPlan1D":
        if min(L_f, L_g, M, m, lam) < 1:
            raise ValueError("lengths, M, m and lam must all be positive")
        if L_f > L_g:
            raise ValueError(f"L_f={L_f} > L_g={L_g}; pass the shorter input as f")
        if M < L_g:
            raise ValueError(f"M={M} shorter than L_g={L_g}")
        mg = lam * m
        q_g = ceilquotient(M, mg)
        q_f = lam * q_g
        M1 = q_g * mg
        Q_m = q_f * m
        # the main loop divides by q_f*m, the backward pass by q_g*lam*m
        assert Q_m == q_g * lam * m == M1
        return cls(L_f, L_g, M, m, lam,
                   p_f=ceilquotient(L_f, m), p_g=ceilquotient(L_g, mg),
                   q_g=q_g, q_f=q_f, M1=M1, Q_m=Q_m)

    @property
    def block(self) -> int:
        """FFT size used for the long input (lam * m)."""
        return self.lam * self.m

    def spectrum_f(self, f: np.ndarray) -> np.ndarray:
        """Full residue-ordered spectrum of the short input (length M1)."""
        return np.concatenate([self._f_block(f, r) for r in range(self.q_g)], axis=-1)

    def spectrum_g(self, g: np.ndarray) -> np.ndarray:
        return np.concatenate([self._g_block(g, r) for r in range(self.q_g)], axis=-1)

    def inverse(self, H: np.ndarray) -> np.ndarray:
        """Invert a residue-ordered spectrum of length M1 (unscaled by Q_m)."""
        mg = self.block
        out = np.zeros(H.shape[:-1] + (self.M1,), dtype=np.complex128)
        for r in range(self.q_g):
            backward_residue(H[..., r * mg:(r + 1) * mg], out, mg, self.M1, self.q_g, r)
        return out

    def _f_block(self, f, r):
        return forward_residue(f, self.m, self.L_f, self.p_f, self.q_f, r, self.lam, self.M1)

    def _g_block(self, g, r):
        return forward_residue(g, self.block, self.L_g, self.p_g, self.q_g, r, 1, self.M1)


def _hybrid_raw(f: np.ndarray, g: np.ndarray, plan: HybridPlan1D) -> np.ndarray:
    # batch-aware: leading axes of f and g broadcast
    lead = np.broadcast_shapes(f.shape[:-1], g.shape[:-1])
    h = np.zeros(lead + (plan.M1,), dtype=np.complex128)
    mg = plan.block
    for r in range(plan.q_g):
        H = plan._f_block(f, r) * plan._g_block(g, r)
        backward_residue(H, h, mg, plan.M1, plan.q_g, r)
    h /= plan.Q_m
    return h


def hybrid_conv_1d_raw(f, g, M: int, m: int, lam: int) -> np.ndarray:
    """All ``M1 = q_g*lam*m`` outputs: the M1-cyclic convolution of f and g."""
    f = as_buffer(f, "f")
    g = as_buffer(g, "g")
    plan = HybridPlan1D.build(f.size, g.size, M, m, lam)
    return _hybrid_raw(f, g, plan)


def hybrid_conv_1d(f, g, M: int, m: int, lam: int) -> np.ndarray:
    """Hybrid-dealiased convolution; returns ``min(M, L_f + L_g - 1)`` entries.

    ``f`` must be the shorter input. ``m`` and ``lam`` may be any positive
    integers; ceiling quotients absorb whatever does not divide evenly.
    """
    f = as_buffer(f, "f")
    g = as_buffer(g, "g")
    h = hybrid_conv_1d_raw(f, g, M, m, lam)
    return h[:min(M, f.size + g.size - 1)]


def convolve(f, g, M: int | None = None, m: int | None = None, lam: int = 1) -> np.ndarray:
    """Order the inputs and run :func:`hybrid_conv_1d`.

    ``M`` defaults to the unaliased length, ``m`` to the shorter length.
    """
    f = as_buffer(f, "f")
    g = as_buffer(g, "g")
    if f.size > g.size:
        f, g = g, f
    if M is None:
        M = f.size + g.size - 1
    if m is None:
        m = f.size
    return hybrid_conv_1d(f, g, M, m, lam)


def pow2_split_conv(f, g) -> np.ndarray:
    """Convolution for ``L_g = 2**(alpha-1) * L_f`` with ``M = 2*L_g``.

    ``f`` is split into ``2**alpha`` twiddled transforms of length ``L_f``,
    ``g`` into two of length ``L_g``; the even/odd ``f`` residues are
    interleaved to line up with ``g``'s two halves.
    """
    f = as_buffer(f, "f")
    g = as_buffer(g, "g")
    Lf, Lg = f.size, g.size
    if (2 * Lg) % Lf:
        raise ValueError(f"2*L_g={2 * Lg} is not a multiple of L_f={Lf}")
    K = 2 * Lg // Lf
    if K < 2 or K & (K - 1):
        raise ValueError(f"size ratio 2*L_g/L_f={K} is not a power of two >= 2")
    M = 2 * Lg

    F = np.stack([fft(f * _phase_line(r, Lf, M), "forward") for r in range(K)])
    G0 = fft(g, "forward")
    G1 = fft(g * _phase_line(1, Lg, M), "forward")
    # A_0[(K/2)*k + i] = F_{2i}[k], A_1 likewise with the odd residues
    A0 = F[0::2].T.reshape(-1)
    A1 = F[1::2].T.reshape(-1)
    S0 = Lg * fft(A0 * G0, "backward")
    S1 = Lg * fft(A1 * G1, "backward") * np.conj(_phase_line(1, Lg, M))
    # exp(-2 pi i (Lg + k) / M) = -exp(-2 pi i k / M)
    h = np.concatenate([S0 + S1, S0 - S1]) / M
    return h[:Lf + Lg - 1]
