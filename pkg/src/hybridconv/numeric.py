"""Arithmetic helpers shared by the convolution and tuning code.

Transform convention used everywhere in this package::

    forward:   F_k = sum_j exp(+2*pi*i*k*j/M) f_j          (unnormalized)
    backward:  f_j = (1/M) sum_k exp(-2*pi*i*k*j/M) F_k

This is the opposite exponent sign from numpy/scipy, so :func:`fft` adapts
whichever backend is installed.
"""
from __future__ import annotations

import cmath
import math
from typing import Callable, Literal

import numpy as np

Direction = Literal["forward", "backward"]


class TransformError(RuntimeError):
    """Raised when the FFT backend fails for a given length."""

    def __init__(self, length: int, cause: BaseException | None = None):
        self.length = length
        msg = f"FFT backend failed for length {length}"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)


def as_buffer(x, name: str = "input") -> np.ndarray:
    """Return ``x`` as a nonempty, finite, 1-D complex128 array."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite samples")
    return a


def ceilquotient(a: int, b: int) -> int:
    if b <= 0:
        raise ValueError(f"ceilquotient divisor must be positive, got {b}")
    if a < 0:
        raise ValueError(f"ceilquotient numerator must be nonnegative, got {a}")
    return (a + b - 1) // b


def primitive_root_power(M: int, k: int) -> complex:
    """exp(2*pi*i*k/M), with k reduced mod M first to keep the phase small."""
    if M < 1:
        raise ValueError(f"root order must be >= 1, got {M}")
    return cmath.exp(2j * math.pi * (k % M) / M)


def naive_dft(x, direction: Direction = "forward") -> np.ndarray:
    """O(M^2) reference transform by direct summation."""
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    f = as_buffer(x)
    M = f.size
    kj = np.outer(np.arange(M), np.arange(M)) % M
    sign = 1 if direction == "forward" else -1
    out = np.exp(sign * 2j * np.pi * kj / M) @ f
    return out if direction == "forward" else out / M


# --- backend seam -----------------------------------------------------------
# A backend is a pair (fft, ifft) following numpy's conventions: fft uses the
# negative exponent and no scaling, ifft the positive exponent and 1/n.

def _scipy_backend():
    import scipy.fft

    return scipy.fft.fft, scipy.fft.ifft


def _numpy_backend():
    return np.fft.fft, np.fft.ifft


_BACKENDS: dict[str, Callable] = {"scipy": _scipy_backend, "numpy": _numpy_backend}
_active = {"name": "scipy", "pair": _scipy_backend()}


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def register_backend(name: str, factory: Callable[[], tuple[Callable, Callable]]) -> None:
    """Make a backend selectable by name. ``factory`` returns (fft, ifft)."""
    _BACKENDS[name] = factory


def use_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(f"unknown FFT backend {name!r}; choose from {available_backends()}")
    _active["name"] = name
    _active["pair"] = _BACKENDS[name]()


def current_backend() -> str:
    return _active["name"]


def fft(x, direction: Direction = "forward", axis: int = -1) -> np.ndarray:
    """Fast transform in the package convention, along ``axis``.

    Accepts arrays of any rank; the transform length is ``x.shape[axis]``.
    """
    a = np.asarray(x, dtype=np.complex128)
    n = a.shape[axis] if a.ndim else 0
    if n < 1:
        raise ValueError("transform length must be >= 1")
    fwd, inv = _active["pair"]
    try:
        if direction == "forward":
            # sum_j exp(+2 pi i k j / n) f_j == n * ifft
            return n * inv(a, axis=axis)
        if direction == "backward":
            return fwd(a, axis=axis) / n
    except Exception as exc:  # backend-specific failures
        raise TransformError(n, exc) from exc
    raise ValueError(f"unknown direction {direction!r}")


# --- integer helpers --------------------------------------------------------

def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"divisors() needs n >= 1, got {n}")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def generate_multiples(a_max: int, b_max: int, c_max: int, d_max: int, bound: int) -> list[int]:
    """All 2^a 3^b 5^c 7^d <= bound within the exponent caps, ascending."""
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    caps = (a_max, b_max, c_max, d_max)
    if any(c < 0 for c in caps):
        raise ValueError("exponent caps must be nonnegative")
    values = {1}
    for prime, cap in zip((2, 3, 5, 7), caps):
        grown = set(values)
        for v in values:
            x = v
            for _ in range(cap):
                x *= prime
                if x > bound:
                    break
                grown.add(x)
        values = grown
    return sorted(values)


def is_smooth(n: int) -> bool:
    """True when n has no prime factor above 7."""
    if n < 1:
        return False
    for p in (2, 3, 5, 7):
        while n % p == 0:
            n //= p
    return n == 1


def next_smooth(n: int) -> int:
    while not is_smooth(n):
        n += 1
    return n


def next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())
