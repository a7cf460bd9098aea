"""Two-dimensional hybrid convolution and image filtering.

The 2D transform runs the 1D residue transforms along rows, then along
columns (after a transpose), multiplies, and inverts columns then rows.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dealias1d import HybridPlan1D
from .numeric import ceilquotient


class ConvMode(enum.Enum):
    FULL = "full"
    SAME_BIG = "same_big"
    SAME_SMALL = "same_small"
    VALID = "valid"

    @classmethod
    def parse(cls, value: "ConvMode | str") -> "ConvMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown mode {value!r}; expected one of: {valid}") from None


def mode_window(L1: int, L2: int, mode: ConvMode | str) -> tuple[int, int]:
    """Output window ``[v, v1)`` along one axis, for input lengths ``L1 <= L2``.

    Note the ``valid`` window follows the original slicing rule
    ``(ceil(N/L2) - 1, ceil(N/L1) + 1)``, which is not the textbook
    ``L2 - L1 + 1`` valid size. Windows are clipped to ``[0, N)``.
    """
    mode = ConvMode.parse(mode)
    if L1 < 1 or L2 < 1:
        raise ValueError("lengths must be positive")
    if L1 > L2:
        raise ValueError(f"L1={L1} > L2={L2}")
    N = L1 + L2 - 1
    if mode is ConvMode.FULL:
        v, v1 = 0, N
    elif mode is ConvMode.SAME_BIG:
        v, v1 = 0, L2
    elif mode is ConvMode.SAME_SMALL:
        v, v1 = 1, 1 + L1
    else:
        v, v1 = ceilquotient(N, L2) - 1, ceilquotient(N, L1) + 1
    v1 = min(v1, N)
    return min(v, v1), v1


def _as_2d(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite samples")
    return a


def direct_conv_2d(f, g) -> np.ndarray:
    """Full 2D linear convolution by summing shifted, scaled copies of g."""
    f = _as_2d(f, "f")
    g = _as_2d(g, "g")
    (hf, wf), (hg, wg) = f.shape, g.shape
    out = np.zeros((hf + hg - 1, wf + wg - 1), dtype=np.complex128)
    for i in range(hf):
        for j in range(wf):
            if f[i, j] != 0:
                out[i:i + hg, j:j + wg] += f[i, j] * g
    return out


def _per_axis(value, name: str) -> tuple[int, int]:
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise ValueError(f"{name} needs one value per axis (rows, cols)")
        return int(value[0]), int(value[1])
    return int(value), int(value)


def _axis_forward(x: np.ndarray, plan: HybridPlan1D, which: str, axis: int) -> np.ndarray:
    moved = np.moveaxis(x, axis, -1)
    spec = plan.spectrum_f(moved) if which == "f" else plan.spectrum_g(moved)
    return np.moveaxis(spec, -1, axis)


def _axis_inverse(H: np.ndarray, plan: HybridPlan1D, axis: int) -> np.ndarray:
    return np.moveaxis(plan.inverse(np.moveaxis(H, axis, -1)), -1, axis)


def hybrid_conv_2d(f, g, M: int | Sequence[int], m: int | Sequence[int],
                   lam: int | Sequence[int] = 1,
                   mode: ConvMode | str = ConvMode.FULL) -> np.ndarray:
    """Hybrid-dealiased 2D convolution of a small array ``f`` with ``g``.

    ``M``, ``m`` and ``lam`` take a scalar (used on both axes) or a
    ``(rows, cols)`` pair. ``f`` must be no larger than ``g`` on either axis.
    """
    f = _as_2d(f, "f")
    g = _as_2d(g, "g")
    mode = ConvMode.parse(mode)
    if f.shape[0] > g.shape[0] or f.shape[1] > g.shape[1]:
        raise ValueError(f"f {f.shape} must not exceed g {g.shape} on either axis")
    Ms, ms, lams = _per_axis(M, "M"), _per_axis(m, "m"), _per_axis(lam, "lam")
    plans = [HybridPlan1D.build(f.shape[a], g.shape[a], Ms[a], ms[a], lams[a])
             for a in (0, 1)]

    # rows first (last axis), then columns
    F = _axis_forward(_axis_forward(f, plans[1], "f", 1), plans[0], "f", 0)
    G = _axis_forward(_axis_forward(g, plans[1], "g", 1), plans[0], "g", 0)
    H = _axis_inverse(F * G, plans[0], 0)
    H = _axis_inverse(H, plans[1], 1)
    H /= plans[0].Q_m * plans[1].Q_m

    rows = mode_window(f.shape[0], g.shape[0], mode)
    cols = mode_window(f.shape[1], g.shape[1], mode)
    return H[rows[0]:rows[1], cols[0]:cols[1]]


# --- image filtering --------------------------------------------------------

@dataclass(frozen=True)
class Kernel:
    name: str
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] % 2 == 0:
            raise ValueError(f"kernel {self.name!r} must be square with odd size, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError(f"kernel {self.name!r} has non-finite taps")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def size(self) -> int:
        return self.coefficients.shape[0]


_BINOMIAL5 = np.outer([1, 4, 6, 4, 1], [1, 4, 6, 4, 1])

_KERNELS = {
    "identity": [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
    "ridge_1": [[-1, -1, -1], [-1, 4, -1], [-1, -1, -1]],
    "ridge_2": [[-1, -1, -1], [-1, 8, -1], [-1, -1, -1]],
    "sharpen": [[0, -1, 0], [-1, 5, -1], [0, -1, 0]],
    "box_blur": np.ones((3, 3)) / 9,
    "gaussian_blur_3": np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]]) / 16,
    "gaussian_blur_5": _BINOMIAL5 / 256,
    "unsharp_5": -(_BINOMIAL5 - np.where(np.arange(25).reshape(5, 5) == 12, 512, 0)) / 256,
}


def kernel_names() -> list[str]:
    return list(_KERNELS)


def kernel_library(name: str) -> Kernel:
    key = name.lower()
    if key not in _KERNELS:
        raise KeyError(f"unknown kernel {name!r}; valid names: {', '.join(_KERNELS)}")
    return Kernel(key, np.array(_KERNELS[key], dtype=float))


def _image_window(k: int, n: int, mode: ConvMode) -> tuple[int, int]:
    if mode is ConvMode.SAME_BIG:
        # centre the kernel: output pixel (i, j) sits under tap (k//2, k//2)
        return k // 2, k // 2 + n
    return mode_window(k, n, mode)


def image_convolve(image, kernel: Kernel | str, mode: ConvMode | str = ConvMode.SAME_BIG,
                   m: int | None = None, lam: int = 1) -> np.ndarray:
    """Filter an ``(H, W)`` or ``(H, W, C)`` image channel by channel.

    Results are real parts clamped to [0, 255] and rounded to uint8. For 2- and
    4-channel images the last channel is treated as alpha and copied through.
    ``same_big`` returns an image-sized output centred on the kernel.
    """
    if isinstance(kernel, str):
        kernel = kernel_library(kernel)
    mode = ConvMode.parse(mode)
    img = np.asarray(image)
    planar = img.ndim == 2
    if planar:
        img = img[:, :, None]
    if img.ndim != 3:
        raise ValueError(f"image must be (H, W) or (H, W, C), got shape {np.shape(image)}")
    H, W, C = img.shape
    k = kernel.size
    if k > H or k > W:
        raise ValueError(f"kernel {k}x{k} larger than image {H}x{W}")
    if m is None:
        m = k
    filtered = C - 1 if C in (2, 4) else C
    M = (k + H - 1, k + W - 1)
    rows, cols = _image_window(k, H, mode), _image_window(k, W, mode)

    out_channels = []
    for c in range(C):
        if c >= filtered:
            alpha = np.zeros(M, dtype=np.uint8)
            alpha[k // 2:k // 2 + H, k // 2:k // 2 + W] = img[:, :, c]
            out_channels.append(alpha[rows[0]:rows[1], cols[0]:cols[1]])
            continue
        full = hybrid_conv_2d(kernel.coefficients, img[:, :, c], M, m, lam, ConvMode.FULL)
        window = full[rows[0]:rows[1], cols[0]:cols[1]].real
        out_channels.append(np.rint(np.clip(window, 0, 255)).astype(np.uint8))
    out = np.stack(out_channels, axis=-1)
    return out[:, :, 0] if planar else out
