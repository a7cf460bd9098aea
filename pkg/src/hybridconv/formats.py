"""Text and image formats: timing lines and binary PNM (P5/P6)."""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import IO

import numpy as np

# ---- timing lines ------------------------------------------------------------
#
#   m=<int> t=<float>        one line per candidate
#   Optimal time: <float>    terminator

M_PATTERN = re.compile(r"m=\d+")
T_PATTERN = re.compile(r"t=[+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_PATTERNS = {"m": M_PATTERN, "t": T_PATTERN}


def format_float(x: float) -> str:
    """Shortest round-tripping decimal; always matches ``T_PATTERN``."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot render non-finite time {x}")
    s = repr(x)
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def emit_timing_lines(record, optimal_time: float | None = None,
                      sink: IO[str] | None = None) -> str:
    """Render a record's candidates; ``record`` needs ``m_values``/``time_values``.

    ``optimal_time`` defaults to the smallest recorded time.
    """
    m_values, time_values = record.m_values, record.time_values
    if len(m_values) != len(time_values) or not m_values:
        raise ValueError("m_values and time_values must be nonempty and equally long")
    if optimal_time is None:
        optimal_time = min(time_values)
    lines = [f"m={int(m)} t={format_float(t)}" for m, t in zip(m_values, time_values)]
    lines.append(f"Optimal time: {format_float(optimal_time)}")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text


def match_pattern(pattern, line: str) -> list[float]:
    """Numbers following each ``m=``/``t=`` match in ``line``.

    ``pattern`` is ``"m"``, ``"t"`` or one of the compiled module patterns.
    """
    regex = _PATTERNS.get(pattern, pattern) if isinstance(pattern, str) else pattern
    if regex not in (M_PATTERN, T_PATTERN):
        raise ValueError(f"unsupported pattern {pattern!r}; use 'm' or 't'")
    out = []
    for match in regex.finditer(line):
        tail = match.group(0)[2:]
        try:
            out.append(float(tail))
        except ValueError:
            raise ValueError(f"unparseable number in {match.group(0)!r}") from None
    return out


def parse_timing_text(text: str) -> tuple[list[int], list[float], float | None]:
    """Recover (m_values, time_values, optimal_time) from emitted text."""
    ms, ts, optimal = [], [], None
    for line in text.splitlines():
        if line.startswith("Optimal time:"):
            optimal = float(line.split(":", 1)[1])
            continue
        mv, tv = match_pattern("m", line), match_pattern("t", line)
        if mv and tv:
            ms.append(int(mv[0]))
            ts.append(tv[0])
    return ms, ts, optimal


# ---- PNM ------------------------------------------------------------------------

class PnmError(ValueError):
    pass


class BadMagic(PnmError):
    pass


class BadMaxValue(PnmError):
    pass


class TruncatedData(PnmError):
    pass


@dataclass
class PnmImage:
    format: str  # "P5" or "P6"
    width: int
    height: int
    pixels: bytes
    max_value: int = 255

    @property
    def channels(self) -> int:
        return 3 if self.format == "P6" else 1

    def __post_init__(self):
        if self.format not in ("P5", "P6"):
            raise BadMagic(f"unsupported PNM format {self.format!r}")
        if self.max_value != 255:
            raise BadMaxValue(f"max value must be 255, got {self.max_value}")
        if self.width < 1 or self.height < 1:
            raise PnmError("image dimensions must be positive")
        expected = self.width * self.height * self.channels
        if len(self.pixels) != expected:
            raise TruncatedData(f"expected {expected} pixel bytes, got {len(self.pixels)}")

    def to_array(self) -> np.ndarray:
        a = np.frombuffer(self.pixels, dtype=np.uint8)
        if self.channels == 1:
            return a.reshape(self.height, self.width).copy()
        return a.reshape(self.height, self.width, 3).copy()

    @classmethod
    def from_array(cls, array) -> "PnmImage":
        a = np.asarray(array)
        if a.dtype != np.uint8:
            raise PnmError(f"pixel array must be uint8, got {a.dtype}")
        if a.ndim == 2:
            return cls("P5", a.shape[1], a.shape[0], a.tobytes())
        if a.ndim == 3 and a.shape[2] == 3:
            return cls("P6", a.shape[1], a.shape[0], a.tobytes())
        raise PnmError(f"cannot store array of shape {a.shape} as PNM")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, i, n = [], 0, len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        if start == i:
            raise TruncatedData("header ended early")
        tokens.append(data[start:i])
    return tokens, i


def read_pnm(source: bytes | str | os.PathLike) -> PnmImage:
    data = source if isinstance(source, (bytes, bytearray)) else open(source, "rb").read()
    data = bytes(data)
    if data[:2] not in (b"P5", b"P6"):
        raise BadMagic(f"unsupported magic {data[:2]!r}; only binary P5/P6 are read")
    tokens, i = _header_tokens(data, 4)
    if tokens[0] not in (b"P5", b"P6"):
        raise BadMagic(f"unsupported magic {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PnmError(f"malformed header fields {tokens[1:]!r}") from None
    if maxval != 255:
        raise BadMaxValue(f"max value must be 255, got {maxval}")
    if i >= len(data) or not data[i:i + 1].isspace():
        raise TruncatedData("missing whitespace after header")
    body = data[i + 1:]
    fmt = tokens[0].decode()
    expected = width * height * (3 if fmt == "P6" else 1)
    if len(body) < expected:
        raise TruncatedData(f"expected {expected} pixel bytes, got {len(body)}")
    return PnmImage(fmt, width, height, body[:expected])


def write_pnm(image: PnmImage, path: str | os.PathLike | None = None) -> bytes:
    """Serialize with a canonical ``P6 <w> <h> 255\\n`` header."""
    out = f"{image.format} {image.width} {image.height} {image.max_value}\n".encode() + image.pixels
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(out)
    return out
