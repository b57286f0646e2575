"""Object transmittance fields: bar-chart generator, PGM raster I/O, rescaling."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np


class PgmError(ValueError):
    """Malformed or unsupported PGM payload.

    ``offset`` is the byte position at which parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class ObjectField:
    """Complex transmittance ``f = sqrt(kappa) * exp(i theta)`` on a square-pitch grid.

    ``extent_d`` is the physical side length along the row axis; the pixel
    pitch is ``extent_d / rows``.
    """

    kappa: np.ndarray
    theta: np.ndarray
    extent_d: float
    pitch: float = field(init=False)

    def __post_init__(self):
        kappa = np.array(self.kappa, dtype=np.float64)
        theta = np.array(self.theta, dtype=np.float64)
        if kappa.ndim != 2 or kappa.shape[0] < 1 or kappa.shape[1] < 1:
            raise ValueError(f"kappa must be a non-empty 2-D grid, got shape {kappa.shape}")
        if theta.shape != kappa.shape:
            raise ValueError(f"theta shape {theta.shape} != kappa shape {kappa.shape}")
        if not np.all(np.isfinite(kappa)) or kappa.min() < 0.0 or kappa.max() > 1.0:
            raise ValueError("kappa values must lie in [0, 1]")
        if not self.extent_d > 0:
            raise ValueError(f"extent_d must be positive, got {self.extent_d}")
        kappa.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "extent_d", float(self.extent_d))
        object.__setattr__(self, "pitch", self.extent_d / kappa.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.kappa.shape

    @property
    def amplitude(self) -> np.ndarray:
        """``|f| = sqrt(kappa)``."""
        return np.sqrt(self.kappa)

    def mean_kappa(self) -> float:
        # Fixed row-major pairwise sum; independent of threading.
        return float(np.sum(self.kappa.ravel()) / self.kappa.size)


def uniform_field(rows: int, cols: int, kappa: float = 1.0, extent_d: float = 1.0) -> ObjectField:
    k = np.full((rows, cols), float(kappa))
    return ObjectField(k, np.zeros_like(k), extent_d)


def chart_base_width(rows: int, cols: int, n_groups: int) -> int:
    """Bar width of the coarsest group.

    The stacked layout needs ``13 * w0`` pixels of height (one ``w0`` margin,
    ``6 * w`` per group, summing to under ``12 * w0``) and ``11 * w0`` of width;
    ``w0`` is rounded down to a multiple of ``2**(n_groups - 1)`` so every
    group's width is an exact halving of the previous one.
    """
    if n_groups <= 0:
        return 0
    step = 2 ** (n_groups - 1)
    w0 = (min(rows, cols) - 1) // 13
    w0 -= w0 % step
    if w0 < step:
        raise ValueError(
            f"grid too small: {rows}x{cols} cannot fit {n_groups} bar group(s)"
        )
    return w0


def chart_rectangles(rows: int, cols: int, n_groups: int, bars_per_element: int = 3):
    """Rectangles ``(r0, c0, height, width)`` drawn dark by :func:`generate_bar_chart`.

    Each group holds a vertical-bar element and a horizontal-bar element side
    by side; bars have width ``w`` and length ``5 * w`` and are separated by
    gaps of ``w``. Groups are stacked top to bottom with halving ``w`` and the
    whole stack is centred on the grid.
    """
    if n_groups <= 0:
        return []
    w0 = chart_base_width(rows, cols, n_groups)
    length_factor = 5
    span = 2 * bars_per_element - 1  # bars plus gaps, in units of w
    element = max(span, length_factor)
    widths = [w0 >> g for g in range(n_groups)]
    block_h = sum((element + 1) * w for w in widths) - widths[-1]
    block_w = (2 * element + 1) * w0
    if block_h > rows or block_w > cols:
        raise ValueError(
            f"grid too small: {rows}x{cols} cannot fit {n_groups} bar group(s)"
        )
    top = (rows - block_h) // 2
    left = (cols - block_w) // 2
    rects = []
    r = top
    for w in widths:
        bar_len = length_factor * w
        # vertical bars: tall and thin, stepping right
        for b in range(bars_per_element):
            rects.append((r, left + 2 * b * w, bar_len, w))
        # horizontal bars: short and wide, stepping down
        c = left + (element + 1) * w
        for b in range(bars_per_element):
            rects.append((r + 2 * b * w, c, w, bar_len))
        r += (element + 1) * w
    return rects


def generate_bar_chart(
    m_o: int = 200,
    n_o: int = 200,
    n_groups: int = 4,
    bars_per_element: int = 3,
    dark_kappa: float = 0.0,
    bright_kappa: float = 1.0,
    extent_d: float = 1.0,
) -> ObjectField:
    """Simplified USAF-1951-style resolution chart: dark bars on a bright field.

    Parameters
    ----------
    m_o, n_o : int
        Grid rows and columns, both at least 16.
    n_groups : int
        Number of bar groups; bar width halves from one group to the next.
        Zero gives a uniform bright field.
    bars_per_element : int
        Bars in each vertical and horizontal element (3 for USAF).
    dark_kappa, bright_kappa : float
        Power transmissivity of bars and background,
        ``0 <= dark_kappa < bright_kappa <= 1``.
    extent_d : float
        Physical side length of the object in metres.
    """
    if m_o < 16 or n_o < 16:
        raise ValueError(f"grid too small: {m_o}x{n_o}, need at least 16x16")
    if not (0.0 <= dark_kappa < bright_kappa <= 1.0):
        raise ValueError(
            f"need 0 <= dark_kappa < bright_kappa <= 1, got {dark_kappa}, {bright_kappa}"
        )
    if n_groups < 0 or bars_per_element < 1:
        raise ValueError("n_groups must be >= 0 and bars_per_element >= 1")
    kappa = np.full((m_o, n_o), float(bright_kappa))
    for r0, c0, h, w in chart_rectangles(m_o, n_o, n_groups, bars_per_element):
        kappa[r0:r0 + h, c0:c0 + w] = dark_kappa
    return ObjectField(kappa, np.zeros_like(kappa), extent_d)


def rescale_extent(obj: ObjectField, new_d: float) -> ObjectField:
    if not new_d > 0:
        raise ValueError(f"new extent must be positive, got {new_d}")
    return replace(obj, extent_d=new_d)


_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _pgm_header(payload: bytes):
    """Parse a P5 header; return (width, height, maxval, data_offset)."""
    if len(payload) < 2:
        raise PgmError("truncated header", len(payload))
    magic = payload[:2]
    if magic != b"P5":
        raise PgmError(f"unsupported format {magic!r}, only binary P5 is accepted", 0)
    pos = 2
    values = []
    for name in ("width", "height", "maxval"):
        m = _PGM_TOKEN.match(payload, pos)
        if m is None:
            raise PgmError(f"missing {name}", pos)
        token = m.group(1)
        if not token.isdigit():
            raise PgmError(f"invalid {name} {token!r}", m.start(1))
        values.append(int(token))
        pos = m.end(1)
    if pos >= len(payload) or payload[pos:pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise PgmError("expected single whitespace after maxval", pos)
    width, height, maxval = values
    if width < 1 or height < 1:
        raise PgmError(f"invalid dimensions {width}x{height}", 2)
    if maxval != 255:
        raise PgmError(f"unsupported maxval {maxval}, need 255", pos - 1)
    return width, height, maxval, pos + 1


def load_raster(payload: bytes, extent_d: float, kappa_max: float = 1.0) -> ObjectField:
    """Read an 8-bit P5 PGM; ``kappa = kappa_max * (pixel / 255) ** 2``, ``theta = 0``.

    Brightness is read as field amplitude, hence the square.
    """
    if not 0.0 < kappa_max <= 1.0:
        raise ValueError(f"kappa_max must lie in (0, 1], got {kappa_max}")
    width, height, _, start = _pgm_header(payload)
    need = width * height
    data = payload[start:start + need]
    if len(data) < need:
        raise PgmError(
            f"truncated payload: expected {need} pixel bytes, found {len(data)}",
            start + len(data),
        )
    pixels = np.frombuffer(data, dtype=np.uint8).reshape(height, width)
    kappa = kappa_max * (pixels.astype(np.float64) / 255.0) ** 2
    return ObjectField(kappa, np.zeros_like(kappa), extent_d)


def to_pgm(gray: np.ndarray) -> bytes:
    """Encode an array of values 0..255 as P5."""
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise ValueError("PGM needs a 2-D array")
    pixels = np.clip(np.rint(gray), 0, 255).astype(np.uint8)
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def save_raster(obj: ObjectField, kappa_max: float = 1.0) -> bytes:
    """Inverse of :func:`load_raster` for fields on the 8-bit lattice."""
    return to_pgm(255.0 * np.sqrt(obj.kappa / kappa_max))
