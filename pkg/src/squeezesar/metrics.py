"""PSNR, resolvability, minimum resolvable size and PSNR contours."""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from skimage import measure

from .restore import Reconstruction
from .scene import ObjectField

RESOLVABLE_DB = 13.0
RECORD_FIELDS = ("d_over_w0", "gain_db", "n_b_prime", "loss_db", "seed", "psnr_db")
CONTOUR_FIELDS = ("level_db", "vertex_index", "d_over_w0", "gain_db")


class NoCrossing(ValueError):
    pass


class UnresolvableInRange(NoCrossing):
    pass


class ResolvableEverywhere(NoCrossing):
    pass


@dataclass(frozen=True)
class SweepRecord:
    d_over_w0: float
    gain_db: float
    n_b_prime: float
    loss_db: float
    seed: int
    psnr_db: float

    @property
    def saturated(self) -> bool:
        return self.psnr_db == math.inf

    def row(self) -> list[str]:
        return [repr(float(self.d_over_w0)), repr(float(self.gain_db)),
                repr(float(self.n_b_prime)), repr(float(self.loss_db)),
                str(int(self.seed)), repr(float(self.psnr_db))]

    @classmethod
    def from_row(cls, row: dict) -> "SweepRecord":
        return cls(float(row["d_over_w0"]), float(row["gain_db"]), float(row["n_b_prime"]),
                   float(row["loss_db"]), int(row["seed"]), float(row["psnr_db"]))


def psnr_arrays(estimate: np.ndarray, truth: np.ndarray) -> float:
    """``10 log10(max|f|^2 / mean|f~ - f|^2)``.

    ``inf`` when the error is zero, ``-inf`` when the truth is all zero but
    the estimate is not.
    """
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ValueError(f"dimension mismatch: {estimate.shape} vs {truth.shape}")
    mse = float(np.mean(np.abs(estimate - truth) ** 2))
    peak = float(np.max(np.abs(truth) ** 2))
    if mse == 0.0:
        return math.inf
    if peak == 0.0:
        # dark truth (or a peak that underflows) with nonzero error
        return -math.inf
    return 10.0 * math.log10(peak / mse)


def psnr(recon: Reconstruction, truth: ObjectField) -> float:
    """PSNR of the amplitude estimate against ``sqrt(kappa)``; phase is ignored."""
    return psnr_arrays(recon.f_tilde, truth.amplitude)


def resolvable(psnr_db: float, threshold: float = RESOLVABLE_DB) -> bool:
    """Inclusive: a PSNR equal to the threshold counts as resolvable."""
    return psnr_db >= threshold


def seed_average(records, key):
    """Arithmetic mean of dB values per ``key(record)``; saturated records dropped."""
    groups = defaultdict(list)
    dropped = 0
    for rec in records:
        if rec.saturated:
            dropped += 1
            continue
        groups[key(rec)].append(rec.psnr_db)
    if dropped:
        warnings.warn(f"{dropped} saturated (zero-MSE) record(s) excluded", stacklevel=2)
    return {k: float(np.mean(v)) for k, v in groups.items()}


def crossing_from_below(d_values, psnr_values, threshold: float = RESOLVABLE_DB) -> float:
    """First upward threshold crossing, interpolated linearly in ``(log d, PSNR)``."""
    d = np.asarray(d_values, dtype=np.float64)
    p = np.asarray(psnr_values, dtype=np.float64)
    order = np.argsort(d, kind="stable")
    d, p = d[order], p[order]
    if len(d) == 0:
        raise UnresolvableInRange("no records")
    if p[0] >= threshold:
        raise ResolvableEverywhere(
            f"PSNR {p[0]:.2f} dB >= {threshold} dB already at d/w0 = {d[0]:g}"
        )
    for i in range(len(d) - 1):
        if p[i] < threshold <= p[i + 1]:
            t = (threshold - p[i]) / (p[i + 1] - p[i])
            return float(10.0 ** (math.log10(d[i]) + t * (math.log10(d[i + 1]) - math.log10(d[i]))))
    raise UnresolvableInRange(
        f"PSNR stays below {threshold} dB up to d/w0 = {d[-1]:g}"
    )


def min_resolvable_size(records, threshold: float = RESOLVABLE_DB) -> float:
    """``d_min / w0`` from records over ``d`` at fixed other coordinates."""
    averaged = seed_average(records, key=lambda r: r.d_over_w0)
    ds = sorted(averaged)
    return crossing_from_below(ds, [averaged[d] for d in ds], threshold)


@dataclass(frozen=True)
class Polyline:
    level_db: float
    d_over_w0: np.ndarray
    gain_db: np.ndarray


def _axis_map(axis: np.ndarray, frac: np.ndarray, log: bool) -> np.ndarray:
    idx = np.arange(len(axis), dtype=np.float64)
    if len(axis) == 1:
        return np.full_like(frac, axis[0], dtype=np.float64)
    if log:
        return 10.0 ** np.interp(frac, idx, np.log10(axis))
    return np.interp(frac, idx, axis)


def psnr_contours(grid, d_axis, gain_axis, levels) -> list[Polyline]:
    """Marching-squares iso-PSNR polylines.

    ``grid[i, j]`` is the PSNR at ``gain_axis[i]``, ``d_axis[j]``. Vertices
    are mapped back to sweep coordinates by interpolating the fractional grid
    index linearly in ``log d`` and in ``gain_db``.
    """
    grid = np.asarray(grid, dtype=np.float64)
    d_axis = np.asarray(d_axis, dtype=np.float64)
    gain_axis = np.asarray(gain_axis, dtype=np.float64)
    if grid.shape != (len(gain_axis), len(d_axis)):
        raise ValueError(f"grid {grid.shape} does not match axes ({len(gain_axis)}, {len(d_axis)})")
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid has holes or saturated cells; contouring needs finite values")
    out = []
    if min(grid.shape) < 2:
        return out
    for level in levels:
        if not grid.min() < level < grid.max():
            continue
        for path in measure.find_contours(grid, level):
            gains = _axis_map(gain_axis, path[:, 0], log=False)
            ds = _axis_map(d_axis, path[:, 1], log=True)
            out.append(Polyline(float(level), ds, gains))
    return out
