"""Noisy homodyne image formation: blur, probe amplitude, squeezed-thermal noise.

Amplitude convention
--------------------
The imaging operator is the kernel normalised to unit DC gain, and the probe
amplitude is ``A = sqrt(n_P' / kappa_obj_mean)`` for the per-pixel budget (or
that divided by ``sqrt(rows * cols)`` for the whole-image budget). A uniform
object therefore reads out ``sqrt(n_P')`` per pixel, and the per-pixel SNR of
a uniform region matches the closed-form channel SNR.

Boundaries
----------
``periodic`` (default) convolves circularly on the object grid, which keeps
forward model and Wiener inverse exactly consistent. ``zero`` embeds the
object in a dark surround wide enough that the linear convolution never
wraps, then crops back.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, readout_variance
from .optics import Kernel, PsfSpec, gaussian_psf, transfer_function
from .scene import ObjectField

BOUNDARIES = ("periodic", "zero")
BUDGETS = ("per_pixel", "whole_image")


class PhaseMode(enum.Enum):
    AMPLITUDE_COMPENSATED = "amplitude"
    PHASE_QUADRATURE = "phase"
    FIXED_PHASE = "fixed"


@dataclass(frozen=True)
class MeasurementPolicy:
    """Local-oscillator phase compensation ``theta_C(x, y)``."""

    mode: PhaseMode = PhaseMode.AMPLITUDE_COMPENSATED
    theta_c0: float = 0.0

    @classmethod
    def amplitude(cls):
        return cls(PhaseMode.AMPLITUDE_COMPENSATED)

    @classmethod
    def phase(cls):
        return cls(PhaseMode.PHASE_QUADRATURE)

    @classmethod
    def fixed(cls, theta_c0: float):
        return cls(PhaseMode.FIXED_PHASE, float(theta_c0))

    def compensation(self, theta: np.ndarray) -> np.ndarray:
        if self.mode is PhaseMode.AMPLITUDE_COMPENSATED:
            return -theta
        if self.mode is PhaseMode.PHASE_QUADRATURE:
            return -theta + math.pi / 2.0
        return np.full_like(theta, self.theta_c0)


def params_digest(p: ChannelParams) -> bytes:
    blob = json.dumps(p.as_dict(), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).digest()


@dataclass(frozen=True)
class QuadratureImage:
    """Homodyne X-quadrature readout plus what is needed to invert it."""

    x_readout: np.ndarray
    params_used: ChannelParams
    seed: int
    amplitude: float
    pitch: float
    boundary: str = "periodic"

    def __post_init__(self):
        arr = np.array(self.x_readout, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "x_readout", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.x_readout.shape

    @property
    def digest(self) -> bytes:
        return params_digest(self.params_used)


def amplitude_scale(obj: ObjectField, p: ChannelParams, photon_budget: str = "per_pixel") -> float:
    if photon_budget not in BUDGETS:
        raise ValueError(f"photon_budget must be one of {BUDGETS}, got {photon_budget!r}")
    mean_kappa = obj.mean_kappa()
    if mean_kappa <= 0:
        raise ValueError("object is completely dark; amplitude scale undefined")
    scale = math.sqrt(p.n_p_prime / mean_kappa)
    if photon_budget == "whole_image":
        scale /= math.sqrt(obj.kappa.size)
    return scale


def padding_for(kernel: Kernel, boundary: str) -> tuple[int, int]:
    if boundary not in BOUNDARIES:
        raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    if boundary == "periodic":
        return 0, 0
    return kernel.shape[0] // 2, kernel.shape[1] // 2


def pad(grid: np.ndarray, padding: tuple[int, int]) -> np.ndarray:
    pr, pc = padding
    return np.pad(grid, ((pr, pr), (pc, pc)))


def crop(grid: np.ndarray, padding: tuple[int, int], shape: tuple[int, int]) -> np.ndarray:
    pr, pc = padding
    return grid[pr:pr + shape[0], pc:pc + shape[1]]


def blur(grid: np.ndarray, kernel: Kernel, boundary: str = "periodic") -> np.ndarray:
    """Convolve with the unit-DC-gain version of ``kernel``."""
    padding = padding_for(kernel, boundary)
    work = pad(grid, padding)
    spectrum = transfer_function(kernel, work.shape)
    out = np.fft.ifft2(np.fft.fft2(work) * spectrum.unit_gain).real
    return crop(out, padding, grid.shape)


def mean_image(
    obj: ObjectField,
    kernel: Kernel,
    p: ChannelParams,
    policy: MeasurementPolicy = MeasurementPolicy(),
    photon_budget: str = "per_pixel",
    boundary: str = "periodic",
) -> np.ndarray:
    """Expected homodyne readout ``A * (h * Re(f exp(i theta_C)))``."""
    if not math.isclose(kernel.pitch, obj.pitch, rel_tol=1e-9):
        raise ValueError(f"kernel pitch {kernel.pitch:g} != object pitch {obj.pitch:g}")
    projected = obj.amplitude * np.cos(obj.theta + policy.compensation(obj.theta))
    return amplitude_scale(obj, p, photon_budget) * blur(projected, kernel, boundary)


def standard_normal_grid(seed: int, shape: tuple[int, int]) -> np.ndarray:
    """Counter-based N(0, 1) samples keyed by (seed, row).

    Row ``r`` draws from Philox with key ``seed`` and counter ``r << 192``, so
    each pixel's value depends only on ``(seed, row, column)`` and rows can be
    produced in any order or in parallel.
    """
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    rows, cols = shape
    out = np.empty(shape)
    for r in range(rows):
        gen = np.random.Generator(np.random.Philox(key=seed, counter=r << 192))
        out[r] = gen.standard_normal(cols)
    return out


def add_noise(
    mean: np.ndarray,
    p: ChannelParams,
    seed: int,
    amplitude: float = 1.0,
    pitch: float = 1.0,
    boundary: str = "periodic",
) -> QuadratureImage:
    variance = readout_variance(p)
    if variance < 0:
        raise ValueError("negative readout variance")
    mean = np.asarray(mean, dtype=np.float64)
    if variance == 0.0:
        readout = mean.copy()
    else:
        readout = mean + math.sqrt(variance) * standard_normal_grid(seed, mean.shape)
    return QuadratureImage(readout, p, seed, amplitude, pitch, boundary)


def simulate(
    obj: ObjectField,
    psf: PsfSpec,
    p: ChannelParams,
    policy: MeasurementPolicy = MeasurementPolicy(),
    seed: int = 0,
    photon_budget: str = "per_pixel",
    boundary: str = "periodic",
) -> QuadratureImage:
    kernel = gaussian_psf(psf)
    mean = mean_image(obj, kernel, p, policy, photon_budget, boundary)
    scale = amplitude_scale(obj, p, photon_budget)
    return add_noise(mean, p, seed, scale, obj.pitch, boundary)
