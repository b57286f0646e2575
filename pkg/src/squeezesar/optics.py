"""Gaussian PSF, its transfer function, and the discrete-array (digitalization) analysis.

Kernels are sampled at pixel centres on odd grids with the peak in the middle.
The transfer function places that centre at index ``(0, 0)`` (wrapped), so
filtering in the DFT domain introduces no spatial shift.

DFTs go through :mod:`numpy.fft`, which is deterministic for a given build;
equality across thread counts is only promised to ~1e-12 relative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

TRUNCATION_WAISTS = 4.0


@dataclass(frozen=True)
class PsfSpec:
    w0: float
    shape: tuple[int, int]
    pitch: float

    def __post_init__(self):
        if not self.w0 > 0 or not self.pitch > 0:
            raise ValueError("w0 and pitch must be positive")
        if len(self.shape) != 2 or min(self.shape) < 1:
            raise ValueError(f"invalid kernel grid {self.shape}")

    @classmethod
    def covering(cls, w0: float, pitch: float) -> "PsfSpec":
        """Smallest odd square grid that reaches ``±4 w0``."""
        half = math.ceil(TRUNCATION_WAISTS * w0 / pitch - 1e-9)
        return cls(w0, (2 * half + 1, 2 * half + 1), pitch)


@dataclass(frozen=True)
class Kernel:
    values: np.ndarray
    pitch: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2) * self.pitch**2))

    @classmethod
    def delta(cls, pitch: float, value: float = 1.0) -> "Kernel":
        return cls(np.array([[float(value)]]), pitch)


@dataclass(frozen=True)
class Spectrum:
    """DFT of a centred, zero-padded kernel.

    ``values`` is the plain discrete sum (no ``pitch**2`` factor), so
    ``values[0, 0] == dc_gain == kernel.values.sum()``. The imaging chain uses
    :attr:`unit_gain`, the spectrum divided by its DC value.
    """

    values: np.ndarray
    dc_gain: float
    pitch: float

    @property
    def unit_gain(self) -> np.ndarray:
        return self.values / self.dc_gain


def gaussian_profile(x: np.ndarray, y: np.ndarray, w0: float) -> np.ndarray:
    """Continuous PSF ``exp(-(x^2+y^2) / (2 w0^2)) / sqrt(pi w0^2)``."""
    return np.exp(-(x**2 + y**2) / (2.0 * w0**2)) / math.sqrt(math.pi * w0**2)


def gaussian_psf(spec: PsfSpec) -> Kernel:
    """Sample the Gaussian PSF and renormalise to ``sum(h^2) * pitch^2 == 1``.

    Raises
    ------
    ValueError
        If the grid does not reach ``±4 w0`` along both axes.
    """
    rows, cols = spec.shape
    if rows % 2 == 0 or cols % 2 == 0:
        raise ValueError(f"kernel grid must be odd-sized, got {spec.shape}")
    reach = TRUNCATION_WAISTS * spec.w0 / spec.pitch
    if (min(rows, cols) // 2) < reach - 1e-9:
        raise ValueError(
            f"kernel truncated: {spec.shape} grid reaches {min(rows, cols) // 2} px,"
            f" need {math.ceil(reach - 1e-9)} px for ±4 w0"
        )
    y = (np.arange(rows) - rows // 2) * spec.pitch
    x = (np.arange(cols) - cols // 2) * spec.pitch
    h = gaussian_profile(x[None, :], y[:, None], spec.w0)
    h /= np.sqrt(np.sum(h**2) * spec.pitch**2)
    return Kernel(h, spec.pitch)


def centered_embed(kernel: Kernel, shape: tuple[int, int]) -> np.ndarray:
    """Place ``kernel`` on a periodic grid of ``shape`` with its centre at index (0, 0).

    Taps beyond the grid wrap around and add up, which is exactly the
    circular-convolution kernel when the kernel is wider than the grid.
    """
    kr, kc = kernel.shape
    rows = (np.arange(kr) - kr // 2) % shape[0]
    cols = (np.arange(kc) - kc // 2) % shape[1]
    out = np.zeros(shape)
    np.add.at(out, (rows[:, None], cols[None, :]), kernel.values)
    return out


def transfer_function(kernel: Kernel, shape: tuple[int, int]) -> Spectrum:
    values = np.fft.fft2(centered_embed(kernel, shape))
    dc = float(kernel.values.sum())
    if dc == 0.0:
        raise ValueError("kernel has zero DC gain")
    return Spectrum(values, dc, kernel.pitch)


def strip_map_waist(aperture: float) -> float:
    """Compressed PSF waist of a strip-map SAR, ``w0 = D / 2``."""
    if not aperture > 0:
        raise ValueError(f"aperture must be positive, got {aperture}")
    return aperture / 2.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Discrete transmitter-receiver array.

    ``rho`` antennas per metre over total length ``length``; each has physical
    aperture ``aperture`` and the scene sits at range ``z``.
    """

    rho: float
    length: float
    aperture: float
    wavelength: float
    z: float

    def __post_init__(self):
        if min(self.rho, self.length, self.aperture, self.wavelength, self.z) <= 0:
            raise ValueError("array geometry parameters must all be positive")
        # spacing 1/rho over length L with both ends populated: rho*L + 1 antennas
        if self.rho * self.length < 1 - 1e-12:
            raise ValueError(f"rho * L = {self.rho * self.length:g} < 1: need two antennas")

    @property
    def n_antennas(self) -> int:
        return int(math.floor(self.rho * self.length + 1e-9)) + 1

    @property
    def spacing(self) -> float:
        return 1.0 / self.rho


def synthetic_aperture(geom: ArrayGeometry) -> float:
    """Beam footprint on the array plane, ``a = lambda z / D``."""
    return geom.wavelength * geom.z / geom.aperture


def view_angle(geom: ArrayGeometry) -> float:
    angle = geom.rho * geom.wavelength
    if angle > 1.0:
        warnings.warn(
            f"view angle rho*lambda = {angle:g} rad exceeds 1; paraxial model is nonphysical",
            stacklevel=2,
        )
    return angle


def aliasing_spacing(geom: ArrayGeometry) -> float:
    """Distance from the main peak to the nearest aliasing replica, ``rho lambda z``."""
    return geom.rho * geom.wavelength * geom.z


def resolution_limit(geom: ArrayGeometry) -> float:
    """``max(D / 2, lambda z / L)``."""
    return max(geom.aperture / 2.0, geom.wavelength * geom.z / geom.length)


@dataclass(frozen=True)
class Profile:
    position: np.ndarray
    amplitude: np.ndarray


def fresnel_compressed_psf(geom: ArrayGeometry, n_samples: int, sim_window: float) -> Profile:
    """1-D compressed PSF of a point source seen by a discrete array.

    The point source at ``x = 0`` reaches antenna ``u`` with the paraxial
    chirp ``exp(i pi (u - x)^2 / (lambda z))``, weighted by the Gaussian beam
    of the physical aperture (amplitude ``exp(-pi^2 u^2 / (2 a^2))`` with
    ``a = lambda z / D``, which compresses to waist ``D / 2``). The samples are
    matched-filtered against the conjugate chirp for every image-plane
    position in ``[-sim_window/2, sim_window/2]``; the returned amplitude is
    normalised to a peak of 1.
    """
    if n_samples < 2 or not sim_window > 0:
        raise ValueError("need n_samples >= 2 and positive sim_window")
    lz = geom.wavelength * geom.z
    a = synthetic_aperture(geom)
    effective = min(geom.length, a)
    fringe = lz / effective
    required = int(math.ceil(8.0 * sim_window / fringe)) + 1
    if n_samples < required:
        raise ValueError(
            f"chirp undersampled: fringe {fringe:g} m over window {sim_window:g} m"
            f" needs n_samples >= {required}"
        )

    n_ant = geom.n_antennas
    u = (np.arange(n_ant) - (n_ant - 1) / 2.0) * geom.spacing
    weight = np.exp(-(math.pi**2) * u**2 / (2.0 * a**2))
    received = weight * np.exp(1j * math.pi * u**2 / lz)

    x = np.linspace(-sim_window / 2.0, sim_window / 2.0, n_samples)
    amplitude = np.empty(n_samples)
    # Chunked so the (positions x antennas) phase matrix stays small.
    chunk = max(1, 2_000_000 // n_ant)
    for start in range(0, n_samples, chunk):
        xs = x[start:start + chunk, None]
        matched = np.exp(-1j * math.pi * (u[None, :] - xs) ** 2 / lz)
        amplitude[start:start + chunk] = np.abs(matched @ received)
    amplitude /= amplitude.max()
    return Profile(x, amplitude)


def find_peaks_1d(profile: Profile, min_height: float = 0.5) -> np.ndarray:
    """Positions of local maxima at or above ``min_height`` (relative)."""
    amp = profile.amplitude
    inner = (amp[1:-1] >= amp[:-2]) & (amp[1:-1] > amp[2:]) & (amp[1:-1] >= min_height)
    idx = np.nonzero(inner)[0] + 1
    # Parabolic refinement on the three samples around each maximum.
    x = profile.position
    step = x[1] - x[0]
    left, mid, right = amp[idx - 1], amp[idx], amp[idx + 1]
    denom = left - 2 * mid + right
    offset = np.where(denom != 0, 0.5 * (left - right) / np.where(denom != 0, denom, 1), 0.0)
    return x[idx] + offset * step


def aliasing_peak_spacing(profile: Profile) -> float:
    """Distance from the central peak to its closest replica."""
    peaks = find_peaks_1d(profile, 0.5)
    if len(peaks) < 2:
        raise ValueError("fewer than two peaks in window; no aliasing replica found")
    centre = peaks[np.argmin(np.abs(peaks))]
    others = peaks[peaks != centre]
    return float(np.min(np.abs(others - centre)))


def secondary_peak_ratio(profile: Profile) -> float:
    """Largest local maximum other than the global one, relative to it."""
    amp = profile.amplitude
    inner = (amp[1:-1] >= amp[:-2]) & (amp[1:-1] > amp[2:])
    idx = np.nonzero(inner)[0] + 1
    heights = np.sort(amp[idx])[::-1]
    if len(heights) < 2:
        return 0.0
    return float(heights[1] / heights[0])


def main_lobe_fwhm(profile: Profile) -> float:
    amp = profile.amplitude
    x = profile.position
    i = int(np.argmax(amp))
    half = amp[i] / 2.0
    lo = i
    while lo > 0 and amp[lo] > half:
        lo -= 1
    hi = i
    while hi < len(amp) - 1 and amp[hi] > half:
        hi += 1
    if amp[lo] > half or amp[hi] > half:
        raise ValueError("main lobe not contained in the window")

    def cross(a, b):
        return x[a] + (half - amp[a]) * (x[b] - x[a]) / (amp[b] - amp[a])

    return float(cross(hi - 1, hi) - cross(lo, lo + 1))
