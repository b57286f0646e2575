"""Wiener deconvolution back to the amplitude map ``sqrt(kappa)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, readout_variance
from .forward import QuadratureImage, crop, pad, padding_for
from .optics import Kernel, transfer_function

SINGULAR_THRESHOLD = 1e-12


@dataclass(frozen=True)
class Reconstruction:
    f_tilde: np.ndarray
    nsr_used: float
    clip_applied: bool

    @property
    def kappa_tilde(self) -> np.ndarray:
        return self.f_tilde**2


def wiener_filter(spectrum: np.ndarray, nsr: float) -> np.ndarray:
    """``conj(H) / (|H|^2 + nsr)``."""
    return np.conj(spectrum) / (np.abs(spectrum) ** 2 + nsr)


def wiener_deconvolve(
    img: QuadratureImage,
    kernel: Kernel,
    nsr: float,
    clip: bool = True,
    kappa_max: float = 1.0,
) -> Reconstruction:
    """Estimate ``sqrt(kappa)`` from a homodyne image.

    The filter acts on the unit-DC-gain spectrum over the same (padded) grid
    the forward model used, and the result is divided by the image's
    amplitude scale. With ``clip`` the estimate is limited to
    ``[0, sqrt(kappa_max)]``.
    """
    if nsr < 0:
        raise ValueError(f"nsr must be >= 0, got {nsr}")
    if not math.isclose(kernel.pitch, img.pitch, rel_tol=1e-9):
        raise ValueError(f"kernel pitch {kernel.pitch:g} != image pitch {img.pitch:g}")
    if img.amplitude <= 0:
        raise ValueError("image amplitude scale must be positive")
    padding = padding_for(kernel, img.boundary)
    work = pad(img.x_readout, padding)
    h = transfer_function(kernel, work.shape).unit_gain
    if nsr == 0 and np.min(np.abs(h)) < SINGULAR_THRESHOLD:
        raise ValueError("singular inverse; supply nsr > 0")
    est = np.fft.ifft2(np.fft.fft2(work) * wiener_filter(h, nsr)).real
    f = crop(est, padding, img.shape) / img.amplitude
    if clip:
        f = np.clip(f, 0.0, math.sqrt(kappa_max))
    return Reconstruction(f, float(nsr), clip)


def default_nsr(p: ChannelParams, amplitude: float, mean_kappa: float) -> float:
    """Noise power over mean per-pixel signal power, ``var / (A^2 kappa_mean)``."""
    signal = amplitude**2 * mean_kappa
    if signal <= 0:
        raise ValueError("zero signal power; NSR undefined")
    return readout_variance(p) / signal
