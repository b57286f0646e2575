"""Closed-form quantum-channel scalars for the squeezed RF-photonic receiver.

Frequencies cross the public interface in Hz and are converted to rad/s here.
Squeezing gain is stored linear; :func:`gain_from_db` converts at parse time.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

HBAR = 1.054571817e-34  # J s


class NoiselessDivergence(ZeroDivisionError):
    """Readout variance is zero, so the SNR is unbounded."""


def gain_from_db(gain_db: float) -> float:
    return 10.0 ** (gain_db / 10.0)


def gain_to_db(gain: float) -> float:
    return 10.0 * math.log10(gain)


@dataclass(frozen=True)
class SourceParams:
    """Transmitter budget. ``omega`` is the carrier in rad/s, ``bandwidth`` in Hz."""

    p_s: float
    omega: float
    bandwidth: float
    duration: float | None = None

    def __post_init__(self):
        if self.p_s < 0 or self.omega <= 0 or self.bandwidth <= 0:
            raise ValueError("need p_s >= 0 and positive omega, bandwidth")
        if self.duration is not None and self.modes < 1:
            raise ValueError("duration * bandwidth must give at least one time mode")

    @classmethod
    def from_hz(cls, p_s_watts: float, carrier_hz: float, bandwidth_hz: float, duration=None):
        return cls(p_s_watts, 2.0 * math.pi * carrier_hz, bandwidth_hz, duration)

    @property
    def modes(self) -> float:
        """Time modes ``M = B * T`` (1 when no duration is set)."""
        if self.duration is None:
            return 1.0
        return self.bandwidth * self.duration


def source_photons(src: SourceParams) -> float:
    """Whole-image photons per time mode, ``n_S = P_S / (hbar * omega * B)``."""
    return src.p_s / (HBAR * src.omega * src.bandwidth)


@dataclass(frozen=True)
class TransducerSpec:
    """Electro-optic modulator. ``omega_e``/``omega_o`` only enter as a ratio."""

    v_pi: float
    p_in: float
    impedance: float = 50.0
    omega_e: float = 2.0 * math.pi * 100e3
    omega_o: float = 2.0 * math.pi * 192e12

    def __post_init__(self):
        if min(self.v_pi, self.p_in, self.impedance, self.omega_e, self.omega_o) <= 0:
            raise ValueError("transducer parameters must all be positive")


def transduction_efficiency(t: TransducerSpec) -> float:
    """``eta = pi^2 / (4 V_pi^2) * (omega_e / omega_o) * Z * P_in``."""
    eta = math.pi**2 / (4.0 * t.v_pi**2) * (t.omega_e / t.omega_o) * t.impedance * t.p_in
    if eta >= 1.0:
        raise ValueError(f"eta = {eta:.3g} >= 1 is beyond the beamsplitter model")
    return eta


@dataclass(frozen=True)
class ChannelParams:
    """All scalars of the object + transducer + homodyne chain.

    ``gain`` may be ``math.inf`` to take the infinite-squeezing limit.
    """

    eta: float
    gain: float
    n_b: float
    n_s: float
    kappa_bar: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if not self.gain >= 1.0:
            raise ValueError(f"squeezing gain must be >= 1 (linear), got {self.gain}")
        if self.n_b < 0 or self.n_s < 0:
            raise ValueError("photon numbers must be non-negative")
        if not 0.0 <= self.kappa_bar <= 1.0:
            raise ValueError(f"kappa_bar must lie in [0, 1], got {self.kappa_bar}")

    @classmethod
    def from_detected(
        cls,
        n_p_prime: float,
        n_b_prime: float,
        gain: float,
        eta: float = 1e-9,
        kappa_bar: float = 1e-10,
    ) -> "ChannelParams":
        """Build from detector-side numbers ``n_P'`` and ``N_B'``."""
        if kappa_bar <= 0:
            raise ValueError("kappa_bar must be positive to infer n_s from n_p_prime")
        return cls(eta, gain, n_b_prime / eta, n_p_prime / (eta * kappa_bar), kappa_bar)

    @property
    def n_p_prime(self) -> float:
        return self.eta * self.kappa_bar * self.n_s

    @property
    def n_b_prime(self) -> float:
        return self.eta * self.n_b

    @property
    def gain_db(self) -> float:
        return gain_to_db(self.gain)

    def as_dict(self) -> dict:
        return asdict(self)


def _noise_sum(p: ChannelParams) -> float:
    return (1.0 - p.eta) / p.gain + 2.0 * p.eta * p.n_b


def readout_variance(p: ChannelParams) -> float:
    """Homodyne quadrature variance ``[(1 - eta)/G + 2 N_B'] / 4``."""
    return _noise_sum(p) / 4.0


def snr(p: ChannelParams) -> float:
    """Whole-image SNR per time mode, ``4 eta kappa_bar n_S / ((1-eta)/G + 2 eta N_B)``."""
    denom = _noise_sum(p)
    if denom == 0.0:
        raise NoiselessDivergence("readout variance is zero; SNR diverges")
    return 4.0 * p.eta * p.kappa_bar * p.n_s / denom


def equivalent_quantum_limited_gain(gain_d: float, n_b_prime: float) -> float:
    """Gain that gives a thermal-free channel the same variance as ``(gain_d, N_B')``."""
    if gain_d <= 0 or n_b_prime < 0:
        raise ValueError("need gain_d > 0 and n_b_prime >= 0")
    return 1.0 / (1.0 / gain_d + 2.0 * n_b_prime)


@dataclass(frozen=True)
class LossModel:
    alpha: float
    z_pen: float

    def __post_init__(self):
        if self.alpha < 0 or self.z_pen < 0:
            raise ValueError("alpha and z_pen must be non-negative")


def penetration_loss_db(loss: LossModel) -> float:
    # -10 log10(exp(-alpha z)) written without the exp, which underflows past ~7000 dB
    return 10.0 * loss.alpha * loss.z_pen * math.log10(math.e)


def kappa_from_loss_db(loss_db: float) -> float:
    if loss_db < 0:
        raise ValueError(f"loss must be >= 0 dB, got {loss_db}")
    return 10.0 ** (-loss_db / 10.0)
