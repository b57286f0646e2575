"""Experiment configuration: a flat ``key = value`` text format.

Grammar
-------
* UTF-8 text, one ``key = value`` per line.
* ``#`` starts a comment, either on its own line or after a value.
* Blank lines are ignored; keys are case-sensitive; duplicates are errors.
* List values are comma-separated (``gain_db = 0, 4, 8``).
* Booleans are ``true`` / ``false``.

Unknown keys are rejected so that typos never silently fall back to defaults.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..channel import (
    ChannelParams,
    SourceParams,
    TransducerSpec,
    gain_from_db,
    kappa_from_loss_db,
    source_photons,
    transduction_efficiency,
)
from ..forward import BOUNDARIES, BUDGETS
from ..scene import ObjectField, generate_bar_chart, load_raster
from .presets import PRESETS


class ConfigError(ValueError):
    pass


W0_REFERENCE = 1.0  # metres; d is set to d_over_w0 * W0_REFERENCE


@dataclass(frozen=True)
class ExperimentConfig:
    object: str = "chart"
    chart_rows: int = 200
    chart_cols: int = 200
    chart_groups: int = 3
    chart_bars: int = 3
    chart_dark_kappa: float = 0.0
    chart_bright_kappa: float = 1.0
    raster_kappa_max: float = 1.0

    d_over_w0: tuple = (100.0,)
    gain_db: tuple = (0.0,)
    loss_db: tuple = (100.0,)
    reference_loss_db: float = 100.0
    seeds: tuple = (1, 2, 3, 4, 5)

    photon_budget: str = "per_pixel"
    boundary: str = "periodic"
    clip: bool = True
    resolvable_db: float = 13.0
    contour_levels: tuple = (12.0, 14.0)
    previews: bool = False
    output_dir: str = "runs"

    # Channel. Exactly one route for each of n_s, eta and the thermal term.
    n_p_prime: float | None = None
    n_s: float | None = None
    p_s_watts: float | None = None
    carrier_hz: float | None = None
    bandwidth_hz: float | None = None
    eta: float | None = None
    v_pi_volts: float | None = None
    p_in_watts: float | None = None
    impedance_ohms: float = 50.0
    optical_hz: float = 192e12
    n_b_prime: float | None = None
    n_b: float | None = None

    base_dir: str = field(default=".", compare=False, repr=False)

    def __post_init__(self):
        _validate(self)

    # -- derived quantities -------------------------------------------------

    def resolved_eta(self) -> float:
        if self.eta is not None:
            return self.eta
        if self.v_pi_volts is not None:
            carrier = self.carrier_hz if self.carrier_hz is not None else 100e3
            spec = TransducerSpec(self.v_pi_volts, self.p_in_watts, self.impedance_ohms,
                                  2 * math.pi * carrier, 2 * math.pi * self.optical_hz)
            return transduction_efficiency(spec)
        return 1e-9

    def resolved_n_s(self) -> float:
        if self.n_s is not None:
            return self.n_s
        if self.p_s_watts is not None:
            src = SourceParams.from_hz(self.p_s_watts, self.carrier_hz, self.bandwidth_hz)
            return source_photons(src)
        n_p = 100.0 if self.n_p_prime is None else self.n_p_prime
        return n_p / (self.resolved_eta() * kappa_from_loss_db(self.reference_loss_db))

    def resolved_n_b(self) -> float:
        if self.n_b is not None:
            return self.n_b
        n_bp = 0.0 if self.n_b_prime is None else self.n_b_prime
        return n_bp / self.resolved_eta()

    def channel(self, gain_db: float, loss_db: float) -> ChannelParams:
        """Channel for one sweep cell; loss sets the object-mean transmissivity."""
        return ChannelParams(
            eta=self.resolved_eta(),
            gain=gain_from_db(gain_db),
            n_b=self.resolved_n_b(),
            n_s=self.resolved_n_s(),
            kappa_bar=kappa_from_loss_db(loss_db),
        )

    @property
    def detected_n_b_prime(self) -> float:
        return self.resolved_eta() * self.resolved_n_b()

    def build_object(self) -> ObjectField:
        if self.object == "chart":
            return generate_bar_chart(
                self.chart_rows, self.chart_cols, self.chart_groups, self.chart_bars,
                self.chart_dark_kappa, self.chart_bright_kappa,
            )
        path = Path(self.base_dir) / self.object
        return load_raster(path.read_bytes(), 1.0, self.raster_kappa_max)

    # -- identity -----------------------------------------------------------

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _validate(cfg: ExperimentConfig) -> None:
    for name in ("d_over_w0", "gain_db", "loss_db", "seeds"):
        if len(getattr(cfg, name)) == 0:
            raise ConfigError(f"{name}: axis must not be empty")
    if len(set(cfg.seeds)) != len(cfg.seeds):
        raise ConfigError("seeds must be unique")
    if any(not 0 <= s < 2**64 for s in cfg.seeds):
        raise ConfigError("seeds must be unsigned 64-bit integers")
    if any(d <= 0 for d in cfg.d_over_w0):
        raise ConfigError("d_over_w0 values must be positive")
    if any(g < 0 for g in cfg.gain_db):
        raise ConfigError("gain_db values must be >= 0 (G >= 1)")
    if any(x < 0 for x in cfg.loss_db) or cfg.reference_loss_db < 0:
        raise ConfigError("losses must be >= 0 dB")
    if cfg.photon_budget not in BUDGETS:
        raise ConfigError(f"photon_budget must be one of {BUDGETS}")
    if cfg.boundary not in BOUNDARIES:
        raise ConfigError(f"boundary must be one of {BOUNDARIES}")
    if cfg.n_p_prime is not None and (cfg.n_s is not None or cfg.p_s_watts is not None):
        raise ConfigError("n_p_prime is mutually exclusive with n_s / p_s_watts")
    if cfg.n_s is not None and cfg.p_s_watts is not None:
        raise ConfigError("give either n_s or p_s_watts, not both")
    if cfg.p_s_watts is not None and (cfg.carrier_hz is None or cfg.bandwidth_hz is None):
        raise ConfigError("p_s_watts needs carrier_hz and bandwidth_hz")
    if cfg.eta is not None and cfg.v_pi_volts is not None:
        raise ConfigError("give either eta or v_pi_volts/p_in_watts, not both")
    if cfg.v_pi_volts is not None and cfg.p_in_watts is None:
        raise ConfigError("v_pi_volts needs p_in_watts")
    if cfg.n_b is not None and cfg.n_b_prime is not None:
        raise ConfigError("give either n_b or n_b_prime, not both")
    if cfg.object != "chart":
        path = Path(cfg.base_dir) / cfg.object
        if not path.is_file():
            raise ConfigError(f"object raster not found: {path}")
    try:
        cfg.channel(cfg.gain_db[0], cfg.loss_db[0])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


_LISTS = {"d_over_w0": float, "gain_db": float, "loss_db": float, "seeds": int,
          "contour_levels": float}
_BOOLS = {"clip", "previews"}
_INTS = {"chart_rows", "chart_cols", "chart_groups", "chart_bars"}
_STRS = {"object", "photon_budget", "boundary", "output_dir"}


def _fields() -> set[str]:
    return {f for f in ExperimentConfig.__dataclass_fields__ if f != "base_dir"}


def _convert(key: str, raw: str, lineno: int):
    try:
        if key in _LISTS:
            items = [s.strip() for s in raw.split(",")]
            items = [s for s in items if s]
            conv = _LISTS[key]
            return tuple(int(s, 0) if conv is int else float(s) for s in items)
        if key in _BOOLS:
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError(f"expected true/false, got {raw!r}")
            return low == "true"
        if key in _INTS:
            return int(raw)
        if key in _STRS:
            return raw
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {key}: {exc}") from None


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    known = _fields()
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, lineno)
    try:
        return ExperimentConfig(base_dir=base_dir, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def format_config(cfg: ExperimentConfig) -> str:
    """Serialise back to the text format (round-trips through :func:`parse_config`)."""
    lines = []
    for key, value in cfg.as_dict().items():
        if value is None:
            continue
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, tuple):
            text = ", ".join(repr(v) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def load_config(ref: str) -> ExperimentConfig:
    """Load a config file, or a built-in preset named ``preset_<name>``."""
    path = Path(ref)
    if path.is_file():
        return parse_config(path.read_text(encoding="utf-8"), base_dir=str(path.parent))
    name = ref[len("preset_"):] if ref.startswith("preset_") else None
    if name in PRESETS:
        return parse_config(PRESETS[name])
    raise ConfigError(f"no config file or preset named {ref!r} (presets: "
                      + ", ".join(f"preset_{n}" for n in sorted(PRESETS)) + ")")
