"""Scenario configuration: defaults, file parsing, and comparison setups.

A scenario file is flat ``key = value`` text ('#' comments).  Unknown keys are
hard errors; unset keys take the mid-band defaults below.  Power spectral
densities accept an explicit unit suffix, either W/Hz ("1e-15 W") or dBm/Hz
("-150 dBm"); bare numbers are read as W/Hz.  A setups file for the
cross-technology comparison uses the same syntax inside [section] blocks, one
section per setup, each starting from the same defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .channel import PropagationProfile
from .errors import ConfigError
from .geometry import ArrayGeometry, CellGeometry
from .power import HardwareProfile
from .throughput import ProtocolConfig
from .transceiver import LinkBudget

SPEED_OF_LIGHT = 3e8  # m/s, rounded convention so 7.5 GHz gives exactly 0.04 m

# Thermal noise floor at 290 K plus 0 dB noise figure: -174 dBm/Hz.
DEFAULT_NOISE_DENSITY = 1e-3 * 10.0 ** (-174.0 / 10.0)

SYSTEM_FAMILIES = ("xl_mimo", "sub6", "mmwave")


@dataclass(frozen=True)
class Scenario:
    """One complete system configuration."""

    system: str = "xl_mimo"
    num_antennas: int = 512
    num_users: int = 16
    carrier_frequency: float = 7.5e9
    element_spacing: Optional[float] = None
    cell: CellGeometry = CellGeometry(70.0, 150.0)
    proto: ProtocolConfig = ProtocolConfig(
        bandwidth=4e8,
        coherence_block_size=1000,
        pilot_factor=1.0,
        uplink_fraction=0.4,
        downlink_fraction=0.6,
    )
    tx_power_density: float = 1e-15
    noise_density: float = DEFAULT_NOISE_DENSITY
    pathloss_constant: float = 1.0
    angular_spread: float = 0.0
    quadrature_points: int = 64
    rician_factor: float = 10.0
    intercell_gains: tuple = ()
    hw: HardwareProfile = HardwareProfile()

    def __post_init__(self):
        if self.system not in SYSTEM_FAMILIES:
            raise ConfigError(f"system must be one of {SYSTEM_FAMILIES}, got {self.system!r}")
        if self.num_antennas < 1 or self.num_users < 1:
            raise ConfigError("num_antennas and num_users must be >= 1")
        if self.carrier_frequency <= 0:
            raise ConfigError("carrier_frequency must be > 0")
        if self.element_spacing is not None and self.element_spacing <= 0:
            raise ConfigError("element_spacing must be > 0")
        if not self.cell.r_min < self.cell.r_max:
            raise ConfigError(f"need r_min < r_max, got ({self.cell.r_min}, {self.cell.r_max})")
        if self.tx_power_density <= 0 or self.noise_density <= 0:
            raise ConfigError("tx_power_density and noise_density must be > 0")
        if self.pathloss_constant <= 0:
            raise ConfigError("pathloss_constant must be > 0")
        if self.angular_spread < 0 or self.rician_factor < 0:
            raise ConfigError("angular_spread and rician_factor must be >= 0")
        if self.quadrature_points < 1:
            raise ConfigError("quadrature_points must be >= 1")
        if any(g < 0 for g in self.intercell_gains):
            raise ConfigError("intercell gains must be >= 0")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def spacing(self) -> float:
        """Element spacing; half-wavelength unless overridden."""
        return self.element_spacing if self.element_spacing is not None else self.wavelength / 2.0

    @property
    def effective_noise_density(self) -> float:
        """Noise density inflated by the aggregate inter-cell interference term."""
        inter = sum(g**2 for g in self.intercell_gains)
        return self.noise_density + self.tx_power_density * inter

    def array_geometry(self) -> ArrayGeometry:
        return ArrayGeometry.ula(self.num_antennas, self.spacing)

    def propagation(self) -> PropagationProfile:
        return PropagationProfile(
            wavelength=self.wavelength,
            pathloss_constant=self.pathloss_constant,
            angular_spread=self.angular_spread,
            rician_factor=self.rician_factor,
            quadrature_points=self.quadrature_points,
        )

    def link_budget(self, num_users: Optional[int] = None) -> LinkBudget:
        return LinkBudget.from_per_user(
            self.tx_power_density,
            self.effective_noise_density,
            num_users if num_users is not None else self.num_users,
        )

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def snapshot(self) -> dict:
        """All semantic fields as plain types, for manifests and hashing."""
        return {
            "system": self.system,
            "num_antennas": self.num_antennas,
            "num_users": self.num_users,
            "carrier_frequency": self.carrier_frequency,
            "element_spacing": self.element_spacing,
            "r_min": self.cell.r_min,
            "r_max": self.cell.r_max,
            "bandwidth": self.proto.bandwidth,
            "coherence_block": self.proto.coherence_block_size,
            "tau": self.proto.pilot_factor,
            "xi_ul": self.proto.uplink_fraction,
            "xi_dl": self.proto.downlink_fraction,
            "tx_power_density": self.tx_power_density,
            "noise_density": self.noise_density,
            "pathloss_constant": self.pathloss_constant,
            "angular_spread": self.angular_spread,
            "quadrature_points": self.quadrature_points,
            "rician_factor": self.rician_factor,
            "intercell_gains": list(self.intercell_gains),
            "hardware": dataclasses.asdict(self.hw),
        }


def ring_interferer_gains(
    wavelength: float, num_cells: int, users_per_cell: int, distance: float
) -> tuple:
    """Equal-gain interferer ring: every out-of-cell user at one far-field
    distance with amplitude gain lambda / distance.

    Simplified multi-cell extension; the analysis proper takes explicit gain
    lists.
    """
    if num_cells < 0 or users_per_cell < 0:
        raise ConfigError("ring sizes must be >= 0")
    if distance <= 0:
        raise ConfigError("ring distance must be > 0")
    return tuple([wavelength / distance] * (num_cells * users_per_cell))


# ---------------------------------------------------------------------------
# Flat key = value parsing
# ---------------------------------------------------------------------------

def _parse_power_density(raw: str) -> float:
    """W/Hz from '<x> W', '<x> dBm' (per Hz) or a bare number (W/Hz)."""
    tokens = raw.split()
    if len(tokens) == 1:
        return float(tokens[0])
    if len(tokens) == 2:
        value, unit = float(tokens[0]), tokens[1].lower()
        if unit in ("w", "w_per_hz"):
            return value
        if unit in ("dbm", "dbm_per_hz"):
            return 1e-3 * 10.0 ** (value / 10.0)
    raise ConfigError(f"bad power value {raw!r}: expected '<number> [W|dBm]'")


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"bad boolean {raw!r}")


def _parse_int(raw: str) -> int:
    value = float(raw)
    if value != int(value):
        raise ConfigError(f"expected an integer, got {raw!r}")
    return int(value)


# key -> (group, field, converter); units noted per key.
_KEY_TABLE = {
    "system": ("scenario", "system", str),                          # xl_mimo | sub6 | mmwave
    "num_antennas": ("scenario", "num_antennas", _parse_int),       # count
    "num_users": ("scenario", "num_users", _parse_int),             # count
    "carrier_frequency": ("scenario", "carrier_frequency", float),  # Hz
    "element_spacing": ("scenario", "element_spacing", float),      # m
    "tx_power": ("scenario", "tx_power_density", _parse_power_density),      # W/Hz or dBm/Hz
    "noise_density": ("scenario", "noise_density", _parse_power_density),    # W/Hz or dBm/Hz
    "pathloss_constant": ("scenario", "pathloss_constant", float),  # dimensionless
    "angular_spread": ("scenario", "angular_spread", float),        # rad
    "quadrature_points": ("scenario", "quadrature_points", _parse_int),
    "rician_factor": ("scenario", "rician_factor", float),          # dimensionless
    "r_min": ("cell", "r_min", float),                              # m
    "r_max": ("cell", "r_max", float),                              # m
    "bandwidth": ("proto", "bandwidth", float),                     # Hz
    "coherence_block": ("proto", "coherence_block_size", float),    # resource elements
    "tau": ("proto", "pilot_factor", float),                        # dimensionless
    "xi_ul": ("proto", "uplink_fraction", float),                   # dimensionless
    "xi_dl": ("proto", "downlink_fraction", float),                 # dimensionless
    "pa_efficiency_bs": ("hw", "pa_efficiency_bs", float),
    "pa_efficiency_ue": ("hw", "pa_efficiency_ue", float),
    "pa_static": ("hw", "pa_static", float),                        # W
    "lna_coeff": ("hw", "lna_coeff", float),                        # W/(Hz*gain)
    "lna_gain": ("hw", "lna_gain", float),                          # linear
    "syn_power": ("hw", "syn_power", float),                        # W
    "rf_circ": ("hw", "rf_circ", float),                            # W
    "if_circ": ("hw", "if_circ", float),                            # W
    "adc_coeff": ("hw", "adc_coeff", float),                        # J/step
    "dac_coeff": ("hw", "dac_coeff", float),                        # J/step
    "adc_bits": ("hw", "adc_bits", _parse_int),
    "dac_bits": ("hw", "dac_bits", _parse_int),
    "oversampling": ("hw", "oversampling", float),
    "compute_efficiency": ("hw", "compute_efficiency", float),      # flops/W
    "decode_flops": ("hw", "decode_flops", float),                  # flops/bit
    "fixed_bs": ("hw", "fixed_bs", float),                          # W
    "fixed_ue": ("hw", "fixed_ue", float),                          # W
    "phase_shifter": ("hw", "phase_shifter", float),                # W
    "num_rf_chains": ("hw", "num_rf_chains", _parse_int),
    "ofdm_enabled": ("hw", "ofdm_enabled", _parse_bool),
    "ofdm_subcarriers": ("hw", "ofdm_subcarriers", _parse_int),
    # Multi-cell ring extension (not part of the single-cell analysis proper).
    "intercell_ring_cells": ("ring", "cells", _parse_int),
    "intercell_ring_users": ("ring", "users", _parse_int),
    "intercell_ring_distance": ("ring", "distance", float),         # m
}


def parse_keyvalue_lines(text: str, allow_sections: bool = False):
    """Parse 'key = value' lines; returns {section: {key: raw_value}}.

    The anonymous leading section is keyed by ''.  Raises ConfigError with
    the offending line number.
    """
    sections: dict = {"": {}}
    current = ""
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            if not allow_sections:
                raise ConfigError(f"line {lineno}: sections are not allowed in this file")
            current = line[1:-1].strip()
            if not current:
                raise ConfigError(f"line {lineno}: empty section name")
            if current in sections:
                raise ConfigError(f"line {lineno}: duplicate section {current!r}")
            sections[current] = {}
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key not in _KEY_TABLE:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        sections[current][key] = (lineno, value)
    return sections


def build_scenario(raw_items: dict, base: Optional[Scenario] = None) -> Scenario:
    """Scenario from parsed overrides on top of the defaults (or ``base``)."""
    base = base if base is not None else Scenario()
    groups: dict = {"scenario": {}, "cell": {}, "proto": {}, "hw": {}, "ring": {}}
    for key, (lineno, raw) in raw_items.items():
        group, field_name, conv = _KEY_TABLE[key]
        try:
            groups[group][field_name] = conv(raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from exc

    cell = dataclasses.replace(base.cell, **groups["cell"]) if groups["cell"] else base.cell
    proto = dataclasses.replace(base.proto, **groups["proto"]) if groups["proto"] else base.proto
    hw = dataclasses.replace(base.hw, **groups["hw"]) if groups["hw"] else base.hw
    scenario = dataclasses.replace(base, cell=cell, proto=proto, hw=hw, **groups["scenario"])

    ring = groups["ring"]
    if ring:
        cells = ring.get("cells", 0)
        users = ring.get("users", scenario.num_users)
        distance = ring.get("distance", 2.0 * scenario.cell.r_max)
        gains = ring_interferer_gains(scenario.wavelength, cells, users, distance)
        scenario = dataclasses.replace(scenario, intercell_gains=gains)
    return scenario


def load_scenario(path: str) -> Scenario:
    """Read and validate one scenario file; unset keys take the defaults."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    items = parse_keyvalue_lines(text, allow_sections=False)[""]
    return build_scenario(items)


# ---------------------------------------------------------------------------
# Cross-technology comparison setups
# ---------------------------------------------------------------------------

# Per-band hardware adjustments for the 28 GHz profile: lower PA efficiency,
# costlier LNAs/converters at multi-hundred-MHz rates, hotter LO chain and
# phase shifters.  These are typicality defaults, exposed through the setups
# file like every other key.
MMWAVE_HARDWARE = HardwareProfile(
    pa_efficiency_bs=0.10,
    pa_efficiency_ue=0.05,
    lna_coeff=8.35e-11,
    syn_power=0.15,
    rf_circ=1.0,
    adc_coeff=9.85e-19,
    dac_coeff=8.30e-19,
    phase_shifter=0.03,
    num_rf_chains=16,
)


def default_setups() -> list:
    """The three representative configurations used by the comparison driver."""
    sub6 = Scenario(
        system="sub6",
        carrier_frequency=3.5e9,
        num_antennas=64,
        num_users=8,
        cell=CellGeometry(70.0, 500.0),
        proto=dataclasses.replace(Scenario().proto, bandwidth=2e7),
    )
    xl = Scenario(
        system="xl_mimo",
        carrier_frequency=7.5e9,
        num_antennas=512,
        num_users=16,
        cell=CellGeometry(70.0, 200.0),
    )
    mmwave = Scenario(
        system="mmwave",
        carrier_frequency=28e9,
        num_antennas=256,
        num_users=16,
        cell=CellGeometry(70.0, 150.0),
        proto=dataclasses.replace(Scenario().proto, bandwidth=8e8),
        hw=MMWAVE_HARDWARE,
    )
    return [("setup1_sub6", sub6), ("setup2_xl_mimo", xl), ("setup3_mmwave", mmwave)]


def load_setups(path: str) -> list:
    """Parse a sectioned setups file into (name, Scenario) pairs.

    Each [section] starts from the library defaults; sections appear in file
    order.  mmWave sections that do not override hardware keys get the
    28 GHz profile.
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    sections = parse_keyvalue_lines(text, allow_sections=True)
    if sections[""]:
        raise ConfigError("setups file must place every key inside a [section]")
    setups = []
    for name, items in sections.items():
        if name == "":
            continue
        system = items.get("system")
        base = Scenario()
        if system is not None and system[1].strip() == "mmwave":
            base = dataclasses.replace(base, system="mmwave", hw=MMWAVE_HARDWARE)
        setups.append((name, build_scenario(items, base=base)))
    if not setups:
        raise ConfigError("setups file defines no sections")
    return setups
