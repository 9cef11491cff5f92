"""Parametric power-consumption model for the three system architectures.

Ground truth is the per-component summation (PA, LNA, synthesizer, RF/IF
circuitry, data converters, channel estimation, precoding/detection,
decoding, OFDM processing, fixed blocks), assembled for a fully-digital BS
(mid-band XL-MIMO and Sub-6 GHz) and for a hybrid-beamforming mmWave BS where
converter and digital-processing terms ride on the RF-chain count instead of
the element count.  A coefficient-polynomial view of the same total is kept
alongside for the scaling-law analysis, and the two assemblies are reconciled
on every evaluation.

Conventions: transmit powers are spectral densities (W/Hz), so radiated PA
power is bandwidth times density over efficiency.  PA bias power counts only
while the PA is transmitting, i.e. weighted by the link-direction fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

from .errors import ConfigError
from .throughput import wrap_throughput

# Component-sum and polynomial assemblies may legitimately differ (the
# polynomial drops the small detection-apply flop term); reconciliation
# beyond this bound indicates a transcription bug.
RECONCILIATION_TOL = 0.02


@dataclass(frozen=True)
class HardwareProfile:
    """Hardware and signal-processing coefficients of the power model.

    Defaults follow the mid-band evaluation setting; comparison profiles
    override per band.  Units: powers in W, converter coefficients in J per
    conversion step, lna_coeff in W/(Hz * linear gain), compute_efficiency in
    flop/s per W, decode_flops in flop per bit.
    """

    pa_efficiency_bs: float = 0.30
    pa_efficiency_ue: float = 0.15
    pa_static: float = 0.3
    lna_coeff: float = 1.67e-11
    lna_gain: float = 100.0
    syn_power: float = 0.05
    rf_circ: float = 0.5
    if_circ: float = 0.3
    adc_coeff: float = 1.97e-19
    dac_coeff: float = 1.66e-19
    adc_bits: int = 14
    dac_bits: int = 14
    oversampling: float = 1.0
    compute_efficiency: float = 3e10
    decode_flops: float = 100.0
    fixed_bs: float = 15.0
    fixed_ue: float = 2.0
    phase_shifter: float = 0.01
    num_rf_chains: Optional[int] = None
    ofdm_enabled: bool = True
    ofdm_subcarriers: int = 4096

    def __post_init__(self):
        if not (0 < self.pa_efficiency_bs <= 1 and 0 < self.pa_efficiency_ue <= 1):
            raise ConfigError("PA efficiencies must lie in (0, 1]")
        for name in (
            "pa_static", "lna_coeff", "lna_gain", "syn_power", "rf_circ", "if_circ",
            "adc_coeff", "dac_coeff", "compute_efficiency", "decode_flops",
            "fixed_bs", "fixed_ue", "phase_shifter",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if not (1 <= self.adc_bits <= 24 and 1 <= self.dac_bits <= 24):
            raise ConfigError("converter resolutions must lie in [1, 24] bits")
        if self.oversampling < 1:
            raise ConfigError("oversampling must be >= 1")
        if self.num_rf_chains is not None and self.num_rf_chains < 1:
            raise ConfigError("num_rf_chains must be >= 1 when set")
        if self.ofdm_subcarriers < 2:
            raise ConfigError("ofdm_subcarriers must be >= 2")

    def adc_power(self, bandwidth: float) -> float:
        """One I/Q ADC: 2 * eps * c_AD * 2^(2b) * B."""
        return 2.0 * self.oversampling * self.adc_coeff * 4.0**self.adc_bits * bandwidth

    def dac_power(self, bandwidth: float) -> float:
        return 2.0 * self.oversampling * self.dac_coeff * 4.0**self.dac_bits * bandwidth

    def lna_power(self, bandwidth: float) -> float:
        return self.lna_coeff * self.lna_gain * bandwidth

    def ofdm_unit_power(self, bandwidth: float) -> float:
        """5 B log2(N_sc) / Q_B, the per-chain FFT/IFFT cost of one direction."""
        if not self.ofdm_enabled:
            return 0.0
        return 5.0 * bandwidth * math.log2(self.ofdm_subcarriers) / self.compute_efficiency


@dataclass(frozen=True)
class PowerBreakdown:
    """Named wattages of one total-power evaluation; parts sum to total.

    BS-side components are individual; the user side is aggregated in
    ue_total (PA, LNA, synthesizer, circuits, converters, fixed).  ofdm
    carries the FFT/IFFT load of BS chains and users together;
    phase_shifter is nonzero only for the hybrid architecture.
    """

    pa_radiated: float
    pa_static: float
    lna: float
    syn: float
    rf_circ: float
    adc: float
    dac: float
    if_circ: float
    ce: float
    pd: float
    cd: float
    ofdm: float
    phase_shifter: float
    fixed_bs: float
    ue_total: float
    total: float

    def parts(self) -> dict:
        return {
            f.name: getattr(self, f.name) for f in fields(self) if f.name != "total"
        }

    def __post_init__(self):
        vals = self.parts().values()
        if any(v < 0 for v in vals):
            raise ConfigError("power components must be >= 0")
        s = sum(vals)
        if abs(s - self.total) > 1e-9 * max(abs(self.total), 1e-30):
            raise ConfigError(f"breakdown parts sum {s} != total {self.total}")


def _ue_unit_power(bandwidth: float, tx_power_density: float, proto, hw: HardwareProfile) -> float:
    """Average power of one user terminal, W (excludes its OFDM share)."""
    xi_ul, xi_dl = proto.uplink_fraction, proto.downlink_fraction
    pa = xi_ul * (bandwidth * tx_power_density / hw.pa_efficiency_ue + hw.pa_static)
    rf = xi_dl * hw.lna_power(bandwidth) + hw.syn_power + hw.rf_circ
    dc = xi_dl * hw.adc_power(bandwidth) + xi_ul * hw.dac_power(bandwidth) + hw.if_circ
    return pa + rf + dc + hw.fixed_ue


def component_powers(scenario, hw: HardwareProfile, throughput_bps: float) -> PowerBreakdown:
    """Fully-digital per-component power assembly (BS plus K user terminals).

    ``scenario`` needs num_antennas, num_users, tx_power_density and proto;
    throughput_bps is the summed two-way network throughput feeding the
    decoding term.
    """
    n, k = scenario.num_antennas, scenario.num_users
    proto = scenario.proto
    b, s, tau = proto.bandwidth, proto.coherence_block_size, proto.pilot_factor
    xi_ul, xi_dl = proto.uplink_fraction, proto.downlink_fraction
    p = scenario.tx_power_density
    q = hw.compute_efficiency

    pa_radiated = xi_dl * b * (k * p) / hw.pa_efficiency_bs
    pa_static = xi_dl * n * hw.pa_static
    lna = n * xi_ul * hw.lna_power(b)
    syn = n * hw.syn_power
    rf_circ = n * hw.rf_circ
    adc = n * xi_ul * hw.adc_power(b)
    dac = n * xi_dl * hw.dac_power(b)
    if_circ = n * hw.if_circ

    ce = (b / s) * 8.0 * n * k**2 * tau / q
    both = xi_ul + xi_dl
    pd = (
        b * (1.0 - tau * k / s) * both * 8.0 * n * k / q
        + b * both / s * (8.0 * k**3 / 3.0 + 16.0 * n * k**2 + 2.0 * n * k) / q
    )
    cd = throughput_bps * hw.decode_flops / q
    ofdm = both * (n + k) * hw.ofdm_unit_power(b)

    ue_total = k * _ue_unit_power(b, p, proto, hw)

    parts = dict(
        pa_radiated=pa_radiated, pa_static=pa_static, lna=lna, syn=syn,
        rf_circ=rf_circ, adc=adc, dac=dac, if_circ=if_circ, ce=ce, pd=pd,
        cd=cd, ofdm=ofdm, phase_shifter=0.0, fixed_bs=hw.fixed_bs,
        ue_total=ue_total,
    )
    return PowerBreakdown(total=sum(parts.values()), **parts)


def _hybrid_component_powers(scenario, hw: HardwareProfile, throughput_bps: float) -> PowerBreakdown:
    """Hybrid-beamforming assembly: converters and digital load per RF chain."""
    n, k = scenario.num_antennas, scenario.num_users
    n_rf = hw.num_rf_chains if hw.num_rf_chains is not None else k
    proto = scenario.proto
    b, s, tau = proto.bandwidth, proto.coherence_block_size, proto.pilot_factor
    xi_ul, xi_dl = proto.uplink_fraction, proto.downlink_fraction
    p = scenario.tx_power_density
    q = hw.compute_efficiency

    pa_radiated = xi_dl * b * (k * p) / hw.pa_efficiency_bs
    pa_static = xi_dl * n * hw.pa_static
    lna = n * xi_ul * hw.lna_power(b)
    syn = n * hw.syn_power
    rf_circ = n * hw.rf_circ
    ce = n * 8.0 * b * k**2 * tau / (s * q)

    adc = n_rf * xi_ul * hw.adc_power(b)
    dac = n_rf * xi_dl * hw.dac_power(b)
    if_circ = n_rf * hw.if_circ
    pd = (
        n_rf * (b * (1.0 - tau * k / s) * 8.0 * k / q + b / (s * q) * (16.0 * k**2 + 2.0 * k))
        + 8.0 * b * k**3 / (3.0 * s * q)
    )
    cd = throughput_bps * hw.decode_flops / q
    phase_shifter = n_rf * n * hw.phase_shifter
    ofdm = (xi_ul + xi_dl) * (n_rf + k) * hw.ofdm_unit_power(b)

    ue_total = k * _ue_unit_power(b, p, proto, hw)

    parts = dict(
        pa_radiated=pa_radiated, pa_static=pa_static, lna=lna, syn=syn,
        rf_circ=rf_circ, adc=adc, dac=dac, if_circ=if_circ, ce=ce, pd=pd,
        cd=cd, ofdm=ofdm, phase_shifter=phase_shifter, fixed_bs=hw.fixed_bs,
        ue_total=ue_total,
    )
    return PowerBreakdown(total=sum(parts.values()), **parts)


@dataclass(frozen=True)
class CoefficientSet:
    """Coefficients of P_sum = i_p K P + N sum_i i_n[i] K^i + i_k1 K + i_k3 K^3
    + i_r * throughput + i_fix."""

    i_p: float
    i_n0: float
    i_n1: float
    i_n2: float
    i_k1: float
    i_k3: float
    i_r: float
    i_fix: float

    def polynomial_total(self, n: float, k: float, p: float, throughput_bps: float) -> float:
        return (
            self.i_p * k * p
            + n * (self.i_n0 + self.i_n1 * k + self.i_n2 * k**2)
            + self.i_k1 * k
            + self.i_k3 * k**3
            + self.i_r * throughput_bps
            + self.i_fix
        )


def coefficients(scheme: str, scenario, hw: HardwareProfile) -> CoefficientSet:
    """Coefficient view of the fully-digital power total.

    'xl_mimo' gives the absolute coefficients; 'bandwidth_normalized' keeps
    only the bandwidth-proportional parts divided by B (the large-bandwidth
    regime, where constant terms vanish from the per-Hz cost).  The PA bias
    entries carry their link-direction fractions so the polynomial tracks the
    component assembly.
    """
    proto = scenario.proto
    b, s, tau = proto.bandwidth, proto.coherence_block_size, proto.pilot_factor
    xi_ul, xi_dl = proto.uplink_fraction, proto.downlink_fraction
    q = hw.compute_efficiency
    both = xi_ul + xi_dl
    ofdm_unit = hw.ofdm_unit_power(b)

    i_n0 = (
        xi_ul * hw.lna_power(b)
        + hw.syn_power + hw.rf_circ + hw.if_circ
        + xi_ul * hw.adc_power(b) + xi_dl * hw.dac_power(b)
        + xi_dl * hw.pa_static
        + both * ofdm_unit
    )
    i_n1 = 8.0 * b * both / q
    i_n2 = b / (s * q) * (16.0 * both + 8.0 * tau * both - 8.0 * tau)
    i_k1 = (
        xi_dl * hw.lna_power(b)
        + hw.syn_power + hw.rf_circ + hw.if_circ
        + xi_dl * hw.adc_power(b) + xi_ul * hw.dac_power(b)
        + xi_ul * hw.pa_static
        + hw.fixed_ue
        + both * ofdm_unit
    )
    i_k3 = 8.0 * b * both / (3.0 * s * q)
    i_p = b * (xi_ul / hw.pa_efficiency_ue + xi_dl / hw.pa_efficiency_bs)
    i_r = hw.decode_flops / q
    coeff = CoefficientSet(
        i_p=i_p, i_n0=i_n0, i_n1=i_n1, i_n2=i_n2,
        i_k1=i_k1, i_k3=i_k3, i_r=i_r, i_fix=hw.fixed_bs,
    )

    if scheme == "xl_mimo":
        return coeff
    if scheme == "bandwidth_normalized":
        per_hz = dict(
            i_p=i_p / b,
            i_n0=(xi_ul * hw.lna_power(b) + xi_ul * hw.adc_power(b)
                  + xi_dl * hw.dac_power(b) + both * ofdm_unit) / b,
            i_n1=i_n1 / b,
            i_n2=i_n2 / b,
            i_k1=(xi_dl * hw.lna_power(b) + xi_dl * hw.adc_power(b)
                  + xi_ul * hw.dac_power(b) + both * ofdm_unit) / b,
            i_k3=i_k3 / b,
            i_r=i_r,
            i_fix=0.0,
        )
        return CoefficientSet(**per_hz)
    raise ConfigError(f"unknown coefficient scheme {scheme!r}")


def total_power(system: str, scenario, hw: HardwareProfile, se: float):
    """Total consumed power (W) and its breakdown for one operating point.

    ``se`` is the per-user spectral efficiency (bits/s/Hz, pre-overhead) that
    sets the decoding load.  For the fully-digital families the component sum
    is cross-checked against the coefficient polynomial on every call.
    """
    k = scenario.num_users
    throughput_bps = wrap_throughput(se, scenario.proto, k, "sum") if k > 0 else 0.0

    if system in ("xl_mimo", "sub6"):
        breakdown = component_powers(scenario, hw, throughput_bps)
        poly = coefficients("xl_mimo", scenario, hw).polynomial_total(
            scenario.num_antennas, k, scenario.tx_power_density, throughput_bps
        )
        rel = abs(poly - breakdown.total) / max(breakdown.total, 1e-30)
        if rel > RECONCILIATION_TOL:
            raise ConfigError(
                f"power assemblies disagree by {rel:.2%} (component {breakdown.total:.3f} W "
                f"vs polynomial {poly:.3f} W)"
            )
        return breakdown.total, breakdown
    if system == "mmwave":
        breakdown = _hybrid_component_powers(scenario, hw, throughput_bps)
        return breakdown.total, breakdown
    raise ConfigError(f"unknown system family {system!r}")
