"""Energy-efficiency evaluation and its scaling-law diagnostics.

EE is the two-way network throughput divided by the total consumed power,
with the decoding term of the power model evaluated at the same rate as the
numerator (a single pass suffices: the term is affine in rate).
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigError, NumericDomainError
from .power import HardwareProfile, coefficients, total_power
from .scenario import Scenario
from .throughput import (
    chi_bar,
    mc_ergodic_se,
    mmwave_se_approx,
    se_approx,
    sub6_se_lower_bound,
    wrap_throughput,
)


@dataclass(frozen=True)
class EePoint:
    """One EE evaluation: bits/joule with its numerator, denominator and
    the (N, K, B, P) tuple that produced it."""

    ee: float
    throughput: float
    power: float
    config_snapshot: tuple

    def __post_init__(self):
        if self.throughput < 0 or self.power <= 0:
            raise NumericDomainError("throughput must be >= 0 and power > 0")
        if abs(self.ee - self.throughput / self.power) > 1e-12 * max(self.ee, 1e-300):
            raise ConfigError("ee must equal throughput / power")


def closed_form_se(system: str, scenario: Scenario) -> float:
    """Per-user ergodic-SE closed form for the given family, bits/s/Hz."""
    budget = scenario.link_budget()
    if system == "xl_mimo":
        return se_approx(
            scenario.num_antennas, scenario.spacing, scenario.cell,
            scenario.num_users, budget, scenario.wavelength,
        )
    if system == "sub6":
        return sub6_se_lower_bound(
            scenario.num_antennas, scenario.num_users, budget,
            scenario.cell, scenario.wavelength,
        )
    if system == "mmwave":
        return mmwave_se_approx(
            scenario.num_antennas, budget, scenario.cell, scenario.wavelength
        )
    raise ConfigError(f"unknown system family {system!r}")


def energy_efficiency(
    system: str,
    scenario: Scenario,
    hw: Optional[HardwareProfile] = None,
    mode: str = "closed_form",
    trials: int = 2000,
    seed=0,
) -> EePoint:
    """EE at one operating point, from the closed-form SE or a Monte Carlo mean."""
    hw = hw if hw is not None else scenario.hw
    if mode == "closed_form":
        se = closed_form_se(system, scenario)
    elif mode == "monte_carlo":
        se = mc_ergodic_se(scenario, scenario.num_users, trials, seed).mean
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    throughput = wrap_throughput(se, scenario.proto, scenario.num_users, "sum")
    power, _ = total_power(system, scenario, hw, se)
    return EePoint(
        ee=throughput / power,
        throughput=throughput,
        power=power,
        config_snapshot=(
            scenario.num_antennas,
            scenario.num_users,
            scenario.proto.bandwidth,
            scenario.tx_power_density,
        ),
    )


def ee_bandwidth_limit(scenario: Scenario, hw: Optional[HardwareProfile] = None) -> float:
    """Large-bandwidth EE limit, bits/joule; independent of scenario bandwidth.

    With per-Hz transmit power the SE does not move with B, throughput grows
    proportionally, and the per-Hz power cost settles at the
    bandwidth-normalized coefficients; their ratio is the plateau.
    For the hybrid family the per-Hz power slope is taken from the component
    model directly (its converter terms ride on the RF-chain count).
    """
    hw = hw if hw is not None else scenario.hw
    se = closed_form_se(scenario.system, scenario)
    k = scenario.num_users
    proto = scenario.proto
    proto.check_overhead(k)
    overhead = 1.0 - proto.pilot_factor * k / proto.coherence_block_size
    numerator = k * overhead * se

    if scenario.system in ("xl_mimo", "sub6"):
        cf = coefficients("bandwidth_normalized", scenario, hw)
        denominator = cf.polynomial_total(
            scenario.num_antennas, k, scenario.tx_power_density, k * overhead * se
        )
    else:
        b = proto.bandwidth
        p1, _ = total_power(scenario.system, scenario, hw, se)
        scaled = scenario.replace(proto=dataclasses.replace(proto, bandwidth=2.0 * b))
        p2, _ = total_power(scenario.system, scaled, hw, se)
        denominator = (p2 - p1) / b  # exact: power is affine in B at fixed SE
    return numerator / denominator


def knee_point(scenario: Scenario, hw: Optional[HardwareProfile] = None, eta_n: float = 0.95) -> float:
    """Antenna count where low-power EE reaches the fraction eta_n of its plateau.

    Real-valued; consumers round.  Valid in the low-transmit-power regime
    (array-gain SNR well below 1 at the knee); a warning is emitted otherwise.
    """
    if not (0 < eta_n < 1):
        raise ConfigError("eta_n must lie in (0, 1)")
    hw = hw if hw is not None else scenario.hw
    cf = coefficients("xl_mimo", scenario, hw)
    k, p = scenario.num_users, scenario.tx_power_density
    fixed_costs = cf.i_p * k * p + cf.i_k1 * k + cf.i_k3 * k**3 + cf.i_fix
    per_antenna = cf.i_n0 + cf.i_n1 * k + cf.i_n2 * k**2
    n_kp = eta_n / (1.0 - eta_n) * fixed_costs / per_antenna

    pole = 2.0 * scenario.cell.r_min / scenario.spacing
    probe_n = min(n_kp, 0.99 * pole)
    snr = (
        p * scenario.wavelength**2
        * chi_bar(probe_n, scenario.spacing, scenario.cell)
        / scenario.effective_noise_density
    )
    if snr > 0.1:
        warnings.warn(
            f"knee point evaluated outside the low-power regime (array-gain SNR "
            f"{snr:.2f} at N={probe_n:.0f}); the closed form may be inaccurate",
            stacklevel=2,
        )
    return n_kp


def ee_on_antenna_grid(
    scenario: Scenario, hw: Optional[HardwareProfile], n_grid: Sequence[int]
) -> dict:
    """EE per grid antenna count; entries out of the model domain are None."""
    out: dict = {}
    for n in n_grid:
        try:
            point = energy_efficiency(
                scenario.system, scenario.replace(num_antennas=int(n)), hw=hw
            )
            out[int(n)] = point.ee
        except NumericDomainError:
            out[int(n)] = None
    return out


def ee_argmax_on_grid(
    scenario: Scenario, hw: Optional[HardwareProfile], n_grid: Sequence[int]
) -> tuple[int, dict]:
    """Grid-search diagnostic paired with knee_point: argmax-EE antenna count."""
    ees = ee_on_antenna_grid(scenario, hw, n_grid)
    valid = {n: v for n, v in ees.items() if v is not None}
    if not valid:
        raise NumericDomainError("no grid point lies inside the model domain")
    best = max(valid, key=valid.get)
    return best, ees


@dataclass(frozen=True)
class AntennaScalingReport:
    """Shape of EE over an antenna grid at fixed transmit power."""

    grid: tuple
    ee_values: tuple
    argmax_n: int
    decreasing_beyond_argmax: bool
    tail_ratio: float  # EE(N_max) / EE(argmax)


def ee_antenna_limit_check(
    scenario: Scenario, hw: Optional[HardwareProfile], n_grid: Sequence[int]
) -> AntennaScalingReport:
    """Evaluate EE over the grid and report the post-peak monotonicity."""
    grid = sorted(int(n) for n in n_grid)
    ees = ee_on_antenna_grid(scenario, hw, grid)
    values = [ees[n] for n in grid]
    if any(v is None for v in values):
        raise NumericDomainError("antenna grid leaves the model domain")
    argmax_idx = max(range(len(grid)), key=lambda i: values[i])
    tail = values[argmax_idx:]
    decreasing = all(a > b for a, b in zip(tail, tail[1:]))
    return AntennaScalingReport(
        grid=tuple(grid),
        ee_values=tuple(values),
        argmax_n=grid[argmax_idx],
        decreasing_beyond_argmax=decreasing,
        tail_ratio=values[-1] / values[argmax_idx],
    )


def compare_setups(setups: Sequence[tuple], p_grid: Sequence[float]) -> list:
    """Closed-form EE for every (setup, transmit power) pair.

    Returns rows of (setup_name, tx_power_density, EePoint) in deterministic
    setup-major order.
    """
    rows = []
    for name, scenario in setups:
        for p in p_grid:
            point = energy_efficiency(
                scenario.system, scenario.replace(tx_power_density=float(p))
            )
            rows.append((name, float(p), point))
    return rows
