"""Ergodic spectral-efficiency estimation: Monte Carlo and closed forms.

The closed forms cover the exact-sum upper bound on ZF ergodic SE, its
integral approximation, the small/large-array scaling asymptotes, and the
lower bound / approximation used for the Sub-6 GHz Rayleigh and mmWave Rician
comparison systems.  Every formula here is paired with an independent
quadrature or summation oracle in the test suite.

SE values are per-user, in bits/s/Hz, before protocol overheads;
``wrap_throughput`` applies the TDD fractions and pilot overhead.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .channel import (
    PropagationProfile,
    correlation_factor,
    large_scale_gains,
    sample_channel_mmwave,
    sample_channel_sub6,
    steering_vector,
    _standard_complex_gaussian,
)
from .errors import ConfigError, NumericDomainError, OverheadError, RankDeficientError, VacuousBoundError
from .geometry import ArrayGeometry, CellGeometry, sample_user_location, symmetric_indices
from .special import e1_scaled_plus_log
from .transceiver import LinkBudget, hybrid_chain, uplink_sinr

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import Scenario

LN2 = math.log(2.0)

_MAX_REJECTIONS_PER_TRIAL = 100


@dataclass(frozen=True)
class ProtocolConfig:
    """TDD frame parameters: bandwidth, coherence block, pilot and link fractions."""

    bandwidth: float
    coherence_block_size: float
    pilot_factor: float
    uplink_fraction: float
    downlink_fraction: float

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ConfigError("bandwidth must be > 0")
        if self.coherence_block_size < 1:
            raise ConfigError("coherence_block_size must be >= 1")
        if self.pilot_factor <= 0:
            raise ConfigError("pilot_factor must be > 0")
        if not (0 < self.uplink_fraction < 1 and 0 < self.downlink_fraction < 1):
            raise ConfigError("link fractions must lie in (0, 1)")
        if abs(self.uplink_fraction + self.downlink_fraction - 1.0) > 1e-9:
            raise ConfigError("xi_ul + xi_dl must equal 1")

    def check_overhead(self, num_users: int) -> None:
        """Reject pilot loads that exceed the uplink share.

        Equality is admitted: it is the all-pilot corner where uplink
        throughput degenerates to exactly zero.
        """
        if self.pilot_factor * num_users > self.coherence_block_size * self.uplink_fraction:
            raise OverheadError(
                f"pilot overhead tau*K = {self.pilot_factor * num_users} exceeds the uplink "
                f"share S*xi_ul = {self.coherence_block_size * self.uplink_fraction}"
            )


@dataclass(frozen=True)
class ErgodicEstimate:
    """Monte Carlo mean with a normal-approximation 95% confidence half-width."""

    mean: float
    half_ci95: float
    trials: int
    rejected: int = 0

    def __post_init__(self):
        if self.half_ci95 < 0 or self.trials < 1:
            raise ConfigError("half_ci95 must be >= 0 and trials >= 1")


# ---------------------------------------------------------------------------
# Exact-sum array-gain terms and the SE upper bound
# ---------------------------------------------------------------------------

def _require_span(cell: CellGeometry) -> None:
    """Annulus-averaged closed forms need r_min strictly below r_max."""
    if cell.r2_span <= 0:
        raise NumericDomainError("closed forms need r_min < r_max")


def chi_and_interference_sums(
    num_elements: int, spacing: float, cell: CellGeometry
) -> tuple[float, float]:
    """Exact finite sums over the symmetric element coordinates.

    chi sums the expected per-element inverse-square-distance gains,
    ln((r_max^2 - delta_n^2) / (r_min^2 - delta_n^2)) / (r_max^2 - r_min^2);
    the interference sum squares each summand before adding.
    """
    _require_span(cell)
    delta = symmetric_indices(num_elements) * spacing
    num = cell.r_max**2 - delta**2
    den = cell.r_min**2 - delta**2
    if np.any(den <= 0):
        raise NumericDomainError(
            f"array aperture reaches the user annulus: (N-1)*d/2 = "
            f"{abs(delta).max():.3f} m >= r_min = {cell.r_min} m"
        )
    terms = np.log(num / den) / cell.r2_span
    return float(np.sum(terms)), float(np.sum(terms**2))


def _se_from_net_gain(net_gain: float, budget: LinkBudget, wavelength: float) -> float:
    arg = 1.0 + budget.tx_power_density * wavelength**2 / budget.noise_density * net_gain
    if arg <= 0:
        raise VacuousBoundError(f"bound vacuous: log argument {arg:.3e} <= 0 at this K")
    return math.log2(arg)


def se_upper_bound(
    num_elements: int,
    spacing: float,
    cell: CellGeometry,
    num_users: int,
    budget: LinkBudget,
    wavelength: float,
) -> float:
    """log2(1 + (P lambda^2 / sigma^2) (chi - (K-1) I / chi)), bits/s/Hz."""
    chi, i_sum = chi_and_interference_sums(num_elements, spacing, cell)
    return _se_from_net_gain(chi - (num_users - 1) * i_sum / chi, budget, wavelength)


# ---------------------------------------------------------------------------
# Integral approximations and scaling forms
# ---------------------------------------------------------------------------

def chi_bar(num_elements: float, spacing: float, cell: CellGeometry) -> float:
    """Integral form of the array-gain sum, valid for N < 2 r_min / spacing.

    Antiderivative of the chi summand over a continuous element index; N may
    be fractional (the scaling analysis evaluates it arbitrarily close to the
    saturation pole).
    """
    _require_span(cell)
    if num_elements < 0:
        raise NumericDomainError("num_elements must be >= 0")
    if num_elements == 0:
        return 0.0
    a = 2.0 * cell.r_max / spacing
    b = 2.0 * cell.r_min / spacing
    n = float(num_elements)
    if n >= b:
        raise NumericDomainError(
            f"integral gain form needs N < 2 r_min / spacing = {b:.1f}, got {n}"
        )
    value = (
        n * math.log((a**2 - n**2) / (b**2 - n**2))
        + a * math.log((a + n) / (a - n))
        - b * math.log((b + n) / (b - n))
    )
    return value / cell.r2_span


def i_bar(num_elements: float, spacing: float, cell: CellGeometry) -> float:
    """Closed-form interference density: quadrature of (r + N d/2)^-2 against f(r)."""
    _require_span(cell)
    if num_elements < 0:
        raise NumericDomainError("num_elements must be >= 0")
    c = num_elements * spacing / 2.0
    value = math.log((cell.r_max + c) / (cell.r_min + c)) + c * (
        1.0 / (cell.r_max + c) - 1.0 / (cell.r_min + c)
    )
    return 2.0 * value / cell.r2_span


def se_approx(
    num_elements: float,
    spacing: float,
    cell: CellGeometry,
    num_users: int,
    budget: LinkBudget,
    wavelength: float,
) -> float:
    """log2(1 + (P lambda^2 / sigma^2) (chi_bar - (K-1) I_bar)), bits/s/Hz."""
    net = chi_bar(num_elements, spacing, cell) - (num_users - 1) * i_bar(
        num_elements, spacing, cell
    )
    return _se_from_net_gain(net, budget, wavelength)


@dataclass(frozen=True)
class ChiScaling:
    """Small-N slope and large-N saturation value of the array-gain density."""

    linear_coefficient: float
    saturation_limit: float


def chi_scaling(spacing: float, cell: CellGeometry) -> ChiScaling:
    """Array-gain scaling constants: per-element slope and the aperture-pole limit."""
    _require_span(cell)
    span = cell.r2_span
    linear = 2.0 * math.log(cell.r_max / cell.r_min) / span
    sat = (
        2.0 * cell.r_max / spacing * math.log((cell.r_max + cell.r_min) / (cell.r_max - cell.r_min))
        + 2.0 * cell.r_min / spacing * math.log(span / (4.0 * cell.r_min**2))
    ) / span
    return ChiScaling(linear_coefficient=linear, saturation_limit=sat)


def throughput_asymptote(
    regime: str,
    num_elements: float,
    num_users: int,
    budget: LinkBudget,
    proto: ProtocolConfig,
    cell: CellGeometry,
    wavelength: float,
) -> float:
    """Interference-free throughput scaling with N, bits/s.

    'low_power': linear in N; 'high_power': logarithmic in N.
    """
    _require_span(cell)
    pref = proto.bandwidth * num_users * (
        1.0 - proto.pilot_factor * num_users / proto.coherence_block_size
    )
    snr_unit = (
        budget.tx_power_density
        * wavelength**2
        * 2.0
        * math.log(cell.r_max / cell.r_min)
        / (budget.noise_density * cell.r2_span)
    )
    if regime == "low_power":
        return pref * snr_unit * num_elements / LN2
    if regime == "high_power":
        return pref * math.log2(1.0 + snr_unit * num_elements)
    raise ConfigError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# Comparison-system SE closed forms
# ---------------------------------------------------------------------------

def sub6_se_lower_bound(
    num_elements: int,
    num_users: int,
    budget: LinkBudget,
    cell: CellGeometry,
    wavelength: float,
) -> float:
    """Ergodic-SE lower bound for i.i.d. Rayleigh ZF, averaged over the annulus.

    Closed form of  integral log2(1 + C/r^2) f(r) dr  with
    C = P lambda^2 (N - K) / sigma^2.
    """
    _require_span(cell)
    if num_elements <= num_users:
        raise NumericDomainError(f"need N > K, got N={num_elements}, K={num_users}")
    c = (
        budget.tx_power_density
        * wavelength**2
        * (num_elements - num_users)
        / budget.noise_density
    )
    if c == 0.0:
        return 0.0
    r2_max, r2_min = cell.r_max**2, cell.r_min**2
    value = (
        c * math.log((r2_max + c) / (r2_min + c))
        + r2_max * math.log1p(c / r2_max)
        - r2_min * math.log1p(c / r2_min)
    )
    return value / (cell.r2_span * LN2)


def mmwave_se_approx(
    num_elements: int, budget: LinkBudget, cell: CellGeometry, wavelength: float
) -> float:
    """Hybrid-beamforming ergodic-SE approximation under Rician fading.

    Closed form of the double average of log2(1 + C g / r^2) over exponential
    power gain g and the annulus distance, C = P lambda^2 N / sigma^2.
    Evaluated through exp(x) E1(x) + ln(x), which stays stable when exp(x)
    would overflow or when the logs nearly cancel.
    """
    _require_span(cell)
    c = budget.tx_power_density * wavelength**2 * num_elements / budget.noise_density
    if c <= 0:
        raise NumericDomainError("need P lambda^2 N / sigma^2 > 0")
    bracket = e1_scaled_plus_log(cell.r_max**2 / c) - e1_scaled_plus_log(cell.r_min**2 / c)
    return c * bracket / (cell.r2_span * LN2)


# ---------------------------------------------------------------------------
# Protocol wrapping
# ---------------------------------------------------------------------------

def wrap_throughput(se: float, proto: ProtocolConfig, num_users: int, direction: str) -> float:
    """Apply TDD fractions and pilot overhead to a per-user SE, bits/s.

    'uplink' and 'downlink' return per-user link throughput; 'sum' returns the
    network total B K (1 - tau K / S) se over both directions.
    """
    proto.check_overhead(num_users)
    b = proto.bandwidth
    tau_share = proto.pilot_factor * num_users / proto.coherence_block_size
    if direction == "uplink":
        return (proto.uplink_fraction - tau_share) * b * se
    if direction == "downlink":
        return proto.downlink_fraction * b * se
    if direction == "sum":
        return b * num_users * (1.0 - tau_share) * se
    raise ConfigError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# Monte Carlo ergodic SE
# ---------------------------------------------------------------------------

def _trial_seed(base: np.random.SeedSequence, trial: int) -> np.random.SeedSequence:
    """Stream for one trial, independent of worker scheduling."""
    return np.random.SeedSequence(entropy=base.entropy, spawn_key=tuple(base.spawn_key) + (trial,))


def _draw_xl_channel(
    scenario: "Scenario",
    num_users: int,
    geom: ArrayGeometry,
    prop: PropagationProfile,
    rng: np.random.Generator,
) -> np.ndarray:
    """One mid-band XL-MIMO channel matrix.

    With zero angular spread the drop is LoS-dominant and the per-location
    channel is the deterministic gamma-weighted steering vector; otherwise the
    correlated small-scale component is drawn through the quadrature factor.
    """
    cols = []
    for _ in range(num_users):
        loc = sample_user_location(rng, scenario.cell)
        gamma = large_scale_gains(loc, geom, prop)
        if prop.angular_spread == 0.0:
            cols.append(gamma * steering_vector(loc, geom, prop))
        else:
            factor = correlation_factor(loc, geom, prop)
            g = _standard_complex_gaussian(rng, factor.shape[1])
            cols.append(gamma * (factor @ g))
    return np.stack(cols, axis=1)


def _draw_effective_channel(
    scenario: "Scenario", num_users: int, rng: np.random.Generator
) -> np.ndarray:
    """Channel matrix seen by the digital ZF stage for the scenario's family."""
    geom = scenario.array_geometry()
    prop = scenario.propagation()
    if scenario.system == "xl_mimo":
        return _draw_xl_channel(scenario, num_users, geom, prop, rng)
    if scenario.system == "sub6":
        cols = []
        for _ in range(num_users):
            loc = sample_user_location(rng, scenario.cell)
            cols.append(sample_channel_sub6(loc, prop, geom.num_elements, rng))
        return np.stack(cols, axis=1)
    if scenario.system == "mmwave":
        locs = [sample_user_location(rng, scenario.cell) for _ in range(num_users)]
        h = np.stack([sample_channel_mmwave(loc, geom, prop, rng) for loc in locs], axis=1)
        _, h_eq = hybrid_chain(h, locs, geom, prop)
        return h_eq
    raise ConfigError(f"unknown system family {scenario.system!r}")


def _single_trial(
    scenario: "Scenario", num_users: int, budget: LinkBudget, rng: np.random.Generator
) -> tuple[float, int]:
    """Per-trial pooled SE (mean over users of log2(1+SINR)) and rejection count."""
    rejected = 0
    for _ in range(_MAX_REJECTIONS_PER_TRIAL):
        h = _draw_effective_channel(scenario, num_users, rng)
        try:
            report = uplink_sinr(h, budget)
        except RankDeficientError:
            rejected += 1
            continue
        return float(np.mean(np.log2(1.0 + report.per_user))), rejected
    raise RankDeficientError(
        f"exceeded {_MAX_REJECTIONS_PER_TRIAL} rank rejections in a single trial"
    )


def _run_trial_range(
    scenario: "Scenario",
    num_users: int,
    entropy,
    spawn_key: tuple,
    lo: int,
    hi: int,
) -> tuple[list[float], int]:
    base = np.random.SeedSequence(entropy=entropy, spawn_key=spawn_key)
    budget = scenario.link_budget(num_users)
    values = []
    rejected = 0
    for trial in range(lo, hi):
        rng = np.random.Generator(np.random.PCG64(_trial_seed(base, trial)))
        se, rej = _single_trial(scenario, num_users, budget, rng)
        values.append(se)
        rejected += rej
    return values, rejected


def mc_ergodic_se(
    scenario: "Scenario",
    num_users: int,
    n_trials: int,
    seed,
    workers: int = 1,
) -> ErgodicEstimate:
    """Monte Carlo per-user ergodic SE, bits/s/Hz, before protocol overheads.

    Each trial draws fresh user locations (and small-scale fading where the
    model has any), evaluates the ZF SINRs, and pools log2(1+SINR) across
    users.  Trial t uses a stream derived from (seed, t), so the result is
    bit-identical for any worker count.
    """
    if n_trials < 1:
        raise ConfigError("n_trials must be >= 1")
    base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    entropy, spawn_key = base.entropy, tuple(base.spawn_key)

    if workers <= 1 or n_trials < 4 * workers:
        values, rejected = _run_trial_range(scenario, num_users, entropy, spawn_key, 0, n_trials)
    else:
        bounds = np.linspace(0, n_trials, workers + 1, dtype=int)
        values, rejected = [], 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _run_trial_range, scenario, num_users, entropy, spawn_key, int(lo), int(hi)
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for fut in futures:
                chunk_values, chunk_rejected = fut.result()
                values.extend(chunk_values)
                rejected += chunk_rejected

    arr = np.asarray(values)
    mean = float(arr.mean())
    half_ci = 0.0 if n_trials == 1 else float(1.96 * arr.std(ddof=1) / math.sqrt(n_trials))
    return ErgodicEstimate(mean=mean, half_ci95=half_ci, trials=n_trials, rejected=rejected)
