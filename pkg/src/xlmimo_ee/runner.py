"""Sweep orchestration: grids, seeding, worker pools, CSV and manifest output.

Reruns with the same (scenario, sweep spec, seed) produce byte-identical CSV
files at any worker count: every grid point derives its Monte Carlo streams
from (master seed, point index, trial index), and rows are assembled in grid
order regardless of completion order.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .ee import closed_form_se, compare_setups, knee_point
from .errors import ConfigError, NumericDomainError
from .power import total_power
from .scenario import Scenario
from .throughput import mc_ergodic_se, se_upper_bound, wrap_throughput

CSV_HEADER = (
    "axis_value,N,K,B_hz,P_w_per_hz,se_ub,se_app,se_mc_mean,se_mc_ci95,"
    "throughput_bps,p_total_w,p_pa_w,p_converters_w,p_baseband_w,p_fixed_w,"
    "ee_bits_per_joule,notes"
)

SWEEP_AXES = ("bandwidth", "antennas", "users", "tx_power")
SWEEP_MODES = ("closed_form", "monte_carlo", "both")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep definition: axis, grid, evaluation mode, trials and seed."""

    axis: str
    values: tuple
    mode: str = "closed_form"
    trials: int = 2000
    master_seed: int = 0
    users_series: tuple = ()

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if self.mode not in SWEEP_MODES:
            raise ConfigError(f"mode must be one of {SWEEP_MODES}, got {self.mode!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError("values must be nonempty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("values must be strictly increasing")
        if self.mode in ("monte_carlo", "both") and self.trials < 1:
            raise ConfigError("trials must be >= 1 in Monte Carlo modes")
        if not (0 <= self.master_seed < 2**64):
            raise ConfigError("master_seed must fit in 64 bits")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "users_series", tuple(int(k) for k in self.users_series))

    def snapshot(self) -> dict:
        return {
            "axis": self.axis,
            "values": list(self.values),
            "mode": self.mode,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "users_series": list(self.users_series),
        }


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written alongside each CSV."""

    config_hash: str
    seed: int
    tool_version: str
    started_utc: str
    finished_utc: str
    rejected_draws: int
    scenario: dict
    sweep: Optional[dict]

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(dataclasses.asdict(self), handle, indent=2, sort_keys=True)
            handle.write("\n")


def config_hash(scenario: Scenario, sweep_snapshot: Optional[dict]) -> str:
    """Digest of the semantic configuration, stable under key reordering."""
    payload = {"scenario": scenario.snapshot(), "sweep": sweep_snapshot}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _apply_axis(scenario: Scenario, axis: str, value: float) -> Scenario:
    if axis == "bandwidth":
        proto = dataclasses.replace(scenario.proto, bandwidth=value)
        return scenario.replace(proto=proto)
    if axis == "antennas":
        if value != int(value):
            raise ConfigError(f"antenna counts must be integers, got {value}")
        return scenario.replace(num_antennas=int(value))
    if axis == "users":
        if value != int(value):
            raise ConfigError(f"user counts must be integers, got {value}")
        return scenario.replace(num_users=int(value))
    if axis == "tx_power":
        return scenario.replace(tx_power_density=value)
    raise ConfigError(f"unknown axis {axis!r}")


def _fmt(value) -> str:
    """Shortest round-trip decimal; empty cell for missing values."""
    return "" if value is None else repr(float(value))


@dataclass(frozen=True)
class SweepResult:
    """One evaluated grid point, ready for CSV serialization."""

    axis_value: float
    scenario: Scenario
    se_ub: Optional[float]
    se_app: Optional[float]
    se_mc_mean: Optional[float]
    se_mc_ci95: Optional[float]
    throughput_bps: Optional[float]
    p_total: Optional[float]
    p_pa: Optional[float]
    p_converters: Optional[float]
    p_baseband: Optional[float]
    p_fixed: Optional[float]
    ee: Optional[float]
    notes: str = ""
    rejected: int = 0

    def csv_row(self) -> str:
        sc = self.scenario
        cells = [
            _fmt(self.axis_value),
            str(sc.num_antennas),
            str(sc.num_users),
            _fmt(sc.proto.bandwidth),
            _fmt(sc.tx_power_density),
            _fmt(self.se_ub),
            _fmt(self.se_app),
            _fmt(self.se_mc_mean),
            _fmt(self.se_mc_ci95),
            _fmt(self.throughput_bps),
            _fmt(self.p_total),
            _fmt(self.p_pa),
            _fmt(self.p_converters),
            _fmt(self.p_baseband),
            _fmt(self.p_fixed),
            _fmt(self.ee),
            self.notes,
        ]
        return ",".join(cells)


def evaluate_point(
    scenario: Scenario, spec: SweepSpec, point_index: int, value: float, notes: str = ""
) -> SweepResult:
    """Evaluate one grid point; vacuous bounds become empty cells plus a note."""
    point = _apply_axis(scenario, spec.axis, value)
    notes_parts = [notes] if notes else []

    se_ub = se_app = None
    if point.system == "xl_mimo":
        try:
            se_ub = se_upper_bound(
                point.num_antennas, point.spacing, point.cell,
                point.num_users, point.link_budget(), point.wavelength,
            )
        except NumericDomainError:
            notes_parts.append("ub_vacuous")
    try:
        se_app = closed_form_se(point.system, point)
    except NumericDomainError:
        notes_parts.append("approx_vacuous")

    se_mc_mean = se_mc_ci = None
    rejected = 0
    if spec.mode in ("monte_carlo", "both"):
        seed = np.random.SeedSequence(entropy=spec.master_seed, spawn_key=(point_index,))
        est = mc_ergodic_se(point, point.num_users, spec.trials, seed)
        se_mc_mean, se_mc_ci, rejected = est.mean, est.half_ci95, est.rejected

    se_for_rate = se_app if spec.mode != "monte_carlo" else se_mc_mean
    if se_for_rate is None:
        se_for_rate = se_mc_mean
    throughput = p_total = p_pa = p_conv = p_bb = p_fix = ee = None
    if se_for_rate is not None:
        throughput = wrap_throughput(se_for_rate, point.proto, point.num_users, "sum")
        p_total, parts = total_power(point.system, point, point.hw, se_for_rate)
        p_pa = parts.pa_radiated + parts.pa_static
        p_conv = parts.adc + parts.dac + parts.if_circ
        p_bb = parts.ce + parts.pd + parts.cd + parts.ofdm
        p_fix = parts.fixed_bs
        ee = throughput / p_total

    return SweepResult(
        axis_value=value,
        scenario=point,
        se_ub=se_ub,
        se_app=se_app,
        se_mc_mean=se_mc_mean,
        se_mc_ci95=se_mc_ci,
        throughput_bps=throughput,
        p_total=p_total,
        p_pa=p_pa,
        p_converters=p_conv,
        p_baseband=p_bb,
        p_fixed=p_fix,
        ee=ee,
        notes=";".join(notes_parts),
        rejected=rejected,
    )


def _point_task(args) -> SweepResult:
    return evaluate_point(*args)


def _knee_note(scenario: Scenario) -> str:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return f"knee_n={knee_point(scenario):.6g}"
    except NumericDomainError:
        return ""


def run_sweep(
    scenario: Scenario, spec: SweepSpec, output_path: str, workers: int = 1
) -> RunManifest:
    """Evaluate the grid, write the CSV and its manifest, return the manifest."""
    started = _utc_now()
    series = spec.users_series or (scenario.num_users,)

    tasks = []
    point_index = 0
    for k in series:
        base = scenario.replace(num_users=int(k))
        knee = _knee_note(base) if spec.axis == "antennas" else ""
        for value in spec.values:
            notes = knee if value == spec.values[0] else ""
            tasks.append((base, spec, point_index, value, notes))
            point_index += 1

    if workers <= 1:
        results = [_point_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_point_task, tasks))

    _write_csv(output_path, results)
    manifest = RunManifest(
        config_hash=config_hash(scenario, spec.snapshot()),
        seed=spec.master_seed,
        tool_version=__version__,
        started_utc=started,
        finished_utc=_utc_now(),
        rejected_draws=sum(r.rejected for r in results),
        scenario=scenario.snapshot(),
        sweep=spec.snapshot(),
    )
    manifest.write(manifest_path(output_path))
    return manifest


def run_compare(setups, p_grid: Sequence[float], output_path: str) -> RunManifest:
    """Cross-technology EE comparison over a transmit-power grid, to CSV."""
    started = _utc_now()
    rows = compare_setups(setups, p_grid)
    results = []
    for name, p, point in rows:
        scenario = dict(setups)[name].replace(tx_power_density=p)
        _, parts = total_power(scenario.system, scenario, scenario.hw, _se_of(point, scenario))
        results.append(
            SweepResult(
                axis_value=p,
                scenario=scenario,
                se_ub=None,
                se_app=point.throughput
                / (scenario.proto.bandwidth * scenario.num_users
                   * (1 - scenario.proto.pilot_factor * scenario.num_users
                      / scenario.proto.coherence_block_size)),
                se_mc_mean=None,
                se_mc_ci95=None,
                throughput_bps=point.throughput,
                p_total=point.power,
                p_pa=parts.pa_radiated + parts.pa_static,
                p_converters=parts.adc + parts.dac + parts.if_circ,
                p_baseband=parts.ce + parts.pd + parts.cd + parts.ofdm,
                p_fixed=parts.fixed_bs,
                ee=point.ee,
                notes=name,
            )
        )
    _write_csv(output_path, results)
    scenario_hashes = {name: sc.snapshot() for name, sc in setups}
    canonical = json.dumps(
        {"setups": scenario_hashes, "p_grid": [float(p) for p in p_grid]},
        sort_keys=True, separators=(",", ":"),
    )
    manifest = RunManifest(
        config_hash=hashlib.sha256(canonical.encode()).hexdigest(),
        seed=0,
        tool_version=__version__,
        started_utc=started,
        finished_utc=_utc_now(),
        rejected_draws=0,
        scenario={"setups": scenario_hashes},
        sweep={"p_grid": [float(p) for p in p_grid]},
    )
    manifest.write(manifest_path(output_path))
    return manifest


def _se_of(point, scenario: Scenario) -> float:
    overhead = 1 - scenario.proto.pilot_factor * scenario.num_users / scenario.proto.coherence_block_size
    return point.throughput / (scenario.proto.bandwidth * scenario.num_users * overhead)


def manifest_path(csv_path: str) -> str:
    return csv_path + ".manifest.json"


def _write_csv(path: str, results) -> None:
    lines = [CSV_HEADER] + [r.csv_row() for r in results]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def grid_values(spec: str) -> tuple:
    """Parse a grid spec: 'lin:start:stop:count', 'log:start:stop:count', or
    a comma-separated explicit list."""
    if spec.startswith(("lin:", "log:")):
        kind, *rest = spec.split(":")
        if len(rest) != 3:
            raise ConfigError(f"bad grid spec {spec!r}: expected {kind}:start:stop:count")
        try:
            start, stop, count = float(rest[0]), float(rest[1]), int(rest[2])
        except ValueError as exc:
            raise ConfigError(f"bad grid spec {spec!r}: {exc}") from exc
        if count < 1:
            raise ConfigError("grid count must be >= 1")
        if count == 1:
            return (start,)
        if kind == "lin":
            return tuple(np.linspace(start, stop, count).tolist())
        if start <= 0 or stop <= 0:
            raise ConfigError("log grids need positive endpoints")
        return tuple(np.logspace(np.log10(start), np.log10(stop), count).tolist())
    try:
        values = tuple(float(tok) for tok in spec.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}: {exc}") from exc
    if not values:
        raise ConfigError(f"bad grid spec {spec!r}: no values")
    return values
