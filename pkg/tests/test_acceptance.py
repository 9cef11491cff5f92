"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines.  Every tolerance is pinned here; the oracles are written against the
defining integrals/sums, independent of the library code paths they check.
"""

import dataclasses
import math
import subprocess
import sys
import time

import numpy as np
from scipy import integrate

from xlmimo_ee import (
    CellGeometry,
    LinkBudget,
    Scenario,
    chi_and_interference_sums,
    chi_bar,
    chi_scaling,
    ee_bandwidth_limit,
    energy_efficiency,
    exp_integral_e1,
    i_bar,
    knee_point,
    mc_ergodic_se,
    mmwave_se_approx,
    se_approx,
    se_upper_bound,
    sub6_se_lower_bound,
)
from xlmimo_ee.power import coefficients, total_power
from xlmimo_ee.runner import CSV_HEADER
from xlmimo_ee.scenario import default_setups
from xlmimo_ee.throughput import wrap_throughput
from xlmimo_ee.transceiver import multicell_uplink_sinr, uplink_sinr, zf_uplink_combiner


def report(criterion, detail):
    print(f"\nACCEPTANCE criterion {criterion}: PASS  ({detail})")


def test_criterion_01_bound_tightness_monte_carlo():
    """R_UB upper-bounds the MC mean and the approximation tracks it within 15%."""
    start = time.time()
    worst_gap = 0.0
    snr_targets = [1.0, 10**0.75, 10**1.5, 10**2.25, 1000.0]  # 0..30 dB
    for k in (4, 8):
        base = Scenario(num_antennas=128, num_users=k, angular_spread=0.0)
        net = chi_bar(128, base.spacing, base.cell) - (k - 1) * i_bar(128, base.spacing, base.cell)
        for i, snr in enumerate(snr_targets):
            p = snr * base.noise_density / (base.wavelength**2 * net)
            s = base.replace(tx_power_density=p)
            est = mc_ergodic_se(s, k, 2000, seed=1234 + 10 * k + i)
            ub = se_upper_bound(128, s.spacing, s.cell, k, s.link_budget(k), s.wavelength)
            app = se_approx(128, s.spacing, s.cell, k, s.link_budget(k), s.wavelength)
            assert ub >= est.mean - est.half_ci95, f"bound violated at K={k}, SNR={snr}"
            if est.mean >= 1.0:
                gap = abs(app - est.mean) / est.mean
                worst_gap = max(worst_gap, gap)
                assert gap <= 0.15, f"approximation off by {gap:.1%} at K={k}, SNR={snr}"
    elapsed = time.time() - start
    assert elapsed < 300
    report(1, f"worst |R_app - MC|/MC = {worst_gap:.1%}, {elapsed:.0f}s")


def _e1_quadrature(x):
    total, lo = 0.0, x
    if x < 1.0:
        val, _ = integrate.quad(
            lambda u: math.exp(-x * math.exp(u)), 0.0, math.log(1.0 / x),
            epsabs=0, epsrel=1e-13, limit=500,
        )
        total, lo = val, 1.0
    val, _ = integrate.quad(
        lambda t: math.exp(-t) / t, lo, np.inf, epsabs=0, epsrel=1e-13, limit=500
    )
    return total + val


def test_criterion_02_closed_forms_vs_quadrature():
    """chi_bar, i_bar, the Sub-6 bound, the mmWave approximation and E1 all
    match independent numerical integration."""
    start = time.time()
    rng = np.random.Generator(np.random.PCG64(777))
    noise = 4e-21

    worst = {"chi_bar": 0.0, "i_bar": 0.0, "sub6": 0.0, "mmwave": 0.0, "e1": 0.0}

    for _ in range(50):
        r_min = rng.uniform(20, 200)
        cell = CellGeometry(r_min, r_min * rng.uniform(1.3, 5.0))
        span = cell.r_max**2 - cell.r_min**2
        d = rng.uniform(0.005, 0.05)
        n = rng.uniform(2, 0.9 * 2 * r_min / d)

        ref, _ = integrate.quad(
            lambda t: math.log((cell.r_max**2 / d**2 - t * t) / (cell.r_min**2 / d**2 - t * t)),
            -n / 2, n / 2, epsabs=0, epsrel=1e-11, limit=400,
        )
        worst["chi_bar"] = max(worst["chi_bar"], abs(chi_bar(n, d, cell) - ref / span) / (ref / span))

        c_ap = n * d / 2
        ref, _ = integrate.quad(
            lambda r: 2 * r / span / (r + c_ap) ** 2, cell.r_min, cell.r_max,
            epsabs=0, epsrel=1e-11, limit=200,
        )
        worst["i_bar"] = max(worst["i_bar"], abs(i_bar(n, d, cell) - ref) / ref)

        c = 10.0 ** rng.uniform(1, 7)
        lam, n_ant, k = 0.0857, 64, 8
        p = c * noise / (lam**2 * (n_ant - k))
        budget = LinkBudget.from_per_user(p, noise, k)
        val = sub6_se_lower_bound(n_ant, k, budget, cell, lam)
        ref, _ = integrate.quad(
            lambda r: math.log2(1 + c / r**2) * 2 * r / span, cell.r_min, cell.r_max,
            epsabs=0, epsrel=1e-11, limit=200,
        )
        worst["sub6"] = max(worst["sub6"], abs(val - ref) / ref)

        cbar = 10.0 ** rng.uniform(1, 6)
        lam_mm = 0.0107
        p = cbar * noise / (lam_mm**2 * 256)
        budget = LinkBudget.from_per_user(p, noise, 16)
        val = mmwave_se_approx(256, budget, cell, lam_mm)

        def inner(r):
            v, _ = integrate.quad(
                lambda g: math.log2(1 + cbar * g / r**2) * math.exp(-g), 0, np.inf,
                epsabs=0, epsrel=1e-9, limit=300,
            )
            return v

        ref, _ = integrate.quad(
            lambda r: inner(r) * 2 * r / span, cell.r_min, cell.r_max,
            epsabs=0, epsrel=1e-8, limit=200,
        )
        worst["mmwave"] = max(worst["mmwave"], abs(val - ref) / ref)

    for name in ("chi_bar", "i_bar", "sub6", "mmwave"):
        assert worst[name] <= 1e-6, f"{name} vs quadrature: {worst[name]:.2e}"

    for x in np.logspace(-6, math.log10(50), 60):
        ref = _e1_quadrature(float(x))
        worst["e1"] = max(worst["e1"], abs(exp_integral_e1(float(x)) - ref) / abs(ref))
    assert worst["e1"] <= 1e-10

    elapsed = time.time() - start
    assert elapsed < 60
    report(2, "worst rel: " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()))


def test_criterion_03_sum_vs_integral():
    """Integral array gain stays within 1% of the exact sum."""
    worst = 0.0
    for n in (8, 64, 512, 1024):
        chi, _ = chi_and_interference_sums(n, 0.02, CellGeometry(70.0, 150.0))
        rel = abs(chi_bar(n, 0.02, CellGeometry(70.0, 150.0)) - chi) / chi
        worst = max(worst, rel)
        assert rel <= 0.01
    report(3, f"worst |chi_bar - chi|/chi = {worst:.2e}")


def test_criterion_04_scaling_limits():
    """Near-pole saturation and small-N linearity of the array gain."""
    cell = CellGeometry(70.0, 150.0)
    scaling = chi_scaling(0.02, cell)
    pole = 2 * cell.r_min / 0.02
    near = chi_bar((1 - 1e-6) * pole, 0.02, cell)
    sat_rel = abs(near - scaling.saturation_limit) / scaling.saturation_limit
    assert sat_rel <= 1e-3
    lin_rel = abs(chi_bar(8, 0.02, cell) / 8 - scaling.linear_coefficient) / scaling.linear_coefficient
    assert lin_rel <= 1e-3
    report(4, f"saturation rel = {sat_rel:.1e}, linear-slope rel = {lin_rel:.1e}")


def test_criterion_05_bandwidth_law():
    """EE nondecreasing in bandwidth and converging to the closed-form limit."""
    worst_ratio = None
    for k in (16, 32, 64):
        s = Scenario(num_users=k, tx_power_density=1e-15)
        limit = ee_bandwidth_limit(s)
        ees = []
        for b in np.logspace(7, 12, 20):
            point = energy_efficiency(
                "xl_mimo", s.replace(proto=dataclasses.replace(s.proto, bandwidth=b))
            )
            ees.append(point.ee)
        assert all(later >= earlier for earlier, later in zip(ees, ees[1:])), f"EE(B) dips at K={k}"
        ratio = ees[-1] / limit
        assert 0.98 <= ratio <= 1.0, f"EE(1e12)/limit = {ratio} at K={k}"
        worst_ratio = ratio if worst_ratio is None else min(worst_ratio, ratio)
    report(5, f"min EE(1e12 Hz)/limit = {worst_ratio:.5f}")


def test_criterion_06_antenna_law():
    """Low-power rise/plateau with a valid knee; high-power strict decrease."""
    grid = [2**i for i in range(4, 14)]  # 16 .. 8192
    cell = CellGeometry(200.0, 400.0)  # keeps the whole grid inside the aperture domain

    low = Scenario(num_users=8, cell=cell, tx_power_density=1e-18)
    ees = [energy_efficiency("xl_mimo", low.replace(num_antennas=n)).ee for n in grid]
    assert ees[1] > ees[0] and ees[2] > ees[1], "EE must rise at small N"
    peak = max(ees)
    tail = ees[ees.index(peak):]
    assert all(v >= 0.95 * peak for v in tail), "post-peak EE must stay near the plateau or fall"
    kp = knee_point(low, eta_n=0.95)
    ee_kp = energy_efficiency("xl_mimo", low.replace(num_antennas=round(kp))).ee
    knee_ratio = ee_kp / peak
    assert knee_ratio >= 0.90

    high = low.replace(tx_power_density=1e-10)
    net16 = chi_bar(16, high.spacing, cell) - 7 * i_bar(16, high.spacing, cell)
    sinr16 = high.tx_power_density * high.wavelength**2 * net16 / high.noise_density
    assert sinr16 > 100.0, "high-power precondition: SINR(N=16) above 20 dB"
    ees_hi = [energy_efficiency("xl_mimo", high.replace(num_antennas=n)).ee for n in grid]
    assert all(b < a for a, b in zip(ees_hi, ees_hi[1:])), "EE must strictly decrease at high power"
    assert ees_hi[-1] < 0.5 * ees_hi[0]
    report(
        6,
        f"knee N={kp:.0f}, EE(knee)/max = {knee_ratio:.3f}; high-P EE(8192)/EE(16) "
        f"= {ees_hi[-1] / ees_hi[0]:.3f}",
    )


def test_criterion_07_zf_correctness():
    """Nulling residual and closed-form/definitional SINR equality, 1000 draws."""
    rng = np.random.Generator(np.random.PCG64(99))
    worst_null = worst_sinr = 0.0
    for _ in range(1000):
        k = int(rng.integers(1, 17))
        n = int(rng.integers(2 * k, max(2 * k + 1, 65)))
        h = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / math.sqrt(2)
        p, s2 = 2.0, 0.5
        w = zf_uplink_combiner(h, p)
        residual = np.max(np.abs(w.conj().T @ h * math.sqrt(p) - np.eye(k)))
        worst_null = max(worst_null, residual)

        budget = LinkBudget.from_per_user(p, s2, k)
        closed = uplink_sinr(h, budget).per_user
        for j in range(k):
            wj = w[:, j]
            desired = p * abs(np.vdot(wj, h[:, j])) ** 2
            interf = p * sum(abs(np.vdot(wj, h[:, m])) ** 2 for m in range(k) if m != j)
            ratio = desired / (interf + np.linalg.norm(wj) ** 2 * s2)
            worst_sinr = max(worst_sinr, abs(closed[j] - ratio) / ratio)
    assert worst_null <= 1e-9
    assert worst_sinr <= 1e-9
    report(7, f"worst nulling residual = {worst_null:.1e}, worst SINR mismatch = {worst_sinr:.1e}")


def test_criterion_08_power_model_scaling():
    """Affine in B and N, quadratic N-coefficient in K, assemblies reconciled."""
    se = 5.0
    hw = Scenario().hw

    bs = np.array([1e8, 2e8, 4e8, 8e8, 1.6e9])
    totals = []
    for b in bs:
        s = Scenario(proto=dataclasses.replace(Scenario().proto, bandwidth=float(b)))
        totals.append(total_power("xl_mimo", s, hw, se)[0])
    coeff = np.polyfit(bs, totals, 1)
    residual_b = np.max(np.abs(totals - np.polyval(coeff, bs))) / np.max(totals)
    assert residual_b <= 1e-9

    ns = np.array([32, 64, 128, 256, 512, 1024])
    totals = [total_power("xl_mimo", Scenario(num_antennas=int(n)), hw, se)[0] for n in ns]
    coeff = np.polyfit(ns, totals, 1)
    residual_n = np.max(np.abs(totals - np.polyval(coeff, ns))) / np.max(totals)
    assert residual_n <= 1e-9

    def n_slope(k):
        lo = total_power("xl_mimo", Scenario(num_antennas=64, num_users=k), hw, se)[0]
        hi = total_power("xl_mimo", Scenario(num_antennas=128, num_users=k), hw, se)[0]
        return (hi - lo) / 64

    ks = np.array([2, 4, 8, 16, 32, 48, 64])
    slopes = np.array([n_slope(int(k)) for k in ks])
    quad = np.polyfit(ks, slopes, 2)
    residual_k = np.max(np.abs(slopes - np.polyval(quad, ks))) / np.max(np.abs(slopes))
    assert residual_k <= 1e-9

    worst_rec = 0.0
    for n, k in ((512, 16), (128, 8), (1024, 32), (256, 64)):
        s = Scenario(num_antennas=n, num_users=k, tx_power_density=1e-15)
        total, _ = total_power("xl_mimo", s, hw, se)
        thpt = wrap_throughput(se, s.proto, k, "sum")
        poly = coefficients("xl_mimo", s, hw).polynomial_total(n, k, 1e-15, thpt)
        worst_rec = max(worst_rec, abs(poly - total) / total)
    assert worst_rec <= 0.02
    report(
        8,
        f"fit residuals: B={residual_b:.1e}, N={residual_n:.1e}, K-quad={residual_k:.1e}; "
        f"assembly gap = {worst_rec:.2e}",
    )


def test_criterion_09_setup_comparison():
    """Mid-band XL-MIMO wins the EE comparison at every interior grid point."""
    pgrid = np.logspace(-18, -14, 9)  # 40 dB span
    ee = {name: [] for name, _ in default_setups()}
    for name, scenario in default_setups():
        for p in pgrid:
            ee[name].append(
                energy_efficiency(scenario.system, scenario.replace(tx_power_density=float(p))).ee
            )
    margins = []
    for i in range(1, len(pgrid) - 1):
        xl = ee["setup2_xl_mimo"][i]
        assert xl > ee["setup1_sub6"][i], f"sub6 overtakes at P={pgrid[i]:.1e}"
        assert xl > ee["setup3_mmwave"][i], f"mmWave overtakes at P={pgrid[i]:.1e}"
        margins.append(min(xl / ee["setup1_sub6"][i], xl / ee["setup3_mmwave"][i]))
    report(9, f"min interior EE margin of the mid-band setup = {min(margins):.2f}x")


def test_criterion_10_multicell_approximation():
    """Inflated-noise SINR within 5% of the unapproximated Monte Carlo."""
    rng = np.random.Generator(np.random.PCG64(4242))
    worst = 0.0
    for _ in range(20):
        n = int(rng.choice([32, 48]))
        k = int(rng.choice([4, 8]))
        h = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / math.sqrt(2)
        p, s2 = 1.0, 1.0
        n_interferers = int(rng.integers(8, 17))
        gains = np.sqrt(rng.uniform(0.2, 1.0, n_interferers) * s2 / p / n_interferers)
        budget = LinkBudget.from_per_user(p, s2, k)
        approx = multicell_uplink_sinr(h, gains, budget).per_user

        gram_inv = np.linalg.inv(h.conj().T @ h)
        w = h @ gram_inv
        diag = np.real(np.diag(gram_inv))
        acc = np.zeros(k)
        draws = 10_000
        for _ in range(draws):
            interf = np.zeros(k)
            for gamma in gains:
                hi = gamma * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
                interf += p * np.abs(w.conj().T @ hi) ** 2
            acc += p / (s2 * diag + interf)
        mc = acc / draws
        worst = max(worst, float(np.max(np.abs(approx - mc) / mc)))
    assert worst <= 0.05
    report(10, f"worst per-user deviation over 20 configurations = {worst:.1%}")


def test_criterion_11_cli_determinism(tmp_path):
    """Byte-identical CSVs from identical invocations at worker counts 1, 4, 8."""
    scen = tmp_path / "scen.txt"
    scen.write_text("num_antennas = 64\nnum_users = 4\ntx_power = 1e-15\n")
    outputs = {}
    for workers in (1, 4, 8):
        out = tmp_path / f"out_{workers}.csv"
        res = subprocess.run(
            [
                sys.executable, "-m", "xlmimo_ee", "sweep",
                "--scenario", str(scen), "--axis", "tx_power",
                "--values", "log:1e-16:1e-14:4", "--mode", "both",
                "--trials", "60", "--seed", "42",
                "--out", str(out), "--workers", str(workers),
            ],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr
        outputs[workers] = out.read_bytes()
    assert outputs[1] == outputs[4] == outputs[8]
    header = outputs[1].decode().splitlines()[0]
    assert header == CSV_HEADER
    report(11, f"{len(outputs[1])} CSV bytes identical across worker counts 1/4/8")
