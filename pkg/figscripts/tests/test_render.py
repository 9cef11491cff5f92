"""Render tests, driven end to end through the xlmimo-ee CLI and CSV schema."""

import hashlib
import subprocess
import sys

import pytest

from xlmimo_figs import EmptyCsvError, FigureRecipe, MissingColumnError, render
from xlmimo_figs.recipes import FigureError

CSV_HEADER = (
    "axis_value,N,K,B_hz,P_w_per_hz,se_ub,se_app,se_mc_mean,se_mc_ci95,"
    "throughput_bps,p_total_w,p_pa_w,p_converters_w,p_baseband_w,p_fixed_w,"
    "ee_bits_per_joule,notes"
)


def run_primary(*args):
    res = subprocess.run(
        [sys.executable, "-m", "xlmimo_ee", *args], capture_output=True, text=True
    )
    assert res.returncode == 0, res.stderr
    return res


@pytest.fixture(scope="session")
def sweep_csvs(tmp_path_factory):
    """The four CSV kinds the acceptance criteria emit, at desk scale."""
    root = tmp_path_factory.mktemp("csvs")
    scen = root / "scen.txt"
    scen.write_text("num_antennas = 64\nnum_users = 4\ntx_power = 1e-15\n")

    tightness = root / "se_tightness.csv"
    run_primary(
        "sweep", "--scenario", str(scen), "--axis", "tx_power",
        "--values", "log:1e-16:1e-13:5", "--mode", "both", "--trials", "80",
        "--seed", "3", "--out", str(tightness),
    )

    bw = root / "ee_vs_bw.csv"
    run_primary(
        "sweep", "--scenario", str(scen), "--axis", "bandwidth",
        "--values", "log:1e7:1e11:8", "--mode", "closed_form",
        "--users-series", "4,8", "--out", str(bw),
    )

    scen_n = root / "scen_n.txt"
    scen_n.write_text(
        "num_users = 8\ntx_power = 1e-18\nr_min = 200\nr_max = 400\n"
    )
    antennas = root / "ee_vs_n.csv"
    run_primary(
        "sweep", "--scenario", str(scen_n), "--axis", "antennas",
        "--values", "16,64,256,1024,4096", "--mode", "closed_form", "--out", str(antennas),
    )

    cmp_csv = root / "setup_compare.csv"
    run_primary("compare", "--pgrid", "log:1e-17:1e-15:4", "--out", str(cmp_csv))

    return {
        "se_tightness": tightness,
        "ee_vs_bw": bw,
        "ee_vs_n": antennas,
        "setup_compare": cmp_csv,
    }


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestRenderAllRecipes:
    @pytest.mark.parametrize("figure_id", ["se_tightness", "ee_vs_bw", "ee_vs_n", "setup_compare"])
    def test_renders_and_is_deterministic(self, figure_id, sweep_csvs, tmp_path):
        csv_path = sweep_csvs[figure_id]
        before = sha(csv_path)
        first = tmp_path / "a.png"
        second = tmp_path / "b.png"
        render(FigureRecipe(str(csv_path), figure_id, str(first)))
        render(FigureRecipe(str(csv_path), figure_id, str(second)))
        assert first.stat().st_size > 1000
        assert sha(first) == sha(second)
        assert sha(csv_path) == before  # input CSV untouched

    def test_knee_marker_consumed(self, sweep_csvs):
        text = sweep_csvs["ee_vs_n"].read_text()
        assert "knee_n=" in text  # the marker the recipe overlays


class TestErrors:
    def test_empty_csv(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(CSV_HEADER + "\n")
        out = tmp_path / "x.png"
        with pytest.raises(EmptyCsvError):
            render(FigureRecipe(str(empty), "ee_vs_n", str(out)))
        assert not out.exists()

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("axis_value,K\n1.0,4\n")
        with pytest.raises(MissingColumnError) as err:
            render(FigureRecipe(str(bad), "ee_vs_bw", str(tmp_path / "y.png")))
        assert err.value.column == "ee_bits_per_joule"
        assert "ee_bits_per_joule" in str(err.value)

    def test_unknown_figure_id(self, tmp_path):
        with pytest.raises(FigureError):
            FigureRecipe("whatever.csv", "histogram", str(tmp_path / "z.png"))


class TestCli:
    def test_cli_renders(self, sweep_csvs, tmp_path):
        out = tmp_path / "cli.png"
        res = subprocess.run(
            [
                sys.executable, "-m", "xlmimo_figs", "--figure", "setup_compare",
                "--csv", str(sweep_csvs["setup_compare"]), "--out", str(out),
            ],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr
        assert out.exists()

    def test_cli_missing_column_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("axis_value\n1.0\n")
        res = subprocess.run(
            [
                sys.executable, "-m", "xlmimo_figs", "--figure", "ee_vs_n",
                "--csv", str(bad), "--out", str(tmp_path / "o.png"),
            ],
            capture_output=True, text=True,
        )
        assert res.returncode == 2
        assert "missing required column" in res.stderr

    def test_cli_io_error_exit_code(self, sweep_csvs, tmp_path):
        res = subprocess.run(
            [
                sys.executable, "-m", "xlmimo_figs", "--figure", "ee_vs_n",
                "--csv", str(sweep_csvs["ee_vs_n"]),
                "--out", str(tmp_path / "no_dir" / "o.png"),
            ],
            capture_output=True, text=True,
        )
        assert res.returncode == 4


def test_criterion_12_acceptance(sweep_csvs, tmp_path):
    """All four recipes render deterministically from runner-emitted CSVs."""
    for figure_id, csv_path in sweep_csvs.items():
        a, b = tmp_path / f"{figure_id}_a.png", tmp_path / f"{figure_id}_b.png"
        render(FigureRecipe(str(csv_path), figure_id, str(a)))
        render(FigureRecipe(str(csv_path), figure_id, str(b)))
        assert sha(a) == sha(b)
    print("\nACCEPTANCE criterion 12: PASS  (all four recipes rendered deterministically)")
