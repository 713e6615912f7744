"""
Integration Tests for the Command-Line Front End

Runs `main()` end to end and checks output, exit status and determinism.
"""

import json
import math

import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from src.data.ingestion import ingest_csv
from src.main import main
from src.utils.config_loader import reload_configs

TABLE = """year,y_current,y_potential,revenue,expenditure,debt_ratio
2019,101,100,40.5,41,0.72
2020,95,101,37.25,44,0.78
2021,99,102,39.5,43,0.55
"""


@pytest.fixture(autouse=True)
def fresh_configs(monkeypatch):
    monkeypatch.delenv("FISCAL_CONFIG_DIR", raising=False)
    reload_configs()
    yield
    reload_configs()


@pytest.fixture
def table_path(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text(TABLE, encoding="utf-8")
    return path


def run(capsys, *argv):
    """Run the CLI and return (status, stdout, stderr)."""
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


class TestScalarSubcommands:
    """Tests for subcommands that print a single value."""

    def test_gap(self, capsys):
        status, out, _ = run(capsys, "gap", "--y", "105", "--yp", "100")
        assert status == 0
        assert out == "0.05\n"

    def test_sfa(self, capsys):
        status, out, _ = run(capsys, "sfa", "--delta-sbc", "2", "--delta-sbs", "0.5")
        assert status == 0
        assert out == "1.5\n"

    def test_gap_json(self, capsys):
        status, out, _ = run(capsys, "gap", "--y", "105", "--yp", "100", "--format", "json")
        payload = json.loads(out)
        assert status == 0
        assert payload["results"] == [{"value": 0.05}]
        assert payload["inputs"] == [{"y_current": 105.0, "y_potential": 100.0}]
        assert payload["warnings"] == []

    def test_classify(self, capsys):
        status, out, _ = run(
            capsys,
            "classify",
            "is_institutional_device=true",
            "counters_change=true",
            "overproportional=true",
            "reduces_gap_actual_desired=true",
            "controls_gdp_change=true",
            "aims_reduce_gdp_volatility=true",
            "formal_normative=true",
            "action_mode=implicit",
            "control_shape=nonlinear",
            "target=expenditure",
        )
        assert status == 0
        assert out == "SFAc\n"

    def test_classify_empty_descriptor(self, capsys):
        status, out, _ = run(capsys, "classify")
        assert status == 0
        assert out == "NotStabiliser\n"


class TestDeterminism:
    """Identical invocations produce identical bytes."""

    @pytest.mark.parametrize(
        "argv",
        [
            ("gap", "--y", "105", "--yp", "100"),
            ("sfa", "--delta-sbc", "2", "--delta-sbs", "0.5"),
            ("simulate", "--b0", "172055.3", "--t0", "2014", "--t1", "2020"),
        ],
    )
    def test_byte_identical(self, capsys, argv):
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second
        assert first


class TestSimulate:
    """Tests for the logistic trajectory subcommand."""

    def test_wage_base_table(self, capsys):
        status, out, _ = run(capsys, "simulate", "--b0", "172055.3", "--t0", "2014", "--t1", "2020")
        lines = out.splitlines()
        assert status == 0
        assert lines[0].split() == ["t", "B_analytic", "B_numeric", "rel_error"]
        assert len(lines) == 8

    def test_wage_base_json(self, capsys):
        status, out, _ = run(
            capsys, "simulate", "--b0", "172055.3", "--t0", "2014", "--t1", "2020", "--format", "json"
        )
        payload = json.loads(out)
        values = [row["B_numeric"] for row in payload["results"]]
        assert status == 0
        assert all(b > 1.0 for b in values)
        assert all(later < earlier for earlier, later in zip(values, values[1:]))
        assert all(row["rel_error"] <= 1e-6 for row in payload["results"])
        assert [w["code"] for w in payload["warnings"]] == ["logistic_coefficients"]


class TestBalance:
    """Tests for the decomposition subcommand."""

    def test_flags(self, capsys):
        status, out, _ = run(
            capsys,
            "balance", "--y", "105", "--yp", "100", "--revenue", "40", "--expenditure", "42",
            "--format", "json",
        )
        row = json.loads(out)["results"][0]
        assert status == 0
        assert row["sbc"] == -2.0
        assert row["sbs"] == pytest.approx(40.0 * 100.0 / 105.0 - 42.0, rel=1e-12)
        assert row["sbc_cyclical"] == pytest.approx(row["cyclical_closed_form"], rel=1e-12)

    def test_elasticity_flags(self, capsys):
        status, out, _ = run(
            capsys,
            "balance", "--y", "105", "--yp", "100", "--revenue", "40", "--expenditure", "42",
            "--eps-v", "1.5", "--eps-c", "0.2", "--format", "json",
        )
        row = json.loads(out)["results"][0]
        assert status == 0
        assert row["eps_v"] == 1.5
        assert row["eps_c"] == 0.2

    def test_csv_round_trip(self, capsys, table_path, tmp_path):
        out_path = tmp_path / "decomposition.csv"
        status, _, _ = run(
            capsys, "balance", "--csv", str(table_path), "--format", "csv", "--out", str(out_path)
        )
        assert status == 0

        _, out, _ = run(capsys, "balance", "--csv", str(table_path), "--format", "json")
        rows = json.loads(out)["results"]
        table = ingest_csv(out_path)

        assert len(table) == len(rows)
        for record, row in zip(table.records, rows):
            assert record.year == row["year"]
            for column in ("gap", "sbc", "sbs", "sbc_cyclical", "delta_sbc", "sfa"):
                assert record.get(column) == row[column]

    def test_missing_flag_is_usage_error(self, capsys):
        status, _, err = run(capsys, "balance", "--y", "105", "--yp", "100")
        assert status == 2
        assert "--revenue" in err


class TestOtherSubcommands:
    """Tests for disagg, comply, vol and effect."""

    def test_disagg_flags(self, capsys):
        status, out, _ = run(
            capsys,
            "disagg",
            "--revenues", "10", "10", "10", "10",
            "--expenditure", "42", "--y", "100", "--yp", "100", "--u", "0.07", "--u-star", "0.07",
            "--format", "json",
        )
        row = json.loads(out)["results"][0]
        assert status == 0
        assert row["level"] == -2.0
        assert row["ratio"] == -0.02

    def test_comply_csv(self, capsys, table_path):
        status, out, _ = run(capsys, "comply", "--csv", str(table_path), "--format", "json")
        rows = json.loads(out)["results"]
        assert status == 0
        assert [row["structural_limit"] for row in rows] == [0.005, 0.005, 0.01]

    def test_comply_requires_debt_ratio(self, capsys):
        status, _, _ = run(
            capsys, "comply", "--y", "100", "--yp", "100", "--revenue", "40", "--expenditure", "41"
        )
        assert status == 2

    def test_vol_report(self, capsys):
        status, out, _ = run(
            capsys, "vol", "--k", "8", "--b", "27", "--n", "1.5", "--m", "1", "--format", "json"
        )
        row = json.loads(out)["results"][0]
        assert status == 0
        assert row["vol"] == pytest.approx(108.0)
        assert row["gradient"] == pytest.approx([162.0, 108.0])
        assert row["gradient_check_ok"] is True
        assert row["second_differential_sign"] == "indefinite"

    def test_vol_origin_flags_discrepancy(self, capsys):
        status, out, _ = run(
            capsys, "vol", "--k", "0", "--b", "0", "--n", "2", "--m", "1", "--format", "json"
        )
        payload = json.loads(out)
        assert status == 0
        assert payload["results"][0]["stationary_at_origin"] is True
        assert payload["results"][0]["automatic_type"] is False
        assert [w["code"] for w in payload["warnings"]] == ["second_differential_origin"]

    def test_vol_kink_is_degenerate(self, capsys):
        status, out, _ = run(
            capsys, "vol", "--k", "1", "--b", "1", "--n", "1", "--m", "1", "--format", "json"
        )
        row = json.loads(out)["results"][0]
        assert status == 0
        assert row["degenerate"] is True
        assert row["stabilisers_required"] is False

    def test_effect_coupling(self, capsys, tmp_path):
        plot_path = tmp_path / "plot.csv"
        status, out, _ = run(
            capsys,
            "effect", "--b0", "172055.3", "--t0", "2014", "--t1", "2020", "--coupling", "2",
            "--plot-data", str(plot_path), "--format", "json",
        )
        payload = json.loads(out)
        assert status == 0
        assert all(row["E"] == pytest.approx(-2.0, rel=1e-12) for row in payload["results"])
        assert payload["summary"]["optimum_search"]["degenerate"] is True
        assert plot_path.read_text(encoding="utf-8").splitlines()[0] == "t,B,K,E"

    @pytest.mark.parametrize("t1,step", [("800", "100"), ("300", "50")])
    def test_effect_long_horizon_is_finite(self, capsys, t1, step):
        status, out, _ = run(
            capsys,
            "effect", "--b0", "0.5", "--t0", "0", "--t1", t1, "--step", step, "--k-const", "1",
            "--format", "json",
        )
        rows = json.loads(out)["results"]
        assert status == 0
        assert all(math.isfinite(row["d2E"]) for row in rows)
        assert all(math.isfinite(row["d2E_fd"]) for row in rows)
        assert rows[-1]["K_condition"] == pytest.approx(0.5, rel=1e-8)

    def test_effect_requires_one_rate_mode(self, capsys):
        status, _, _ = run(capsys, "effect", "--b0", "0.5", "--t0", "0", "--t1", "5")
        assert status == 2


class TestExitCodes:
    """Domain errors exit 1, usage errors exit 2."""

    def test_domain_error(self, capsys):
        status, out, err = run(capsys, "gap", "--y", "-1", "--yp", "100")
        assert status == 1
        assert out == ""
        assert json.loads(err.splitlines()[-1])["success"] is False

    def test_ingestion_error(self, capsys, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text(
            "year,y_current,y_potential,revenue,expenditure\n2020,1,1,1,1\n2020,1,1,1,1\n"
        )
        status, _, err = run(capsys, "balance", "--csv", str(path))
        assert status == 1
        assert "row 3" in json.loads(err.splitlines()[-1])["error"]

    def test_singularity_is_domain_error(self, capsys):
        status, _, _ = run(capsys, "simulate", "--b0", "2e12", "--t0", "0", "--t1", "1")
        assert status == 1

    def test_unknown_subcommand(self, capsys):
        status, _, _ = run(capsys, "forecast")
        assert status == 2

    def test_unknown_flag(self, capsys):
        status, _, _ = run(capsys, "gap", "--y", "105", "--yp", "100", "--bogus", "1")
        assert status == 2

    def test_non_finite_number_is_usage_error(self, capsys):
        status, _, _ = run(capsys, "gap", "--y", "nan", "--yp", "100")
        assert status == 2

    def test_bad_config_file(self, capsys, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("unknown_key=1\n")
        status, _, err = run(capsys, "gap", "--y", "105", "--yp", "100", "--config", str(config))
        assert status == 2
        assert "unknown_key" in err

    def test_config_file_sets_format(self, capsys, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("output_format=json\n")
        status, out, _ = run(capsys, "gap", "--y", "105", "--yp", "100", "--config", str(config))
        assert status == 0
        assert json.loads(out)["results"] == [{"value": 0.05}]

    def test_non_finite_config_value(self, capsys, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("epsilon_v=inf\n")
        status, out, err = run(capsys, "gap", "--y", "105", "--yp", "100", "--config", str(config))
        assert status == 2
        assert out == ""
        assert "epsilon_v" in err


class TestRunLogging:
    """Records from a run carry the subcommand as context."""

    def test_json_log_records_name_subcommand(self, capsys):
        status, out, err = run(
            capsys, "gap", "--y", "105", "--yp", "100", "--log-level", "INFO", "--json-logs"
        )
        records = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
        assert status == 0
        assert out == "0.05\n"
        assert any((record["extra"] or {}).get("subcommand") == "gap" for record in records)

    def test_failure_is_logged_with_subcommand(self, capsys):
        status, _, err = run(
            capsys, "gap", "--y", "-1", "--yp", "100", "--log-level", "ERROR", "--json-logs"
        )
        records = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
        logged = [record for record in records if record.get("level") == "ERROR"]
        assert status == 1
        assert logged
        assert logged[0]["extra"]["subcommand"] == "gap"
