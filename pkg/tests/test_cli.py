import os

import pytest

from geonresp.cli import (
    EXIT_COMPUTE,
    EXIT_OK,
    EXIT_USAGE,
    main,
)
from geonresp.spacetime import local_temperature

# small grid keeps table builds fast; omega range still covers the
# Gaussian support at sigma = 100 and the rate gaps used below
SMALL = ["--omega-min", "1e-3", "--omega-max", "2.0",
         "--n-nodes", "40", "--l-max", "2"]


@pytest.fixture(scope="module")
def cli_cache(tmp_path_factory):
    return str(tmp_path_factory.mktemp("cli-tables"))


def run(argv):
    return main(argv)


def read_rows(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    data = [ln for ln in lines if not ln.startswith("#")]
    return lines, data[0], data[1:]


class TestModes:
    def test_prints_amplitudes_and_defects(self, capsys):
        assert run(["modes", "--l", "0", "--omega", "0.5", "--r", "3.0"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "|B_in|^2" in out and "unitarity defect (in)" in out

    @pytest.mark.parametrize("argv", [
        ["modes", "--l", "0", "--omega", "0.5", "--r", "1.0"],
        ["modes", "--l", "0", "--omega", "0.0", "--r", "3.0"],
        ["modes", "--l", "-1", "--omega", "0.5", "--r", "3.0"],
    ])
    def test_bad_domain_is_usage_error(self, argv, capsys):
        assert run(argv) == EXIT_USAGE
        assert "error" in capsys.readouterr().err


class TestTable:
    def test_build_then_cache_hit(self, cli_cache, capsys):
        argv = ["table", "build", "--r", "3.0", "--cache-dir", cli_cache] + SMALL
        assert run(argv) == EXIT_OK
        assert "built table" in capsys.readouterr().out
        assert run(argv) == EXIT_OK
        assert "cache hit" in capsys.readouterr().out

    def test_inspect_summarizes(self, cli_cache, capsys):
        argv = ["table", "inspect", "--r", "3.0", "--cache-dir", cli_cache] + SMALL
        assert run(argv) == EXIT_OK
        out = capsys.readouterr().out
        assert "r_det = 3.0" in out

    def test_inspect_missing_is_compute_error(self, tmp_path, capsys):
        argv = ["table", "inspect", "--r", "7.0",
                "--cache-dir", str(tmp_path)] + SMALL
        assert run(argv) == EXIT_COMPUTE
        assert "error" in capsys.readouterr().err

    def test_corrupt_cache_needs_force(self, tmp_path, capsys):
        cache = str(tmp_path)
        argv = ["table", "build", "--r", "3.0", "--cache-dir", cache] + SMALL
        assert run(argv) == EXIT_OK
        capsys.readouterr()
        (path,) = [os.path.join(cache, f) for f in os.listdir(cache)]
        with open(path, "r+b") as fh:
            fh.seek(200)
            fh.write(b"\xff" * 16)
        assert run(argv) == EXIT_COMPUTE
        assert "--force" in capsys.readouterr().err
        assert run(argv + ["--force"]) == EXIT_OK
        out = capsys.readouterr()
        assert "built table" in out.out
        assert run(argv) == EXIT_OK
        assert "cache hit" in capsys.readouterr().out


class TestResponse:
    def test_single_point_schema(self, cli_cache, tmp_path):
        out = str(tmp_path / "resp.csv")
        argv = ["response", "--cache-dir", cli_cache, "--no-timestamp",
                "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        lines, header, rows = read_rows(out)
        assert header.split(",") == [
            "sweep_var", "value", "vacuum", "r", "Omega", "sigma", "tau0",
            "F_BH", "F_J", "F_total", "err_est", "status"]
        assert len(rows) == 1
        cells = rows[0].split(",")
        assert cells[2] == "hartle-hawking" and cells[-1] == "ok"
        # totals agree up to the 12-digit rounding of the CSV format
        assert float(cells[9]) == pytest.approx(
            float(cells[7]) + float(cells[8]), rel=1e-11)

    def test_timestamp_header_toggle(self, cli_cache, tmp_path):
        out = str(tmp_path / "resp.csv")
        argv = ["response", "--cache-dir", cli_cache, "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        with open(out) as fh:
            first = fh.readline()
        assert first.startswith("# generated ") and "geonresp" in first

    def test_deterministic_output(self, cli_cache, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = str(tmp_path / name)
            argv = ["response", "--cache-dir", cli_cache, "--no-timestamp",
                    "--sweep", "gap", "--values", "0,0.005,0.01",
                    "-o", out] + SMALL
            assert run(argv) == EXIT_OK
            with open(out, "rb") as fh:
                outs.append(fh.read())
        assert outs[0] == outs[1]

    def test_linear_sweep_spec(self, cli_cache, tmp_path):
        out = str(tmp_path / "resp.csv")
        argv = ["response", "--cache-dir", cli_cache, "--no-timestamp",
                "--sweep", "gap", "--start", "0.0", "--stop", "0.01",
                "--num", "3", "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        _, _, rows = read_rows(out)
        assert [float(r.split(",")[1]) for r in rows] == [0.0, 0.005, 0.01]

    def test_incomplete_range_is_usage_error(self, cli_cache, capsys):
        argv = ["response", "--cache-dir", cli_cache, "--sweep", "gap",
                "--start", "0.0", "--num", "3"] + SMALL
        assert run(argv) == EXIT_USAGE
        assert "together" in capsys.readouterr().err

    def test_boulware_rows_fail_but_run_continues(self, cli_cache, tmp_path):
        out = str(tmp_path / "resp.csv")
        argv = ["response", "--cache-dir", cli_cache, "--no-timestamp",
                "--vacuum", "hartle-hawking,boulware", "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        _, _, rows = read_rows(out)
        assert rows[0].split(",")[-1] == "ok"
        assert rows[1].split(",")[-1].startswith("error:")

    def test_unknown_vacuum_is_usage_error(self, cli_cache, capsys):
        argv = ["response", "--cache-dir", cli_cache,
                "--vacuum", "thermal"] + SMALL
        assert run(argv) == EXIT_USAGE
        assert "unknown vacuum" in capsys.readouterr().err


class TestRate:
    def test_gap_list_and_schema(self, cli_cache, tmp_path):
        out = str(tmp_path / "rate.csv")
        argv = ["rate", "--cache-dir", cli_cache, "--no-timestamp",
                "--Omega", "0.1,0.2", "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        _, header, rows = read_rows(out)
        assert header.split(",") == [
            "sweep_var", "value", "vacuum", "r", "Omega", "tau0",
            "rate_BH", "rate_J_delta", "rate_J_pv", "rate_J_total", "status"]
        assert [float(r.split(",")[4]) for r in rows] == [0.1, 0.2]
        for r in rows:
            assert r.split(",")[-1] == "ok"

    def test_gap_units_scaling(self, cli_cache, tmp_path):
        out = str(tmp_path / "rate.csv")
        argv = ["rate", "--cache-dir", cli_cache, "--no-timestamp",
                "--Omega", "1.0", "--gap-units", "t-loc", "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        _, _, rows = read_rows(out)
        assert float(rows[0].split(",")[4]) == pytest.approx(
            local_temperature(3.0), rel=1e-12)

    def test_all_vacua_boulware_geon_nan(self, cli_cache, tmp_path):
        out = str(tmp_path / "rate.csv")
        argv = ["rate", "--cache-dir", cli_cache, "--no-timestamp",
                "--Omega", "-0.2", "--vacuum", "all", "-o", out] + SMALL
        assert run(argv) == EXIT_OK
        _, _, rows = read_rows(out)
        by_vac = {r.split(",")[2]: r.split(",") for r in rows}
        assert set(by_vac) == {"hartle-hawking", "unruh", "boulware"}
        b = by_vac["boulware"]
        assert float(b[6]) > 0.0
        assert b[7] == b[8] == b[9] == "nan"
        assert b[10] == "ok"


class TestConfig:
    def test_config_supplies_defaults_and_flags_win(self, cli_cache, tmp_path):
        cfg = tmp_path / "geonresp.cfg"
        cfg.write_text(
            "Omega = 0.01   # gap\n"
            "sigma = 50\n"
            "omega_min = 1e-3\nomega_max = 2.0\nn_nodes = 40\nl_max = 2\n"
            f"cache_dir = {cli_cache}\n")
        out1 = str(tmp_path / "from_config.csv")
        assert run(["response", "--config", str(cfg), "--no-timestamp",
                    "-o", out1]) == EXIT_OK
        _, _, rows = read_rows(out1)
        cells = rows[0].split(",")
        assert float(cells[4]) == 0.01 and float(cells[5]) == 50.0
        out2 = str(tmp_path / "flag_wins.csv")
        assert run(["response", "--config", str(cfg), "--no-timestamp",
                    "--Omega", "0.02", "-o", out2]) == EXIT_OK
        _, _, rows = read_rows(out2)
        assert float(rows[0].split(",")[4]) == 0.02

    def test_malformed_config_is_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("sigma 50\n")
        assert run(["response", "--config", str(cfg)]) == EXIT_USAGE
        assert "key=value" in capsys.readouterr().err

    def test_missing_config_is_usage_error(self, tmp_path):
        assert run(["response",
                    "--config", str(tmp_path / "nope.cfg")]) == EXIT_USAGE


class TestUsage:
    def test_unknown_flag(self, capsys):
        assert run(["modes", "--l", "0", "--omega", "0.5", "--r", "3.0",
                    "--frobnicate"]) == EXIT_USAGE

    def test_missing_subcommand(self, capsys):
        assert run([]) == EXIT_USAGE

    def test_help_is_success(self, capsys):
        assert run(["--help"]) == EXIT_OK
