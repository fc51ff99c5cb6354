import math

import numpy as np
import pytest

from hbtsim import read_contour_csv, read_correlation_csv, read_grid_csv
from hbtsim.cli import main, parse_axis
from hbtsim.errors import InvalidParameterError


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseAxis:
    def test_accepts_axis_grammar(self):
        axis = parse_axis("sigma=0:1:51")
        assert (axis.parameter, axis.start, axis.stop, axis.steps) == (
            "sigma", 0.0, 1.0, 51,
        )

    @pytest.mark.parametrize("text", ["sigma", "sigma=0:1", "sigma=a:b:c", "=0:1:5"])
    def test_rejects_malformed(self, text):
        with pytest.raises(InvalidParameterError):
            parse_axis(text)


class TestSimulate:
    def test_noiseless_summary_and_csv(self, tmp_path, capsys):
        out_csv = tmp_path / "corr.csv"
        code, out, _ = run(
            ["simulate", "--sigma", "0", "--xi", "0", "--chi", "0",
             "--pulses", "20000", "--sidebands", "10", "--seed", "7",
             "--output", str(out_csv)],
            capsys,
        )
        assert code == 0
        assert out.startswith("g2_zero=0.0 ")
        assert "center=0.0" in out
        result = read_correlation_csv(out_csv)
        assert result.g2_zero == 0.0
        assert len(result.lags) == 21

    def test_noisy_value_near_oracle(self, tmp_path, capsys):
        code, out, _ = run(
            ["simulate", "--sigma", "0.6", "--pulses", "20000", "--seed", "7",
             "--output", str(tmp_path / "corr.csv")],
            capsys,
        )
        assert code == 0
        value = float(out.split()[0].split("=")[1])
        assert value == pytest.approx(0.609375, abs=0.04)

    def test_invalid_parameter_exits_2(self, tmp_path, capsys):
        code, _, err = run(
            ["simulate", "--xi", "0.6", "--output", str(tmp_path / "x.csv")],
            capsys,
        )
        assert code == 2
        assert "(-1/2, 1/2)" in err

    def test_io_failure_exits_3(self, tmp_path, capsys):
        code, _, err = run(
            ["simulate", "--sigma", "0", "--pulses", "100",
             "--output", str(tmp_path / "missing" / "x.csv")],
            capsys,
        )
        assert code == 3
        assert "I/O error" in err

    def test_dump_streams(self, tmp_path, capsys):
        dump = tmp_path / "streams.csv"
        code, _, _ = run(
            ["simulate", "--sigma", "0.2", "--pulses", "500", "--seed", "3",
             "--output", str(tmp_path / "corr.csv"), "--dump-streams", str(dump)],
            capsys,
        )
        assert code == 0
        assert dump.read_text().splitlines()[0] == "index,a,b"

    def test_byte_identical_reruns(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            run(
                ["simulate", "--sigma", "0.5", "--xi", "0.1", "--pulses", "5000",
                 "--seed", "11", "--output", str(path)],
                capsys,
            )
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestSweep:
    def test_1d_grid(self, tmp_path, capsys):
        out_csv = tmp_path / "sweep.csv"
        code, _, err = run(
            ["sweep", "--axis", "sigma=0:1:6", "--pulses", "2000",
             "--replicates", "3", "--seed", "1", "--output", str(out_csv)],
            capsys,
        )
        assert code == 0
        assert err == ""
        grid = read_grid_csv(out_csv)
        assert grid.g2_mean.shape == (6,)
        assert grid.g2_mean[0] == 0.0
        assert grid.g2_mean[-1] > 0.5

    def test_2d_grid_writes_contour(self, tmp_path, capsys):
        out_csv = tmp_path / "grid.csv"
        code, _, _ = run(
            ["sweep", "--axis", "sigma=0:1:6", "--axis", "chi=-0.5:0.5:5",
             "--pulses", "2000", "--replicates", "2", "--seed", "1",
             "--output", str(out_csv)],
            capsys,
        )
        assert code == 0
        contour_csv = tmp_path / "grid_contour.csv"
        assert contour_csv.exists()
        lines = read_contour_csv(contour_csv)
        assert lines

    def test_analytic_grid_is_exact(self, tmp_path, capsys):
        out_csv = tmp_path / "analytic.csv"
        code, _, _ = run(
            ["sweep", "--axis", "sigma=0:1:11", "--analytic",
             "--output", str(out_csv)],
            capsys,
        )
        assert code == 0
        grid = read_grid_csv(out_csv)
        expected = [1 - 1 / (1 + s) ** 2 for s in grid.axis_values[0]]
        assert grid.g2_mean == pytest.approx(expected, rel=1e-14)
        assert not grid.g2_std.any()

    def test_missing_axis_exits_2(self, tmp_path, capsys):
        code, _, err = run(["sweep", "--output", str(tmp_path / "x.csv")], capsys)
        assert code == 2
        assert "axis" in err

    def test_worker_count_invariance_bytes(self, tmp_path, capsys):
        outputs = []
        for jobs, name in [("1", "serial.csv"), ("4", "parallel.csv")]:
            path = tmp_path / name
            code, _, _ = run(
                ["sweep", "--axis", "sigma=0:0.8:4", "--axis", "xi=-0.3:0.3:3",
                 "--pulses", "1000", "--replicates", "2", "--seed", "21",
                 "--jobs", jobs, "--output", str(path)],
                capsys,
            )
            assert code == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        contours = [
            (tmp_path / "serial_contour.csv").read_bytes(),
            (tmp_path / "parallel_contour.csv").read_bytes(),
        ]
        assert contours[0] == contours[1]


class TestTheory:
    def test_fock(self, capsys):
        code, out, _ = run(["theory", "--fock", "2"], capsys)
        assert code == 0
        assert out.strip() == "fock_g2=0.5"

    def test_symmetric_crossing_value(self, capsys):
        code, out, _ = run(
            ["theory", "--sigma", "0.4142135", "--xi", "0", "--chi", "0"], capsys
        )
        assert code == 0
        value = float(out.strip().split("=")[1])
        assert round(value, 4) == 0.5

    def test_one_sided_noise_value(self, capsys):
        code, out, _ = run(["theory", "--sigma", "0.5", "--chi", "0.5"], capsys)
        assert code == 0
        assert float(out.strip().split("=")[1]) == 0.5

    def test_both_outputs(self, capsys):
        code, out, _ = run(["theory", "--fock", "3", "--sigma", "1"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == f"fock_g2={1 - 1 / 3!r}"
        assert lines[1] == "analytic_g2_zero=0.75"

    def test_invalid_fock_exits_2(self, capsys):
        code, _, err = run(["theory", "--fock", "0"], capsys)
        assert code == 2
        assert "photon number" in err


class TestContourCommand:
    def test_matches_sweep_output(self, tmp_path, capsys):
        grid_csv = tmp_path / "grid.csv"
        run(
            ["sweep", "--axis", "sigma=0:1:8", "--axis", "chi=-0.5:0.5:7",
             "--pulses", "2000", "--replicates", "2", "--seed", "5",
             "--output", str(grid_csv)],
            capsys,
        )
        extracted = tmp_path / "again.csv"
        code, _, _ = run(
            ["contour", "--grid", str(grid_csv), "--level", "0.5",
             "--output", str(extracted)],
            capsys,
        )
        assert code == 0
        assert extracted.read_bytes() == (tmp_path / "grid_contour.csv").read_bytes()

    def test_missing_grid_file_is_io_failure(self, tmp_path, capsys):
        code, _, err = run(
            ["contour", "--grid", str(tmp_path / "nope.csv")], capsys
        )
        assert code == 3
        assert "I/O error" in err


class TestConfigAndEnvironment:
    def test_config_file_supplies_defaults(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text(
            "# experiment record\nsigma=0.5\nxi=0.1\npulses=4000\nseed=9\n"
        )
        out_csv = tmp_path / "corr.csv"
        code, out_config, _ = run(
            ["simulate", "--config", str(config), "--output", str(out_csv)], capsys
        )
        assert code == 0
        direct_csv = tmp_path / "direct.csv"
        code, out_direct, _ = run(
            ["simulate", "--sigma", "0.5", "--xi", "0.1", "--pulses", "4000",
             "--seed", "9", "--output", str(direct_csv)],
            capsys,
        )
        assert code == 0
        assert out_config == out_direct
        assert out_csv.read_bytes() == direct_csv.read_bytes()

    def test_flags_override_config(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("sigma=0.9\npulses=1000\nseed=2\n")
        code, out, _ = run(
            ["simulate", "--config", str(config), "--sigma", "0",
             "--output", str(tmp_path / "c.csv")],
            capsys,
        )
        assert code == 0
        assert out.startswith("g2_zero=0.0")

    def test_config_axis_entries(self, tmp_path, capsys):
        config = tmp_path / "sweep.cfg"
        config.write_text("axis=sigma=0:1:4\naxis=chi=-0.5:0.5:3\npulses=500\n")
        out_csv = tmp_path / "grid.csv"
        code, _, _ = run(
            ["sweep", "--config", str(config), "--replicates", "2",
             "--seed", "1", "--output", str(out_csv)],
            capsys,
        )
        assert code == 0
        assert read_grid_csv(out_csv).g2_mean.shape == (4, 3)

    def test_malformed_config_exits_2(self, tmp_path, capsys):
        config = tmp_path / "bad.cfg"
        config.write_text("sigma\n")
        code, _, err = run(
            ["simulate", "--config", str(config),
             "--output", str(tmp_path / "c.csv")],
            capsys,
        )
        assert code == 2
        assert "key=value" in err

    def test_env_seed_and_jobs(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("HBTSIM_SEED", "33")
        monkeypatch.setenv("HBTSIM_JOBS", "2")
        env_csv = tmp_path / "env.csv"
        code, _, _ = run(
            ["sweep", "--axis", "sigma=0:1:3", "--pulses", "500",
             "--replicates", "2", "--output", str(env_csv)],
            capsys,
        )
        assert code == 0
        monkeypatch.delenv("HBTSIM_SEED")
        monkeypatch.delenv("HBTSIM_JOBS")
        flag_csv = tmp_path / "flag.csv"
        code, _, _ = run(
            ["sweep", "--axis", "sigma=0:1:3", "--pulses", "500",
             "--replicates", "2", "--seed", "33", "--output", str(flag_csv)],
            capsys,
        )
        assert code == 0
        assert env_csv.read_bytes() == flag_csv.read_bytes()

    def test_flag_beats_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("HBTSIM_SEED", "33")
        a = tmp_path / "a.csv"
        run(["simulate", "--sigma", "0.4", "--pulses", "1000", "--seed", "1",
             "--output", str(a)], capsys)
        monkeypatch.delenv("HBTSIM_SEED")
        b = tmp_path / "b.csv"
        run(["simulate", "--sigma", "0.4", "--pulses", "1000", "--seed", "1",
             "--output", str(b)], capsys)
        assert a.read_bytes() == b.read_bytes()
