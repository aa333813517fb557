import numpy as np
import pytest

from risgeo.cli import main
from risgeo.config import ConfigError, parse_sweep, read_config_file, resolve
from risgeo.rate_loss import rate_loss


def run_cli(args):
    return main(args)


def read_rows(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    header = body[0].split(",")
    rows = [l.split(",") for l in body[1:]]
    return comments, header, rows


class TestConfigParsing:
    def test_sweep_syntax(self):
        s = parse_sweep("n_elements:10:400:5")
        assert (s.axis, s.start, s.stop, s.points, s.scale) == ("n_elements", 10.0, 400.0, 5, "linear")
        assert parse_sweep("density:0.001:0.1:7:log").scale == "log"
        with pytest.raises(ConfigError):
            parse_sweep("density:1:2")
        with pytest.raises(ConfigError):
            parse_sweep("density:1:2:3:cubic")

    def test_unknown_key_distinct_diagnostic(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("transmit_power = 10\n")
        with pytest.raises(ConfigError, match="unknown key 'transmit_power'"):
            read_config_file(str(cfg))

    def test_out_of_domain_distinct_diagnostic(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("alpha_ris_ue = 5.0\n")
        with pytest.raises(ConfigError, match="out of domain"):
            read_config_file(str(cfg))

    def test_comments_and_overrides(self, tmp_path):
        cfg = tmp_path / "ok.cfg"
        cfg.write_text("tx_power_dbm = 17  # downlink power\nrho = 0.5\n")
        resolved = resolve(str(cfg), {"seed": 9})
        assert resolved["tx_power_dbm"] == 17.0
        assert resolved.rho == 0.5
        assert resolved["seed"] == 9

    def test_quantizer_bits_pin_rho(self, tmp_path):
        cfg = tmp_path / "q.cfg"
        cfg.write_text("quant_bits = 2\n")
        assert resolve(str(cfg), {}).rho == 0.25

    def test_unit_round_trip(self):
        cfg = resolve(None, {})
        echo = cfg.linear_echo()
        tx = float(dict(kv.split("=") for kv in echo.split()) ["tx_power_w"])
        assert tx == pytest.approx(10 ** ((cfg["tx_power_dbm"] - 30.0) / 10.0), rel=1e-12)


class TestExitCodes:
    def test_config_error_is_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("nonsense = 1\n")
        assert run_cli(["rate-fixed", "--config", str(cfg), "--sweep", "rho:0:1:3"]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_missing_sweep_is_2(self, capsys):
        assert run_cli(["rate-fixed", "--trials", "10"]) == 2
        assert "sweep" in capsys.readouterr().err

    def test_bad_axis_is_2(self, capsys):
        assert run_cli(["rate-fixed", "--trials", "10", "--sweep", "noise_dbm:1:2:2"]) == 2

    def test_dump_linear_is_0(self, capsys):
        assert run_cli(["optimize", "--dump-linear"]) == 0
        out = capsys.readouterr().out
        assert "tx_power_w=" in out and "beta=0.001" in out


class TestRateFixedCommand:
    def test_sweep_rows_and_echo(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run_cli(
            [
                "rate-fixed",
                "--sweep",
                "n_elements:50:200:4",
                "--trials",
                "2000",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        comments, header, rows = read_rows(out)
        assert comments and comments[0].startswith("# params:")
        assert header == ["n_elements", "bound_bpshz", "mc_mean_bpshz", "mc_stderr_bpshz"]
        assert len(rows) == 4
        for row in rows:
            bound, mc = float(row[1]), float(row[2])
            assert mc <= bound + 3 * float(row[3]) + 1e-12

    def test_phase_error_ordering_across_rho(self, tmp_path):
        # larger error ranges can only lower the bound, at every sweep point
        bounds = {}
        for rho in (0.0, 0.25, 0.5):
            out = tmp_path / f"r{rho}.csv"
            cfg = tmp_path / f"r{rho}.cfg"
            cfg.write_text(f"rho = {rho}\ntrials = 500\n")
            assert (
                run_cli(
                    [
                        "rate-fixed",
                        "--config",
                        str(cfg),
                        "--sweep",
                        "n_elements:10:400:5",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
            _, _, rows = read_rows(out)
            bounds[rho] = [float(r[1]) for r in rows]
        for a, b, c in zip(bounds[0.0], bounds[0.25], bounds[0.5]):
            assert a >= b >= c

    def test_single_point_sweep(self, tmp_path):
        out = tmp_path / "one.csv"
        assert (
            run_cli(
                ["rate-fixed", "--sweep", "rho:0.5:0.5:1", "--trials", "500", "--out", str(out)]
            )
            == 0
        )
        _, _, rows = read_rows(out)
        assert len(rows) == 1

    def test_byte_stable_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["rate-fixed", "--sweep", "n_elements:10:100:3", "--trials", "3000", "--seed", "11"]
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestRateSpatialCommand:
    def test_density_sweep_monotone(self, tmp_path):
        out = tmp_path / "lam.csv"
        code = run_cli(
            [
                "rate-spatial",
                "--sweep",
                "density:0.005:0.04:3:log",
                "--trials",
                "20000",
                "--regime",
                "integral",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        _, header, rows = read_rows(out)
        quad = [float(r[header.index("quadrature_bpshz")]) for r in rows]
        assert quad == sorted(quad)
        for row in rows:
            q = float(row[header.index("quadrature_bpshz")])
            mcb = float(row[header.index("mc_bound_bpshz")])
            se = float(row[header.index("mc_bound_stderr")])
            assert abs(q - mcb) <= 4 * se

    def test_regime_column_dispatch(self, tmp_path):
        out = tmp_path / "c.csv"
        cfg = tmp_path / "c.cfg"
        cfg.write_text("tx_power_dbm = 45\nelements_per_ris = 400\n")
        assert (
            run_cli(
                [
                    "rate-spatial",
                    "--config",
                    str(cfg),
                    "--sweep",
                    "serve_radius:8:16:2",
                    "--trials",
                    "20000",
                    "--regime",
                    "high",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        _, header, rows = read_rows(out)
        for row in rows:
            closed = float(row[header.index("closed_form_bpshz")])
            quad = float(row[header.index("quadrature_bpshz")])
            assert abs(closed - quad) <= 0.1


class TestOptimizeCommand:
    def test_budget_anchor_report(self, tmp_path, capsys):
        cfg = tmp_path / "opt.cfg"
        cfg.write_text(
            "tx_power_dbm = 15\nalpha_ris_ue = 2\nserve_radius = 3\n"
            "element_budget = 10\nrho = 1\nregime = high\n"
        )
        out = tmp_path / "curve.csv"
        assert run_cli(["optimize", "--config", str(cfg), "--out", str(out)]) == 0
        comments, header, rows = read_rows(out)
        report = next(c for c in comments if c.startswith("# optimum:"))
        assert "n_star=45" in report and "branch=random_closed_form" in report
        objective = [float(r[1]) for r in rows]
        assert int(rows[int(np.argmax(objective))][0]) == 45

    def test_spreading_anchor(self, tmp_path):
        cfg = tmp_path / "opt.cfg"
        cfg.write_text(
            "tx_power_dbm = 15\nalpha_ris_ue = 2.5\nserve_radius = 3\n"
            "element_budget = 10\nrho = 1\nregime = high\n"
        )
        out = tmp_path / "curve.csv"
        assert run_cli(["optimize", "--config", str(cfg), "--out", str(out)]) == 0
        comments, _, rows = read_rows(out)
        report = next(c for c in comments if c.startswith("# optimum:"))
        assert "n_star=1" in report
        objective = [float(r[1]) for r in rows]
        assert int(np.argmax(objective)) == 0


class TestRateLossCommand:
    def test_columns_match_formulas(self, tmp_path):
        out = tmp_path / "loss.csv"
        cfg = tmp_path / "loss.cfg"
        cfg.write_text("density = 0.05\nserve_radius = 10\nrho_list = 0.25,0.5,1\n")
        assert (
            run_cli(
                [
                    "rate-loss",
                    "--config",
                    str(cfg),
                    "--sweep",
                    "n_elements:40:160:4",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        _, header, rows = read_rows(out)
        i_loss1 = header.index("loss_rho1")
        i_asym1 = header.index("asymptote_rho1")
        for row in rows:
            n = int(row[0])
            assert float(row[i_loss1]) == pytest.approx(
                rate_loss(n, 1.0, 0.05, 10.0), abs=0.02
            )
            assert row[i_asym1] == ""  # random phases never saturate
        i_loss05 = header.index("loss_rho0.5")
        n_vals = [int(r[0]) for r in rows]
        at_120 = float(rows[n_vals.index(120)][i_loss05])
        assert at_120 == pytest.approx(1.2748, abs=0.01)


class TestValidateCommand:
    def test_default_run_passes(self, capsys):
        assert run_cli(["validate", "--trials", "30000", "--seed", "0"]) == 0
        out = capsys.readouterr().out
        assert "summary" in out and "FAIL" not in out.replace("FAIL(statistical)", "")

    def test_corrupted_tolerance_fails_named_checks(self, tmp_path, capsys):
        cfg = tmp_path / "bad_tol.cfg"
        cfg.write_text("abs_tol = 10\n")
        assert run_cli(["validate", "--config", str(cfg), "--trials", "30000"]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out
        assert "ei_quadrature_agreement" in out
