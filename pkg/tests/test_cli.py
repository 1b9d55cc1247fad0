import json
import subprocess
import sys

import pytest

from stochbbm.cli import COMMANDS, EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, build_parser, main

QUICK_CFG = """
T0 = 0.25
dt = 2^-7
ensemble_size = 3
ch_samples = 60
order_levels = 2
levels = 2
"""


@pytest.fixture
def cfg_file(tmp_path):
    fn = tmp_path / "run.cfg"
    fn.write_text(QUICK_CFG)
    return fn


class TestCli:
    def test_subcommands(self):
        expected = {"simulate", "energy-study", "lambda-study", "truncation-study",
                    "order-study", "ensemble", "estimate-ch", "drift-study", "picard"}
        assert expected <= set(COMMANDS)

    @pytest.mark.parametrize("cmd", ["simulate", "energy-study", "estimate-ch", "ensemble",
                                     "order-study"])
    def test_runs_and_writes_layout(self, cmd, cfg_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main([cmd, "--config", str(cfg_file), "--out-dir", str(out), "--workers", "2"]) == EXIT_OK
        assert (out / "config.echo").exists() and (out / "report.json").exists()
        json.loads(capsys.readouterr().out)

    def test_overrides(self, cfg_file, tmp_path):
        out = tmp_path / "out"
        main(["simulate", "--config", str(cfg_file), "--dt", "0.015625", "--seed", "5",
              "--scheme", "midpoint-stratonovich", "--out-dir", str(out)])
        echo = (out / "config.echo").read_text()
        assert "dt = 0.015625" in echo and "seed = 5" in echo
        assert "scheme = midpoint-stratonovich" in echo

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("tyop = 3\n")
        assert main(["simulate", "--config", str(bad)]) == EXIT_CONFIG
        assert "unknown key" in capsys.readouterr().err
        assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
        assert main(["simulate", "--scheme", "euler"]) == EXIT_CONFIG
        assert main(["simulate", "--dt", "0.3"]) == EXIT_CONFIG
        assert main(["ensemble", "--workers", "0"]) == EXIT_CONFIG

    def test_divergence_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "blow.cfg"
        cfg.write_text("T0 = 8\ndt = 0.25\nic_amplitude = 1e4\ngamma_sq = 0\nch_samples = 30\n")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_DIVERGED

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as err:
            build_parser().parse_args(["fly"])
        assert err.value.code == 2

    def test_module_entry_point(self, cfg_file):
        res = subprocess.run([sys.executable, "-m", "stochbbm", "estimate-ch", "--config",
                              str(cfg_file)], capture_output=True, text=True)
        assert res.returncode == 0 and "C_H" in res.stdout
