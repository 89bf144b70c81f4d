import csv
import json
import re

import pytest

from wfqae.cli import EXIT_BAD_INPUT, EXIT_INVARIANT, EXIT_OK, main
from wfqae.config import load_experiment, parse_experiment

KICKED = """\
name: kicked
model: "1 Z"
controls: ["1 X"]
mode: falqon
depth: 3
weights: [1.0]
alpha_init: [5.0]
initial_states: ["1"]
"""


def write_config(tmp_path, text, name="exp.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.fixture(scope="module")
def lih_run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("lih")
    assert main(["run", "lih-wfqae", "-o", str(out), "--dump-states"]) == EXIT_OK
    return out


class TestRun:
    def test_writes_artifacts(self, lih_run_dir):
        for name in ("trace.csv", "circuit.yaml", "report.json", "config.yaml"):
            assert (lih_run_dir / name).is_file()
        assert sorted(p.name for p in lih_run_dir.glob("state_q*.csv")) == [
            "state_q0.csv", "state_q1.csv", "state_q2.csv", "state_q3.csv",
        ]

    def test_report_fidelities(self, lih_run_dir):
        report = json.loads((lih_run_dir / "report.json").read_text())
        assert report["depth"] == 20
        assert all(reg["final_fidelity"] > 0.75 for reg in report["registers"])
        assert report["lyapunov_breaches"] == 0

    def test_config_echo_reloads(self, lih_run_dir):
        echoed = load_experiment(lih_run_dir / "config.yaml")
        expected = load_experiment("lih-wfqae")
        expected.output_dir = str(lih_run_dir)
        assert echoed == expected

    def test_increasing_weights_rejected(self, tmp_path, capsys):
        text = load_experiment("lih-wfqae").to_yaml().replace("[8.0, 6.0, 4.0, 2.0]", "[2.0, 4.0, 6.0, 8.0]")
        assert main(["run", write_config(tmp_path, text), "-o", str(tmp_path / "out")]) == EXIT_BAD_INPUT
        assert "w_q > w_j" in capsys.readouterr().out
        assert not (tmp_path / "out").exists()

    def test_depth_zero_rejected(self, tmp_path):
        path = write_config(tmp_path, KICKED.replace("depth: 3", "depth: 0"))
        assert main(["run", path, "-o", str(tmp_path / "out")]) == EXIT_BAD_INPUT

    def test_unknown_preset(self):
        assert main(["run", "no-such-preset"]) == EXIT_BAD_INPUT

    def test_lyapunov_breach_counted(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", write_config(tmp_path, KICKED), "-o", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["lyapunov_breaches"] >= 1

    def test_lyapunov_breach_fatal_when_strict(self, tmp_path):
        path = write_config(tmp_path, KICKED)
        assert main(["run", path, "-o", str(tmp_path / "out"), "--strict"]) == EXIT_INVARIANT

    def test_verbose_prints_layers(self, tmp_path, capsys):
        assert main(["-v", "run", write_config(tmp_path, KICKED), "-o", str(tmp_path / "out")]) == EXIT_OK
        line = next(row for row in capsys.readouterr().out.splitlines() if row.strip().startswith("k=  3"))
        with open(tmp_path / "out" / "trace.csv", newline="") as f:
            last = list(csv.DictReader(f))[-1]
        assert line.split("fidelities: ")[1] == last["fidelity_0"]
        assert line.split("V=")[1].split()[0] == last["lyapunov"]


class TestSpectrum:
    def test_inline_model(self, capsys):
        assert main(["spectrum", "1 Z"]) == EXIT_OK
        out = capsys.readouterr().out
        values = re.findall(r"^\s+\d+\s+(\S+)\s+\d+", out, flags=re.MULTILINE)
        assert [float(v) for v in values] == [-1.0, 1.0]

    def test_identity_model_is_one_group(self, capsys):
        assert main(["spectrum", "2 II"]) == EXIT_OK
        assert "4 eigenvalues in 1 degeneracy groups" in capsys.readouterr().out

    def test_lih(self, capsys):
        assert main(["spectrum", "lih-sto6g-R2.5"]) == EXIT_OK
        assert "-7.86222" in capsys.readouterr().out

    def test_bad_model(self):
        assert main(["spectrum", "1 Q"]) == EXIT_BAD_INPUT

    @pytest.mark.parametrize("model", ["inf Z; 1 X", "nan Z; 1 X"])
    def test_non_finite_coefficients_rejected(self, model, capsys):
        assert main(["spectrum", model]) == EXIT_BAD_INPUT
        assert "not finite" in capsys.readouterr().out

    def test_negative_seed_rejected(self):
        assert main(["spectrum", "random:2:3", "--seed", "-1"]) == EXIT_BAD_INPUT


class TestReplay:
    def test_matches_run(self, lih_run_dir, capsys):
        report = json.loads((lih_run_dir / "report.json").read_text())
        circuit = str(lih_run_dir / "circuit.yaml")
        assert main(["replay", circuit, "--state=-++", "--state=--+"]) == EXIT_OK
        energies = [float(e) for e in re.findall(r"energy (\S+)", capsys.readouterr().out)]
        expected = [reg["final_energy"] for reg in report["registers"][:2]]
        assert energies == pytest.approx(expected, abs=1e-9)

    def test_wrong_qubit_count(self, lih_run_dir):
        assert main(["replay", str(lih_run_dir / "circuit.yaml"), "--state=01"]) == EXIT_BAD_INPUT

    def test_missing_file(self, tmp_path):
        assert main(["replay", str(tmp_path / "absent.yaml"), "--state=0"]) == EXIT_BAD_INPUT


class TestConfigCommands:
    def test_config_echo(self, capsys):
        assert main(["config", "lih-pth"]) == EXIT_OK
        assert parse_experiment(capsys.readouterr().out) == load_experiment("lih-pth")

    def test_config_to_file(self, tmp_path):
        target = tmp_path / "mine.yaml"
        assert main(["config", "lih-falqon", "-o", str(target)]) == EXIT_OK
        assert load_experiment(target) == load_experiment("lih-falqon")

    def test_presets(self, capsys):
        assert main(["presets"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("lih-wfqae", "lih-wfqae-basis", "lih-pth", "lih-falqon", "lih-sto6g-R2.5"):
            assert name in out

    def test_no_command_prints_help(self, capsys):
        assert main([]) == EXIT_OK
        assert "usage" in capsys.readouterr().out.lower()
