import io
import json
import math
import subprocess
import sys

import pytest

from quadham.cli import run


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, json.loads(buf.getvalue())


@pytest.fixture
def model(models_dir):
    return lambda name: str(models_dir / f"{name}.json")


class TestCommands:
    def test_simulate_oscillator(self, model, tmp_path):
        code = run(["simulate", "--model", model("m_reg"), "--initial", "[1, 0]", "--t-end", "1",
                    "--step", "1e-3", "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert rows[0] == "t,q1,p1"
        t, q1, p1 = map(float, rows[-1].split(","))
        assert t == 1.0 and abs(q1 - math.cos(1)) <= 1e-6
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema"] == 1 and report["status"] == "pass" and report["seed"] == 0

    def test_kt_deg2(self, model):
        code, rep = invoke("kt", "--model", model("m_deg2"), "--K", "4", "--D", "2")
        assert code == 0 and rep["nilpotency"]["pass"]
        top = [h for h in rep["homology"] if h["D"] == 2]
        assert top[0]["h_dim"] == top[0]["oracle"] == 3
        assert top[1]["k"] == 1 and top[1]["h_dim"] == 0
        assert rep["differential"]["c[1,2]"] == "(1/2)*c[1,1]^1 + (1/2)*c[2,1]^1"

    def test_validate_rank_varying(self, model):
        code, rep = invoke("validate", "--model", model("rank_varying"))
        assert code == 1
        assert rep["failure"]["type"] == "ConstantRankError"

    def test_validate_ok(self, model):
        code, rep = invoke("validate", "--model", model("m_deg2"))
        assert code == 0 and rep["validation"]["rank"] == 1

    def test_split(self, model):
        code, rep = invoke("split", "--model", model("m_deg1"), "--sigma1", "[[0, 0], [0, 1]]")
        assert code == 0
        assert rep["hamiltonian"] == "(1/2)*p1^2 + p2^2"
        assert rep["association"]["weak"]["max_residual"] == 0
        assert rep["association"]["full"]["max_residual"] > 0.1

    def test_split_upsilon(self, model):
        code, rep = invoke("split", "--model", model("m_deg1"), "--upsilon",
                           '[0, [{"coeff": "1", "exps": [0, 1, 0]}]]')
        assert code == 0 and rep["connection"] == ["0", "q1"]

    def test_classify(self, model):
        code, rep = invoke("classify", "--model", model("m_deg1_potential"))
        assert code == 0
        assert rep["algorithm"]["chain"] == [["p2"], ["p2", "q2"]]
        assert rep["classification"]["tags"] == ["second", "second"]

    def test_lagrange_check(self, model):
        code, rep = invoke("lagrange-check", "--model", model("m_deg1"), "--initial", "[0.5, 0.2, 1, 0]")
        assert code == 0 and rep["lagrange_residual"] <= 1e-4

    def test_lagrange_check_off_constraint(self, model):
        code, rep = invoke("lagrange-check", "--model", model("m_deg1"), "--initial", "[0, 0, 1, 1]")
        assert code == 1 and rep["drift"] == 1.0 and rep["constrained_residual"] is None

    def test_simulate_drift_failure(self, model):
        code, rep = invoke("simulate", "--model", model("m_deg2"), "--initial", "[0, 0, 1, 0]")
        assert code == 1 and rep["status"] == "fail"

    def test_brst(self, model):
        code, rep = invoke("brst", "--model", model("m_deg1"), "--K", "1")
        assert code == 0 and rep["charge"] == "p2*cb[2,1]^1"
        assert rep["verification"]["pass"]


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["simulate", "--model", "MODEL", "--initial", "[1, 0]", "--step", "-1"],
            ["simulate", "--model", "MODEL", "--initial", "[1]"],
            ["simulate", "--model", "MODEL", "--initial", "not json"],
            ["kt", "--model", "MODEL", "--K", "0"],
            ["kt", "--model", "MODEL", "--D", "-1"],
            ["frobnicate", "--model", "MODEL"],
            ["validate"],
            ["validate", "--model", "MODEL", "--grid", "[[0]]"],
        ],
    )
    def test_usage(self, argv, model):
        argv = [model("m_reg") if a == "MODEL" else a for a in argv]
        code, rep = invoke(*argv)
        assert code == 2 and rep["status"] == "error" and rep["schema"] == 1

    def test_missing_model(self, tmp_path):
        code, rep = invoke("validate", "--model", str(tmp_path / "nope.json"))
        assert code == 2 and rep["error"]["type"] == "ModelError"

    def test_bad_sigma1(self, model):
        code, rep = invoke("split", "--model", model("m_deg1"), "--sigma1", "[[1, 0], [0, 0]]")
        assert code == 2 and rep["error"]["type"] == "InvalidSigmaError"

    def test_pointwise_model_rejected_for_symbolic_commands(self, model):
        code, rep = invoke("kt", "--model", model("rank_varying"), "--grid", "[[0, 1], [1, 1]]")
        assert code == 2


class TestDeterminism:
    @pytest.mark.parametrize("cmd", [["kt", "--D", "1"], ["brst"], ["classify"], ["split"]])
    def test_byte_identical(self, cmd, model, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / str(i)
            assert run([cmd[0], "--model", model("m_deg2"), "--seed", "7", "--out", str(out), *cmd[1:]]) in (0, 1)
            outs.append((out / "report.json").read_bytes())
        assert outs[0] == outs[1]
        assert json.loads(outs[0])["seed"] == 7

    def test_module_entry_point(self, model):
        proc = subprocess.run([sys.executable, "-m", "quadham", "validate", "--model", model("rank_varying")],
                              capture_output=True, text=True)
        assert proc.returncode == 1
        assert json.loads(proc.stdout)["status"] == "fail"
