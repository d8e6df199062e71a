import json
import subprocess
import sys

import pytest

from jacobi0.cli import dumps, main, parse_complex


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("i", 1j), ("2i", 2j), ("0.5+i", 0.5 + 1j), ("-0.15+0.05i", -0.15 + 0.05j),
        ("0.1", 0.1), ("-i", -1j), ("1e-3+2i", 0.001 + 2j), ("0.3-0.2i", 0.3 - 0.2j),
    ])
    def test_complex(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize("text", ["", "abc", "1+2", "i+1x"])
    def test_bad_complex(self, text):
        with pytest.raises(ValueError):
            parse_complex(text)

    def test_canonical_floats(self):
        assert dumps({"a": 0.1, "b": [1.0, 2], "c": True}) == '{"a": 0.10000000000000001, "b": [1.0, 2], "c": true}'


class TestCommands:
    def test_expand_sigma(self, capsys):
        code, out, _ = run(capsys, "expand", "sigma", "--trunc", "5", "--output", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "biseries" and doc["N"] == 5
        row4 = {t["r"]: int(t["num"]) for t in doc["terms"] if t["n"] == 4}
        assert row4 == {-2: 3, -1: -22, 0: 51, 1: -51, 2: 22, 3: -3}

    def test_zeros(self, capsys):
        code, out, _ = run(capsys, "zeros", "--form", "sigma", "--tau", "i")
        assert code == 0
        assert json.loads(out)["count"] == 1

    def test_zeros_square(self, capsys):
        code, out, _ = run(capsys, "zeros", "--form", "sigma2", "--tau", "0.5+i")
        assert code == 0 and json.loads(out)["count"] == 2

    def test_verify_legendre(self, capsys):
        code, out, _ = run(capsys, "verify", "legendre", "--grid", "default")
        assert code == 0
        reports = json.loads(out)
        assert all(r["pass"] and r["max_abs_deviation"] < 1e-9 for r in reports)

    def test_verify_suite_flag_and_pretty(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "filtration", "--output", "pretty")
        assert code == 0
        assert out.count("PASS") == 3

    def test_verify_failure_exit_code(self, capsys):
        code, out, _ = run(capsys, "verify", "legendre", "--tol", "1e-30")
        assert code == 1
        assert json.loads(out)[0]["pass"] is False

    def test_precision_env(self, capsys, monkeypatch):
        monkeypatch.setenv("JACOBI0_PRECISION", "1e-30")
        assert run(capsys, "verify", "legendre")[0] == 1
        monkeypatch.setenv("JACOBI0_PRECISION", "-1")
        assert run(capsys, "verify", "legendre")[0] == 2

    def test_custom_grid(self, capsys):
        code, out, _ = run(capsys, "verify", "legendre", "--grid", "i;3i")
        assert code == 0 and json.loads(out)[0]["samples"] == 2

    def test_klein(self, capsys):
        code, out, _ = run(capsys, "klein", "--X", "1/2,0", "--trunc", "4")
        assert code == 0
        entry = json.loads(out)[0]
        assert entry["ord"] == "-1/8"
        assert entry["series"]["kind"] == "fracqseries" and entry["series"]["D"] == 8

    def test_klein_dual_values(self, capsys):
        code, out, _ = run(capsys, "klein", "--X", "1/3,1/3", "--tau", "2i")
        assert code == 0 and json.loads(out)[0]["deviation"] < 1e-9

    def test_phix_modularity(self, capsys):
        code, out, _ = run(capsys, "phix", "sigma", "--X", "1/2,0", "--matrix", "1,8,0,1",
                           "--matrix", "1,1,0,1")
        assert code == 0
        entry = json.loads(out)[0]
        assert [m["member"] for m in entry["matrices"]] == [True, False]
        assert entry["report"]["pass"]

    def test_eval(self, capsys):
        code, out, _ = run(capsys, "eval", "sigma", "--tau", "i", "--z", "0.1", "--matrix", "0,-1,1,0")
        assert code == 0
        re_, im_ = json.loads(out)[0]["value"]
        assert abs(re_ - 0.09999212174834075) < 1e-12 and abs(im_) < 1e-12

    def test_classify(self, capsys):
        code, out, _ = run(capsys, "classify", "sigma")
        assert code == 0 and json.loads(out)["filtration_index"] == 2

    def test_classify_short_window(self, capsys):
        code, out, _ = run(capsys, "classify", "sigma", "--trunc", "1")
        assert code == 1 and json.loads(out)["filtration_index"] is None

    def test_embed(self, capsys):
        code, out, _ = run(capsys, "embed", "sigma", "--m", "2")
        assert code == 0
        assert [c["ord"] for c in json.loads(out)] == ["15/8", "17/9"]

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "expand", "sigma", "--trunc", "1", "--output", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,r,num,den"
        assert len(lines) == 1 + 6


class TestUsageErrors:
    @pytest.mark.parametrize("argv", [
        ["klein", "--X", "0.5,0"],
        ["zeros", "--tau", "-i"],
        ["zeros", "--tau", "0.5"],
        ["verify", "nonsense"],
        ["expand", "nosuchform"],
        ["phix", "sigma", "--X", "1/2,0", "--matrix", "1,1,1,1"],
        ["expand", "sigma", "--trunc", "0"],
        ["eval", "sigma"],
        [],
    ])
    def test_exit_two(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


def test_console_script_is_deterministic():
    cmd = [sys.executable, "-m", "jacobi0.cli", "verify", "all"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == 0
    assert a.stdout == b.stdout
    assert len(json.loads(a.stdout)) > 20
