import json
import subprocess
import sys

import pytest

import shl
from shl import cli
from shl.cli import ExperimentConfig, entry
from shl.report import CheckResult


def run_cli(args, tmp_path, name="out"):
    prefix = tmp_path / name
    code = entry(args + ["--out", str(prefix)])
    return code, prefix


def load_json(prefix):
    with open(f"{prefix}.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestTightnessCommand:
    def test_single_cell_exact_equality(self, tmp_path, capsys):
        code, prefix = run_cli(
            ["tightness", "--L", "1", "--h", "0.1", "--N", "2", "--q", "2", "--v", "1"],
            tmp_path,
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS srt[L=1,h=0.1,N=2,q=2,v=1]" in out
        assert "wrote" in out
        report = load_json(prefix)
        assert set(report) == {"command", "params", "checks", "seed", "version"}
        assert report["command"] == "tightness"
        assert report["version"] == shl.__version__
        (check,) = report["checks"]
        assert check["pass"] is True
        assert check["lhs"] == pytest.approx(2.7624309392265194, rel=1e-13)
        assert check["lhs"] == pytest.approx(check["rhs"], rel=1e-10)

    def test_grid_runs_and_csv_header(self, tmp_path):
        code, prefix = run_cli(
            ["tightness", "--L", "0.5,1", "--h", "0.01", "--N", "1,5", "--q", "1,2", "--v", "0.5"],
            tmp_path,
        )
        assert code == 0
        lines = open(f"{prefix}.csv", encoding="utf-8").read().splitlines()
        assert lines[0] == "L,h,N,q,v,exact,bound,rel_err"
        assert len(lines) == 1 + 2 * 2 * 2  # header + grid cells

    def test_figure_rendered_by_default(self, tmp_path):
        _, prefix = run_cli(["tightness", "--N", "2"], tmp_path)
        assert (tmp_path / "out_relerr.png").exists()

    def test_no_figures_flag(self, tmp_path):
        _, prefix = run_cli(["tightness", "--N", "2", "--no-figures"], tmp_path)
        assert not list(tmp_path.glob("*.png"))

    def test_step_size_validation(self, tmp_path, capsys):
        code, _ = run_cli(["tightness", "--h", "-3"], tmp_path)
        assert code == 2
        assert "need 0 < h < 1/L" in capsys.readouterr().err

    def test_byte_determinism(self, tmp_path):
        _, p1 = run_cli(["tightness", "--N", "2,5"], tmp_path, "a")
        _, p2 = run_cli(["tightness", "--N", "2,5"], tmp_path, "b")
        assert open(f"{p1}.json", "rb").read() == open(f"{p2}.json", "rb").read()
        assert open(f"{p1}.csv", "rb").read() == open(f"{p2}.csv", "rb").read()

    def test_worker_count_independence(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SHL_THREADS", "1")
        _, p1 = run_cli(["tightness", "--N", "1,2,5"], tmp_path, "serial")
        monkeypatch.setenv("SHL_THREADS", "4")
        _, p2 = run_cli(["tightness", "--N", "1,2,5"], tmp_path, "pooled")
        assert open(f"{p1}.json", "rb").read() == open(f"{p2}.json", "rb").read()


class TestScheduleCommand:
    def test_discrete(self, tmp_path, capsys):
        code, prefix = run_cli(["schedule", "--mode", "discrete", "--N", "6"], tmp_path)
        assert code == 0
        report = load_json(prefix)
        names = [c["name"] for c in report["checks"]]
        assert "cost_matches_closed_form" in names
        assert "matches_bruteforce_oracle" in names
        lines = open(f"{prefix}.csv", encoding="utf-8").read().splitlines()
        assert lines[0] == "n,a_n"
        assert len(lines) == 1 + 7  # a_0 .. a_6

    def test_continuous(self, tmp_path):
        code, prefix = run_cli(["schedule", "--mode", "continuous", "--L", "1", "--T", "1"], tmp_path)
        assert code == 0
        report = load_json(prefix)
        assert all(c["pass"] for c in report["checks"])
        lines = open(f"{prefix}.csv", encoding="utf-8").read().splitlines()
        assert lines[0] == "t,a_t"
        assert len(lines) == 1 + 201

    def test_mode_validation(self, tmp_path, capsys):
        code, _ = run_cli(["schedule", "--mode", "surprise"], tmp_path)
        assert code == 2
        assert "mode" in capsys.readouterr().err


class TestBoundsTableCommand:
    def test_default_grid(self, tmp_path):
        code, prefix = run_cli(["bounds-table"], tmp_path)
        assert code == 0
        report = load_json(prefix)
        names = [c["name"] for c in report["checks"]]
        assert any(n.startswith("duality[") for n in names)
        assert any(n.startswith("harnack_roundtrip[") for n in names)
        assert any(n.startswith("langevin_consistency[") for n in names)
        assert all(c["pass"] for c in report["checks"])
        # the stationary column serializes as the string "inf"
        assert "inf" in report["params"]["t"]

    def test_rows_cover_kinds(self, tmp_path):
        _, prefix = run_cli(["bounds-table", "--q", "2", "--t", "1"], tmp_path)
        text = open(f"{prefix}.csv", encoding="utf-8").read()
        for kind in ("SRT_q", "SH_p", "SH_log", "LGE", "SRT_1"):
            assert kind in text


class TestFpverifyCommand:
    def test_srt_mode_quick(self, tmp_path):
        code, prefix = run_cli(
            ["fpverify", "--t", "0.5", "--n-points", "2048", "--q", "1,2"], tmp_path
        )
        assert code == 0
        report = load_json(prefix)
        names = [c["name"] for c in report["checks"]]
        assert names == ["srt[q=1]", "srt[q=2]"]
        assert all(c["pass"] for c in report["checks"])
        assert report["extras"]["beta"] == pytest.approx(1.0, rel=1e-6)
        lines = open(f"{prefix}.csv", encoding="utf-8").read().splitlines()
        assert lines[0] == "x,density"
        assert len(lines) == 1 + 2048

    def test_all_modes(self, tmp_path):
        code, prefix = run_cli(
            [
                "fpverify",
                "--potential",
                "x^2/2 + 0.1*sin(x)",
                "--beta",
                "1.1",
                "--x0",
                "0.3",
                "--t",
                "0.5",
                "--modes",
                "all",
                "--n-points",
                "2048",
            ],
            tmp_path,
        )
        assert code == 0
        report = load_json(prefix)
        names = [c["name"] for c in report["checks"]]
        assert "srt[q=1]" in names and "sh_p[p=2]" in names
        assert "sh_log" in names and "lge" in names
        assert all(c["pass"] for c in report["checks"])

    def test_grammar_rejection(self, tmp_path, capsys):
        code, _ = run_cli(["fpverify", "--potential", "log(x)"], tmp_path)
        assert code == 2
        assert "outside the grammar" in capsys.readouterr().err

    def test_unknown_mode(self, tmp_path, capsys):
        code, _ = run_cli(["fpverify", "--modes", "srt,magic"], tmp_path)
        assert code == 2


class TestScoreCommand:
    def test_gaussian_quick(self, tmp_path):
        code, prefix = run_cli(
            ["score", "--n", "20000", "--lambdas=-0.5,0.5", "--deltas", "0.5,0.1"],
            tmp_path,
        )
        assert code == 0
        report = load_json(prefix)
        names = [c["name"] for c in report["checks"]]
        assert "score_mean_near_zero" in names
        assert any(n.startswith("mgf[") for n in names)
        assert all(c["pass"] for c in report["checks"])
        assert report["extras"]["method"] == "exact_gaussian"
        assert report["extras"]["tail"]["fitted_C"] > 0.0

    def test_expression_target(self, tmp_path):
        code, prefix = run_cli(
            [
                "score",
                "--potential",
                "x^2/2 + 0.1*sin(x)",
                "--beta",
                "1.1",
                "--n",
                "20000",
                "--lambdas",
                "0.5",
                "--deltas",
                "0.5",
            ],
            tmp_path,
        )
        assert code == 0
        report = load_json(prefix)
        assert report["extras"]["method"] == "inverse_cdf_1d"

    def test_dimension_guard_for_expressions(self, tmp_path, capsys):
        code, _ = run_cli(
            ["score", "--potential", "x^2/2", "--d", "2", "--n", "20000"], tmp_path
        )
        assert code == 2


class TestCouplingCommand:
    def test_both_kinds(self, tmp_path):
        code, prefix = run_cli(["coupling", "--instances", "3"], tmp_path)
        assert code == 0
        report = load_json(prefix)
        names = [c["name"] for c in report["checks"]]
        assert any(n.startswith("composition[") for n in names)
        assert any(n.startswith("convexity[") for n in names)
        assert all(c["pass"] for c in report["checks"])

    def test_size_bounds(self, tmp_path, capsys):
        code, _ = run_cli(["coupling", "--size", "9"], tmp_path)
        assert code == 2


class TestDualsdCommand:
    def test_cases_covered(self, tmp_path):
        code, prefix = run_cli(["dualsd", "--instances", "8"], tmp_path)
        assert code == 0
        text = open(f"{prefix}.csv", encoding="utf-8").read()
        assert "standard" in text and "dual" in text
        report = load_json(prefix)
        assert all(c["pass"] for c in report["checks"])


class TestConfigHandling:
    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# grid\nL = 2\nh = 0.01\nN = 5\nq = 4\nv = 0.5\nseed = 3\n",
            encoding="utf-8",
        )
        prefix = tmp_path / "out"
        code = entry(
            ["tightness", "--config", str(cfg), "--q", "2", "--out", str(prefix)]
        )
        assert code == 0
        report = load_json(prefix)
        assert report["params"]["q"] == [2.0]  # flag wins
        assert report["params"]["L"] == [2.0]  # file applies
        assert report["seed"] == 3

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("banana = 1\n", encoding="utf-8")
        code = entry(["tightness", "--config", str(cfg)])
        assert code == 2
        assert "unknown key" in capsys.readouterr().err

    def test_malformed_config_line(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("L 2\n", encoding="utf-8")
        code = entry(["tightness", "--config", str(cfg)])
        assert code == 2
        assert "run.cfg:1" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        code = entry(["tightness", "--config", str(tmp_path / "nope.cfg")])
        assert code == 2

    def test_bad_flag_type(self, tmp_path, capsys):
        code = entry(["tightness", "--N", "two"])
        assert code == 2
        assert "bad value for --N" in capsys.readouterr().err

    def test_no_command_prints_help(self, capsys):
        assert entry([]) == 2
        assert "usage" in capsys.readouterr().out.lower()

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            entry(["tightness", "--banana", "1"])
        assert exc.value.code == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            entry(["--version"])
        assert exc.value.code == 0
        assert shl.__version__ in capsys.readouterr().out

    def test_experiment_config_rejects_unknown_parameter(self):
        with pytest.raises(cli.ConfigError):
            ExperimentConfig("tightness", {"banana": 1}, "x")
        with pytest.raises(cli.ConfigError):
            ExperimentConfig("banana", {}, "x")


class TestFailurePath:
    def test_failing_check_returns_one(self, tmp_path, monkeypatch, capsys):
        def fake_runner(params, seed):
            out = cli._Outcome()
            out.header = ["a"]
            out.rows = [[1.0]]
            out.checks = [
                CheckResult("always_fails", 2.0, 1.0, False),
                CheckResult("fine", 0.0, 1.0, True),
            ]
            return out

        monkeypatch.setitem(cli._RUNNERS, "tightness", fake_runner)
        code = entry(["tightness", "--out", str(tmp_path / "f")])
        assert code == 1
        captured = capsys.readouterr()
        assert "FAIL always_fails" in captured.out
        assert "PASS fine" in captured.out
        assert "1 check(s) failed" in captured.err
        report = load_json(tmp_path / "f")
        assert [c["pass"] for c in report["checks"]] == [False, True]


def test_module_invocation_smoke():
    proc = subprocess.run(
        [sys.executable, "-m", "shl", "--version"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert "shl" in proc.stdout
