import json

import numpy as np
import pytest
from click.testing import CliRunner

from stablevar import Trajectory
from stablevar.cli import main
from stablevar.io import read_results, read_trajectory, write_trajectory


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, *args):
    return runner.invoke(main, [str(a) for a in args])


class TestSimulate:
    def test_shape(self, runner, tmp_path):
        out = tmp_path / "y.csv"
        r = _invoke(runner, "simulate", "--k", 0, "--T", 24, "--seed", 1, "--out", out)
        assert r.exit_code == 0, r.output
        assert read_trajectory(out).y.shape == (25, 6)

    def test_t_mult(self, runner, tmp_path):
        out = tmp_path / "y.csv"
        r = _invoke(runner, "simulate", "--t-mult", 100, "--out", out, "--no-header")
        assert r.exit_code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 601 and len(lines[0].split(",")) == 6

    def test_deterministic(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            _invoke(runner, "simulate", "--T", 50, "--seed", 7, "--out", p)
        assert a.read_bytes() == b.read_bytes()

    def test_needs_exactly_one_length(self, runner, tmp_path):
        r = _invoke(runner, "simulate", "--out", tmp_path / "y.csv")
        assert r.exit_code == 2
        r = _invoke(runner, "simulate", "--T", 5, "--t-mult", 4, "--out", tmp_path / "y.csv")
        assert r.exit_code == 2

    def test_unwritable(self, runner, tmp_path):
        r = _invoke(runner, "simulate", "--T", 5, "--out", tmp_path / "missing" / "y.csv")
        assert r.exit_code == 2


class TestEstimate:
    @pytest.fixture
    def data(self, runner, tmp_path):
        path = tmp_path / "y.csv"
        _invoke(runner, "simulate", "--T", 216, "--seed", 3, "--out", path)
        return path

    def test_rfb(self, runner, data):
        r = _invoke(runner, "estimate", data, "--method", "rfb", "--rank", 3)
        assert r.exit_code == 0, r.output
        d = json.loads(r.stdout)
        assert d["method"] == "RFB" and d["rank"] == 3 and d["n"] == 6
        assert d["spectral_radius"] < 1
        assert len(d["f_hat"]) == 36

    def test_rls_to_file(self, runner, data, tmp_path):
        out = tmp_path / "est.json"
        r = _invoke(runner, "estimate", data, "--method", "rls", "--rank", 2, "--out", out)
        assert r.exit_code == 0
        d = json.loads(out.read_text())
        assert "q_hat" in d and d["rank"] == 2

    def test_fb_default_rank(self, runner, data):
        d = json.loads(_invoke(runner, "estimate", data, "--method", "fb").stdout)
        assert d["method"] == "FB11" and d["rank"] == 6

    def test_ls_noiseless(self, runner, tmp_path, rng):
        F = np.array([[0.5, 0.2], [-0.1, 0.8]])
        y = [rng.standard_normal(2)]
        for _ in range(10):
            y.append(F @ y[-1])
        path = tmp_path / "clean.csv"
        write_trajectory(Trajectory(y=np.array(y)), path)
        d = json.loads(_invoke(runner, "estimate", path, "--method", "ls").stdout)
        np.testing.assert_allclose(np.reshape(d["f_hat"], (2, 2)), F, atol=1e-8)

    def test_missing_file(self, runner, tmp_path):
        r = _invoke(runner, "estimate", tmp_path / "nope.csv", "--method", "ls")
        assert r.exit_code == 2

    def test_malformed_file(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3\n")
        r = _invoke(runner, "estimate", path, "--method", "ls")
        assert r.exit_code == 2
        assert "line 2" in r.output

    @pytest.mark.parametrize("args", [["--method", "rfb", "--rank", 0],
                                      ["--method", "rfb", "--rank", 7],
                                      ["--method", "ls", "--rank", 3],
                                      ["--method", "ridge"]])
    def test_usage_errors(self, runner, data, args):
        assert _invoke(runner, "estimate", data, *args).exit_code == 2

    def test_singular_data_is_numerical_failure(self, runner, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text("1,1\n2,2\n3,3\n4,4\n")
        r = _invoke(runner, "estimate", path, "--method", "rfb", "--rank", 1)
        assert r.exit_code == 1
        assert "numerical failure" in r.output

    def test_short_data_warns(self, runner, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("1,0,0\n0,1,0\n")
        r = _invoke(runner, "estimate", path, "--method", "ls")
        assert "warning" in r.stderr


class TestReproduce:
    def test_low(self, runner, tmp_path):
        r = _invoke(runner, "reproduce-low", "--repeats", 3, "--out", tmp_path)
        assert r.exit_code == 0, r.output
        for T in (24, 216, 600):
            rows = read_results(tmp_path / f"results_T{T}.csv")
            assert len(rows) == 12
            assert [r["seed"] for r in rows[::4]] == [0, 1, 2]
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["init"] == "zero" and len(summary["cells"]) == 3
        assert (tmp_path / "poles.csv").exists()
        assert "RFB" in r.output

    def test_high(self, runner, tmp_path):
        r = _invoke(runner, "reproduce-high", "--k-range", "0-1", "--t-mult", 4,
                    "--repeats", 2, "--out", tmp_path)
        assert r.exit_code == 0, r.output
        assert (tmp_path / "results_k1_T48.csv").exists()
        assert (tmp_path / "timing.csv").exists()
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert set(summary["timing_slope"]) == {"RLS", "RFB"}
        assert "timing slope" in r.output

    def test_high_needs_full_for_large_k(self, runner, tmp_path):
        r = _invoke(runner, "reproduce-high", "--k-range", "8", "--out", tmp_path)
        assert r.exit_code == 2
        assert "full" in r.output

    def test_bad_k_range(self, runner, tmp_path):
        r = _invoke(runner, "reproduce-high", "--k-range", "a-b", "--out", tmp_path)
        assert r.exit_code == 2


def test_bench(runner, tmp_path):
    out = tmp_path / "bench.csv"
    r = _invoke(runner, "bench", "--n", "6,12", "--t-mult", 4, "--repeats", 1, "--out", out)
    assert r.exit_code == 0, r.output
    lines = out.read_text().splitlines()
    assert lines[0] == "n,T,task,seconds"
    assert any("simulate[python]" in x for x in lines)
    assert any("fit_rfb" in x for x in lines)


def test_version(runner):
    r = _invoke(runner, "--version")
    assert r.exit_code == 0 and "0.1.0" in r.output
