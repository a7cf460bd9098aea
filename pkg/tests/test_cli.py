import csv
import io
import json

import numpy as np
import pytest

from hybridconv import cli, numeric
from hybridconv.cli import UsageError, main, parse_args, run_bench
from hybridconv.formats import PnmImage, parse_timing_text, read_pnm, write_pnm
from hybridconv.tuner import RecordCache


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    status = main(argv, out, err)
    return status, out.getvalue(), err.getvalue()


def test_parse_tune_invocation():
    inv = parse_args(["tune", "-Lx=512", "-Ly=32", "-Mx=1024", "-My=64", "-T=1"])
    assert inv.subcommand == "tune"
    assert {k: inv.flags[k] for k in ("Lx", "Ly", "Mx", "My", "T")} == \
        {"Lx": 512, "Ly": 32, "Mx": 1024, "My": 64, "T": 1}


def test_parse_multiples_and_defaults():
    inv = parse_args(["multiples", "-bound=10"])
    assert inv.subcommand == "multiples" and inv.flags["bound"] == 10
    inv = parse_args(["conv1d", "-Lx=3", "-Ly=5", "-lambda=2"])
    assert inv.flags["lam"] == 2 and inv.flags["R"] == 2 and inv.flags["T"] == 1


@pytest.mark.parametrize("argv", [
    ["conv1d", "-Lx=abc"],
    ["conv1d", "-Lx=3"],
    ["tune", "-Lx=512", "-Ly=32", "-Mx=1024"],
    ["tune", "-Lx=0", "-Ly=32", "-Mx=1024", "-My=64"],
    ["conv1d", "-Lx=3", "-Ly=4", "-bogus=1"],
    ["conv1d", "-L=3", "-Ly=4"],
    ["fly"],
    [],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)
    status, out, err = run(argv)
    assert status == 1 and "usage" in err and out == ""


def test_multiples_output():
    status, out, _ = run(["multiples", "-bound=20"])
    assert status == 0
    assert out.split() == "1 2 3 4 5 6 7 8 9 10 12 14 15 16 18 20".split()


def test_conv1d_from_file(tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps({"f": [1, 2], "g": [1, 2, 3, 4]}))
    dst = tmp_path / "out.json"
    status, out, _ = run(["conv1d", f"-in={src}", f"-out={dst}", "-m=2", "-lambda=2"])
    assert status == 0
    h = np.array([complex(*v) if isinstance(v, list) else v for v in json.loads(dst.read_text())["h"]])
    np.testing.assert_allclose(h, [1, 4, 7, 10, 8], atol=1e-12)


def test_conv2d_reports_error(tmp_path):
    dst = tmp_path / "h.npy"
    status, out, _ = run(["conv2d", "-Lx=3", "-Ly=6", "-m=2", f"-out={dst}"])
    assert status == 0 and "relative L2 error" in out
    # -Lx is the width, -Ly the height
    assert np.load(dst).shape == (11, 5)


def test_runtime_error_exit_code(tmp_path):
    status, _, err = run(["image", f"-in={tmp_path / 'missing.pgm'}", f"-out={tmp_path / 'o.pgm'}"])
    assert status == 2 and "error" in err


def test_image_identity(tmp_path):
    rng = np.random.default_rng(3)
    a = rng.integers(0, 256, size=(16, 12), dtype=np.uint8)
    src, dst = tmp_path / "a.pgm", tmp_path / "b.pgm"
    write_pnm(PnmImage.from_array(a), src)
    assert run(["image", f"-in={src}", f"-out={dst}", "-kernel=identity"])[0] == 0
    assert np.abs(read_pnm(dst).to_array().astype(int) - a).max() <= 1


def test_tune_parse_back(tmp_path):
    cache = tmp_path / "rec"
    status, out, _ = run(["tune", "-Lx=8", "-Ly=4", "-Mx=16", "-My=8", "-R=1", f"-cache={cache}"])
    assert status == 0
    ms, ts, optimal = parse_timing_text(out)
    stored = RecordCache(cache).get((8, 4, 16, 8))
    assert ms == stored.m_values and ts == stored.time_values
    assert optimal == min(ts)


def test_bench_small_problem(tmp_path):
    inv = parse_args(["bench", "-Lx=2", "-Ly=4", "-R=1", f"-out={tmp_path}"])
    assert run_bench(inv, io.StringIO()) == 0
    rows = list(csv.DictReader(open(tmp_path / "bench.csv")))
    assert {r["strategy"] for r in rows} == {"direct", "explicit_smooth", "explicit_pow2", "hybrid"}
    assert json.loads((tmp_path / "bench.json").read_text())["gate"] == "pass"


def test_bench_gate_aborts_on_mismatch(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "hybrid_conv_1d", lambda f, g, M, m, lam: np.zeros(min(M, f.size + g.size - 1)))
    status, _, err = run(["bench", "-Lx=3", "-Ly=5", "-R=1", f"-out={tmp_path}"])
    assert status == 2 and "gate" in err
    assert not (tmp_path / "bench.csv").exists()


def test_backend_flag_restored():
    before = numeric.current_backend()
    assert run(["conv1d", "-Lx=3", "-Ly=4", "-backend=numpy", "-T=2"])[0] == 0
    assert numeric.current_backend() == before
