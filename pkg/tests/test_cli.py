import io
import shutil
import subprocess

import pytest

from regionflow.cli import cli_main


def run(*argv):
    out = io.StringIO()
    code = cli_main(list(argv), out)
    return code, out.getvalue()


def _kv(text):
    return dict(line.split(None, 1) for line in text.splitlines() if line and " " in line)


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "g.max"
    assert run("gen", "grid", "30", "30", "--conn", "8", "--strength", "150",
               "-o", str(path))[0] == 0
    return path


def test_gen_solve_verify(grid_file, tmp_path):
    cut = tmp_path / "g.cut"
    code, out = run("solve", str(grid_file), "--algo", "ard", "--mode", "seq",
                    "--regions", "2x2", "--cut", str(cut))
    assert code == 0
    flow = int(_kv(out)["flow"])
    code, out = run("verify", str(grid_file), "--cut", str(cut))
    assert code == 0 and int(_kv(out)["oracle"]) == flow


@pytest.mark.skipif(shutil.which("regionflow") is None, reason="console script not installed")
def test_pipe_gen_into_solve():
    gen = subprocess.run(["regionflow", "gen", "grid", "30", "30", "--conn", "8",
                          "--strength", "150"], capture_output=True, text=True, check=True)
    solve = subprocess.run(["regionflow", "solve", "--algo", "ard", "--mode", "seq"],
                           input=gen.stdout, capture_output=True, text=True)
    assert solve.returncode == 0
    verify = subprocess.run(["regionflow", "verify"], input=gen.stdout,
                            capture_output=True, text=True)
    assert _kv(verify.stdout)["oracle"] == _kv(solve.stdout)["flow"]


def test_stream_on_split_files_matches_in_memory(grid_file, tmp_path):
    parts = tmp_path / "parts"
    assert run("split", str(grid_file), "--regions", "2x2", "-o", str(parts))[0] == 0
    _, mem = run("solve", str(grid_file), "--regions", "2x2")
    code, streamed = run("solve", str(parts), "--stream")
    assert code == 0
    assert _kv(mem)["flow"] == _kv(streamed)["flow"]
    assert _kv(mem)["sweeps"] == _kv(streamed)["sweeps"]


def test_adversarial_prd_replay_takes_more_sweeps(tmp_path):
    f, side = tmp_path / "a.max", tmp_path / "a.part"
    assert run("gen", "adversarial", "8", "--sidecar", str(side), "-o", str(f))[0] == 0
    _, prd = run("solve", str(f), "--algo", "prd", "--schedule", "adversarial")
    _, ard = run("solve", str(f), "--algo", "ard", "--regions", str(side))
    assert int(_kv(prd)["sweeps"]) > int(_kv(ard)["sweeps"])


def test_parallel_and_stats(grid_file, tmp_path):
    stats = tmp_path / "s.csv"
    code, out = run("solve", str(grid_file), "--algo", "prd", "--mode", "par", "--regions", "3x3",
                    "--workers", "2", "--stats", str(stats))
    assert code == 0
    assert stats.read_text().startswith("sweep,active_regions,flow_value")


def test_reduce_report(grid_file):
    code, out = run("reduce", str(grid_file), "--regions", "2x2")
    assert code == 0
    assert out.count("decided") == 5


def test_solve_with_reduction_keeps_flow(grid_file):
    _, plain = run("solve", str(grid_file), "--regions", "2x2")
    _, red = run("solve", str(grid_file), "--regions", "2x2", "--reduce")
    assert _kv(plain)["flow"] == _kv(red)["flow"]


def test_bench_rows():
    code, out = run("bench", "--sizes", "8", "--conn", "4,8", "--seeds", "0", "--algos", "ard,prd")
    rows = out.splitlines()
    assert code == 0 and rows[0].startswith("size,conn") and len(rows) == 1 + 4


def test_exit_codes(grid_file, tmp_path):
    assert run("solve", str(grid_file), "--regions", "5q")[0] == 2
    assert run("solve", "--bogus")[0] == 2
    assert run("solve", str(grid_file), "--mode", "par", "--stream")[0] == 2
    assert run()[0] == 2
    bad = tmp_path / "bad.max"
    bad.write_text("p max 3\n")
    assert run("solve", str(bad))[0] == 1
    assert run("solve", str(tmp_path / "missing.max"))[0] == 1


def test_verify_detects_wrong_cut(grid_file, tmp_path):
    cut = tmp_path / "c"
    cut.write_text("f 1\nc 1\n1\n")
    assert run("verify", str(grid_file), "--cut", str(cut))[0] == 1


def test_deterministic_output(grid_file):
    a = run("solve", str(grid_file), "--regions", "2x2", "--mode", "par")
    b = run("solve", str(grid_file), "--regions", "2x2", "--mode", "par")
    assert a == b
