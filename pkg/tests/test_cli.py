import json
import subprocess
import sys

import pytest

from dataaccess.bench import cli


def run(*argv, capsys):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_audit_csv(capsys):
    code, out, _ = run("audit", capsys=capsys)
    assert code == 0
    assert out == "full_matrix,registry,reduction_percent\n225,75,66.7\n"


def test_audit_json(capsys):
    code, out, _ = run("audit", "--format", "json", capsys=capsys)
    assert code == 0
    assert json.loads(out) == {"full_matrix": 225, "registry": 75, "reduction_percent": 66.7}


def test_audit_markdown(capsys):
    code, out, _ = run("audit", "--format", "md", capsys=capsys)
    assert code == 0 and "| 225 | 75 | 66.7 |" in out


def test_fastpath_json_to_file(tmp_path, capsys):
    path = tmp_path / "fp.json"
    code, out, _ = run("fastpath", "--sizes", "512", "--repeats", "3", "--warmup", "1",
                       "--format", "json", "--out", str(path), capsys=capsys)
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert [r["flags"] for r in doc["rows"]] == ["fast", "elementwise"]
    assert "fastpath_speedup" in doc["summary"]


def test_force_slow_path_flag(capsys):
    code, out, _ = run("fastpath", "--sizes", "64", "--repeats", "2", "--warmup", "0",
                       "--force-slow-path", capsys=capsys)
    assert code == 0
    assert "fast;forced-slow" in out


def test_chunks_and_dispatch(capsys):
    code, out, _ = run("chunks", "--sizes", "500,2000", "--chunk-lens", "8,64,256", "--repeats", "2",
                       "--warmup", "0", capsys=capsys)
    assert code == 0 and "# chunk_fit.r2," in out
    code, out, _ = run("dispatch", "--sizes", "100", "--repeats", "2", "--warmup", "0", capsys=capsys)
    assert code == 0 and "# dispatch_ratio," in out


def test_pairs_small(capsys):
    code, out, _ = run("pairs", "--sizes", "1", "--repeats", "1", "--warmup", "0", capsys=capsys)
    assert code == 0
    assert len([ln for ln in out.splitlines() if ln.startswith("pairs,")]) == 225


@pytest.mark.parametrize("argv", [
    ["chunks", "--sizes", "100", "--chunk-lens", "10", "--repeats", "1", "--warmup", "0"],
    ["pairs", "--sizes", "0", "--repeats", "1"],
    ["fastpath", "--sizes", "0", "--repeats", "1"],
    ["fastpath", "--repeats", "abc"],
    ["nope"],
    [],
    ["audit", "--format", "xml"],
])
def test_configuration_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = cli.main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_invariant_violation_exits_2(monkeypatch, capsys):
    from dataaccess.bench.harness import InvariantViolation

    def broken(*a, **k):
        raise InvariantViolation("sums differ")

    monkeypatch.setattr(cli, "bench_dispatch", broken)
    code, _, err = run("dispatch", "--sizes", "10", "--repeats", "1", capsys=capsys)
    assert code == 2 and "invariant violation" in err


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "dataaccess.bench.cli", "audit"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines()[1] == "225,75,66.7"
