import json

import pytest

from x0plus import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_genus_command(capsys, tmp_path):
    cache = str(tmp_path)
    code, out, _ = run(capsys, "genus", "130", "--keys", "130", "--cache-dir", cache)
    assert code == 0 and "genus 8" in out
    code, out, _ = run(capsys, "genus", "78", "--keys", "2,78", "--cache-dir", cache)
    assert code == 0 and "genus 1" in out
    code, out, _ = run(capsys, "genus", "11")
    assert code == 0 and "genus 1" in out


def test_genus_json(capsys, tmp_path):
    code, out, _ = run(
        capsys, "genus", "271", "--keys", "271", "--format", "json",
        "--cache-dir", str(tmp_path),
    )
    assert code == 0
    assert json.loads(out) == {"N": 271, "genus": 6}


def test_genus_invalid_keys_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "genus", "130", "--keys", "7", "--cache-dir", str(tmp_path))
    assert code == 2 and "error" in err


def test_count_command(capsys, tmp_path):
    cache = str(tmp_path)
    code, out, _ = run(
        capsys, "count", "268", "--keys", "268", "-p", "3", "-r", "2", "--cache-dir", cache
    )
    assert code == 0 and "= 46" in out
    code, out, _ = run(capsys, "count", "10", "-p", "3", "--cache-dir", cache)
    assert code == 0 and "= 4" in out
    code, out, _ = run(
        capsys, "count", "449", "--keys", "449", "-p", "2", "-r", "2", "--cache-dir", cache
    )
    assert code == 0 and "= 26" in out


def test_count_bad_reduction_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "count", "268", "-p", "2", "--cache-dir", str(tmp_path))
    assert code == 2 and "error" in err


def test_analyze_command(capsys, tmp_path):
    code, out, _ = run(
        capsys, "analyze", "186", "--no-certificates", "--format", "json",
        "--cache-dir", str(tmp_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["gonC"]["lower"] == 5
    assert payload["verdict"] == "matches-paper"


def test_sweep_record_count_and_determinism(capsys, tmp_path):
    args = ["sweep", "11..20", "--format", "json", "--cache-dir", str(tmp_path)]
    code, out1, err = run(capsys, *args)
    assert code == 0
    records = json.loads(out1)
    assert [r["N"] for r in records] == list(range(11, 21))
    assert "done" in err
    code, out2, _ = run(capsys, *args)
    assert code == 0 and out1 == out2


def test_sweep_csv(capsys, tmp_path):
    code, out, _ = run(
        capsys, "sweep", "11..13", "--format", "csv", "--cache-dir", str(tmp_path)
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("N,genus_plus,gonQ_lower")
    assert len(lines) == 4


def test_verify_paper_exit_codes(capsys, tmp_path):
    code, out, _ = run(
        capsys, "verify-paper", "60..66", "--no-certificates",
        "--cache-dir", str(tmp_path), "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert 60 in payload["exact_match"] and 66 in payload["exact_match"]
    # the recorded anomaly does not fail verification
    code, out, _ = run(
        capsys, "verify-paper", "153..153", "--cache-dir", str(tmp_path),
        "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["anomalies"] == [153]


def test_bad_range_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify-paper", "20..10"])
    assert exc.value.code == 2


def test_cache_inspect_and_clear(capsys, tmp_path):
    cache = str(tmp_path)
    run(capsys, "count", "11", "-p", "2", "--cache-dir", cache)
    code, out, _ = run(capsys, "cache", "inspect", "--cache-dir", cache, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["entries"] and payload["entries"][0]["level"] == 11
    code, out, _ = run(capsys, "cache", "clear", "--cache-dir", cache)
    assert code == 0 and "removed 1" in out


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["count", "11"])  # missing -p
    assert exc.value.code == 2
