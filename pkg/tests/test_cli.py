import json

import pytest

from hellygrid.cli import build_sequence, main


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_sieve(tmp_path, capsys):
    code, out, _ = run(["sieve", "--limit", "10", "--out", "-"], capsys)
    assert code == 0 and out == "2\n3\n5\n7\n"
    p = tmp_path / "p.txt"
    assert run(["sieve", "--limit", "100", "--out", str(p)], capsys)[0] == 0
    assert len(p.read_text().splitlines()) == 25
    assert run(["sieve", "--limit", "1"], capsys)[0] == 2


def test_sieve_workers_do_not_change_bytes(tmp_path, capsys):
    outs = []
    for w in ("1", "3"):
        code, out, _ = run(["--workers", w, "sieve", "--limit", "200000"], capsys)
        outs.append(out)
    assert outs[0] == outs[1]


def test_unknown_flag_rejected(capsys):
    assert run(["sieve", "--limit", "10", "--bogus"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def test_scan(capsys):
    code, out, _ = run(["scan", "--seq", "primes", "--limit", "100", "--direction", "decreasing", "--min-run", "4"], capsys)
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert recs[0] == {"start": 1, "length": 4, "direction": "decreasing", "first_element": "2", "last_element": "7"}
    assert len(recs) == 9
    for argv in (["scan", "--seq", "exp:2", "--count", "20", "--min-run", "4"],
                 ["scan", "--seq", "fib", "--count", "30", "--min-run", "5"]):
        code, out, _ = run(argv, capsys)
        assert code == 0 and out == ""


def test_scan_csv_and_both(capsys):
    code, out, _ = run(["scan", "--seq", "primes", "--limit", "100", "--direction", "both", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0] == "start,length,direction,first_element,last_element"
    assert "1,4,decreasing,2,7" in lines
    assert any(",increasing," in line for line in lines)


def test_scan_streamed_range_matches_materialized(capsys):
    a = run(["scan", "--seq", "primes", "--lo", "2", "--hi", "300000"], capsys)[1]
    b = run(["scan", "--seq", "primes", "--limit", "300000"], capsys)[1]
    assert a == b and a


def test_sequence_specs(tmp_path):
    assert build_sequence("comp", hi=10).elements == (0, 1, 4, 6, 8, 9, 10)
    assert build_sequence("dexp:3", count=3).elements == (9, 81, 6561)
    p = tmp_path / "s.txt"
    p.write_text("2\n3\n5\n")
    assert build_sequence(f"file:{p}").elements == (2, 3, 5)


def test_construct_and_verify_pentagon(tmp_path, capsys):
    cert = tmp_path / "c.json"
    code, _, err = run(["construct", "--seq", "primes", "--limit", "10", "--start", "2", "--k", "4", "--cert-out", str(cert)], capsys)
    assert code == 0 and "5-gon" in err
    d = json.loads(cert.read_text())
    assert d["implied_helly_lower_bound"] == 5
    assert {tuple(map(int, v)) for v in d["vertices"]} == {(2, 2), (3, 3), (2, 3), (3, 5), (5, 7)}
    code, out, _ = run(["verify", str(cert)], capsys)
    assert code == 0 and "brute-force cross-checked" in out


def test_construct_by_index(capsys):
    code, out, _ = run(["construct", "--seq", "primes", "--limit", "100", "--index", "13", "--k", "6"], capsys)
    assert code == 0
    assert json.loads(out)["implied_helly_lower_bound"] == 7


def test_construct_refuses_non_run(capsys):
    code, _, err = run(["construct", "--seq", "primes", "--limit", "20", "--start", "7", "--k", "4"], capsys)
    assert code == 1
    assert "position 4" in err


def test_construct_exponential_diagnostic(capsys):
    code, _, err = run(["construct", "--seq", "exp:2", "--count", "10", "--index", "1", "--k", "5"], capsys)
    assert code == 1
    assert "convex position" in err


def test_construct_usage_errors(capsys):
    assert run(["construct", "--seq", "primes", "--limit", "20", "--k", "4"], capsys)[0] == 2
    assert run(["construct", "--seq", "primes", "--limit", "20", "--start", "4", "--k", "4"], capsys)[0] == 2
    assert run(["construct", "--seq", "primes", "--k", "4", "--start", "2"], capsys)[0] == 2


def test_verify_failures(tmp_path, capsys):
    cert = tmp_path / "c.json"
    run(["construct", "--seq", "primes", "--limit", "10", "--start", "2", "--k", "4", "--cert-out", str(cert)], capsys)
    d = json.loads(cert.read_text())
    d["vertices"][0] = ["4", "4"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    code, out, _ = run(["verify", str(bad)], capsys)
    assert code == 1 and "FAIL" in out and "not all in grid" in out
    bad.write_text("{oops")
    assert run(["verify", str(bad)], capsys)[0] == 2
    d = json.loads(cert.read_text())
    d["version"] = 7
    bad.write_text(json.dumps(d))
    assert run(["verify", str(bad)], capsys)[0] == 2
    d = json.loads(cert.read_text())
    d["grid"]["kind"] = "lattice"
    bad.write_text(json.dumps(d))
    assert run(["verify", str(bad)], capsys)[0] == 2
    assert run(["verify", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_scan_construct_verify_pipeline(tmp_path, capsys):
    runs = tmp_path / "runs.jsonl"
    certs = tmp_path / "certs.jsonl"
    lim = "100000"
    assert run(["scan", "--seq", "primes", "--limit", lim, "--out", str(runs)], capsys)[0] == 0
    n = len(runs.read_text().splitlines())
    code, _, err = run(["construct", "--seq", "primes", "--limit", lim, "--runs", str(runs), "--cert-out", str(certs)], capsys)
    assert code == 0 and f"{n} certified, 0 failed" in err
    code, out, _ = run(["verify", str(certs)], capsys)
    assert code == 0
    assert out.count(" OK: ") == n


def test_search(tmp_path, capsys):
    cert = tmp_path / "s.json"
    code, _, err = run(["search", "--grid", "primes", "--window", "2:200", "--strategy", "dp", "--cert-out", str(cert)], capsys)
    assert code == 0 and "re-verified: True" in err
    d = json.loads(cert.read_text())
    assert d["implied_helly_lower_bound"] == 11
    assert d["search"]["window"]["points"] == 46 * 46
    assert run(["verify", str(cert)], capsys)[0] == 0


def test_search_strategies_agree(capsys):
    outs = []
    for strat in ("dp", "exhaustive"):
        code, out, _ = run(["search", "--grid", "primes", "--window", "2:20", "--strategy", strat], capsys)
        assert code == 0
        d = json.loads(out)
        outs.append((d["vertices"], d["implied_helly_lower_bound"]))
    assert outs[0] == outs[1]


def test_search_complements(capsys):
    for grid, win in (("composites", "0:50"), ("int-minus-prime-square", "0:25")):
        code, out, _ = run(["search", "--grid", grid, "--window", win], capsys)
        assert code == 0
        assert json.loads(out)["implied_helly_lower_bound"] <= 24


def test_search_resource_cap(capsys):
    assert run(["search", "--grid", "primes", "--window", "2:200", "--strategy", "exhaustive"], capsys)[0] == 3
    assert run(["search", "--grid", "primes", "--window", "2:x"], capsys)[0] == 2


def test_admissible(capsys):
    code, _, err = run(["admissible", "0", "1"], capsys)
    assert code == 1 and "covered mod 2" in err
    code, out, _ = run(["admissible", "9", "81", "6561"], capsys)
    assert code == 0 and json.loads(out)["witnesses"] == {"2": 0, "3": 1}
    code, out, _ = run(["admissible", "--doubly-exp", "3", "8"], capsys)
    assert code == 0
    assert json.loads(out)["gap_ratios_increasing"] is True
    assert run(["admissible"], capsys)[0] == 2
    assert run(["admissible", "--doubly-exp", "3", "40"], capsys)[0] == 3
