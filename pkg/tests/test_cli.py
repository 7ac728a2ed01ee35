import pytest

from sqfgap.cli import integer, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_integer_argument():
    assert integer("3e8") == 300_000_000
    assert integer("1_000") == 1000
    import argparse
    with pytest.raises(argparse.ArgumentTypeError):
        integer("1.5")


def test_search_output_format(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--start", "1", "--end", "1e6", "--min-len", "6")
    assert code == 0
    assert out.splitlines()[0] == "22020: 6"
    assert out.splitlines()[-1] == "217070: 7" or "217070: 7" in out


def test_search_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["search", "--start", "5", "--end", "4", "--min-len", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["search", "--start", "1", "--end", "9", "--min-len", "3", "--variant", "V9"])
    assert exc.value.code == 2


def test_search_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "search", "--start", "1", "--end", "1000", "--min-len", "3",
                       "--out", str(tmp_path / "missing" / "x.txt"))
    assert code == 3 and "sqfgap:" in err


def test_search_workers_identical_bytes(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    base = ["search", "--start", "1", "--end", "2e6", "--min-len", "5", "--chunk", "5e5"]
    assert main(base + ["--workers", "1", "--out", str(a)]) == 0
    assert main(base + ["--workers", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes() and a.read_bytes()


def test_verify(capsys, tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("1043460553364: 14\n30: 1\n")
    code, out, _ = run(capsys, "verify", str(f))
    assert code == 1
    assert "PASS 1043460553364: 14" in out and "FAIL 30: 1" in out
    bad = tmp_path / "bad.txt"
    bad.write_text("4: 1\nxyz\n")
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and ":2:" in err


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "--check-factors")
    assert code == 0 and out.count("PASS") == 18
    code, out, _ = run(capsys, "catalog", "--check-firsts", "6")
    assert code == 0 and "exact=22020" in out
    code, out, _ = run(capsys, "catalog")
    assert out.splitlines()[13].startswith("14 1043460553364 2,3,7,19,2,13x59")


def test_np2min_series_bounds_plot(capsys):
    code, out, _ = run(capsys, "np2min", "--max-len", "17")
    assert code == 0 and [int(l.split()[1]) for l in out.splitlines()] == \
        [1, 2, 3, 4, 4, 5, 6, 7, 7, 7, 8, 9, 9, 10, 11, 12, 12]
    code, out, _ = run(capsys, "series", "--terms", "1000")
    assert code == 0 and out.startswith("terms 1000")
    code, out, _ = run(capsys, "bounds", "--length", "4", "--trials", "200", "--seed", "1")
    assert code == 0 and "# verified" in out
    code, out, _ = run(capsys, "plot-csv", "qgap")
    assert out.splitlines()[:2] == ["L,qgap", "1,4"]
    code, out, _ = run(capsys, "plot-csv", "series", "--terms", "3000", "--every", "1000")
    assert len(out.splitlines()) == 4


def test_ledger_commands(capsys, tmp_path):
    led = str(tmp_path / "l.txt")
    assert main(["ledger", "claim", led, "--start", "0", "--end", "1e9", "--min-len", "14",
                 "--owner", "a"]) == 0
    assert main(["ledger", "claim", led, "--start", "5e8", "--end", "2e9", "--min-len", "14"]) == 1
    assert main(["ledger", "complete", led, "--start", "0", "--end", "1e9", "--min-len", "14"]) == 0
    capsys.readouterr()
    assert main(["ledger", "show", led]) == 0
    assert " done a " in capsys.readouterr().out
    with pytest.raises(SystemExit):
        main(["ledger", "claim", led])


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--start", "1", "--end", "1e5", "--min-len", "4",
                       "--variants", "V1,V7")
    assert code == 0 and len(out.splitlines()) == 3
