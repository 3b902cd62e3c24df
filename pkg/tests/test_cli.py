import json

import pytest

from mcpoint.cli import main, parse_q
from mcpoint.curves import QuotientCurve
from mcpoint.multiplicity import decompose
from mcpoint.points import count_points, hws_bound, real_weil_poly_of_curve


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip().splitlines(), err


def fields(line):
    return dict(part.split("=", 1) for part in line.split())


def test_parse_q():
    assert parse_q("11^5") == (11, 5)
    assert parse_q("161051") == (11, 5)
    assert parse_q("2") == (2, 1)
    for bad in ("12", "4^2", "11^0", "x"):
        with pytest.raises(Exception):
            parse_q(bad)


def test_count_matches_library(capsys, store):
    code, lines, _ = run(capsys, "count", "--curve", "(6,7){1,2;3}", "--q", "11", "--q", "11^5")
    assert code == 0
    dec = decompose(QuotientCurve.parse("(6,7){1,2;3}"), store)
    assert lines == [count_points(dec, 11, 1).summary(), count_points(dec, 11, 5).summary()]
    f = fields(lines[1])
    assert f == {"curve": "(6,7){1,2;3}", "genus": "7", "q": "11^5", "count": "166666",
                 "bound": "166666", "maximal": "true"}


def test_alternate_notation_accepted(capsys):
    code, lines, _ = run(capsys, "genus", "--curve", r"(6, 7)\{3; 2,1\}")
    assert code == 0 and fields(lines[0]) == {"curve": "(6,7){1,2;3}", "genus": "7"}


def test_decompose(capsys):
    code, lines, _ = run(capsys, "decompose", "--curve", "(6,7){2;3}")
    assert code == 0
    assert lines[:3] == ["label=98.2.a.b dim=2 multiplicity=1", "label=147.2.a.d dim=2 multiplicity=2",
                         "label=294.2.a.e dim=1 multiplicity=1"]
    assert fields(lines[3])["genus"] == "7"


def test_weil(capsys, store):
    code, lines, _ = run(capsys, "weil", "--curve", "(67,1){1}", "--q", "2")
    assert code == 0
    f = fields(lines[0])
    assert f["real_weil_polynomial"] == "x^2+3*x+1" and f["coeffs"] == "1,3,1"
    h = real_weil_poly_of_curve(decompose(QuotientCurve.parse("(67,1){1}"), store), 2, 1)
    assert tuple(map(int, f["coeffs"].split(","))) == h.coeffs


def test_bound(capsys):
    assert run(capsys, "bound", "--genus", "12", "--q", "11^5")[:2] == (0, [f"bound={hws_bound(12, 11, 5)}"])


def test_lattice_inline_and_file(capsys, tmp_path):
    data = json.dumps({"0": 16, "1": 6, "2": 7, "3": 2})
    assert run(capsys, "lattice", "--r", "2", "--data", data, "--subgroup", "3")[:2] == (0, ["r=2 subgroup=3 genus=7"])
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"0b00": 16, "0b01": 6, "0b10": 7, "0b11": 2}))
    assert run(capsys, "lattice", "--r", "2", "--data", str(path), "--subgroup", "0b11")[1] == \
        ["r=2 subgroup=3 genus=7"]


@pytest.mark.parametrize("argv", [
    ["count", "--curve", "(6,7){}", "--q", "12"],
    ["count", "--curve", "(6,7){4}", "--q", "5"],
    ["count", "--curve", "(6,6){}", "--q", "5"],
    ["genus"],
    ["bound", "--genus", "2", "--q", "6"],
    ["lattice", "--r", "2", "--data", "not json"],
    ["scan", "--config", "/nonexistent/config.json"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2


@pytest.mark.parametrize("argv,message", [
    (["count", "--curve", "(6,7){}", "--q", "7"], "bad reduction"),
    (["genus", "--curve", "(1,1){}", "--fixtures", "/nonexistent.json"], "FixtureError"),
    (["genus", "--curve", "(1009,1){}"], "CoverageError"),
    (["genus", "--curve", "(44,1){1}", "--policy", "strict"], "MultiplicityError"),
    (["lattice", "--r", "2", "--data", '{"0": 1}', "--subgroup", "3"], "LatticeError"),
])
def test_data_errors_exit_1(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 1 and message in err


def test_scan_command(capsys, tmp_path, store):
    cfg = tmp_path / "scan.json"
    cfg.write_text(json.dumps({"max_n": 400, "pairs": [[6, 7]], "primes": [11], "default_max_k": 5}))
    code, lines, _ = run(capsys, "scan", "--config", str(cfg), "--output", str(tmp_path / "o"))
    assert code == 0 and fields(lines[0])["rows"] == "80" and fields(lines[0])["skipped_pairs"] == "0"
    best = (tmp_path / "o" / "best.csv").read_text().splitlines()
    assert '7,161051,166666,"(6,7){1,2;3}"' in best
    maximal = json.loads((tmp_path / "o" / "maximal.json").read_text())
    assert ["(6,7){1,2;3}"] in [g["curves"] for g in maximal]


def test_fetch_offline_from_cache(capsys, tmp_path, monkeypatch):
    from test_lmfdb import FakeAPI
    import mcpoint.lmfdb as lmfdb
    cache = tmp_path / "cache"
    # fill the cache through the library with a fake transport, then read it offline via the CLI
    lmfdb.fetch_levels(lmfdb.FetchRequest({1, 11, 23}, {2, 3}, cache, base_url="http://fake"), FakeAPI())
    out = tmp_path / "fix.json"
    code, lines, _ = run(capsys, "fetch", "--levels", "1,11,23", "--primes", "2,3", "--cache", str(cache),
                         "--offline", "--output", str(out))
    assert code == 0 and fields(lines[0]) == {"levels": "3", "records": "2", "output": str(out)}
    code, lines, _ = run(capsys, "genus", "--curve", "(23,1){}", "--fixtures", str(out))
    assert code == 0 and fields(lines[0])["genus"] == "2"
    code, _, err = run(capsys, "fetch", "--levels", "37", "--primes", "2", "--cache", str(cache), "--offline")
    assert code == 1 and "offline" in err
