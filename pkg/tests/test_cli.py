"""End-to-end tests for the command-line entry point."""

import sys
import os
import csv

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

import main as cli
from distributions import Family, make_spec, sample
from ingest.sample import write_sample
from output.manifest import read_manifest
from utils.errors import DivergenceError

EXPORT = "\n".join([
    "DATE (MM/DD/YYYY),MST,Avg Wind Speed @ 10m [m/s],Avg Wind Speed @ 80m [m/s]",
    "01/01/2015,00:00,3.2,5.0",
    "01/01/2015,01:00,2.5,6.1",
    "bad,row,1,2",
    "01/01/2015,04:00,5.5,7.0",
    "01/01/2015,05:00,4.1,7.5",
]) + "\n"


def _values_file(tmp_path, n=300):
    draws = sample(make_spec("W", (2.0, 0.2)), n, seed=5)
    return write_sample(draws, str(tmp_path / "speeds.txt"))


def _rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def test_sample_command_is_reproducible(tmp_path):
    out = str(tmp_path / "draws")
    argv = ["sample", "--family", "L", "--params", "1", "--n", "1000", "--seed", "7", "--out", out]
    assert cli.main(argv) == cli.EXIT_OK
    first = open(os.path.join(out, "sample.txt"), "rb").read()
    first_manifest = open(os.path.join(out, "manifest.txt"), "rb").read()
    assert cli.main(argv) == cli.EXIT_OK
    assert open(os.path.join(out, "sample.txt"), "rb").read() == first
    assert open(os.path.join(out, "manifest.txt"), "rb").read() == first_manifest
    assert len(first.splitlines()) == 1000


def test_sample_usage_errors(tmp_path):
    out = str(tmp_path)
    assert cli.main(["sample", "--family", "L", "--params", "1", "--n", "0", "--out", out]) == cli.EXIT_ERROR
    assert cli.main(["sample", "--params", "1", "--n", "5", "--out", out]) == cli.EXIT_ERROR
    assert cli.main(["sample", "--family", "L", "--params", "1,2", "--n", "5", "--out", out]) == cli.EXIT_ERROR


def test_fit_writes_sorted_table_and_manifest(tmp_path):
    out = str(tmp_path / "fit")
    status = cli.main(["fit", "--input", _values_file(tmp_path), "--families", "L,W",
                       "--seed", "3", "--out", out])
    assert status in (cli.EXIT_OK, cli.EXIT_DEGRADED)
    rows = _rows(os.path.join(out, "fit.csv"))
    assert [r["family"] for r in rows] == ["W", "L"]
    assert float(rows[0]["neg2_log_lik"]) <= float(rows[1]["neg2_log_lik"])
    assert rows[1]["alpha"] == "" and rows[1]["lambda"] != ""
    assert os.path.isfile(os.path.join(out, "fit.txt"))
    manifest = read_manifest(os.path.join(out, "manifest.txt"))
    assert manifest["command"] == "fit"
    assert manifest["families"] == "L,W"
    assert manifest["seed"] == "3"


def test_manifest_rerun_reproduces_outputs(tmp_path):
    first = str(tmp_path / "first")
    second = str(tmp_path / "second")
    cli.main(["fit", "--input", _values_file(tmp_path), "--families", "L", "--out", first])
    cli.main(["fit", "--manifest", os.path.join(first, "manifest.txt"), "--out", second])
    for name in ("fit.csv", "fit.txt"):
        assert open(os.path.join(first, name), "rb").read() == open(os.path.join(second, name), "rb").read()
    a = read_manifest(os.path.join(first, "manifest.txt"))
    b = read_manifest(os.path.join(second, "manifest.txt"))
    assert {k: v for k, v in a.items() if k != "out"} == {k: v for k, v in b.items() if k != "out"}


def test_fast_flag_is_recorded(tmp_path):
    out = str(tmp_path / "fast")
    cli.main(["fit", "--input", _values_file(tmp_path, n=500), "--families", "L", "--fast",
              "--subsample-size", "100", "--out", out])
    manifest = read_manifest(os.path.join(out, "manifest.txt"))
    assert manifest["fast"] == "true"
    assert manifest["subsample_size"] == "100"


def test_describe_on_tower_export_flags_malformed_rows(tmp_path):
    path = tmp_path / "m2.csv"
    path.write_text(EXPORT, encoding="utf-8")
    out = str(tmp_path / "describe")
    status = cli.main(["describe", "--input", str(path), "--height", "10", "--years", "2015", "--out", out])
    assert status == cli.EXIT_DEGRADED
    row = _rows(os.path.join(out, "describe.csv"))[0]
    assert row["n"] == "4"
    assert float(row["max"]) == 5.5
    assert row["height_m"] == "10 m"


def test_describe_empty_slice_is_an_error(tmp_path):
    path = tmp_path / "m2.csv"
    path.write_text(EXPORT, encoding="utf-8")
    status = cli.main(["describe", "--input", str(path), "--years", "2019", "--out", str(tmp_path)])
    assert status == cli.EXIT_ERROR


def test_empty_slice_message_names_the_error_kind(tmp_path, capsys):
    path = tmp_path / "m2.csv"
    path.write_text(EXPORT, encoding="utf-8")
    cli.main(["describe", "--input", str(path), "--years", "2019", "--out", str(tmp_path)])
    assert "Error (empty-result):" in capsys.readouterr().err


def test_failed_scoring_flags_the_fit_unconverged(tmp_path, monkeypatch):
    real_evaluate = cli.evaluate

    def failing_for_lindley(spec, sample, neg2_log_lik=None):
        if spec.family == Family.L:
            raise DivergenceError("integral did not settle")
        return real_evaluate(spec, sample, neg2_log_lik)

    monkeypatch.setattr(cli, "evaluate", failing_for_lindley)
    out = str(tmp_path / "fit")
    status = cli.main(["fit", "--input", _values_file(tmp_path), "--families", "L,W",
                       "--seed", "3", "--out", out])
    assert status == cli.EXIT_DEGRADED
    rows = {r["family"]: r for r in _rows(os.path.join(out, "fit.csv"))}
    assert rows["L"]["converged"] == "False"
    assert rows["L"]["ks"] == ""


def test_missing_input_is_an_error(tmp_path):
    assert cli.main(["describe", "--input", str(tmp_path / "none.csv"), "--out", str(tmp_path)]) == cli.EXIT_ERROR


def test_percentiles_rejects_bad_levels(tmp_path):
    status = cli.main(["percentiles", "--input", _values_file(tmp_path), "--levels", "0.5,1.5",
                       "--out", str(tmp_path)])
    assert status == cli.EXIT_ERROR


def test_percentiles_table(tmp_path):
    out = str(tmp_path / "pct")
    cli.main(["percentiles", "--input", _values_file(tmp_path), "--families", "W,L",
              "--levels", "0.95,0.99", "--out", out])
    rows = _rows(os.path.join(out, "percentiles.csv"))
    assert len(rows) == 4
    at_95 = [abs(float(r["bias"])) for r in rows if r["level"] == "0.95"]
    assert at_95 == sorted(at_95)


def test_plotdata_minimum_bins(tmp_path):
    out = str(tmp_path / "plot")
    cli.main(["plotdata", "--input", _values_file(tmp_path), "--families", "L", "--bins", "2", "--out", out])
    assert len(_rows(os.path.join(out, "histogram.csv"))) == 2
    grid = _rows(os.path.join(out, "density_grid.csv"))
    assert len(grid) == 512
    assert list(grid[0]) == ["x", "L"]
    assert cli.main(["plotdata", "--input", _values_file(tmp_path), "--bins", "1", "--out", out]) == cli.EXIT_ERROR


def test_parse_families():
    assert cli.parse_families("all")[0].value == "BGL"
    assert [f.value for f in cli.parse_families("l, W ,L")] == ["L", "W"]


def test_family_listing_names_every_family():
    listing = cli.family_listing().splitlines()
    assert len(listing) == 1 + len(cli.FAMILY_ORDER)
    assert listing[1].split()[0] == "BGL"
    assert "(alpha, lambda, a, b)" in listing[1]
    assert "Weibull" in cli.family_listing()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
