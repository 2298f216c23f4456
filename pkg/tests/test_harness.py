from __future__ import annotations

import json
import shutil
from fractions import Fraction

import pytest

from fanweights.cli import main
from fanweights.corpus import default_corpus_dir
from fanweights.harness import CheckRecord, Report, SuiteSpec, emit_report, parse_report, rng_for, run_suite


def _failing() -> Report:
    return Report([CheckRecord("germ.partition", "germ-fan partition identity", "A2/alpha1", 10, 1, {"seed": 3, "H": [Fraction(1, 3), Fraction(-2, 7)]})])


def test_empty_report():
    assert emit_report(Report(), "json") == b"[]\n"
    assert emit_report(Report(), "csv").decode().strip() == "identity,anchor,datum,samples,failures,counterexample,wall_clock"


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_round_trip(fmt):
    data = emit_report(_failing(), fmt)
    assert emit_report(parse_report(data, fmt), fmt) == data


def test_counterexample_exact():
    rows = json.loads(emit_report(_failing(), "json"))
    assert rows[0]["counterexample"]["H"] == ["1/3", "-2/7"]
    assert list(rows[0]) == ["identity", "anchor", "datum", "samples", "failures", "counterexample", "wall_clock"]


def test_rng_streams_are_independent_and_reproducible():
    a = rng_for(7, "x").integers(0, 10 ** 9, size=4)
    assert list(a) == list(rng_for(7, "x").integers(0, 10 ** 9, size=4))
    assert list(a) != list(rng_for(7, "y").integers(0, 10 ** 9, size=4))


def test_spec_validation():
    with pytest.raises(ValueError):
        SuiteSpec("nope")
    with pytest.raises(ValueError):
        SuiteSpec("fan", samples=0)


def test_convex_suite_passes():
    r = run_suite(SuiteSpec("convex", samples=1000, seed=7))
    assert r.passed
    ids = {x.identity for x in r.records}
    assert {"convex.partition", "convex.polarity"} <= ids


def test_germ_rank1_partition_samples():
    r = run_suite(SuiteSpec("germ", samples=10000, seed=0, only=("germ.partition",)))
    rec = next(x for x in r.records if x.datum == "A1/all+")
    assert rec.samples == 10000 and rec.failures == 0


def test_order_independent_of_jobs():
    a = emit_report(run_suite(SuiteSpec("coregular", samples=10, seed=1)))
    b = emit_report(run_suite(SuiteSpec("coregular", samples=10, seed=1, jobs=3)))
    assert a == b


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["--suite", "fan", "--samples", "10", "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())
    with pytest.raises(SystemExit) as e:
        main(["--suite", "bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["--suite", "fan", "--samples", "0"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["--suite", "fan", "--seed", str(2 ** 64)])
    assert e.value.code == 2
    assert main(["--suite", "fan", "--corpus", str(tmp_path / "missing")]) == 2


def test_cli_failure_exit(tmp_path):
    root = tmp_path / "c"
    shutil.copytree(default_corpus_dir(), root)
    p = root / "padic.json"
    data = json.loads(p.read_text())
    for s in data:
        if s["name"] == "A1/rank1-X2":
            s["expected"] = "3"
    p.write_text(json.dumps(data))
    out = tmp_path / "r.json"
    code = main(["--suite", "padic", "--samples", "10", "--corpus", str(root), "--out", str(out), "--only", "padic.values"])
    assert code == 1
    rows = json.loads(out.read_text())
    bad = [r for r in rows if r["failures"]]
    assert [r["datum"] for r in bad] == ["A1/rank1-X2"]
    assert bad[0]["counterexample"]["expected"] == "3"


def test_cli_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["--suite", "fan", "--samples", "5", "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().startswith("identity,anchor,datum")
