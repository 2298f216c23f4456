"""Acceptance suite: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
import time
from pathlib import Path
from typing import Callable, List, Tuple

import pytest

from fanweights.cli import main as cli_main
from fanweights.corpus import default_corpus_dir
from fanweights.harness import Report, SuiteSpec, run_suite

SEED = 20240917
N = 10_000


def _run(suite: str, checks: Tuple[str, ...], samples: int = N, seed: int = SEED) -> Report:
    return run_suite(SuiteSpec(suite, samples=samples, seed=seed, only=checks))


def _summary(r: Report) -> str:
    bad = [f"{x.identity}[{x.datum}]" for x in r.records if not x.passed]
    total = sum(x.samples for x in r.records)
    return f"{len(r.records)} records, {total} samples" + (f", failing: {', '.join(bad[:5])}" if bad else "")


def crit_partition() -> Tuple[bool, str]:
    t0 = time.perf_counter()
    r = _run("germ", ("germ.partition", "germ.iota_partition"))
    dt = time.perf_counter() - t0
    enough = all(x.samples >= N for x in r.records)
    data = {x.datum.split("/")[0] for x in r.records if x.identity == "germ.partition"}
    covered = {"A1", "A2", "B2", "BC2", "A1xA1"} <= data
    return r.passed and enough and covered and dt <= 60, f"{_summary(r)}, {dt:.1f}s (limit 60s)"


def crit_splitting() -> Tuple[bool, str]:
    r = _run("germ", ("germ.splitting", "germ.corollary"))
    enough = all(x.samples >= 1000 for x in r.records)
    return r.passed and enough, _summary(r)


def crit_hull() -> Tuple[bool, str]:
    r = _run("germ", ("germ.hull", "germ.hull_iota"))
    enough = all(x.samples >= 20 * 1000 for x in r.records)
    iota = any(x.identity == "germ.hull_iota" for x in r.records)
    return r.passed and enough and iota, _summary(r)


def crit_descent() -> Tuple[bool, str]:
    g = _run("germ", ("germ.descent",))
    p = _run("padic", ("padic.descent",))
    swap = [x for x in p.records if x.datum == "A1xA1-swap/iota"]
    ok = g.passed and p.passed and len(swap) == 1 and swap[0].samples >= 25
    return ok, f"germ: {_summary(g)}; padic: {_summary(p)}"


def crit_convex() -> Tuple[bool, str]:
    r = _run("convex", ("convex.partition", "convex.projection"))
    part = [x for x in r.records if x.identity == "convex.partition"]
    proj = [x for x in r.records if x.identity == "convex.projection"]
    ok = r.passed and len(part) == 10 and all(x.samples >= N for x in part) and proj and all(x.samples >= 1000 for x in proj)
    return ok, _summary(r)


def crit_factorization() -> Tuple[bool, str]:
    r = _run("cone", ("cone.factorization",))
    return r.passed and all(x.samples >= N for x in r.records), _summary(r)


def crit_coregular() -> Tuple[bool, str]:
    r = _run("coregular", ("coregular.verdict", "coregular.agreement"))
    return r.passed and len(r.records) >= 30, _summary(r)


def crit_padic() -> Tuple[bool, str]:
    t0 = time.perf_counter()
    r = _run("padic", ("padic.unit_integral", "padic.values", "padic.translation", "padic.stabilization", "padic.growth"))
    dt = time.perf_counter() - t0
    growth = sum(x.samples for x in r.records if x.identity == "padic.growth")
    return r.passed and growth >= 1000 and dt <= 120, f"{_summary(r)}, growth scenarios {growth}, {dt:.1f}s (limit 120s)"


def crit_determinism() -> Tuple[bool, str]:
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp) / "a.json", Path(tmp) / "b.json"
        args = ["--suite", "germ", "--samples", "300", "--seed", "99"]
        c1 = cli_main(args + ["--out", str(a)])
        c2 = cli_main(args + ["--out", str(b), "--jobs", "2"])
        same = a.read_bytes() == b.read_bytes()
        root = Path(tmp) / "corpus"
        shutil.copytree(default_corpus_dir(), root)
        data = json.loads((root / "padic.json").read_text())
        data[0]["expected"] = "-1"
        (root / "padic.json").write_text(json.dumps(data))
        c3 = cli_main(["--suite", "padic", "--samples", "10", "--corpus", str(root), "--only", "padic.values", "--out", str(Path(tmp) / "f.json")])
        (root / "data.json").write_text("[")
        c4 = cli_main(["--suite", "fan", "--corpus", str(root), "--out", str(Path(tmp) / "g.json")])
        try:
            cli_main(["--suite", "unknown"])
            c5 = 0
        except SystemExit as e:
            c5 = e.code
    ok = same and (c1, c2, c3, c4, c5) == (0, 0, 1, 2, 2)
    return ok, f"byte-identical={same}, exit codes pass/pass/fail/parse/usage = {c1}/{c2}/{c3}/{c4}/{c5}"


CRITERIA: List[Tuple[int, str, Callable[[], Tuple[bool, str]]]] = [
    (1, "germ-fan partition identity", crit_partition),
    (2, "splitting formula and corollary", crit_splitting),
    (3, "hull characterization (plain and iota)", crit_hull),
    (4, "descent relation, identity, certificate, mutation", crit_descent),
    (5, "dual-cone partition and projection bijection", crit_convex),
    (6, "cone factorization", crit_factorization),
    (7, "coregularity verdicts and criteria agreement", crit_coregular),
    (8, "p-adic weights: values, translation, fit, growth", crit_padic),
    (9, "harness determinism and exit codes", crit_determinism),
]


def _line(num: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {num} {'PASS' if ok else 'FAIL'}: {title} ({detail})"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(_line(num, title, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
