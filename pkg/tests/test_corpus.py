from __future__ import annotations

import json
import shutil

import pytest

from fanweights.coregularity import default_corpus
from fanweights.corpus import ENV_VAR, CorpusError, default_corpus_dir, load_corpus


def test_counts(corpus):
    assert len(corpus.data) == 8
    assert len(corpus.germs) == 18
    assert len(corpus.convex_sets) == 10
    assert len(corpus.pairs) == 16
    assert len(corpus.padic) == 11


def test_three_bx_choices_per_datum(corpus):
    for name in ("A1", "A2", "B2", "BC2", "A1xA1"):
        assert sum(1 for k in corpus.germs if k.split("/")[0] == name) == 3


def test_convex_dimensions(corpus):
    assert {s.n for s in corpus.convex_sets.values()} == {2, 3, 4}


def test_coregular_file_matches_generator(corpus):
    gen = {p.name: exp for p, exp in default_corpus()}
    assert {p.name: exp for p, exp in corpus.pairs} == gen


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert default_corpus_dir() == tmp_path


def test_parse_error(tmp_path):
    shutil.copytree(default_corpus_dir(), tmp_path / "c")
    (tmp_path / "c" / "germ.json").write_text("{ not json")
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "c")


def test_bad_reference(tmp_path):
    shutil.copytree(default_corpus_dir(), tmp_path / "c")
    p = tmp_path / "c" / "padic.json"
    data = json.loads(p.read_text())
    data[0]["fan"] = "no-such-fan"
    p.write_text(json.dumps(data))
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "c")
