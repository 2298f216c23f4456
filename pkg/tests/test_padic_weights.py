from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from fanweights import linalg as la
from fanweights.gamma_bx import descent_coefficients
from fanweights.orthogonal_sets import random_orthogonal_set
from fanweights.padic_weights import (
    PadicCharacterData,
    PadicWeightError,
    UnitIntegralTable,
    extract_polyexp,
    shift_u,
    summation_lattice,
    unit_integral,
    unit_integral_oracle,
    verify_descent,
    weight_sum,
)


def test_unit_integral_table():
    assert [unit_integral(3, 0, m) for m in (1, 0, -1, -2)] == [1, 1, Fraction(-1, 2), 0]
    assert unit_integral(5, 1, -2) == Fraction(-1, 4)


@pytest.mark.parametrize("q,c0", [(2, 0), (3, 0), (5, 1), (7, -1)])
def test_unit_integral_oracle(q, c0):
    assert UnitIntegralTable(q, c0).verify(radius=5)
    for m in range(-4, 5):
        assert unit_integral(q, c0, m) == unit_integral_oracle(q, c0, m)


def test_oracle_needs_prime():
    with pytest.raises(PadicWeightError):
        unit_integral_oracle(4, 0, 0)


@pytest.mark.parametrize(
    "name,value",
    [("A1/rank1-X2", Fraction(5, 2)), ("A1/rank1-X3", Fraction(7, 2)), ("A1/rank1-X2-k1", Fraction(7, 2)), ("A1/rank1-deep", 0)],
)
def test_rank1_values(corpus, name, value):
    assert weight_sum(corpus.padic[name].scenario) == value


def test_corpus_expected_values(corpus):
    for e in corpus.padic.values():
        if e.expected is not None:
            assert weight_sum(e.scenario) == e.expected


@pytest.mark.parametrize("name", ["A1/rank1-X2", "A2/alpha1", "A1xA1-swap/iota"])
def test_translation_equivariance(corpus, name):
    s = corpus.padic[name].scenario
    basis = summation_lattice(s)
    rng = np.random.default_rng(8)
    for _ in range(3):
        t = la.zero(s.cfg.big.dimension)
        for v in basis:
            t = la.add(t, la.scale(int(rng.integers(-2, 3)), v))
        assert weight_sum(s.with_chars(shift_u(s.chars, s.cfg, t))) == weight_sum(s.with_x(s.x.translate(t)))


def test_rank1_polyexp():
    from fanweights.corpus import load_corpus

    s = load_corpus().padic["A1/rank1-X2"].scenario
    fit = extract_polyexp(s)
    assert fit.function.degree <= s.rank
    assert fit.function.period == 1


def test_missing_k_rejected(corpus):
    s = corpus.padic["A2/alpha1"].scenario
    with pytest.raises(PadicWeightError):
        s.with_chars(PadicCharacterData(3, 0, ()))


def test_descent_certificate_and_mutation(corpus):
    e = corpus.padic["A1xA1-swap/iota"]
    s = e.scenario
    dc = descent_coefficients(s.cfg, e.epsilon)
    rng = np.random.default_rng(0)
    x = random_orthogonal_set(s.cfg.big, rng)
    batch = [(x.scale(k), s.chars) for k in (1, 2, 3)]
    assert verify_descent(s, dc, batch).holds
    assert not verify_descent(s, dc, batch, perturb=("+0", Fraction(1))).holds
