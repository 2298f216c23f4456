from __future__ import annotations

import pytest

from fanweights.coregularity import (
    CoregularityError,
    SymmetricPairDatum,
    conjugate_pair,
    default_corpus,
    discriminant_order_profile,
    gl_gl_in_gl,
    is_coregular_symmetric,
    rank_bookkeeping,
    so_in_gl,
    sp_in_gl,
)

CASES = default_corpus()


@pytest.mark.parametrize("pair,expected", CASES, ids=[p.name for p, _ in CASES])
def test_verdicts(pair, expected):
    assert is_coregular_symmetric(pair).coregular is expected


@pytest.mark.parametrize("pair,expected", CASES, ids=[p.name for p, _ in CASES])
def test_criteria_agree(pair, expected):
    assert discriminant_order_profile(pair).regular is expected


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symplectic_coregular(n):
    assert is_coregular_symmetric(sp_in_gl(n)).coregular


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_orthogonal_not_coregular(n):
    v = is_coregular_symmetric(so_in_gl(n))
    assert not v.coregular and v.witness


def test_gl_gl_not_coregular():
    assert not is_coregular_symmetric(gl_gl_in_gl(1)).coregular


def test_sp2_margins_nonnegative():
    prof = discriminant_order_profile(sp_in_gl(1))
    assert prof.components and all(c.margin >= 0 for c in prof.components)


def test_gl1xgl1_margin_negative():
    prof = discriminant_order_profile(gl_gl_in_gl(1))
    assert min(c.margin for c in prof.components) < 0


def test_rank_bookkeeping_symplectic():
    assert rank_bookkeeping(sp_in_gl(2)) is not False


def test_json_round_trip():
    p = sp_in_gl(2)
    assert SymmetricPairDatum.from_json(p.to_json()) == p


def test_invariance_under_lattice_change():
    p = so_in_gl(3)
    q = conjugate_pair(p, [[1, 1, 0], [0, 1, 0], [0, 0, 1]], [[1, 0], [1, 1]] if p.rank_H == 2 else [[1]])
    assert is_coregular_symmetric(q).coregular == is_coregular_symmetric(p).coregular


def test_not_surjective_rejected():
    with pytest.raises(CoregularityError):
        SymmetricPairDatum("bad", ((1, -1), (-1, 1)), ((2, 0),), ())
