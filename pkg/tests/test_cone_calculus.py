from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from fanweights.cone_calculus import (
    BatchPoints,
    factorization_cells,
    gamma_integral,
    gamma_LQ,
    gamma_QR_cells,
    hull_volume,
    in_closed_chamber,
    indicator,
    langlands_cells,
)
from fanweights.orthogonal_sets import weyl_orbit_family
from fanweights.root_fan import build_root_datum


def test_a1_gamma_is_interval_indicator():
    d = build_root_datum("A1")
    y = weyl_orbit_family(d, d.face_by_label("+"), (Fraction(2),))
    l, g = d.face_by_label("+"), d.full_face
    assert [gamma_LQ(d, l, g, (Fraction(h),), y) for h in (-3, -1, 0, 1, 3)] == [0, 1, 1, 1, 0]
    assert hull_volume(d, l, g, y) == gamma_integral(d, l, g, y) == 4


def test_a2_hull_volume_matches_integral():
    d = build_root_datum("A2")
    c = d.chambers[0]
    y = weyl_orbit_family(d, c, (Fraction(1), Fraction(1)))
    assert hull_volume(d, c, d.full_face, y) == gamma_integral(d, c, d.full_face, y) == 9


def test_tau_on_positive_chamber():
    d = build_root_datum("A2")
    assert indicator(d, "tau", d.chambers[0], d.full_face, (Fraction(1), Fraction(1))) in (0, 1)


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_factorization_and_langlands(name):
    d = build_root_datum(name)
    rng = np.random.default_rng(11)
    num = rng.integers(-600, 601, size=(2000, d.dimension))
    b = BatchPoints(num, 97)
    for q in d.faces:
        for r in d.faces:
            if not q.positive <= r.positive:
                continue
            for _ in range(500):
                x = tuple(Fraction(int(v), 3) for v in rng.integers(-9, 10, size=d.dimension))
                if in_closed_chamber(d, q, r, x):
                    break
            else:
                continue
            assert np.array_equal(b.evaluate(gamma_QR_cells(d, q, r, x)), b.evaluate(factorization_cells(d, q, r, x)))
            f = langlands_cells(d, q, r)
            off = ~b.on_walls(f)
            assert np.all(b.evaluate(f)[off] == (1 if q == r else 0))


def test_batch_points_overflow_guard():
    d = build_root_datum("A1")
    b = BatchPoints(np.array([[2 ** 62]], dtype=np.int64), 1)
    with pytest.raises(OverflowError):
        b.evaluate(langlands_cells(d, d.face_by_label("+"), d.full_face))
