from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from fanweights.orthogonal_sets import (
    OrthogonalSet,
    OrthogonalSetError,
    QuasiPolynomialError,
    fit_quasi_polynomial,
    glue_affine_family,
    random_orthogonal_set,
    read_offsets,
    validate_orthogonal_set,
    weyl_orbit_family,
)
from fanweights.root_fan import build_root_datum


def test_a1_orbit_family():
    d = build_root_datum("A1")
    base = d.face_by_label("+")
    y = weyl_orbit_family(d, base, (Fraction(2),))
    assert y.points == {"+": (Fraction(2),), "-": (Fraction(-2),)}
    rep = validate_orthogonal_set(y)
    assert rep.is_orthogonal and rep.is_positive and rep.depth == 2


def test_non_orthogonal_detected():
    d = build_root_datum("A2")
    pts = {c.label: (Fraction(i), Fraction(i * i + 1)) for i, c in enumerate(d.chambers)}
    assert not validate_orthogonal_set(OrthogonalSet(d, pts)).is_orthogonal


def test_missing_chamber_raises():
    d = build_root_datum("A1")
    with pytest.raises(OrthogonalSetError):
        OrthogonalSet(d, {"+": (1,)})


@pytest.mark.parametrize("name", ["A2", "B2", "BC2"])
def test_gluing_round_trip(name):
    d = build_root_datum(name)
    rng = np.random.default_rng(3)
    for _ in range(3):
        x = random_orthogonal_set(d, rng, positive=False)
        g = read_offsets(x)
        assert glue_affine_family(g, x[d.face_by_label(g.base)]).points == x.points


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_sum_is_orthogonal_and_depth_superadditive(name):
    d = build_root_datum(name)
    rng = np.random.default_rng(5)
    x, y = random_orthogonal_set(d, rng), random_orthogonal_set(d, rng)
    rx, ry, rs = (validate_orthogonal_set(z) for z in (x, y, x + y))
    assert rs.is_orthogonal
    assert rs.depth >= rx.depth + ry.depth


def test_quasi_polynomial_fit_parity():
    samples = {(m,): Fraction(m * m, 2) + (1 if m % 2 else 0) for m in range(-3, 12)}
    f = fit_quasi_polynomial(samples, 2, 2)
    assert f.period == 2 and f.degree == 2
    assert all(f(m) == v for m, v in samples.items())


def test_quasi_polynomial_reduces_period():
    samples = {(a, b): Fraction(a + 2 * b) for a in range(8) for b in range(8)}
    f = fit_quasi_polynomial(samples, 1, 2)
    assert f.period == 1


def test_quasi_polynomial_inconsistent():
    samples = {(m,): Fraction(m ** 3) for m in range(10)}
    with pytest.raises(QuasiPolynomialError):
        fit_quasi_polynomial(samples, 2, 1)
