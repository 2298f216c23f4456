from __future__ import annotations

import numpy as np
import pytest

from fanweights.cone_calculus import BatchPoints
from fanweights.gamma_bx import (
    GermFanConfig,
    compatible_faces,
    descent_coefficients,
    descent_sides,
    gamma_bx_value,
    gamma_cells,
    hull_support,
    partition_cells,
    splitting_sides,
    top_face,
    weyl_partition_ok,
)
from fanweights.orthogonal_sets import OrthogonalSet, random_orthogonal_set
from fanweights.root_fan import build_root_datum


def test_germ_fan_sizes(corpus):
    sizes = {k: (len(g.cfg.chambers), len(g.cfg.faces)) for k, g in corpus.germs.items()}
    assert sizes["A2/empty"] == (6, 13)
    assert sizes["A2/alpha1"] == (3, 8)
    assert sizes["A2/all"] == (1, 4)
    assert sizes["B2/short"] == (4, 10)


def test_weyl_partition_all(corpus):
    assert all(weyl_partition_ok(g.cfg) for g in corpus.germs.values())


def test_rank1_values():
    d = build_root_datum("A1")
    cfg = GermFanConfig.from_signs(d, d.roots, (1,))
    x = OrthogonalSet(d, {"+": [2], "-": [-2]})
    g = d.full_face
    assert [gamma_bx_value(cfg, g, (h,), x) for h in (0, 3, -100)] == [1, 0, 1]


@pytest.mark.parametrize("name", ["A2/alpha1", "B2/long", "BC2/short", "A1xA1/first"])
def test_partition_and_hull(corpus, name):
    cfg = corpus.germs[name].cfg
    b = cfg.big
    rng = np.random.default_rng(1)
    pts = BatchPoints(rng.integers(-2000, 2001, size=(3000, b.dimension)), 211)
    x = random_orthogonal_set(b, rng)
    for r in cfg.faces:
        f = partition_cells(cfg, r, x)
        off = ~pts.on_walls(f)
        assert np.all(pts.evaluate(f)[off] == 1)
    hs = hull_support(cfg, x)
    v = pts.evaluate(gamma_cells(cfg, top_face(cfg), x))
    assert np.array_equal(v, hs.contains_batch(pts.num, pts.den).astype(v.dtype))


def test_splitting_a2(corpus):
    cfg = corpus.germs["A2/alpha1"].cfg
    b = cfg.big
    rng = np.random.default_rng(4)
    x, y = random_orthogonal_set(b, rng, scale=2), random_orthogonal_set(b, rng, scale=2)
    pts = BatchPoints(rng.integers(-2000, 2001, size=(2000, b.dimension)), 211)
    for r in cfg.faces:
        lhs, rhs = splitting_sides(cfg, x, y, r)
        off = ~(pts.on_walls(lhs) | pts.on_walls(rhs))
        assert np.array_equal(pts.evaluate(lhs)[off], pts.evaluate(rhs)[off])


def test_descent_coefficients_swap(corpus):
    g = corpus.germs["A1xA1-swap/empty"]
    dc = descent_coefficients(g.cfg, g.epsilon)
    assert dc.as_dict() == {"++": -1, "+-": 0, "+0": 1, "-+": 0, "0+": 1}
    comp = compatible_faces(g.cfg, g.epsilon)
    for q in comp:
        assert sum(dc.as_dict()[r.label] for r in comp if q.positive <= r.positive) == 1


@pytest.mark.parametrize("name", ["A1xA1-swap/empty", "B2-iota/short", "A1-neg/all"])
def test_descent_identity(corpus, name):
    g = corpus.germs[name]
    dc = descent_coefficients(g.cfg, g.epsilon)
    rng = np.random.default_rng(9)
    x = random_orthogonal_set(g.cfg.big, rng)
    lhs, rhs = descent_sides(g.cfg, x, dc)
    pts = BatchPoints(rng.integers(-400, 401, size=(3000, g.cfg.big.dimension)), 37)
    total = np.zeros(len(pts), dtype=object)
    for coef, f in rhs:
        total = total + coef * pts.evaluate(f).astype(object)
    assert np.all(pts.evaluate(lhs).astype(object) == total)
