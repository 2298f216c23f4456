from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from fanweights.convex_geometry import (
    ConvexGeometryError,
    FGConvexSet,
    GeneratedCone,
    build_fg_convex,
    dual_cone_membership,
    partition_counts,
    polytope_volume,
    project_decomposition,
)


def test_square_basics():
    sq = build_fg_convex([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert polytope_volume(sq.vertices) == 1
    assert len(sq.faces) == 9
    assert sq.contains((Fraction(1, 2), 1)) and not sq.contains((2, 0))


def test_simplex_volume():
    assert polytope_volume([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]) == Fraction(1, 6)


def test_redundant_generators_dropped():
    s = build_fg_convex([(0, 0), (2, 0), (0, 2), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert len(s.vertices) == 3


def test_half_plane_dual_is_ray():
    hp = build_fg_convex([(0, 0)], [(0, -1)], [(1, 0)])
    dc = hp.dual_cone
    assert len(dc.rays) == 1 and not dc.lineality


def test_from_hrep_empty_raises():
    with pytest.raises(ConvexGeometryError):
        FGConvexSet.from_hrep([((1, 0), -1), ((-1, 0), -1)], n=2)


def test_polarity_involution():
    c = GeneratedCone.build([(1, 0, 0), (1, 1, 0), (0, 1, 1)], [], 3)
    assert c.polar().polar() == c


@pytest.mark.parametrize(
    "verts,rays,lin",
    [
        ([(0, 0), (1, 0), (0, 1), (1, 1)], [], []),
        ([(0, 0), (1, 0)], [(0, 1)], []),
        ([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], [(1, 1, 1)], []),
    ],
)
def test_dual_partition_exactly_once(verts, rays, lin):
    s = build_fg_convex(verts, rays, lin)
    rng = np.random.default_rng(2)
    ys = rng.integers(-9, 10, size=(3000, s.n))
    inside = dual_cone_membership(s, ys)
    assert np.all(partition_counts(s, ys)[inside] == 1)


def test_projection_bijection_square():
    sq = build_fg_convex([(0, 0), (1, 0), (0, 1), (1, 1)])
    pts = [(Fraction(i, 7), Fraction(j, 5)) for i in range(8) for j in range(6)]
    pd = project_decomposition(sq, [(1, 0)], (0, 1), pts)
    assert pd.certified and pd.samples == len(pts)
