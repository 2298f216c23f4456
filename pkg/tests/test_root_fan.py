from __future__ import annotations

from fractions import Fraction

import pytest

from fanweights import linalg as la
from fanweights.root_fan import RootDatumError, build_root_datum, classify_faces, fold_iota


@pytest.mark.parametrize(
    "name,roots,chambers,faces",
    [("A1", 2, 2, 3), ("A2", 6, 6, 13), ("B2", 8, 8, 17), ("BC2", 12, 8, 17), ("A1xA1", 4, 4, 9), ("A3", 12, 24, 75)],
)
def test_counts(name, roots, chambers, faces):
    d = build_root_datum(name)
    assert (len(d.roots), len(d.chambers), len(d.faces)) == (roots, chambers, faces)


@pytest.mark.parametrize("name", ["A1", "A2", "B2", "BC2", "A1xA1"])
def test_full_face_and_chamber_euler(name):
    d = build_root_datum(name)
    g = d.full_face
    assert g.positive == frozenset(range(len(d.roots)))
    for ch in d.chambers:
        s = sum((-1) ** ((f.dim - g.dim) % 2) for f in d.faces if ch.positive <= f.positive)
        assert s == 0


@pytest.mark.parametrize("name", ["A2", "B2", "BC2"])
def test_pairing_and_walls(name):
    d = build_root_datum(name)
    rset = set(d.roots)
    for i, a in enumerate(d.roots):
        if la.scale(Fraction(1, 2), a) not in rset:
            assert la.dot(a, d.coroots[i]) == 2
    for ch in d.chambers:
        assert len(d.walls(ch)) == d.rank


def test_face_of_point_is_chamber_off_walls():
    d = build_root_datum("A2")
    f = d.face_of_point((Fraction(1, 3), Fraction(1, 7)))
    assert f.is_chamber


def test_iota_swap_fold():
    d = build_root_datum("A1xA1", iota="swap")
    r = fold_iota(d).datum
    assert len(r.roots) == 2 and r.rank == 1
    split = classify_faces(d)["iota_split"]
    assert {f.label for f in split} == {"+-", "-+", "00"}


def test_bad_type_raises():
    with pytest.raises(RootDatumError):
        build_root_datum("Q7")


def test_classify_needs_automorphism():
    with pytest.raises(RootDatumError):
        classify_faces(build_root_datum("A2"))
