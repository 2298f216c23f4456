"""Finitely generated convex sets, their cones, faces and projections.

The single geometric kernel is the double description method, run on
integer data: :func:`cone_from_hrep` turns ``{x : a.x <= 0, e.x = 0}`` into
extreme rays plus a lineality basis, and polarity gives the reverse
direction.  A convex set ``Conv(V) + Cone(R) + L`` is handled through its
homogenization in one dimension more.

Dual objects are returned as vectors through the ambient inner product, so
``dual_cone = {Y : (Y, X) <= 0 for X in the asymptotic cone}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd
from functools import reduce
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .linalg import Mat, Vec

IVec = Tuple[int, ...]


class ConvexGeometryError(ValueError):
    pass


# -- integer helpers ------------------------------------------------------------

def _prim(v: Sequence[int]) -> IVec:
    g = reduce(gcd, (abs(x) for x in v), 0)
    return tuple(v) if g in (0, 1) else tuple(x // g for x in v)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _ints(v: Sequence) -> IVec:
    return la.primitive(la.vec(v))


# -- double description -----------------------------------------------------------

def _dd(ineqs: Sequence[IVec], eqs: Sequence[IVec], n: int) -> Tuple[List[IVec], List[IVec]]:
    """Extreme rays and a lineality basis of {x : a.x <= 0, e.x = 0} (integer data)."""
    lin = [_ints(v) for v in la.nullspace([la.vec(e) for e in eqs], n)] if eqs else [
        tuple(int(i == j) for j in range(n)) for i in range(n)
    ]
    rays: List[IVec] = []
    tight: List[FrozenSet[int]] = []
    for k, a in enumerate(ineqs):
        vals = [_idot(a, l) for l in lin]
        nz = [i for i, v in enumerate(vals) if v != 0]
        if nz:
            i0 = nz[0]
            d = lin[i0] if vals[i0] < 0 else tuple(-x for x in lin[i0])
            ad = _idot(a, d)
            newlin = []
            for i, l in enumerate(lin):
                if i == i0:
                    continue
                al = vals[i]
                # l - (al/ad) d, scaled by |ad|
                w = _prim(tuple(abs(ad) * x - (al * y * (1 if ad > 0 else -1)) for x, y in zip(l, d)))
                newlin.append(w)
            newrays = []
            for r, t in zip(rays, tight):
                ar = _idot(a, r)
                w = _prim(tuple(abs(ad) * x - (ar * y * (1 if ad > 0 else -1)) for x, y in zip(r, d)))
                newrays.append((w, t | {k}))
            newrays.append((d, frozenset(range(k))))
            lin = [l for l in newlin if any(l)]
            rays = [r for r, _ in newrays]
            tight = [t for _, t in newrays]
            continue
        vals = [_idot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        out = [(rays[i], tight[i]) for i in neg] + [(rays[i], tight[i] | {k}) for i in zer]
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                adjacent = True
                for r in range(len(rays)):
                    if r != p and r != q and common <= tight[r]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                ap, aq = vals[p], vals[q]
                w = _prim(tuple(ap * y - aq * x for x, y in zip(rays[p], rays[q])))
                if any(w):
                    out.append((w, common | {k}))
        rays = [r for r, _ in out]
        tight = [t for _, t in out]
    return rays, lin


# -- generated cones --------------------------------------------------------------

@dataclass(frozen=True)
class GeneratedCone:
    """Canonical form of ``Cone(rays) + span(lineality)`` in ``QQ^n``.

    Lineality is an RREF basis; rays are primitive integer vectors reduced
    modulo the lineality (pivot coordinates zeroed), extreme, and sorted.
    """

    n: int
    rays: Tuple[IVec, ...]
    lineality: Mat

    @classmethod
    def build(cls, rays: Iterable[Sequence], lineality: Iterable[Sequence], n: int) -> "GeneratedCone":
        rays = [la.vec(r) for r in rays]
        lin = [la.vec(l) for l in lineality]
        # the polar's generators are the facets; running DD on them gives extreme rays
        ineqs, eqs = _polar_data(rays, lin, n)
        pr, pl = _dd(ineqs, eqs, n)
        r, l = _dd(pr, pl, n)
        return cls._canon(r, l, n)

    @classmethod
    def _canon(cls, rays: Sequence[IVec], lin: Sequence[IVec], n: int) -> "GeneratedCone":
        lb, piv = la.rref([la.vec(v) for v in lin], n) if lin else ((), ())
        out = set()
        for r in rays:
            v = la.vec(r)
            for row, p in zip(lb, piv):
                if v[p] != 0:
                    v = la.sub(v, la.scale(v[p], row))
            if not la.is_zero(v):
                out.add(_ints(v))
        return cls(n, tuple(sorted(out)), tuple(lb))

    def hrep(self) -> Tuple[Tuple[IVec, ...], Tuple[IVec, ...]]:
        """(ineqs, eqs): the cone is {x : a.x <= 0, e.x = 0}; facets only."""
        ineqs, eqs = _polar_data([la.vec(r) for r in self.rays], self.lineality, self.n)
        pr, pl = _dd(ineqs, eqs, self.n)
        polar = GeneratedCone._canon(pr, pl, self.n)
        return polar.rays, tuple(_ints(v) for v in polar.lineality)

    def polar(self) -> "GeneratedCone":
        """{y : y.x <= 0 for all x in the cone} (plain dot product)."""
        ineqs, eqs = _polar_data([la.vec(r) for r in self.rays], self.lineality, self.n)
        r, l = _dd(ineqs, eqs, self.n)
        return GeneratedCone._canon(r, l, self.n)

    def contains(self, x: Sequence) -> bool:
        ineqs, eqs = self.hrep()
        xv = la.vec(x)
        return all(la.dot(la.vec(e), xv) == 0 for e in eqs) and all(la.dot(la.vec(a), xv) <= 0 for a in ineqs)

    def relint_hrep(self) -> Tuple[Tuple[IVec, ...], Tuple[IVec, ...]]:
        """Relative interior is {x : e.x = 0, a.x < 0} for this pair."""
        return self.hrep()

    def contains_relint(self, x: Sequence) -> bool:
        ineqs, eqs = self.hrep()
        xv = la.vec(x)
        return all(la.dot(la.vec(e), xv) == 0 for e in eqs) and all(la.dot(la.vec(a), xv) < 0 for a in ineqs)

    def dim(self) -> int:
        return la.rank([la.vec(r) for r in self.rays] + list(self.lineality)) if (self.rays or self.lineality) else 0

    def __add__(self, other: "GeneratedCone") -> "GeneratedCone":
        return GeneratedCone.build(
            [la.vec(r) for r in self.rays + other.rays], list(self.lineality) + list(other.lineality), self.n
        )

    def linear_image(self, m: Sequence[Sequence[Fraction]]) -> "GeneratedCone":
        """Image under x -> m x."""
        return GeneratedCone.build(
            [la.mat_vec(m, la.vec(r)) for r in self.rays], [la.mat_vec(m, v) for v in self.lineality], len(m)
        )


def _polar_data(rays, lin, n) -> Tuple[List[IVec], List[IVec]]:
    return [_ints(r) for r in rays if not la.is_zero(r)], [_ints(l) for l in lin if not la.is_zero(l)]


def cone_from_hrep(ineqs: Iterable[Sequence], eqs: Iterable[Sequence], n: int) -> GeneratedCone:
    """{x : a.x <= 0 for a in ineqs, e.x = 0 for e in eqs} as a generated cone."""
    ii = [_ints(a) for a in ineqs if not la.is_zero(la.vec(a))]
    ee = [_ints(e) for e in eqs if not la.is_zero(la.vec(e))]
    r, l = _dd(ii, ee, n)
    return GeneratedCone._canon(r, l, n)


# -- finitely generated convex sets ------------------------------------------------

@dataclass(frozen=True)
class ConvexFace:
    """A face F = C cap {lam = level}; ``vertices``/``rays`` index the set's V-rep."""

    functional: Vec
    level: Fraction
    vertices: FrozenSet[int]
    rays: FrozenSet[int]
    tight: FrozenSet[int]
    dim: int
    tangent: Mat
    normal_cone: GeneratedCone
    _relint: Tuple[Tuple[IVec, ...], Tuple[IVec, ...]] = field(repr=False, compare=False)

    def normal_relint_contains(self, y: Sequence) -> bool:
        ineqs, eqs = self._relint
        yv = la.vec(y)
        return all(la.dot(la.vec(e), yv) == 0 for e in eqs) and all(la.dot(la.vec(a), yv) < 0 for a in ineqs)


class FGConvexSet:
    """``Conv(vertices) + Cone(rays) + span(lineality)`` with exact derived data.

    ``gram`` is the inner product used to identify covectors with vectors.
    """

    def __init__(self, vertices, rays=(), lineality=(), gram: Optional[Sequence[Sequence]] = None):
        verts = [la.vec(v) for v in vertices]
        if not verts:
            raise ConvexGeometryError("empty vertex set")
        n = len(verts[0])
        if any(len(v) != n for v in verts):
            raise ConvexGeometryError("vertices of mixed dimension")
        self.n = n
        self.input_vertices = tuple(verts)
        self.input_rays = tuple(la.vec(r) for r in rays)
        self.input_lineality = tuple(la.vec(l) for l in lineality)
        for r in self.input_rays + self.input_lineality:
            if len(r) != n:
                raise ConvexGeometryError("direction of wrong dimension")
        self.gram: Mat = la.mat(gram) if gram is not None else la.identity(n)
        self._gram_inv = la.inverse(self.gram)
        self._cache: Dict = {}
        self._homog()

    # homogenized cone: (x, t)
    def _homog(self):
        n = self.n
        gens = [v + (Fraction(1),) for v in self.input_vertices] + [r + (Fraction(0),) for r in self.input_rays]
        lin = [l + (Fraction(0),) for l in self.input_lineality]
        hc = GeneratedCone.build(gens, lin, n + 1)
        ineqs, eqs = hc.hrep()
        self.ineqs: Tuple[Tuple[IVec, int], ...] = tuple(
            sorted({(a[:n], -a[n]) for a in ineqs if any(a[:n])})
        )  # a.x <= c
        self.eqs: Tuple[Tuple[IVec, int], ...] = tuple((e[:n], -e[n]) for e in eqs)
        verts, rays = [], []
        for r in hc.rays:
            if r[n] > 0:
                verts.append(tuple(Fraction(x, r[n]) for x in r[:n]))
            else:
                rays.append(tuple(Fraction(x) for x in r[:n]))
        self.vertices: Tuple[Vec, ...] = tuple(sorted(verts))
        self.rays: Tuple[Vec, ...] = tuple(sorted(rays))
        self.lineality: Mat = tuple(tuple(x for x in l[:n]) for l in hc.lineality)

    @classmethod
    def from_hrep(cls, ineqs: Iterable[Tuple[Sequence, object]], eqs: Iterable[Tuple[Sequence, object]] = (), n: Optional[int] = None, gram=None) -> "FGConvexSet":
        """The set {x : a.x <= c, e.x = f}; raises if empty."""
        ineqs = [(la.vec(a), la.frac(c)) for a, c in ineqs]
        eqs = [(la.vec(e), la.frac(f)) for e, f in eqs]
        if n is None:
            n = len((ineqs or eqs)[0][0])
        hi = [a + (-c,) for a, c in ineqs] + [la.zero(n) + (Fraction(-1),)]
        he = [e + (-f,) for e, f in eqs]
        hc = cone_from_hrep(hi, he, n + 1)
        verts = [tuple(Fraction(x, r[n]) for x in r[:n]) for r in hc.rays if r[n] > 0]
        rays = [tuple(Fraction(x) for x in r[:n]) for r in hc.rays if r[n] == 0]
        if not verts:
            raise ConvexGeometryError("empty polyhedron")
        lin = [l[:n] for l in hc.lineality]
        return cls(verts, rays, lin, gram)

    # -- membership ------------------------------------------------------------
    def contains(self, x: Sequence) -> bool:
        xv = la.vec(x)
        return all(la.dot(la.vec(e), xv) == f for e, f in self.eqs) and all(
            la.dot(la.vec(a), xv) <= c for a, c in self.ineqs
        )

    def contains_batch(self, num: np.ndarray, den: int) -> np.ndarray:
        """Membership of the points num[i]/den (integer array, shape (S, n))."""
        ok = np.ones(num.shape[0], dtype=bool)
        if self.ineqs:
            a = np.array([r for r, _ in self.ineqs], dtype=np.int64)
            c = np.array([c * den for _, c in self.ineqs], dtype=np.int64)
            ok &= np.all(num @ a.T <= c, axis=1)
        if self.eqs:
            e = np.array([r for r, _ in self.eqs], dtype=np.int64)
            f = np.array([f * den for _, f in self.eqs], dtype=np.int64)
            ok &= np.all(num @ e.T == f, axis=1)
        return ok

    def intersect(self, other: "FGConvexSet") -> "FGConvexSet":
        return FGConvexSet.from_hrep(
            [(a, c) for a, c in self.ineqs + other.ineqs], [(e, f) for e, f in self.eqs + other.eqs], self.n, self.gram
        )

    # -- cones -------------------------------------------------------------------
    def _to_vector(self, covector: Sequence) -> Vec:
        return la.mat_vec(self._gram_inv, la.vec(covector))

    def _vector_cone(self, covector_cone: GeneratedCone) -> GeneratedCone:
        return covector_cone.linear_image(self._gram_inv)

    @property
    def asymptotic_cone(self) -> GeneratedCone:
        if "asym" not in self._cache:
            self._cache["asym"] = GeneratedCone.build(self.rays, self.lineality, self.n)
        return self._cache["asym"]

    @property
    def dual_cone(self) -> GeneratedCone:
        """{Y : (Y, X) <= 0 for every X in the asymptotic cone}."""
        if "dual" not in self._cache:
            self._cache["dual"] = self._vector_cone(self.asymptotic_cone.polar())
        return self._cache["dual"]

    def tangent_cone(self, h: Sequence) -> GeneratedCone:
        hv = la.vec(h)
        if not self.contains(hv):
            raise ConvexGeometryError("point is not in the set")
        gens = [la.sub(v, hv) for v in self.vertices] + list(self.rays)
        return GeneratedCone.build(gens, self.lineality, self.n)

    def normal_cone_at(self, h: Sequence) -> GeneratedCone:
        return self._vector_cone(self.tangent_cone(h).polar())

    # -- faces -------------------------------------------------------------------
    def _incidence(self):
        if "inc" in self._cache:
            return self._cache["inc"]
        zs = []
        for a, c in self.ineqs:
            av = la.vec(a)
            zv = frozenset(i for i, v in enumerate(self.vertices) if la.dot(av, v) == c)
            zr = frozenset(i for i, r in enumerate(self.rays) if la.dot(av, r) == 0)
            zs.append((zv, zr))
        self._cache["inc"] = zs
        return zs

    def _face_dim(self, vs: FrozenSet[int], rs: FrozenSet[int]) -> Tuple[int, Mat]:
        vl = [self.vertices[i] for i in sorted(vs)]
        dirs = [la.sub(v, vl[0]) for v in vl[1:]] + [self.rays[i] for i in sorted(rs)] + list(self.lineality)
        basis = la.row_space(dirs, self.n)
        return len(basis), basis

    @property
    def faces(self) -> Tuple[ConvexFace, ...]:
        if "faces" in self._cache:
            return self._cache["faces"]
        inc = self._incidence()
        top = (frozenset(range(len(self.vertices))), frozenset(range(len(self.rays))))
        seen = {top}
        stack = [top]
        while stack:
            vs, rs = stack.pop()
            for zv, zr in inc:
                nv, nr = vs & zv, rs & zr
                if nv and (nv, nr) not in seen:
                    seen.add((nv, nr))
                    stack.append((nv, nr))
        faces = []
        for vs, rs in seen:
            tight = frozenset(i for i, (zv, zr) in enumerate(inc) if vs <= zv and rs <= zr)
            normals = [la.vec(self.ineqs[i][0]) for i in sorted(tight)]
            eqn = [la.vec(e) for e, _ in self.eqs]
            lam = la.zero(self.n)
            for nm in normals:
                lam = la.add(lam, nm)
            level = la.dot(lam, self.vertices[min(vs)])
            d, tangent = self._face_dim(vs, rs)
            ncov = GeneratedCone.build(normals, eqn, self.n)
            nvec = self._vector_cone(ncov)
            faces.append(ConvexFace(lam, level, vs, rs, tight, d, tangent, nvec, nvec.hrep()))
        faces.sort(key=lambda f: (-f.dim, sorted(f.vertices), sorted(f.rays)))
        self._cache["faces"] = tuple(faces)
        return self._cache["faces"]

    def face_points(self, f: ConvexFace) -> FGConvexSet:
        return FGConvexSet(
            [self.vertices[i] for i in sorted(f.vertices)], [self.rays[i] for i in sorted(f.rays)], self.lineality, self.gram
        )

    def face_hrep(self, f: ConvexFace):
        """Inequalities and equalities cutting out the face."""
        ineqs = [(a, c) for i, (a, c) in enumerate(self.ineqs) if i not in f.tight]
        eqs = list(self.eqs) + [self.ineqs[i] for i in sorted(f.tight)]
        return ineqs, eqs

    def maximizer_face(self, y: Sequence) -> Optional[ConvexFace]:
        """The face on which the functional (y, .) attains its maximum (None if unbounded)."""
        yc = la.mat_vec(self.gram, la.vec(y))
        if any(la.dot(yc, r) > 0 for r in self.rays) or any(la.dot(yc, l) != 0 for l in self.lineality):
            return None
        vals = [la.dot(yc, v) for v in self.vertices]
        m = max(vals)
        vs = frozenset(i for i, v in enumerate(vals) if v == m)
        rs = frozenset(i for i, r in enumerate(self.rays) if la.dot(yc, r) == 0)
        for f in self.faces:
            if f.vertices == vs and f.rays == rs:
                return f
        raise AssertionError("maximizer set is not a face")

    def to_json(self) -> dict:
        fmt = lambda v: [str(x) for x in v]
        return {
            "vertices": [fmt(v) for v in self.input_vertices],
            "rays": [fmt(v) for v in self.input_rays],
            "lineality": [fmt(v) for v in self.input_lineality],
        }

    @classmethod
    def from_json(cls, d: dict, gram=None) -> "FGConvexSet":
        return cls(d["vertices"], d.get("rays", []), d.get("lineality", []), gram if gram is not None else d.get("gram"))

    def __repr__(self) -> str:
        return f"FGConvexSet(vertices={len(self.vertices)}, rays={len(self.rays)}, lineality={len(self.lineality)})"


def build_fg_convex(vertices, rays=(), lineality=(), gram=None) -> FGConvexSet:
    return FGConvexSet(vertices, rays, lineality, gram)


def face_lattice(c: FGConvexSet) -> Tuple[ConvexFace, ...]:
    return c.faces


def normal_cone_at(c: FGConvexSet, h: Sequence) -> GeneratedCone:
    return c.normal_cone_at(h)


# -- partition of the dual cone -------------------------------------------------------

def partition_counts(c: FGConvexSet, ys: np.ndarray) -> np.ndarray:
    """For integer sample vectors ys (S, n): the number of faces whose a_F^+ contains each."""
    counts = np.zeros(ys.shape[0], dtype=np.int64)
    for f in c.faces:
        ineqs, eqs = f._relint
        ok = np.ones(ys.shape[0], dtype=bool)
        if ineqs:
            ok &= np.all(ys @ np.array(ineqs, dtype=np.int64).T < 0, axis=1)
        if eqs:
            ok &= np.all(ys @ np.array(eqs, dtype=np.int64).T == 0, axis=1)
        counts += ok
    return counts


def dual_cone_membership(c: FGConvexSet, ys: np.ndarray) -> np.ndarray:
    ineqs, eqs = c.dual_cone.hrep()
    ok = np.ones(ys.shape[0], dtype=bool)
    if ineqs:
        ok &= np.all(ys @ np.array(ineqs, dtype=np.int64).T <= 0, axis=1)
    if eqs:
        ok &= np.all(ys @ np.array(eqs, dtype=np.int64).T == 0, axis=1)
    return ok


# -- relative interiors meeting affine slices -------------------------------------

def relint_meets_affine(gens: Sequence[Vec], lineality: Sequence[Vec], proj: Sequence[Sequence[Fraction]], target: Vec) -> bool:
    """Is there y in relint(Cone(gens) + span(lineality)) with proj y = target?

    Decided exactly: with S = {(mu, nu) : sum mu_i P g_i + sum nu_j P l_j = target,
    mu >= 0}, the answer is yes iff S is nonempty and every coordinate mu_i
    is positive somewhere on S.
    """
    m = len(gens)
    k = len(lineality)
    pg = [la.mat_vec(proj, g) for g in gens]
    pl = [la.mat_vec(proj, l) for l in lineality]
    rows = len(target)
    eqs = []
    for r in range(rows):
        eqs.append((tuple(v[r] for v in pg) + tuple(v[r] for v in pl), target[r]))
    ineqs = [(tuple(Fraction(-int(i == j)) for j in range(m + k)), Fraction(0)) for i in range(m)]
    if m + k == 0:
        return la.is_zero(target)
    try:
        s = FGConvexSet.from_hrep(ineqs, eqs, m + k)
    except ConvexGeometryError:
        return False
    for i in range(m):
        if not (any(v[i] > 0 for v in s.vertices) or any(r[i] > 0 for r in s.rays)):
            return False
    return True


# -- projection decomposition ---------------------------------------------------

@dataclass
class ProjectionDecomposition:
    faces: Tuple[ConvexFace, ...]
    samples: int = 0
    preimage_failures: List = field(default_factory=list)
    pairwise_failures: List = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return not self.preimage_failures and not self.pairwise_failures


def _projectors(c: FGConvexSet, b: Sequence[Sequence]) -> Tuple[Mat, Mat, Mat]:
    n = c.n
    bb = la.row_space([la.vec(v) for v in b], n)
    perp = la.orthogonal_complement(bb, c.gram, n)
    p = la.projector(bb, perp, n) if bb else tuple(la.zero(n) for _ in range(n))
    pperp = la.projector(perp, bb, n) if perp else tuple(la.zero(n) for _ in range(n))
    return bb, p, pperp


def decomposition_faces(c: FGConvexSet, b: Sequence[Sequence], xi: Sequence) -> Tuple[ConvexFace, ...]:
    """F(C, xi): faces with xi in the orthogonal projection of a_F^+ to b^perp.

    Checks the dimension hypothesis and the genericity of xi exactly.
    """
    n = c.n
    xi = la.vec(xi)
    bb, p, pperp = _projectors(c, b)
    if any(la.dot(la.mat_vec(c.gram, v), xi) != 0 for v in bb):
        raise ConvexGeometryError("xi is not orthogonal to b")
    dc = c.dual_cone
    span = [la.vec(r) for r in dc.rays] + list(dc.lineality) + list(bb)
    if (la.rank(span) if span else 0) != n:
        raise ConvexGeometryError("dimension hypothesis dim(C^vee + b) = dim fails")
    dim_perp = n - len(bb)
    out = []
    for f in c.faces:
        gens = [la.vec(r) for r in f.normal_cone.rays]
        lin = list(f.normal_cone.lineality)
        pd = la.rank([la.mat_vec(pperp, g) for g in gens + lin]) if (gens or lin) else 0
        hit = relint_meets_affine(gens, lin, pperp, xi)
        if pd < dim_perp and hit:
            raise ConvexGeometryError("xi is not generic: it lies in a deficient projected normal cone")
        if hit:
            out.append(f)
    return tuple(out)


def preimages_in_faces(c: FGConvexSet, faces: Sequence[ConvexFace], p: Mat, y: Vec) -> Tuple[List[Vec], List[int], bool]:
    """Distinct preimages of y under p inside the union of ``faces``.

    Returns (points, indices of faces meeting p^{-1}(y), finite flag).
    """
    n = c.n
    pts: List[Vec] = []
    hit: List[int] = []
    finite = True
    for k, f in enumerate(faces):
        x0 = c.vertices[min(f.vertices)]
        basis = f.tangent
        # x = x0 + sum z_i basis_i, p x = y
        if basis:
            a = la.transpose([la.mat_vec(p, v) for v in basis])
            rhs = la.sub(y, la.mat_vec(p, x0))
            z = la.solve(a, rhs, len(basis))
            if z is None:
                continue
            if la.rank(a) < len(basis):
                ineqs, eqs = c.face_hrep(f)
                eqs = list(eqs) + [(row, yi) for row, yi in zip(p, y)]
                try:
                    sl = FGConvexSet.from_hrep(ineqs, eqs, n)
                except ConvexGeometryError:
                    continue
                hit.append(k)
                if sl.rays or sl.lineality or len(sl.vertices) > 1:
                    finite = False
                pts.extend(sl.vertices)
                continue
            x = la.add(x0, la.vec_mat(z, basis))
        else:
            if la.mat_vec(p, x0) != y:
                continue
            x = x0
        ineqs, eqs = c.face_hrep(f)
        if all(la.dot(la.vec(e), x) == fv for e, fv in eqs) and all(la.dot(la.vec(a_), x) <= cv for a_, cv in ineqs):
            hit.append(k)
            pts.append(x)
    uniq = sorted(set(pts))
    return uniq, hit, finite


def project_decomposition(c: FGConvexSet, b: Sequence[Sequence], xi: Sequence, samples: Sequence[Vec] = ()) -> ProjectionDecomposition:
    """F(C, xi) and a preimage-count certificate on the sampled points of C.

    ``samples`` are points of C; their images under p are the test points.
    """
    faces = decomposition_faces(c, b, xi)
    _, p, _ = _projectors(c, b)
    out = ProjectionDecomposition(faces)
    for x in samples:
        y = la.mat_vec(p, la.vec(x))
        pts, hit, finite = preimages_in_faces(c, faces, p, y)
        out.samples += 1
        if len(pts) != 1 or not finite:
            out.preimage_failures.append((x, y, len(pts)))
            continue
        for i, j in itertools.combinations(hit, 2):
            both = [faces[i], faces[j]]
            if not all(c.contains(pts[0]) and _in_face(c, f, pts[0]) for f in both):
                out.pairwise_failures.append((x, y, i, j))
    return out


def _in_face(c: FGConvexSet, f: ConvexFace, x: Vec) -> bool:
    return la.dot(f.functional, x) == f.level and c.contains(x)


def maximal_faces(faces: Sequence[ConvexFace]) -> Tuple[ConvexFace, ...]:
    return tuple(
        f for f in faces if not any(g is not f and f.vertices <= g.vertices and f.rays <= g.rays and g.dim > f.dim for g in faces)
    )


# -- volumes ------------------------------------------------------------------------

def polytope_volume(points: Sequence[Sequence], lattice: Optional[Sequence[Sequence]] = None) -> Fraction:
    """Exact volume of Conv(points) against a lattice basis (rows; default Z^n).

    Zero when the hull is lower-dimensional.  Uses a pulling triangulation:
    cone each facet not containing the lexicographically first vertex over
    that vertex, recursively.
    """
    pts = [la.vec(p) for p in points]
    if not pts:
        return Fraction(0)
    n = len(pts[0])
    if n == 0:
        return Fraction(1)
    if lattice is not None:
        lt = la.transpose(la.mat(lattice))
        inv = la.inverse(lt)
        pts = [la.mat_vec(inv, p) for p in pts]
    base = pts[0]
    if la.rank([la.sub(p, base) for p in pts[1:]] or [la.zero(n)]) < n:
        return Fraction(0)
    hull = FGConvexSet(pts)
    verts = hull.vertices
    inc = [zv for zv, _ in hull._incidence()]

    def aff_dim(vs: FrozenSet[int]) -> int:
        vl = [verts[i] for i in sorted(vs)]
        return la.rank([la.sub(v, vl[0]) for v in vl[1:]]) if len(vl) > 1 else 0

    def triangulate(vs: FrozenSet[int], d: int) -> List[FrozenSet[int]]:
        if len(vs) == d + 1:
            return [vs]
        v0 = min(vs, key=lambda i: verts[i])
        subs = {vs & z for z in inc}
        out = []
        for s in sorted(subs, key=sorted):
            if v0 in s or len(s) < d or aff_dim(s) != d - 1:
                continue
            for t in triangulate(s, d - 1):
                out.append(t | {v0})
        return out

    total = Fraction(0)
    for simplex in triangulate(frozenset(range(len(verts))), n):
        vl = [verts[i] for i in sorted(simplex)]
        total += abs(la.det([la.sub(v, vl[0]) for v in vl[1:]]))
    return total / factorial(n)
