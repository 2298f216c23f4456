"""Cone indicators tau, tau_hat, phi, the Gamma functions of orthogonal sets,
and exact hull volumes.

Every Gamma-type function is compiled into a :class:`CellSum`: an integer
combination of conjunctions of affine sign conditions on the ambient space.
A cell sum evaluates either at one exact point or on a batch of points with
a common denominator (vectorised integer arithmetic, still exact).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .convex_geometry import ConvexGeometryError, FGConvexSet, polytope_volume
from .linalg import Mat, Vec
from .orthogonal_sets import OrthogonalSet, project_to_face, validate_orthogonal_set
from .root_fan import Face, RootFanDatum

KINDS = ("tau", "tau_hat", "phi")
GT, LE, EQ = ">", "<=", "=="


class ConeCalculusError(ValueError):
    pass


# -- cells ---------------------------------------------------------------------

@dataclass(frozen=True)
class Cond:
    """The condition ``cov . H  op  level`` with op one of >, <=, ==."""

    cov: Vec
    level: Fraction
    op: str

    def holds(self, h: Vec) -> bool:
        v = la.dot(self.cov, h)
        if self.op == GT:
            return v > self.level
        if self.op == LE:
            return v <= self.level
        return v == self.level


@dataclass(frozen=True)
class CellSum:
    """Sum of ``coef * prod(conds)`` over cells."""

    cells: Tuple[Tuple[int, Tuple[Cond, ...]], ...]

    @classmethod
    def const(cls, c: int = 1) -> "CellSum":
        return cls(((c, ()),) if c else ())

    def __add__(self, other: "CellSum") -> "CellSum":
        return CellSum(self.cells + other.cells)

    def __mul__(self, other: "CellSum") -> "CellSum":
        return CellSum(tuple((a * b, ca + cb) for a, ca in self.cells for b, cb in other.cells))

    def scale(self, c: int) -> "CellSum":
        return CellSum(tuple((c * a, cs) for a, cs in self.cells if c * a))

    def __call__(self, h: Sequence) -> int:
        h = la.vec(h)
        return sum(c for c, conds in self.cells if all(k.holds(h) for k in conds))

    def conditions(self) -> Tuple[Cond, ...]:
        seen: Dict[Cond, None] = {}
        for _, conds in self.cells:
            for k in conds:
                seen.setdefault(k)
        return tuple(seen)


class BatchPoints:
    """Points ``num[i] / den`` with integer numerators; exact sign evaluation."""

    def __init__(self, num: np.ndarray, den: int):
        self.num = np.asarray(num, dtype=np.int64)
        self.den = int(den)
        self._cache: Dict[Tuple[Vec, Fraction], np.ndarray] = {}
        self.bound = int(np.abs(self.num).max()) if self.num.size else 0

    def __len__(self) -> int:
        return self.num.shape[0]

    def point(self, i: int) -> Vec:
        return tuple(Fraction(int(x), self.den) for x in self.num[i])

    def sign(self, cov: Vec, level: Fraction) -> np.ndarray:
        """sign(cov . H - level) for every point, exactly."""
        key = (cov, level)
        s = self._cache.get(key)
        if s is not None:
            return s
        d = la.common_denominator(cov)
        w = [int(x * d) for x in cov]
        if self.bound * sum(abs(x) for x in w) >= 2 ** 62:
            raise OverflowError("batch coordinates too large for int64 evaluation")
        v = self.num @ np.array(w, dtype=np.int64)
        t = level * d * self.den
        if t.denominator == 1:
            s = np.sign(v - int(t)).astype(np.int8)
        else:
            s = np.where(v > floor(t), 1, -1).astype(np.int8)
        self._cache[key] = s
        return s

    def truth(self, k: Cond) -> np.ndarray:
        s = self.sign(k.cov, k.level)
        if k.op == GT:
            return s > 0
        if k.op == LE:
            return s <= 0
        return s == 0

    def evaluate(self, f: CellSum) -> np.ndarray:
        out = np.zeros(len(self), dtype=np.int64)
        for c, conds in f.cells:
            m = np.ones(len(self), dtype=bool)
            for k in conds:
                m &= self.truth(k)
            out += c * m
        return out

    def on_walls(self, f: CellSum) -> np.ndarray:
        """Points lying on the hyperplane of some inequality of ``f``."""
        m = np.zeros(len(self), dtype=bool)
        for k in f.conditions():
            if k.op != EQ:
                m |= self.sign(k.cov, k.level) == 0
        return m


# -- cone indicators --------------------------------------------------------------

def _functionals(datum: RootFanDatum, kind: str, p: Face, q: Face) -> Mat:
    pd = datum.pair(p, q)
    if kind == "tau":
        return pd.simple
    if kind in ("tau_hat", "phi"):
        return pd.weights
    raise ConeCalculusError(f"unknown indicator kind {kind!r}")


def indicator_cells(datum: RootFanDatum, kind: str, p: Face, q: Face, shift: Optional[Vec] = None, pullback: Optional[Mat] = None) -> CellSum:
    """The indicator of ``kind`` for (p, q) evaluated at ``pullback(H) - shift``."""
    op = LE if kind == "phi" else GT
    conds = []
    for w in _functionals(datum, kind, p, q):
        cov = la.vec_mat(w, pullback) if pullback is not None else w
        lvl = la.dot(w, shift) if shift is not None else Fraction(0)
        conds.append(Cond(cov, lvl, op))
    return CellSum(((1, tuple(conds)),))


@dataclass(frozen=True)
class ConeIndicatorQuery:
    datum: RootFanDatum
    lower: Face
    upper: Face
    point: Vec
    kind: str


def cone_indicator(q: ConeIndicatorQuery) -> int:
    if q.kind not in KINDS:
        raise ConeCalculusError(f"unknown indicator kind {q.kind!r}")
    h = la.vec(q.point)
    if len(h) != q.datum.dimension:
        raise ConeCalculusError("point has the wrong dimension")
    return indicator_cells(q.datum, q.kind, q.lower, q.upper)(h)


def indicator(datum: RootFanDatum, kind: str, p: Face, q: Face, h: Sequence) -> int:
    return cone_indicator(ConeIndicatorQuery(datum, p, q, la.vec(h), kind))


# -- Gamma functions of orthogonal sets ----------------------------------------------

def faces_over(datum: RootFanDatum, levi_face: Face) -> Tuple[Face, ...]:
    """F(L): faces whose Levi contains that of ``levi_face``."""
    return tuple(f for f in datum.faces if levi_face.levi <= f.levi)


def parabolics_of(datum: RootFanDatum, levi_face: Face) -> Tuple[Face, ...]:
    """P(L): faces with the same Levi as ``levi_face``."""
    return tuple(f for f in datum.faces if f.levi == levi_face.levi)


def gamma_LQ_cells(datum: RootFanDatum, l: Face, q: Face, y: OrthogonalSet) -> CellSum:
    if not l.levi <= q.levi:
        raise ConeCalculusError("L is not contained in the Levi of Q")
    out = CellSum(())
    for p in faces_over(datum, l):
        if p.positive <= q.positive:
            sign = -1 if datum.a(p, q) % 2 else 1
            out = out + indicator_cells(datum, "tau_hat", p, q, project_to_face(y, p)).scale(sign)
    return out


def gamma_LQ(datum: RootFanDatum, l: Face, q: Face, h: Sequence, y: OrthogonalSet) -> int:
    h = la.vec(h)
    if len(h) != datum.dimension:
        raise ConeCalculusError("point has the wrong dimension")
    return gamma_LQ_cells(datum, l, q, y)(h)


def gamma_QR_cells(datum: RootFanDatum, q: Face, r: Face, x: Vec) -> CellSum:
    if not q.positive <= r.positive:
        raise ConeCalculusError(f"faces are not nested: {q.label} !<= {r.label}")
    x = la.vec(x)
    out = CellSum(())
    for p in datum.faces_between(q, r):
        sign = -1 if datum.a(p, r) % 2 else 1
        term = indicator_cells(datum, "tau", q, p) * indicator_cells(datum, "tau_hat", p, r, x)
        out = out + term.scale(sign)
    return out


def gamma_QR(datum: RootFanDatum, q: Face, r: Face, h: Sequence, x: Sequence) -> int:
    return gamma_QR_cells(datum, q, r, la.vec(x))(la.vec(h))


def factorization_cells(datum: RootFanDatum, q: Face, r: Face, x: Vec) -> CellSum:
    """tau_Q^R(H) * phi_Q^R(H - X): the closed form of Gamma_Q^R for X in the closed chamber."""
    return indicator_cells(datum, "tau", q, r) * indicator_cells(datum, "phi", q, r, la.vec(x))


def langlands_cells(datum: RootFanDatum, q: Face, r: Face) -> CellSum:
    """sum_{Q <= P <= R} (-1)^{a_P^R} tau_hat_Q^P tau_P^R; equals delta_{Q,R} off walls."""
    out = CellSum(())
    for p in datum.faces_between(q, r):
        sign = -1 if datum.a(p, r) % 2 else 1
        out = out + (indicator_cells(datum, "tau_hat", q, p) * indicator_cells(datum, "tau", p, r)).scale(sign)
    return out


def in_closed_chamber(datum: RootFanDatum, q: Face, r: Face, x: Vec) -> bool:
    """X lies in the closure of the positive cone of Q relative to R."""
    return all(la.dot(s, x) >= 0 for s in datum.pair(q, r).simple)


# -- hull volumes -----------------------------------------------------------------

def relative_space(datum: RootFanDatum, l: Face, q: Face) -> Mat:
    """Basis of A_L^Q: vectors of A_L killed by the projection to A_Q."""
    n = datum.dimension
    al = datum.center_basis(l.levi)
    pq = datum.projection(q.levi)
    m = [la.mat_vec(pq, v) for v in al]
    coeffs = la.nullspace(la.transpose(m), len(al)) if al else ()
    return la.row_space([la.vec_mat(c, al) for c in coeffs], n)


def _measure_basis(datum: RootFanDatum, l: Face, q: Face) -> Mat:
    sub = relative_space(datum, l, q)
    return la.saturated_sublattice(datum.space.lattice, sub, datum.dimension)


def hull_points(datum: RootFanDatum, l: Face, q: Face, y: OrthogonalSet) -> Tuple[Vec, ...]:
    return tuple(project_to_face(y, p) for p in parabolics_of(datum, l) if p.positive <= q.positive)


def hull_volume(datum: RootFanDatum, l: Face, q: Face, y: OrthogonalSet) -> Fraction:
    """Volume of Conv{Y_P : P in P(L), P <= Q} in A_L^Q, against the lattice points of A_L^Q."""
    if not validate_orthogonal_set(y).is_positive:
        raise ConeCalculusError("hull volume needs a positive orthogonal set")
    pts = hull_points(datum, l, q, y)
    basis = _measure_basis(datum, l, q)
    if not basis:
        return Fraction(1)
    base = pts[0]
    coords = []
    for p in pts:
        c = la.coordinates(la.sub(p, base), basis)
        if c is None:
            raise ConeCalculusError("hull points leave the affine space Y_Q + A_L^Q")
        coords.append(c)
    return polytope_volume(coords)


def integrate_cells(f: CellSum, origin: Vec, basis: Mat, box: Tuple[Vec, Vec]) -> Fraction:
    """Exact integral of f over origin + basis * u, u in a box, in u-coordinates.

    Each cell is a polyhedron; intersected with the box it is a polytope whose
    volume is computed exactly.  Independent of any convexity of f's support.
    """
    d = len(basis)
    lo, hi = box
    total = Fraction(0)
    for coef, conds in f.cells:
        ineqs = []
        for i in range(d):
            e = tuple(Fraction(int(i == j)) for j in range(d))
            ineqs.append((e, hi[i]))
            ineqs.append((la.neg(e), -lo[i]))
        eqs = []
        for k in conds:
            a = tuple(la.dot(k.cov, b) for b in basis)
            c = k.level - la.dot(k.cov, origin)
            if k.op == EQ:
                eqs.append((a, c))
            elif k.op == LE:
                ineqs.append((a, c))
            else:
                ineqs.append((la.neg(a), -c))
        if eqs:
            continue
        try:
            poly = FGConvexSet.from_hrep(ineqs, (), d)
        except ConvexGeometryError:
            continue
        total += coef * polytope_volume(poly.vertices)
    return total


def gamma_integral(datum: RootFanDatum, l: Face, q: Face, y: OrthogonalSet) -> Fraction:
    """Integral of Gamma_L^Q(., Y) over A_L^Q by exact region decomposition."""
    basis = _measure_basis(datum, l, q)
    pts = hull_points(datum, l, q, y)
    base = pts[0]
    coords = [la.coordinates(la.sub(p, base), basis) for p in pts]
    if not basis:
        return Fraction(gamma_LQ(datum, l, q, base, y))
    d = len(basis)
    lo = tuple(min(c[i] for c in coords) - 1 for i in range(d))
    hi = tuple(max(c[i] for c in coords) + 1 for i in range(d))
    return integrate_cells(gamma_LQ_cells(datum, l, q, y), base, basis, (lo, hi))
