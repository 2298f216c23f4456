"""Orthogonal sets, their projections, affine gluings and quasi-polynomials.

An orthogonal set on a datum assigns a point to each chamber such that the
points of adjacent chambers differ by a multiple of the wall coroot.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from functools import reduce
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg as la
from .linalg import Mat, Vec
from .root_fan import Face, Restriction, RootFanDatum

MODES = ("plain", "twisted", "iota")


class OrthogonalSetError(ValueError):
    pass


# -- orthogonal sets ---------------------------------------------------------------

class OrthogonalSet:
    """A family ``points[chamber label]`` of rational vectors on ``datum``."""

    def __init__(self, datum: RootFanDatum, points: Mapping[str, Sequence], mode: str = "plain"):
        if mode not in MODES:
            raise OrthogonalSetError(f"unknown mode {mode!r}")
        self.datum = datum
        self.mode = mode
        labels = {c.label for c in datum.chambers}
        pts = {}
        for k, v in points.items():
            if k not in labels:
                raise OrthogonalSetError(f"{k!r} is not a chamber")
            v = la.vec(v)
            if len(v) != datum.dimension:
                raise OrthogonalSetError("vector dimension mismatch")
            pts[k] = v
        missing = labels - set(pts)
        if missing:
            raise OrthogonalSetError(f"missing chamber(s) {sorted(missing)}")
        self.points: Dict[str, Vec] = dict(sorted(pts.items()))

    def __getitem__(self, chamber: Face) -> Vec:
        return self.points[chamber.label]

    def __add__(self, other: "OrthogonalSet") -> "OrthogonalSet":
        if other.datum is not self.datum:
            raise OrthogonalSetError("sets live on different data")
        return OrthogonalSet(self.datum, {k: la.add(v, other.points[k]) for k, v in self.points.items()}, self.mode)

    def __eq__(self, other) -> bool:
        return isinstance(other, OrthogonalSet) and other.datum is self.datum and other.points == self.points

    def __hash__(self):
        return hash(tuple(self.points.items()))

    def translate(self, t: Sequence) -> "OrthogonalSet":
        t = la.vec(t)
        return OrthogonalSet(self.datum, {k: la.add(v, t) for k, v in self.points.items()}, self.mode)

    def scale(self, c) -> "OrthogonalSet":
        return OrthogonalSet(self.datum, {k: la.scale(c, v) for k, v in self.points.items()}, self.mode)

    def project(self, q: Face) -> Vec:
        return project_to_face(self, q)

    def to_json(self) -> dict:
        return {"mode": self.mode, "points": {k: [str(x) for x in v] for k, v in self.points.items()}}

    @classmethod
    def from_json(cls, datum: RootFanDatum, d: Mapping) -> "OrthogonalSet":
        return cls(datum, d["points"], d.get("mode", "plain"))

    @classmethod
    def zero(cls, datum: RootFanDatum, mode: str = "plain") -> "OrthogonalSet":
        return cls(datum, {c.label: la.zero(datum.dimension) for c in datum.chambers}, mode)

    def __repr__(self) -> str:
        return f"OrthogonalSet({self.datum.name}, {self.mode}, {len(self.points)} points)"


@dataclass(frozen=True)
class OrthoReport:
    is_orthogonal: bool
    is_positive: bool
    depth: Fraction
    norm: Fraction
    wall_scalars: Tuple[Tuple[str, str, Optional[Fraction]], ...] = field(repr=False)


def wall_scalar(datum: RootFanDatum, y: OrthogonalSet, p: Face, i: int, q: Face) -> Optional[Fraction]:
    """s with Y_P - Y_Q = s * alpha_i^vee (alpha_i simple for P), or None."""
    diff = la.sub(y[p], y[q])
    cor = datum.coroots[i]
    k = next(j for j, x in enumerate(cor) if x != 0)
    s = diff[k] / cor[k]
    return s if la.scale(s, cor) == diff else None


def validate_orthogonal_set(y: OrthogonalSet) -> OrthoReport:
    d = y.datum
    ws = []
    ortho, nonneg = True, True
    vals = []
    for p in d.chambers:
        for i, q in d.walls(p):
            s = wall_scalar(d, y, p, i, q)
            ws.append((p.label, q.label, s))
            if s is None:
                ortho = False
            elif s < 0:
                nonneg = False
        for i in d.simple_roots_at(p.positive, frozenset()):
            vals.append(la.dot(d.roots[i], y[p]))
    depth = min(vals) if vals else Fraction(0)
    norm = max((abs(v) for v in vals), default=Fraction(0))
    return OrthoReport(ortho, ortho and nonneg and depth >= 0, depth, norm, tuple(ws))


def project_to_face(y: OrthogonalSet, q: Face) -> Vec:
    d = y.datum
    vals = {d.project(q, y[p]) for p in d.chambers if p.positive <= q.positive}
    if len(vals) != 1:
        raise OrthogonalSetError(f"projection to {q.label} depends on the chamber: input is not orthogonal")
    return vals.pop()


def restrict_family(y: OrthogonalSet, res: Restriction, mode: str = "iota") -> OrthogonalSet:
    """The family (X_{P,iota}) on the restricted datum: project X_P for the lifted faces."""
    if y.datum is not res.parent:
        raise OrthogonalSetError("family does not live on the parent datum")
    pts = {}
    for c in res.datum.chambers:
        f = res.lift_face(c)
        pts[c.label] = res.project(project_to_face(y, f))
    return OrthogonalSet(res.datum, pts, mode)


# -- Weyl transport and affine gluing -----------------------------------------------

def _reflection(datum: RootFanDatum, i: int) -> Mat:
    n = datum.dimension
    a, c = datum.roots[i], datum.coroots[i]
    return tuple(tuple(Fraction(int(r == s)) - c[r] * a[s] for s in range(n)) for r in range(n))


def transport(datum: RootFanDatum, p: Face, q: Face) -> Mat:
    """The Weyl element carrying chamber p to chamber q, composed along a gallery."""
    key = ("transport", p.label, q.label)
    if key in datum._cache:
        return datum._cache[key]
    prev: Dict[str, Tuple[str, int]] = {p.label: ("", -1)}
    dq = deque([p])
    while dq:
        c = dq.popleft()
        if c.label == q.label:
            break
        for i, nb in datum.walls(c):
            if nb.label not in prev:
                prev[nb.label] = (c.label, i)
                dq.append(nb)
    steps = []
    cur = q.label
    while cur != p.label:
        src, i = prev[cur]
        steps.append(i)
        cur = src
    w = la.identity(datum.dimension)
    for i in reversed(steps):
        w = la.mat_mul(_reflection(datum, i), w)
    # sanity: w maps p onto q
    h = _interior_point(datum, p)
    if datum.face_of_point(la.mat_vec(w, h)).positive != q.positive:
        raise OrthogonalSetError("gallery transport does not map the chambers")
    datum._cache[key] = w
    return w


def _interior_point(datum: RootFanDatum, c: Face) -> Vec:
    simple = datum.simple_roots_at(c.positive, frozenset())
    h = la.zero(datum.dimension)
    for w in datum._coweights(simple):
        h = la.add(h, w)
    return h


class GluingError(OrthogonalSetError):
    pass


@dataclass
class AffineGluing:
    """Offsets ``offsets[(P, Q)]`` with point_Q = I_{P,Q}(point_P) + offset.

    The chamber set is that of ``datum`` (for iota data: the restricted datum,
    whose chambers are the minimal iota-split faces).
    """

    datum: RootFanDatum
    offsets: Dict[Tuple[str, str], Vec]
    base: str

    def check(self) -> None:
        d = self.datum
        labels = [c.label for c in d.chambers]
        byl = {c.label: c for c in d.chambers}
        for p in labels:
            if not la.is_zero(self.offsets[(p, p)]):
                raise GluingError(f"nonzero offset Y_({p},{p})")
        for p, q, r in itertools.product(labels, repeat=3):
            lhs = self.offsets[(p, r)]
            rhs = la.add(la.mat_vec(transport(d, byl[q], byl[r]), self.offsets[(p, q)]), self.offsets[(q, r)])
            if lhs != rhs:
                raise GluingError(f"cocycle fails on triple ({p}, {q}, {r})")
        for p in d.chambers:
            for i, q in d.walls(p):
                off = self.offsets[(p.label, q.label)]
                if not la.in_span(off, [d.coroots[i]]):
                    raise GluingError(f"offset across wall ({p.label}, {q.label}) leaves the coroot line")


def glue_affine_family(g: AffineGluing, base_point: Sequence) -> OrthogonalSet:
    g.check()
    d = g.datum
    byl = {c.label: c for c in d.chambers}
    b = byl[g.base]
    x = la.vec(base_point)
    pts = {c.label: la.add(la.mat_vec(transport(d, b, c), x), g.offsets[(g.base, c.label)]) for c in d.chambers}
    return OrthogonalSet(d, pts, "iota")


def read_offsets(y: OrthogonalSet, base: Optional[str] = None) -> AffineGluing:
    d = y.datum
    offs = {}
    for p in d.chambers:
        for q in d.chambers:
            offs[(p.label, q.label)] = la.sub(y[q], la.mat_vec(transport(d, p, q), y[p]))
    return AffineGluing(d, offs, base or d.chambers[0].label)


def gluing_from_wall_offsets(datum: RootFanDatum, base: str, offsets_from_base: Mapping[str, Sequence]) -> AffineGluing:
    """The gluing generated by offsets (base, Q); other pairs follow from the cocycle."""
    ob = {k: la.vec(v) for k, v in offsets_from_base.items()}
    for c in datum.chambers:
        ob.setdefault(c.label, la.zero(datum.dimension))
    offs = {}
    for p in datum.chambers:
        for q in datum.chambers:
            # Y_(p,q) = Y_(b,q) - I_(p,q) Y_(b,p)
            offs[(p.label, q.label)] = la.sub(ob[q.label], la.mat_vec(transport(datum, p, q), ob[p.label]))
    return AffineGluing(datum, offs, base)


# -- lattices and quasi-polynomials -----------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """A rational lattice (rows of ``basis``) and a bound on character orders."""

    basis: Mat
    order_bound: int = 1

    def __post_init__(self):
        if self.basis and la.rank(self.basis) != len(self.basis):
            raise OrthogonalSetError("lattice basis is not independent")
        if self.order_bound < 1:
            raise OrthogonalSetError("order bound must be >= 1")

    def point(self, m: Sequence[int]) -> Vec:
        return la.vec_mat([Fraction(x) for x in m], self.basis)


def _lcm_upto(k: int) -> int:
    return reduce(la.lcm, range(1, k + 1), 1)


def _monomials(d: int, r: int) -> List[Tuple[int, ...]]:
    out = [e for e in itertools.product(range(r + 1), repeat=d) if sum(e) <= r]
    return sorted(out, key=lambda e: (sum(e), tuple(-x for x in e)))


def _mono(m: Sequence[int], e: Sequence[int]) -> Fraction:
    v = Fraction(1)
    for x, k in zip(m, e):
        v *= Fraction(x) ** k
    return v


class QuasiPolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class PolyExpFunction:
    """A quasi-polynomial on Z^d: on each residue class mod ``period`` a polynomial.

    ``constituents[c]`` maps exponent tuples to rational coefficients.  The
    character expansion sum_mu Q_mu(m) mu(m) is available from :meth:`terms`.
    """

    dim: int
    period: int
    constituents: Tuple[Tuple[Tuple[int, ...], Tuple[Tuple[Tuple[int, ...], Fraction], ...]], ...]
    degree_bound: int
    tag: Optional[str] = None

    def __call__(self, m: Sequence[int]) -> Fraction:
        c = tuple(x % self.period for x in m)
        poly = dict(self.constituents)[c]
        return sum((coef * _mono(m, e) for e, coef in poly), Fraction(0))

    @property
    def degree(self) -> int:
        return max((sum(e) for _, poly in self.constituents for e, c in poly if c != 0), default=0)

    def terms(self) -> List[Tuple[Tuple[Tuple[int, int], ...], Dict[Tuple[int, ...], object]]]:
        """Character expansion: [(((order, residue) per direction), {exponent: coeff})].

        Coefficients are Fractions when rational, else exact sympy numbers.
        """
        import sympy

        n = self.period
        d = self.dim
        cons = dict(self.constituents)
        out = []
        for s in itertools.product(range(n), repeat=d):
            coeffs: Dict[Tuple[int, ...], object] = {}
            for c, poly in cons.items():
                phase = sum(si * ci for si, ci in zip(s, c)) % n
                z = sympy.exp(-2 * sympy.pi * sympy.I * sympy.Rational(phase, n)) if phase else sympy.Integer(1)
                for e, coef in poly:
                    coeffs[e] = coeffs.get(e, 0) + z * sympy.Rational(coef.numerator, coef.denominator)
            clean = {}
            for e, v in coeffs.items():
                v = sympy.nsimplify(sympy.expand_complex(v / n ** d))
                if v != 0:
                    clean[e] = Fraction(int(v.p), int(v.q)) if v.is_Rational else v
            if clean:
                char = tuple((n // gcd(n, si), si // gcd(n, si)) if si else (1, 0) for si in s)
                out.append((char, dict(sorted(clean.items()))))
        out.sort(key=lambda t: t[0])
        return out

    def to_json(self) -> dict:
        terms = []
        for char, poly in self.terms():
            terms.append({
                "character": [list(x) for x in char],
                "polynomial": [[list(e), str(c)] for e, c in poly.items()],
            })
        return {"tag": self.tag, "dim": self.dim, "degree_bound": self.degree_bound, "period": self.period, "terms": terms}


def fit_quasi_polynomial(samples: Mapping[Sequence[int], object], r: int, order_bound: int = 1, tag: Optional[str] = None) -> PolyExpFunction:
    """The unique quasi-polynomial of degree <= r and period lcm(1..order_bound) through the samples.

    Each residue class is fitted by exact elimination over all of its
    samples, so any surplus samples act as held-out checks.  Raises
    :class:`QuasiPolynomialError` when a class is under-determined or the
    samples are inconsistent with the class.
    """
    if not samples:
        raise QuasiPolynomialError("no samples")
    pts = {tuple(int(x) for x in k): la.frac(v) for k, v in samples.items()}
    d = len(next(iter(pts)))
    n = _lcm_upto(order_bound)
    monos = _monomials(d, r)
    classes: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for m in sorted(pts):
        classes.setdefault(tuple(x % n for x in m), []).append(m)
    cons = []
    for c in itertools.product(range(n), repeat=d):
        ms = classes.get(c, [])
        a = [[_mono(m, e) for e in monos] for m in ms]
        b = [pts[m] for m in ms]
        if not ms or la.rank(a) < len(monos):
            raise QuasiPolynomialError(f"residue class {c} is under-determined")
        sol = la.solve(a, b, len(monos))
        if sol is None:
            raise QuasiPolynomialError(f"samples in residue class {c} are not polynomial of degree <= {r}")
        cons.append((c, tuple((e, x) for e, x in zip(monos, sol))))
    return _reduce_period(PolyExpFunction(d, n, tuple(cons), r, tag))


def _reduce_period(f: PolyExpFunction) -> PolyExpFunction:
    """Replace the period by its smallest divisor that describes the same function."""
    cons = dict(f.constituents)
    for p in sorted(k for k in range(1, f.period + 1) if f.period % k == 0):
        if all(cons[c] == cons[tuple(x % p for x in c)] for c in cons):
            new = tuple((c, cons[c]) for c in itertools.product(range(p), repeat=f.dim))
            return PolyExpFunction(f.dim, p, new, f.degree_bound, f.tag)
    return f


# -- the cone of positive orthogonal sets ------------------------------------------

def _flat(datum: RootFanDatum) -> Tuple[List[str], int]:
    return [c.label for c in datum.chambers], datum.dimension


def positive_cone(datum: RootFanDatum):
    """Generated cone of positive orthogonal sets, flattened chamber by chamber.

    Equalities: differences across walls lie on the coroot line.
    Inequalities: wall scalars are nonnegative.  The lineality is the space
    of translations.
    """
    from .convex_geometry import cone_from_hrep

    key = "positive_orthogonal_cone"
    if key in datum._cache:
        return datum._cache[key]
    labels, n = _flat(datum)
    pos = {l: i * n for i, l in enumerate(labels)}
    size = len(labels) * n
    eqs, ineqs = [], []
    for p in datum.chambers:
        for i, q in datum.walls(p):
            cor = datum.coroots[i]
            for a in la.complement_annihilator([cor], n):
                row = [Fraction(0)] * size
                for j in range(n):
                    row[pos[p.label] + j] += a[j]
                    row[pos[q.label] + j] -= a[j]
                eqs.append(tuple(row))
            k = next(j for j, x in enumerate(cor) if x != 0)
            row = [Fraction(0)] * size
            row[pos[p.label] + k] -= 1 / cor[k]
            row[pos[q.label] + k] += 1 / cor[k]
            ineqs.append(tuple(row))
    cone = cone_from_hrep(ineqs, eqs, size)
    datum._cache[key] = cone
    return cone


def _unflatten(datum: RootFanDatum, v: Sequence[Fraction], mode: str = "plain") -> OrthogonalSet:
    labels, n = _flat(datum)
    return OrthogonalSet(datum, {l: tuple(v[i * n:(i + 1) * n]) for i, l in enumerate(labels)}, mode)


def random_orthogonal_set(datum: RootFanDatum, rng, positive: bool = True, scale: int = 3, den: int = 1, translate: bool = True) -> OrthogonalSet:
    """A random orthogonal set: nonnegative rational combination of the extreme
    positive families, plus a random translation.  Wall scalars may take
    either sign when ``positive`` is false.  Large data fall back to sums of
    Weyl-orbit families (the full cone is only computed up to 24 chambers)."""
    if len(datum.chambers) > 24:
        return _random_orbit_sum(datum, rng, positive, scale, den, translate)
    cone = positive_cone(datum)
    size = cone.n
    v = [Fraction(0)] * size
    for r in cone.rays:
        c = Fraction(int(rng.integers(0, scale * den + 1)), den)
        if not positive:
            c -= Fraction(scale, 2)
        v = [a + c * b for a, b in zip(v, r)]
    if translate:
        for l in cone.lineality:
            c = Fraction(int(rng.integers(-scale * den, scale * den + 1)), den)
            v = [a + c * b for a, b in zip(v, l)]
    return _unflatten(datum, v)


def weyl_orbit_family(datum: RootFanDatum, base: Face, t: Sequence) -> OrthogonalSet:
    """Y_P = w_P(T) where w_P carries ``base`` to P; positive iff T is in the closed base chamber."""
    t = la.vec(t)
    return OrthogonalSet(datum, {c.label: la.mat_vec(transport(datum, base, c), t) for c in datum.chambers})


def _random_orbit_sum(datum: RootFanDatum, rng, positive: bool, scale: int, den: int, translate: bool) -> OrthogonalSet:
    base = datum.chambers[0]
    cw = datum._coweights(datum.simple_roots_at(base.positive, frozenset()))
    t = la.zero(datum.dimension)
    for w in cw:
        c = Fraction(int(rng.integers(0, scale * den + 1)), den)
        if not positive:
            c -= Fraction(scale, 2)
        t = la.add(t, la.scale(c, w))
    y = weyl_orbit_family(datum, base, t)
    if translate:
        shift = [Fraction(int(rng.integers(-scale * den, scale * den + 1)), den) for _ in range(datum.dimension)]
        y = y.translate(shift)
    return y
