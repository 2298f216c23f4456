"""Split-torus lattice-sum model of germ-fan weights.

The compact-torus integral factorizes into unit integrals J(m), one per
simple small root, so a weight is the exact finite sum

    sum_{H in L} Gamma(H, X) prod_{alpha in Delta_x} J(k_alpha + <alpha, H>).

Conjugating u by a lattice point t shifts k_alpha by <alpha, t>; the
translation-equivariance test pins this sign convention down.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .cone_calculus import BatchPoints, CellSum
from .convex_geometry import ConvexGeometryError, FGConvexSet
from .gamma_bx import (
    DescentCoefficients,
    GermFanConfig,
    GermFanError,
    _levi_span,
    gamma_cells,
    gamma_iota_cells,
    gamma_q_iota_cells,
    hull_support,
)
from .linalg import Mat, Vec
from .orthogonal_sets import (
    OrthogonalSet,
    PolyExpFunction,
    QuasiPolynomialError,
    fit_quasi_polynomial,
    project_to_face,
    validate_orthogonal_set,
    weyl_orbit_family,
)

MODES = ("plain", "iota", "q_iota")


class PadicWeightError(ValueError):
    pass


# -- unit integrals ------------------------------------------------------------------

def unit_integral(q: int, c0: int, m: int) -> Fraction:
    """Average of psi(w^m x) over units x, psi of conductor exponent c0."""
    if q < 2:
        raise PadicWeightError("residue cardinality must be >= 2")
    if m >= -c0:
        return Fraction(1)
    if m == -c0 - 1:
        return Fraction(-1, q - 1)
    return Fraction(0)


@dataclass(frozen=True)
class UnitIntegralTable:
    q: int
    c0: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise PadicWeightError("residue cardinality must be >= 2")

    def __call__(self, m: int) -> Fraction:
        return unit_integral(self.q, self.c0, m)

    def verify(self, radius: int = 6) -> bool:
        """Compare with the residue-class oracle for |m| <= radius (prime q only)."""
        return all(self(m) == unit_integral_oracle(self.q, self.c0, m) for m in range(-radius, radius + 1))


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def unit_integral_oracle(p: int, c0: int, m: int) -> Fraction:
    """Finite Riemann sum over Z_p^x / (1 + p^N Z_p) with psi(y) = exp(2 pi i {p^c0 y}_p)."""
    if not _is_prime(p):
        raise PadicWeightError("the residue-class oracle needs a prime residue cardinality")
    e = m + c0
    if e >= 0:
        return Fraction(1)
    n = max(2, -e)
    mod = p ** n
    scale = p ** (-e)
    total = 0j
    count = 0
    for x in range(mod):
        if x % p == 0:
            continue
        # {p^e x}_p = (x mod p^-e) / p^-e
        total += cmath.exp(2j * math.pi * (x % scale) / scale)
        count += 1
    avg = total / count
    if abs(avg.imag) > 1e-9:
        raise AssertionError("character average is not real")
    out = Fraction(avg.real).limit_denominator(p * p)
    if abs(float(out) - avg.real) > 1e-9:
        raise AssertionError("character average is not a small rational")
    return out


# -- scenarios -----------------------------------------------------------------------

@dataclass(frozen=True)
class PadicCharacterData:
    """q, conductor exponent c0 and valuations k_alpha of the simple-root coordinates of u."""

    q: int
    c0: int = 0
    k: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.q < 2:
            raise PadicWeightError("residue cardinality must be >= 2")
        object.__setattr__(self, "k", tuple(sorted((int(i), int(v)) for i, v in dict(self.k).items())))

    @property
    def table(self) -> UnitIntegralTable:
        return UnitIntegralTable(self.q, self.c0)

    @property
    def valuations(self) -> Dict[int, int]:
        return dict(self.k)

    @property
    def sigma(self) -> int:
        return max([1] + [abs(v) for _, v in self.k])

    def shifted(self, shifts: Mapping[int, int]) -> "PadicCharacterData":
        kv = self.valuations
        return replace(self, k=tuple((i, kv[i] + shifts.get(i, 0)) for i in kv))


@dataclass
class PadicWeightScenario:
    cfg: GermFanConfig
    x: OrthogonalSet
    chars: PadicCharacterData
    lattice: Optional[Mat] = None
    mode: str = "plain"
    face: Optional[str] = None
    name: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise PadicWeightError(f"unknown mode {self.mode!r}")
        if self.mode == "q_iota" and self.face is None:
            raise PadicWeightError("q_iota mode needs a face")
        if self.mode != "plain" and not self.cfg.has_iota:
            raise PadicWeightError("iota modes need an involution")
        delta = set(self.cfg.small_simple)
        if set(self.chars.valuations) != delta:
            raise PadicWeightError(f"valuations must be given exactly for the simple small roots {sorted(delta)}")

    def with_x(self, x: OrthogonalSet) -> "PadicWeightScenario":
        return replace(self, x=x)

    def with_chars(self, chars: PadicCharacterData) -> "PadicWeightScenario":
        return replace(self, chars=chars)

    def with_mode(self, mode: str, face: Optional[str] = None) -> "PadicWeightScenario":
        return replace(self, mode=mode, face=face)

    @property
    def rank(self) -> int:
        """Degree bound r for the quasi-polynomial in the translation variable."""
        return len(summation_lattice(self))


def summation_lattice(s: PadicWeightScenario) -> Mat:
    """L projected off A_G (and off the iota-fixed space in iota modes)."""
    b = s.cfg.big
    n = b.dimension
    lat = la.mat(s.lattice) if s.lattice is not None else b.space.lattice
    kill = list(s.cfg.center)
    if s.mode != "plain":
        kill += list(s.cfg.iota_fixed)
    kill = list(la.row_space(kill, n)) if kill else []
    if kill:
        p = la.orthogonal_projector(kill, b.space.inner_product, n)
        comp = [tuple(a - c for a, c in zip(v, la.mat_vec(p, v))) for v in lat]
    else:
        comp = list(lat)
    basis = la.lattice_basis([v for v in comp if not la.is_zero(v)])
    for i in s.cfg.small_simple:
        for v in basis:
            if la.dot(b.roots[i], v).denominator != 1:
                raise PadicWeightError("simple small root has a non-integral pairing with the lattice")
    return basis


def gamma_function(s: PadicWeightScenario) -> CellSum:
    cfg = s.cfg
    if s.mode == "plain":
        return gamma_cells(cfg, cfg.big.full_face, s.x)
    if s.mode == "iota":
        return gamma_iota_cells(cfg, cfg.restriction.datum.full_face, s.x)
    return gamma_q_iota_cells(cfg, cfg.big.face_by_label(s.face), s.x)


def support_hrep(s: PadicWeightScenario) -> Tuple[List[Tuple[Vec, Fraction]], List[Tuple[Vec, Fraction]]]:
    """Half-spaces and equations (on the big space) containing the support of the Gamma factor."""
    cfg = s.cfg
    b = cfg.big
    n = b.dimension
    if s.mode in ("plain", "iota"):
        h = hull_support(cfg, s.x, s.mode)
        return list(h.ineqs), list(h.eqs)
    q = b.face_by_label(s.face)
    verts = [s.x[c] for c in cfg.chambers if c.positive <= q.positive]
    if not verts:
        raise PadicWeightError(f"no chamber of the germ fan lies below {q.label}")
    rays = [la.neg(b.coroots[i]) for i in cfg.small_simple]
    sq = FGConvexSet(verts, rays, list(b.center_basis(q.levi)), b.space.inner_product)
    aq = list(_levi_span(b, q))
    other = list(la.row_space(list(cfg.iota_fixed) + list(cfg.center), n))
    span = aq + other
    rest = list(la.orthogonal_complement(span, b.space.inner_product, n)) if len(span) < n else []
    a = la.projector(aq, other + rest, n)
    xq = project_to_face(s.x, q)
    shift = la.sub(xq, la.mat_vec(a, xq))
    ineqs = [(la.vec_mat(c, a), f - la.dot(c, shift)) for c, f in sq.ineqs]
    eqs = [(la.vec_mat(c, a), f - la.dot(c, shift)) for c, f in sq.eqs]
    for ann in (la.complement_annihilator(span, n) if span else la.identity(n)):
        eqs.append((ann, la.dot(ann, xq)))
    return ineqs, eqs


@dataclass(frozen=True)
class WeightResult:
    value: Fraction
    points: int
    box: Tuple[Tuple[int, int], ...]
    support_certified: bool


def _slab(s: PadicWeightScenario) -> List[Tuple[Vec, Fraction]]:
    """-<alpha, H> <= k_alpha + c0 + 1: outside, some J factor vanishes."""
    b = s.cfg.big
    kv = s.chars.valuations
    return [(la.neg(b.roots[i]), Fraction(kv[i] + s.chars.c0 + 1)) for i in s.cfg.small_simple]


def weight_sum_detailed(s: PadicWeightScenario) -> WeightResult:
    if s.mode != "q_iota" and not validate_orthogonal_set(s.x).is_orthogonal:
        raise PadicWeightError("orthogonal set expected")
    b = s.cfg.big
    basis = summation_lattice(s)
    m = len(basis)
    gamma = gamma_function(s)
    if m == 0:
        h = la.zero(b.dimension)
        return WeightResult(Fraction(gamma(h)), 1, (), True)
    bt = la.transpose(basis)
    try:
        ineqs, eqs = support_hrep(s)
    except GermFanError as e:
        raise PadicWeightError(f"support bound unavailable: {e}") from e
    ineqs = ineqs + _slab(s)
    zin = [(la.vec_mat(a, bt), c) for a, c in ineqs]
    zeq = [(la.vec_mat(e, bt), f) for e, f in eqs]
    try:
        region = FGConvexSet.from_hrep(zin, zeq, m)
    except ConvexGeometryError:
        region = None
    if region is not None and (region.rays or region.lineality):
        raise PadicWeightError("infinite support: the Gamma factor times the unit integrals is not compactly supported")
    if region is None:
        return WeightResult(Fraction(0), 0, (), True)
    lo = [math.floor(min(v[i] for v in region.vertices)) - 1 for i in range(m)]
    hi = [math.ceil(max(v[i] for v in region.vertices)) + 1 for i in range(m)]
    grids = np.meshgrid(*[np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)], indexing="ij")
    z = np.stack([g.ravel() for g in grids], axis=1)
    den = la.common_denominator([x for row in basis for x in row])
    bint = np.array([[int(x * den) for x in row] for row in basis], dtype=np.int64)
    num = z @ bint
    pts = BatchPoints(num, den)
    g = pts.evaluate(gamma).astype(np.int64)
    # unit integral factors
    edge = np.zeros(len(z), dtype=np.int64)
    alive = np.ones(len(z), dtype=bool)
    kv = s.chars.valuations
    for i in s.cfg.small_simple:
        a = b.roots[i]
        vals = num @ np.array([int(x * den) for x in a], dtype=np.int64)
        if np.any(vals % (den * den)):
            raise PadicWeightError("non-integral pairing on the lattice")
        mm = vals // (den * den) + kv[i]
        edge += mm == -s.chars.c0 - 1
        alive &= mm >= -s.chars.c0 - 1
    inside = region.contains_batch(z, 1)
    certified = not np.any((g != 0) & alive & ~inside)
    if not certified:
        raise PadicWeightError("integrand is nonzero outside the certified support")
    w = Fraction(-1, s.chars.q - 1)
    total = Fraction(0)
    for e in np.unique(edge[alive]):
        sel = alive & (edge == e)
        total += int(g[sel].sum()) * w ** int(e)
    return WeightResult(total, int(len(z)), tuple(zip(lo, hi)), certified)


def weight_sum(s: PadicWeightScenario) -> Fraction:
    return weight_sum_detailed(s).value


def shift_u(chars: PadicCharacterData, cfg: GermFanConfig, t: Sequence) -> PadicCharacterData:
    """Conjugate u by the lattice point t: k_alpha -> k_alpha + <alpha, t>."""
    t = la.vec(t)
    shifts = {}
    for i in cfg.small_simple:
        v = la.dot(cfg.big.roots[i], t)
        if v.denominator != 1:
            raise PadicWeightError("translation is not a lattice point")
        shifts[i] = int(v)
    return chars.shifted(shifts)


# -- quasi-polynomial extraction --------------------------------------------------------

def default_directions(cfg: GermFanConfig, lattice: Optional[Mat] = None) -> List[OrthogonalSet]:
    """Weyl-orbit families of lattice multiples of the fundamental coweights of a B_x chamber."""
    b = cfg.big
    base = cfg.chambers[0]
    simple = b.simple_roots_at(base.positive, frozenset())
    out = []
    lat = la.mat(lattice) if lattice is not None else b.space.lattice
    for w in b._coweights(simple):
        c = la.coordinates(w, lat)
        mult = la.common_denominator(c) if c is not None else la.common_denominator(w)
        out.append(weyl_orbit_family(b, base, la.scale(mult, w)))
    return out


@dataclass(frozen=True)
class PolyExpFit:
    function: PolyExpFunction
    threshold: int
    depth_threshold: Fraction
    sigma: int
    samples: int
    residuals: Tuple[Tuple[Tuple[int, ...], Fraction, Fraction], ...] = ()

    @property
    def ratio(self) -> Fraction:
        """Certified C* in units of sigma(u)."""
        return self.depth_threshold / self.sigma


def _family(s: PadicWeightScenario, dirs: Sequence[OrthogonalSet], y: Sequence[int]) -> OrthogonalSet:
    x = s.x
    for d, c in zip(dirs, y):
        x = x + d.scale(c)
    return x


def extract_polyexp(
    s: PadicWeightScenario,
    grid: Tuple[int, int] = (0, 8),
    directions: Optional[Sequence[OrthogonalSet]] = None,
    order_bound: int = 2,
) -> PolyExpFit:
    """Fit y -> weight(X + sum y_i Y_i) on the box [lo, hi]^p and certify the least threshold."""
    dirs = list(directions) if directions is not None else default_directions(s.cfg, s.lattice)
    lo, hi = grid
    p = len(dirs)
    r = s.rank
    vals: Dict[Tuple[int, ...], Fraction] = {}
    for y in itertools.product(range(lo, hi + 1), repeat=p):
        vals[y] = weight_sum(s.with_x(_family(s, dirs, y)))
    last_error = None
    for t in range(lo, hi + 1):
        pts = {y: v for y, v in vals.items() if min(y) >= t}
        train = {y: v for y, v in pts.items() if max(y) < hi}
        held = {y: v for y, v in pts.items() if max(y) == hi}
        try:
            f = fit_quasi_polynomial(train, r, order_bound, tag=s.name)
        except QuasiPolynomialError as e:
            last_error = e
            continue
        bad = tuple((y, v, f(y)) for y, v in held.items() if f(y) != v)
        if bad:
            last_error = bad
            continue
        depth = validate_orthogonal_set(_family(s, dirs, (t,) * p)).depth
        return PolyExpFit(f, t, depth, s.chars.sigma, len(pts))
    residuals = last_error if isinstance(last_error, tuple) else ()
    raise PadicWeightError(f"no stabilization within the grid: {last_error!r}"[:400] if not residuals else f"no stabilization; residuals {residuals[:3]}")


@dataclass(frozen=True)
class GrowthReport:
    constant: Fraction
    exponent: int
    checked: int
    violations: Tuple[Tuple[int, Fraction, Fraction], ...]

    @property
    def holds(self) -> bool:
        return not self.violations


def growth_ratio(s: PadicWeightScenario) -> Fraction:
    """|weight| / (sigma(u) + N(X))^r."""
    rep = validate_orthogonal_set(s.x)
    base = s.chars.sigma + max(rep.norm, Fraction(0))
    return abs(weight_sum(s)) / base ** s.rank


def growth_check(calibration: Sequence[PadicWeightScenario], scenarios: Sequence[PadicWeightScenario], safety: int = 2) -> GrowthReport:
    """Fit C on a calibration batch (times ``safety``) and test it on fresh scenarios."""
    if not calibration:
        raise PadicWeightError("empty calibration batch")
    c = max(growth_ratio(s) for s in calibration) * safety
    c = max(c, Fraction(1))
    bad = []
    for i, s in enumerate(scenarios):
        g = growth_ratio(s)
        if g > c:
            bad.append((i, g, c))
    return GrowthReport(c, calibration[0].rank, len(scenarios), tuple(bad))


# -- descent --------------------------------------------------------------------------------

@dataclass(frozen=True)
class DescentRow:
    index: int
    lhs: Fraction
    rhs: Fraction
    terms: Tuple[Tuple[str, Fraction], ...]
    truncation_ok: Optional[bool]

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class DescentCertificate:
    epsilon: Vec
    coefficients: Tuple[Tuple[str, Fraction], ...]
    rows: Tuple[DescentRow, ...]

    @property
    def holds(self) -> bool:
        return all(r.equal for r in self.rows)

    @property
    def truncation_holds(self) -> bool:
        return all(r.truncation_ok is not False for r in self.rows)


def truncate_chars(s: PadicWeightScenario, face: str) -> PadicWeightScenario:
    """u^Q: simple-root coordinates outside the Levi of Q set to zero (their J factor becomes 1)."""
    q = s.cfg.big.face_by_label(face)
    kv = s.chars.valuations
    keep = {i for i in kv if i in q.levi}
    drop = [i for i in kv if i not in keep]
    if not drop:
        return s
    # valuation of a zero coordinate is +infinity; any value >= -c0 gives J = 1
    big = max(0, -s.chars.c0) + 1
    return s.with_chars(replace(s.chars, k=tuple((i, kv[i] if i in keep else big) for i in kv)))


def verify_descent(
    s_iota: PadicWeightScenario,
    dc: DescentCoefficients,
    batch: Sequence[Tuple[OrthogonalSet, PadicCharacterData]],
    perturb: Optional[Tuple[str, Fraction]] = None,
    truncation_depth: Optional[Fraction] = None,
) -> DescentCertificate:
    """Both sides of v_iota = sum d(Q) v^{Q,iota} on every (X, chars) in the batch."""
    coeffs = dict(dc.coefficients)
    if perturb is not None:
        label, delta = perturb
        coeffs[label] = coeffs.get(label, Fraction(0)) + delta
    rows = []
    for idx, (x, chars) in enumerate(batch):
        base = replace(s_iota, x=x, chars=chars)
        lhs = weight_sum(base.with_mode("iota"))
        terms = []
        trunc: Optional[bool] = None
        depth = validate_orthogonal_set(x).depth
        deep = truncation_depth is not None and depth >= truncation_depth * chars.sigma
        for label, d in sorted(coeffs.items()):
            sq = base.with_mode("q_iota", label)
            v = weight_sum(sq)
            terms.append((label, v))
            if deep:
                ok = weight_sum(truncate_chars(sq, label)) == v
                trunc = ok if trunc is None else (trunc and ok)
        rhs = sum((coeffs[l] * v for l, v in terms), Fraction(0))
        rows.append(DescentRow(idx, lhs, rhs, tuple(terms), trunc))
    return DescentCertificate(dc.epsilon, tuple(sorted(coeffs.items())), tuple(rows))
