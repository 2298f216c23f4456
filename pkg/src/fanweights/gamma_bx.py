"""Germ-fan Gamma functions, their iota variants and descent coefficients.

A germ fan is a big root datum together with a subsystem of "small" roots
and a chamber B_x of the small system.  The faces compatible with B_x are
those whose positive part contains every B_x-positive small root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from . import linalg as la
from .cone_calculus import EQ, CellSum, Cond, indicator_cells
from .convex_geometry import FGConvexSet, relint_meets_affine
from .linalg import Mat, Vec
from .orthogonal_sets import OrthogonalSet, project_to_face, transport, validate_orthogonal_set
from .root_fan import Face, Restriction, RootFanDatum, fold_iota

MODES = ("plain", "iota", "q_iota")


class GermFanError(ValueError):
    pass


# -- configuration -----------------------------------------------------------------

class GermFanConfig:
    """Big datum, small root subsystem and a small chamber B_x.

    ``small`` lists root indices of the big datum; ``bx_positive`` lists the
    B_x-positive small roots.  With an involution on the big datum the iota
    refinement is available (B_x must then be iota-split and the small roots
    must vanish on the iota-fixed subspace).
    """

    def __init__(self, big: RootFanDatum, small: Iterable[int], bx_positive: Iterable[int], name: str = ""):
        self.big = big
        self.name = name or big.name
        self.small: FrozenSet[int] = frozenset(small)
        self.bx: FrozenSet[int] = frozenset(bx_positive)
        if any(big.neg[i] not in self.small for i in self.small):
            raise GermFanError("small roots are not closed under negation")
        if not self.bx <= self.small or any(big.neg[i] in self.bx for i in self.bx):
            raise GermFanError("B_x is not a positive system of the small roots")
        if self.bx | {big.neg[i] for i in self.bx} != self.small:
            raise GermFanError("B_x does not choose a sign on every small root")
        if not self.chambers:
            raise GermFanError("B_x is not a chamber of the small system")
        self.center: Mat = big.center_basis(frozenset(range(len(big.roots))))
        self._cache: Dict = {}
        if big.involution is not None:
            if self.small != big.image(big.iota_perm, self.small):
                raise GermFanError("iota does not preserve the small roots")
            neg_bx = frozenset(big.neg[i] for i in self.bx)
            if big.image(big.iota_perm, self.bx) != neg_bx:
                raise GermFanError("B_x is not iota-split")
            fixed = self.iota_fixed
            for i in self.small:
                if any(la.dot(big.roots[i], v) != 0 for v in fixed):
                    raise GermFanError("small roots must vanish on the iota-fixed subspace")

    @classmethod
    def from_signs(cls, big: RootFanDatum, small_roots: Iterable[Sequence], bx_point: Sequence, name: str = "") -> "GermFanConfig":
        """Small roots given as covectors; B_x given by a point on which none vanishes."""
        idx = {big.index[la.vec(r)] for r in small_roots}
        idx |= {big.neg[i] for i in idx}
        h = la.vec(bx_point)
        pos = set()
        for i in idx:
            v = la.dot(big.roots[i], h)
            if v == 0:
                raise GermFanError("B_x point lies on a small wall")
            if v > 0:
                pos.add(i)
        return cls(big, idx, pos, name)

    # -- derived spaces -------------------------------------------------------
    @property
    def has_iota(self) -> bool:
        return self.big.involution is not None

    @property
    def iota_fixed(self) -> Mat:
        from .root_fan import fixed_subspace

        return fixed_subspace(self.big.involution, 1)

    @property
    def restriction(self) -> Restriction:
        if "res" not in self._cache:
            if not self.has_iota:
                raise GermFanError("configuration has no involution")
            self._cache["res"] = fold_iota(self.big)
        return self._cache["res"]

    @property
    def chambers(self) -> Tuple[Face, ...]:
        """P_{B_x}: big chambers whose positive part contains B_x."""
        return tuple(c for c in self.big.chambers if self.bx <= c.positive)

    @property
    def faces(self) -> Tuple[Face, ...]:
        """F_{B_x}: big faces whose positive part contains B_x."""
        return tuple(f for f in self.big.faces if self.bx <= f.positive)

    @property
    def small_datum(self) -> RootFanDatum:
        if "small" not in self._cache:
            b = self.big
            rs = [b.roots[i] for i in sorted(self.small)]
            cor = {b.roots[i]: b.coroots[i] for i in self.small}
            self._cache["small"] = RootFanDatum(b.space, rs, coroots=cor, name=f"{self.name}|small")
        return self._cache["small"]

    @property
    def small_simple(self) -> Tuple[int, ...]:
        """Delta_x as big-root indices."""
        b = self.big
        s = self.small_datum
        pos = frozenset(s.index[b.roots[i]] for i in self.bx)
        return tuple(sorted(b.index[s.roots[j]] for j in s.simple_roots_at(pos, frozenset())))

    # iota data on the restricted datum
    def iota_faces(self) -> Tuple[Face, ...]:
        """F_{B_x,iota} as faces of the restricted datum."""
        if "iota_faces" not in self._cache:
            res = self.restriction
            out = tuple(f for f in res.datum.faces if self.bx <= res.lift_face(f).positive)
            self._cache["iota_faces"] = out
        return self._cache["iota_faces"]

    def iota_chambers(self) -> Tuple[Face, ...]:
        return tuple(f for f in self.iota_faces() if f.is_chamber)

    def to_json(self) -> dict:
        return {"name": self.name, "small": sorted(self.small), "bx_positive": sorted(self.bx)}

    def __repr__(self) -> str:
        return f"GermFanConfig({self.name})"


@dataclass(frozen=True)
class GermFan:
    chambers: Tuple[Face, ...]
    faces: Tuple[Face, ...]
    iota_faces: Tuple[Face, ...]
    partition_ok: bool


def weyl_partition_ok(cfg: GermFanConfig) -> bool:
    """Big chambers are the disjoint union of w P_{B_x} over w in W_x."""
    b = cfg.big
    s = cfg.small_datum
    base_pos = frozenset(s.index[b.roots[i]] for i in cfg.bx)
    base = next(c for c in s.chambers if c.positive == base_pos)
    seen: Dict[FrozenSet[int], int] = {}
    for sc in s.chambers:
        w = transport(s, base, sc) if s.roots else la.identity(b.dimension)
        perm = b._permutation(w, "Weyl element")
        for c in cfg.chambers:
            img = b.image(perm, c.positive)
            seen[img] = seen.get(img, 0) + 1
    allc = {c.positive for c in b.chambers}
    return set(seen) == allc and all(v == 1 for v in seen.values())


def enumerate_germ_fan(cfg: GermFanConfig) -> GermFan:
    iota = tuple(cfg.restriction.lift_face(f) for f in cfg.iota_faces()) if cfg.has_iota else ()
    return GermFan(cfg.chambers, cfg.faces, iota, weyl_partition_ok(cfg))


# -- Gamma functions -------------------------------------------------------------------

def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def gamma_cells(cfg: GermFanConfig, q: Face, x: OrthogonalSet) -> CellSum:
    """Gamma_{B_x}^Q(., X) on the big space."""
    b = cfg.big
    if not cfg.bx <= q.positive:
        raise GermFanError(f"{q.label} is not in F_{{B_x}}")
    out = CellSum(())
    for p in cfg.faces:
        if p.positive <= q.positive:
            out = out + indicator_cells(b, "tau_hat", p, q, project_to_face(x, p)).scale(_sign(b.a(p, q)))
    return out


def _iota_point(cfg: GermFanConfig, x: OrthogonalSet, f: Face) -> Vec:
    res = cfg.restriction
    return res.project(project_to_face(x, res.lift_face(f)))


def gamma_iota_cells(cfg: GermFanConfig, q: Face, x: OrthogonalSet) -> CellSum:
    """Gamma_{B_x,iota}^Q(., X) for Q a face of the restricted datum, on the big space."""
    res = cfg.restriction
    r = res.datum
    if q not in cfg.iota_faces():
        raise GermFanError(f"{q.label} is not in F_{{B_x,iota}}")
    out = CellSum(())
    for p in cfg.iota_faces():
        if p.positive <= q.positive:
            cells = indicator_cells(r, "tau_hat", p, q, _iota_point(cfg, x, p), pullback=res.coords)
            out = out + cells.scale(_sign(r.a(p, q)))
    return out


def _levi_span(b: RootFanDatum, q: Face) -> Mat:
    """A^Q: span of the coroots of the Levi of Q."""
    return la.row_space([b.coroots[i] for i in sorted(q.levi)], b.dimension)


def q_iota_admissible(cfg: GermFanConfig, q: Face) -> bool:
    """A_x^iota meets A^Q trivially (and so does A_x^iota + A_G)."""
    b = cfg.big
    aq = list(_levi_span(b, q))
    other = list(la.row_space(list(cfg.iota_fixed) + list(cfg.center), b.dimension))
    return la.rank(aq + other) == len(aq) + len(other) if (aq or other) else True


def gamma_q_iota_cells(cfg: GermFanConfig, q: Face, x: OrthogonalSet) -> CellSum:
    """Gamma_{B_x}^{Q,iota}(., X): Gamma^Q at X_Q + Y^Q when H - X_Q = Y^Q + (A^iota + A_G)-part, else 0."""
    b = cfg.big
    n = b.dimension
    if not q_iota_admissible(cfg, q):
        raise GermFanError(f"A_x^iota meets A^Q nontrivially for {q.label}")
    aq = list(_levi_span(b, q))
    other = list(la.row_space(list(cfg.iota_fixed) + list(cfg.center), n))
    span = aq + other
    rest = list(la.orthogonal_complement(span, b.space.inner_product, n)) if len(span) < n else []
    a = la.projector(aq, other + rest, n)
    xq = project_to_face(x, q)
    gate = []
    for ann in la.complement_annihilator(span, n) if span else la.identity(n):
        gate.append(Cond(ann, la.dot(ann, xq), EQ))
    out = CellSum(())
    for p in cfg.faces:
        if p.positive <= q.positive:
            shift = la.add(la.sub(la.mat_vec(a, xq), xq), project_to_face(x, p))
            out = out + indicator_cells(b, "tau_hat", p, q, shift, pullback=a).scale(_sign(b.a(p, q)))
    return CellSum(((1, tuple(gate)),)) * out


def gamma_bx_cells(cfg: GermFanConfig, q: Face, x: OrthogonalSet, mode: str = "plain") -> CellSum:
    if mode == "plain":
        return gamma_cells(cfg, q, x)
    if mode == "iota":
        return gamma_iota_cells(cfg, q, x)
    if mode == "q_iota":
        return gamma_q_iota_cells(cfg, q, x)
    raise GermFanError(f"unknown mode {mode!r}")


def gamma_bx_value(cfg: GermFanConfig, q: Face, h: Sequence, x: OrthogonalSet, mode: str = "plain") -> int:
    h = la.vec(h)
    if len(h) != cfg.big.dimension:
        raise GermFanError("point has the wrong dimension")
    return gamma_bx_cells(cfg, q, x, mode)(h)


def top_face(cfg: GermFanConfig, mode: str = "plain") -> Face:
    return cfg.restriction.datum.full_face if mode == "iota" else cfg.big.full_face


# -- identities as cell sums -------------------------------------------------------------

def partition_cells(cfg: GermFanConfig, r: Face, x: OrthogonalSet) -> CellSum:
    """sum_{Q <= R in F_{B_x}} Gamma^Q(., X) tau_Q^R(. - X_Q); identically 1 off walls."""
    b = cfg.big
    out = CellSum(())
    for q in cfg.faces:
        if q.positive <= r.positive:
            out = out + gamma_cells(cfg, q, x) * indicator_cells(b, "tau", q, r, project_to_face(x, q))
    return out


def partition_iota_cells(cfg: GermFanConfig, r: Face, x: OrthogonalSet) -> CellSum:
    res = cfg.restriction
    out = CellSum(())
    for q in cfg.iota_faces():
        if q.positive <= r.positive:
            tau = indicator_cells(res.datum, "tau", q, r, _iota_point(cfg, x, q), pullback=res.coords)
            out = out + gamma_iota_cells(cfg, q, x) * tau
    return out


def gamma_qr_shifted_cells(b: RootFanDatum, q: Face, r: Face, base: Vec, y: Vec) -> CellSum:
    """Gamma_Q^R(H - base, Y) as a function of H."""
    out = CellSum(())
    for p in b.faces_between(q, r):
        term = indicator_cells(b, "tau", q, p, base) * indicator_cells(b, "tau_hat", p, r, la.add(base, y))
        out = out + term.scale(_sign(b.a(p, r)))
    return out


def splitting_sides(cfg: GermFanConfig, x: OrthogonalSet, y: OrthogonalSet, r: Face) -> Tuple[CellSum, CellSum]:
    """Both sides of Gamma^R(H, X+Y) = sum_Q Gamma^Q(H, X) Gamma_Q^R(H - X_Q, Y_Q)."""
    b = cfg.big
    lhs = gamma_cells(cfg, r, x + y)
    rhs = CellSum(())
    for q in cfg.faces:
        if q.positive <= r.positive:
            rhs = rhs + gamma_cells(cfg, q, x) * gamma_qr_shifted_cells(b, q, r, project_to_face(x, q), project_to_face(y, q))
    return lhs, rhs


def corollary_sides(cfg: GermFanConfig, x: OrthogonalSet, y: OrthogonalSet, q: Face, r: Face) -> Tuple[CellSum, CellSum]:
    """On the support of Gamma^Q(., X) tau_Q^R(. - X_Q): Gamma^R(., X+Y) = phi_Q^R(. - X_Q - Y_Q)."""
    b = cfg.big
    xq = project_to_face(x, q)
    support = gamma_cells(cfg, q, x) * indicator_cells(b, "tau", q, r, xq)
    lhs = support * gamma_cells(cfg, r, x + y)
    rhs = support * indicator_cells(b, "phi", q, r, la.add(xq, project_to_face(y, q)))
    return lhs, rhs


@dataclass(frozen=True)
class SplittingWitness:
    holds: bool
    lhs: int
    rhs: int
    terms: Tuple[Tuple[str, int, int], ...] = ()


def check_splitting(cfg: GermFanConfig, x: OrthogonalSet, y: OrthogonalSet, r: Face, h: Sequence) -> SplittingWitness:
    h = la.vec(h)
    b = cfg.big
    lhs = gamma_cells(cfg, r, x + y)(h)
    terms = []
    rhs = 0
    for q in cfg.faces:
        if q.positive <= r.positive:
            g = gamma_cells(cfg, q, x)(h)
            k = gamma_qr_shifted_cells(b, q, r, project_to_face(x, q), project_to_face(y, q))(h)
            terms.append((q.label, g, k))
            rhs += g * k
    ok = lhs == rhs
    return SplittingWitness(ok, lhs, rhs, () if ok else tuple(terms))


# -- hull support -----------------------------------------------------------------------

def _wall_positive(x: OrthogonalSet) -> bool:
    rep = validate_orthogonal_set(x)
    return rep.is_orthogonal and all(s is not None and s >= 0 for _, _, s in rep.wall_scalars)


def hull_support(cfg: GermFanConfig, x: OrthogonalSet, mode: str = "plain") -> FGConvexSet:
    """Conv{X_P : P in P_{B_x}} - cone(Delta_x^vee) + A_G (iota: projected points, plus A_x^iota)."""
    if not _wall_positive(x):
        raise GermFanError("hull support needs a positive orthogonal set")
    b = cfg.big
    rays = [la.neg(b.coroots[i]) for i in cfg.small_simple]
    lin = list(cfg.center)
    if mode == "plain":
        verts = [x[c] for c in cfg.chambers]
    elif mode == "iota":
        res = cfg.restriction
        verts = [res.embed(_iota_point(cfg, x, c)) for c in cfg.iota_chambers()]
        lin += list(cfg.iota_fixed)
    else:
        raise GermFanError(f"hull support has no mode {mode!r}")
    return FGConvexSet(verts, rays, lin, b.space.inner_product)


# -- descent coefficients ----------------------------------------------------------------

@dataclass(frozen=True)
class DescentCoefficients:
    epsilon: Vec
    coefficients: Tuple[Tuple[str, Fraction], ...]

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.coefficients)


def _face_cone(b: RootFanDatum, q: Face) -> Tuple[Mat, Mat]:
    """Generators and lineality of the closed cone of A_Q^+ (plus A_G)."""
    c = b.chamber_containing(q)
    simple = b.simple_roots_at(c.positive, frozenset())
    cw = b._coweights(simple) if simple else ()
    gens = tuple(w for i, w in zip(simple, cw) if i not in q.levi)
    proj = b.projection(q.levi)
    gens = tuple(la.mat_vec(proj, g) for g in gens)
    return gens, b.center_basis(frozenset(range(len(b.roots))))


def compatible_faces(cfg: GermFanConfig, eps: Sequence) -> Tuple[Face, ...]:
    """Faces Q of F_{B_x} with eps in the iota-fixed projection of A_Q^+."""
    b = cfg.big
    eps = la.vec(eps)
    p = la.orthogonal_projector(cfg.iota_fixed, b.space.inner_product, b.dimension)
    out = []
    for q in cfg.faces:
        gens, lin = _face_cone(b, q)
        if relint_meets_affine(gens, lin, p, eps):
            out.append(q)
    return tuple(out)


def descent_coefficients(cfg: GermFanConfig, eps: Sequence) -> DescentCoefficients:
    """Solve sum_{R >= Q compatible} d(R) = 1 downward from the full face."""
    if not cfg.has_iota:
        raise GermFanError("descent needs an involution")
    b = cfg.big
    eps = la.vec(eps)
    fixed = cfg.iota_fixed
    if la.coordinates(eps, la.row_space(fixed, b.dimension)) is None:
        raise GermFanError("epsilon is not iota-fixed")
    p = la.orthogonal_projector(fixed, b.space.inner_product, b.dimension)
    full_dim = len(la.row_space(fixed, b.dimension))
    comp = compatible_faces(cfg, eps)
    for q in comp:
        gens, lin = _face_cone(b, q)
        img = [la.mat_vec(p, v) for v in list(gens) + list(lin)]
        if (la.rank(img) if img else 0) < full_dim:
            raise GermFanError(f"epsilon is not generic: it lies in the deficient projected cone of {q.label}")
    d: Dict[str, Fraction] = {}
    for q in sorted(comp, key=lambda f: (f.dim, f.label)):
        above = [r for r in comp if q.positive < r.positive]
        d[q.label] = 1 - sum((d[r.label] for r in above), Fraction(0))
    for q in comp:
        total = sum((d[r.label] for r in comp if q.positive <= r.positive), Fraction(0))
        if total != 1:
            raise AssertionError("descent relation fails after solving")
    return DescentCoefficients(eps, tuple(sorted(d.items())))


def descent_sides(cfg: GermFanConfig, x: OrthogonalSet, dc: DescentCoefficients) -> Tuple[CellSum, List[Tuple[Fraction, CellSum]]]:
    """Gamma_{B_x,iota}^G(., X) and the terms d(Q) Gamma^{Q,iota}(., X)."""
    lhs = gamma_iota_cells(cfg, cfg.restriction.datum.full_face, x)
    rhs = []
    for label, c in dc.coefficients:
        q = cfg.big.face_by_label(label)
        rhs.append((c, gamma_q_iota_cells(cfg, q, x)))
    return lhs, rhs


def descent_slab_points(cfg: GermFanConfig, x: OrthogonalSet, dc: DescentCoefficients) -> List[Tuple[str, Vec, Mat]]:
    """Per compatible face: an origin X_Q and directions spanning A^Q + A^iota + A_G."""
    b = cfg.big
    out = []
    for label, _ in dc.coefficients:
        q = b.face_by_label(label)
        dirs = la.row_space(list(_levi_span(b, q)) + list(cfg.iota_fixed) + list(cfg.center), b.dimension)
        out.append((label, project_to_face(x, q), dirs))
    return out
