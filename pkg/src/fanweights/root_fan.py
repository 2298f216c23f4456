"""Rational root data and the fan of parabolic faces.

Roots are covectors on an ambient rational space ``QQ^n``; coroots are
vectors.  A face is encoded by its parabolic subset of roots: the roots that
are nonnegative on the relative interior of the face.  Chambers are faces
with empty Levi part and the full face has every root in its Levi part.

Classical families are realized as follows: ``B``, ``C``, ``D`` and ``BC``
in the standard epsilon basis of ``QQ^n``; ``A_n`` in ``QQ^n`` with the
simple roots as coordinate covectors (so ``A1`` lives on a line and
``alpha(H) = H``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg as la
from .linalg import Mat, Vec

F0 = Fraction(0)


class RootDatumError(ValueError):
    """Invalid root datum, automorphism, or face request."""


# -- ambient space ----------------------------------------------------------

@dataclass(frozen=True)
class AmbientSpace:
    """A rational vector space with a volume lattice and an inner product.

    ``lattice`` rows are a basis of the normalization lattice (covolume 1);
    ``inner_product`` is the Gram matrix on vectors.
    """

    dimension: int
    lattice: Mat
    inner_product: Mat

    def __post_init__(self):
        n = self.dimension
        if n < 0:
            raise RootDatumError("negative dimension")
        if len(self.lattice) != n or any(len(r) != n for r in self.lattice):
            raise RootDatumError("lattice basis has the wrong shape")
        if n and la.det(self.lattice) == 0:
            raise RootDatumError("lattice basis is degenerate")
        g = self.inner_product
        if len(g) != n or any(len(r) != n for r in g):
            raise RootDatumError("inner product has the wrong shape")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise RootDatumError("inner product is not symmetric")
        for k in range(1, n + 1):
            if la.det([r[:k] for r in g[:k]]) <= 0:
                raise RootDatumError("inner product is not positive definite")

    @classmethod
    def standard(cls, n: int) -> "AmbientSpace":
        return cls(n, la.identity(n), la.identity(n))

    def pair(self, u: Vec, v: Vec) -> Fraction:
        return la.dot(u, la.mat_vec(self.inner_product, v))

    def sharp(self, covector: Vec) -> Vec:
        """The vector representing ``covector`` under the inner product."""
        return la.solve(self.inner_product, covector)


# -- faces --------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """A parabolic face; ``positive`` and ``levi`` are sets of root indices."""

    positive: FrozenSet[int]
    levi: FrozenSet[int]
    label: str
    dim: int = field(compare=False)

    @property
    def is_chamber(self) -> bool:
        return not self.levi

    def __le__(self, other: "Face") -> bool:  # type: ignore[override]
        return self.positive <= other.positive

    def __repr__(self) -> str:
        return f"Face({self.label})"


@dataclass(frozen=True)
class PairData:
    """Relative data for faces P <= Q, as covectors/vectors on the ambient space.

    ``simple`` holds the roots of Delta_P^Q composed with the projection to
    the center of P; ``coroots`` the projected coroots; ``weights`` the
    fundamental weights (dual basis), again as ambient covectors.
    """

    simple_indices: Tuple[int, ...]
    simple: Mat
    coroots: Mat
    weights: Mat


# -- the datum ----------------------------------------------------------------

def _linear_inverse(m: Mat) -> Mat:
    return la.inverse(m)


class RootFanDatum:
    """A finite set of roots on an ambient space, with its fan of faces.

    Instances are immutable after construction; derived data are memoised.
    """

    def __init__(
        self,
        space: AmbientSpace,
        roots: Iterable[Sequence],
        coroots: Optional[Mapping[Vec, Vec]] = None,
        twist: Optional[Sequence[Sequence]] = None,
        involution: Optional[Sequence[Sequence]] = None,
        name: str = "",
    ):
        self.space = space
        n = space.dimension
        rs = sorted({la.vec(r) for r in roots})
        for r in rs:
            if len(r) != n:
                raise RootDatumError("root of wrong dimension")
            if la.is_zero(r):
                raise RootDatumError("zero root")
        rset = set(rs)
        if any(la.neg(r) not in rset for r in rs):
            raise RootDatumError("root set not closed under negation")
        self.roots: Tuple[Vec, ...] = tuple(rs)
        self.index: Dict[Vec, int] = {r: i for i, r in enumerate(rs)}
        self.neg: Tuple[int, ...] = tuple(self.index[la.neg(r)] for r in rs)
        self.name = name
        cor = []
        for r in rs:
            if coroots is not None and r in coroots:
                c = la.vec(coroots[r])
            else:
                s = space.sharp(r)
                c = la.scale(Fraction(2) / la.dot(r, s), s)
            cor.append(c)
        self.coroots: Tuple[Vec, ...] = tuple(cor)
        for i, r in enumerate(rs):
            half = la.scale(Fraction(1, 2), r)
            reduced = half not in rset
            if reduced and la.dot(r, self.coroots[i]) != 2:
                raise RootDatumError(f"pairing <alpha, alpha^vee> != 2 for {r}")
        self.twist: Optional[Mat] = la.mat(twist) if twist is not None else None
        self.involution: Optional[Mat] = la.mat(involution) if involution is not None else None
        self.twist_perm = self._permutation(self.twist, "twist") if self.twist is not None else None
        self.iota_perm = self._permutation(self.involution, "involution") if self.involution is not None else None
        if self.involution is not None:
            sq = la.mat_mul(self.involution, self.involution)
            if sq != la.identity(n):
                raise RootDatumError("involution does not square to the identity")
        if self.twist_perm is not None and self.iota_perm is not None:
            a = tuple(self.twist_perm[self.iota_perm[i]] for i in range(len(rs)))
            b = tuple(self.iota_perm[self.twist_perm[i]] for i in range(len(rs)))
            if a != b:
                raise RootDatumError("twist and involution do not commute on roots")
        self._cache: Dict = {}
        self.rank = la.rank(self.roots) if self.roots else 0

    # -- automorphisms ------------------------------------------------------
    def _permutation(self, g: Mat, what: str) -> Tuple[int, ...]:
        n = self.space.dimension
        if len(g) != n or la.det(g) == 0:
            raise RootDatumError(f"{what} is not an invertible {n}x{n} matrix")
        ginv = _linear_inverse(g)
        perm = []
        for r in self.roots:
            img = la.vec_mat(r, ginv)
            if img not in self.index:
                raise RootDatumError(f"{what} does not preserve the root set")
            perm.append(self.index[img])
        gram = self.space.inner_product
        if la.mat_mul(la.mat_mul(la.transpose(g), gram), g) != gram:
            raise RootDatumError(f"{what} is not an isometry of the inner product")
        return tuple(perm)

    # -- basic linear data --------------------------------------------------
    @property
    def dimension(self) -> int:
        return self.space.dimension

    def center_basis(self, levi: FrozenSet[int]) -> Mat:
        """Basis of the common kernel of the given roots."""
        key = ("center", levi)
        if key not in self._cache:
            self._cache[key] = la.nullspace([self.roots[i] for i in sorted(levi)], self.dimension)
        return self._cache[key]

    def projection(self, levi: FrozenSet[int]) -> Mat:
        """Projection onto the center of a Levi along the span of its coroots."""
        key = ("proj", levi)
        if key not in self._cache:
            n = self.dimension
            along = la.row_space([self.coroots[i] for i in sorted(levi)], n)
            self._cache[key] = la.projector(self.center_basis(levi), along, n)
        return self._cache[key]

    def project(self, face: Face, v: Vec) -> Vec:
        return la.mat_vec(self.projection(face.levi), v)

    # -- fan enumeration ----------------------------------------------------
    def _signs_at(self, h: Vec) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        vals = [la.dot(r, h) for r in self.roots]
        pos = frozenset(i for i, v in enumerate(vals) if v >= 0)
        levi = frozenset(i for i, v in enumerate(vals) if v == 0)
        return pos, levi

    def _make_face(self, pos: FrozenSet[int], levi: FrozenSet[int]) -> Face:
        return Face(pos, levi, self._label(pos, levi), len(self.center_basis(levi)))

    @property
    def label_roots(self) -> Tuple[int, ...]:
        """Roots read by face labels: one per sign pair, sparsest first, then descending."""
        if "label_roots" not in self._cache:
            half = [i for i, r in enumerate(self.roots) if r > self.roots[self.neg[i]]]
            key = lambda i: (sum(1 for x in self.roots[i] if x), tuple(-x for x in self.roots[i]))
            self._cache["label_roots"] = tuple(sorted(half, key=key))
        return self._cache["label_roots"]

    def _label(self, pos: FrozenSet[int], levi: FrozenSet[int]) -> str:
        out = ["0" if i in levi else ("+" if i in pos else "-") for i in self.label_roots]
        return "".join(out) or "0"

    def simple_roots_at(self, pos: FrozenSet[int], levi: FrozenSet[int]) -> Tuple[int, ...]:
        """Indecomposable roots of ``pos`` outside ``levi`` (reduced representatives)."""
        unip = [i for i in pos if i not in levi]
        uset = {self.roots[i] for i in unip}
        simple = []
        for i in unip:
            r = self.roots[i]
            if la.scale(Fraction(1, 2), r) in uset:
                continue
            decomp = False
            for j in unip:
                rest = la.sub(r, self.roots[j])
                if rest in uset:
                    decomp = True
                    break
            if not decomp:
                simple.append(i)
        return tuple(sorted(simple))

    def _coweights(self, simple: Sequence[int]) -> Mat:
        """Vectors w_i with alpha_j(w_i) = delta_ij for the given simple roots."""
        a = [self.roots[j] for j in simple]
        out = []
        for i in range(len(simple)):
            rhs = tuple(Fraction(int(i == j)) for j in range(len(simple)))
            w = la.solve(a, rhs, self.dimension)
            if w is None:
                raise RootDatumError("simple roots are linearly dependent")
            out.append(w)
        return tuple(out)

    @property
    def chambers(self) -> Tuple[Face, ...]:
        if "chambers" not in self._cache:
            self._cache["chambers"] = self._enumerate_chambers()
        return self._cache["chambers"]

    def _generic_point(self) -> Vec:
        n = self.dimension
        for base in itertools.count(2):
            h = tuple(Fraction(base ** k + k) for k in range(n))
            if all(la.dot(r, h) != 0 for r in self.roots):
                return h
            if base > 50:
                raise RootDatumError("no generic point found")
        raise AssertionError

    def _enumerate_chambers(self) -> Tuple[Face, ...]:
        if not self.roots:
            return (self._make_face(frozenset(), frozenset()),)
        start = self._signs_at(self._generic_point())[0]
        seen = {start}
        queue = [start]
        while queue:
            pos = queue.pop()
            simple = self.simple_roots_at(pos, frozenset())
            if len(simple) != self.rank:
                raise RootDatumError("arrangement is not simplicial at a chamber")
            cw = self._coweights(simple)
            for k in range(len(simple)):
                hw = tuple(sum(c) for c in zip(*[cw[j] for j in range(len(simple)) if j != k])) if len(simple) > 1 else la.zero(self.dimension)
                wk = cw[k]
                t = Fraction(1)
                for r in self.roots:
                    a, b = la.dot(r, hw), la.dot(r, wk)
                    if a != 0 and b != 0:
                        t = min(t, abs(a / b) / 2)
                new = self._signs_at(la.sub(hw, la.scale(t, wk)))
                if new[1]:
                    raise RootDatumError("wall crossing landed on a wall")
                if new[0] not in seen:
                    seen.add(new[0])
                    queue.append(new[0])
        return tuple(sorted((self._make_face(p, frozenset()) for p in seen), key=lambda f: f.label))

    @property
    def faces(self) -> Tuple[Face, ...]:
        if "faces" not in self._cache:
            found: Dict[FrozenSet[int], Face] = {}
            for c in self.chambers:
                simple = self.simple_roots_at(c.positive, frozenset())
                cw = self._coweights(simple) if simple else ()
                for mask in itertools.product((0, 1), repeat=len(simple)):
                    h = la.zero(self.dimension)
                    for m, w in zip(mask, cw):
                        if m:
                            h = la.add(h, w)
                    pos, levi = self._signs_at(h)
                    if pos not in found:
                        found[pos] = self._make_face(pos, levi)
            self._cache["faces"] = tuple(sorted(found.values(), key=lambda f: (-f.dim, f.label)))
        return self._cache["faces"]

    @property
    def full_face(self) -> Face:
        allr = frozenset(range(len(self.roots)))
        return self._make_face(allr, allr)

    def face_by_label(self, label: str) -> Face:
        for f in self.faces:
            if f.label == label:
                return f
        raise RootDatumError(f"no face labelled {label!r}")

    def face_of_point(self, h: Vec) -> Face:
        pos, levi = self._signs_at(la.vec(h))
        return self._make_face(pos, levi)

    def chamber_containing(self, face: Face) -> Face:
        for c in self.chambers:
            if c.positive <= face.positive:
                return c
        raise RootDatumError("face lies in no chamber")

    def faces_between(self, lower: Face, upper: Face) -> Tuple[Face, ...]:
        return tuple(f for f in self.faces if lower.positive <= f.positive <= upper.positive)

    def a(self, p: Face, q: Face) -> int:
        return p.dim - q.dim

    # -- simple roots, coroots, weights --------------------------------------
    def simple_roots(self, face: Face) -> Tuple[int, ...]:
        """Representatives in Delta_C of Delta_F (for the first chamber C inside F)."""
        return self.pair(face, self.full_face).simple_indices

    def pair(self, p: Face, q: Face) -> PairData:
        key = ("pair", p.positive, q.positive)
        if key in self._cache:
            return self._cache[key]
        if not p.positive <= q.positive:
            raise RootDatumError(f"faces are not nested: {p.label} !<= {q.label}")
        c = self.chamber_containing(p)
        dc = self.simple_roots_at(c.positive, frozenset())
        idx = tuple(i for i in dc if i in q.levi and i not in p.levi)
        proj = self.projection(p.levi)
        simple = tuple(la.vec_mat(self.roots[i], proj) for i in idx)
        cor = tuple(la.mat_vec(proj, self.coroots[i]) for i in idx)
        if idx:
            cartan = [[la.dot(s, c_) for c_ in cor] for s in simple]
            inv = la.inverse(cartan)
            weights = tuple(
                tuple(sum((inv[i][j] * simple[j][k] for j in range(len(idx))), F0) for k in range(self.dimension))
                for i in range(len(idx))
            )
        else:
            weights = ()
        out = PairData(idx, simple, cor, weights)
        self._cache[key] = out
        return out

    def adjacent_coroot(self, p: Face, q: Face) -> Optional[Vec]:
        """The coroot in Delta_P^vee cap -Delta_Q^vee when P, Q are adjacent chambers."""
        if not (p.is_chamber and q.is_chamber):
            raise RootDatumError("adjacency is defined for chambers")
        if p.positive not in {c.positive for c in self.chambers} or q.positive not in {c.positive for c in self.chambers}:
            raise RootDatumError("faces from a different datum")
        dp = self.simple_roots_at(p.positive, frozenset())
        dq = self.simple_roots_at(q.positive, frozenset())
        common = []
        for i in dp:
            for j in dq:
                ci, cj = self.coroots[i], self.coroots[j]
                if la.rank([ci, cj]) == 1 and la.dot(self.roots[i], cj) < 0:
                    common.append(i)
        if len(common) != 1:
            return None
        return self.coroots[common[0]]

    def walls(self, p: Face) -> Tuple[Tuple[int, Face], ...]:
        """(simple root index, adjacent chamber) across each wall of a chamber."""
        out = []
        chambers = {c.positive: c for c in self.chambers}
        dirs = {}
        for i in self.simple_roots_at(p.positive, frozenset()):
            flip = {j for j in p.positive if la.rank([self.roots[i], self.roots[j]]) == 1}
            newpos = frozenset((p.positive - flip) | {self.neg[j] for j in flip})
            dirs[i] = chambers[newpos]
        for i in sorted(dirs):
            out.append((i, dirs[i]))
        return tuple(out)

    # -- twist / involution structure ---------------------------------------
    def image(self, perm: Tuple[int, ...], s: FrozenSet[int]) -> FrozenSet[int]:
        return frozenset(perm[i] for i in s)

    def is_theta_stable(self, f: Face) -> bool:
        if self.twist_perm is None:
            raise RootDatumError("datum has no twist")
        return self.image(self.twist_perm, f.positive) == f.positive

    def is_iota_split(self, f: Face) -> bool:
        if self.iota_perm is None:
            raise RootDatumError("datum has no involution")
        negpos = frozenset(self.neg[i] for i in f.positive)
        return self.image(self.iota_perm, f.positive) == negpos

    def reflect(self, i: int, v: Vec) -> Vec:
        return la.sub(v, la.scale(la.dot(self.roots[i], v), self.coroots[i]))

    def __repr__(self) -> str:
        return f"RootFanDatum({self.name or self.dimension})"


def classify_faces(datum: RootFanDatum) -> Dict[str, Tuple[Face, ...]]:
    """Tag faces as theta-stable, iota-split and minimal iota-split."""
    if datum.twist is None and datum.involution is None:
        raise RootDatumError("datum carries no automorphism")
    out: Dict[str, Tuple[Face, ...]] = {}
    if datum.twist is not None:
        out["theta_stable"] = tuple(f for f in datum.faces if datum.is_theta_stable(f))
    if datum.involution is not None:
        split = tuple(f for f in datum.faces if datum.is_iota_split(f))
        out["iota_split"] = split
        out["iota_split_minimal"] = tuple(
            f for f in split if not any(g.levi < f.levi for g in split)
        )
    return out


def enumerate_faces(datum: RootFanDatum) -> Tuple[Face, ...]:
    return datum.faces


def adjacent_coroot(datum: RootFanDatum, p: Face, q: Face) -> Optional[Vec]:
    return datum.adjacent_coroot(p, q)


# -- restriction to a subspace -------------------------------------------------

@dataclass(frozen=True)
class Restriction:
    """A datum obtained by restricting roots to a subspace of a parent datum.

    ``basis`` rows span the subspace inside the parent space; ``project``
    maps parent vectors to subspace coordinates (orthogonal projection).
    """

    parent: RootFanDatum
    datum: RootFanDatum
    basis: Mat
    coords: Mat
    complement: Mat

    def embed(self, c: Vec) -> Vec:
        return la.vec_mat(c, self.basis) if self.basis else la.zero(self.parent.dimension)

    def project(self, v: Vec) -> Vec:
        return la.mat_vec(self.coords, v)

    def lift_face(self, f: Face) -> Face:
        """The parent face whose relative interior meets this face's interior."""
        r = self.datum
        if f.is_chamber and len(f.positive) == len(r.roots) == 0:
            h = la.zero(r.dimension)
        else:
            c = r.chamber_containing(f)
            simple = r.simple_roots_at(c.positive, frozenset())
            cw = r._coweights(simple) if simple else ()
            h = la.zero(r.dimension)
            for i, w in zip(simple, cw):
                if i not in f.levi:
                    h = la.add(h, w)
        return self.parent.face_of_point(self.embed(h))


def restrict(datum: RootFanDatum, basis: Sequence[Sequence], name: str = "") -> Restriction:
    """Restrict roots to span(basis); coroots are re-derived from the induced form."""
    n = datum.dimension
    b = la.row_space([la.vec(v) for v in basis], n)
    k = len(b)
    g = datum.space.inner_product
    gram = la.mat_mul(la.mat_mul(b, g), la.transpose(b)) if k else ()
    perp = la.orthogonal_complement(b, g, n)
    if k:
        # coordinates of the orthogonal projection: solve b-coords of proj
        full = la.transpose(list(b) + list(perp))
        inv = la.inverse(full)
        coords = tuple(inv[i] for i in range(k))
    else:
        coords = ()
    lat_img = [la.mat_vec(coords, v) for v in datum.space.lattice] if k else []
    lat = la.lattice_basis(lat_img) if k else ()
    space = AmbientSpace(k, lat, gram)
    roots = set()
    for r in datum.roots:
        rr = la.mat_vec(b, r) if k else ()
        if k and not la.is_zero(rr):
            roots.add(rr)
    child = RootFanDatum(space, roots, name=name or f"{datum.name}|res")
    return Restriction(datum, child, b, coords, perp)


def fixed_subspace(m: Mat, sign: int = 1) -> Mat:
    n = len(m)
    a = [tuple(m[i][j] - (sign if i == j else 0) for j in range(n)) for i in range(n)]
    return la.nullspace(a, n)


def fold_twist(datum: RootFanDatum) -> Restriction:
    """Restrict to the twist-fixed subspace (twisted mode)."""
    if datum.twist is None:
        raise RootDatumError("datum has no twist")
    return restrict(datum, fixed_subspace(datum.twist, 1), name=f"{datum.name}|theta")


def fold_iota(datum: RootFanDatum) -> Restriction:
    """Restrict to the iota-anti-fixed subspace (the restricted system Sigma_{0,iota})."""
    if datum.involution is None:
        raise RootDatumError("datum has no involution")
    return restrict(datum, fixed_subspace(datum.involution, -1), name=f"{datum.name}|iota")


# -- classical constructions -----------------------------------------------------

def _classical(family: str, n: int) -> Tuple[List[Vec], Mat]:
    """Roots (as covectors) and the vector Gram matrix for one component."""
    if n < 1:
        raise RootDatumError("rank must be >= 1")
    e = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    roots: List[Vec] = []
    fam = family.upper()
    if fam == "A":
        for i in range(n):
            for j in range(i, n):
                r = tuple(Fraction(int(i <= k <= j)) for k in range(n))
                roots += [r, la.neg(r)]
        cartan = [[Fraction(2 if i == j else (-1 if abs(i - j) == 1 else 0)) for j in range(n)] for i in range(n)]
        return roots, la.inverse(cartan)
    if fam not in ("B", "C", "D", "BC"):
        raise RootDatumError(f"unsupported type label {family!r}")
    if fam == "D" and n < 2:
        raise RootDatumError("type D needs rank >= 2")
    for i in range(n):
        for j in range(i + 1, n):
            for s in (1, -1):
                for t in (1, -1):
                    roots.append(la.add(la.scale(s, e[i]), la.scale(t, e[j])))
    for i in range(n):
        for s in (1, -1):
            if fam in ("B", "BC"):
                roots.append(la.scale(s, e[i]))
            if fam in ("C", "BC"):
                roots.append(la.scale(2 * s, e[i]))
    return roots, la.identity(n)


def _block_diag(blocks: Sequence[Mat]) -> Mat:
    n = sum(len(b) for b in blocks)
    out = [[F0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return tuple(tuple(r) for r in out)


def _automorphism(desc, comps: Sequence[Tuple[str, int]], n: int) -> Optional[Mat]:
    if desc is None:
        return None
    if isinstance(desc, str):
        if desc == "identity":
            return la.identity(n)
        if desc == "negate":
            return la.mat([[-int(i == j) for j in range(n)] for i in range(n)])
        if desc == "swap":
            desc = {"permutation": [1, 0]}
        else:
            raise RootDatumError(f"unknown automorphism {desc!r}")
    if "matrix" in desc:
        return la.mat(desc["matrix"])
    perm = list(desc["permutation"])
    sign = int(desc.get("sign", 1))
    if sorted(perm) != list(range(len(comps))):
        raise RootDatumError("component permutation has the wrong length")
    offs = [0]
    for _, r in comps:
        offs.append(offs[-1] + r)
    m = [[F0] * n for _ in range(n)]
    for src, dst in enumerate(perm):
        if comps[src] != comps[dst]:
            raise RootDatumError("permutation exchanges non-isomorphic components")
        for k in range(comps[src][1]):
            m[offs[dst] + k][offs[src] + k] = Fraction(sign)
    return tuple(tuple(r) for r in m)


def parse_type(spec: str) -> List[Tuple[str, int]]:
    """Parse labels such as ``"A1"``, ``"A1xA1"``, ``"BC2"``, ``"C2+A1"``."""
    out = []
    for part in spec.replace("×", "x").replace("+", "x").split("x"):
        part = part.strip()
        if not part:
            continue
        fam = part.rstrip("0123456789")
        rk = part[len(fam):]
        if not fam or not rk:
            raise RootDatumError(f"cannot parse type component {part!r}")
        out.append((fam.upper(), int(rk)))
    if not out:
        raise RootDatumError("empty type")
    return out


def build_root_datum(spec, theta=None, iota=None, lattice=None, inner_product=None, name: str = "") -> RootFanDatum:
    """Build a datum from classical components.

    ``spec`` is a type string (``"A1xA1"``) or a list of ``(family, rank)``
    pairs or a dict in the JSON schema.  ``theta``/``iota`` accept
    ``"swap"``, ``"negate"``, ``"identity"``, ``{"permutation": [...],
    "sign": s}`` (component permutation) or ``{"matrix": [[...]]}``.
    """
    if isinstance(spec, Mapping):
        comps = [(c["family"], int(c["rank"])) for c in spec["type_components"]]
        theta = spec.get("theta", theta)
        iota = spec.get("iota", iota)
        lattice = spec.get("lattice", lattice)
        inner_product = spec.get("inner_product", inner_product)
        name = spec.get("name", name)
    elif isinstance(spec, str):
        comps = parse_type(spec)
        name = name or spec
    else:
        comps = [(f, int(r)) for f, r in spec]
    comps = [(f.upper(), r) for f, r in comps]
    n = sum(r for _, r in comps)
    roots: List[Vec] = []
    grams = []
    off = 0
    for fam, rk in comps:
        rs, g = _classical(fam, rk)
        for r in rs:
            roots.append(la.zero(off) + r + la.zero(n - off - rk))
        grams.append(g)
        off += rk
    gram = la.mat(inner_product) if inner_product is not None else _block_diag(grams)
    lat = la.mat(lattice) if lattice is not None else la.identity(n)
    space = AmbientSpace(n, lat, gram)
    return RootFanDatum(
        space,
        roots,
        twist=_automorphism(theta, comps, n),
        involution=_automorphism(iota, comps, n),
        name=name or "x".join(f"{f}{r}" for f, r in comps),
    )
