"""Coregularity of symmetric pairs from torus and root-restriction data.

A pair is given by the character lattice X_G of a maximal torus, its roots,
the restriction map X_G -> X_H to the characters of T_H, and the roots of H.
Two independent criteria are implemented:

* divisor matching: every component of every divisor {alpha = 1} on T_H lies
  in some {beta = 1} with beta a root of H;
* discriminant orders: (D^H)^2 / D^G has nonnegative order along every
  divisor component, counted by restricting to a curve through it.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from . import linalg as la

IVec = Tuple[int, ...]


class CoregularityError(ValueError):
    pass


def _primitive(v: Sequence[int]) -> Tuple[int, IVec]:
    """(k, chi0) with v = k * chi0, k >= 1 and chi0 primitive."""
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g, tuple(x // g for x in v)


def _canonical_line(v: IVec) -> IVec:
    """Sign-normalized primitive direction (first nonzero entry positive)."""
    first = next(x for x in v if x)
    return v if first > 0 else tuple(-x for x in v)


@dataclass(frozen=True)
class SymmetricPairDatum:
    name: str
    roots_G: Tuple[IVec, ...]
    restriction: Tuple[IVec, ...]
    roots_H: Tuple[IVec, ...]
    connected_H: bool = True
    rank_X: Optional[int] = None

    def __post_init__(self):
        rg, rh = self.rank_G, self.rank_H
        if any(len(r) != rg for r in self.roots_G) or any(len(r) != rg for r in self.restriction):
            raise CoregularityError("root or restriction of the wrong rank")
        if any(len(r) != rh for r in self.roots_H):
            raise CoregularityError("root of H of the wrong rank")
        sg, sh = set(self.roots_G), set(self.roots_H)
        if any(tuple(-x for x in r) not in sg for r in sg) or any(tuple(-x for x in r) not in sh for r in sh):
            raise CoregularityError("root sets must be closed under negation")
        if rh and not self._surjective():
            raise CoregularityError("restriction map is not surjective on character lattices")
        images = {self.restrict(r) for r in self.roots_G}
        if not sh <= images:
            raise CoregularityError("roots of H must be restrictions of roots of G")

    @property
    def rank_G(self) -> int:
        return len(self.restriction[0]) if self.restriction else (len(self.roots_G[0]) if self.roots_G else 0)

    @property
    def rank_H(self) -> int:
        return len(self.restriction)

    def _surjective(self) -> bool:
        cols = [tuple(self.restriction[i][j] for i in range(self.rank_H)) for j in range(self.rank_G)]
        basis = la.integer_row_basis(cols)
        if len(basis) != self.rank_H:
            return False
        prod = 1
        for i, row in enumerate(basis):
            prod *= row[i] if i < len(row) else 0
        return abs(prod) == 1

    def restrict(self, chi: Sequence[int]) -> IVec:
        return tuple(sum(r[j] * chi[j] for j in range(self.rank_G)) for r in self.restriction)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "XG_rank": self.rank_G,
            "roots_G": [list(r) for r in self.roots_G],
            "restriction": [list(r) for r in self.restriction],
            "roots_H": [list(r) for r in self.roots_H],
            "connected_H": self.connected_H,
            "rank_X": self.rank_X,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SymmetricPairDatum":
        return cls(
            d.get("name", ""),
            tuple(tuple(int(x) for x in r) for r in d["roots_G"]),
            tuple(tuple(int(x) for x in r) for r in d["restriction"]),
            tuple(tuple(int(x) for x in r) for r in d["roots_H"]),
            bool(d.get("connected_H", True)),
            d.get("rank_X"),
        )


# -- restricted roots ---------------------------------------------------------------

@dataclass(frozen=True)
class RestrictedRoots:
    multiset: Tuple[Tuple[IVec, int], ...]
    zero_roots: Tuple[IVec, ...]

    @property
    def has_zero(self) -> bool:
        return bool(self.zero_roots)


def restricted_roots(pair: SymmetricPairDatum) -> RestrictedRoots:
    c: Counter = Counter()
    zeros = []
    for a in pair.roots_G:
        r = pair.restrict(a)
        if any(r):
            c[r] += 1
        else:
            zeros.append(a)
    return RestrictedRoots(tuple(sorted(c.items())), tuple(sorted(zeros)))


# -- divisor components ---------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    """The component {chi0 = exp(2 pi i s / k)} of a divisor on T_H."""

    direction: IVec
    s: int
    k: int

    @property
    def order(self) -> int:
        """Multiplicative order of the root of unity exp(2 pi i s / k)."""
        return self.k // gcd(self.s, self.k)

    def key(self) -> Tuple[IVec, Fraction]:
        return self.direction, Fraction(self.s, self.k) % 1


def _components(pair: SymmetricPairDatum) -> Dict[Tuple[IVec, Fraction], List[IVec]]:
    """Divisor components {chi0 = zeta} of all {alpha|_{T_H} = 1}, keyed canonically."""
    out: Dict[Tuple[IVec, Fraction], List[IVec]] = {}
    for a in pair.roots_G:
        r = pair.restrict(a)
        if not any(r):
            continue
        k, chi0 = _primitive(r)
        line = _canonical_line(chi0)
        sign = 1 if line == chi0 else -1
        for s in range(k):
            # {chi0 = zeta} equals {line = zeta^sign}
            key = (line, Fraction(sign * s, k) % 1)
            out.setdefault(key, []).append(a)
    return dict(sorted(out.items()))


def _killed_by(beta: IVec, line: IVec, t: Fraction) -> bool:
    """Is {line = exp(2 pi i t)} contained in {beta = 1}?"""
    k, b0 = _primitive(beta)
    if _canonical_line(b0) != line:
        return False
    j = k if b0 == line else -k
    return (t * j).denominator == 1


@dataclass(frozen=True)
class Verdict:
    coregular: bool
    witness: Optional[str] = None


def is_coregular_symmetric(pair: SymmetricPairDatum) -> Verdict:
    if not pair.connected_H:
        raise CoregularityError("only connected H is supported")
    rr = restricted_roots(pair)
    if rr.has_zero:
        return Verdict(False, f"root {list(rr.zero_roots[0])} restricts to zero")
    for (line, t), alphas in _components(pair).items():
        if not any(_killed_by(b, line, t) for b in pair.roots_H):
            return Verdict(False, f"component {{{list(line)} = exp(2 pi i * {t})}} of root {list(alphas[0])} is not an H-wall")
    return Verdict(True)


# -- discriminant orders ----------------------------------------------------------------

def _unimodular_to_first(chi0: IVec) -> Tuple[IVec, ...]:
    """An integer matrix U with det +-1 and U chi0 = e_1 (chi0 primitive)."""
    r = len(chi0)
    aug = [[chi0[i]] + [int(i == j) for j in range(r)] for i in range(r)]
    basis = la.integer_row_basis(aug)
    if len(basis) != r or basis[0][0] != 1 or any(b[0] for b in basis[1:]):
        raise CoregularityError("direction is not primitive")
    return tuple(tuple(b[1:]) for b in basis)


def _vanishing_order(coeffs: IVec, s: int, k: int, g: Sequence[Fraction]) -> Optional[int]:
    """Order at lambda = 1 of 1 - chi(t(lambda)) on the curve t = (zeta lambda, g_2, ...).

    Returns None when the curve is degenerate for this factor.
    """
    lam = sympy.Symbol("lam")
    zeta = sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(s, k))
    c1 = coeffs[0]
    rest = sympy.Integer(1)
    for c, gi in zip(coeffs[1:], g):
        rest *= sympy.Rational(gi.numerator, gi.denominator) ** c
    if any(coeffs[1:]) and rest == 1:
        return None
    f = 1 - zeta ** c1 * rest * lam ** c1
    order = 0
    while True:
        val = sympy.nsimplify(sympy.expand_complex(f.subs(lam, 1)))
        if not val.equals(0):
            return order
        order += 1
        f = sympy.diff(f, lam)
        if order > 8:
            raise CoregularityError("vanishing order exceeds the expected bound")


@dataclass(frozen=True)
class ComponentOrders:
    direction: IVec
    phase: Fraction
    ord_DG: int
    ord_DH2: int

    @property
    def margin(self) -> int:
        return self.ord_DH2 - self.ord_DG


@dataclass(frozen=True)
class DivisorProfile:
    components: Tuple[ComponentOrders, ...]
    zero_roots: Tuple[IVec, ...]
    non_reduced: bool
    regular: bool


_CURVE_CANDIDATES = (
    (Fraction(2), Fraction(3), Fraction(5), Fraction(7), Fraction(11), Fraction(13)),
    (Fraction(3, 2), Fraction(5, 3), Fraction(7, 5), Fraction(11, 7), Fraction(13, 11), Fraction(17, 13)),
)


def discriminant_order_profile(pair: SymmetricPairDatum) -> DivisorProfile:
    """Orders of D^G and (D^H)^2 along each divisor component, via curve restriction."""
    rr = restricted_roots(pair)
    comps = []
    for (line, t), _ in _components(pair).items():
        u = _unimodular_to_first(line)
        s, k = t.numerator, t.denominator
        for g in _CURVE_CANDIDATES:
            g = g[: pair.rank_H - 1]
            try:
                og = 0
                for a in pair.roots_G:
                    o = _vanishing_order(tuple(sum(ui[j] * x for j, x in enumerate(pair.restrict(a))) for ui in u), s, k, g)
                    if o is None:
                        raise ValueError
                    og += o
                oh = 0
                for b in pair.roots_H:
                    o = _vanishing_order(tuple(sum(ui[j] * x for j, x in enumerate(b)) for ui in u), s, k, g)
                    if o is None:
                        raise ValueError
                    oh += o
                break
            except ValueError:
                continue
        else:
            raise CoregularityError("every candidate curve is degenerate")
        comps.append(ComponentOrders(line, t, og, 2 * oh))
    lines = Counter()
    for r, _ in rr.multiset:
        kk, chi0 = _primitive(r)
        lines[(chi0, kk)] += 1
    dirs = Counter(chi0 for chi0, _ in lines)
    non_reduced = any(v > 1 for v in dirs.values())
    regular = not rr.has_zero and all(c.margin >= 0 for c in comps)
    return DivisorProfile(tuple(comps), rr.zero_roots, non_reduced, regular)


# -- constructions -------------------------------------------------------------------------

def _gl_roots(n: int, offset: int = 0, total: Optional[int] = None) -> List[IVec]:
    total = total if total is not None else n
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = [0] * total
                v[offset + i] += 1
                v[offset + j] -= 1
                out.append(tuple(v))
    return out


def _unit(i: int, n: int, c: int = 1) -> List[int]:
    v = [0] * n
    v[i] = c
    return v


def _type_c_roots(n: int) -> List[IVec]:
    out = set()
    for i in range(n):
        for s in (1, -1):
            v = [0] * n
            v[i] = 2 * s
            out.add(tuple(v))
            for j in range(i + 1, n):
                for t in (1, -1):
                    w = [0] * n
                    w[i], w[j] = s, t
                    out.add(tuple(w))
    return sorted(out)


def _type_bd_roots(n: int, short: bool) -> List[IVec]:
    out = set()
    for i in range(n):
        for s in (1, -1):
            if short:
                v = [0] * n
                v[i] = s
                out.add(tuple(v))
            for j in range(i + 1, n):
                for t in (1, -1):
                    w = [0] * n
                    w[i], w[j] = s, t
                    out.add(tuple(w))
    return sorted(out)


def group_case(name: str, roots: Sequence[IVec], rank: int) -> SymmetricPairDatum:
    """H^diag inside H x H: restriction (x, y) -> x + y."""
    g = [tuple(r) + (0,) * rank for r in roots] + [(0,) * rank + tuple(r) for r in roots]
    res = tuple(tuple(int(j == i or j == i + rank) for j in range(2 * rank)) for i in range(rank))
    return SymmetricPairDatum(name, tuple(sorted(g)), res, tuple(sorted(roots)), True, rank)


def sp_in_gl(n: int) -> SymmetricPairDatum:
    m = 2 * n
    res = []
    for i in range(n):
        row = [0] * m
        row[i] = 1
        row[m - 1 - i] = -1
        res.append(tuple(row))
    return SymmetricPairDatum(f"Sp{m}\\GL{m}", tuple(_gl_roots(m)), tuple(res), tuple(_type_c_roots(n)), True, n)


def so_in_gl(n: int) -> SymmetricPairDatum:
    m = n // 2
    res = []
    for i in range(m):
        row = [0] * n
        row[i] = 1
        row[n - 1 - i] = -1
        res.append(tuple(row))
    roots_h = _type_bd_roots(m, short=bool(n % 2))
    return SymmetricPairDatum(f"SO{n}\\GL{n}", tuple(_gl_roots(n)), tuple(res), tuple(roots_h), True, None)


def gl_gl_in_gl(n: int) -> SymmetricPairDatum:
    m = 2 * n
    res = tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
    roots_h = _gl_roots(n, 0, m) + _gl_roots(n, n, m)
    return SymmetricPairDatum(f"GL{n}xGL{n}\\GL{m}", tuple(_gl_roots(m)), res, tuple(sorted(roots_h)), True, None)


def default_corpus() -> List[Tuple[SymmetricPairDatum, bool]]:
    """(pair, expected verdict)."""
    out: List[Tuple[SymmetricPairDatum, bool]] = []
    for n in (1, 2, 3):
        out.append((group_case(f"GL{n} group case", _gl_roots(n), n), True))
    out.append((group_case("Sp4 group case", _type_c_roots(2), 2), True))
    for n in (1, 2, 3):
        out.append((sp_in_gl(n), True))
    for n in (2, 3, 4, 5):
        out.append((so_in_gl(n), False))
    for n in (1, 2):
        out.append((gl_gl_in_gl(n), False))
    for n in (2, 3):
        p = group_case(f"GL{n}\\Res GL{n} (Galois)", _gl_roots(n), n)
        out.append((p, True))
    p = group_case("SO5\\Res SO5 (Galois)", _type_bd_roots(2, True), 2)
    out.append((p, True))
    return out


def conjugate_pair(pair: SymmetricPairDatum, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> SymmetricPairDatum:
    """Transport the pair along unimodular changes of basis A of X_G and B of X_H."""
    am = la.mat(a)
    ainv = la.inverse(am)

    def app(m, v):
        return tuple(int(x) for x in la.mat_vec(m, la.vec(v)))

    roots_g = tuple(sorted(app(am, r) for r in pair.roots_G))
    bm = la.mat(b)
    res = la.mat_mul(la.mat_mul(bm, la.mat(pair.restriction)), ainv)
    res_i = tuple(tuple(int(x) for x in row) for row in res)
    roots_h = tuple(sorted(app(bm, r) for r in pair.roots_H))
    return SymmetricPairDatum(pair.name + " (conjugated)", roots_g, res_i, roots_h, pair.connected_H, pair.rank_X)


def load_pairs(path: Path) -> List[Tuple[SymmetricPairDatum, Optional[bool]]]:
    data = json.loads(Path(path).read_text())
    return [(SymmetricPairDatum.from_json(d), d.get("expected_coregular")) for d in data]


def rank_bookkeeping(pair: SymmetricPairDatum) -> Optional[bool]:
    """rank(T) - rank(T_H) against the declared rank of X; None when undeclared."""
    if pair.rank_X is None:
        return None
    return pair.rank_G - pair.rank_H == pair.rank_X
