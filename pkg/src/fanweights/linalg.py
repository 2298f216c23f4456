"""Exact rational linear algebra on tuples of Fractions.

Vectors are tuples of :class:`fractions.Fraction`; matrices are tuples of
row tuples.  Elimination is delegated to sympy's ``DomainMatrix`` over QQ.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Vec = Tuple[Fraction, ...]
Mat = Tuple[Vec, ...]


def frac(x) -> Fraction:
    """Parse an int, Fraction, or "p/q" string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot read {x!r} as an exact rational")


def vec(xs: Iterable) -> Vec:
    return tuple(frac(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def zero(n: int) -> Vec:
    return (Fraction(0),) * n


def identity(n: int) -> Mat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Vec) -> Vec:
    c = frac(c)
    return tuple(c * x for x in a)


def neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def is_zero(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def transpose(m: Sequence[Sequence[Fraction]]) -> Mat:
    if not m:
        return ()
    return tuple(tuple(col) for col in zip(*m))


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vec:
    return tuple(dot(row, v) for row in m)


def vec_mat(v: Sequence[Fraction], m: Sequence[Sequence[Fraction]]) -> Vec:
    """Row vector times matrix (covector pulled back along ``m``)."""
    ncols = len(m[0]) if m else 0
    return tuple(sum((v[i] * m[i][j] for i in range(len(m))), Fraction(0)) for j in range(ncols))


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(r, c) for c in bt) for r in a)


# -- sympy bridge -----------------------------------------------------------

def _dm(rows: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> DomainMatrix:
    nr = len(rows)
    nc = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    data = [[QQ(x.numerator, x.denominator) for x in r] for r in rows]
    return DomainMatrix(data, (nr, nc), QQ)


def _back(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _rows(dm: DomainMatrix) -> Mat:
    return tuple(tuple(_back(x) for x in r) for r in dm.to_list())


def rref(m: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> Tuple[Mat, Tuple[int, ...]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if not m:
        return (), ()
    r, piv = _dm(m, ncols).rref()
    rows = _rows(r)[: len(piv)]
    return rows, tuple(piv)


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence[Fraction]], ncols: int) -> Mat:
    """Basis of {x : m x = 0} in QQ^ncols (RREF-canonical)."""
    if not m:
        return identity(ncols)
    red, piv = rref(m, ncols)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -red[i][f]
        basis.append(tuple(x))
    return tuple(basis)


def row_space(vectors: Sequence[Sequence[Fraction]], n: int) -> Mat:
    """Canonical (RREF) basis of the span of ``vectors`` in QQ^n."""
    vs = [v for v in vectors if not is_zero(v)]
    if not vs:
        return ()
    return rref(vs, n)[0]


def complement_annihilator(vectors: Sequence[Sequence[Fraction]], n: int) -> Mat:
    """Basis of the covectors vanishing on span(vectors)."""
    return nullspace(list(vectors), n)


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    if not m:
        return Fraction(1)
    return _back(_dm(m).det())


def inverse(m: Sequence[Sequence[Fraction]]) -> Mat:
    return _rows(_dm(m).inv())


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction], ncols: Optional[int] = None) -> Optional[Vec]:
    """One solution of a x = b (free variables set to 0), or None."""
    nc = ncols if ncols is not None else (len(a[0]) if a else 0)
    aug = [tuple(r) + (bi,) for r, bi in zip(a, b)]
    if not aug:
        return zero(nc)
    red, piv = rref(aug, nc + 1)
    if nc in piv:
        return None
    x = [Fraction(0)] * nc
    for i, p in enumerate(piv):
        x[p] = red[i][nc]
    return tuple(x)


def solve_unique(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction], ncols: Optional[int] = None) -> Optional[Vec]:
    """The unique solution of a x = b; None if inconsistent; ValueError if not unique."""
    nc = ncols if ncols is not None else (len(a[0]) if a else 0)
    x = solve(a, b, nc)
    if x is None:
        return None
    if rank(a) < nc:
        raise ValueError("linear system has a positive-dimensional solution set")
    return x


def in_span(v: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]]) -> bool:
    if is_zero(v):
        return True
    if not vectors:
        return False
    return solve(transpose(vectors), v, len(vectors)) is not None


def coordinates(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> Optional[Vec]:
    """Coordinates of v in a linearly independent ``basis`` (None if outside the span)."""
    if not basis:
        return () if is_zero(v) else None
    return solve(transpose(basis), v, len(basis))


def projector(onto: Sequence[Sequence[Fraction]], along: Sequence[Sequence[Fraction]], n: int) -> Mat:
    """Matrix of the projection onto span(onto) along span(along).

    The two spans must be complementary in QQ^n.
    """
    basis = list(onto) + list(along)
    if len(basis) != n or rank(basis) != n:
        raise ValueError("subspaces are not complementary")
    if not onto:
        return tuple(zero(n) for _ in range(n))
    b = transpose(basis)
    binv = inverse(b)
    k = len(onto)
    keep = tuple(tuple(binv[i][j] if i < k else Fraction(0) for j in range(n)) for i in range(n))
    return mat_mul(b, keep)


def orthogonal_complement(vectors: Sequence[Sequence[Fraction]], gram: Sequence[Sequence[Fraction]], n: int) -> Mat:
    """Basis of the gram-orthogonal complement of span(vectors)."""
    cov = [mat_vec(gram, v) for v in vectors if not is_zero(v)]
    return nullspace(cov, n)


def orthogonal_projector(basis: Sequence[Sequence[Fraction]], gram: Sequence[Sequence[Fraction]], n: int) -> Mat:
    basis = list(row_space(basis, n))
    return projector(basis, orthogonal_complement(basis, gram, n), n)


# -- integer helpers --------------------------------------------------------

def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(abs(a), abs(b))


def common_denominator(xs: Iterable[Fraction]) -> int:
    return reduce(lcm, (x.denominator for x in xs), 1)


def primitive(v: Sequence[Fraction]) -> Tuple[int, ...]:
    """Positive rescaling of v to a primitive integer vector."""
    d = common_denominator(v)
    ints = [int(x * d) for x in v]
    g = reduce(gcd, (abs(i) for i in ints), 0)
    if g == 0:
        return tuple(ints)
    return tuple(i // g for i in ints)


def integer_row_basis(rows: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Hermite-style basis of the integer row lattice spanned by ``rows``."""
    work = [list(r) for r in rows if any(r)]
    if not work:
        return []
    n = len(work[0])
    basis: List[Tuple[int, ...]] = []
    col = 0
    while work and col < n:
        nz = [r for r in work if r[col] != 0]
        if not nz:
            col += 1
            continue
        rest = [r for r in work if r[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [a - q * b for a, b in zip(r, piv)]
                if r2[col] != 0:
                    new.append(r2)
                elif any(r2):
                    rest.append(r2)
            nz = new
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        basis.append(tuple(piv))
        work = rest
        col += 1
    return basis


def lattice_basis(generators: Sequence[Sequence[Fraction]]) -> Mat:
    """Basis of the rational lattice generated by ``generators``."""
    gens = [g for g in generators if not is_zero(g)]
    if not gens:
        return ()
    d = common_denominator(x for g in gens for x in g)
    rows = [[int(x * d) for x in g] for g in gens]
    return tuple(tuple(Fraction(a, d) for a in r) for r in integer_row_basis(rows))


def integer_kernel(m: Sequence[Sequence[int]], nrows: int) -> List[Tuple[int, ...]]:
    """Basis of {z in Z^nrows : z m = 0}; saturated by construction."""
    ncols = len(m[0]) if m else 0
    aug = [list(m[i]) + [int(i == j) for j in range(nrows)] for i in range(nrows)]
    basis = integer_row_basis(aug)
    return [tuple(r[ncols:]) for r in basis if not any(r[:ncols])]


def saturated_sublattice(lattice: Sequence[Sequence[Fraction]], subspace: Sequence[Sequence[Fraction]], n: int) -> Mat:
    """Basis of the intersection of a full-rank lattice (rows) with a subspace."""
    sub = row_space(subspace, n)
    if not sub:
        return ()
    ann = complement_annihilator(sub, n)
    if not ann:
        return lattice_basis(lattice)
    prod = mat_mul(lattice, transpose(ann))
    d = common_denominator(x for r in prod for x in r)
    ints = [[int(x * d) for x in r] for r in prod]
    ker = integer_kernel(ints, len(lattice))
    return tuple(vec_mat([Fraction(z) for z in k], lattice) for k in ker)
