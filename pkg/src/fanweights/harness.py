"""Seeded verification suites over the corpus, with JSON/CSV reports."""

from __future__ import annotations

import csv
import io
import itertools
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .cone_calculus import (
    BatchPoints,
    CellSum,
    factorization_cells,
    gamma_integral,
    gamma_LQ_cells,
    gamma_QR_cells,
    hull_volume,
    in_closed_chamber,
    langlands_cells,
)
from .convex_geometry import (
    FGConvexSet,
    GeneratedCone,
    dual_cone_membership,
    partition_counts,
    project_decomposition,
)
from .coregularity import (
    conjugate_pair,
    discriminant_order_profile,
    is_coregular_symmetric,
    rank_bookkeeping,
    SymmetricPairDatum,
)
from .corpus import Corpus, CorpusError, load_corpus
from .gamma_bx import (
    GermFanError,
    compatible_faces,
    corollary_sides,
    descent_coefficients,
    descent_sides,
    descent_slab_points,
    gamma_cells,
    gamma_iota_cells,
    hull_support,
    partition_cells,
    partition_iota_cells,
    splitting_sides,
    top_face,
    weyl_partition_ok,
)
from .orthogonal_sets import (
    OrthogonalSet,
    fit_quasi_polynomial,
    glue_affine_family,
    project_to_face,
    random_orthogonal_set,
    read_offsets,
    validate_orthogonal_set,
    weyl_orbit_family,
)
from .padic_weights import (
    PadicCharacterData,
    PadicWeightError,
    extract_polyexp,
    gamma_function,
    growth_check,
    shift_u,
    summation_lattice,
    unit_integral,
    unit_integral_oracle,
    verify_descent,
    weight_sum,
    weight_sum_detailed,
)
from .root_fan import RootFanDatum, fold_iota

SUITES = ("fan", "orthoset", "cone", "germ", "convex", "coregular", "padic")
ALL = "all"
ORTHO_DATA = ("A1", "A2", "B2", "BC2", "A1xA1")
CONE_DATA = ("A1", "A2", "B2", "A1xA1")
GROWTH_FANS = ("A1/all+", "A1xA1/first", "A2/alpha1")


# -- records and reports ----------------------------------------------------------------

def _ser(x):
    """Exact JSON form: rationals as "p/q" strings."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _ser(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_ser(v) for v in x]
    if isinstance(x, OrthogonalSet):
        return x.to_json()
    return str(x)


FIELDS = ("identity", "anchor", "datum", "samples", "failures", "counterexample", "wall_clock")


@dataclass
class CheckRecord:
    identity: str
    anchor: str
    datum: str
    samples: int
    failures: int
    counterexample: Optional[dict] = None
    wall_clock: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def key(self) -> Tuple[str, str, str]:
        return (self.identity.split(".")[0], self.datum, self.identity)

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "anchor": self.anchor,
            "datum": self.datum,
            "samples": self.samples,
            "failures": self.failures,
            "counterexample": _ser(self.counterexample),
            "wall_clock": self.wall_clock,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CheckRecord":
        return cls(d["identity"], d["anchor"], d["datum"], int(d["samples"]), int(d["failures"]), d.get("counterexample"), d.get("wall_clock"))


@dataclass
class Report:
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def sorted(self) -> "Report":
        return Report(sorted(self.records, key=CheckRecord.key))


def emit_report(r: Report, fmt: str = "json") -> bytes:
    rows = [rec.to_json() for rec in r.records]
    if fmt == "json":
        return (json.dumps(rows, indent=2, ensure_ascii=False) + "\n").encode() if rows else b"[]\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for row in rows:
            ce = row["counterexample"]
            w.writerow([
                row["identity"], row["anchor"], row["datum"], row["samples"], row["failures"],
                "" if ce is None else json.dumps(ce, sort_keys=False, ensure_ascii=False),
                "" if row["wall_clock"] is None else repr(row["wall_clock"]),
            ])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(data: bytes, fmt: str = "json") -> Report:
    text = data.decode()
    if fmt == "json":
        return Report([CheckRecord.from_json(d) for d in json.loads(text)])
    if fmt == "csv":
        rd = csv.reader(io.StringIO(text))
        header = next(rd, None)
        if header is not None and tuple(header) != FIELDS:
            raise ValueError("unexpected CSV header")
        out = []
        for row in rd:
            ce = json.loads(row[5]) if row[5] else None
            wc = float(row[6]) if row[6] else None
            out.append(CheckRecord(row[0], row[1], row[2], int(row[3]), int(row[4]), ce, wc))
        return Report(out)
    raise ValueError(f"unknown format {fmt!r}")


# -- randomness ------------------------------------------------------------------------------

def stream_id(key: str) -> int:
    return zlib.crc32(key.encode())


def rng_for(seed: int, key: str) -> np.random.Generator:
    """Counter-based generator: every draw is reproducible from (seed, key)."""
    return np.random.Generator(np.random.Philox(key=np.array([seed % 2 ** 64, stream_id(key)], dtype=np.uint64)))


WALL_DEN = 211


def _random_batch(rng: np.random.Generator, n: int, dim: int, radius: int, den: int = WALL_DEN) -> BatchPoints:
    num = rng.integers(-radius * den, radius * den + 1, size=(n, dim), dtype=np.int64)
    return BatchPoints(num, den)


def off_wall_batch(rng: np.random.Generator, fs: Sequence[CellSum], n: int, dim: int, radius: int, den: int = WALL_DEN) -> BatchPoints:
    """n random rational points lying on no hyperplane of the given functions."""
    keep = np.zeros((0, dim), dtype=np.int64)
    for _ in range(50):
        b = _random_batch(rng, max(n - len(keep), 16) * 2, dim, radius, den)
        bad = np.zeros(len(b), dtype=bool)
        for f in fs:
            bad |= b.on_walls(f)
        keep = np.concatenate([keep, b.num[~bad]])[:n]
        if len(keep) >= n:
            break
    return BatchPoints(keep, den)


def _split(n: int, k: int) -> List[int]:
    return [n // k + (i < n % k) for i in range(k)]


def _radius(*xs: OrthogonalSet) -> int:
    m = 1
    for x in xs:
        for v in x.points.values():
            for c in v:
                m = max(m, abs(c))
    return int(m) + 3


def _pt(b: BatchPoints, i: int) -> List[str]:
    return [str(x) for x in b.point(i)]


class Ctx:
    def __init__(self, corpus: Corpus, seed: int, samples: int, datum: str, identity: str):
        self.corpus = corpus
        self.seed = seed
        self.samples = samples
        self.datum = datum
        self.identity = identity
        self.key = f"{identity}/{datum}"
        self.rng = rng_for(seed, self.key)
        self.count = 0
        self.failures = 0
        self.example: Optional[dict] = None

    def fail(self, n: int = 1, **example) -> None:
        if n <= 0:
            return
        self.failures += n
        if self.example is None:
            self.example = {"seed": self.seed, "stream": self.key, **example}

    def add(self, n: int) -> None:
        self.count += n


# -- fan suite -------------------------------------------------------------------------------

def chk_fan_euler(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    g = d.full_face
    for ch in d.chambers:
        s = sum((-1) ** ((f.dim - g.dim) % 2) for f in d.faces if ch.positive <= f.positive)
        c.add(1)
        expected = 1 if ch == g else 0
        if s != expected:
            c.fail(chamber=ch.label, value=s)


def chk_fan_adjacency(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    chambers = d.chambers
    nbrs = {ch.label: {q.label for _, q in d.walls(ch)} for ch in chambers}
    degs = {len(v) for v in nbrs.values()}
    c.add(len(chambers))
    if len(degs) != 1:
        c.fail(degrees=sorted(degs))
    for p, qs in nbrs.items():
        for q in qs:
            if p not in nbrs[q]:
                c.fail(chamber=p, neighbor=q, problem="asymmetric adjacency")
    seen = {chambers[0].label}
    todo = [chambers[0].label]
    while todo:
        p = todo.pop()
        for q in nbrs[p]:
            if q not in seen:
                seen.add(q)
                todo.append(q)
    if len(seen) != len(chambers):
        c.fail(problem="chamber graph is not connected", reached=len(seen))


def _reflect_cov(d: RootFanDatum, i: int, b):
    return la.sub(b, la.scale(la.dot(b, d.coroots[i]), d.roots[i]))


def chk_fan_fold(c: Ctx) -> None:
    r = fold_iota(c.corpus.data[c.datum]).datum
    rset = set(r.roots)
    for i in range(len(r.roots)):
        for b in r.roots:
            c.add(1)
            img = _reflect_cov(r, i, b)
            if img not in rset:
                c.fail(root=list(r.roots[i]), image=list(img), problem="restricted roots not reflection closed")


def chk_fan_weyl(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    shapes = {(f.positive, f.levi) for f in d.faces}
    for _ in range(5):
        i = int(c.rng.integers(len(d.roots)))
        perm = [d.index[_reflect_cov(d, i, b)] for b in d.roots]
        c.add(1)
        img = {(frozenset(perm[j] for j in p), frozenset(perm[j] for j in l)) for p, l in shapes}
        if img != shapes:
            c.fail(root=list(d.roots[i]), problem="reflection does not permute the faces")


# -- orthoset suite ----------------------------------------------------------------------------

def _n_sets(c: Ctx, per: int, lo: int = 2, hi: int = 40) -> int:
    return max(lo, min(hi, c.samples // per))


def chk_ortho_closure(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    for _ in range(_n_sets(c, 500)):
        x = random_orthogonal_set(d, c.rng, positive=False)
        y = random_orthogonal_set(d, c.rng, positive=False)
        t = tuple(Fraction(int(v), 5) for v in c.rng.integers(-10, 11, size=d.dimension))
        c.add(1)
        rx, rs = validate_orthogonal_set(x), validate_orthogonal_set(x + y)
        ry = validate_orthogonal_set(y)
        rt = validate_orthogonal_set(x.translate(t))
        scal = lambda r: [s for _, _, s in r.wall_scalars]
        if not rs.is_orthogonal:
            c.fail(X=x, Y=y, problem="sum not orthogonal")
        elif not rt.is_orthogonal or scal(rt) != scal(rx):
            c.fail(X=x, t=list(t), problem="translation changed wall scalars")
        elif scal(rs) != [a + b for a, b in zip(scal(rx), scal(ry))]:
            c.fail(X=x, Y=y, problem="wall scalars not additive")


def chk_ortho_depth(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    for _ in range(_n_sets(c, 500)):
        x = random_orthogonal_set(d, c.rng)
        y = random_orthogonal_set(d, c.rng)
        c.add(1)
        a, b, s = validate_orthogonal_set(x).depth, validate_orthogonal_set(y).depth, validate_orthogonal_set(x + y).depth
        if s < a + b:
            c.fail(X=x, Y=y, depth_sum=s, depths=[a, b])


def chk_ortho_projection(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    for _ in range(_n_sets(c, 1000)):
        x = random_orthogonal_set(d, c.rng, positive=False)
        y = random_orthogonal_set(d, c.rng, positive=False)
        for f in d.faces:
            c.add(1)
            if project_to_face(x + y, f) != la.add(project_to_face(x, f), project_to_face(y, f)):
                c.fail(X=x, Y=y, face=f.label)


def chk_ortho_gluing(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    for _ in range(_n_sets(c, 1000)):
        x = random_orthogonal_set(d, c.rng, positive=False)
        g = read_offsets(x)
        y = glue_affine_family(g, x[d.face_by_label(g.base)])
        c.add(1)
        if y.points != x.points:
            c.fail(X=x)


def chk_ortho_fit(c: Ctx) -> None:
    for _ in range(_n_sets(c, 1000, 2, 10)):
        dim = int(c.rng.integers(1, 3))
        period = int(c.rng.integers(1, 4))
        deg = int(c.rng.integers(0, 3))
        coef = {}
        for res in itertools.product(range(period), repeat=dim):
            for e in itertools.product(range(deg + 1), repeat=dim):
                if sum(e) <= deg:
                    coef[(res, e)] = Fraction(int(c.rng.integers(-6, 7)), int(c.rng.integers(1, 4)))

        def f(m):
            res = tuple(x % period for x in m)
            return sum((v * np.prod([Fraction(mi) ** ei for mi, ei in zip(m, e)]) for (r, e), v in coef.items() if r == res), Fraction(0))

        n = int(np.lcm.reduce(np.arange(1, period + 1)))
        grid = list(itertools.product(range(-2, n * (deg + 2)), repeat=dim))
        samples = {m: f(m) for m in grid}
        c.add(1)
        try:
            g1 = fit_quasi_polynomial(samples, deg, period)
            g2 = fit_quasi_polynomial({m: g1(m) for m in grid}, deg, period)
            if g1.period > period:
                c.fail(period=g1.period, expected=period)
        except Exception as e:  # noqa: BLE001 - any fitter error is a failure here
            c.fail(problem=repr(e))
            continue
        if g1.constituents != g2.constituents or any(g1(m) != v for m, v in samples.items()):
            c.fail(dim=dim, period=period, degree=deg)


# -- cone suite ----------------------------------------------------------------------------------

def _nested_pairs(d: RootFanDatum):
    return [(q, r) for q in d.faces for r in d.faces if q.positive <= r.positive]


def _closed_chamber_point(c: Ctx, d: RootFanDatum, q, r) -> Tuple[Fraction, ...]:
    for _ in range(1000):
        x = tuple(Fraction(int(v), 3) for v in c.rng.integers(-9, 10, size=d.dimension))
        if in_closed_chamber(d, q, r, x):
            return x
    return la.zero(d.dimension)


def chk_cone_factorization(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    pairs = _nested_pairs(d)
    per = max(1, -(-c.samples // len(pairs)))
    for q, r in pairs:
        x = _closed_chamber_point(c, d, q, r)
        lhs, rhs = gamma_QR_cells(d, q, r, x), factorization_cells(d, q, r, x)
        b = _random_batch(c.rng, per, d.dimension, 6, 7)
        bad = np.nonzero(b.evaluate(lhs) != b.evaluate(rhs))[0]
        c.add(len(b))
        if len(bad):
            c.fail(len(bad), Q=q.label, R=r.label, X=list(x), H=_pt(b, int(bad[0])))


def chk_cone_langlands(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    pairs = _nested_pairs(d)
    per = max(1, -(-c.samples // len(pairs)))
    for q, r in pairs:
        f = langlands_cells(d, q, r)
        b = off_wall_batch(c.rng, [f], per, d.dimension, 6)
        want = 1 if q == r else 0
        bad = np.nonzero(b.evaluate(f) != want)[0]
        c.add(len(b))
        if len(bad):
            c.fail(len(bad), Q=q.label, R=r.label, H=_pt(b, int(bad[0])))


def _positive_set(c: Ctx, d: RootFanDatum) -> OrthogonalSet:
    """Nonnegative wall scalars and nonnegative depth."""
    for _ in range(20):
        y = random_orthogonal_set(d, c.rng, scale=2, translate=False)
        if validate_orthogonal_set(y).is_positive:
            return y
    base = d.chambers[0]
    simple = d.simple_roots_at(base.positive, frozenset())
    while True:
        t = tuple(Fraction(int(v), 2) for v in c.rng.integers(-6, 7, size=d.dimension))
        if all(la.dot(d.roots[i], t) >= 0 for i in simple):
            return weyl_orbit_family(d, base, t)


def chk_cone_positivity(c: Ctx) -> None:
    d = c.corpus.data[c.datum]
    l = d.chambers[0]
    g = d.full_face
    for _ in range(2):
        y = _positive_set(c, d)
        f = gamma_LQ_cells(d, l, g, y)
        b = _random_batch(c.rng, max(1, c.samples // 2), d.dimension, _radius(y), 5)
        v = b.evaluate(f)
        bad = np.nonzero((v != 0) & (v != 1))[0]
        c.add(len(b))
        if len(bad):
            c.fail(len(bad), Y=y, H=_pt(b, int(bad[0])), value=int(v[bad[0]]))
        if d.rank <= 2:
            c.add(1)
            hv, gi = hull_volume(d, l, g, y), gamma_integral(d, l, g, y)
            if hv != gi:
                c.fail(Y=y, hull_volume=hv, integral=gi)


# -- germ suite ------------------------------------------------------------------------------------

def _germ(c: Ctx):
    return c.corpus.germs[c.datum]


def chk_germ_weyl(c: Ctx) -> None:
    c.add(1)
    if not weyl_partition_ok(_germ(c).cfg):
        c.fail(problem="W_x translates of P_{B_x} do not partition the chambers")


def _sets(c: Ctx, d: RootFanDatum, k: int, positive: bool = True) -> List[OrthogonalSet]:
    return [random_orthogonal_set(d, c.rng, positive=positive, scale=3) for _ in range(k)]


def chk_germ_partition(c: Ctx) -> None:
    cfg = _germ(c).cfg
    b = cfg.big
    sets = _sets(c, b, 2) + _sets(c, b, 1, positive=False)
    for x, per in zip(sets, _split(c.samples, len(sets))):
        fs = [(r, partition_cells(cfg, r, x)) for r in cfg.faces]
        pts = off_wall_batch(c.rng, [f for _, f in fs], per, b.dimension, _radius(x))
        c.add(len(pts))
        for r, f in fs:
            bad = np.nonzero(pts.evaluate(f) != 1)[0]
            if len(bad):
                c.fail(len(bad), X=x, R=r.label, H=_pt(pts, int(bad[0])))


def chk_germ_iota_partition(c: Ctx) -> None:
    cfg = _germ(c).cfg
    b = cfg.big
    sets = _sets(c, b, 3)
    for x, per in zip(sets, _split(c.samples, len(sets))):
        fs = [(r, partition_iota_cells(cfg, r, x)) for r in cfg.iota_faces()]
        pts = off_wall_batch(c.rng, [f for _, f in fs], per, b.dimension, _radius(x))
        c.add(len(pts))
        for r, f in fs:
            bad = np.nonzero(pts.evaluate(f) != 1)[0]
            if len(bad):
                c.fail(len(bad), X=x, R=r.label, H=_pt(pts, int(bad[0])))


def _hull_check(c: Ctx, mode: str) -> None:
    cfg = _germ(c).cfg
    b = cfg.big
    n_sets = 20
    per = max(1, c.samples // 10)
    for _ in range(n_sets):
        x = random_orthogonal_set(b, c.rng, scale=3, den=2)
        g = top_face(cfg, mode)
        f = gamma_cells(cfg, g, x) if mode == "plain" else gamma_iota_cells(cfg, g, x)
        hs = hull_support(cfg, x, mode)
        pts = _random_batch(c.rng, per, b.dimension, _radius(x), 4)
        v = pts.evaluate(f)
        inside = hs.contains_batch(pts.num, pts.den)
        bad = np.nonzero(v != inside.astype(np.int64))[0]
        c.add(len(pts))
        if len(bad):
            c.fail(len(bad), X=x, H=_pt(pts, int(bad[0])), gamma=int(v[bad[0]]), member=bool(inside[bad[0]]))


def chk_germ_hull(c: Ctx) -> None:
    _hull_check(c, "plain")


def chk_germ_hull_iota(c: Ctx) -> None:
    _hull_check(c, "iota")


def chk_germ_splitting(c: Ctx) -> None:
    cfg = _germ(c).cfg
    b = cfg.big
    pairs = 10
    per = max(1, c.samples // (pairs * 10))
    for _ in range(pairs):
        x, y = random_orthogonal_set(b, c.rng, scale=2), random_orthogonal_set(b, c.rng, scale=2)
        sides = [(r, splitting_sides(cfg, x, y, r)) for r in cfg.faces]
        pts = off_wall_batch(c.rng, [f for _, s in sides for f in s], per, b.dimension, _radius(x, y) * 2)
        for r, (lhs, rhs) in sides:
            bad = np.nonzero(pts.evaluate(lhs) != pts.evaluate(rhs))[0]
            c.add(len(pts))
            if len(bad):
                c.fail(len(bad), X=x, Y=y, R=r.label, H=_pt(pts, int(bad[0])))


def chk_germ_corollary(c: Ctx) -> None:
    cfg = _germ(c).cfg
    b = cfg.big
    pairs = 5
    per = max(1, c.samples // (pairs * 10))
    for _ in range(pairs):
        x, y = random_orthogonal_set(b, c.rng, scale=2), _positive_set(c, b)
        for q in cfg.faces:
            for r in cfg.faces:
                if not q.positive <= r.positive:
                    continue
                lhs, rhs = corollary_sides(cfg, x, y, q, r)
                pts = off_wall_batch(c.rng, [lhs, rhs], per, b.dimension, _radius(x, y) * 2)
                bad = np.nonzero(pts.evaluate(lhs) != pts.evaluate(rhs))[0]
                c.add(len(pts))
                if len(bad):
                    c.fail(len(bad), X=x, Y=y, Q=q.label, R=r.label, H=_pt(pts, int(bad[0])))


def _slab_batch(c: Ctx, origin, dirs, n: int, den: int = 7) -> List[Tuple[Fraction, ...]]:
    out = []
    for _ in range(n):
        h = origin
        for v in dirs:
            h = la.add(h, la.scale(Fraction(int(c.rng.integers(-40, 41)), den), v))
        out.append(h)
    return out


def chk_germ_descent(c: Ctx) -> None:
    e = _germ(c)
    cfg = e.cfg
    b = cfg.big
    dc = descent_coefficients(cfg, e.epsilon)
    comp = compatible_faces(cfg, e.epsilon)
    dd = dc.as_dict()
    for q in comp:
        c.add(1)
        if sum((dd[r.label] for r in comp if q.positive <= r.positive), Fraction(0)) != 1:
            c.fail(problem="defining relation", face=q.label)
    for _ in range(5):
        nudged = e.epsilon
        for v in cfg.iota_fixed:
            nudged = la.add(nudged, la.scale(Fraction(int(c.rng.integers(-9, 10)), 1000), v))
        try:
            other = descent_coefficients(cfg, nudged).as_dict()
        except GermFanError:
            continue
        c.add(1)
        if other != dd:
            c.fail(problem="d_eps not locally constant in eps", epsilon=list(nudged))
    sets = _sets(c, b, 5)
    per = max(1, c.samples // len(sets))
    detected = {label: False for label in dd}
    for x in sets:
        lhs, rhs = descent_sides(cfg, x, dc)
        pts = _random_batch(c.rng, per, b.dimension, _radius(x), 7)
        lv = pts.evaluate(lhs)
        terms = {label: pts.evaluate(f) for (label, _), (_, f) in zip(dc.coefficients, rhs)}
        rv = np.zeros(len(pts), dtype=object)
        for l, t in terms.items():
            rv = rv + dd[l] * t.astype(object)
        bad = np.nonzero(lv != rv)[0]
        c.add(len(pts))
        if len(bad):
            c.fail(len(bad), X=x, H=_pt(pts, int(bad[0])), problem="descent identity")
        for label, t in terms.items():
            detected[label] |= bool(np.any(t != 0))
        for label, origin, dirs in descent_slab_points(cfg, x, dc):
            for h in _slab_batch(c, origin, dirs, 100):
                l = lhs(h)
                vals = {lab: f(h) for (lab, _), (_, f) in zip(dc.coefficients, rhs)}
                r = sum((dd[k] * v for k, v in vals.items()), Fraction(0))
                c.add(1)
                if l != r:
                    c.fail(X=x, H=[str(v) for v in h], problem="descent identity on slab", face=label)
                for k, v in vals.items():
                    detected[k] |= v != 0
    for label, ok in detected.items():
        c.add(1)
        if not ok:
            c.fail(problem="mutation of d_eps undetected", face=label)


# -- convex suite ----------------------------------------------------------------------------------

def _dual_samples(c: Ctx, s: FGConvexSet, n: int) -> np.ndarray:
    dc = s.dual_cone
    rays = np.array([list(r) for r in dc.rays], dtype=np.int64).reshape(-1, s.n)
    lin = np.array([[int(x) for x in la.primitive(l)] for l in dc.lineality], dtype=np.int64).reshape(-1, s.n)
    y = np.zeros((n, s.n), dtype=np.int64)
    if len(rays):
        y += c.rng.integers(0, 8, size=(n, len(rays))) @ rays
    if len(lin):
        y += c.rng.integers(-8, 9, size=(n, len(lin))) @ lin
    return y


def chk_convex_partition(c: Ctx) -> None:
    s = c.corpus.convex_sets[c.datum]
    ys = _dual_samples(c, s, c.samples)
    inside = dual_cone_membership(s, ys)
    counts = partition_counts(s, ys)
    bad = np.nonzero(~inside | (counts != 1))[0]
    c.add(len(ys))
    if len(bad):
        i = int(bad[0])
        c.fail(len(bad), Y=[int(v) for v in ys[i]], count=int(counts[i]), in_dual=bool(inside[i]))


def chk_convex_polarity(c: Ctx) -> None:
    s = c.corpus.convex_sets[c.datum]
    a = s.asymptotic_cone
    c.add(1)
    if a.polar().polar() != a:
        c.fail(problem="double polar differs")


def _random_point(c: Ctx, s: FGConvexSet) -> Tuple[Fraction, ...]:
    w = c.rng.integers(0, 6, size=len(s.vertices))
    if w.sum() == 0:
        w[0] = 1
    tot = int(w.sum())
    p = tuple(sum((Fraction(int(wi), tot) * v[j] for wi, v in zip(w, s.vertices)), Fraction(0)) for j in range(s.n))
    for r in s.rays:
        p = la.add(p, la.scale(Fraction(int(c.rng.integers(0, 4)), 2), r))
    for l in s.lineality:
        p = la.add(p, la.scale(Fraction(int(c.rng.integers(-3, 4)), 2), l))
    return p


def chk_convex_normal(c: Ctx) -> None:
    s = c.corpus.convex_sets[c.datum]
    same = [t for k, t in sorted(c.corpus.convex_sets.items()) if t.n == s.n]
    for _ in range(max(3, min(20, c.samples // 500))):
        h = s.vertices[int(c.rng.integers(len(s.vertices)))] if c.rng.integers(2) else _random_point(c, s)
        other = same[int(c.rng.integers(len(same)))]
        p = _random_point(c, other)
        t = la.sub(h, p)
        o = FGConvexSet([la.add(v, t) for v in other.vertices], other.rays, other.lineality, other.gram)
        inter = s.intersect(o)
        c.add(1)
        a, b = s.normal_cone_at(h), o.normal_cone_at(h)
        total = GeneratedCone.build([la.vec(r) for r in a.rays + b.rays], list(a.lineality) + list(b.lineality), s.n)
        if inter.normal_cone_at(h) != total:
            c.fail(H=list(h), translate=list(t), problem="normal cone of intersection")


def chk_convex_projection(c: Ctx) -> None:
    name, b, xi = c.corpus.projections[int(c.datum.split("#")[1])]
    s = c.corpus.convex_sets[name]
    n = max(1, c.samples // 10)
    pts = [_random_point(c, s) for _ in range(n)]
    pd = project_decomposition(s, b, xi, pts)
    c.add(pd.samples)
    if pd.preimage_failures:
        x, y, k = pd.preimage_failures[0]
        c.fail(len(pd.preimage_failures), x=list(x), y=list(y), preimages=k)
    if pd.pairwise_failures:
        c.fail(len(pd.pairwise_failures), problem="pairwise image intersection", example=[list(pd.pairwise_failures[0][0])])


# -- coregular suite ----------------------------------------------------------------------------------

def _pair(c: Ctx) -> Tuple[SymmetricPairDatum, Optional[bool]]:
    for p, exp in c.corpus.pairs:
        if p.name == c.datum:
            return p, exp
    raise KeyError(c.datum)


def chk_coregular_verdict(c: Ctx) -> None:
    p, exp = _pair(c)
    v = is_coregular_symmetric(p)
    c.add(1)
    if exp is not None and v.coregular != exp:
        c.fail(expected=exp, got=v.coregular, witness=v.witness)


def chk_coregular_agreement(c: Ctx) -> None:
    p, _ = _pair(c)
    c.add(1)
    v, prof = is_coregular_symmetric(p), discriminant_order_profile(p)
    if v.coregular != prof.regular:
        c.fail(divisor=v.coregular, discriminant=prof.regular)


def chk_coregular_rank(c: Ctx) -> None:
    p, _ = _pair(c)
    c.add(1)
    if rank_bookkeeping(p) is False:
        c.fail(rank_G=p.rank_G, rank_H=p.rank_H, declared=p.rank_X)


def _unimodular(rng: np.random.Generator, n: int) -> List[List[int]]:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i == j:
            m = [[-x for x in row] for row in m]
            continue
        k = int(rng.integers(-2, 3))
        m[int(i)] = [a + k * b for a, b in zip(m[int(i)], m[int(j)])]
    return m


def chk_coregular_invariance(c: Ctx) -> None:
    p, _ = _pair(c)
    base = is_coregular_symmetric(p).coregular
    for _ in range(5):
        a = _unimodular(c.rng, p.rank_G)
        bm = _unimodular(c.rng, p.rank_H) if p.rank_H else []
        q = conjugate_pair(p, a, bm)
        perm = c.rng.permutation(len(q.roots_G))
        q = SymmetricPairDatum(q.name, tuple(q.roots_G[i] for i in perm), q.restriction, q.roots_H, q.connected_H, q.rank_X)
        c.add(1)
        if is_coregular_symmetric(q).coregular != base or discriminant_order_profile(q).regular != base:
            c.fail(A=a, B=bm)


# -- padic suite ----------------------------------------------------------------------------------------

def chk_padic_unit(c: Ctx) -> None:
    for q in (2, 3, 5, 7):
        for c0 in (-1, 0, 1, 2):
            for m in range(-6, 7):
                c.add(1)
                if unit_integral(q, c0, m) != unit_integral_oracle(q, c0, m):
                    c.fail(q=q, c0=c0, m=m)


def _brute_weight(s) -> Fraction:
    """Independent sum: scalar Gamma evaluation and the residue-class oracle over a wide box."""
    basis = summation_lattice(s)
    res = weight_sum_detailed(s)
    f = gamma_function(s)
    kv = s.chars.valuations
    total = Fraction(0)
    box = [range(lo - 2, hi + 3) for lo, hi in res.box] if basis else [range(1)]
    for z in itertools.product(*box):
        h = la.zero(s.cfg.big.dimension)
        for zi, v in zip(z, basis):
            h = la.add(h, la.scale(zi, v))
        g = f(h)
        if not g:
            continue
        w = Fraction(1)
        for i in s.cfg.small_simple:
            w *= unit_integral_oracle(s.chars.q, s.chars.c0, kv[i] + int(la.dot(s.cfg.big.roots[i], h))) if _prime(s.chars.q) else unit_integral(s.chars.q, s.chars.c0, kv[i] + int(la.dot(s.cfg.big.roots[i], h)))
        total += g * w
    return total


def _prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))


def chk_padic_values(c: Ctx) -> None:
    e = c.corpus.padic[c.datum]
    s = e.scenario
    v = weight_sum(s)
    c.add(1)
    if e.expected is not None and v != e.expected:
        c.fail(expected=e.expected, got=v)
    c.add(1)
    bv = _brute_weight(s)
    if bv != v:
        c.fail(oracle=bv, got=v)


def chk_padic_translation(c: Ctx) -> None:
    e = c.corpus.padic[c.datum]
    s = e.scenario
    basis = summation_lattice(s)
    for _ in range(max(3, min(20, c.samples // 500))):
        t = la.zero(s.cfg.big.dimension)
        for v in basis:
            t = la.add(t, la.scale(int(c.rng.integers(-3, 4)), v))
        a = weight_sum(s.with_chars(shift_u(s.chars, s.cfg, t)))
        b = weight_sum(s.with_x(s.x.translate(t)))
        c.add(1)
        if a != b:
            c.fail(t=list(t), shifted_u=a, translated_X=b)


def _random_chars(c: Ctx, s) -> PadicCharacterData:
    q = int(c.rng.choice([2, 3, 4, 5, 7]))
    c0 = int(c.rng.integers(0, 2))
    return PadicCharacterData(q, c0, tuple((i, int(c.rng.integers(-4, 5))) for i in s.cfg.small_simple))


def chk_padic_support(c: Ctx) -> None:
    e = c.corpus.padic[c.datum]
    s = e.scenario
    for _ in range(max(3, min(20, c.samples // 500))):
        x = random_orthogonal_set(s.cfg.big, c.rng, scale=3)
        c.add(1)
        try:
            r = weight_sum_detailed(s.with_x(x).with_chars(_random_chars(c, s)))
            if not r.support_certified:
                c.fail(X=x)
        except PadicWeightError as err:
            c.fail(X=x, problem=str(err))


def chk_padic_growth(c: Ctx) -> None:
    base = next(e.scenario for e in c.corpus.padic.values() if e.fan == c.datum and e.scenario.mode == "plain")

    def draw():
        return base.with_x(random_orthogonal_set(base.cfg.big, c.rng, scale=3)).with_chars(_random_chars(c, base))

    cal = [draw() for _ in range(50)]
    test = [draw() for _ in range(max(10, -(-c.samples // (10 * len(GROWTH_FANS)))))]
    rep = growth_check(cal, test)
    c.add(rep.checked)
    if rep.violations:
        i, ratio, const = rep.violations[0]
        c.fail(len(rep.violations), X=test[i].x, ratio=ratio, constant=const)


def chk_padic_stabilization(c: Ctx) -> None:
    e = c.corpus.padic[c.datum]
    s = e.scenario
    c.add(1)
    try:
        f = extract_polyexp(s, grid=(0, 8), order_bound=2)
    except PadicWeightError as err:
        c.fail(problem=str(err)[:300])
        return
    if f.function.degree > s.rank:
        c.fail(degree=f.function.degree, bound=s.rank)


def chk_padic_descent(c: Ctx) -> None:
    e = c.corpus.padic[c.datum]
    s = e.scenario
    dc = descent_coefficients(s.cfg, e.epsilon)
    batch = []
    for _ in range(5):
        x = random_orthogonal_set(s.cfg.big, c.rng, scale=3)
        chars = _random_chars(c, s)
        for k in range(1, 6):
            batch.append((x.scale(k), chars))
    cert = verify_descent(s, dc, batch, truncation_depth=Fraction(3))
    c.add(len(cert.rows))
    for row in cert.rows:
        if not row.equal:
            c.fail(X=batch[row.index][0], lhs=row.lhs, rhs=row.rhs, terms=list(row.terms))
    if not cert.truncation_holds:
        c.fail(problem="truncation invariance")
    # a mutation of d(Q) is only visible where the Q-term is nonzero; extend the batch until each term is
    seen = {l for row in cert.rows for l, v in row.terms if v != 0}
    for _ in range(40):
        if len(seen) == len(dc.coefficients):
            break
        extra = (random_orthogonal_set(s.cfg.big, c.rng, scale=4), _random_chars(c, s))
        row = verify_descent(s, dc, [extra]).rows[0]
        c.add(1)
        if not row.equal:
            c.fail(X=extra[0], lhs=row.lhs, rhs=row.rhs, terms=list(row.terms))
        new = {l for l, v in row.terms if v != 0} - seen
        if new:
            seen |= new
            batch.append(extra)
    for label, _ in dc.coefficients:
        c.add(1)
        if verify_descent(s, dc, batch, perturb=(label, Fraction(1))).holds:
            c.fail(problem="mutation undetected", face=label)


# -- registry ------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckSpec:
    identity: str
    anchor: str
    fn: Callable[[Ctx], None]
    targets: Callable[[Corpus], List[str]]


def _data(c: Corpus) -> List[str]:
    return sorted(c.data)


def _iota_data(c: Corpus) -> List[str]:
    return sorted(k for k, d in c.data.items() if d.involution is not None)


def _only(names: Sequence[str]) -> Callable[[Corpus], List[str]]:
    return lambda c: [n for n in names if n in c.data or n in c.germs]


def _germs(c: Corpus) -> List[str]:
    return sorted(c.germs)


def _iota_germs(c: Corpus) -> List[str]:
    return sorted(k for k, g in c.germs.items() if g.cfg.has_iota)


def _descent_germs(c: Corpus) -> List[str]:
    return sorted(k for k, g in c.germs.items() if g.cfg.has_iota and g.epsilon is not None)


CHECKS: Dict[str, List[CheckSpec]] = {
    "fan": [
        CheckSpec("fan.euler", "Euler relation for the faces above a chamber", chk_fan_euler, _data),
        CheckSpec("fan.adjacency", "chamber graph connected and regular", chk_fan_adjacency, _data),
        CheckSpec("fan.fold", "restricted roots pair to 2 with their coroots", chk_fan_fold, _iota_data),
        CheckSpec("fan.weyl", "root reflections permute the faces", chk_fan_weyl, _data),
    ],
    "orthoset": [
        CheckSpec("orthoset.closure", "sums and translates of orthogonal sets", chk_ortho_closure, _only(ORTHO_DATA)),
        CheckSpec("orthoset.depth", "depth superadditivity", chk_ortho_depth, _only(ORTHO_DATA)),
        CheckSpec("orthoset.projection", "face projection is additive", chk_ortho_projection, _only(ORTHO_DATA)),
        CheckSpec("orthoset.gluing", "gluing read back from a family", chk_ortho_gluing, _only(ORTHO_DATA)),
        CheckSpec("orthoset.fit", "quasi-polynomial refit is exact", chk_ortho_fit, lambda c: ["Z^d"]),
    ],
    "cone": [
        CheckSpec("cone.factorization", "Gamma_Q^R = tau * phi for X in the closed chamber", chk_cone_factorization, _only(CONE_DATA)),
        CheckSpec("cone.langlands", "Langlands combinatorial inversion", chk_cone_langlands, _only(CONE_DATA)),
        CheckSpec("cone.positivity", "positive families: 0/1 values and integral equals hull volume", chk_cone_positivity, _only(CONE_DATA)),
    ],
    "germ": [
        CheckSpec("germ.weyl_partition", "W_x translates of P_{B_x} partition the chambers", chk_germ_weyl, _germs),
        CheckSpec("germ.partition", "germ-fan partition identity", chk_germ_partition, _germs),
        CheckSpec("germ.iota_partition", "iota partition identity", chk_germ_iota_partition, _iota_germs),
        CheckSpec("germ.hull", "Gamma_{B_x} is the indicator of the hull support", chk_germ_hull, _germs),
        CheckSpec("germ.hull_iota", "Gamma_{B_x,iota} is the indicator of the iota hull support", chk_germ_hull_iota, _iota_germs),
        CheckSpec("germ.splitting", "splitting formula for X + Y", chk_germ_splitting, _germs),
        CheckSpec("germ.corollary", "Gamma^R(X+Y) = phi on the support of Gamma^Q tau_Q^R", chk_germ_corollary, _germs),
        CheckSpec("germ.descent", "descent relation, identity and mutation detection", chk_germ_descent, _descent_germs),
    ],
    "convex": [
        CheckSpec("convex.partition", "dual cone partitioned by the cones a_F^+", chk_convex_partition, lambda c: sorted(c.convex_sets)),
        CheckSpec("convex.polarity", "double polar of the asymptotic cone", chk_convex_polarity, lambda c: sorted(c.convex_sets)),
        CheckSpec("convex.normal", "normal cone of an intersection is the sum", chk_convex_normal, lambda c: sorted(c.convex_sets)),
        CheckSpec("convex.projection", "projection decomposition is a bijection", chk_convex_projection, lambda c: [f"{p[0]}#{i}" for i, p in enumerate(c.projections)]),
    ],
    "coregular": [
        CheckSpec("coregular.verdict", "coregularity verdict matches the classification", chk_coregular_verdict, lambda c: [p.name for p, _ in c.pairs]),
        CheckSpec("coregular.agreement", "divisor and discriminant-order criteria agree", chk_coregular_agreement, lambda c: [p.name for p, _ in c.pairs]),
        CheckSpec("coregular.rank", "rank of X equals rank(T) - rank(T_H)", chk_coregular_rank, lambda c: [p.name for p, e in c.pairs if e]),
        CheckSpec("coregular.invariance", "verdict invariant under lattice automorphisms", chk_coregular_invariance, lambda c: [p.name for p, _ in c.pairs]),
    ],
    "padic": [
        CheckSpec("padic.unit_integral", "unit integral table against residue classes", chk_padic_unit, lambda c: ["J"]),
        CheckSpec("padic.values", "weights against an independent lattice sum", chk_padic_values, lambda c: sorted(c.padic)),
        CheckSpec("padic.translation", "translation equivariance of weights", chk_padic_translation, lambda c: sorted(c.padic)),
        CheckSpec("padic.support", "certified finite support", chk_padic_support, lambda c: sorted(c.padic)),
        CheckSpec("padic.growth", "polynomial growth bound", chk_padic_growth, lambda c: [f for f in GROWTH_FANS if f in c.germs]),
        CheckSpec("padic.stabilization", "quasi-polynomial stabilization", chk_padic_stabilization, lambda c: sorted(c.padic)),
        CheckSpec("padic.descent", "descent formula for weights", chk_padic_descent, lambda c: sorted(k for k, e in c.padic.items() if e.epsilon is not None)),
    ],
}


# -- running ---------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteSpec:
    suite: str
    samples: int = 10000
    seed: int = 0
    corpus: Optional[str] = None
    out: Optional[str] = None
    fmt: str = "json"
    jobs: int = 1
    timings: bool = False
    only: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.suite not in SUITES + (ALL,):
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.samples < 1:
            raise ValueError("sample count must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")


def _index() -> Dict[str, CheckSpec]:
    return {s.identity: s for specs in CHECKS.values() for s in specs}


def run_check(identity: str, datum: str, corpus_root: Optional[str], samples: int, seed: int, timings: bool) -> CheckRecord:
    spec = _index()[identity]
    corpus = load_corpus(Path(corpus_root) if corpus_root else None)
    ctx = Ctx(corpus, seed, samples, datum, identity)
    t0 = time.perf_counter()
    try:
        spec.fn(ctx)
    except (CorpusError, KeyboardInterrupt):
        raise
    except Exception as e:  # noqa: BLE001 - a crash inside a check is a recorded failure
        ctx.fail(problem=f"{type(e).__name__}: {e}"[:500])
    wall = round(time.perf_counter() - t0, 3) if timings else None
    return CheckRecord(identity, spec.anchor, datum, ctx.count, ctx.failures, ctx.example, wall)


def plan(spec: SuiteSpec, corpus: Corpus) -> List[Tuple[str, str]]:
    suites = SUITES if spec.suite == ALL else (spec.suite,)
    out = []
    for s in suites:
        for chk in CHECKS[s]:
            if spec.only and chk.identity not in spec.only:
                continue
            for d in chk.targets(corpus):
                out.append((chk.identity, d))
    return out


def run_suite(spec: SuiteSpec) -> Report:
    corpus = load_corpus(Path(spec.corpus) if spec.corpus else None)
    tasks = plan(spec, corpus)
    args = [(i, d, spec.corpus, spec.samples, spec.seed, spec.timings) for i, d in tasks]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as ex:
            recs = list(ex.map(run_check, *zip(*args))) if args else []
    else:
        recs = [run_check(*a) for a in args]
    return Report(recs).sorted()
