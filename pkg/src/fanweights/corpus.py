"""Loading of the shipped scenario corpus (or a directory given by the user)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import linalg as la
from .convex_geometry import FGConvexSet, build_fg_convex
from .coregularity import SymmetricPairDatum
from .gamma_bx import GermFanConfig
from .orthogonal_sets import OrthogonalSet, weyl_orbit_family
from .padic_weights import PadicCharacterData, PadicWeightScenario
from .root_fan import RootFanDatum, build_root_datum

ENV_VAR = "FANWEIGHTS_CORPUS"
FILES = ("data.json", "germ.json", "convex.json", "coregular.json", "padic.json")


class CorpusError(ValueError):
    pass


def default_corpus_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("fanweights") / "corpus"))


@dataclass
class GermEntry:
    name: str
    cfg: GermFanConfig
    base_point: Tuple[Fraction, ...]
    epsilon: Optional[Tuple[Fraction, ...]] = None

    @property
    def base_chamber(self):
        return self.cfg.big.face_of_point(self.base_point)


@dataclass
class PadicEntry:
    name: str
    fan: str
    scenario: PadicWeightScenario
    epsilon: Optional[Tuple[Fraction, ...]] = None
    expected: Optional[Fraction] = None


@dataclass
class Corpus:
    root: Path
    data: Dict[str, RootFanDatum] = field(default_factory=dict)
    germs: Dict[str, GermEntry] = field(default_factory=dict)
    convex_sets: Dict[str, FGConvexSet] = field(default_factory=dict)
    projections: List[Tuple[str, Tuple, Tuple]] = field(default_factory=list)
    pairs: List[Tuple[SymmetricPairDatum, Optional[bool]]] = field(default_factory=list)
    padic: Dict[str, PadicEntry] = field(default_factory=dict)


def _read(root: Path, name: str):
    path = root / name
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as e:
        raise CorpusError(f"missing corpus file {path}") from e
    except json.JSONDecodeError as e:
        raise CorpusError(f"cannot parse {path}: {e}") from e


def _vec(v) -> Tuple[Fraction, ...]:
    return tuple(la.frac(x) for x in v)


def _parse_frac(x) -> Fraction:
    return la.frac(x) if not isinstance(x, str) else Fraction(x)


def _orth(cfg: GermFanConfig, base_point, spec: dict) -> OrthogonalSet:
    b = cfg.big
    if "orbit" in spec:
        t = tuple(_parse_frac(x) for x in spec["orbit"])
        return weyl_orbit_family(b, b.face_of_point(base_point), t)
    if "points" in spec:
        return OrthogonalSet(b, {k: tuple(_parse_frac(x) for x in v) for k, v in spec["points"].items()})
    raise CorpusError("orthogonal set needs 'orbit' or 'points'")


def load_corpus(root: Optional[Path] = None) -> Corpus:
    root = Path(root) if root is not None else default_corpus_dir()
    return _load(str(root.resolve()), _stamp(root))


def _stamp(root: Path) -> Tuple:
    """Cache key part that changes whenever a corpus file does."""
    out = []
    for name in FILES:
        try:
            st = (root / name).stat()
            out.append((st.st_mtime_ns, st.st_size))
        except OSError:
            out.append(None)
    return tuple(out)


@lru_cache(maxsize=8)
def _load(root_s: str, stamp: Tuple) -> Corpus:
    root = Path(root_s)
    c = Corpus(root)
    try:
        for d in _read(root, "data.json"):
            c.data[d["name"]] = build_root_datum(d)
        for g in _read(root, "germ.json"):
            big = c.data[g["datum"]]
            bp = tuple(_parse_frac(x) for x in g["bx_point"])
            small = [tuple(_parse_frac(x) for x in r) for r in g["small_roots"]]
            cfg = GermFanConfig.from_signs(big, small, bp, name=g["name"])
            eps = tuple(_parse_frac(x) for x in g["epsilon"]) if "epsilon" in g else None
            c.germs[g["name"]] = GermEntry(g["name"], cfg, bp, eps)
        cx = _read(root, "convex.json")
        for s in cx["sets"]:
            c.convex_sets[s["name"]] = build_fg_convex(s["vertices"], s["rays"], s["lineality"])
        for p in cx["projections"]:
            c.projections.append((p["set"], tuple(tuple(v) for v in p["b"]), tuple(p["xi"])))
        for d in _read(root, "coregular.json"):
            c.pairs.append((SymmetricPairDatum.from_json(d), d.get("expected_coregular")))
        for s in _read(root, "padic.json"):
            g = c.germs[s["fan"]]
            big = g.cfg.big
            k = {}
            for key, v in s["k"].items():
                cov = tuple(_parse_frac(x) for x in key.split(","))
                k[big.index[cov]] = int(v)
            chars = PadicCharacterData(int(s["q"]), int(s.get("c0", 0)), tuple(k.items()))
            lat = [tuple(_parse_frac(x) for x in row) for row in s["lattice"]] if s.get("lattice") else None
            x = _orth(g.cfg, g.base_point, s["X"])
            sc = PadicWeightScenario(g.cfg, x, chars, lat, s.get("mode", "plain"), s.get("face"), s["name"])
            eps = tuple(_parse_frac(v) for v in s["epsilon"]) if "epsilon" in s else None
            exp = Fraction(s["expected"]) if "expected" in s else None
            c.padic[s["name"]] = PadicEntry(s["name"], s["fan"], sc, eps, exp)
    except CorpusError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusError(f"corpus at {root} does not parse: {e!r}") from e
    return c
