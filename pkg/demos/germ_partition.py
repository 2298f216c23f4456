"""Check the germ-fan partition identity and the hull characterization on one configuration."""

from __future__ import annotations

import argparse

import numpy as np

from fanweights.cone_calculus import BatchPoints
from fanweights.corpus import load_corpus
from fanweights.gamma_bx import gamma_cells, hull_support, partition_cells, top_face
from fanweights.orthogonal_sets import random_orthogonal_set


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="B2/short")
    ap.add_argument("--points", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = load_corpus().germs[args.config].cfg
    b = cfg.big
    rng = np.random.default_rng(args.seed)
    x = random_orthogonal_set(b, rng)
    pts = BatchPoints(rng.integers(-3000, 3001, size=(args.points, b.dimension)), 211)
    print(f"{args.config}: {len(cfg.chambers)} chambers, {len(cfg.faces)} faces in the germ fan")

    for r in cfg.faces:
        f = partition_cells(cfg, r, x)
        off = ~pts.on_walls(f)
        ok = bool(np.all(pts.evaluate(f)[off] == 1))
        print(f"  R={r.label:8s} partition identity on {int(off.sum())} off-wall points: {'ok' if ok else 'FAILED'}")

    hs = hull_support(cfg, x)
    g = pts.evaluate(gamma_cells(cfg, top_face(cfg), x))
    agree = np.array_equal(g, hs.contains_batch(pts.num, pts.den).astype(g.dtype))
    print(f"hull support: {len(hs.vertices)} vertices, {len(hs.rays)} rays; Gamma agrees with membership: {agree}")


if __name__ == "__main__":
    main()
