"""Rank-one p-adic weights, their quasi-polynomial fit, and translation equivariance."""

from __future__ import annotations

import argparse
from fractions import Fraction

from fanweights.corpus import load_corpus
from fanweights.padic_weights import extract_polyexp, shift_u, weight_sum


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="A1/rank1-X2")
    args = ap.parse_args()

    c = load_corpus()
    s = c.padic[args.scenario].scenario
    print(f"{s.name}: q={s.chars.q} c0={s.chars.c0} X={s.x.to_json()['points']}")
    print("weight:", weight_sum(s))

    t = (Fraction(1),)
    a = weight_sum(s.with_chars(shift_u(s.chars, s.cfg, t)))
    b = weight_sum(s.with_x(s.x.translate(t)))
    print(f"shift u by t={t[0]}: {a}; translate X by t: {b}")

    fit = extract_polyexp(s)
    print(f"quasi-polynomial: degree {fit.function.degree}, period {fit.function.period}, threshold {fit.threshold}")
    for term in fit.function.to_json()["terms"]:
        print("  ", term)


if __name__ == "__main__":
    main()
