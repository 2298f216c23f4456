"""Coregularity verdicts with discriminant-order margins for the symmetric-pair corpus."""

from __future__ import annotations

from fanweights.coregularity import default_corpus, discriminant_order_profile, is_coregular_symmetric


def main() -> None:
    print(f"{'pair':24s} {'divisor':8s} {'discr.':8s} min margin  witness")
    for pair, _ in default_corpus():
        v = is_coregular_symmetric(pair)
        prof = discriminant_order_profile(pair)
        margin = min((c.margin for c in prof.components), default=None)
        print(f"{pair.name:24s} {str(v.coregular):8s} {str(prof.regular):8s} {str(margin):11s} {v.witness or ''}")


if __name__ == "__main__":
    main()
