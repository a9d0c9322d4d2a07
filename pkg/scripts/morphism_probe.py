"""Probe the morphism-origin checker on a pullback family.

Extracts the coefficient series of a superdomain morphism, verifies the
derivative recursion at sample points, then bumps one higher-order
coefficient and shows the violations that appear.

    python3 scripts/morphism_probe.py --pullback "x1^2 + x1*theta1*theta2"
"""

import argparse
import json
from fractions import Fraction

from superweil import (
    SuperDomain,
    TruncatedFormalSeries,
    check_comes_from_morphism,
    make_domain_morphism,
    series_from_morphism,
)
from superweil import expr as ex
from superweil.serialize import series_to_json


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pullback", default="x1^2 + x1*theta1*theta2")
    parser.add_argument("--order", type=int, default=3)
    parser.add_argument("--points", default="1;-1;2;1/2")
    args = parser.parse_args()

    source = SuperDomain(1, 2)
    target = SuperDomain(1, 0)
    phi = make_domain_morphism(source, target, [args.pullback])
    series = series_from_morphism(phi, args.order)
    points = [
        tuple(Fraction(v) for v in chunk.split(","))
        for chunk in args.points.split(";")
    ]

    print("series:")
    print(json.dumps(series_to_json(series), indent=2))
    report = check_comes_from_morphism(series, points)
    print(f"\nclean series passed: {report.passed} ({report.checked} checks)")

    bumpable = [
        (k, key)
        for k, cmap in enumerate(series.coeffs)
        for key in cmap
        if sum(key[0]) >= 1
    ]
    if not bumpable:
        print("no higher-order coefficients to perturb")
        return
    k, key = bumpable[0]
    slots = [dict(c) for c in series.coeffs]
    slots[k][key] = ex.add(slots[k][key], ex.ONE)
    bumped = TruncatedFormalSeries(
        series.source_dims, series.target_dims, series.order, tuple(slots)
    )
    report = check_comes_from_morphism(bumped, points)
    print(f"after bumping slot {k + 1} coefficient {key}: passed = {report.passed}")
    for v in report.violations[:4]:
        print(" ", v.to_json())


if __name__ == "__main__":
    main()
