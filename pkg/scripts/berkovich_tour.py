#!/usr/bin/env python3
"""Classification and Abhyankar-invariant tour.

Walks a small zoo of disk points, nested prefixes, and coordinate
towers, printing one JSON line per case: type label, point invariants,
d_K, and the Gauss/semi-immediate factorization.
"""

import json
import sys
from fractions import Fraction

from ultrametrica import io as uio
from ultrametrica.abhyankar import (
    GaussCoordinate,
    TowerPoint,
    TypeIVCoordinate,
    d_K,
    factor_temkin,
    is_abhyankar,
)
from ultrametrica.berkovich import (
    DiskPoint,
    NestedPrefix,
    classify,
    point_invariants,
)
from ultrametrica.series import monomial, series_zero
from ultrametrica.valuegroup import (
    FreeRadius,
    make_profile,
    t_power,
    value,
    zero_value,
)


def main() -> int:
    profile = make_profile(2, [FreeRadius(2)])
    base = profile.base()
    center = series_zero(base)
    prefix = NestedPrefix(tuple(
        DiskPoint(center, t_power(base, k)) for k in (1, 2, 3)
    ))
    points = {
        "gauss_point": DiskPoint(center, t_power(base, 0)),
        "rational_radius": DiskPoint(center, t_power(base, Fraction(3, 2))),
        "irrational_radius": DiskPoint(center, value(profile, 0, (1,))),
        "evaluation_point": DiskPoint(monomial(base, 1, 1), zero_value(base)),
        "nested_prefix": prefix,
    }
    for name, pt in points.items():
        inv = point_invariants(pt)
        print(json.dumps({
            "case": name,
            "type": classify(pt).label,
            "value_rank_increment": inv.value_rank_increment,
            "residue_trdeg_increment": inv.residue_trdeg_increment,
            "semi_immediate": inv.semi_immediate,
        }))

    towers = {
        "all_gauss_m3": TowerPoint((
            GaussCoordinate(t_power(base, 1)),
            GaussCoordinate(value(profile, 0, (1,))),
            GaussCoordinate(t_power(base, 2)),
        )),
        "mixed_m3": TowerPoint((
            GaussCoordinate(t_power(base, 1)),
            TypeIVCoordinate(prefix),
            GaussCoordinate(value(profile, 0, (1,))),
        )),
    }
    for name, tower in towers.items():
        fac = factor_temkin(tower)
        print(json.dumps({
            "case": name,
            "m": tower.m,
            "d_K": d_K(tower),
            "is_abhyankar": is_abhyankar(tower),
            "B": list(fac.B),
            "polyradius": [uio.value_to_json(r) for r in fac.polyradius],
        }))
    return 0


if __name__ == "__main__":
    sys.exit(main())
