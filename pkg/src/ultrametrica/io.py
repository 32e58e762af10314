"""JSON serialization for all wire formats.

Fractions render as "num/den" strings (p-power denominators where the
format requires them); exponent vectors as string lists.  Parsing
validates against the profile invariants and raises
InputValidationError with the offending path.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .abhyankar import GaussCoordinate, TowerPoint, TypeIVCoordinate
from .berkovich import DiskPoint, NestedPrefix
from .errors import InputValidationError
from .gleason import GleasonSchedule, SurjectionSpec
from .series import SeriesElement, make_series
from .tatealg import HomSpec, TateElement, make_tate
from .valuegroup import (
    FreeRadius,
    RadiusProfile,
    RationalRadius,
    Value,
    make_profile,
    value,
    zero_value,
)


def frac_to_str(x: Fraction) -> str:
    return str(Fraction(x))


def frac_from_str(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputValidationError(f"bad rational {s!r}: {exc}")


# -- profiles ---------------------------------------------------------------


def profile_to_json(profile: RadiusProfile) -> dict:
    radii = []
    for r in profile.radii:
        if isinstance(r, FreeRadius):
            radii.append({"sqrt": r.d})
        else:
            radii.append({"exp": frac_to_str(r.exponent)})
    return {
        "p": profile.p,
        "radii": radii,
        "sigma_s": frac_to_str(profile.sigma_s),
        "max_denom_log": profile.max_denom_log,
    }


def profile_from_json(data: dict) -> RadiusProfile:
    radii = []
    for spec in data.get("radii", []):
        if "sqrt" in spec:
            radii.append(FreeRadius(int(spec["sqrt"])))
        elif "exp" in spec:
            radii.append(RationalRadius(frac_from_str(spec["exp"])))
        else:
            raise InputValidationError(f"radius spec needs 'sqrt' or 'exp': {spec}")
    return make_profile(
        int(data["p"]),
        radii,
        sigma_s=frac_from_str(data["sigma_s"]) if "sigma_s" in data else None,
        max_denom_log=int(data.get("max_denom_log", 16)),
    )


# -- values -----------------------------------------------------------------


def value_to_json(v: Value) -> dict:
    if v.zero:
        return {"zero": True}
    return {"a": frac_to_str(v.a), "q": [frac_to_str(x) for x in v.q]}


def value_from_json(data: dict, profile: RadiusProfile) -> Value:
    if data.get("zero"):
        return zero_value(profile)
    q = [frac_from_str(x) for x in data.get("q", [])]
    if len(q) != profile.n:
        raise InputValidationError(
            f"value has {len(q)} radius exponents, profile has {profile.n}"
        )
    return value(profile, frac_from_str(data["a"]), q)


# -- series elements --------------------------------------------------------


def series_to_json(f: SeriesElement, include_profile: bool = True) -> dict:
    out = {
        "floor": value_to_json(f.floor),
        "terms": [
            {"t": frac_to_str(t), "x": [frac_to_str(e) for e in xs], "c": c}
            for (t, xs), c in sorted(f.terms.items())
        ],
    }
    if include_profile:
        out["profile"] = profile_to_json(f.profile)
    return out


def series_from_json(data: dict, profile: RadiusProfile = None) -> SeriesElement:
    if profile is None:
        if "profile" not in data:
            raise InputValidationError("series JSON needs an embedded profile")
        profile = profile_from_json(data["profile"])
    if "terms" not in data:
        raise InputValidationError("series JSON needs a 'terms' list")
    terms = {}
    for i, item in enumerate(data.get("terms", [])):
        try:
            t = frac_from_str(item["t"])
            xs = tuple(frac_from_str(e) for e in item.get("x", []))
            c = int(item["c"])
        except (KeyError, TypeError) as exc:
            raise InputValidationError(f"terms[{i}]: {exc}")
        key = (t, xs)
        terms[key] = terms.get(key, 0) + c
    floor = (
        value_from_json(data["floor"], profile)
        if "floor" in data
        else zero_value(profile)
    )
    return make_series(profile, terms, floor)


# -- Tate elements ----------------------------------------------------------


def tate_to_json(f: TateElement) -> dict:
    return {
        "m": f.m,
        "profile": profile_to_json(f.base),
        "floor": value_to_json(f.floor),
        "terms": [
            {
                "e": [frac_to_str(x) for x in e],
                "coeff": series_to_json(c, include_profile=False),
            }
            for e, c in sorted(f.terms.items())
        ],
    }


def tate_from_json(data: dict, base: RadiusProfile = None) -> TateElement:
    if base is None:
        base = profile_from_json(data["profile"])
    m = int(data["m"])
    terms = {}
    for item in data.get("terms", []):
        e = tuple(frac_from_str(x) for x in item["e"])
        terms[e] = series_from_json(item["coeff"], base)
    floor = (
        value_from_json(data["floor"], base)
        if "floor" in data
        else zero_value(base)
    )
    return make_tate(m, base, terms, floor)


def hom_to_json(hom: HomSpec) -> list:
    return [series_to_json(g, include_profile=False) for g in hom.images]


def hom_from_json(data: list, profile: RadiusProfile) -> HomSpec:
    return HomSpec(tuple(series_from_json(g, profile) for g in data))


# -- Berkovich points -------------------------------------------------------


def point_to_json(pt) -> dict:
    if isinstance(pt, NestedPrefix):
        return {"disks": [point_to_json(d) for d in pt.disks]}
    return {
        "center": series_to_json(pt.center),
        "radius": value_to_json(pt.radius),
        "radius_profile": profile_to_json(pt.radius.profile),
    }


def point_from_json(data: dict):
    if "disks" in data:
        return NestedPrefix(tuple(point_from_json(d) for d in data["disks"]))
    center = series_from_json(data["center"])
    rprof = (
        profile_from_json(data["radius_profile"])
        if "radius_profile" in data
        else center.profile
    )
    radius = value_from_json(data["radius"], rprof)
    return DiskPoint(center, radius)


# -- towers -----------------------------------------------------------------


def tower_to_json(pt: TowerPoint) -> list:
    out = []
    for c in pt.coords:
        if isinstance(c, GaussCoordinate):
            out.append(
                {
                    "gauss": value_to_json(c.radius),
                    "radius_profile": profile_to_json(c.radius.profile),
                }
            )
        else:
            out.append({"type_iv": point_to_json(c.prefix)})
    return out


def tower_from_json(data: list) -> TowerPoint:
    coords = []
    for spec in data:
        if "gauss" in spec:
            prof = profile_from_json(spec["radius_profile"])
            coords.append(GaussCoordinate(value_from_json(spec["gauss"], prof)))
        elif "type_iv" in spec:
            coords.append(TypeIVCoordinate(point_from_json(spec["type_iv"])))
        else:
            raise InputValidationError(f"coordinate needs 'gauss' or 'type_iv': {spec}")
    return TowerPoint(tuple(coords))


# -- Gleason schedules ------------------------------------------------------


def schedule_to_json(s: GleasonSchedule) -> dict:
    return {
        "profile": profile_to_json(s.profile),
        "mode": s.mode,
        "depth": s.depth,
        "V": [series_to_json(v, include_profile=False) for v in s.V],
        "omega": [[frac_to_str(x) for x in q] for q in s.omegas],
        "h": [[frac_to_str(x) for x in h] for h in s.h_reps],
        "W": [series_to_json(w, include_profile=False) for w in s.W],
        "e": [series_to_json(e, include_profile=False) for e in s.e],
        "eps": [series_to_json(e, include_profile=False) for e in s.eps],
        "b": list(s.b),
        "d": [
            [series_to_json(d, include_profile=False) for d in row] for row in s.d
        ],
        "conditions": list(s.conditions),
    }


def schedule_from_json(data: dict) -> GleasonSchedule:
    profile = profile_from_json(data["profile"])
    base = profile.base()
    return GleasonSchedule(
        profile=profile,
        mode=data["mode"],
        depth=int(data["depth"]),
        V=tuple(series_from_json(v, profile) for v in data["V"]),
        omegas=tuple(tuple(frac_from_str(x) for x in q) for q in data["omega"]),
        h_reps=tuple(tuple(frac_from_str(x) for x in h) for h in data["h"]),
        W=tuple(series_from_json(w, profile) for w in data["W"]),
        e=tuple(series_from_json(e, base) for e in data["e"]),
        eps=tuple(series_from_json(e, base) for e in data["eps"]),
        b=tuple(int(b) for b in data["b"]),
        d=tuple(
            tuple(series_from_json(d, base) for d in row) for row in data["d"]
        ),
        conditions=tuple(data.get("conditions", ())),
    )


def surjection_to_json(spec: SurjectionSpec) -> dict:
    return {
        "n": spec.n,
        "profile": profile_to_json(spec.profile),
        "c": series_to_json(spec.c, include_profile=False),
        "images": hom_to_json(spec.hom),
        "schedule": schedule_to_json(spec.schedule),
    }


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputValidationError(f"{path}: {exc}")


def dump_json(obj, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
