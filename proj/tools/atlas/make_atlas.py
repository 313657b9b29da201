#!/usr/bin/env python3
"""Convert the Natural Earth 1:110m admin-0 countries shapefile into the
plain-text TSATLAS polygon format read by tagsight::geo.

    python3 make_atlas.py path/to/naturalearth_lowres.shp out.tsatlas

Needs pyshp and pycountry. Natural Earth data is public domain.
"""
import sys

import pycountry
import shapefile

CONTINENTS = {
    "Africa": "Africa",
    "Asia": "Asia",
    "Oceania": "Australia",
    "Europe": "Europe",
    "North America": "N. America",
    "South America": "S. America",
    "Antarctica": "Antarctica",
    "Seven seas (open ocean)": "Antarctica",
}

# Entries Natural Earth codes with placeholder or non-ISO alpha-3 values.
ALPHA2_OVERRIDES = {
    "Kosovo": "XK",
    "N. Cyprus": "CY",
    "Somaliland": "SO",
}


def alpha2(name, iso_a3):
    if name in ALPHA2_OVERRIDES:
        return ALPHA2_OVERRIDES[name]
    country = pycountry.countries.get(alpha_3=iso_a3)
    if country is None:
        raise SystemExit(f"no alpha-2 code for {name} ({iso_a3})")
    return country.alpha_2


def main():
    reader = shapefile.Reader(sys.argv[1])
    rings = []
    for item in reader.iterShapeRecords():
        rec = item.record
        code = alpha2(rec["name"], rec["iso_a3"])
        continent = CONTINENTS[rec["continent"]]
        shape = item.shape
        parts = list(shape.parts) + [len(shape.points)]
        for begin, end in zip(parts[:-1], parts[1:]):
            ring = shape.points[begin:end]
            if ring[0] != ring[-1]:
                ring.append(ring[0])
            rings.append((code, continent, ring))
    rings.sort(key=lambda r: r[0])
    with open(sys.argv[2], "w", encoding="utf-8", newline="\n") as out:
        out.write("TSATLAS 1\n")
        for code, continent, ring in rings:
            out.write(f"{code}\t{continent}\t{len(ring)}\n")
            for lon, lat in ring:
                out.write(f"{lon:.6f} {lat:.6f}\n")


if __name__ == "__main__":
    main()
