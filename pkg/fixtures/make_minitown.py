#!/usr/bin/env python3
"""Regenerate the minitown fixture: a 3x3 grid of synthetic census tracts.

Nine 0.01 x 0.01 degree tracts around (-87.70, 41.85), five food
providers, a lattice road network (tract-center nodes plus mid-edge
nodes), and a demographic table with a planted west-to-east poverty
gradient so the spatial-autocorrelation output has real signal.

The generated files are committed; rerun this script only when the layout
changes. Output is deterministic.
"""

import json
import os

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "minitown")

REF_LON = -87.70
REF_LAT = 41.85
LON0 = -87.715  # west edge of the tract block
LAT0 = 41.835  # south edge
STEP = 0.01

# row-major, row 1 = south. Column index drives the poverty gradient.
TRACT_IDS = [[f"t{r + 1}{c + 1}" for c in range(3)] for r in range(3)]

DEMOGRAPHICS = {
    # tract_id: (AV_POP, ACE_NV, ACE_ELD, ACE_DIS, AFF_POV, AFF_UNEMP, ACO_ENG, ACO_SNAP)
    "t11": (15200, 35, 8, 16, 58, 24, 12, 41),
    "t12": (11800, 20, 9, 11, 31, 13, 28, 22),
    "t13": (6400, 12, 7, 7, 9, 5, 7, 8),
    "t21": (17600, 38, 14, 18, 62, 27, 9, 45),
    "t22": (12900, 18, 15, 10, 28, 11, 31, 19),
    "t23": (5800, 9, 13, 6, 7, 4, 6, 6),
    "t31": (14100, 33, 22, 15, 55, 22, 14, 38),
    "t32": (10600, 22, 24, 12, 33, 15, 25, 24),
    "t33": (7300, 14, 21, 8, 12, 6, 10, 10),
}

PROVIDERS = [
    # id, kind, lon, lat, radius override (empty -> kind default)
    ("s1", "supermarket", -87.7100, 41.8550, ""),  # near west mid-edge node
    ("s2", "supermarket", -87.6950, 41.8600, ""),  # near north-east mid-edge node
    ("g1", "grocery_large", -87.7125, 41.8375, ""),
    ("p1", "produce_cart", -87.6975, 41.8425, ""),
    ("f1", "farmers_market", -87.7050, 41.8575, ""),
]


def tract_ring(r, c):
    lon_w = LON0 + c * STEP
    lat_s = LAT0 + r * STEP
    return [
        [lon_w, lat_s],
        [lon_w + STEP, lat_s],
        [lon_w + STEP, lat_s + STEP],
        [lon_w, lat_s + STEP],
        [lon_w, lat_s],
    ]


def write_tracts():
    features = []
    for r in range(3):
        for c in range(3):
            features.append(
                {
                    "type": "Feature",
                    "properties": {"tract_id": TRACT_IDS[r][c]},
                    "geometry": {"type": "Polygon", "coordinates": [tract_ring(r, c)]},
                }
            )
    doc = {"type": "FeatureCollection", "features": features}
    with open(os.path.join(HERE, "tracts.geojson"), "w", newline="") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_providers():
    lines = ["id,kind,lon,lat,radius_m"]
    for pid, kind, lon, lat, radius in PROVIDERS:
        lines.append(f"{pid},{kind},{lon},{lat},{radius}")
    with open(os.path.join(HERE, "providers.csv"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_demographics():
    lines = ["tract_id,AV_POP,ACE_NV,ACE_ELD,ACE_DIS,AFF_POV,AFF_UNEMP,ACO_ENG,ACO_SNAP"]
    for tid in sorted(DEMOGRAPHICS):
        lines.append(tid + "," + ",".join(str(v) for v in DEMOGRAPHICS[tid]))
    with open(os.path.join(HERE, "demographics.csv"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_roads():
    # Tract-center nodes c{r}{c} plus mid-edge nodes so supermarkets snap
    # to distinct locations and no tract sits at distance zero.
    nodes = {}
    for r in range(3):
        for c in range(3):
            nodes[f"c{r + 1}{c + 1}"] = (
                LON0 + (c + 0.5) * STEP,
                LAT0 + (r + 0.5) * STEP,
            )
    for r in range(3):  # horizontal mid-edge nodes h{r}{gap}
        for g in range(2):
            nodes[f"h{r + 1}{g + 1}"] = (
                LON0 + (g + 1.0) * STEP,
                LAT0 + (r + 0.5) * STEP,
            )
    for g in range(2):  # vertical mid-edge nodes v{gap}{c}
        for c in range(3):
            nodes[f"v{g + 1}{c + 1}"] = (
                LON0 + (c + 0.5) * STEP,
                LAT0 + (g + 1.0) * STEP,
            )
    edges = []
    for r in range(3):
        for g in range(2):
            edges.append((f"c{r + 1}{g + 1}", f"h{r + 1}{g + 1}"))
            edges.append((f"h{r + 1}{g + 1}", f"c{r + 1}{g + 2}"))
    for g in range(2):
        for c in range(3):
            edges.append((f"c{g + 1}{c + 1}", f"v{g + 1}{c + 1}"))
            edges.append((f"v{g + 1}{c + 1}", f"c{g + 2}{c + 1}"))

    lines = ["node_id,lon,lat"]
    for nid in sorted(nodes):
        lon, lat = nodes[nid]
        lines.append(f"{nid},{lon:.4f},{lat:.4f}")
    with open(os.path.join(HERE, "roads_nodes.csv"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    lines = ["from_node,to_node,length_m,road_class"]
    for a, b in edges:
        lines.append(f"{a},{b},,residential")
    with open(os.path.join(HERE, "roads_edges.csv"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_config():
    cfg = {
        "tracts": "tracts.geojson",
        "providers": "providers.csv",
        "roads_nodes": "roads_nodes.csv",
        "roads_edges": "roads_edges.csv",
        "demographics": "demographics.csv",
        "out_dir": "out",
        "ref_lon": REF_LON,
        "ref_lat": REF_LAT,
        "snap_max_m": 700.0,
        "moran_permutations": 999,
        "seed": 20240101,
    }
    with open(os.path.join(HERE, "config.json"), "w", newline="") as fh:
        json.dump(cfg, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    os.makedirs(HERE, exist_ok=True)
    write_tracts()
    write_providers()
    write_demographics()
    write_roads()
    write_config()
    print(f"minitown fixture written to {HERE}")
