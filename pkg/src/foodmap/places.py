"""Neighborhood names for labelling hot spots.

The bundled table holds approximate centers of Manhattan neighborhoods. A
custom gazetteer can be read from a ``name,latitude,longitude`` CSV.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .geo import haversine

MANHATTAN = (
    ("Financial District", 40.7075, -74.0113),
    ("Tribeca", 40.7163, -74.0086),
    ("Chinatown", 40.7158, -73.9970),
    ("Lower East Side", 40.7150, -73.9843),
    ("SoHo", 40.7233, -74.0030),
    ("East Village", 40.7265, -73.9815),
    ("Greenwich Village", 40.7336, -74.0027),
    ("Gramercy", 40.7368, -73.9845),
    ("Chelsea", 40.7465, -74.0014),
    ("Murray Hill", 40.7479, -73.9757),
    ("Midtown", 40.7549, -73.9840),
    ("Hell's Kitchen", 40.7638, -73.9918),
    ("Upper West Side", 40.7870, -73.9754),
    ("Upper East Side", 40.7736, -73.9566),
    ("Harlem", 40.8116, -73.9465),
    ("Washington Heights", 40.8417, -73.9394),
)

MAX_NAME_DISTANCE_M = 1500.0


def read_gazetteer(path) -> tuple:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        return tuple((r["name"], float(r["latitude"]), float(r["longitude"])) for r in csv.DictReader(fh))


def nearest_place(lat, lon, places=MANHATTAN, max_distance=MAX_NAME_DISTANCE_M) -> str:
    """Name of the closest gazetteer entry, or a coordinate string if none is near."""
    if places:
        plat = np.array([p[1] for p in places])
        plon = np.array([p[2] for p in places])
        d = haversine(lat, lon, plat, plon)
        k = int(np.argmin(d))
        if d[k] <= max_distance:
            return places[k][0]
    return f"{lat:.4f},{lon:.4f}"
