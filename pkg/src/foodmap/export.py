"""File writers: ESRI ASCII rasters, GeoJSON hot spots, DAG JSON and DOT."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .kde import DensityField, HotSpot

NODATA = -9999


def _write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def ascii_grid(density: DensityField) -> str:
    """ESRI ASCII grid text. Corners are in local-frame meters; rows run north to south."""
    lines = [
        f"ncols {density.nx}",
        f"nrows {density.ny}",
        f"xllcorner {density.x0!r}",
        f"yllcorner {density.y0!r}",
        f"cellsize {density.cell_size!r}",
        f"NODATA_value {NODATA}",
    ]
    for row in np.asarray(density.values)[::-1]:
        lines.append(" ".join(f"{v:.9g}" for v in row))
    return "\n".join(lines) + "\n"


def grid_metadata(density: DensityField) -> dict:
    f = density.frame
    return {
        "category": density.category.key if density.category else "all",
        "slot": density.slot.value if density.slot else "all",
        "bandwidth_m": density.bandwidth,
        "n_points": density.n_points,
        "cell_size_m": density.cell_size,
        "frame": {
            "origin_latitude": f.origin_latitude,
            "origin_longitude": f.origin_longitude,
            "meters_per_degree_lat": f.meters_per_degree_lat,
            "meters_per_degree_lon": f.meters_per_degree_lon,
            "projection": "local equirectangular, x east / y north in meters",
        },
    }


def write_ascii_grid(density: DensityField, path):
    """Write ``path`` (.asc) and a ``.json`` sidecar next to it; returns both paths."""
    path = Path(path)
    side = path.with_suffix(".json")
    _write_text(path, ascii_grid(density))
    _write_text(side, dump_json(grid_metadata(density)))
    return path, side


def read_ascii_grid(path):
    """Parse an ESRI ASCII grid into (header dict, values with row 0 at the south edge)."""
    with open(path, encoding="utf-8") as fh:
        header = {}
        for _ in range(6):
            key, value = fh.readline().split()
            header[key.lower()] = float(value)
        data = np.loadtxt(fh, ndmin=2)
    return header, data[::-1]


def hotspots_geojson(spots: list[HotSpot], category=None, slot=None) -> dict:
    features = []
    for rank, s in enumerate(spots, start=1):
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [s.longitude, s.latitude]},
            "properties": {
                "rank": rank,
                "name": s.name,
                "peak_density": s.peak_density,
                "mass": s.mass,
                "n_cells": len(s.member_cells),
                "category": category.key if category else "all",
                "slot": slot.value if slot else "all",
            },
        })
    return {"type": "FeatureCollection", "features": features}


def write_geojson(spots, path, category=None, slot=None):
    return _write_text(path, dump_json(hotspots_geojson(spots, category, slot)))


def write_text(path, text):
    return _write_text(path, text)
