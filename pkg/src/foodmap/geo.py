"""Local equirectangular frame: lat/lon degrees to planar meters and back."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyInput, OutOfSpan, SpanTooLarge

EARTH_RADIUS_M = 6_371_008.8
METERS_PER_DEGREE = EARTH_RADIUS_M * math.pi / 180.0
MAX_SPAN_M = 100_000.0


class PlanarPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class LocalFrame:
    origin_latitude: float
    origin_longitude: float
    meters_per_degree_lat: float
    meters_per_degree_lon: float

    @classmethod
    def at(cls, lat: float, lon: float) -> "LocalFrame":
        return cls(float(lat), float(lon), METERS_PER_DEGREE,
                   METERS_PER_DEGREE * math.cos(math.radians(lat)))

    def project(self, lat, lon) -> PlanarPoint:
        return project(self, lat, lon)

    def unproject(self, x, y) -> tuple[float, float]:
        return unproject(self, x, y)


def make_frame(points) -> LocalFrame:
    """Frame centred on the centroid of ``(lat, lon)`` pairs.

    Raises ``SpanTooLarge`` when the points spread over more than 100 km in
    either direction, where the flat-earth approximation stops being accurate.
    """
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    if arr.shape[0] == 0:
        raise EmptyInput("cannot build a frame from zero points")
    lat0, lon0 = arr.mean(axis=0)
    frame = LocalFrame.at(lat0, lon0)
    dy = np.ptp(arr[:, 0]) * frame.meters_per_degree_lat
    dx = np.ptp(arr[:, 1]) * frame.meters_per_degree_lon
    if max(dx, dy) > MAX_SPAN_M:
        raise SpanTooLarge(f"points span {max(dx, dy) / 1000:.1f} km, limit is {MAX_SPAN_M / 1000:.0f} km")
    return frame


def project_many(frame: LocalFrame, lat, lon) -> np.ndarray:
    """Vectorised projection; returns an ``(n, 2)`` array of (x, y) meters."""
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    x = (lon - frame.origin_longitude) * frame.meters_per_degree_lon
    y = (lat - frame.origin_latitude) * frame.meters_per_degree_lat
    if np.any(np.abs(x) > MAX_SPAN_M) or np.any(np.abs(y) > MAX_SPAN_M):
        raise OutOfSpan(f"point more than {MAX_SPAN_M / 1000:.0f} km from frame origin")
    return np.column_stack([x.ravel(), y.ravel()])


def project(frame: LocalFrame, lat: float, lon: float) -> PlanarPoint:
    x, y = project_many(frame, [lat], [lon])[0]
    return PlanarPoint(float(x), float(y))


def unproject(frame: LocalFrame, x, y):
    lat = frame.origin_latitude + np.asarray(y, dtype=float) / frame.meters_per_degree_lat
    lon = frame.origin_longitude + np.asarray(x, dtype=float) / frame.meters_per_degree_lon
    if lat.ndim == 0:
        return float(lat), float(lon)
    return lat, lon


def haversine(lat1, lon1, lat2, lon2):
    """Great-circle distance in meters on a sphere of the mean Earth radius."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(np.asarray(lon2) - np.asarray(lon1))
    a = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(a, 1.0)))
