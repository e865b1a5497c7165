"""Isotropic Gaussian kernel density estimation on a local planar frame.

Bandwidths are in meters. The 2-D estimator is the radially symmetric
product of two 1-D Gaussian kernels sharing one bandwidth ``h``::

    f(x) = 1 / (n 2 pi h^2) * sum_i exp(-|x - x_i|^2 / (2 h^2))
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import FoodCategory, TimeSlot
from .errors import DegenerateSample, EmptySample, GridTooLarge, TooFewPoints
from .geo import LocalFrame, PlanarPoint, unproject

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

DEFAULT_GRID = (10.0, 2000.0, 32)
JITTER_RADIUS_M = 5.0
PAD_BANDWIDTHS = 4.0
MAX_CELLS = 10_000_000
DEFAULT_QUANTILE = 0.95

# elements per temporary (block x n) array
_BLOCK_ELEMENTS = 2_000_000


def gaussian_kernel_1d(u):
    """Standard normal density, elementwise."""
    u = np.asarray(u, dtype=float)
    out = INV_SQRT_2PI * np.exp(-0.5 * u * u)
    return float(out) if out.ndim == 0 else out


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    return arr.reshape(-1, 2)


def _check_bandwidth(h):
    h = float(h)
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"bandwidth must be positive and finite, got {h}")
    return h


def kde_eval(points, h, queries) -> np.ndarray:
    """Density at each query point, per square meter."""
    pts = _as_points(points)
    if len(pts) == 0:
        raise EmptySample("KDE needs at least one sample point")
    h = _check_bandwidth(h)
    q = _as_points(queries)
    out = np.empty(len(q))
    step = max(1, _BLOCK_ELEMENTS // len(pts))
    norm = 1.0 / (len(pts) * 2.0 * math.pi * h * h)
    for a in range(0, len(q), step):
        blk = q[a:a + step]
        d2 = ((blk[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        out[a:a + step] = np.exp(-d2 / (2.0 * h * h)).sum(axis=1) * norm
    return out


def kde_at(points, h, query) -> float:
    """Density at a single planar point, per square meter."""
    return float(kde_eval(points, h, [query])[0])


def log_spaced_candidates(low=DEFAULT_GRID[0], high=DEFAULT_GRID[1], count=DEFAULT_GRID[2]) -> np.ndarray:
    if not (0 < low < high) or count < 2:
        raise ValueError("need 0 < low < high and count >= 2")
    return np.geomspace(low, high, int(count))


def _id_rng(seed, ident):
    digest = hashlib.sha256(f"{seed}:{ident}".encode()).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:16], "little")))


def jitter_duplicates(points, ids=None, radius=JITTER_RADIUS_M, seed=0) -> np.ndarray:
    """Move points that share exact coordinates by a uniform draw inside a disk.

    Each offset is seeded from ``(seed, id)`` so the result does not depend on
    the order of the input. Points with unique coordinates are untouched.
    """
    pts = _as_points(points).copy()
    if len(pts) == 0:
        return pts
    if ids is None:
        ids = [str(i) for i in range(len(pts))]
    _, inverse, counts = np.unique(pts, axis=0, return_inverse=True, return_counts=True)
    dup = counts[inverse.ravel()] > 1
    for i in np.flatnonzero(dup):
        u, v = _id_rng(seed, ids[i]).random(2)
        r = radius * math.sqrt(u)
        pts[i, 0] += r * math.cos(2 * math.pi * v)
        pts[i, 1] += r * math.sin(2 * math.pi * v)
    return pts


def loo_log_scores(points, candidates) -> np.ndarray:
    """Mean leave-one-out log density for each candidate bandwidth.

    Evaluated in row blocks with a per-row max shift so that distant
    neighbours never underflow to ``log(0)``.
    """
    pts = _as_points(points)
    hs = np.asarray(candidates, dtype=float)
    n = len(pts)
    total = np.zeros(len(hs))
    step = max(1, _BLOCK_ELEMENTS // n)
    for a in range(0, n, step):
        blk = pts[a:a + step]
        d2 = ((blk[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        rows = np.arange(len(blk))
        d2[rows, a + rows] = np.inf
        dmin = d2.min(axis=1)
        excess = d2 - dmin[:, None]
        buf = np.empty_like(excess)
        for k, h in enumerate(hs):
            np.multiply(excess, -0.5 / (h * h), out=buf)
            np.exp(buf, out=buf)
            total[k] += np.sum(np.log(buf.sum(axis=1)) - dmin / (2.0 * h * h))
    hs2 = 2.0 * math.pi * hs * hs
    return total / n - np.log((n - 1) * hs2)


@dataclass(frozen=True)
class BandwidthSelection:
    candidates: np.ndarray
    scores: np.ndarray
    chosen: float
    clamped: bool


def select_bandwidth(points, candidates=None, *, ids=None, seed=0,
                     jitter_radius=JITTER_RADIUS_M) -> BandwidthSelection:
    """Pick the bandwidth maximizing the leave-one-out log likelihood.

    Parameters
    ----------
    points : array-like, shape (n, 2)
        Planar sample in meters, ``n >= 10``.
    candidates : array-like, optional
        Strictly increasing bandwidths; defaults to 32 log-spaced values
        between 10 m and 2 km.
    ids : sequence of str, optional
        Record ids used to seed the duplicate-point jitter.
    seed : int
        Extra seed mixed into the jitter.

    Returns
    -------
    BandwidthSelection
        ``chosen`` is the first maximizer; ``clamped`` flags a maximizer at
        either end of the grid.
    """
    pts = _as_points(points)
    if len(pts) < 10:
        raise TooFewPoints(f"bandwidth selection needs at least 10 points, got {len(pts)}")
    hs = log_spaced_candidates() if candidates is None else np.asarray(candidates, dtype=float)
    if len(hs) < 2 or np.any(np.diff(hs) <= 0) or hs[0] <= 0:
        raise ValueError("candidates must be at least two strictly increasing positive bandwidths")
    pts = jitter_duplicates(pts, ids, jitter_radius, seed)
    if np.all(pts == pts[0]):
        raise DegenerateSample("all sample points coincide")
    scores = loo_log_scores(pts, hs)
    best = int(np.argmax(scores))
    return BandwidthSelection(hs, scores, float(hs[best]), best in (0, len(hs) - 1))


@dataclass(frozen=True)
class DensityField:
    """Rasterized density; ``values[row, col]`` with row 0 at the southern edge."""

    frame: LocalFrame
    cell_size: float
    x0: float
    y0: float
    values: np.ndarray
    bandwidth: float
    n_points: int
    category: FoodCategory | None = None
    slot: TimeSlot | None = None

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    def x_centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.cell_size

    def y_centers(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.cell_size

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_size ** 2)


def rasterize(points, h, frame: LocalFrame, cell_size=None, *, category=None, slot=None) -> DensityField:
    """Evaluate the KDE at every cell center of a grid around the sample.

    The grid covers the sample's bounding box padded by ``4 h`` on each side.
    ``cell_size`` defaults to ``h / 4`` and may not exceed ``h / 2``. The
    Gaussian is separable, so the grid is accumulated as ``Gy.T @ Gx`` over
    blocks of points instead of a cells-by-points distance matrix.
    """
    pts = _as_points(points)
    if len(pts) == 0:
        raise EmptySample("cannot rasterize an empty sample")
    h = _check_bandwidth(h)
    cell = h / 4.0 if cell_size is None else float(cell_size)
    if not 0 < cell <= h / 2.0:
        raise ValueError(f"cell size {cell} m must be in (0, h/2 = {h / 2} m]")
    pad = PAD_BANDWIDTHS * h
    lo = pts.min(axis=0) - pad
    hi = pts.max(axis=0) + pad
    nx, ny = (int(math.ceil(v)) for v in (hi - lo) / cell)
    if nx * ny > MAX_CELLS:
        raise GridTooLarge(f"{nx} x {ny} cells exceeds the {MAX_CELLS} cell limit")
    xc = lo[0] + (np.arange(nx) + 0.5) * cell
    yc = lo[1] + (np.arange(ny) + 0.5) * cell
    acc = np.zeros((ny, nx))
    step = max(1, _BLOCK_ELEMENTS // max(nx, ny))
    for a in range(0, len(pts), step):
        blk = pts[a:a + step]
        gx = np.exp(-((xc[None, :] - blk[:, :1]) ** 2) / (2.0 * h * h))
        gy = np.exp(-((yc[None, :] - blk[:, 1:]) ** 2) / (2.0 * h * h))
        acc += gy.T @ gx
    acc /= len(pts) * 2.0 * math.pi * h * h
    acc.setflags(write=False)
    return DensityField(frame, cell, float(lo[0]), float(lo[1]), acc, h, len(pts), category, slot)


@dataclass(frozen=True)
class HotSpot:
    centroid: PlanarPoint
    latitude: float
    longitude: float
    peak_density: float
    member_cells: tuple = field(repr=False)
    mass: float
    name: str = ""


def extract_hotspots(density: DensityField, quantile=DEFAULT_QUANTILE) -> list[HotSpot]:
    """Connected high-density regions of a field.

    Cells at or above the ``quantile`` of the positive cell values are
    grouped into 4-connected components. Each component becomes a hot spot
    with its density-weighted centroid; the list is sorted by descending
    peak density, ties resolved by component discovery order.
    """
    if not 0 < quantile < 1:
        raise ValueError("quantile must lie strictly between 0 and 1")
    vals = np.asarray(density.values)
    positive = vals[vals > 0]
    if positive.size == 0:
        return []
    threshold = np.quantile(positive, quantile)
    labels, count = ndimage.label((vals >= threshold) & (vals > 0))
    total = vals.sum()
    xs, ys = density.x_centers(), density.y_centers()
    spots = []
    for lab in range(1, count + 1):
        rows, cols = np.nonzero(labels == lab)
        w = vals[rows, cols]
        cx = float(np.dot(w, xs[cols]) / w.sum())
        cy = float(np.dot(w, ys[rows]) / w.sum())
        lat, lon = unproject(density.frame, cx, cy)
        spots.append((-float(w.max()), lab, HotSpot(
            centroid=PlanarPoint(cx, cy),
            latitude=lat,
            longitude=lon,
            peak_density=float(w.max()),
            member_cells=tuple(zip(rows.tolist(), cols.tolist())),
            mass=float(w.sum() / total),
        )))
    spots.sort(key=lambda t: (t[0], t[1]))
    return [s for _, _, s in spots]
