"""Seeded synthetic businesses, posts and ground truth.

All randomness comes from one ``numpy.random.Generator`` backed by the PCG64
bit generator, seeded with ``SynthSpec.seed``. Draws happen in a fixed
order, so a spec always produces the same bytes.

Two ways of producing posts:

* cluster rates: each cluster emits ``round(rate * n_days)`` posts per slot
  on uniformly drawn days, with categories drawn from its mix;
* planted DAG: per-day category counts are sampled from a linear-Gaussian
  network (rounded, truncated at zero) and each post is assigned to a
  cluster with probability proportional to the cluster's slot rate.

Post coordinates are isotropic Gaussian draws around the cluster center.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .core import CATEGORIES, MAX_POSTS_PER_BUSINESS, NAMED_SLOTS, FoodCategory, TimeSlot
from .errors import InvalidSpec
from .geo import LocalFrame, unproject

GENERATOR = "numpy.random.Generator(PCG64(seed))"

_PREFIXES = ("Golden", "Joe's", "Little", "Blue", "Lucky", "Sam's", "Corner", "Happy", "Big Apple", "Uncle Lou's",
             "Red Door", "Mama's")
_SUFFIXES = ("House", "Bar", "Kitchen", "Spot", "Shop", "Co.", "Place", "Stand", "Joint", "Cafe")


def _cat(key) -> FoodCategory:
    return key if isinstance(key, FoodCategory) else FoodCategory.parse(key)


def _slot(key) -> TimeSlot:
    return key if isinstance(key, TimeSlot) else TimeSlot(key)


@dataclass
class Cluster:
    latitude: float
    longitude: float
    sigma_m: float
    posts_per_day: dict = field(default_factory=dict)
    category_mix: dict = field(default_factory=dict)
    name: str = ""

    def mix(self) -> np.ndarray:
        if not self.category_mix:
            return np.full(len(CATEGORIES), 1.0 / len(CATEGORIES))
        p = np.zeros(len(CATEGORIES))
        for k, w in self.category_mix.items():
            p[_cat(k).index] = w
        return p

    def rate(self, slot: TimeSlot) -> float:
        for k, v in self.posts_per_day.items():
            if _slot(k) is slot:
                return float(v)
        return 0.0


@dataclass
class PlantedDag:
    """Linear-Gaussian network over categories: ``x_c = intercept_c + sum_p w_pc x_p + noise_c * z``."""

    edges: list = field(default_factory=list)  # (parent, child, weight)
    intercepts: dict = field(default_factory=dict)
    noise_sd: dict = field(default_factory=dict)
    slots: tuple = NAMED_SLOTS

    def weights(self) -> np.ndarray:
        w = np.zeros((len(CATEGORIES), len(CATEGORIES)))
        for p, c, wt in self.edges:
            w[_cat(p).index, _cat(c).index] = wt
        return w

    def _vec(self, table, default):
        v = np.full(len(CATEGORIES), float(default))
        for k, x in table.items():
            v[_cat(k).index] = x
        return v

    def order(self) -> list[int]:
        from .bn import Dag
        dag = Dag(tuple(c.label for c in CATEGORIES),
                  frozenset((_cat(p).index, _cat(c).index) for p, c, _ in self.edges))
        return dag.topological_order()

    def sample(self, n_days: int, rng: np.random.Generator):
        """Latent values and the non-negative integer counts derived from them."""
        w = self.weights()
        mu = self._vec(self.intercepts, 0.0)
        sd = self._vec(self.noise_sd, 1.0)
        z = rng.standard_normal((n_days, len(CATEGORIES)))
        latent = np.zeros((n_days, len(CATEGORIES)))
        for j in self.order():
            latent[:, j] = mu[j] + latent @ w[:, j] + sd[j] * z[:, j]
        counts = np.clip(np.rint(latent), 0, None).astype(np.int64)
        return latent, counts

    def skeleton(self) -> frozenset:
        return frozenset(frozenset((_cat(p).index, _cat(c).index)) for p, c, _ in self.edges)


@dataclass
class SynthSpec:
    seed: int
    clusters: list
    planted_dag: PlantedDag | None = None
    n_days: int = 365
    n_businesses: int = 40
    reference_date: date = date(2019, 5, 31)
    utc_offset_hours: float = -4.0

    def validate(self):
        if not self.clusters:
            raise InvalidSpec("at least one cluster is required")
        if self.n_days < 1:
            raise InvalidSpec("n_days must be positive")
        if self.n_businesses < len(self.clusters):
            raise InvalidSpec("need at least one business per cluster")
        for cl in self.clusters:
            if not cl.sigma_m > 0:
                raise InvalidSpec(f"cluster sigma must be positive, got {cl.sigma_m}")
            mix = cl.mix()
            if np.any(mix < 0) or abs(mix.sum() - 1.0) > 1e-9:
                raise InvalidSpec(f"category mix must be non-negative and sum to 1, got {mix.sum()}")
            if any(v < 0 for v in cl.posts_per_day.values()):
                raise InvalidSpec("posts_per_day must be non-negative")
        if self.planted_dag is not None:
            try:
                order = self.planted_dag.order()
            except ValueError as exc:
                raise InvalidSpec(f"planted DAG: {exc}") from None
            if order is None:
                raise InvalidSpec("planted DAG has a cycle")
            if any(v <= 0 for v in self.planted_dag.noise_sd.values()):
                raise InvalidSpec("planted DAG noise_sd must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reference_date"] = self.reference_date.isoformat()
        for cl in d["clusters"]:
            cl["posts_per_day"] = {_slot(k).value: v for k, v in cl["posts_per_day"].items()}
            cl["category_mix"] = {_cat(k).key: v for k, v in cl["category_mix"].items()}
        if self.planted_dag is not None:
            pd = d["planted_dag"]
            pd["edges"] = [[_cat(p).key, _cat(c).key, w] for p, c, w in self.planted_dag.edges]
            pd["intercepts"] = {_cat(k).key: v for k, v in self.planted_dag.intercepts.items()}
            pd["noise_sd"] = {_cat(k).key: v for k, v in self.planted_dag.noise_sd.items()}
            pd["slots"] = [_slot(s).value for s in self.planted_dag.slots]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        try:
            clusters = [Cluster(**cl) for cl in d["clusters"]]
            planted = None
            if d.get("planted_dag"):
                pd = dict(d["planted_dag"])
                pd["edges"] = [tuple(e) for e in pd.get("edges", [])]
                pd["slots"] = tuple(_slot(s) for s in pd.get("slots", [s.value for s in NAMED_SLOTS]))
                planted = PlantedDag(**pd)
            spec = cls(
                seed=int(d["seed"]),
                clusters=clusters,
                planted_dag=planted,
                n_days=int(d.get("n_days", 365)),
                n_businesses=int(d.get("n_businesses", 40)),
                reference_date=date.fromisoformat(d.get("reference_date", "2019-05-31")),
                utc_offset_hours=float(d.get("utc_offset_hours", -4.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed synth spec: {exc}") from None
        return spec


@dataclass
class SynthResult:
    businesses_csv: str
    posts_csv: str
    manifest: dict

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"businesses": out / "businesses.csv", "posts": out / "posts.csv", "manifest": out / "manifest.json"}
        texts = {"businesses": self.businesses_csv, "posts": self.posts_csv,
                 "manifest": json.dumps(self.manifest, indent=1) + "\n"}
        for key, path in paths.items():
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(texts[key])
        return paths


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def generate(spec: SynthSpec) -> SynthResult:
    """Draw a dataset from ``spec``; see the module docstring for the model."""
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    tz = timezone(timedelta(hours=spec.utc_offset_hours))
    first_day = spec.reference_date - timedelta(days=spec.n_days - 1)
    frames = [LocalFrame.at(cl.latitude, cl.longitude) for cl in spec.clusters]
    n_cl = len(spec.clusters)

    # businesses, dealt round-robin to clusters
    biz = []
    members = [[] for _ in spec.clusters]
    for b in range(spec.n_businesses):
        k = b % n_cl
        cl = spec.clusters[k]
        dx, dy = rng.normal(0.0, cl.sigma_m, 2)
        lat, lon = unproject(frames[k], dx, dy)
        primary = CATEGORIES[int(rng.choice(len(CATEGORIES), p=cl.mix()))]
        name = f"{_PREFIXES[int(rng.integers(len(_PREFIXES)))]} {primary.label} {_SUFFIXES[int(rng.integers(len(_SUFFIXES)))]}"
        rating = round(float(rng.uniform(3.0, 5.0)), 1)
        biz.append({"id": f"b{b:04d}", "name": name, "lat": lat, "lon": lon, "primary": primary,
                    "cats": set(), "rating": rating, "n": 0})
        members[k].append(b)

    # (day index, category index, cluster index) per post, slot by slot
    slot_posts = {}
    latents = {}
    counts = {}
    for slot in TimeSlot:
        rows = []
        planted = spec.planted_dag
        if planted is not None and slot in tuple(_slot(s) for s in planted.slots):
            latent, table = planted.sample(spec.n_days, rng)
            latents[slot.value] = latent.tolist()
            weights = np.array([cl.rate(slot) for cl in spec.clusters])
            weights = weights / weights.sum() if weights.sum() > 0 else np.full(n_cl, 1.0 / n_cl)
            for d in range(spec.n_days):
                for j in range(len(CATEGORIES)):
                    for _ in range(int(table[d, j])):
                        rows.append((d, j, int(rng.choice(n_cl, p=weights))))
        else:
            for k, cl in enumerate(spec.clusters):
                total = int(round(cl.rate(slot) * spec.n_days))
                days = rng.integers(spec.n_days, size=total)
                cats = rng.choice(len(CATEGORIES), size=total, p=cl.mix())
                rows.extend((int(d), int(c), k) for d, c in zip(days, cats))
        slot_posts[slot] = rows
        per_cat = {c.key: 0 for c in CATEGORIES}
        for _, j, _ in rows:
            per_cat[CATEGORIES[j].key] += 1
        counts[slot.value] = per_cat

    post_rows = []
    cursor = [0] * n_cl
    pid = 0
    for slot in TimeSlot:
        start_h, end_h = slot.hours
        length = ((end_h - start_h) % 24) * 3600
        for d, j, k in slot_posts[slot]:
            cl = spec.clusters[k]
            b = members[k][cursor[k] % len(members[k])]
            cursor[k] += 1
            biz[b]["n"] += 1
            biz[b]["cats"].add(CATEGORIES[j])
            offset = int(rng.integers(length))
            ts = datetime.combine(first_day + timedelta(days=d), datetime.min.time(), tz)
            ts += timedelta(hours=start_h, seconds=offset)
            dx, dy = rng.normal(0.0, cl.sigma_m, 2)
            lat, lon = unproject(frames[k], dx, dy)
            post_rows.append((f"p{pid:07d}", biz[b]["id"], ts.isoformat(), f"{lat:.7f}", f"{lon:.7f}",
                              CATEGORIES[j].key))
            pid += 1

    busiest = max((b["n"] for b in biz), default=0)
    if busiest > MAX_POSTS_PER_BUSINESS:
        raise InvalidSpec(f"a business would receive {busiest} posts, above the {MAX_POSTS_PER_BUSINESS} cap; "
                          "increase n_businesses")

    biz_rows = []
    for b in biz:
        cats = b["cats"] or {b["primary"]}
        biz_rows.append((b["id"], b["name"], f"{b['lat']:.7f}", f"{b['lon']:.7f}",
                         "|".join(c.key for c in CATEGORIES if c in cats), f"{b['rating']:.1f}"))

    manifest = {
        "generator": GENERATOR,
        "spec": spec.to_dict(),
        "clusters": [{"name": cl.name, "latitude": cl.latitude, "longitude": cl.longitude, "sigma_m": cl.sigma_m}
                     for cl in spec.clusters],
        "planted_dag": None if spec.planted_dag is None else {
            "edges": [{"parent": _cat(p).label, "child": _cat(c).label, "weight": w}
                      for p, c, w in spec.planted_dag.edges],
        },
        "n_posts": len(post_rows),
        "n_businesses": len(biz_rows),
        "counts": counts,
        "latents": latents,
    }
    return SynthResult(
        _csv_text(("id", "name", "latitude", "longitude", "categories", "rating"), biz_rows),
        _csv_text(("id", "business_id", "timestamp", "latitude", "longitude", "category"), post_rows),
        manifest,
    )


MANHATTAN_CLUSTERS = (
    # name, lat, lon, (breakfast, lunch, dinner) posts per day
    ("Lower East Side", 40.7150, -73.9843, (3.0, 4.0, 1.0)),
    ("Chinatown", 40.7158, -73.9970, (2.5, 0.8, 0.6)),
    ("Hell's Kitchen", 40.7638, -73.9918, (0.4, 0.8, 3.5)),
    ("East Village", 40.7265, -73.9815, (0.4, 0.8, 3.0)),
    ("Midtown", 40.7549, -73.9840, (0.3, 0.6, 0.3)),
)


def manhattan_spec(seed: int = 2019) -> SynthSpec:
    """Manhattan-like fixture: five neighborhood clusters and a Burgers-rooted star network."""
    clusters = [
        Cluster(lat, lon, 200.0, {TimeSlot.BREAKFAST: b, TimeSlot.LUNCH: l, TimeSlot.DINNER: d,
                                  TimeSlot.UNASSIGNED: 0.1}, name=name)
        for name, lat, lon, (b, l, d) in MANHATTAN_CLUSTERS
    ]
    others = [c for c in CATEGORIES if c is not FoodCategory.BURGERS]
    planted = PlantedDag(
        edges=[(FoodCategory.BURGERS, c, 0.5) for c in others],
        intercepts={FoodCategory.BURGERS: 1.5, **{c: 0.2 for c in others}},
        noise_sd={FoodCategory.BURGERS: 0.8, **{c: 0.4 for c in others}},
    )
    return SynthSpec(seed=seed, clusters=clusters, planted_dag=planted, n_days=365, n_businesses=150)


def two_cluster_spec(seed: int = 0, separation_m: float = 2000.0, sigma_m: float = 150.0,
                     posts_per_slot: int = 500, latitude: float = 40.7580, longitude: float = -73.9855) -> SynthSpec:
    """Two equal clusters ``separation_m`` apart east-west, ``posts_per_slot`` posts each per named slot."""
    frame = LocalFrame.at(latitude, longitude)
    rate = posts_per_slot / 365
    clusters = []
    for sign in (-1, 1):
        lat, lon = unproject(frame, sign * separation_m / 2, 0.0)
        clusters.append(Cluster(lat, lon, sigma_m, {s: rate for s in NAMED_SLOTS}, name=f"cluster{'AB'[sign > 0]}"))
    return SynthSpec(seed=seed, clusters=clusters, n_days=365, n_businesses=20)


BUILTIN_SPECS = {"manhattan": manhattan_spec, "two-cluster": two_cluster_spec}
