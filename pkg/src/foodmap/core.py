"""Domain types and ingestion of business and post files."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, tzinfo
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DanglingReference, EmptyName, InvalidCoordinate, ParseError

MAX_POSTS_PER_BUSINESS = 300
WINDOW_DAYS = 365

BUSINESS_COLUMNS = ("id", "name", "latitude", "longitude", "categories", "rating")
POST_COLUMNS = ("id", "business_id", "timestamp", "latitude", "longitude", "category")


class FoodCategory(Enum):
    RAMEN = "Ramen"
    SUSHI = "Sushi"
    WAFFLES = "Waffles"
    BURGERS = "Burgers"
    HOT_WINGS = "HotWings"
    NACHOS = "Nachos"
    BAGELS = "Bagels"
    PIZZA = "Pizza"

    @property
    def index(self) -> int:
        return _CATEGORY_INDEX[self]

    @property
    def key(self) -> str:
        """Lowercase snake-case name used in files and on the command line."""
        return self.name.lower()

    @property
    def label(self) -> str:
        """Display name, e.g. ``Hot Wings``."""
        return "Hot Wings" if self is FoodCategory.HOT_WINGS else self.value

    @classmethod
    def parse(cls, text: str) -> "FoodCategory":
        norm = re.sub(r"[\s_\-]", "", text).lower()
        for cat in cls:
            if cat.value.lower() == norm:
                return cat
        raise ValueError(f"unknown food category {text!r}")


CATEGORIES = tuple(FoodCategory)
_CATEGORY_INDEX = {c: i for i, c in enumerate(CATEGORIES)}


class TimeSlot(Enum):
    BREAKFAST = "breakfast"
    LUNCH = "lunch"
    DINNER = "dinner"
    UNASSIGNED = "unassigned"

    @property
    def hours(self) -> tuple[int, int]:
        """Start and end hour of the slot; the end is exclusive and may wrap past midnight."""
        return _SLOT_HOURS[self]

    @property
    def label(self) -> str:
        start, end = self.hours
        return f"{_clock(start)}-{_clock(end)}"


NAMED_SLOTS = (TimeSlot.BREAKFAST, TimeSlot.LUNCH, TimeSlot.DINNER)
_SLOT_HOURS = {
    TimeSlot.BREAKFAST: (5, 12),
    TimeSlot.LUNCH: (12, 18),
    TimeSlot.DINNER: (18, 2),
    TimeSlot.UNASSIGNED: (2, 5),
}


def _clock(hour):
    if hour == 12:
        return "12noon"
    if hour == 0:
        return "12am"
    return f"{hour % 12}{'am' if hour < 12 else 'pm'}"


def assign_time_slot(clock: time | datetime) -> TimeSlot:
    """Map a local wall-clock time to its time slot.

    Intervals are half-open: ``[05:00, 12:00)`` breakfast, ``[12:00, 18:00)``
    lunch, ``[18:00, 02:00)`` dinner (wrapping midnight) and ``[02:00, 05:00)``
    unassigned.
    """
    if isinstance(clock, datetime):
        clock = clock.time()
    h = clock.hour
    if 5 <= h < 12:
        return TimeSlot.BREAKFAST
    if 12 <= h < 18:
        return TimeSlot.LUNCH
    if h >= 18 or h < 2:
        return TimeSlot.DINNER
    return TimeSlot.UNASSIGNED


def activity_date(timestamp: datetime) -> date:
    """Calendar day a post counts toward.

    Dinner posts between midnight and 02:00 belong to the previous evening.
    """
    if timestamp.hour < 2:
        return timestamp.date() - timedelta(days=1)
    return timestamp.date()


_NON_ALNUM = re.compile(r"[^A-Za-z0-9]")


def derive_hashtag(name: str) -> str:
    """Hashtag for a business name: ``"Joe's Pizza-Bar"`` -> ``"#JoesPizzaBar"``."""
    parts = []
    for token in name.split():
        token = _NON_ALNUM.sub("", token)
        if token:
            parts.append(token[0].upper() + token[1:])
    if not parts:
        raise EmptyName(f"nothing left of business name {name!r} after normalization")
    return "#" + "".join(parts)


@dataclass(frozen=True)
class BusinessRecord:
    id: str
    name: str
    latitude: float
    longitude: float
    categories: frozenset = frozenset()
    rating: float | None = None
    hashtag: str = ""

    def __post_init__(self):
        _check_coordinate(self.latitude, self.longitude)
        if self.rating is not None and not 0.0 <= self.rating <= 5.0:
            raise ValueError(f"rating {self.rating} outside [0, 5]")
        if not self.hashtag:
            object.__setattr__(self, "hashtag", derive_hashtag(self.name))


@dataclass(frozen=True)
class PostRecord:
    id: str
    business_id: str
    timestamp: datetime
    latitude: float
    longitude: float
    category: FoodCategory

    @property
    def slot(self) -> TimeSlot:
        return assign_time_slot(self.timestamp)

    @property
    def day(self) -> date:
        return activity_date(self.timestamp)

    @property
    def unassigned(self) -> bool:
        """True for posts in the 02:00-05:00 gap, kept but left out of slot analyses."""
        return self.slot is TimeSlot.UNASSIGNED


@dataclass(frozen=True)
class Dataset:
    posts: tuple
    businesses: Mapping[str, BusinessRecord]
    reference_date: date
    provenance: str = ""
    window_days: int = WINDOW_DAYS

    @property
    def window(self) -> tuple[date, date]:
        """First and last activity day (inclusive) of the analysis window."""
        return self.reference_date - timedelta(days=self.window_days - 1), self.reference_date

    def days(self) -> list[date]:
        start, _ = self.window
        return [start + timedelta(days=k) for k in range(self.window_days)]

    def to_dict(self) -> dict:
        return {
            "reference_date": self.reference_date.isoformat(),
            "window_days": self.window_days,
            "provenance": self.provenance,
            "businesses": [
                {
                    "id": b.id,
                    "name": b.name,
                    "hashtag": b.hashtag,
                    "latitude": b.latitude,
                    "longitude": b.longitude,
                    "categories": [c.key for c in CATEGORIES if c in b.categories],
                    "rating": b.rating,
                }
                for b in (self.businesses[k] for k in sorted(self.businesses))
            ],
            "posts": [
                {
                    "id": p.id,
                    "business_id": p.business_id,
                    "timestamp": p.timestamp.isoformat(),
                    "latitude": p.latitude,
                    "longitude": p.longitude,
                    "category": p.category.key,
                    "slot": p.slot.value,
                }
                for p in self.posts
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n"


def _check_coordinate(lat, lon):
    if not (math.isfinite(lat) and math.isfinite(lon)) or not (-90 <= lat <= 90 and -180 <= lon <= 180):
        raise InvalidCoordinate(f"invalid coordinate ({lat}, {lon})")


def _read_rows(path, columns):
    text = Path(path).read_bytes()
    reader = csv.DictReader(io.StringIO(text.decode("utf-8-sig"), newline=""))
    header = tuple(reader.fieldnames or ())
    if header and tuple(h.strip() for h in header) != columns:
        raise ParseError(f"expected header {','.join(columns)}, got {','.join(header)}", path, 1)
    rows = []
    for row in reader:
        line = reader.line_num
        if None in row or any(v is None for v in row.values()):
            raise ParseError("wrong number of fields", path, line)
        rows.append((line, {k.strip(): v.strip() for k, v in row.items()}))
    return text, rows


def _float(value, what, path, line):
    try:
        out = float(value)
    except ValueError:
        raise ParseError(f"{what} is not a number: {value!r}", path, line) from None
    if not math.isfinite(out):
        raise ParseError(f"{what} is not finite: {value!r}", path, line)
    return out


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp; the UTC offset is mandatory."""
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    ts = datetime.fromisoformat(s.replace(" ", "T", 1) if "T" not in s else s)
    if ts.tzinfo is None or ts.utcoffset() is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts


def read_businesses(path) -> tuple[bytes, dict[str, BusinessRecord]]:
    raw, rows = _read_rows(path, BUSINESS_COLUMNS)
    out = {}
    for line, row in rows:
        bid = row["id"]
        if not bid:
            raise ParseError("empty business id", path, line)
        if bid in out:
            raise ParseError(f"duplicate business id {bid!r}", path, line)
        lat = _float(row["latitude"], "latitude", path, line)
        lon = _float(row["longitude"], "longitude", path, line)
        try:
            _check_coordinate(lat, lon)
        except InvalidCoordinate as exc:
            raise InvalidCoordinate(f"{path}: row {line}: {exc}") from None
        try:
            cats = frozenset(FoodCategory.parse(c) for c in row["categories"].split("|") if c.strip())
        except ValueError as exc:
            raise ParseError(str(exc), path, line) from None
        rating = None
        if row["rating"]:
            rating = _float(row["rating"], "rating", path, line)
            if not 0.0 <= rating <= 5.0:
                raise ParseError(f"rating {rating} outside [0, 5]", path, line)
        try:
            out[bid] = BusinessRecord(bid, row["name"], lat, lon, cats, rating)
        except EmptyName as exc:
            raise ParseError(str(exc), path, line) from None
    return raw, out


def read_posts(path, businesses: Mapping[str, BusinessRecord], tz: tzinfo | None = None):
    raw, rows = _read_rows(path, POST_COLUMNS)
    out = []
    seen = set()
    for line, row in rows:
        pid = row["id"]
        if not pid:
            raise ParseError("empty post id", path, line)
        if pid in seen:
            raise ParseError(f"duplicate post id {pid!r}", path, line)
        seen.add(pid)
        bid = row["business_id"]
        if bid not in businesses:
            raise DanglingReference(f"{path}: row {line}: unknown business_id {bid!r}")
        try:
            ts = parse_timestamp(row["timestamp"])
        except ValueError as exc:
            raise ParseError(f"bad timestamp: {exc}", path, line) from None
        if tz is not None:
            ts = ts.astimezone(tz)
        if bool(row["latitude"]) != bool(row["longitude"]):
            raise ParseError("latitude and longitude must both be given or both blank", path, line)
        if row["latitude"]:
            lat = _float(row["latitude"], "latitude", path, line)
            lon = _float(row["longitude"], "longitude", path, line)
            try:
                _check_coordinate(lat, lon)
            except InvalidCoordinate as exc:
                raise InvalidCoordinate(f"{path}: row {line}: {exc}") from None
        else:
            lat, lon = businesses[bid].latitude, businesses[bid].longitude
        try:
            cat = FoodCategory.parse(row["category"])
        except ValueError as exc:
            raise ParseError(str(exc), path, line) from None
        out.append(PostRecord(pid, bid, ts, lat, lon, cat))
    return raw, out


def _sort_key(post):
    return (post.timestamp.timestamp(), post.id)


def filter_posts(posts: Iterable[PostRecord], reference_date: date,
                 window_days: int = WINDOW_DAYS, cap: int = MAX_POSTS_PER_BUSINESS) -> list[PostRecord]:
    """Apply the recency window, then keep each business's ``cap`` most recent posts.

    A post is inside the window when its activity day lies in the
    ``window_days`` days ending at ``reference_date``.
    """
    start = reference_date - timedelta(days=window_days - 1)
    by_business: dict[str, list[PostRecord]] = {}
    for p in posts:
        if start <= p.day <= reference_date:
            by_business.setdefault(p.business_id, []).append(p)
    kept = []
    for group in by_business.values():
        group.sort(key=_sort_key, reverse=True)
        kept.extend(group[:cap])
    kept.sort(key=_sort_key)
    return kept


def load_dataset(posts_path, businesses_path, reference_date: date, *,
                 window_days: int = WINDOW_DAYS, cap: int = MAX_POSTS_PER_BUSINESS,
                 tz: tzinfo | None = None) -> Dataset:
    """Read, validate and filter a businesses/posts file pair.

    Parameters
    ----------
    posts_path, businesses_path : path-like
        CSV files in the documented schemas.
    reference_date : date
        Last day of the analysis window.
    window_days : int
        Length of the trailing analysis window.
    cap : int
        Maximum number of (most recent) posts retained per business.
    tz : tzinfo, optional
        Convert timestamps to this zone before slot assignment. By default
        the wall-clock time at the timestamp's own UTC offset is used.

    Returns
    -------
    Dataset
        Posts sorted by (instant, id); only businesses with at least one
        retained post.
    """
    braw, businesses = read_businesses(businesses_path)
    praw, posts = read_posts(posts_path, businesses, tz)
    kept = filter_posts(posts, reference_date, window_days, cap)
    used = {p.business_id for p in kept}
    digest = hashlib.sha256()
    for blob in (braw, praw):
        digest.update(hashlib.sha256(blob).digest())
    return Dataset(
        posts=tuple(kept),
        businesses={k: businesses[k] for k in sorted(used)},
        reference_date=reference_date,
        provenance="sha256:" + digest.hexdigest(),
        window_days=window_days,
    )


def stratify(dataset: Dataset | Iterable[PostRecord]) -> dict[TimeSlot, list[PostRecord]]:
    """Split posts by time slot; the ``UNASSIGNED`` key holds the 02:00-05:00 posts."""
    posts = dataset.posts if isinstance(dataset, Dataset) else dataset
    out: dict[TimeSlot, list[PostRecord]] = {s: [] for s in TimeSlot}
    for p in posts:
        out[p.slot].append(p)
    return out


def summarize(dataset: Dataset) -> dict[str, dict[str, int]]:
    """Post counts per slot and category."""
    table = {s.value: {c.key: 0 for c in CATEGORIES} for s in TimeSlot}
    for p in dataset.posts:
        table[p.slot.value][p.category.key] += 1
    return table
