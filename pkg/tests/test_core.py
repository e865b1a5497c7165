from datetime import date, datetime, time, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from foodmap.core import (CATEGORIES, NAMED_SLOTS, FoodCategory, PostRecord, TimeSlot, activity_date,
                          assign_time_slot, derive_hashtag, filter_posts, load_dataset, stratify, summarize)
from foodmap.errors import DanglingReference, EmptyName, InvalidCoordinate, ParseError

from helpers import BIZ, REF
from oracles import hashtag_reference, slot_reference

EDT = timezone(timedelta(hours=-4))


def ts(day, hh, mm=0, tz=EDT):
    return datetime.combine(day, time(hh, mm), tz).isoformat()


def test_category_order_is_fixed():
    assert [c.value for c in CATEGORIES] == ["Ramen", "Sushi", "Waffles", "Burgers", "HotWings", "Nachos",
                                             "Bagels", "Pizza"]
    assert [c.index for c in CATEGORIES] == list(range(8))
    assert FoodCategory.parse("hot_wings") is FoodCategory.HOT_WINGS
    assert FoodCategory.parse("Hot Wings") is FoodCategory.HOT_WINGS
    with pytest.raises(ValueError):
        FoodCategory.parse("tacos")


@pytest.mark.parametrize("name, tag", [
    ("Sample Name", "#SampleName"),
    ("Ramen", "#Ramen"),
    ("Joe's Pizza-Bar", "#JoesPizzaBar"),
    ("  mcDonald's  ", "#McDonalds"),
    ("Café 33", "#Caf33"),
])
def test_derive_hashtag(name, tag):
    assert derive_hashtag(name) == tag
    assert hashtag_reference(name) == tag


@pytest.mark.parametrize("name", ["", "   ", "'-!", "é"])
def test_derive_hashtag_empty(name):
    with pytest.raises(EmptyName):
        derive_hashtag(name)


@given(st.text(min_size=1, max_size=40))
def test_hashtag_matches_character_reference(name):
    ref = hashtag_reference(name)
    if ref == "#":
        with pytest.raises(EmptyName):
            derive_hashtag(name)
    else:
        assert derive_hashtag(name) == ref


@given(st.from_regex(r"[A-Z][A-Za-z0-9]{0,15}", fullmatch=True))
def test_hashtag_idempotent_on_canonical_tokens(token):
    assert derive_hashtag(token) == "#" + token


@pytest.mark.parametrize("clock, slot", [
    (time(8, 30), TimeSlot.BREAKFAST),
    (time(12, 0), TimeSlot.LUNCH),
    (time(1, 30), TimeSlot.DINNER),
    (time(5, 0), TimeSlot.BREAKFAST),
    (time(11, 59, 59), TimeSlot.BREAKFAST),
    (time(18, 0), TimeSlot.DINNER),
    (time(17, 59), TimeSlot.LUNCH),
    (time(0, 0), TimeSlot.DINNER),
    (time(2, 0), TimeSlot.UNASSIGNED),
    (time(4, 59), TimeSlot.UNASSIGNED),
])
def test_assign_time_slot(clock, slot):
    assert assign_time_slot(clock) is slot


def test_after_midnight_dinner_counts_for_previous_day():
    d = date(2019, 3, 10)
    t = datetime.combine(d, time(1, 30), EDT)
    assert assign_time_slot(t) is TimeSlot.DINNER
    assert activity_date(t) == d - timedelta(days=1)
    assert activity_date(datetime.combine(d, time(2, 30), EDT)) == d


@given(st.times())
def test_slots_tile_the_day(clock):
    assert assign_time_slot(clock).value == slot_reference(clock.hour)


def test_slot_labels():
    assert [s.label for s in NAMED_SLOTS] == ["5am-12noon", "12noon-6pm", "6pm-2am"]


def _post(pid, bid, when, cat="ramen", lat="", lon=""):
    return [pid, bid, when, lat, lon, cat]


def test_load_dataset_basic(write_files):
    posts = [
        _post("p1", "b1", ts(REF, 8)),
        _post("p2", "b1", ts(REF, 13), "hot_wings", "40.7151", "-73.9844"),
        _post("p3", "b2", ts(REF, 20), "pizza"),
        _post("p4", "b2", ts(REF, 3), "pizza"),
    ]
    ds = load_dataset(*write_files(BIZ, posts), REF)
    assert [p.id for p in ds.posts] == ["p4", "p1", "p2", "p3"]
    assert sorted(ds.businesses) == ["b1", "b2"]  # b3 has no posts
    assert ds.businesses["b1"].hashtag == "#SampleName"
    assert ds.businesses["b2"].hashtag == "#JoesPizzaBar"
    assert ds.businesses["b2"].rating is None
    assert ds.businesses["b1"].categories == {FoodCategory.RAMEN, FoodCategory.HOT_WINGS}
    p1 = next(p for p in ds.posts if p.id == "p1")
    assert (p1.latitude, p1.longitude) == (40.7150, -73.9843)  # inherited from venue
    p2 = next(p for p in ds.posts if p.id == "p2")
    assert (p2.latitude, p2.longitude) == (40.7151, -73.9844)
    p4 = next(p for p in ds.posts if p.id == "p4")
    assert p4.unassigned and not p1.unassigned
    assert ds.provenance.startswith("sha256:")


def test_empty_posts_file(write_files):
    ds = load_dataset(*write_files(BIZ, []), REF)
    assert ds.posts == () and dict(ds.businesses) == {}


def test_cap_keeps_300_most_recent(write_files):
    base = datetime.combine(REF, time(9), EDT)
    posts = [_post(f"p{i:03d}", "b1", (base - timedelta(hours=i)).isoformat()) for i in range(350)]
    ds = load_dataset(*write_files(BIZ, posts), REF)
    kept = {p.id for p in ds.posts}
    assert len(kept) == 300
    assert kept == {f"p{i:03d}" for i in range(300)}


def test_recency_window(write_files):
    posts = [
        _post("old", "b1", ts(REF - timedelta(days=400), 9)),
        _post("edge_in", "b1", ts(REF - timedelta(days=364), 9)),
        _post("edge_out", "b1", ts(REF - timedelta(days=365), 9)),
        _post("future", "b1", ts(REF + timedelta(days=1), 9)),
        _post("late_dinner", "b1", ts(REF - timedelta(days=364), 1)),  # belongs to day -365
        _post("ok", "b1", ts(REF, 23)),
    ]
    ds = load_dataset(*write_files(BIZ, posts), REF)
    # hand-filtered expectation
    assert sorted(p.id for p in ds.posts) == ["edge_in", "ok"]


@pytest.mark.parametrize("bad_post, exc", [
    (_post("p1", "zzz", "2019-05-01T09:00:00-04:00"), DanglingReference),
    (_post("p1", "b1", "2019-05-01 nine o'clock"), ParseError),
    (_post("p1", "b1", "2019-05-01T09:00:00"), ParseError),  # no offset
    (_post("p1", "b1", "2019-05-01T09:00:00-04:00", "tacos"), ParseError),
    (_post("p1", "b1", "2019-05-01T09:00:00-04:00", "ramen", "91.0", "0"), InvalidCoordinate),
    (_post("p1", "b1", "2019-05-01T09:00:00-04:00", "ramen", "40.7", ""), ParseError),
])
def test_bad_post_rows(write_files, bad_post, exc):
    good = _post("p0", "b1", "2019-05-01T08:00:00-04:00")
    with pytest.raises(exc) as info:
        load_dataset(*write_files(BIZ, [good, bad_post]), REF)
    assert "row 3" in str(info.value)


def test_bad_business_rows(write_files):
    bad = BIZ + [["b9", "Nowhere", "12.0", "200.0", "", ""]]
    with pytest.raises(InvalidCoordinate):
        load_dataset(*write_files(bad, []), REF)
    bad = BIZ + [["b9", "Bad Rating", "12.0", "20.0", "", "7"]]
    with pytest.raises(ParseError, match="row 5"):
        load_dataset(*write_files(bad, []), REF)


def test_zulu_timestamps_and_tz_conversion(write_files):
    posts = [_post("p1", "b1", "2019-05-01T13:30:00Z")]
    ds = load_dataset(*write_files(BIZ, posts), REF)
    assert ds.posts[0].slot is TimeSlot.LUNCH
    ds = load_dataset(*write_files(BIZ, posts), REF, tz=EDT)
    assert ds.posts[0].slot is TimeSlot.BREAKFAST


def test_stratify_direct():
    d = REF
    posts = [PostRecord(str(h), "b1", datetime.combine(d, time(h), EDT), 40.7, -74.0, FoodCategory.RAMEN)
             for h in (8, 13, 20)]
    parts = stratify(posts)
    assert [len(parts[s]) for s in NAMED_SLOTS] == [1, 1, 1]
    night = [PostRecord("n", "b1", datetime.combine(d, time(3), EDT), 40.7, -74.0, FoodCategory.RAMEN)]
    parts = stratify(night)
    assert all(not parts[s] for s in NAMED_SLOTS) and len(parts[TimeSlot.UNASSIGNED]) == 1


def test_stratify_matches_rowwise_classification(write_files):
    import random
    rnd = random.Random(5)
    posts = []
    for i in range(100):
        day = REF - timedelta(days=rnd.randrange(300))
        posts.append(_post(f"p{i}", rnd.choice(["b1", "b2"]), ts(day, rnd.randrange(24), rnd.randrange(60)),
                           rnd.choice([c.key for c in CATEGORIES])))
    ds = load_dataset(*write_files(BIZ, posts), REF)
    expected = {}
    for row in posts:
        hour = int(row[2][11:13])
        expected[slot_reference(hour)] = expected.get(slot_reference(hour), 0) + 1
    parts = stratify(ds)
    assert {s.value: len(v) for s, v in parts.items() if v} == expected
    assert sum(len(v) for v in parts.values()) == len(ds.posts) == 100
    ids = [p.id for v in parts.values() for p in v]
    assert len(ids) == len(set(ids))
    counts = summarize(ds)
    assert sum(sum(r.values()) for r in counts.values()) == 100


@given(st.lists(st.tuples(st.integers(0, 400), st.integers(0, 23), st.sampled_from(["b1", "b2"])), max_size=80))
def test_partition_and_cap_properties(rows):
    posts = [PostRecord(f"p{i}", b, datetime.combine(REF - timedelta(days=d), time(h), EDT), 40.7, -74.0,
                        FoodCategory.SUSHI) for i, (d, h, b) in enumerate(rows)]
    kept = filter_posts(posts, REF, cap=5)
    parts = stratify(kept)
    assert sum(len(v) for v in parts.values()) == len(kept)
    for b in ("b1", "b2"):
        mine = [p for p in kept if p.business_id == b]
        assert len(mine) <= 5
        in_window = [p for p in posts if p.business_id == b and REF - timedelta(days=364) <= p.day <= REF]
        dropped = [p for p in in_window if p not in mine]
        if mine and dropped:
            assert min(p.timestamp for p in mine) >= max(p.timestamp for p in dropped)


def test_serialization_is_deterministic(write_files):
    posts = [_post(f"p{i}", "b1", ts(REF - timedelta(days=i), 9 + i % 12), "ramen") for i in range(30)]
    a = load_dataset(*write_files(BIZ, posts, "one"), REF).to_json()
    b = load_dataset(*write_files(BIZ, posts, "two"), REF).to_json()
    assert a == b
    assert "\r" not in a
