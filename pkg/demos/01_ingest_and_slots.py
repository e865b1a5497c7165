"""
Loading posts and splitting them by time of day
===============================================

Generate the bundled Manhattan-like dataset, read it back through the
validating loader and look at how posts fall into the three meal slots.
"""

import tempfile
from datetime import datetime, time, timedelta, timezone
from pathlib import Path

from foodmap import core, synth

# %%
# The synthetic generator writes the same two CSV files a real export would:
# one row per business and one row per post.
work = Path(tempfile.mkdtemp(prefix="foodmap-demo-"))
spec = synth.manhattan_spec()
paths = synth.generate(spec).write(work)
print(paths["posts"].read_text().splitlines()[:3])

# %%
# ``load_dataset`` validates every row, keeps the last 365 days before the
# reference date and caps each business at its 300 most recent posts.
ds = core.load_dataset(paths["posts"], paths["businesses"], spec.reference_date)
print(len(ds.posts), "posts,", len(ds.businesses), "businesses, window", ds.window)

# %%
# Slots are half-open hour ranges. Dinner wraps past midnight, and a post
# at 01:30 is counted on the previous calendar day.
edt = timezone(timedelta(hours=-4))
late = datetime.combine(spec.reference_date, time(1, 30), edt)
print(core.assign_time_slot(late), core.activity_date(late))
for slot in core.TimeSlot:
    print(f"{slot.value:>10}  {slot.label}")

# %%
# Per-slot, per-category counts.
for slot, row in core.summarize(ds).items():
    print(f"{slot:>10}", " ".join(f"{k}={v}" for k, v in row.items()))

# %%
# Hashtags are derived from business names.
for b in list(ds.businesses.values())[:5]:
    print(f"{b.name!r:32} {b.hashtag}")
