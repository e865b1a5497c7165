"""
Synthetic ground truth and the command line
===========================================

Write a custom synthetic spec, run the full pipeline through the CLI entry
point and compare what it finds against the planted truth.
"""

import json
import tempfile
from pathlib import Path

from foodmap import cli, geo, synth
from foodmap.core import TimeSlot
from foodmap.synth import Cluster, SynthSpec

work = Path(tempfile.mkdtemp(prefix="foodmap-demo-"))

# %%
# Three clusters with different meal profiles. Rates are posts per day.
clusters = [
    Cluster(40.7150, -73.9843, 150.0, {TimeSlot.BREAKFAST: 2.0, TimeSlot.LUNCH: 0.5}, name="Lower East Side"),
    Cluster(40.7638, -73.9918, 150.0, {TimeSlot.DINNER: 2.0, TimeSlot.LUNCH: 0.5}, name="Hell's Kitchen"),
    Cluster(40.7265, -73.9815, 150.0, {TimeSlot.LUNCH: 1.5, TimeSlot.DINNER: 1.0}, name="East Village"),
]
spec = SynthSpec(seed=7, clusters=clusters, n_businesses=30)
spec_path = work / "spec.json"
spec_path.write_text(json.dumps(spec.to_dict(), indent=1))

# %%
# Same as ``foodmap synth --spec spec.json --out data`` on the shell.
cli.main(["synth", "--spec", str(spec_path), "--out", str(work / "data")])

# %%
# ``report`` runs ingest, kde and bn and writes everything under one directory.
code = cli.main(["report", "--posts", str(work / "data/posts.csv"),
                 "--businesses", str(work / "data/businesses.csv"),
                 "--reference-date", "2019-05-31", "--out", str(work / "run")])
print("exit code", code)

# %%
# How far is each reported hot spot from the nearest planted center?
for slot in ("breakfast", "lunch", "dinner"):
    feats = json.loads((work / "run/kde" / f"{slot}.geojson").read_text())["features"]
    for f in feats:
        lon, lat = f["geometry"]["coordinates"]
        d, name = min((geo.haversine(lat, lon, c.latitude, c.longitude), c.name) for c in clusters)
        print(f"{slot:>9} #{f['properties']['rank']}: {d:6.1f} m from {name}")

print(sorted(p.relative_to(work / "run").as_posix() for p in (work / "run").rglob("*") if p.is_file()))
