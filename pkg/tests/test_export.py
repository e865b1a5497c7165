import json

import numpy as np
import pytest

from foodmap import export, places
from foodmap.core import FoodCategory, TimeSlot
from foodmap.geo import LocalFrame
from foodmap.kde import extract_hotspots, rasterize

FRAME = LocalFrame.at(40.7150, -73.9843)


@pytest.fixture
def field():
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.normal(0, 150, (200, 2)), rng.normal([1500, 800], 150, (200, 2))])
    return rasterize(pts, 90.0, FRAME, category=FoodCategory.RAMEN, slot=TimeSlot.DINNER)


def test_ascii_grid_round_trip(field, tmp_path):
    asc, side = export.write_ascii_grid(field, tmp_path / "grid.asc")
    header, values = export.read_ascii_grid(asc)
    assert header["ncols"] == field.nx and header["nrows"] == field.ny
    assert header["xllcorner"] == field.x0 and header["yllcorner"] == field.y0
    assert header["cellsize"] == field.cell_size and header["nodata_value"] == -9999
    assert np.allclose(values, field.values, rtol=1e-8, atol=0)
    # first data row is the northern edge
    first = asc.read_text().splitlines()[6].split()
    assert float(first[0]) == pytest.approx(field.values[-1, 0], rel=1e-8)
    meta = json.loads(side.read_text())
    assert meta["category"] == "ramen" and meta["slot"] == "dinner"
    assert meta["bandwidth_m"] == 90.0 and meta["n_points"] == 400
    assert meta["frame"]["origin_latitude"] == FRAME.origin_latitude


def test_geojson(field, tmp_path):
    spots = extract_hotspots(field)
    named = [s.__class__(**{**s.__dict__, "name": places.nearest_place(s.latitude, s.longitude)}) for s in spots]
    path = export.write_geojson(named, tmp_path / "h.geojson", FoodCategory.RAMEN, TimeSlot.DINNER)
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["type"] == "FeatureCollection" and len(doc["features"]) == len(spots) == 2
    for rank, (feat, s) in enumerate(zip(doc["features"], named), start=1):
        assert feat["geometry"] == {"type": "Point", "coordinates": [s.longitude, s.latitude]}
        props = feat["properties"]
        assert props["rank"] == rank and props["name"] == s.name
        assert props["slot"] == "dinner" and props["category"] == "ramen"
        assert props["n_cells"] == len(s.member_cells)
    assert named[0].name == "Lower East Side"


def test_text_is_lf_utf8(tmp_path):
    p = export.write_text(tmp_path / "sub" / "a.txt", "Café\nx\n")
    assert p.read_bytes() == "Café\nx\n".encode("utf-8")
    assert export.dump_json({"a": "→"}) == '{\n  "a": "→"\n}\n'


def test_nearest_place(tmp_path):
    assert places.nearest_place(40.7638, -73.9918) == "Hell's Kitchen"
    assert places.nearest_place(41.5, -73.0) == "41.5000,-73.0000"
    gz = tmp_path / "g.csv"
    gz.write_text("name,latitude,longitude\nHome,41.5,-73.0\n", encoding="utf-8")
    assert places.nearest_place(41.5001, -73.0, places.read_gazetteer(gz)) == "Home"
