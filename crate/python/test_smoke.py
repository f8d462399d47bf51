"""Smoke test of the orbit_atlas extension module.

Run with `pytest python/` or `python python/test_smoke.py`.
"""

import json

import orbit_atlas


def test_catalog_sizes():
    assert [len(orbit_atlas.orbit_ids(n)) for n in (1, 2, 3, 4)] == [2, 5, 16, 61]
    assert json.loads(orbit_atlas.catalog_json(2))["orbits"][0]["id"] == "0"


def test_classify():
    assert orbit_atlas.classify(2, "0,0,5", 7) == "x12"
    assert orbit_atlas.classify(1, "0") == "0"
    try:
        orbit_atlas.classify(2, "1,2")
    except ValueError as e:
        assert "coordinates" in str(e)
    else:
        raise AssertionError("a short point must be rejected")


def test_census_and_oracle():
    counts = dict(orbit_atlas.census(2, 3))
    assert len(counts) == 5 and sum(counts.values()) == 27
    classes, refined = orbit_atlas.oracle(3, 3)
    assert refined and classes >= 16


def test_dimensions_and_order():
    assert all(j == c for _, j, c in orbit_atlas.dimensions(4))
    nodes, covers = orbit_atlas.hasse(2)
    assert len(nodes) == 5
    assert covers == [("0", "x12"), ("x11", "x11+x22"), ("x12", "x11"), ("x12", "x22"), ("x22", "x11+x22")]
    assert orbit_atlas.hasse_dot(1).startswith("digraph A1 {")


def test_verify():
    rows = orbit_atlas.verify(3)
    assert len(rows) == 16 and all(ok for _, _, ok in rows)


if __name__ == "__main__":
    for name, f in list(globals().items()):
        if name.startswith("test_"):
            f()
            print(f"ok {name}")
