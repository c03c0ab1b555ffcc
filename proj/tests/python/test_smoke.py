import numpy as np
import pytest

import geospan


def test_threshold_and_sampling():
    assert geospan.threshold_radius(2, 20) == pytest.approx(np.sqrt(2) / 40)
    assert geospan.threshold_radius(3, 5, p="inf") == pytest.approx(0.1)
    pts = geospan.sample_uniform(100, 2, 7)
    assert pts.shape == (100, 2)
    assert ((pts >= 0) & (pts <= 1)).all()
    assert np.array_equal(pts, geospan.sample_uniform(100, 2, 7))


def test_embed_and_verify_round_trip():
    h = 14
    n = geospan.tree_size(2, h)
    assert n == 2 ** (h + 1) - 1
    pts = geospan.sample_uniform(n, 1, 3)
    res = geospan.embed(pts, 2, height=h, eps=7.0)
    assert res["success"], res["message"]
    assert res["max_edge"] <= res["r"]
    ok, max_edge, _ = geospan.verify(pts, 2, h, res["embedding"], res["r"])
    assert ok and max_edge == res["max_edge"]
    bad = list(res["embedding"])
    bad[0], bad[-1] = bad[-1], bad[0]
    assert not geospan.verify(pts, 2, h, bad, res["r"])[0]


def test_strict_mode_reports_preconditions():
    pts = geospan.sample_uniform(geospan.tree_size(2, 10), 1, 1)
    res = geospan.embed(pts, 2, height=10, eps=0.5, mode="strict")
    assert not res["success"]
    assert res["failure_stage"] == "preconditions"


def test_witness_and_oracle():
    pts = geospan.sample_uniform(geospan.tree_size(2, 10), 2, 5)
    w = geospan.diameter_witness(pts, 0.5 * geospan.threshold_radius(2, 10), 10)
    assert w["certified"]
    tiny = geospan.sample_uniform(7, 2, 2)
    assert geospan.contains_balanced_tree(tiny, 2.0, 2)
    assert not geospan.contains_balanced_tree(tiny, 1e-6, 2)


def test_star_partition_and_stats():
    assert geospan.star_partition(2, 4, [[0, 1, 2], [2, 3]], 2) == [[0, 1], [2, 3]]
    assert geospan.star_partition(2, 4, [[0, 1, 2], [3]], 2) is None
    lo, hi = geospan.wilson_interval(50, 100)
    assert lo < 0.5 < hi


def test_sweep_is_deterministic():
    a = geospan.sweep_csv(1, 2, 8, [0.5, 2.0, 8.0], trials=2, seed=4)
    b = geospan.sweep_csv(1, 2, 8, [0.5, 2.0, 8.0], trials=2, seed=4, workers=2)
    assert a == b
    assert a.splitlines()[0].startswith("seed,d,h,")
    assert len(a.splitlines()) == 7
