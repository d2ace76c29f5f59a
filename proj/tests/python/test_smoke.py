import math

import pytest

import certsurf


def test_interval_arithmetic():
    x = certsurf.Interval(1.0, 2.0)
    y = x * x - x
    assert y.lo <= 0.0 and y.hi >= 2.0 - 1.0
    assert (certsurf.Interval(0.1) + certsurf.Interval(0.2)).contains(0.30000000000000004)
    with pytest.raises(certsurf.CertificationError):
        certsurf.Interval(-2.0, -1.0).sqrt()


def test_parse_system():
    variables, equations = certsurf.parse_system("x^2 + y^2 + z^2 = 1")
    assert variables == ["x", "y", "z"]
    assert len(equations) == 1
    with pytest.raises(ValueError):
        certsurf.parse_system("x^2 +* y")


def test_krawczyk_sphere_pair():
    eq = ["x^2 + y^2 + z^2 - 1"]
    fails = certsurf.krawczyk_test(eq, [0, 0, 1], [0.1, 0.1], 0.1, [[0.5]], 0.125)
    assert not fails["passed"]
    assert 0.0199 <= fails["norm_K"] <= 0.0201
    ok = certsurf.krawczyk_test(eq, [0, 0, 1], [0.05, 0.05], 0.05, [[0.5]], 0.125)
    assert ok["passed"]
    assert ok["margin"] > 0


def test_graph_cap():
    slabs = certsurf.graph_approximation(
        ["x^2 + y^2 + z^2 - 1"], [(-0.5, 0.5), (-0.5, 0.5)], 0.125, fiber=[(0.5, 1.5)])
    area = sum((s["base"][0][1] - s["base"][0][0]) * (s["base"][1][1] - s["base"][1][0]) for s in slabs)
    assert math.isclose(area, 1.0)


def test_surface_round_trip(tmp_path):
    res = certsurf.approximate_surface(["x^2 + y^2 + z^2 - 1"], [0, 0, 1], max_boxes=25)
    assert res.truncated
    assert res.count == 25
    assert res.verify()
    boxes = res.boxes
    assert boxes[0]["initial"]
    assert all(b["margin"] > 0 for b in boxes)
    for b in boxes:
        assert abs(math.dist(b["center"], (0, 0, 0)) - 1) < 0.05

    path = tmp_path / "s.json"
    res.write_json(str(path))
    res.write_obj(str(tmp_path / "s.obj"))
    assert (tmp_path / "s.mtl").exists()
    assert len(certsurf.read_boxes(str(path))) == 25
    ok, bad = certsurf.verify(str(path))
    assert ok and bad == []


def test_bad_start_raises():
    with pytest.raises(certsurf.CertificationError):
        certsurf.approximate_surface(["x^2 + y^2 - z^2"], [0, 0, 0], max_boxes=5)
