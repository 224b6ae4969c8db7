import json
import math

import numpy as np
import pytest

import geohull


SPH = geohull.Geometry("spherical", 2)


def ball(radius=0.8, kind="spherical"):
    g = geohull.Geometry(kind, 2)
    return geohull.make_ball(g, np.array([0.0, 0.0, 1.0]), radius)


def test_version():
    assert geohull.__version__ == "0.1.0"


def test_geometry_round_trip():
    p = np.array([0.3, -0.2])
    x = geohull.gnomonic_inverse(SPH, p)
    assert np.allclose(geohull.gnomonic_forward(SPH, x), p)
    assert geohull.chart_density(SPH, p) == pytest.approx((1 + p @ p) ** -1.5)


def test_ball_volume_closed_form():
    b = ball(math.pi / 3)
    assert b.volume() == pytest.approx(2 * math.pi * (1 - math.cos(math.pi / 3)))


def test_sampling_and_hull():
    b = ball()
    pts = geohull.sample_uniform(b, 200, seed=7)
    assert len(pts) == 200
    assert all(b.contains(x) for x in pts)
    h = geohull.convex_hull(SPH, pts)
    assert 3 <= h.f0 <= 200
    assert 0 < h.volume() < b.volume()


def test_sampling_deterministic():
    b = ball()
    a = geohull.sample_uniform(b, 50, seed=11)
    c = geohull.sample_uniform(b, 50, seed=11)
    assert all(np.array_equal(x, y) for x, y in zip(a, c))


def test_cap_volume_round_trip():
    b = ball()
    n = np.array([0.0, 1.0])
    target = 0.05 * b.volume()
    off = geohull.cap_offset_for_volume(b, n, target)
    assert geohull.cap_volume(b, n, off) == pytest.approx(target, rel=1e-4)


def test_floating_body_and_wet_part():
    b = ball()
    t = 0.01 * b.volume()
    fb = geohull.floating_body(b, t)
    assert fb.f0 >= 3
    wet = geohull.wet_part_volume(b, t)
    assert 0 < wet < b.volume()
    assert wet == pytest.approx(b.volume() - fb.volume(), rel=1e-6)


def test_cap_cover_verified():
    b = ball()
    cover = geohull.cap_cover(b, b.volume() / 500.0)
    assert cover["m"] >= 3
    assert cover["lambda"] == 6.0


def test_mean_width_ball():
    b = ball(0.5)
    est, err = geohull.mean_width_u1(b, 200000, seed=3)
    assert est == pytest.approx(math.sin(0.5) / 2, abs=4 * err + 1e-4)


def test_polarity():
    b = ball(0.5)
    p = geohull.spherical_polar(b)
    back = geohull.spherical_polar(p)
    assert back.volume() == pytest.approx(b.volume(), rel=1e-9)


def test_circumscribed_sample():
    b = ball(0.5)
    p = geohull.sample_circumscribed(b, 16, seed=21)
    assert 3 <= p.num_facets <= 16  # redundant half-spaces are dropped
    assert p.volume() > b.volume()


def test_run_experiment_and_fit():
    cfg = {
        "schema_version": 1,
        "model": "inscribed",
        "body": {"shape": "ball", "geometry": "spherical", "dim": 2, "radius": 0.8},
        "n_grid": [32, 64, 128, 256],
        "replications": 40,
        "master_seed": 5,
        "statistics": ["missed_volume"],
    }
    rows = geohull.run_experiment(json.dumps(cfg))
    assert len(rows) == 4
    fit = geohull.fit_scaling([(r["n"], r["mean"]) for r in rows])
    assert fit["slope"] == pytest.approx(-2 / 3, abs=0.25)


def test_body_from_json():
    b = geohull.body_from_json(
        '{"shape": "ball", "geometry": "hyperbolic", "dim": 2, "radius": 0.7}'
    )
    assert b.geometry.kind == "hyperbolic"
    assert b.volume() == pytest.approx(2 * math.pi * (math.cosh(0.7) - 1))


def test_config_errors_surface():
    with pytest.raises(Exception, match="replications"):
        geohull.run_experiment(
            json.dumps(
                {
                    "schema_version": 1,
                    "model": "inscribed",
                    "body": {"shape": "ball", "geometry": "spherical", "dim": 2, "radius": 0.8},
                    "n_grid": [32],
                    "replications": 1,
                    "master_seed": 5,
                    "statistics": ["missed_volume"],
                }
            )
        )
