import math

import pytest

from ballmorph import BallSet, build_alpha_complex, compute_measures, euler, \
    intrinsic_volumes, weighted_area, weighted_gauss, weighted_mean, weighted_volume
from conftest import make_config, random_rotation, two_balls

FOUR_PI = 4 * math.pi


def lens_mean_curvature(r, d):
    """Normal-cycle mean curvature of the intersection of two equal balls.

    Smooth part: two caps of height r - d/2 with H = 1/r; edge part: half
    the circle length times the (convex) normal-angle jump.
    """
    xi = d / 2.0
    h = r - xi
    r_c = math.sqrt(r * r - xi * xi)
    phi = math.acos((2 * r * r - d * d) / (2 * r * r))
    return 2.0 * (2 * math.pi * h) + 0.5 * (2 * math.pi * r_c) * phi


def lens_volume(r, d):
    h = r - d / 2.0
    return 2.0 * math.pi * h * h * (3 * r - h) / 3.0


def setup(balls, mc=0, seed=0):
    cx = build_alpha_complex(balls)
    return cx, compute_measures(balls, cx, mc_samples=mc, seed=seed)


def test_gauss_single_ball():
    balls = BallSet([[0, 0, 0]], [1.0])
    cx, m = setup(balls)
    k, _ = weighted_gauss(balls, cx, m)
    assert k == pytest.approx(FOUR_PI, abs=1e-12)


def test_gauss_two_overlapping_balls():
    balls = two_balls(d=1.0)
    cx, m = setup(balls)
    k, (patch, arc, corner) = weighted_gauss(balls, cx, m)
    assert patch == pytest.approx(FOUR_PI * 1.5, abs=1e-12)
    assert arc == pytest.approx(-2 * math.pi, abs=1e-12)
    assert corner == 0.0
    assert k == pytest.approx(FOUR_PI, abs=1e-12)


def test_gauss_disjoint_weighted():
    balls = two_balls(d=3.0, w0=2.0, w1=3.0)
    cx, m = setup(balls)
    k, _ = weighted_gauss(balls, cx, m)
    assert k == pytest.approx(FOUR_PI * 5.0, abs=1e-12)


def test_area_values():
    balls = BallSet([[0, 0, 0]], [1.0])
    cx, m = setup(balls)
    assert weighted_area(balls, cx, m) == pytest.approx(FOUR_PI)
    balls = two_balls(d=1.0)
    cx, m = setup(balls)
    assert weighted_area(balls, cx, m) == pytest.approx(FOUR_PI * 1.5, abs=1e-12)
    nested = BallSet([[0, 0, 0], [0.2, 0, 0]], [1.0, 0.5], [1.0, 5.0])
    cx, m = setup(nested)
    assert weighted_area(nested, cx, m) == pytest.approx(FOUR_PI, abs=1e-12)


def test_mean_against_additivity_oracle():
    balls = BallSet([[0, 0, 0]], [1.0])
    cx, m = setup(balls)
    assert weighted_mean(balls, cx, m) == pytest.approx(FOUR_PI)
    balls = two_balls(d=1.0)
    cx, m = setup(balls)
    # M(union) = M(B0) + M(B1) - M(lens), all unweighted.
    expected = 2 * FOUR_PI - lens_mean_curvature(1.0, 1.0)
    assert weighted_mean(balls, cx, m) == pytest.approx(expected, abs=1e-12)
    far = two_balls(d=3.0, r0=1.0, r1=0.8, w0=2.0, w1=0.5)
    cx, m = setup(far)
    assert weighted_mean(far, cx, m) == pytest.approx(
        FOUR_PI * (2.0 * 1.0 + 0.5 * 0.8), abs=1e-12)


def test_volume_against_lens_oracle():
    balls = BallSet([[0, 0, 0]], [1.0])
    cx, m = setup(balls, mc=50_000)
    v, se = weighted_volume(balls, m)
    assert (v, se) == (pytest.approx(FOUR_PI / 3), 0.0)
    balls = two_balls(d=1.0)
    cx, m = setup(balls, mc=400_000, seed=5)
    v, se = weighted_volume(balls, m)
    expected = 2 * FOUR_PI / 3 - lens_volume(1.0, 1.0)
    assert abs(v - expected) <= 3.0 * se
    zero = balls.with_weights([0.0, 0.0])
    cx, m = setup(zero, mc=10_000)
    assert weighted_volume(zero, m)[0] == 0.0


def test_gauss_bonnet_random_configs(rng):
    for _ in range(12):
        balls, cx = make_config(rng, int(rng.integers(3, 13)), weights="ones",
                                require_triangle=False)
        m = compute_measures(balls, cx)
        k, _ = weighted_gauss(balls, cx, m)
        chi_s = euler(cx).chi_surface
        assert abs(k - 2 * math.pi * chi_s) <= 1e-8 * max(1.0, abs(k))


def test_rigid_motion_invariance(rng):
    balls, cx = make_config(rng, 7)
    m = compute_measures(balls, cx)
    k0, _ = weighted_gauss(balls, cx, m)
    a0 = weighted_area(balls, cx, m)
    m0 = weighted_mean(balls, cx, m)
    q = random_rotation(rng)
    moved = BallSet(balls.centers @ q.T + rng.normal(size=3), balls.radii,
                    balls.weights)
    cx2 = build_alpha_complex(moved)
    m2 = compute_measures(moved, cx2)
    k1, _ = weighted_gauss(moved, cx2, m2)
    assert k1 == pytest.approx(k0, rel=1e-10, abs=1e-10)
    assert weighted_area(moved, cx2, m2) == pytest.approx(a0, rel=1e-10)
    assert weighted_mean(moved, cx2, m2) == pytest.approx(m0, rel=1e-10)


def test_linearity_in_weights(rng):
    balls, cx = make_config(rng, 6)
    m = compute_measures(balls, cx)
    doubled = balls.with_weights(2.0 * balls.weights)
    m2 = compute_measures(doubled, cx)
    for fn in (weighted_area, weighted_mean):
        assert fn(doubled, cx, m2) == pytest.approx(2 * fn(balls, cx, m), rel=1e-13)
    k1, _ = weighted_gauss(balls, cx, m)
    k2, _ = weighted_gauss(doubled, cx, m2)
    assert k2 == pytest.approx(2 * k1, rel=1e-13, abs=1e-12)


def test_intrinsic_volumes_bundle(rng):
    balls, cx = make_config(rng, 5)
    m = compute_measures(balls, cx, mc_samples=20_000)
    vols = intrinsic_volumes(balls, cx, m)
    assert vols.gauss == pytest.approx(
        vols.gauss_patch + vols.gauss_arc + vols.gauss_corner, rel=1e-12)
    assert math.isfinite(vols.volume) and vols.volume_std_error >= 0.0
