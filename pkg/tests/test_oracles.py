import numpy as np
import pytest

from ballmorph import BallSet, FDConfig, build_alpha_complex, compute_measures, \
    fd_directional, fd_gradient, lambda_pair, mc_boundary_integrals, weighted_gauss
from ballmorph.errors import OracleDegenerate
from conftest import make_config, two_balls


def k_of(bs):
    cx = build_alpha_complex(bs)
    return weighted_gauss(bs, cx, compute_measures(bs, cx))[0]


def test_fd_directional_constant_function(rng):
    balls, _ = make_config(rng, 4)
    t = rng.normal(size=(4, 3))
    val = fd_directional(lambda bs: 3.25, balls, t)
    assert val == 0.0


def test_fd_directional_lambda_oracle():
    balls = two_balls(d=1.0)
    t = np.array([[-1.0, 0, 0], [0.0, 0, 0]])   # separates at unit rate

    def lam(bs):
        return lambda_pair(bs.ball(0), bs.ball(1)).lam

    # For equal unit radii lambda(d) = d.
    assert fd_directional(lam, balls, t) == pytest.approx(1.0, abs=1e-8)


def test_fd_directional_equal_weights_curvature(rng):
    balls, _ = make_config(rng, 5, weights="ones")
    t = rng.normal(size=(5, 3))
    assert fd_directional(k_of, balls, t) == pytest.approx(0.0, abs=1e-7)


def test_fd_directional_degenerate_crossing():
    # Perpendicular motion keeps both probe states inside the tangency band.
    balls = two_balls(d=2.0)
    t = np.array([[0.0, 0, 0], [0.0, 1e-3, 0]])
    with pytest.raises(OracleDegenerate):
        fd_directional(k_of, balls, t, FDConfig(step=1e-5))


def test_fd_gradient_single_ball():
    balls = BallSet([[0, 0, 0]], [1.0], [2.0])
    grad = fd_gradient(k_of, balls)
    assert np.allclose(grad, 0.0, atol=1e-9)


def test_fd_gradient_translation_components_cancel(rng):
    balls, _ = make_config(rng, 4)
    grad = fd_gradient(k_of, balls).reshape(4, 3)
    # Rigid translation invariance: per-axis components sum to zero.
    assert np.allclose(grad.sum(axis=0), 0.0, atol=1e-6)


def test_mc_boundary_integrals_reference_cases():
    single = BallSet([[0, 0, 0]], [1.0])
    areas, sigmas, errs = mc_boundary_integrals(single, 10_000, seed=0)
    assert sigmas[0] == 1.0 and errs[0] == 0.0
    assert areas[0] == pytest.approx(4 * np.pi)

    pair = two_balls(d=1.0)
    areas, sigmas, errs = mc_boundary_integrals(pair, 300_000, seed=1)
    for i in range(2):
        assert abs(sigmas[i] - 0.75) <= 3.0 * max(errs[i], 1e-9)

    nested = BallSet([[0, 0, 0], [0.2, 0, 0]], [1.0, 0.5])
    _, sigmas, _ = mc_boundary_integrals(nested, 20_000, seed=2)
    assert sigmas[1] == 0.0


def test_mc_reproducible_across_splits():
    balls = two_balls(d=1.0)
    a = mc_boundary_integrals(balls, 150_000, seed=9)
    b = mc_boundary_integrals(balls, 150_000, seed=9)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_mc_error_scales_with_sample_count():
    balls = two_balls(d=1.0)
    ratios = []
    for seed in range(5):
        _, _, err1 = mc_boundary_integrals(balls, 40_000, seed=seed)
        _, _, err4 = mc_boundary_integrals(balls, 160_000, seed=seed)
        ratios.append(err4[0] / err1[0])
    assert np.mean(ratios) <= 0.6


def test_prefix_stability_of_sample_blocks():
    # The first samples of a block do not depend on how many are drawn.
    from ballmorph.measures import _ball_block
    balls = two_balls(d=1.0)
    a = _ball_block(balls, 0, seed=4, block_idx=0, count=100)
    b = _ball_block(balls, 0, seed=4, block_idx=0, count=1000)
    assert np.array_equal(a, b[:100])
