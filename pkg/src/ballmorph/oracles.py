"""Independent verification engines.

Central finite differences for every analytic derivative and Monte Carlo
estimators for the boundary measures.  These deliberately share no code
with the analytic implementations they check: surface sampling here is raw
point classification, and the FD driver only moves ball centers.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .errors import DegenerateState, OracleDegenerate
from .geometry import as_momentum

_MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-5
    rtol: float = 1e-5

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("finite-difference step must be positive")


def fd_directional(fn, balls, t, cfg=FDConfig()):
    """Central difference of fn along momentum t: (f(x+ht) - f(x-ht)) / 2h."""
    t = as_momentum(t, balls.n)
    x = balls.state
    h = cfg.step
    try:
        f_plus = fn(balls.with_state(x + h * t.ravel()))
        f_minus = fn(balls.with_state(x - h * t.ravel()))
    except DegenerateState as exc:
        raise OracleDegenerate(
            f"finite-difference probe crossed a degenerate state: {exc}") from exc
    return (f_plus - f_minus) / (2.0 * h)


def fd_gradient(fn, balls, cfg=FDConfig()):
    """Componentwise central differences of fn in all 3n coordinates."""
    x = balls.state
    h = cfg.step
    grad = np.zeros_like(x)
    for m in range(x.size):
        xp = x.copy()
        xp[m] += h
        xm = x.copy()
        xm[m] -= h
        try:
            grad[m] = (fn(balls.with_state(xp)) - fn(balls.with_state(xm))) / (2.0 * h)
        except DegenerateState as exc:
            raise OracleDegenerate(
                f"finite-difference probe crossed a degenerate state: {exc}") from exc
    return grad


def mc_boundary_integrals(balls, samples, seed):
    """Monte Carlo exposure fractions of every sphere.

    Returns (areas, sigmas, std_errors): uniform points on each sphere are
    classified against all other balls; streams are keyed by (seed, ball,
    block) so any work split reproduces the same estimate.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = balls.n
    areas = np.zeros(n)
    sigmas = np.zeros(n)
    errors = np.zeros(n)
    for i in range(n):
        exposed = 0
        done = 0
        block = 0
        while done < samples:
            count = min(_MC_BLOCK, samples - done)
            gen = Generator(Philox(key=np.uint64(seed)).jumped((i + 1) * (1 << 22) + block))
            v = gen.normal(size=(count, 3))
            v /= np.linalg.norm(v, axis=1)[:, None]
            pts = balls.centers[i] + balls.radii[i] * v
            dist = pts[:, None, :] - balls.centers[None, :, :]
            sq = np.einsum("pij,pij->pi", dist, dist) - balls.radii[None, :] ** 2
            sq[:, i] = np.inf
            exposed += int(np.sum(sq.min(axis=1) >= 0.0))
            done += count
            block += 1
        p_hat = exposed / samples
        sigmas[i] = p_hat
        errors[i] = math.sqrt(p_hat * (1.0 - p_hat) / samples)
        areas[i] = 4.0 * math.pi * balls.radii[i] ** 2 * p_hat
    return areas, sigmas, errors
