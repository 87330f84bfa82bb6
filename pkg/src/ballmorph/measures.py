"""Fractional measures of the boundary simplices.

sigma_i is the exposed area fraction of sphere i, sigma_ij the exposed
length fraction of circle S_ij, sigma_ijk the exposed fraction of the two
corner points, and nu_ijk the fraction of the corner segment inside the
Voronoi edge.  The ball volume fraction nu_i is estimated by Monte Carlo;
nothing downstream needs it exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .errors import DegenerateState

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

_MC_BLOCK = 1 << 16


@dataclass
class FractionalMeasures:
    sigma_v: dict = field(default_factory=dict)     # vertex -> sigma_i
    sigma_e: dict = field(default_factory=dict)     # edge -> sigma_ij
    sigma_t: dict = field(default_factory=dict)     # triangle -> 0, 1/2 or 1
    nu_t: dict = field(default_factory=dict)        # triangle -> nu_ijk
    nu_v: dict = field(default_factory=dict)        # vertex -> (estimate, std error)

    def sigma_vertex(self, i):
        return self.sigma_v.get(i, 0.0)

    def sigma_edge(self, e):
        return self.sigma_e.get(tuple(sorted(e)), 0.0)


def sigma_ij(balls, cx, edge):
    """Fraction of circle S_ij outside all other balls."""
    key = tuple(sorted(edge))
    data = cx.edges.get(key)
    if data is None or not data.in_alpha:
        return 0.0
    if data.fully_covered:
        return 0.0
    if not data.covered:
        return 1.0
    return 1.0 - _union_measure(data.covered) / TWO_PI


def _union_measure(covered):
    """Total angular measure of a union of circle intervals."""
    segs = []
    for start, extent, *_ in covered:
        s = start % TWO_PI
        if s + extent <= TWO_PI:
            segs.append((s, s + extent))
        else:
            segs.append((s, TWO_PI))
            segs.append((0.0, s + extent - TWO_PI))
    segs.sort()
    total = 0.0
    cur_lo, cur_hi = segs[0]
    for lo, hi in segs[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    total += cur_hi - cur_lo
    return total


def sigma_ijk(balls, cx, tri):
    """Exposed corner count over two: 0, 1/2 or 1."""
    data = cx.triangles.get(tuple(sorted(tri)))
    if data is None or not data.in_alpha:
        return 0.0
    return 0.5 * data.exposed_count


def nu_ijk(balls, cx, tri):
    """Fraction of the corner segment inside the Voronoi edge V_ijk."""
    data = cx.triangles.get(tuple(sorted(tri)))
    if data is None or not data.in_alpha:
        return 0.0
    return data.nu


@dataclass(frozen=True)
class _Segment:
    """Directed boundary piece on a sphere: one arc walked with the exposed
    region on its left (the occluding cap on its right)."""

    partner: int
    enter_key: tuple
    exit_key: tuple
    enter_point: np.ndarray
    exit_point: np.ndarray
    extent: float
    cos_cap: float                 # signed cap depth xi_s / r_s
    axis: np.ndarray               # unit vector from this sphere toward partner
    center: np.ndarray             # circle center


def _sphere_segments(balls, cx, s):
    """All boundary arcs on sphere s oriented for the region walk."""
    segments = []
    lone = []
    for key, data in cx.edges.items():
        if s not in key or not data.on_boundary:
            continue
        pg = data.pair
        t = key[0] if key[1] == s else key[1]
        if s == pg.i:
            axis = -pg.u_ij
            xi_s = pg.xi_i
        else:
            axis = pg.u_ij
            xi_s = pg.xi_j
        cos_cap = xi_s / balls.radii[s]
        for arc in data.arcs:
            if arc.full_circle:
                lone.append(cos_cap)
                continue
            if s == pg.i:
                # Stored ccw direction is already clockwise around the axis.
                enter, leave = arc.start, arc.end
            else:
                enter, leave = arc.end, arc.start
            segments.append(_Segment(partner=t,
                                     enter_key=enter.key, exit_key=leave.key,
                                     enter_point=enter.point, exit_point=leave.point,
                                     extent=arc.extent, cos_cap=cos_cap,
                                     axis=axis, center=pg.center))
    return segments, lone


def sigma_i(balls, cx, i):
    """Exposed area fraction of sphere i by spherical Gauss-Bonnet.

    Boundary circuits are walked with the exposed region on the left; each
    circuit contributes the area on its left, and nesting is resolved by
    reducing the total modulo the sphere area.
    """
    vd = cx.vertices.get(i)
    if vd is None or not vd.in_alpha or not vd.on_boundary:
        return 0.0
    segments, lone = _sphere_segments(balls, cx, i)
    if not segments and not lone:
        return 1.0   # whole sphere exposed (boundary flag rules out covered)
    total = 0.0
    for cos_cap in lone:
        total += TWO_PI * (1.0 + cos_cap)
    by_entry = {}
    for seg in segments:
        if seg.enter_key in by_entry:
            raise DegenerateState("more than two arcs meet at a corner",
                                  simplex=seg.enter_key[0])
        by_entry[seg.enter_key] = seg
    unused = set(by_entry)
    r_i = balls.radii[i]
    x_i = balls.centers[i]
    while unused:
        start_key = min(unused)
        circuit = []
        key = start_key
        while True:
            if key not in unused:
                raise DegenerateState("boundary circuit on sphere does not close",
                                      simplex=(i,))
            circuit.append(by_entry[key])
            unused.discard(key)
            key = circuit[-1].exit_key
            if key == start_key:
                break
            if key not in by_entry:
                raise DegenerateState("boundary circuit on sphere does not close",
                                      simplex=(i,))
        area = TWO_PI
        for seg in circuit:
            area += seg.extent * seg.cos_cap
        for seg, nxt in zip(circuit, circuit[1:] + circuit[:1]):
            p = seg.exit_point
            t_in = _cw_tangent(p, seg.center, seg.axis)
            t_out = _cw_tangent(p, nxt.center, nxt.axis)
            normal = (p - x_i) / r_i
            turn = math.atan2(float(normal @ np.cross(t_in, t_out)),
                              float(t_in @ t_out))
            area -= turn
        total += area
    # Each circuit contributes the solid angle on its left; nested circuits
    # overshoot by full spheres, which the modulus removes.
    return (total % FOUR_PI) / FOUR_PI


def _cw_tangent(p, center, axis):
    """Unit tangent of the cap circle at p, clockwise around the cap axis."""
    t = np.cross(p - center, axis)
    return t / np.linalg.norm(t)


def nu_i_mc(balls, i, samples, seed):
    """Monte Carlo estimate of the Voronoi volume fraction of ball i.

    Uniform samples in the ball are tested for power minimality.  Streams
    are keyed per (seed, ball, block), so any chunking of the work yields
    the identical estimate.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    inside = 0
    done = 0
    block_idx = 0
    while done < samples:
        count = min(_MC_BLOCK, samples - done)
        pts = _ball_block(balls, i, seed, block_idx, count)
        pows = _powers(balls, pts)
        own = pows[:, i]
        others = np.delete(pows, i, axis=1)
        if others.size:
            inside += int(np.sum(own <= others.min(axis=1)))
        else:
            inside += count
        done += count
        block_idx += 1
    p_hat = inside / samples
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return p_hat, std_err


def _ball_block(balls, i, seed, block_idx, count):
    # Separate substreams for directions and radii keep every sample a pure
    # function of (seed, ball, block, index), whatever the block is cut to.
    base = 2 * (i * (1 << 20) + block_idx)
    gen_v = Generator(Philox(key=np.uint64(seed)).jumped(base))
    gen_u = Generator(Philox(key=np.uint64(seed)).jumped(base + 1))
    v = gen_v.normal(size=(count, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    u = gen_u.random(count) ** (1.0 / 3.0)
    return balls.centers[i] + balls.radii[i] * (u[:, None] * v)


def _powers(balls, pts):
    d = pts[:, None, :] - balls.centers[None, :, :]
    return np.einsum("pij,pij->pi", d, d) - balls.radii[None, :] ** 2


def compute_measures(balls, cx, mc_samples=0, seed=0):
    """All fractional measures of the boundary simplices of the complex."""
    out = FractionalMeasures()
    for i in cx.boundary_vertices():
        out.sigma_v[i] = sigma_i(balls, cx, i)
    for e, data in sorted(cx.edges.items()):
        if data.in_alpha:
            out.sigma_e[e] = sigma_ij(balls, cx, e)
    for t, data in sorted(cx.triangles.items()):
        if data.in_alpha:
            out.sigma_t[t] = 0.5 * data.exposed_count
            out.nu_t[t] = data.nu
    if mc_samples:
        for i in range(balls.n):
            out.nu_v[i] = nu_i_mc(balls, i, mc_samples, seed)
    return out
