"""Analytic gradient of the weighted Gaussian curvature.

The derivative splits into four terms: patch-fraction change (d), arc
fraction change (e), arc angle change (f), and corner quadrangle change
(h).  Each term is assembled per boundary simplex into per-ball gradient
vectors; the scalar directional derivatives are accumulated alongside from
the same coefficients, so scalar and vector views agree up to rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateState, NoIntersection, NonRealizableTriangle
from .geometry import as_momentum, pair_geometry, u_edge
from .sphtri import corner_geometry, quad_area_gradient

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class PairDerivatives:
    """Normal projection length of an intersecting pair and its derivative."""

    lam: float            # xi_i / r_i + xi_j / r_j
    dlam_dd: float        # derivative in the center distance
    d: float
    u_ij: np.ndarray      # unit vector from x_j toward x_i


def lambda_pair(b_i, b_j):
    """Combined projected normal length at a pair intersection."""
    pg = pair_geometry(b_i, b_j)
    if not pg.has_circle:
        raise NoIntersection("spheres do not intersect in a circle")
    ri, rj = b_i.radius, b_j.radius
    lam = pg.xi_i / ri + pg.xi_j / rj
    dlam = (0.5 / ri + 0.5 / rj) - (0.5 / ri - 0.5 / rj) * (ri ** 2 - rj ** 2) / pg.d ** 2
    return PairDerivatives(lam=lam, dlam_dd=dlam, d=pg.d, u_ij=pg.u_ij)


def lambda_derivative(pair, t_i, t_j):
    """Directional derivative of lambda under velocities of the two centers."""
    rel = np.asarray(t_i, dtype=float) - np.asarray(t_j, dtype=float)
    return pair.dlam_dd * float(pair.u_ij @ rel)


@dataclass(frozen=True)
class ArcEndpoint:
    """Motion data of one corner terminating an exposed arc of circle S_ij.

    ``vec_i``, ``vec_j``, ``vec_k`` turn the corner's angular velocity into
    scalar products with the ball velocities: the normal speed of the corner
    against sphere k is <vec_i, t_i> + <vec_j, t_j> + <vec_k, t_k>, and the
    angular velocity follows after division by rho * <x_k - P, tangent>.
    ``tangent`` is oriented into the occluding ball, so the denominator
    ``g_t`` is positive and the endpoint's start/end role is absorbed.
    """

    edge: tuple
    occluder: int
    corner_key: tuple
    point: np.ndarray
    depth_ratio: float        # D = xi_j / d of the ordered edge (i, j)
    tangent: np.ndarray       # u_ij at P, oriented into ball k
    g_t: float                # <x_k - P, tangent>, positive
    dr_dd: float              # d r_ij / d |x_i - x_j|
    dalpha_dr: float          # corner angle change per unit circle radius
    vec_i: np.ndarray
    vec_j: np.ndarray
    vec_k: np.ndarray

    def rate(self, t_i, t_j, t_k):
        return float(self.vec_i @ t_i + self.vec_j @ t_j + self.vec_k @ t_k)


def arc_endpoint_data(balls, cx, edge):
    """ArcEndpoint records for all exposed-arc corners of circle S_ij."""
    key = tuple(sorted(edge))
    data = cx.edges.get(key)
    if data is None or not data.on_boundary:
        return []
    i, j = key
    pg = data.pair
    u = pg.u_ij
    d, rho, q = pg.d, pg.r, pg.center
    depth = pg.xi_j / d
    dr_dd = -pg.xi_i * pg.xi_j / (d * rho)
    out = []
    for arc in data.arcs:
        if arc.full_circle:
            continue
        for ref, s_p in ((arc.start, -1.0), (arc.end, 1.0)):
            k = ref.occluder
            p = ref.point
            g = balls.centers[k] - p
            e_rho = (p - q) / rho
            e_tan = np.cross(u, e_rho)
            g_u = float(g @ u)
            g_rho = float(g @ e_rho)
            g_tan = float(g @ e_tan)
            g_t = s_p * g_tan
            if g_t <= cx.tol:
                raise DegenerateState(
                    "arc endpoint moves tangentially to its sphere",
                    simplex=tuple(sorted((i, j, k))), residual=abs(g_t))
            common = ((1.0 - 2.0 * depth) * g_u + dr_dd * g_rho) * u \
                - (g_u / d) * (p - q)
            vec_i = -depth * g - common
            vec_j = -(1.0 - depth) * g + common
            out.append(ArcEndpoint(edge=key, occluder=k, corner_key=ref.key,
                                   point=p, depth_ratio=depth,
                                   tangent=s_p * e_tan, g_t=g_t, dr_dd=dr_dd,
                                   dalpha_dr=-g_rho / (rho * g_t),
                                   vec_i=vec_i, vec_j=vec_j, vec_k=g))
    return out


def sigma_ij_prime(balls, cx, arcdata, edge, t):
    """Directional derivative of the arc fraction sigma_ij along momentum t."""
    key = tuple(sorted(edge))
    data = cx.edges.get(key)
    if data is None or not data.on_boundary:
        return 0.0
    t = as_momentum(t, balls.n)
    i, j = key
    rho = data.pair.r
    total = 0.0
    for ep in arcdata:
        total += ep.rate(t[i], t[j], t[ep.occluder]) / (TWO_PI * rho * ep.g_t)
    return total


def _cap_endpoint_terms(balls, cx, i, data):
    """Tilt contributions of the arc endpoints on one bounding circle.

    Yields (s_p * tangent) for every corner of the circle's exposed arcs,
    where the tangent runs counterclockwise around the cap axis (from x_i
    toward the partner ball) and s_p marks arc ends (+1) versus starts (-1)
    in that orientation.  Tilting the cap axis by da shifts the exposed
    angular extent by sum of s_p <da, tangent>, which is the corner part of
    the area transport on sphere i.
    """
    pg = data.pair
    own_is_i = (i == pg.i)
    axis = -pg.u_ij if own_is_i else pg.u_ij
    for arc in data.arcs:
        if arc.full_circle:
            continue
        for ref, s_ccw_u in ((arc.start, -1.0), (arc.end, 1.0)):
            s_p = -s_ccw_u if own_is_i else s_ccw_u
            tangent = np.cross(axis, ref.point - pg.center)
            tangent /= np.linalg.norm(tangent)
            yield s_p * tangent


def sigma_i_prime(balls, cx, measures, i, t):
    """Directional derivative of the exposed area fraction of sphere i.

    Each bounding circle contributes the normal advance of its cap (depth
    change) plus the swing of its exposed arcs as the cap axis tilts; the
    latter is accumulated per arc endpoint.
    """
    t = as_momentum(t, balls.n)
    r_i = balls.radii[i]
    total = 0.0
    for (a, b), data in sorted(cx.edges.items()):
        if not data.on_boundary or i not in (a, b):
            continue
        j = b if a == i else a
        pg = data.pair
        sig = measures.sigma_edge((a, b))
        uij = u_edge(balls, i, j)
        rel = t[i] - t[j]
        coef = (sig / (4.0 * r_i)) * (1.0 - (r_i ** 2 - balls.radii[j] ** 2) / pg.d ** 2)
        total += coef * float(uij @ rel)
        swing = pg.r / (FOUR_PI * r_i * pg.d)
        for tang in _cap_endpoint_terms(balls, cx, i, data):
            total -= swing * float(tang @ rel)
    return total


def term_d(balls, cx, measures, t=None):
    """Patch term: 4*pi sum of w_i sigma_i'."""
    n = balls.n
    vec = np.zeros((n, 3))
    scalar = 0.0
    t = as_momentum(t, n) if t is not None else None
    w = balls.weights
    for (i, j), data in sorted(cx.edges.items()):
        if not data.on_boundary:
            continue
        pg = data.pair
        sig = measures.sigma_edge((i, j))
        for a, b in ((i, j), (j, i)):
            r_a = balls.radii[a]
            c1 = math.pi * w[a] * sig / r_a * (
                1.0 - (r_a ** 2 - balls.radii[b] ** 2) / pg.d ** 2)
            uab = u_edge(balls, a, b)
            vec[a] += c1 * uab
            vec[b] -= c1 * uab
            if t is not None:
                scalar += c1 * float(uab @ (t[a] - t[b]))
            c2 = w[a] * pg.r / (r_a * pg.d)
            for tang in _cap_endpoint_terms(balls, cx, a, data):
                vec[a] -= c2 * tang
                vec[b] += c2 * tang
                if t is not None:
                    scalar -= c2 * float(tang @ (t[a] - t[b]))
    return (scalar if t is not None else None), vec


def term_e(balls, cx, t=None):
    """Arc-fraction term: -pi sum of (w_i + w_j) lambda_ij sigma_ij'."""
    n = balls.n
    vec = np.zeros((n, 3))
    scalar = 0.0
    t = as_momentum(t, n) if t is not None else None
    w = balls.weights
    for (i, j), data in sorted(cx.edges.items()):
        if not data.on_boundary:
            continue
        lam = lambda_pair(balls.ball(i), balls.ball(j)).lam
        rho = data.pair.r
        for ep in arc_endpoint_data(balls, cx, (i, j)):
            kappa = -(w[i] + w[j]) * lam / (2.0 * rho * ep.g_t)
            vec[i] += kappa * ep.vec_i
            vec[j] += kappa * ep.vec_j
            vec[ep.occluder] += kappa * ep.vec_k
            if t is not None:
                scalar += kappa * ep.rate(t[i], t[j], t[ep.occluder])
    return (scalar if t is not None else None), vec


def term_f(balls, cx, measures, t=None):
    """Arc-angle term: -pi sum of (w_i + w_j) sigma_ij lambda_ij'."""
    n = balls.n
    vec = np.zeros((n, 3))
    scalar = 0.0
    t = as_momentum(t, n) if t is not None else None
    w = balls.weights
    for (i, j), data in sorted(cx.edges.items()):
        if not data.on_boundary:
            continue
        pair = lambda_pair(balls.ball(i), balls.ball(j))
        sig = measures.sigma_edge((i, j))
        cf = -math.pi * (w[i] + w[j]) * sig * pair.dlam_dd
        uij = u_edge(balls, i, j)
        vec[i] += cf * uij
        vec[j] -= cf * uij
        if t is not None:
            scalar += cf * float(uij @ (t[i] - t[j]))
    return (scalar if t is not None else None), vec


def term_h(balls, cx, measures, t=None):
    """Corner term: quadrangle-area derivatives weighted by the ball weights."""
    n = balls.n
    vec = np.zeros((n, 3))
    scalar = 0.0
    t = as_momentum(t, n) if t is not None else None
    w = balls.weights
    for (i, j, k), tdata in sorted(cx.triangles.items()):
        sig = measures.sigma_t.get((i, j, k), 0.0)
        if sig == 0.0:
            continue
        geo = corner_geometry(cx.pair(i, j).cos_phi, cx.pair(j, k).cos_phi,
                              cx.pair(k, i).cos_phi)
        try:
            p, q, s = quad_area_gradient(geo, cx.pair(i, j), cx.pair(j, k),
                                         cx.pair(k, i))
        except NonRealizableTriangle as exc:
            raise DegenerateState(str(exc), simplex=(i, j, k)) from exc
        h_coeffs = [2.0 * sig * (w[i] * p[m] + w[j] * q[m] + w[k] * s[m])
                    for m in range(3)]
        pairs = ((i, j), (j, k), (k, i))
        for (a, b), h_ab in zip(pairs, h_coeffs):
            uab = u_edge(balls, a, b)
            vec[a] += h_ab * uab
            vec[b] -= h_ab * uab
            if t is not None:
                scalar += h_ab * float(uab @ (t[a] - t[b]))
    return (scalar if t is not None else None), vec


@dataclass(frozen=True)
class GaussGradient:
    """Gradient of the weighted Gaussian curvature, with its four parts."""

    d: np.ndarray
    e: np.ndarray
    f: np.ndarray
    h: np.ndarray

    @property
    def per_ball(self):
        return self.d + self.e + self.f + self.h

    @property
    def flat(self):
        return self.per_ball.ravel()

    @property
    def n(self):
        return self.d.shape[0]


def gauss_gradient(balls, cx, measures):
    """Assemble the full gradient G with G_i = d_i + e_i + f_i + h_i."""
    _, vec_d = term_d(balls, cx, measures)
    _, vec_e = term_e(balls, cx)
    _, vec_f = term_f(balls, cx, measures)
    _, vec_h = term_h(balls, cx, measures)
    return GaussGradient(d=vec_d, e=vec_e, f=vec_f, h=vec_h)


def directional_derivative(grad, t):
    """Inner product <G, t>."""
    t = as_momentum(t, grad.n)
    return float(np.sum(grad.per_ball * t))
