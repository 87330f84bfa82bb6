"""General-position checking and classification of topological events.

Condition I concerns the dimensions of Voronoi intersections (flips in the
weighted Delaunay mosaic), Condition II the dimensions of sphere
intersections (tangencies).  Violations of II at the surface are where the
curvature gradient jumps; the probe walks a motion path and reports
one-sided gradient limits around flagged states.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .complexes import build_alpha_complex
from .errors import DegenerateState, DegenerateTriple, Unclassifiable
from .geometry import as_momentum, radical_center_2d
from .gradient import gauss_gradient
from .intrinsic import weighted_gauss
from .measures import compute_measures

EVENT_CLASSES = (
    "merge_split_components",
    "close_break_loop",
    "fill_open_tunnel",
    "complete_puncture_shell",
    "start_drown_void",
    "interior_nongeneric",
)


@dataclass(frozen=True)
class Violation:
    condition: str          # "I" or "II"
    simplex: tuple
    residual: float
    event_class: str = None


@dataclass
class DegeneracyReport:
    violations: list
    min_residual: float

    @property
    def generic(self):
        return not self.violations


def general_position_check(balls, cx=None, tol=1e-6):
    """Scan all small tuples for proximity to a general-position violation.

    Residuals are lengths (power gaps are divided by the diagram scale);
    ``min_residual`` over all scanned tuples serves as the distance-to-
    degeneracy metric even when no violation is below ``tol``.
    """
    n = balls.n
    centers, radii = balls.centers, balls.radii
    scale = balls.scale
    violations = []
    min_res = math.inf

    def note(cond, simplex, res, affects_min=True):
        nonlocal min_res
        if affects_min:
            min_res = min(min_res, res)
        if res < tol:
            violations.append(Violation(cond, tuple(simplex), float(res)))

    pair_circle = {}
    for i, j in combinations(range(n), 2):
        d = float(np.linalg.norm(centers[i] - centers[j]))
        res = min(abs(d - (radii[i] + radii[j])), abs(d - abs(radii[i] - radii[j])))
        note("II", (i, j), res)
        pair_circle[(i, j)] = abs(radii[i] - radii[j]) < d < radii[i] + radii[j]

    corner_points = {}
    for tri in combinations(range(n), 3):
        if not all(pair_circle[p] for p in combinations(tri, 2)):
            continue
        try:
            z, axis = radical_center_2d(balls.ball(tri[0]), balls.ball(tri[1]),
                                        balls.ball(tri[2]))
        except DegenerateTriple:
            note("I", tri, 0.0)
            continue
        h_sq = radii[tri[0]] ** 2 - float(np.dot(z - centers[tri[0]], z - centers[tri[0]]))
        # The discriminant h^2 is the smooth residual of the two-point
        # intersection folding away; state-space distance scales with it.
        note("II", tri, abs(h_sq) / scale)
        if h_sq > 0:
            h = math.sqrt(h_sq)
            corner_points[tri] = (z + h * axis, z - h * axis)

    for tri, points in corner_points.items():
        for p in points:
            gaps = np.sqrt(np.einsum("ij,ij->i", centers - p, centers - p)) - radii
            for m in range(n):
                if m in tri:
                    continue
                note("II", tuple(sorted(tri + (m,))), abs(float(gaps[m])))

    for quad in combinations(range(n), 4):
        if not all(pair_circle[p] for p in combinations(quad, 2)):
            continue
        xi = centers[quad[0]]
        rows = 2.0 * (centers[list(quad[1:])] - xi)
        rhs = (np.einsum("ij,ij->i", centers[list(quad[1:])], centers[list(quad[1:])])
               - radii[list(quad[1:])] ** 2 - xi @ xi + radii[quad[0]] ** 2)
        det = np.linalg.det(rows)
        row_scale = np.prod(np.linalg.norm(rows, axis=1))
        coplanarity = abs(det) / max(row_scale, 1e-300) * scale
        # Flattening tets matter only when the quad is locally Delaunay, so
        # a small determinant is reported but kept out of the metric.
        note("I", quad, coplanarity, affects_min=False)
        if abs(det) < 1e-12 * max(row_scale, 1e-300):
            continue
        z = np.linalg.solve(rows, rhs)
        pows = np.einsum("ij,ij->i", centers - z, centers - z) - radii ** 2
        others = [m for m in range(n) if m not in quad]
        if not others:
            continue
        gaps = pows[others] - pows[quad[0]]
        m = others[int(np.argmin(np.abs(gaps)))]
        gap = float(np.min(np.abs(gaps))) / (2.0 * scale)
        # Only a tie in the minimal power changes the mosaic.
        if pows[quad[0]] <= pows.min() + tol * 2.0 * scale:
            note("I", quad + (m,), gap)

    return DegeneracyReport(violations=violations, min_residual=float(min_res))


# -- simplicial homology over GF(2) ---------------------------------------

def _gf2_rank(rows):
    rank = 0
    pivots = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
            rank += 1
    return rank


def betti_numbers(cx):
    """(b0, b1, b2) of the alpha complex, hence of the ball union."""
    verts = sorted(v for v, d in cx.vertices.items() if d.in_alpha)
    edges = sorted(e for e, d in cx.edges.items() if d.in_alpha)
    tris = sorted(t for t, d in cx.triangles.items() if d.in_alpha)
    tets = sorted(t for t, d in cx.tetrahedra.items() if d.in_alpha)
    v_idx = {v: m for m, v in enumerate(verts)}
    e_idx = {e: m for m, e in enumerate(edges)}
    t_idx = {t: m for m, t in enumerate(tris)}
    d1 = [(1 << v_idx[e[0]]) | (1 << v_idx[e[1]]) for e in edges]
    d2 = []
    for t in tris:
        row = 0
        for e in combinations(t, 2):
            row |= 1 << e_idx[tuple(sorted(e))]
        d2.append(row)
    d3 = []
    for q in tets:
        row = 0
        for t in combinations(q, 3):
            row |= 1 << t_idx[tuple(sorted(t))]
        d3.append(row)
    r1 = _gf2_rank(d1)
    r2 = _gf2_rank(d2)
    r3 = _gf2_rank(d3)
    b0 = len(verts) - r1
    b1 = len(edges) - r1 - r2
    b2 = len(tris) - r2 - r3
    return b0, b1, b2


def classify_event(balls, cx, violation, delta=None):
    """Name the topological event of a Condition II violation.

    The touching point is located, tested against the rest of the diagram,
    and the Betti numbers on the two sides of the crossing decide between
    the event types of the violating tuple size.
    """
    if violation.condition != "II":
        raise Unclassifiable("only Condition II events change the surface")
    simplex = tuple(violation.simplex)
    centers, radii = balls.centers, balls.radii
    scale = balls.scale
    delta = delta if delta is not None else 1e-3 * scale

    if len(simplex) == 2:
        i, j = simplex
        u = centers[j] - centers[i]
        d = np.linalg.norm(u)
        u = u / d
        point = centers[i] + radii[i] * u
        mover, direction = j, u
    elif len(simplex) == 3:
        try:
            point, _ = radical_center_2d(balls.ball(simplex[0]), balls.ball(simplex[1]),
                                         balls.ball(simplex[2]))
        except DegenerateTriple as exc:
            raise Unclassifiable(str(exc)) from exc
        mover = simplex[2]
        direction = centers[mover] - point
        nd = np.linalg.norm(direction)
        if nd < 1e-12 * scale:
            raise Unclassifiable("degenerate separation direction")
        direction = direction / nd
    elif len(simplex) == 4:
        point, mover, direction = _closest_corner(balls, simplex)
    else:
        raise Unclassifiable(f"unsupported tuple size {len(simplex)}")

    gaps = np.sqrt(np.einsum("ij,ij->i", centers - point, centers - point)) - radii
    others = [m for m in range(balls.n) if m not in simplex]
    if others and float(gaps[others].min()) < -1e-9 * scale:
        return "interior_nongeneric"

    try:
        before, after = [], []
        for sign in (-1.0, 1.0):
            c = centers.copy()
            c[mover] = c[mover] + sign * delta * direction
            side = build_alpha_complex(type(balls)(c, radii, balls.weights),
                                       strict=False)
            (before if sign < 0 else after).append(betti_numbers(side))
        (b0a, b1a, b2a), (b0b, b1b, b2b) = before[0], after[0]
    except DegenerateState as exc:
        raise Unclassifiable(str(exc)) from exc

    if len(simplex) == 2:
        if b0a != b0b:
            return "merge_split_components"
        if b1a != b1b:
            return "close_break_loop"
    elif len(simplex) == 3:
        if b1a != b1b:
            return "fill_open_tunnel"
        if b2a != b2b:
            return "complete_puncture_shell"
    else:
        if b2a != b2b:
            return "start_drown_void"
    return "interior_nongeneric"


def _closest_corner(balls, quad):
    """Corner of some sub-triple of the quad lying on the fourth sphere."""
    best = None
    for tri in combinations(quad, 3):
        m = next(v for v in quad if v not in tri)
        try:
            z, axis = radical_center_2d(balls.ball(tri[0]), balls.ball(tri[1]),
                                        balls.ball(tri[2]))
        except DegenerateTriple:
            continue
        h_sq = balls.radii[tri[0]] ** 2 - float(np.dot(z - balls.centers[tri[0]],
                                                       z - balls.centers[tri[0]]))
        if h_sq <= 0:
            continue
        for p in (z + math.sqrt(h_sq) * axis, z - math.sqrt(h_sq) * axis):
            gap = abs(np.linalg.norm(p - balls.centers[m]) - balls.radii[m])
            if best is None or gap < best[0]:
                direction = balls.centers[m] - p
                nd = np.linalg.norm(direction)
                if nd == 0.0:
                    continue
                best = (gap, p, m, direction / nd)
    if best is None:
        raise Unclassifiable("no corner of the quad lies near the fourth sphere")
    return best[1], best[2], best[3]


# -- gradient probe along a motion path ------------------------------------

@dataclass(frozen=True)
class ProbeRow:
    tau: float
    gauss: float = None
    grad_norm: float = None
    defined: bool = False
    note: str = ""


@dataclass(frozen=True)
class SideLimits:
    tau: float
    grad_minus: np.ndarray
    grad_plus: np.ndarray

    @property
    def max_gap(self):
        return float(np.abs(self.grad_minus - self.grad_plus).max())


@dataclass
class ProbeResult:
    rows: list
    flagged: list = field(default_factory=list)
    limits: list = field(default_factory=list)


def _evaluate(balls):
    cx = build_alpha_complex(balls)
    m = compute_measures(balls, cx)
    k, _ = weighted_gauss(balls, cx, m)
    g = gauss_gradient(balls, cx, m)
    return k, g


def gradient_jump_probe(balls, t, tau_range, steps, side_delta=None):
    """Sample curvature and gradient along the path x + tau * t.

    States where the evaluation raises DegenerateState are flagged, and the
    gradient is re-evaluated a small offset to either side of each flagged
    tau to expose one-sided limits.
    """
    t = as_momentum(t, balls.n)
    tau_min, tau_max = map(float, tau_range)
    if steps < 2:
        raise ValueError("steps must be >= 2")
    taus = np.linspace(tau_min, tau_max, steps)
    delta = side_delta if side_delta is not None else 1e-4 * (tau_max - tau_min)
    x0 = balls.state
    rows = []
    flagged = []
    limits = []
    for tau in taus:
        state = balls.with_state(x0 + tau * t.ravel())
        try:
            k, g = _evaluate(state)
            rows.append(ProbeRow(tau=float(tau), gauss=k,
                                 grad_norm=float(np.linalg.norm(g.flat)),
                                 defined=True))
        except DegenerateState as exc:
            rows.append(ProbeRow(tau=float(tau), defined=False, note=str(exc)))
            flagged.append(float(tau))
    for tau in flagged:
        try:
            _, g_minus = _evaluate(balls.with_state(x0 + (tau - delta) * t.ravel()))
            _, g_plus = _evaluate(balls.with_state(x0 + (tau + delta) * t.ravel()))
        except DegenerateState:
            continue
        limits.append(SideLimits(tau=tau, grad_minus=g_minus.per_ball,
                                 grad_plus=g_plus.per_ball))
    return ProbeResult(rows=rows, flagged=flagged, limits=limits)
