"""Alpha complex of a weighted ball set, built by direct nerve tests.

Candidate simplices are accepted by checking the defining condition
directly: the clipped ball pieces B_i cap V_i of the member balls must have
a common point.  At desk scale (n up to ~100) this brute-force route is
simpler and more transparent than incremental flipping, and it yields the
boundary bookkeeping (exposed circle arcs with their terminating corners)
as a byproduct of the same clipping.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import CoincidentCenters, DegenerateState, DegenerateTriple
from .geometry import EPS_GEO, TripleGeometry, pair_geometry, triple_geometry

TWO_PI = 2.0 * math.pi
_INF = float("inf")


def plane_basis(u):
    """Orthonormal (e1, e2) spanning the plane normal to u, with e1 x e2 = u."""
    a = np.zeros(3)
    a[int(np.argmin(np.abs(u)))] = 1.0
    e1 = np.cross(a, u)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return e1, e2


@dataclass(frozen=True)
class CornerRef:
    """A corner point terminating an exposed arc.

    ``triangle`` is the sorted index triple whose spheres meet at the point,
    ``tag`` identifies which of the two intersection points it is (+1 for
    the point on the positive side of the sorted triple's center plane),
    and ``occluder`` is the third ball as seen from the arc's edge.
    """

    triangle: tuple
    tag: int
    occluder: int
    point: np.ndarray
    angle: float

    @property
    def key(self):
        return (self.triangle, self.tag)


@dataclass(frozen=True)
class Arc:
    """Exposed arc of a circle S_ij, in ccw angular parametrization."""

    edge: tuple
    alpha_start: float
    alpha_end: float               # alpha_start + extent, may exceed 2*pi
    extent: float
    start: CornerRef = None        # None for a full circle
    end: CornerRef = None

    @property
    def full_circle(self):
        return self.start is None


@dataclass
class VertexData:
    index: int
    in_alpha: bool = False
    on_boundary: bool = False


@dataclass
class EdgeData:
    pair: object
    e1: np.ndarray = None
    e2: np.ndarray = None
    in_alpha: bool = False
    on_boundary: bool = False
    arcs: list = field(default_factory=list)
    covered: list = field(default_factory=list)   # (start, extent, occluder, refs)
    covered_measure: float = 0.0
    fully_covered: bool = False
    incident_triangles: list = field(default_factory=list)
    gap_count: int = 0


@dataclass
class TriangleData:
    triple: object                 # TripleGeometry in sorted orientation
    in_alpha: bool = False
    on_boundary: bool = False
    nu: float = 0.0                # exposed fraction of the corner segment
    exposed_plus: bool = False
    exposed_minus: bool = False

    @property
    def exposed_count(self):
        return int(self.exposed_plus) + int(self.exposed_minus)


@dataclass
class TetData:
    orthocenter: np.ndarray
    in_alpha: bool = False


@dataclass(frozen=True)
class EulerData:
    chi_alpha: int
    chi_surface: int


class AlphaComplex:
    """Simplices of the alpha complex with boundary structure.

    ``degeneracies`` lists (condition, simplex, residual) records for
    near-violations of general position found during construction.
    """

    def __init__(self, balls, eps=EPS_GEO):
        self.balls = balls
        self.eps = eps
        self.tol = eps * balls.scale
        self.vertices = {}
        self.edges = {}
        self.triangles = {}
        self.tetrahedra = {}
        self.degeneracies = []
        self.condition2_margin = _INF   # cheapest distance-to-tangency seen
        self._pairs = {}
        self._triples = {}
        self._triple_raw = {}     # key -> (center, axis, h_sq)

    # -- cached elementary geometry -------------------------------------

    def pair(self, i, j):
        key = (i, j) if i < j else (j, i)
        pg = self._pairs.get(key)
        if pg is None:
            pg = pair_geometry(self.balls.ball(key[0]), self.balls.ball(key[1]),
                               key[0], key[1], self.eps)
            self._pairs[key] = pg
        return pg

    def triple(self, i, j, k):
        key = tuple(sorted((i, j, k)))
        if key in self._triples:
            return self._triples[key]
        raw = self._triple_raw.get(key)
        if raw is not None:
            center, axis, h_sq = raw
            tg = self._triple_from_raw(key, center, axis, h_sq)
        else:
            try:
                tg = triple_geometry(self.balls.ball(key[0]), self.balls.ball(key[1]),
                                     self.balls.ball(key[2]), *key, eps=self.eps)
            except DegenerateTriple:
                tg = None
        self._triples[key] = tg
        return tg

    def _triple_from_raw(self, key, center, axis, h_sq):
        if h_sq <= self.tol * self.balls.scale:
            return None
        h = math.sqrt(h_sq)
        p_plus = center + h * axis
        p_minus = center - h * axis
        blls = [self.balls.ball(m) for m in key]
        return TripleGeometry(i=key[0], j=key[1], k=key[2], center=center,
                              half_length=h, axis=axis, p_plus=p_plus,
                              p_minus=p_minus,
                              normals_plus=tuple((p_plus - b.center) / b.radius
                                                 for b in blls),
                              normals_minus=tuple((p_minus - b.center) / b.radius
                                                  for b in blls))

    # -- queries ---------------------------------------------------------

    def alpha_simplices(self):
        """All in-alpha simplices as sorted index tuples."""
        out = [(v,) for v, d in self.vertices.items() if d.in_alpha]
        out += [e for e, d in self.edges.items() if d.in_alpha]
        out += [t for t, d in self.triangles.items() if d.in_alpha]
        out += [t for t, d in self.tetrahedra.items() if d.in_alpha]
        return out

    def boundary_vertices(self):
        return sorted(v for v, d in self.vertices.items() if d.on_boundary)

    def boundary_edges(self):
        return sorted(e for e, d in self.edges.items() if d.on_boundary)

    def boundary_triangles(self):
        return sorted(t for t, d in self.triangles.items() if d.on_boundary)

    def require_generic(self):
        if self.degeneracies:
            cond, simplex, residual = min(self.degeneracies, key=lambda r: r[2])
            raise DegenerateState(
                f"state violates Condition {cond} at simplex {simplex} "
                f"(residual {residual:.3e})", simplex=simplex, residual=residual)


def build_alpha_complex(balls, eps=EPS_GEO, strict=True):
    """Construct the alpha complex with boundary arcs and corner exposure.

    With ``strict`` the construction raises DegenerateState when the state
    is within tolerance of a general-position violation; diagnostics passes
    strict=False to obtain the report instead.
    """
    cx = AlphaComplex(balls, eps)
    _check_pair_degeneracies(cx)
    _build_vertices(cx)
    _build_edges(cx)
    _build_triangles(cx)
    _build_tetrahedra(cx)
    _close_faces(cx)
    _build_arcs(cx)
    _mark_boundary_vertices(cx)
    _cyclic_gaps(cx)

    if strict:
        cx.require_generic()
    return cx


def euler(cx):
    """Euler characteristics of the alpha complex and of the surface."""
    v = sum(1 for d in cx.vertices.values() if d.in_alpha)
    e = sum(1 for d in cx.edges.values() if d.in_alpha)
    f = sum(1 for d in cx.triangles.values() if d.in_alpha)
    t = sum(1 for d in cx.tetrahedra.values() if d.in_alpha)
    chi = v - e + f - t
    return EulerData(chi_alpha=chi, chi_surface=2 * chi)


def boundary_arcs(cx, edge):
    """Exposed arcs of the circle S_ij, empty when fully occluded."""
    key = tuple(sorted(edge))
    data = cx.edges.get(key)
    if data is None:
        return []
    return list(data.arcs)


# -- construction helpers ------------------------------------------------

def _power_row(balls, p):
    """Power distance of point p to every ball."""
    d = balls.centers - p
    return np.einsum("ij,ij->i", d, d) - balls.radii ** 2


def _check_pair_degeneracies(cx):
    """Pairwise distances, tangency residuals and the circle-pair mask."""
    balls = cx.balls
    n = balls.n
    diff = balls.centers[:, None, :] - balls.centers[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    r_sum = balls.radii[:, None] + balls.radii[None, :]
    r_dif = np.abs(balls.radii[:, None] - balls.radii[None, :])
    gap = np.minimum(np.abs(dist - r_sum), np.abs(dist - r_dif))
    iu, ju = np.triu_indices(n, k=1)
    if iu.size:
        cx.condition2_margin = min(cx.condition2_margin, float(gap[iu, ju].min()))
    close = dist[iu, ju] <= cx.eps * np.maximum(balls.radii[iu], balls.radii[ju])
    if close.any():
        a = int(iu[close][0])
        b = int(ju[close][0])
        raise CoincidentCenters(f"balls {a} and {b} have coincident centers")
    for i, j in zip(iu[gap[iu, ju] < cx.tol], ju[gap[iu, ju] < cx.tol]):
        cx.degeneracies.append(("II", (int(i), int(j)), float(gap[i, j])))
    cx._dist = dist
    cx._circle = (r_dif < dist) & (dist < r_sum)


def _build_vertices(cx):
    balls = cx.balls
    n = balls.n
    for i in range(n):
        pows = _power_row(balls, balls.centers[i])
        if pows[i] <= pows.min() + cx.tol ** 2:
            cx.vertices[i] = VertexData(i, in_alpha=True)
            continue
        # Center outside its own power cell; project onto the cell.
        a_mat, b_vec = _cell_constraints(balls, i)
        dist = _distance_to_polyhedron(balls.centers[i], a_mat, b_vec)
        in_alpha = dist is not None and dist <= balls.radii[i]
        cx.vertices[i] = VertexData(i, in_alpha=bool(in_alpha))


def _cell_constraints(balls, i, exclude=()):
    """Halfspace description of V_i: rows a.x <= b for every other ball."""
    keep = [m for m in range(balls.n) if m != i and m not in exclude]
    xm = balls.centers[keep]
    xi = balls.centers[i]
    a_mat = 2.0 * (xm - xi)
    b_vec = (np.einsum("ij,ij->i", xm, xm) - balls.radii[keep] ** 2
             - xi @ xi + balls.radii[i] ** 2)
    return a_mat, b_vec


def _nearest_feasible(p, cands, a_mat, b_vec, feas_tol):
    """Distance from p to the nearest candidate satisfying A x <= b."""
    if cands.shape[0] == 0:
        return None
    feas = np.all(cands @ a_mat.T <= b_vec + feas_tol, axis=1)
    if not feas.any():
        return None
    diff = cands[feas] - p
    return float(np.sqrt(np.einsum("ij,ij->i", diff, diff).min()))


def _distance_to_polyhedron(p, a_mat, b_vec, tol=1e-12):
    """Distance from p to {x : A x <= b} in R^3, or None when empty.

    The projection of any point onto a nonempty closed polyhedron lies on a
    face, edge or vertex of the cell (or is the point itself), so examining
    those candidates is exhaustive.
    """
    m = a_mat.shape[0]
    if m == 0:
        return 0.0
    norms = np.linalg.norm(a_mat, axis=1)
    feas_tol = tol * np.maximum(1.0, np.abs(b_vec)) + 1e-9 * np.maximum(norms, 1e-300)
    if np.all(a_mat @ p <= b_vec + feas_tol):
        return 0.0
    cands = []
    nn = np.einsum("ij,ij->i", a_mat, a_mat)
    good = nn > 0
    if good.any():
        shift = (a_mat[good] @ p - b_vec[good]) / nn[good]
        cands.append(p - shift[:, None] * a_mat[good])
    pairs = np.array(list(combinations(range(m), 2)))
    if pairs.size:
        a1, a2 = a_mat[pairs[:, 0]], a_mat[pairs[:, 1]]
        g11 = np.einsum("ij,ij->i", a1, a1)
        g12 = np.einsum("ij,ij->i", a1, a2)
        g22 = np.einsum("ij,ij->i", a2, a2)
        det = g11 * g22 - g12 ** 2
        ok = det > 1e-20 * np.maximum(g11 * g22, 1e-300)
        if ok.any():
            r1 = a1[ok] @ p - b_vec[pairs[ok, 0]]
            r2 = a2[ok] @ p - b_vec[pairs[ok, 1]]
            l1 = (g22[ok] * r1 - g12[ok] * r2) / det[ok]
            l2 = (g11[ok] * r2 - g12[ok] * r1) / det[ok]
            cands.append(p - l1[:, None] * a1[ok] - l2[:, None] * a2[ok])
    triples = np.array(list(combinations(range(m), 3)))
    if triples.size:
        sub = a_mat[triples]
        det = np.linalg.det(sub)
        ok = np.abs(det) > 1e-12 * np.maximum(
            norms[triples].prod(axis=1), 1e-300)
        if ok.any():
            cands.append(np.linalg.solve(sub[ok], b_vec[triples[ok]][:, :, None])[:, :, 0])
    cands = np.concatenate(cands, axis=0) if cands else np.empty((0, 3))
    return _nearest_feasible(p, cands, a_mat, b_vec, feas_tol)


def _build_edges(cx):
    balls = cx.balls
    n = balls.n
    cand = [(i, j) for i, j in combinations(range(n), 2) if cx._circle[i, j]]
    if not cand:
        return
    pgs = [cx.pair(i, j) for i, j in cand]
    centers = np.stack([pg.center for pg in pgs])
    pows = (np.einsum("eij,eij->ei", centers[:, None, :] - balls.centers[None, :, :],
                      centers[:, None, :] - balls.centers[None, :, :])
            - balls.radii[None, :] ** 2)
    for (i, j), pg, row in zip(cand, pgs, pows):
        if not pg.has_circle:
            continue
        e1, e2 = plane_basis(pg.u_ij)
        data = EdgeData(pair=pg, e1=e1, e2=e2)
        others = np.delete(row, [i, j])
        # Fast path: the circle center already has minimal power.
        if others.size == 0 or row[i] <= others.min() + cx.tol ** 2:
            data.in_alpha = True
        else:
            data.in_alpha = _edge_alpha_slow(cx, i, j, pg, e1, e2)
        if data.in_alpha:
            cx.edges[(i, j)] = data


def _edge_alpha_slow(cx, i, j, pg, e1, e2):
    """Does the intersection disk of B_i and B_j reach V_ij?"""
    balls = cx.balls
    keep = [m for m in range(balls.n) if m not in (i, j)]
    if not keep:
        return True
    xm = balls.centers[keep]
    xi = balls.centers[i]
    a3 = 2.0 * (xm - xi)
    b3 = (np.einsum("ij,ij->i", xm, xm) - balls.radii[keep] ** 2
          - xi @ xi + balls.radii[i] ** 2)
    # Restrict the halfspaces to the radical plane q + s*e1 + t*e2.
    a2 = np.stack([a3 @ e1, a3 @ e2], axis=1)
    b2 = b3 - a3 @ pg.center
    dist = _distance_to_polygon(np.zeros(2), a2, b2)
    return dist is not None and dist <= pg.r


def _distance_to_polygon(p, a_mat, b_vec, tol=1e-12):
    """Distance from p to {x : A x <= b} in R^2, or None when empty."""
    m = a_mat.shape[0]
    if m == 0:
        return 0.0
    norms = np.linalg.norm(a_mat, axis=1)
    feas_tol = tol * np.maximum(1.0, np.abs(b_vec)) + 1e-9 * np.maximum(norms, 1e-300)
    if np.all(a_mat @ p <= b_vec + feas_tol):
        return 0.0
    cands = []
    nn = np.einsum("ij,ij->i", a_mat, a_mat)
    good = nn > 0
    if good.any():
        shift = (a_mat[good] @ p - b_vec[good]) / nn[good]
        cands.append(p - shift[:, None] * a_mat[good])
    pairs = np.array(list(combinations(range(m), 2)))
    if pairs.size:
        a1, a2 = a_mat[pairs[:, 0]], a_mat[pairs[:, 1]]
        det = a1[:, 0] * a2[:, 1] - a1[:, 1] * a2[:, 0]
        ok = np.abs(det) > 1e-14 * np.maximum(
            norms[pairs[:, 0]] * norms[pairs[:, 1]], 1e-300)
        if ok.any():
            b1, b2 = b_vec[pairs[ok, 0]], b_vec[pairs[ok, 1]]
            a1, a2, dt = a1[ok], a2[ok], det[ok]
            x = (b1 * a2[:, 1] - a1[:, 1] * b2) / dt
            y = (a1[:, 0] * b2 - b1 * a2[:, 0]) / dt
            cands.append(np.stack([x, y], axis=1))
    cands = np.concatenate(cands, axis=0) if cands else np.empty((0, 2))
    return _nearest_feasible(p, cands, a_mat, b_vec, feas_tol)


def _build_triangles(cx):
    balls = cx.balls
    n = balls.n
    cand = [t for t in combinations(range(n), 3)
            if cx._circle[t[0], t[1]] and cx._circle[t[0], t[2]]
            and cx._circle[t[1], t[2]]]
    if not cand:
        return
    idx = np.array(cand)
    xi = balls.centers[idx[:, 0]]
    a1 = balls.centers[idx[:, 1]] - xi
    a2 = balls.centers[idx[:, 2]] - xi
    nrm = np.cross(a1, a2)
    area2 = np.linalg.norm(nrm, axis=1)
    collinear = area2 <= (cx.tol) ** 2
    for t in idx[collinear]:
        _note_collinear_triple(cx, tuple(int(v) for v in t))
    keep = ~collinear
    idx = idx[keep]
    if idx.size == 0:
        return
    xi, a1, a2, nrm, area2 = xi[keep], a1[keep], a2[keep], nrm[keep], area2[keep]
    axis = nrm / area2[:, None]
    # Radical center within the plane of centers: equal power to all three.
    sq = np.einsum("ij,ij->i", balls.centers, balls.centers)
    b1 = 0.5 * (sq[idx[:, 1]] - balls.radii[idx[:, 1]] ** 2
                - sq[idx[:, 0]] + balls.radii[idx[:, 0]] ** 2)
    b2 = 0.5 * (sq[idx[:, 2]] - balls.radii[idx[:, 2]] ** 2
                - sq[idx[:, 0]] + balls.radii[idx[:, 0]] ** 2)
    g11 = np.einsum("ij,ij->i", a1, a1)
    g12 = np.einsum("ij,ij->i", a1, a2)
    g22 = np.einsum("ij,ij->i", a2, a2)
    det = g11 * g22 - g12 ** 2
    r1 = b1 - np.einsum("ij,ij->i", a1, xi)
    r2 = b2 - np.einsum("ij,ij->i", a2, xi)
    s = (g22 * r1 - g12 * r2) / det
    t = (g11 * r2 - g12 * r1) / det
    center = xi + s[:, None] * a1 + t[:, None] * a2
    h_sq = balls.radii[idx[:, 0]] ** 2 - np.einsum("ij,ij->i", center - xi, center - xi)
    for row, c, ax, h2 in zip(idx, center, axis, h_sq):
        cx._triple_raw[tuple(int(v) for v in row)] = (c, ax, float(h2))
    # The discriminant h^2 is the smooth residual of the corner pair
    # degenerating; the tolerance band is eps * scale^2.
    band = cx.tol * balls.scale
    cx.condition2_margin = min(cx.condition2_margin,
                               float(np.abs(h_sq).min() / balls.scale))
    live = h_sq > band
    near = np.abs(h_sq) <= band
    for row, h2 in zip(idx[near], h_sq[near]):
        cx.degeneracies.append(("II", tuple(int(v) for v in row),
                                float(abs(h2) / balls.scale)))
    if not live.any():
        return
    idx, center, axis, h_sq = idx[live], center[live], axis[live], h_sq[live]
    half = np.sqrt(h_sq)
    lo, hi, feasible = _voronoi_intervals(cx, idx, center, axis)
    a_clip = np.maximum(lo, -half)
    b_clip = np.minimum(hi, half)
    nu = np.where(feasible & (b_clip > a_clip), (b_clip - a_clip) / (2.0 * half), 0.0)
    in_alpha = nu > 0.0
    p_plus = center + half[:, None] * axis
    p_minus = center - half[:, None] * axis
    exp_plus = _points_exposed(cx, idx, p_plus)
    exp_minus = _points_exposed(cx, idx, p_minus)
    for m in range(idx.shape[0]):
        if not in_alpha[m]:
            continue
        key = tuple(int(v) for v in idx[m])
        tg = cx.triple(*key)
        data = TriangleData(triple=tg, in_alpha=True, nu=float(nu[m]),
                            exposed_plus=bool(exp_plus[m]),
                            exposed_minus=bool(exp_minus[m]))
        data.on_boundary = data.exposed_plus or data.exposed_minus
        cx.triangles[key] = data


def _note_collinear_triple(cx, tri):
    """Collinear centers: parallel radical planes, degenerate only if two
    of them coincide (the Voronoi intersection would gain a dimension)."""
    i, j, k = tri
    u = cx.balls.centers[j] - cx.balls.centers[i]
    u = u / np.linalg.norm(u)
    pos = [float(cx.pair(a, b).center @ u)
           for a, b in ((i, j), (i, k), (j, k))]
    gap = min(abs(pos[0] - pos[1]), abs(pos[0] - pos[2]), abs(pos[1] - pos[2]))
    if gap < cx.tol:
        cx.degeneracies.append(("I", tri, gap))
    cx._triple_raw[tri] = None


def _voronoi_intervals(cx, idx, center, axis):
    """Batched parameter intervals of V_ijk on the radical lines."""
    balls = cx.balls
    n = balls.n
    m_count = idx.shape[0]
    # pi_i(p(s)) - pi_m(p(s)) = inter + s * slope  per (triple, ball m).
    diff = center[:, None, :] - balls.centers[None, :, :]
    pows = np.einsum("tmj,tmj->tm", diff, diff) - balls.radii[None, :] ** 2
    own = pows[np.arange(m_count), idx[:, 0]]
    inter = own[:, None] - pows
    slope = 2.0 * (axis @ balls.centers.T
                   - np.einsum("tj,tj->t", axis, balls.centers[idx[:, 0]])[:, None])
    mask = np.ones((m_count, n), dtype=bool)
    for col in range(3):
        mask[np.arange(m_count), idx[:, col]] = False
    tiny = np.abs(slope) < 1e-300
    infeasible = (mask & tiny & (inter > 0)).any(axis=1)
    bound = np.where(tiny, 0.0, -inter / np.where(tiny, 1.0, slope))
    hi_mask = mask & ~tiny & (slope > 0)
    lo_mask = mask & ~tiny & (slope < 0)
    hi = np.where(hi_mask, bound, _INF).min(axis=1)
    lo = np.where(lo_mask, bound, -_INF).max(axis=1)
    feasible = ~infeasible & (lo <= hi)
    return lo, hi, feasible


def _points_exposed(cx, idx, pts):
    """Which corner points lie outside all non-owner balls (batched)."""
    balls = cx.balls
    m_count = idx.shape[0]
    diff = pts[:, None, :] - balls.centers[None, :, :]
    gap = np.sqrt(np.einsum("tmj,tmj->tm", diff, diff)) - balls.radii[None, :]
    for col in range(3):
        gap[np.arange(m_count), idx[:, col]] = _INF
    nearest = gap.min(axis=1)
    finite = np.isfinite(nearest)
    if finite.any():
        cx.condition2_margin = min(cx.condition2_margin,
                                   float(np.abs(nearest[finite]).min()))
    flag = np.abs(nearest) < cx.tol
    for m in np.nonzero(flag)[0]:
        other = int(np.argmin(gap[m]))
        cx.degeneracies.append(
            ("II", tuple(sorted(tuple(int(v) for v in idx[m]) + (other,))),
             float(abs(nearest[m]))))
    return nearest > 0.0


def _build_tetrahedra(cx):
    balls = cx.balls
    n = balls.n
    circ = cx._circle
    cand = [q for q in combinations(range(n), 4)
            if circ[q[0], q[1]] and circ[q[0], q[2]] and circ[q[0], q[3]]
            and circ[q[1], q[2]] and circ[q[1], q[3]] and circ[q[2], q[3]]]
    if not cand:
        return
    idx = np.array(cand)
    xi = balls.centers[idx[:, 0]]
    rows = 2.0 * (balls.centers[idx[:, 1:]] - xi[:, None, :])
    sq = np.einsum("ij,ij->i", balls.centers, balls.centers)
    rhs = (sq[idx[:, 1:]] - balls.radii[idx[:, 1:]] ** 2
           - (sq[idx[:, 0]] - balls.radii[idx[:, 0]] ** 2)[:, None])
    det = np.linalg.det(rows)
    row_scale = np.maximum(np.prod(np.linalg.norm(rows, axis=2), axis=1), 1e-300)
    flat = np.abs(det) < 1e-12 * row_scale
    for q, dt, sc in zip(idx[flat], det[flat], row_scale[flat]):
        cx.degeneracies.append(("I", tuple(int(v) for v in q), float(abs(dt) / sc)))
    keep = ~flat
    idx = idx[keep]
    if idx.size == 0:
        return
    z = np.linalg.solve(rows[keep], rhs[keep][:, :, None])[:, :, 0]
    diff = z[:, None, :] - balls.centers[None, :, :]
    pows = np.einsum("qmj,qmj->qm", diff, diff) - balls.radii[None, :] ** 2
    q_count = idx.shape[0]
    own = pows[np.arange(q_count), idx[:, 0]]
    masked = pows.copy()
    for col in range(4):
        masked[np.arange(q_count), idx[:, col]] = _INF
    other_min = masked.min(axis=1)
    gap = other_min - own
    near = np.abs(gap) < cx.tol * balls.scale
    for m in np.nonzero(near)[0]:
        # Five balls power-equidistant from the orthocenter: the
        # configuration sits on a flip submanifold.
        fifth = int(np.argmin(masked[m]))
        cx.degeneracies.append(("I", tuple(int(v) for v in idx[m]) + (fifth,),
                                float(abs(gap[m]))))
    in_alpha = (own <= 0.0) & ((other_min >= own) | np.isinf(other_min))
    for m in np.nonzero(in_alpha)[0]:
        cx.tetrahedra[tuple(int(v) for v in idx[m])] = TetData(
            orthocenter=z[m], in_alpha=True)


def _close_faces(cx):
    """Enforce closure of the alpha complex under taking faces."""
    for quad in cx.tetrahedra:
        for tri in combinations(quad, 3):
            if tri not in cx.triangles:
                tg = cx.triple(*tri)
                if tg is not None:
                    cx.triangles[tri] = TriangleData(triple=tg, in_alpha=True)
            else:
                cx.triangles[tri].in_alpha = True
    for tri in cx.triangles:
        for e in combinations(tri, 2):
            if e not in cx.edges:
                pg = cx.pair(*e)
                e1, e2 = plane_basis(pg.u_ij)
                cx.edges[e] = EdgeData(pair=pg, e1=e1, e2=e2, in_alpha=True)
            else:
                cx.edges[e].in_alpha = True
    for e in cx.edges:
        for v in e:
            cx.vertices[v].in_alpha = True


def _build_arcs(cx):
    for (i, j), data in sorted(cx.edges.items()):
        if not data.in_alpha:
            continue
        covered, full = _cover_intervals(cx, i, j, data)
        if full:
            data.arcs = []
            data.covered = covered
            data.covered_measure = TWO_PI
            data.fully_covered = True
            data.on_boundary = False
            continue
        arcs, measure = _assemble_arcs(cx, (i, j), covered)
        data.arcs = arcs
        data.covered = covered
        data.covered_measure = measure
        data.on_boundary = bool(arcs)


def _cover_intervals(cx, i, j, data):
    """Angular intervals of the circle S_ij hidden inside other balls.

    Returns (intervals, fully_covered); each interval carries the two
    corner references of its endpoints.
    """
    balls = cx.balls
    pg = data.pair
    q, rho = pg.center, pg.r
    u, e1, e2 = pg.u_ij, data.e1, data.e2
    out = []
    for m in range(balls.n):
        if m in (i, j):
            continue
        g = balls.centers[m] - q
        g_u = g @ u
        g_perp = g - g_u * u
        b = np.linalg.norm(g_perp)
        rm = balls.radii[m]
        dmin = math.hypot(g_u, b - rho)
        dmax = math.hypot(g_u, b + rho)
        if abs(dmin - rm) < cx.tol or abs(dmax - rm) < cx.tol:
            cx.degeneracies.append(("II", tuple(sorted((i, j, m))),
                                    min(abs(dmin - rm), abs(dmax - rm))))
        if dmin >= rm:
            continue
        if dmax <= rm:
            return [], True
        tg = cx.triple(i, j, m)
        if tg is None:
            # Partial cover with no transversal triple intersection only
            # happens inside the tolerance band; treat as degenerate.
            cx.degeneracies.append(("II", tuple(sorted((i, j, m))), cx.tol))
            continue
        key = tuple(sorted((i, j, m)))
        angles = {}
        for tag, p in ((1, tg.p_plus), (-1, tg.p_minus)):
            rel = p - q
            ang = math.atan2(rel @ e2, rel @ e1) % TWO_PI
            angles[tag] = (ang, p)
        # Covered arc is centered at the in-plane azimuth of the occluder.
        az = math.atan2(g_perp @ e2, g_perp @ e1) % TWO_PI
        a_plus, a_minus = angles[1][0], angles[-1][0]
        span_pm = (a_minus - a_plus) % TWO_PI
        if (az - a_plus) % TWO_PI <= span_pm:
            start_tag, end_tag = 1, -1
        else:
            start_tag, end_tag = -1, 1
        start_ang, start_p = angles[start_tag]
        extent = (angles[end_tag][0] - start_ang) % TWO_PI
        end_p = angles[end_tag][1]
        start_ref = CornerRef(key, start_tag, m, start_p, start_ang)
        end_ref = CornerRef(key, end_tag, m, end_p, (start_ang + extent) % TWO_PI)
        out.append((start_ang, extent, m, start_ref, end_ref))
    return out, False


def _assemble_arcs(cx, edge, covered):
    """Union the covered intervals; the complement gives the exposed arcs.

    Angles are swept relative to the start of the first covered interval,
    which guarantees the sweep begins inside covered territory and no arc
    wraps across the base point.
    """
    if not covered:
        return [Arc(edge=edge, alpha_start=0.0, alpha_end=TWO_PI, extent=TWO_PI)], 0.0
    base = covered[0][0]
    base_start_ref = covered[0][3]
    events = []   # (relative angle, +1 cover starts / -1 cover ends, corner ref)
    depth0 = 0    # covers containing the base angle
    for start, extent, m, start_ref, end_ref in covered:
        s_rel = (start - base) % TWO_PI
        if s_rel == 0.0 or s_rel + extent > TWO_PI:
            depth0 += 1
        if s_rel > 0.0:
            events.append((s_rel, 1, start_ref))
        e_rel = (s_rel + extent) % TWO_PI
        if e_rel == 0.0:
            e_rel = TWO_PI
        events.append((e_rel, -1, end_ref))
    events.sort(key=lambda ev: (ev[0], ev[1]))
    tol_ang = cx.tol / max(cx.edges[edge].pair.r, cx.tol)
    for (a1, d1, r1), (a2, d2, r2) in zip(events, events[1:]):
        if a2 - a1 < tol_ang and r1.occluder != r2.occluder:
            cx.degeneracies.append(
                ("II", tuple(sorted(set(edge) | {r1.occluder, r2.occluder})), a2 - a1))
    depth = depth0
    exposure_start = None     # (relative angle, corner ref)
    arcs_rel = []
    covered_measure = 0.0
    last = 0.0
    for ang, delta, ref in events:
        if depth > 0:
            covered_measure += ang - last
        last = ang
        depth += delta
        if delta == -1 and depth == 0:
            exposure_start = (ang, ref)
        elif delta == 1 and depth == 1 and exposure_start is not None:
            s_ang, s_ref = exposure_start
            arcs_rel.append((s_ang, ang - s_ang, s_ref, ref))
            exposure_start = None
    if exposure_start is not None:
        # Exposure runs to the base angle, where the first cover begins.
        s_ang, s_ref = exposure_start
        arcs_rel.append((s_ang, TWO_PI - s_ang, s_ref, base_start_ref))
    elif depth > 0:
        covered_measure += TWO_PI - last
    arcs = []
    for s_rel, extent, s_ref, e_ref in arcs_rel:
        a0 = (s_rel + base) % TWO_PI
        arcs.append(Arc(edge=edge, alpha_start=a0, alpha_end=a0 + extent,
                        extent=extent, start=s_ref, end=e_ref))
    return arcs, covered_measure


def _mark_boundary_vertices(cx):
    balls = cx.balls
    for i, vd in cx.vertices.items():
        if not vd.in_alpha:
            continue
        incident = [e for e in cx.edges if i in e and cx.edges[e].on_boundary]
        if incident:
            vd.on_boundary = True
            continue
        # No exposed arcs on the sphere: it is entirely exposed or entirely
        # covered, so one test point decides.
        p = balls.centers[i] + balls.radii[i] * np.array([0.0, 0.0, 1.0])
        pows = _power_row(balls, p)
        pows[i] = _INF
        vd.on_boundary = bool(pows.min() >= 0.0)


def _cyclic_gaps(cx):
    """Count arc gaps around each boundary edge from the cyclic fan."""
    for (i, j), data in cx.edges.items():
        tris = sorted(t for t in cx.triangles
                      if cx.triangles[t].in_alpha and i in t and j in t)
        data.incident_triangles = tris
        if not data.on_boundary:
            data.gap_count = 0
            continue
        if not tris:
            data.gap_count = 1
            continue
        angles = []
        for t in tris:
            k = next(v for v in t if v not in (i, j))
            rel = cx.balls.centers[k] - data.pair.center
            ang = math.atan2(rel @ data.e2, rel @ data.e1) % TWO_PI
            angles.append((ang, t, k))
        angles.sort()
        gaps = 0
        for (a1, t1, k1), (a2, t2, k2) in zip(angles, angles[1:] + angles[:1]):
            quad = tuple(sorted({i, j, k1, k2}))
            # A tetrahedron fills only the wedge between its two apexes that
            # subtends less than pi around the edge.
            wedge = (a2 - a1) % TWO_PI
            joined = (len(quad) == 4 and quad in cx.tetrahedra
                      and cx.tetrahedra[quad].in_alpha and wedge < math.pi)
            if not joined:
                gaps += 1
        data.gap_count = gaps
