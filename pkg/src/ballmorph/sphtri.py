"""Spherical trigonometry of normal triangles at ball corners.

A corner of the diagram is split among the three spheres meeting there by
decomposing the spherical triangle of their unit normals into three
quadrangles (circumcenter connected to the side midpoints).  Everything is
parametrized by the squared cosines of the half side-lengths,
a = cos^2(phi_ij / 2) etc., which keeps all formulas rational up to square
roots and makes the derivatives short.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoIntersection, NonRealizableTriangle


def product_of_sines(a, b, c):
    """4abc - (a+b+c-1)^2.

    Equals sin(s) sin(s-phi_ij) sin(s-phi_jk) sin(s-phi_ki) for a spherical
    triangle with half-perimeter s; nonpositive iff the side lengths violate
    a triangle inequality.  Accepts scalars or arrays.
    """
    return 4.0 * a * b * c - (a + b + c - 1.0) ** 2


def _radicand(a, b, c):
    """product_of_sines evaluated in extended precision.

    The expression cancels catastrophically for thin triangles; one extra
    wordsize keeps the area identities tight through the areas' square
    roots.
    """
    al, bl, cl = np.longdouble(a), np.longdouble(b), np.longdouble(c)
    return float(4.0 * al * bl * cl - (al + bl + cl - 1.0) ** 2)


def triangle_area(a, b, c):
    """Area of the spherical triangle with squared half-side cosines a, b, c.

    Lies in (0, 2*pi); areas above pi occur when a + b + c < 1.
    """
    u = _radicand(a, b, c)
    if u <= 0.0:
        raise NonRealizableTriangle(f"product of sines is {u:.3e}")
    t = math.sqrt(min(u / (4.0 * a * b * c), 1.0))
    s = 2.0 * math.asin(t)
    if a + b + c < 1.0:
        s = 2.0 * math.pi - s
    return s


def darea_da(a, b, c):
    """Partial derivative of triangle_area in its first argument."""
    u = product_of_sines(a, b, c)
    if u <= 0.0:
        raise NonRealizableTriangle(f"product of sines is {u:.3e}")
    return (-a + b + c - 1.0) / (a * math.sqrt(u))


def cap_half_radius(a, b, c):
    """cos^2(R/2) for the radius R of the cap through the triangle vertices.

    Always in (1/2, 1): the formula picks the circumcenter with R < pi/2.
    """
    u = _radicand(a, b, c)
    if u <= 0.0:
        raise NonRealizableTriangle(f"product of sines is {u:.3e}")
    v = u + 4.0 * (1.0 - a) * (1.0 - b) * (1.0 - c)
    if v <= 0.0:
        raise NonRealizableTriangle(f"cap denominator is {v:.3e}")
    return 0.5 + 0.5 * math.sqrt(u / v)


def dcap_da(a, b, c):
    """Partial derivative of cap_half_radius in its first argument."""
    u = product_of_sines(a, b, c)
    if u <= 0.0:
        raise NonRealizableTriangle(f"product of sines is {u:.3e}")
    v = u + 4.0 * (1.0 - a) * (1.0 - b) * (1.0 - c)
    if v <= 0.0:
        raise NonRealizableTriangle(f"cap denominator is {v:.3e}")
    return (1.0 - b) * (1.0 - c) * ((a - 1.0) ** 2 - (b - c) ** 2) / (
        math.sqrt(u) * v * math.sqrt(v))


def corner_signs(a, b, c):
    """Orientation signs of the three isosceles cone triangles.

    The sign attached to vertex i is -1 exactly when the circumcenter and
    the vertex lie on opposite sides of the great circle through the other
    two vertices; the boundary case counts as +1.  At most one sign is -1.
    """
    sgm_i = 1 if a + c <= 1.0 + b else -1
    sgm_j = 1 if a + b <= 1.0 + c else -1
    sgm_k = 1 if b + c <= 1.0 + a else -1
    return sgm_i, sgm_j, sgm_k


def _iso_area(x, r):
    """Area of the isosceles triangle with base parameter x and legs r."""
    u = _radicand(x, r, r)
    if u <= 0.0:
        return 0.0
    t = math.sqrt(min(u / (4.0 * x * r * r), 1.0))
    # x + 2r - 1 > 0 because r > 1/2, so the small-area branch always applies.
    return 2.0 * math.asin(t)


def dangle_ddist(r_i, r_j, d):
    """Derivative of the normal angle phi_ij with respect to |x_i - x_j|.

    Simplifies to 1 / r_ij; diverges at tangency.
    """
    w = 2.0 * (r_i ** 2 + r_j ** 2) * d ** 2 - (r_i ** 2 - r_j ** 2) ** 2 - d ** 4
    if w <= 0.0:
        raise NoIntersection(f"spheres at distance {d} do not properly intersect")
    return 2.0 * d / math.sqrt(w)


@dataclass(frozen=True)
class CornerGeometry:
    """Normal spherical triangle of a corner and its quadrangle split.

    Quadrangle areas satisfy quad_i + quad_j + quad_k = area, and the
    fractions alpha sum to one.  ``z`` and the side midpoints are unit
    vectors on the normal sphere; they are populated only when the corner
    was built from explicit normals.
    """

    a: float
    b: float
    c: float
    phi_ij: float
    phi_jk: float
    phi_ki: float
    area: float
    cap_r: float                      # cos^2(R/2) of the circumcap
    cap_radius: float                 # R itself, in (0, pi/2)
    signs: tuple                      # (sgm_i, sgm_j, sgm_k)
    quads: tuple                      # (quad_i, quad_j, quad_k)
    alphas: tuple                     # area fractions, sum to 1
    z: np.ndarray = None              # circumcenter on the unit sphere
    midpoints: tuple = None           # arc midpoints (m_i, m_j, m_k) of sides (jk, ki, ij)
    normals: tuple = None             # (n_i, n_j, n_k)

    @property
    def half_perimeter(self):
        return 0.5 * (self.phi_ij + self.phi_jk + self.phi_ki)


def quadrangle_areas(a, b, c):
    """Split the triangle area into the three vertex quadrangles.

    Returns (quad_i, quad_j, quad_k); their sum equals triangle_area(a,b,c).
    """
    r = cap_half_radius(a, b, c)
    sgm_i, sgm_j, sgm_k = corner_signs(a, b, c)
    iso_a = _iso_area(a, r)   # over side ij, apex at the circumcenter
    iso_b = _iso_area(b, r)   # over side jk
    iso_c = _iso_area(c, r)   # over side ki
    quad_i = 0.5 * (sgm_k * iso_a + sgm_j * iso_c)
    quad_j = 0.5 * (sgm_i * iso_b + sgm_k * iso_a)
    quad_k = 0.5 * (sgm_j * iso_c + sgm_i * iso_b)
    return quad_i, quad_j, quad_k


def corner_geometry(cos_ij, cos_jk, cos_ki, normals=None):
    """Build the corner split from the three normal-angle cosines.

    ``normals``, when given, should be the unit normals (n_i, n_j, n_k) at
    one of the two intersection points; they supply the circumcenter and
    midpoints for cross-checks but do not affect areas.
    """
    a = 0.5 * (1.0 + cos_ij)
    b = 0.5 * (1.0 + cos_jk)
    c = 0.5 * (1.0 + cos_ki)
    area = triangle_area(a, b, c)
    r = cap_half_radius(a, b, c)
    signs = corner_signs(a, b, c)
    quads = quadrangle_areas(a, b, c)
    # Normalizing by the quadrangle sum (equal to the area up to rounding)
    # keeps the fractions summing to one exactly.
    total = quads[0] + quads[1] + quads[2]
    alphas = tuple(q / total for q in quads)
    z = None
    midpoints = None
    if normals is not None:
        n_i, n_j, n_k = (np.asarray(v, dtype=float) for v in normals)
        z = _circumcenter(n_i, n_j, n_k)
        midpoints = (_arc_midpoint(n_j, n_k), _arc_midpoint(n_k, n_i),
                     _arc_midpoint(n_i, n_j))
        normals = (n_i, n_j, n_k)
    return CornerGeometry(a=a, b=b, c=c,
                          phi_ij=math.acos(max(-1.0, min(1.0, cos_ij))),
                          phi_jk=math.acos(max(-1.0, min(1.0, cos_jk))),
                          phi_ki=math.acos(max(-1.0, min(1.0, cos_ki))),
                          area=area, cap_r=r,
                          cap_radius=2.0 * math.acos(min(1.0, math.sqrt(r))),
                          signs=signs, quads=quads, alphas=alphas,
                          z=z, midpoints=midpoints, normals=normals)


def corner_from_normals(n_i, n_j, n_k):
    """Corner split computed directly from three unit normals."""
    n_i = np.asarray(n_i, dtype=float)
    n_j = np.asarray(n_j, dtype=float)
    n_k = np.asarray(n_k, dtype=float)
    return corner_geometry(float(n_i @ n_j), float(n_j @ n_k), float(n_k @ n_i),
                           normals=(n_i, n_j, n_k))


def _circumcenter(n_i, n_j, n_k):
    """Unit vector equidistant from the three normals, on the cap side R < pi/2."""
    # Equal dot products with all three normals means z is orthogonal to
    # both difference vectors.
    nrm = np.cross(n_j - n_i, n_k - n_i)
    nn = np.linalg.norm(nrm)
    if nn == 0.0:
        raise NonRealizableTriangle("normals are coplanar with the origin")
    z = nrm / nn
    # Orient toward the triangle: equal dot products are positive for R < pi/2.
    if z @ (n_i + n_j + n_k) < 0:
        z = -z
    return z


def _arc_midpoint(p, q):
    m = p + q
    nn = np.linalg.norm(m)
    if nn == 0.0:
        raise NonRealizableTriangle("antipodal side endpoints")
    return m / nn


def _iso_derivatives(x, r):
    """d(iso area)/dx and d(iso area)/dr for base parameter x and legs r."""
    u = product_of_sines(x, r, r)
    if u <= 0.0:
        raise NonRealizableTriangle(f"degenerate cone triangle (u={u:.3e})")
    d_dx = (-x + 2.0 * r - 1.0) / (x * math.sqrt(u))
    d_dr = 2.0 * (x - 1.0) / (r * math.sqrt(u))
    return d_dx, d_dr


def quad_area_gradient(corner, pair_ij, pair_jk, pair_ki):
    """Coefficients of the quadrangle-area derivatives under ball motion.

    For the corner of balls (i, j, k) with pair data for its three edges,
    returns three triples (p, q, s), each = (c_ij, c_jk, c_ki), such that

        quad_i' = p[0] <u_ij, t_i - t_j> + p[1] <u_jk, t_j - t_k>
                  + p[2] <u_ki, t_k - t_i>

    and analogously quad_j' with q, quad_k' with s.
    """
    a, b, c = corner.a, corner.b, corner.c
    r = corner.cap_r
    sgm_i, sgm_j, sgm_k = corner.signs

    dr_da = dcap_da(a, b, c)
    dr_db = dcap_da(b, a, c)
    dr_dc = dcap_da(c, a, b)

    # d(squared cosine)/d(angle) = -sin(phi)/2, then d(angle)/d(distance).
    def edge_factor(pair):
        return -0.5 * math.sqrt(max(0.0, 1.0 - pair.cos_phi ** 2))

    if not (pair_ij.has_circle and pair_jk.has_circle and pair_ki.has_circle):
        raise NoIntersection("corner edges must properly intersect")
    da_dd = edge_factor(pair_ij) / pair_ij.r   # dangle_ddist = 1 / r_ij
    db_dd = edge_factor(pair_jk) / pair_jk.r
    dc_dd = edge_factor(pair_ki) / pair_ki.r

    dA_dx, dA_dr = _iso_derivatives(a, r)
    dB_dx, dB_dr = _iso_derivatives(b, r)
    dC_dx, dC_dr = _iso_derivatives(c, r)

    # Derivatives of the three isosceles areas with respect to the three
    # center distances; the base side depends on its own distance both
    # directly and through the cap radius.
    dA = ((dA_dx + dA_dr * dr_da) * da_dd,
          dA_dr * dr_db * db_dd,
          dA_dr * dr_dc * dc_dd)
    dB = (dB_dr * dr_da * da_dd,
          (dB_dx + dB_dr * dr_db) * db_dd,
          dB_dr * dr_dc * dc_dd)
    dC = (dC_dr * dr_da * da_dd,
          dC_dr * dr_db * db_dd,
          (dC_dx + dC_dr * dr_dc) * dc_dd)

    p = tuple(0.5 * (sgm_k * dA[m] + sgm_j * dC[m]) for m in range(3))
    q = tuple(0.5 * (sgm_i * dB[m] + sgm_k * dA[m]) for m in range(3))
    s = tuple(0.5 * (sgm_j * dC[m] + sgm_i * dB[m]) for m in range(3))
    return p, q, s
