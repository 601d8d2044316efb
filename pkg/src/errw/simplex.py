"""Geometry and spectral analysis on the 2-simplex for the triangle walk.

Points live in the closed simplex {(x, y, z) : x + y + z = 1, coords >= 0}.
Tangent vectors live in the plane L = {u + v + w = 0}. All vector norms here
are l1 norms. Indices are 1-based (1, 2, 3) with cyclic successor/predecessor;
internally coordinates are plain 0-based tuples.
"""

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]
Mat3 = tuple[Vec3, Vec3, Vec3]

VERTEX_TOL = 1e-12
BOUNDARY_TOL = 1e-12
DEGENERATE_TOL = 1e-12

VERTICES: tuple[Vec3, Vec3, Vec3] = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

# vertices of the unit l1-ball intersected with L; extreme points for the
# operator norm on the tangent plane
HEXAGON: tuple[Vec3, ...] = (
    (0.5, -0.5, 0.0), (-0.5, 0.5, 0.0),
    (0.5, 0.0, -0.5), (-0.5, 0.0, 0.5),
    (0.0, 0.5, -0.5), (0.0, -0.5, 0.5),
)


class VertexPoint(ValueError):
    """Point coincides with a simplex vertex where the dynamics is undefined."""


class NotBoundary(ValueError):
    """Point is not on the simplex boundary (no coordinate is zero)."""


class DegenerateBasis(ValueError):
    """Eigenvector pair too close to collinear to solve for coordinates."""


def idx_next(i: int) -> int:
    """Cyclic successor on {1, 2, 3}."""
    return i % 3 + 1


def idx_prev(i: int) -> int:
    """Cyclic predecessor on {1, 2, 3}."""
    return (i - 2) % 3 + 1


def l1(v) -> float:
    return abs(v[0]) + abs(v[1]) + abs(v[2])


def check_simplex(p, tol: float = 1e-9) -> None:
    if min(p) < -tol or abs(p[0] + p[1] + p[2] - 1.0) > tol:
        raise ValueError(f"not a simplex point: {p!r}")


def is_vertex(p, tol: float = VERTEX_TOL) -> bool:
    return max(p) >= 1.0 - tol


def transition_matrix(p) -> Mat3:
    """Column-stochastic movement matrix with zero diagonal.

    Entry (i, j), i != j, is p_k / (p_i + p_k) where k is the third index:
    the chance a particle at state j moves to i rather than to k, when the
    two choices are weighted by the opposite coordinates.
    """
    check_simplex(p)
    if is_vertex(p):
        raise VertexPoint(f"transition matrix undefined at vertex: {p!r}")
    m = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            m[i][j] = p[k] / (p[i] + p[k])
    return (tuple(m[0]), tuple(m[1]), tuple(m[2]))


def mat_vec(m: Mat3, v) -> Vec3:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def equilibrium_q(p) -> Vec3:
    """Unique eigenvalue-1 distribution of the movement matrix: (1 - p) / 2."""
    check_simplex(p)
    return ((1.0 - p[0]) / 2.0, (1.0 - p[1]) / 2.0, (1.0 - p[2]) / 2.0)


def eigenvalue_product(p) -> float:
    """Product of the two non-unit eigenvalues: 2xyz / ((x+y)(x+z)(y+z))."""
    x, y, z = p
    return 2.0 * x * y * z / ((x + y) * (x + z) * (y + z))


def eigenvalues(p) -> tuple[float, float]:
    """Non-unit eigenvalues (lambda0, lambda_minus1), lambda0 >= lambda_minus1.

    They solve t^2 + t + d = 0 with d the eigenvalue product, so their sum is
    -1; d lies in [0, 1/4] and both roots are real.
    """
    d = eigenvalue_product(p)
    disc = max(1.0 - 4.0 * d, 0.0)
    r = math.sqrt(disc)
    return (-1.0 + r) / 2.0, (-1.0 - r) / 2.0


@dataclass(frozen=True)
class SpectralData:
    """Eigen decomposition of the movement matrix at one simplex point.

    Eigenvectors are l1-normalized. e_plus1 is the stationary distribution,
    e0 and e_minus1 span the tangent plane L.
    """
    lambda0: float
    lambda_minus1: float
    e_plus1: Vec3
    e0: Vec3
    e_minus1: Vec3


def _null_vector(m: Mat3, lam: float) -> Vec3 | None:
    """Best null vector of (m - lam*I) from cross products of row pairs."""
    a = [[m[i][j] - (lam if i == j else 0.0) for j in range(3)] for i in range(3)]
    best, best_norm = None, 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        r, s = a[i], a[j]
        c = (r[1] * s[2] - r[2] * s[1], r[2] * s[0] - r[0] * s[2], r[0] * s[1] - r[1] * s[0])
        n = l1(c)
        if n > best_norm:
            best, best_norm = c, n
    if best is None or best_norm < 1e-13:
        return None
    return (best[0] / best_norm, best[1] / best_norm, best[2] / best_norm)


def _orient_e0(e: Vec3, p) -> Vec3:
    # positive coordinate at index next(argmin p); continuous on each edge
    # neighborhood (on the edge z=0 this is the first coordinate)
    j = (min(range(3), key=lambda k: p[k]) + 1) % 3
    ref = e[j] if abs(e[j]) > 1e-14 else e[max(range(3), key=lambda k: abs(e[k]))]
    if ref < 0.0:
        return (-e[0], -e[1], -e[2])
    return e


def _orient_e_minus1(e: Vec3, p) -> Vec3:
    # negative coordinate at argmin p, matching the boundary closed forms
    j = min(range(3), key=lambda k: p[k])
    ref = e[j] if abs(e[j]) > 1e-14 else e[max(range(3), key=lambda k: abs(e[k]))]
    if ref > 0.0:
        return (-e[0], -e[1], -e[2])
    return e


def eigen_data(p) -> SpectralData:
    """Full spectral data of the movement matrix at an interior or edge point."""
    m = transition_matrix(p)
    lam0, lam1 = eigenvalues(p)
    e0 = _null_vector(m, lam0)
    em = _null_vector(m, lam1)
    if e0 is None or em is None:
        # repeated eigenvalue -1/2: every tangent vector is an eigenvector
        if e0 is None:
            e0 = (0.5, -0.5, 0.0)
        if em is None:
            em = (0.25, 0.25, -0.5)
    return SpectralData(
        lambda0=lam0,
        lambda_minus1=lam1,
        e_plus1=equilibrium_q(p),
        e0=_orient_e0(e0, p),
        e_minus1=_orient_e_minus1(em, p),
    )


def e_minus1_boundary(p) -> Vec3:
    """Closed-form eigenvalue -1 eigenvector on the boundary.

    With one coordinate zero: (y, x, -1)/2 when z = 0, (z, -1, x)/2 when
    y = 0, (-1, z, y)/2 when x = 0. At a vertex, the continuous limit is half
    the difference of the two neighboring vertices.
    """
    check_simplex(p)
    x, y, z = p
    if max(p) >= 1.0 - BOUNDARY_TOL:
        i = max(range(3), key=lambda k: p[k])
        a, b = VERTICES[(i + 1) % 3], VERTICES[(i + 2) % 3]
        return tuple((a[k] - b[k]) / 2.0 for k in range(3))
    if min(p) > BOUNDARY_TOL:
        raise NotBoundary(f"no zero coordinate: {p!r}")
    if z <= BOUNDARY_TOL:
        return (y / 2.0, x / 2.0, -0.5)
    if y <= BOUNDARY_TOL:
        return (z / 2.0, -0.5, x / 2.0)
    return (-0.5, z / 2.0, y / 2.0)


def chi(p) -> float:
    """Minimum of the six pairwise-normalized coordinate ratios.

    Strictly positive exactly in the interior; the tangent-plane operator
    norm of the movement matrix equals 1 - chi.
    """
    check_simplex(p)
    if is_vertex(p):
        raise VertexPoint(f"chi undefined at vertex: {p!r}")
    x, y, z = p
    return min(
        x / (x + y), y / (x + y),
        x / (x + z), z / (x + z),
        y / (y + z), z / (y + z),
    )


def operator_norm_L(p) -> float:
    """l1 operator norm of the movement matrix restricted to the tangent plane.

    Computed by brute force over the extreme points of the unit ball in L
    (the hexagon vertices); agrees with 1 - chi.
    """
    m = transition_matrix(p)
    return max(l1(mat_vec(m, h)) for h in HEXAGON)


def tangent_coords(p, v, data: SpectralData | None = None) -> tuple[float, float]:
    """Coordinates (alpha, beta) of tangent vector v in the (e0, e_minus1) basis.

    Solved with a 2x2 system from the best-conditioned pair of coordinates.
    """
    if data is None:
        data = eigen_data(p)
    e0, em = data.e0, data.e_minus1
    best, best_det = None, 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        det = e0[i] * em[j] - e0[j] * em[i]
        if abs(det) > abs(best_det):
            best, best_det = (i, j), det
    if best is None or abs(best_det) < DEGENERATE_TOL:
        raise DegenerateBasis(f"eigenbasis nearly collinear at {p!r}")
    i, j = best
    alpha = (v[i] * em[j] - v[j] * em[i]) / best_det
    beta = (e0[i] * v[j] - e0[j] * v[i]) / best_det
    return alpha, beta


def ternary_xy(p) -> tuple[float, float]:
    """Planar ternary-plot coordinates: u = y + z/2, w = sqrt(3) z / 2."""
    return p[1] + p[2] / 2.0, math.sqrt(3.0) * p[2] / 2.0
