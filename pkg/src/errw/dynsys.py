"""Deterministic skeleton of the weight/occupation dynamics.

One map step sends (p, q) to ((1-rho) p + rho (1 - q - M_p q), M_p q) on
(simplex minus vertices) x simplex. Fixed points are exactly the pairs
(p, q_[p]) with q_[p] the stationary share at p. Also provides the exact
boundary two-cycle recursion, local eigen-coordinates near an edge, and a
numerical check of the one-step asymptotics in those coordinates.
"""

import math
from dataclasses import dataclass

from . import simplex as sx

UNDERFLOW_SNAP = 1e-300
SIMPLEX_SLACK = 1e-12


class LeftSimplex(ValueError):
    """Perturbed map step produced a point outside the simplex."""


def _clean(p) -> tuple:
    s = p[0] + p[1] + p[2]
    out = []
    for c in p:
        if c < -SIMPLEX_SLACK or c > 1.0 + SIMPLEX_SLACK:
            raise LeftSimplex(f"coordinate out of range: {p!r}")
        out.append(min(max(c, 0.0), 1.0) / s)
    return tuple(out)


def phi_step(p, q, rho: float):
    """One step of the unperturbed map."""
    return phi_step_perturbed(p, q, rho, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


def phi_step_perturbed(p, q, rho: float, s, r):
    """One step with additive perturbations: weight share gets s, occupation gets r."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1): {rho!r}")
    mq = sx.mat_vec(sx.transition_matrix(p), q)
    q_new = tuple(mq[i] + r[i] for i in range(3))
    p_new = tuple((1.0 - rho) * p[i] + rho * (1.0 - q[i] - q_new[i]) + s[i] for i in range(3))
    return _clean(p_new), _clean(q_new)


def orbit(p0, q0, rho: float, n_steps: int, snap: bool = True):
    """Iterate the map; snap weight shares to the boundary on underflow.

    Returns the list of (p, q) pairs including the initial one.
    """
    sx.check_simplex(p0)
    sx.check_simplex(q0)
    p, q = tuple(map(float, p0)), tuple(map(float, q0))
    points = [(p, q)]
    snapped = False
    for _ in range(n_steps):
        p, q = phi_step(p, q, rho)
        if snap and not snapped and 0.0 < min(p) < UNDERFLOW_SNAP:
            p = tuple(0.0 if c < UNDERFLOW_SNAP else c for c in p)
            p = _clean(p)
            snapped = True
        points.append((p, q))
    return points


@dataclass(frozen=True)
class BoundaryOrbit:
    """Exact orbit on one closed edge, with its explicit limits.

    Even and odd occupation iterates converge to the two-cycle
    q_[p*] -/+ amplitude * e_minus1(p*) where amplitude = 2 c0 - 1 is set by
    the initial occupation share at the off-edge vertex.
    """
    edge: int
    points: list
    p_star: tuple
    amplitude: float
    q_limit_even: tuple
    q_limit_odd: tuple


def boundary_orbit(p0, q0, rho: float, n_steps: int) -> BoundaryOrbit:
    """Iterate the closed-form recursion on an edge of the simplex.

    On the canonical edge (third coordinate zero, q = (a, b, c)):
    a' = y c, c' = 1 - c, x' = x + rho (1 - x - a - y c). The off-edge
    occupation flips deterministically between c0 and 1 - c0.
    """
    sx.check_simplex(p0)
    sx.check_simplex(q0)
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1): {rho!r}")
    if sx.is_vertex(p0):
        raise sx.VertexPoint(f"boundary orbit undefined at a vertex: {p0!r}")
    zero = min(range(3), key=lambda k: p0[k])
    if p0[zero] > sx.BOUNDARY_TOL:
        raise sx.NotBoundary(f"no zero coordinate: {p0!r}")
    edge = zero + 1

    # relabel so the zero coordinate is the canonical third one
    fwd = ((zero + 1) % 3, (zero + 2) % 3, zero)
    x = p0[fwd[0]]
    a, b, c = (q0[fwd[k]] for k in range(3))
    c0 = c

    def back(t):
        out = [0.0, 0.0, 0.0]
        for k in range(3):
            out[fwd[k]] = t[k]
        return tuple(out)

    points = [(back((x, 1.0 - x, 0.0)), back((a, b, c)))]
    for _ in range(n_steps):
        y = 1.0 - x
        a_new = y * c
        x = x + rho * (1.0 - x - a - a_new)
        a, c = a_new, 1.0 - c
        b = 1.0 - a - c
        points.append((back((x, 1.0 - x, 0.0)), back((a, b, c))))

    p_star = points[-1][0]
    amp = 2.0 * c0 - 1.0
    q_eq = sx.equilibrium_q(p_star)
    em = sx.e_minus1_boundary(p_star)
    q_even = tuple(q_eq[i] - amp * em[i] for i in range(3))
    q_odd = tuple(q_eq[i] + amp * em[i] for i in range(3))
    return BoundaryOrbit(edge=edge, points=points, p_star=p_star,
                         amplitude=abs(amp), q_limit_even=q_even, q_limit_odd=q_odd)


@dataclass(frozen=True)
class LocalCoords:
    """Edge-local coordinates: majority share x, off-edge share z, eigen coords."""
    x: float
    z: float
    alpha: float
    beta: float


def local_coords(p, q, edge: int = 3) -> LocalCoords:
    """Coordinates of (p, q) relative to the given edge and its eigenbasis."""
    if edge not in (1, 2, 3):
        raise ValueError(f"edge must be 1, 2 or 3, got {edge!r}")
    zero = edge - 1
    data = sx.eigen_data(p)
    q_eq = sx.equilibrium_q(p)
    v = tuple(q[i] - q_eq[i] for i in range(3))
    alpha, beta = sx.tangent_coords(p, v, data)
    return LocalCoords(x=p[(zero + 1) % 3], z=p[zero], alpha=alpha, beta=beta)


def _fit_slope(xs, ys) -> float | None:
    pairs = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if y > 0.0]
    if len(pairs) < 2:
        return None
    mx = sum(p[0] for p in pairs) / len(pairs)
    my = sum(p[1] for p in pairs) / len(pairs)
    num = sum((px - mx) * (py - my) for px, py in pairs)
    den = sum((px - mx) ** 2 for px, py in pairs)
    return num / den if den > 0.0 else None


def verify_newas(rho: float, x: float = 0.5, alpha: float = 0.0, beta: float = 0.25,
                 z_ladder=(1e-2, 1e-3, 1e-4), phase_locked: bool = False) -> dict:
    """Numerical check of the one-step asymptotics near an edge.

    Builds points p = (x, 1-x-z, z), q = q_[p] + alpha e0 + beta e_minus1 on
    a ladder of off-edge shares z, applies one unperturbed map step, and
    reports the remainders against the predicted leading terms together
    with fitted log-log decay exponents.

    With phase_locked=False the generic prediction is beta' = -beta + O(z)
    and z' = z (1 + rho beta) + O(z^2). With phase_locked=True (orbit on the
    edge cycle boundary, amplitude-free case) the refined prediction
    beta' = -beta (1 - (2 - rho) z) is checked instead.
    """
    rows = []
    for z in z_ladder:
        p = (x, 1.0 - x - z, z)
        data = sx.eigen_data(p)
        q_eq = sx.equilibrium_q(p)
        q = tuple(q_eq[i] + alpha * data.e0[i] + beta * data.e_minus1[i] for i in range(3))
        p1, q1 = phi_step(p, q, rho)
        loc = local_coords(p1, q1, edge=3)
        r_z = abs(loc.z - z * (1.0 + rho * beta))
        if phase_locked:
            r_beta = abs(loc.beta + beta * (1.0 - (2.0 - rho) * z))
        else:
            r_beta = abs(loc.beta + beta)
        r_alpha = abs(loc.alpha + (rho / 2.0) * (1.0 - beta) * alpha)
        rows.append({"z": z, "x_hat": loc.x, "z_hat": loc.z,
                     "alpha_hat": loc.alpha, "beta_hat": loc.beta,
                     "r_z": r_z, "r_beta": r_beta, "r_alpha": r_alpha})
    zs = [r["z"] for r in rows]
    return {
        "rho": rho, "x": x, "alpha": alpha, "beta": beta,
        "phase_locked": phase_locked,
        "rows": rows,
        "slope_z": _fit_slope(zs, [r["r_z"] for r in rows]),
        "slope_beta": _fit_slope(zs, [r["r_beta"] for r in rows]),
    }
