"""Transfer-matrix shooting for piecewise-constant potentials with deltas.

A solution is propagated left to right as the state (u, u'): a 2x2 matrix
per constant segment, a derivative kick u' -> u' + sigma*u per vertex.  The
endpoint value u(1) of the solution launched with (u, u')=(0, 1) is an
entire function of lambda whose zeros are the eigenvalues.  Bracketing uses
the interior-zero count of the shooting solution (equal to the number of
eigenvalues below lambda by oscillation theory), so clustered eigenvalues at
large sigma are isolated without a globally fine scan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    ConfigurationError,
    DomainError,
    FlowProblem,
    NumericError,
    PiecewisePotential,
)

PI = math.pi

_SCAN_STEP = PI * PI / 4.0
# Decimal offset so the scan grid (and its dyadic subdivision points) is
# incommensurate with the k^2 pi^2 eigenvalues; a rational-in-pi^2 shift
# would park subdivision points exactly on the constant branch.
_SCAN_SHIFT = 1.2345678906
_CEILING_PER_ROOT = 1e4
_MAX_SUBDIVIDE = 200


@dataclass(frozen=True)
class _Chain:
    """Internal propagation layout: segments plus per-vertex delta strengths.

    Segments may be finer than the problem's edges (potential breakpoints
    split them); ``sigmas[i]`` is the strength at the vertex between segment
    i and i+1, zero at plain breakpoints.
    """

    nodes: np.ndarray    # segment endpoints, nodes[0] = 0, nodes[-1] = 1
    vvals: np.ndarray    # one potential value per segment
    sigmas: np.ndarray   # one strength per interior vertex

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.nodes)


def _chain_from_problem(problem: FlowProblem) -> _Chain:
    # same alignment rule as the collocation assembler: a potential jump
    # strictly inside an edge is a configuration error
    vvals = problem.edge_potentials()
    nodes = np.asarray(problem.nodes)
    sigmas = np.full(len(nodes) - 2, problem.sigma)
    return _Chain(nodes=nodes, vvals=vvals, sigmas=sigmas)


def _chain_with_vertices(
    potential: PiecewisePotential,
    delta_vertices: list[float],
    sigma: float,
) -> _Chain:
    """Chain with deltas at ``delta_vertices`` and silent splits at potential
    breakpoints."""
    pts = sorted(set(delta_vertices) | set(potential.breakpoints) | {0.0, 1.0})
    nodes = np.asarray(pts)
    vvals = np.array(
        [potential.value_at(0.5 * (a + b)) for a, b in zip(pts[:-1], pts[1:])]
    )
    deltas = set(delta_vertices)
    sigmas = np.array([sigma if p in deltas else 0.0 for p in pts[1:-1]])
    return _Chain(nodes=nodes, vvals=vvals, sigmas=sigmas)


def segment_transfer(lam: float, v: float, length: float) -> np.ndarray:
    """2x2 propagator of (u, u') across a segment with -u'' + v u = lam u."""
    if length <= 0:
        raise DomainError(f"segment length must be positive, got {length}")
    w2 = lam - v
    z = w2 * length * length
    if z > kernels._TAYLOR_Z:
        w = math.sqrt(w2)
        c = math.cos(w * length)
        s = math.sin(w * length) / w
    elif z < -kernels._TAYLOR_Z:
        q = math.sqrt(-w2)
        c = math.cosh(q * length)
        s = math.sinh(q * length) / q
    else:
        c = 1.0 - z / 2.0 + z * z / 24.0
        s = length * (1.0 - z / 6.0 + z * z / 120.0)
    return np.array([[c, s], [-w2 * s, c]])


def vertex_jump(sigma: float, u: float, uprime: float) -> tuple[float, float]:
    """Delta vertex action: u continuous, derivative kicked by sigma*u."""
    return u, uprime + sigma * u


def _shoot_chain(chain: _Chain, lams) -> np.ndarray:
    return kernels.shoot_grid(
        np.atleast_1d(np.asarray(lams, dtype=float)),
        chain.lengths, chain.vvals, chain.sigmas,
    )


def _count_chain(chain: _Chain, lams) -> np.ndarray:
    return kernels.count_zeros_grid(
        np.atleast_1d(np.asarray(lams, dtype=float)),
        chain.lengths, chain.vvals, chain.sigmas,
    )


def shoot(problem: FlowProblem, lam: float) -> float:
    """Endpoint value u(1) of the left-normalized solution at lambda."""
    return float(_shoot_chain(_chain_from_problem(problem), [lam])[0])


def _bisect_roots(chain: _Chain, brackets: list[tuple[float, float]]) -> np.ndarray:
    """Bisect shoot-sign brackets in parallel down to float resolution."""
    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    flo = _shoot_chain(chain, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        done = (mid <= lo) | (mid >= hi)
        if np.all(done):
            break
        fmid = _shoot_chain(chain, mid)
        take_left = (flo > 0) != (fmid > 0)
        hi = np.where(take_left, mid, hi)
        keep = ~take_left
        lo = np.where(keep, mid, lo)
        flo = np.where(keep, fmid, flo)
    return 0.5 * (lo + hi)


def _find_chain_eigenvalues(chain: _Chain, K: int) -> np.ndarray:
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    lam_lo = float(np.min(chain.vvals)) - _SCAN_SHIFT
    ceiling = lam_lo + _CEILING_PER_ROOT * K
    roots: list[float] = []
    a = lam_lo
    count_a = int(_count_chain(chain, [a])[0])
    if count_a != 0:
        raise NumericError("zero count must start at 0 below the spectrum")
    while len(roots) < K:
        b = a + _SCAN_STEP
        if b > ceiling:
            raise NumericError(
                f"failed to bracket {K} eigenvalues below {ceiling:.6g}"
            )
        count_b = max(int(_count_chain(chain, [b])[0]), count_a)
        if count_b > count_a:
            brackets = _isolate(chain, a, b, count_a, count_b)
            for r in _bisect_roots(chain, brackets):
                # near-eigenvalue count glitches can hand the same root to
                # two adjacent pieces; physical gaps are far wider than this
                if not roots or r - roots[-1] > 1e-9 * (1.0 + abs(r)):
                    roots.append(float(r))
        a, count_a = b, count_b
    return np.array(roots[:K])


def _isolate(chain, a, b, count_a, count_b) -> list[tuple[float, float]]:
    """Split [a, b] until each piece holds exactly one eigenvalue.

    The zero counts steer the subdivision, but every emitted bracket is
    verified by an actual sign change of the shooting value; within about
    1e-11 of an eigenvalue the count can be off by one (the solution grazes
    a node there), so the sign is the final authority.  A piece that shrinks
    to that scale still claiming a root without a sign change has a
    subdivision point sitting essentially on the root: the endpoint with the
    smaller shooting value is emitted as a degenerate bracket.
    """
    out = []
    stack = [(a, b, count_a, count_b, 0)]
    while stack:
        a, b, ca, cb, depth = stack.pop()
        if cb - ca <= 0:
            continue
        fa, fb = _shoot_chain(chain, [a, b])
        sign_change = (fa > 0) != (fb > 0)
        if cb - ca == 1 and sign_change:
            out.append((a, b))
            continue
        if b - a < 1e-11 * (1.0 + abs(a)):
            if sign_change:
                out.append((a, b))
            else:
                x = a if abs(fa) <= abs(fb) else b
                out.append((x, x))
            continue
        if depth >= _MAX_SUBDIVIDE:
            raise NumericError(
                f"could not separate {cb - ca} eigenvalues inside "
                f"({a:.12g}, {b:.12g})"
            )
        mid = 0.5 * (a + b)
        cm = min(max(int(_count_chain(chain, [mid])[0]), ca), cb)
        # push right piece first so output stays ascending
        stack.append((mid, b, cm, cb, depth + 1))
        stack.append((a, mid, ca, cm, depth + 1))
    return sorted(out)


def find_eigenvalues(problem: FlowProblem, K: int) -> np.ndarray:
    """First K eigenvalues of the flow problem, ascending."""
    return _find_chain_eigenvalues(_chain_from_problem(problem), K)


def eval_shooting_solution(problem: FlowProblem, lam: float, x) -> float | np.ndarray:
    """Value u(x) of the left-normalized solution (u'(0) = 1) at lambda."""
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError("x outside [0, 1]")
    chain = _chain_from_problem(problem)
    out = kernels.transfer_eval_grid(
        np.atleast_1d(xs).ravel(), float(lam),
        chain.nodes, chain.vvals, chain.sigmas,
    )
    if np.isscalar(x) or xs.ndim == 0:
        return float(out[0])
    return out.reshape(xs.shape)


def _eval_chain(chain: _Chain, lam: float, xs) -> np.ndarray:
    return kernels.transfer_eval_grid(
        np.atleast_1d(np.asarray(xs, dtype=float)), float(lam),
        chain.nodes, chain.vvals, chain.sigmas,
    )


def _find_chain_zeros(chain: _Chain, lam: float, grid_size: int = 4096) -> list[float]:
    xs = np.linspace(0.0, 1.0, grid_size)
    vals = _eval_chain(chain, lam, xs)
    roots = []
    # interior scan only; u(0) = 0 by construction and u(1) ~ 0 at eigenvalues
    for i in range(1, grid_size - 2):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            for _ in range(60):
                xm = 0.5 * (a + b)
                fm = _eval_chain(chain, lam, [xm])[0]
                if (fa > 0) != (fm > 0):
                    b = xm
                else:
                    a, fa = xm, fm
                if b - a < 1e-13:
                    break
            roots.append(0.5 * (a + b))
    return roots


def find_zeros(problem: FlowProblem, lam: float) -> list[float]:
    """Interior zeros of the shooting solution at an eigenvalue lambda."""
    return _find_chain_zeros(_chain_from_problem(problem), lam)


def perturbation_constant(W: PiecewisePotential, m: int) -> float:
    """Exact integral of W(t) sin(m pi (1-t)) over [0, 1].

    A nonzero value is the obstruction that makes the interval-weight ratios
    of the flow depend on sigma once the potential is turned on.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    knots = [0.0, *W.breakpoints, 1.0]
    total = 0.0
    for a, b in zip(knots, knots[1:]):
        v = W.value_at(0.5 * (a + b))
        # antiderivative of sin(m pi (1-t)) is cos(m pi (1-t)) / (m pi)
        total += v * (math.cos(m * PI * (1 - b)) - math.cos(m * PI * (1 - a))) / (m * PI)
    return total


def _flow_setup(base_potential: PiecewisePotential):
    """Third eigenvalue of the base operator and the zeros that seed the flow."""
    base = _chain_with_vertices(base_potential, [], 0.0)
    lam3 = _find_chain_eigenvalues(base, 3)[2]
    zeros = _find_chain_zeros(base, lam3)
    if len(zeros) != 2:
        raise NumericError(
            f"expected 2 interior zeros of the third eigenfunction, got {len(zeros)}"
        )
    return base, lam3, zeros


def ratio_curve(
    base_potential: PiecewisePotential, m: int, sigmas
) -> list[float]:
    """u_m(x1; sigma) / u_m(x2; sigma) along the flow on the zeros of the
    third eigenfunction of -u'' + V u."""
    if m not in (1, 2):
        raise DomainError(f"m must be 1 or 2, got {m}")
    _, _, zeros = _flow_setup(base_potential)
    out = []
    for sigma in sigmas:
        if sigma < 0:
            raise DomainError(f"sigma must be nonnegative, got {sigma}")
        chain = _chain_with_vertices(base_potential, zeros, float(sigma))
        lam = _find_chain_eigenvalues(chain, m)[m - 1]
        u1, u2 = _eval_chain(chain, lam, zeros)
        if abs(u2) < 1e-13:
            raise NumericError(
                f"denominator value u(x2) = {u2:.3e} too small at sigma={sigma}"
            )
        out.append(float(u1 / u2))
    return out


def interval_weights(
    base_potential: PiecewisePotential, m: int, sigma: float
) -> list[float]:
    """Weights of flow eigenfunction m against the generating eigenfunction.

    Computed from node data: integrating u_m * u_3 by parts over an interval
    between consecutive zeros of u_3 leaves only boundary terms, giving
    (u_m(x_{k-1}) u_3'(x_{k-1}) - u_m(x_k) u_3'(x_k)) / (lam_3 - lam_m).
    Transfer matrices make the node values and derivatives exact.
    """
    base, lam3, zeros = _flow_setup(base_potential)
    chain = _chain_with_vertices(base_potential, zeros, float(sigma))
    lam = _find_chain_eigenvalues(chain, m)[m - 1]
    pts = [0.0, *zeros, 1.0]
    u_m = _eval_chain(chain, lam, pts)
    du3 = [_state_at(base, lam3, x)[1] for x in pts]
    denom = lam3 - lam
    if abs(denom) < 1e-12:
        raise NumericError("flow eigenvalue collided with the generating one")
    return [
        (u_m[k - 1] * du3[k - 1] - u_m[k] * du3[k]) / denom
        for k in range(1, len(pts))
    ]


def _state_at(chain: _Chain, lam: float, x: float) -> tuple[float, float]:
    """Exact (u, u') of the left-normalized solution at x."""
    u, up = 0.0, 1.0
    for k in range(len(chain.vvals)):
        a, b = chain.nodes[k], chain.nodes[k + 1]
        if x <= a:
            break
        t = min(x, b) - a
        M = segment_transfer(lam, chain.vvals[k], t) if t > 0 else np.eye(2)
        u, up = M[0, 0] * u + M[0, 1] * up, M[1, 0] * u + M[1, 1] * up
        if x > b and k + 1 < len(chain.vvals):
            u, up = vertex_jump(chain.sigmas[k], u, up)
    return u, up
