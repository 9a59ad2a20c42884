"""Independent finite-difference reference solver.

Second-order central differences on a grid of at least 1e5 points.  The
grid is uniform except that the point nearest each delta position (and each
potential breakpoint) is moved exactly onto it: a delta lumped onto a grid
point is second-order clean, whereas lumping it between points leaves a
first-order error with a cell-phase-dependent coefficient.  The three-point
stencil at such a locally irregular point uses the unequal-spacing weights,
which makes the matrix tridiagonal but nonsymmetric; since the off-diagonal
products are positive it is diagonally similar to a symmetric tridiagonal
matrix, which LAPACK then solves.  This module deliberately shares no
numerics with the closed-form, collocation, or shooting solvers, so it can
referee them.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import DomainError, FlowProblem, PiecewisePotential

DEFAULT_POINTS = 100_000


def _grid(potential, vertices, npts):
    h = 1.0 / (npts + 1)
    xs = h * np.arange(1, npts + 1)
    specials = sorted(set(float(v) for v in vertices) | set(potential.breakpoints))
    taken = set()
    for x_s in specials:
        i = int(round(x_s / h)) - 1
        i = min(max(i, 0), npts - 1)
        while i in taken:  # two specials competing for one point
            i += 1
        xs[i] = x_s
        taken.add(i)
    return np.sort(xs)


def _assemble(potential, vertices, strengths, npts):
    xs = _grid(potential, vertices, npts)
    left = np.diff(np.concatenate(([0.0], xs)))   # a_i = x_i - x_{i-1}
    right = np.diff(np.concatenate((xs, [1.0])))  # b_i = x_{i+1} - x_i
    # -u'' at x_i from the unequal-spacing three-point formula
    diag = 2.0 / (left * right)
    lower = -2.0 / (left[1:] * (left[1:] + right[1:]))   # coefficient of u_{i-1}
    upper = -2.0 / (right[:-1] * (left[:-1] + right[:-1]))  # coefficient of u_{i+1}
    cells_lo = np.concatenate(([0.0], 0.5 * (xs[1:] + xs[:-1])))
    cells_hi = np.concatenate((0.5 * (xs[1:] + xs[:-1]), [1.0]))
    diag = diag + np.array(
        [potential.cell_average(a, b) for a, b in zip(cells_lo, cells_hi)]
    )
    for x_s, s in zip(vertices, strengths):
        if s == 0.0:
            continue
        i = int(np.argmin(np.abs(xs - x_s)))
        if xs[i] != x_s:
            raise DomainError(f"delta at {x_s} missed the grid")
        diag[i] += s * 2.0 / (left[i] + right[i])
    return diag, lower, upper, xs


def _symmetrize(diag, lower, upper):
    """Similarity scaling onto a symmetric tridiagonal matrix.

    Returns the symmetric off-diagonal and the diagonal scaling d with
    original_vector = d * symmetric_vector.
    """
    prod = lower * upper
    if np.any(prod <= 0):
        raise DomainError("off-diagonal products must be positive")
    e = -np.sqrt(prod)
    # d_{i+1}/d_i = sqrt(upper_i / lower_i)
    ratios = np.sqrt(upper / lower)
    d = np.concatenate(([1.0], np.cumprod(ratios)))
    return e, d


def fd_eigenvalues(
    potential: PiecewisePotential,
    vertices,
    strengths,
    K: int,
    npts: int = DEFAULT_POINTS,
) -> np.ndarray:
    """First K eigenvalues of -u'' + V u + sum sigma_i delta(x - x_i)."""
    if K < 1 or K > npts:
        raise DomainError(f"K={K} outside 1..{npts}")
    diag, lower, upper, _ = _assemble(potential, vertices, strengths, npts)
    e, _ = _symmetrize(diag, lower, upper)
    return eigh_tridiagonal(
        diag, e, eigvals_only=True, select="i", select_range=(0, K - 1)
    )


def fd_eigensystem(
    potential: PiecewisePotential,
    vertices,
    strengths,
    K: int,
    npts: int = DEFAULT_POINTS,
):
    """First K eigenpairs; returns (eigenvalues, vectors, grid)."""
    if K < 1 or K > npts:
        raise DomainError(f"K={K} outside 1..{npts}")
    diag, lower, upper, xs = _assemble(potential, vertices, strengths, npts)
    e, d = _symmetrize(diag, lower, upper)
    lams, vecs = eigh_tridiagonal(diag, e, select="i", select_range=(0, K - 1))
    return lams, d[:, None] * vecs, xs


def fd_solve(problem: FlowProblem, K: int, npts: int = DEFAULT_POINTS) -> np.ndarray:
    """Eigenvalues of a flow problem (deltas at every interior node)."""
    interior = problem.nodes[1:-1]
    return fd_eigenvalues(
        problem.potential, interior, [problem.sigma] * len(interior), K, npts
    )


def zero_crossings(vec: np.ndarray, xs: np.ndarray) -> list[float]:
    """Sign-change locations of a grid eigenvector, by linear interpolation."""
    out = []
    for i in range(len(vec) - 1):
        a, b = vec[i], vec[i + 1]
        if a == 0.0:
            out.append(xs[i])
        elif a * b < 0.0:
            out.append(xs[i] + (xs[i + 1] - xs[i]) * a / (a - b))
    return out
