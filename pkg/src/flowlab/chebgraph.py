"""Chebyshev rectangular collocation on the path quantum graph.

Each edge carries N Chebyshev points of the second kind; the differential
operator is applied per edge and resampled to N-2 points, which frees
exactly 2n rows for the Dirichlet, continuity, and derivative-jump
conditions.  The constrained eigenproblem is reduced to a standard dense
one on an orthonormal basis of the constraint null space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import analytic
from .core import (
    AmplitudeMatrix,
    CollocationEigenpair,
    ConfigurationError,
    DomainError,
    FlowProblem,
    NumericError,
)

PI = math.pi

DEFAULT_N = 32

_IMAG_TOL = 1e-8       # |Im lam| acceptance bound, relative to 1 + |lam|
_RESIDUAL_TOL = 1e-8   # constraint defect bound, relative to sup|u|


def chebyshev_points(N: int) -> np.ndarray:
    """N Chebyshev points of the second kind on [-1, 1], ascending.

    Uses the symmetric sine form so the center point is exactly 0 and the
    endpoints exactly +-1.
    """
    if N < 2:
        raise DomainError(f"need at least 2 points, got N={N}")
    j = np.arange(N)
    return np.sin(PI * (2 * j - (N - 1)) / (2 * (N - 1)))


def _barycentric_weights(N: int) -> np.ndarray:
    w = np.ones(N)
    w[1::2] = -1.0
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def differentiation_matrix(N: int) -> np.ndarray:
    """Spectral differentiation matrix on ``chebyshev_points(N)``.

    Exact for polynomials of degree N-1; diagonal entries are the negated
    off-diagonal row sums, so rows sum to zero by construction.
    """
    x = chebyshev_points(N)
    w = _barycentric_weights(N)
    with np.errstate(divide="ignore", invalid="ignore"):
        D = (w[None, :] / w[:, None]) / (x[:, None] - x[None, :])
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def resampling_matrix(N_from: int, N_to: int) -> np.ndarray:
    """Barycentric map from values at N_from Chebyshev points to the values
    of the same interpolating polynomial at N_to Chebyshev points."""
    if not 2 <= N_to <= N_from:
        raise DomainError(f"need 2 <= N_to <= N_from, got {N_to}, {N_from}")
    if N_to == N_from:
        return np.eye(N_from)
    x = chebyshev_points(N_from)
    y = chebyshev_points(N_to)
    return _barycentric_matrix(x, y)


def _barycentric_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    w = _barycentric_weights(x.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = y[:, None] - x[None, :]
        terms = w[None, :] / diff
        P = terms / terms.sum(axis=1)[:, None]
    exact = diff == 0.0
    if np.any(exact):
        P[np.any(exact, axis=1)] = 0.0
        P[exact] = 1.0
    return P


def _first_kind_points(M: int) -> np.ndarray:
    """M Chebyshev points of the first kind on (-1, 1), ascending."""
    j = np.arange(M)
    return -np.cos((2 * j + 1) * PI / (2 * M))


def _interior_resampling(N: int, M: int) -> np.ndarray:
    """Resampling from N second-kind points onto M strictly interior points.

    The interior collocation equations must be enforced away from the edge
    endpoints: a second-kind target grid contains +-1, whose rows are plain
    interpolation there and degenerate against the boundary/vertex
    constraint rows, leaving the projected right-hand side singular.
    """
    return _barycentric_matrix(chebyshev_points(N), _first_kind_points(M))


def clenshaw_curtis_weights(N: int) -> np.ndarray:
    """Quadrature weights on ``chebyshev_points(N)`` for [-1, 1].

    Integrates the degree N-1 interpolant exactly, so quadrature and
    representation are consistent by construction.
    """
    if N < 2:
        raise DomainError(f"need at least 2 points, got N={N}")
    n = N - 1
    theta = PI * np.arange(N) / n
    w = np.zeros(N)
    ii = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
        v -= np.cos(n * theta[ii]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
    w[ii] = 2.0 * v / n
    return w  # symmetric, so valid for either point ordering


@dataclass(frozen=True, eq=False)
class ChebGrid:
    """Per-edge Chebyshev points mapped onto the problem's edges."""

    N: int
    nodes: tuple[float, ...]
    edges: tuple[np.ndarray, ...]

    @classmethod
    def for_problem(cls, problem: FlowProblem, N: int) -> "ChebGrid":
        t = chebyshev_points(N)
        edges = []
        for a, b in problem.edges():
            pts = a + (t + 1.0) * 0.5 * (b - a)
            pts[0] = a   # pin endpoints exactly
            pts[-1] = b
            edges.append(pts)
        return cls(N=N, nodes=problem.nodes, edges=tuple(edges))


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    """Rectangular collocation system for one flow problem.

    ``interior_operator`` maps stacked edge values to (-u'' + V u) resampled
    at N-2 points per edge; ``interior_resample`` is the matching resampling
    of the identity (the right-hand side of the eigenproblem);
    ``constraint_rows`` holds the 2n boundary/vertex conditions; ``layout``
    maps (edge, point) to the stacked index.
    """

    interior_operator: np.ndarray
    interior_resample: np.ndarray
    constraint_rows: np.ndarray
    layout: np.ndarray
    grid: ChebGrid
    problem: FlowProblem


def _jump_scale(sigma: float) -> float:
    # keeps the jump constraint row O(1) for sigma up to 1e9 and beyond
    return 1.0 / (1.0 + sigma)


def assemble(problem: FlowProblem, N: int = DEFAULT_N) -> DiscreteSystem:
    """Build the rectangular system for a flow problem."""
    if N < 8:
        raise DomainError(f"need N >= 8 points per edge, got {N}")
    n = problem.n
    vvals = problem.edge_potentials()  # raises ConfigurationError on misalignment
    lengths = problem.edge_lengths()

    D = differentiation_matrix(N)
    D2 = D @ D
    R = _interior_resampling(N, N - 2)
    total = n * N

    A = np.zeros((n * (N - 2), total))
    B = np.zeros((n * (N - 2), total))
    for k in range(n):
        s = 2.0 / lengths[k]
        rows = slice(k * (N - 2), (k + 1) * (N - 2))
        cols = slice(k * N, (k + 1) * N)
        A[rows, cols] = R @ (-(s * s) * D2 + vvals[k] * np.eye(N))
        B[rows, cols] = R

    C = np.zeros((2 * n, total))
    C[0, 0] = 1.0  # u(0) = 0
    C[1, total - 1] = 1.0  # u(1) = 0
    row = 2
    scale = _jump_scale(problem.sigma)
    for k in range(1, n):
        left = slice((k - 1) * N, k * N)
        right = slice(k * N, (k + 1) * N)
        # continuity across the vertex
        C[row, (k - 1) * N + N - 1] = 1.0
        C[row, k * N] = -1.0
        row += 1
        # derivative jump u'(x+) - u'(x-) = sigma * u(x)
        C[row, right] = scale * (2.0 / lengths[k]) * D[0, :]
        C[row, left] -= scale * (2.0 / lengths[k - 1]) * D[N - 1, :]
        C[row, k * N] -= scale * problem.sigma
        row += 1

    layout = np.arange(total).reshape(n, N)
    return DiscreteSystem(
        interior_operator=A,
        interior_resample=B,
        constraint_rows=C,
        layout=layout,
        grid=ChebGrid.for_problem(problem, N),
        problem=problem,
    )


def _realify(col: np.ndarray) -> np.ndarray:
    """Rotate a (numerically) real eigenvector onto the real axis."""
    pivot = col[np.argmax(np.abs(col))]
    if pivot != 0:
        col = col * (np.conj(pivot) / abs(pivot))
    return np.real(col)


# Relative spread below which the leading eigenvalue group counts as a tight
# cluster.  Plain QR eigenvectors of a cluster are contaminated at roughly
# (backward error)/(gap); a shift-and-invert pass maps the cluster onto
# well-separated dominant eigenvalues, fixing both values and vectors.
_CLUSTER_REL_WIDTH = 1e-4


def _shift_invert_pass(G, H, lam_lo, width, K):
    """Eigenpairs near a cluster via (G - tau H)^{-1} H, tau below the group."""
    tau = lam_lo - 3.0 * width
    M_si = np.linalg.solve(G - tau * H, H)
    mu, Y = np.linalg.eig(M_si)
    cand = [
        (tau + 1.0 / mu[i].real, i)
        for i in range(mu.size)
        if mu[i].real > 0 and abs(mu[i].imag) < _IMAG_TOL * abs(mu[i])
    ]
    cand.sort()
    cand = cand[:K]
    lams = np.array([c[0] for c in cand])
    vecs = [Y[:, c[1]] for c in cand]
    return lams, vecs


def solve_eigs(
    problem: FlowProblem, N: int = DEFAULT_N, K: int | None = None
) -> list[CollocationEigenpair]:
    """The K smallest accepted eigenpairs, ascending."""
    n = problem.n
    if K is None:
        K = n
    if not 1 <= K <= n * (N - 2):
        raise DomainError(f"K={K} outside 1..{n * (N - 2)}")
    system = assemble(problem, N)
    Z = scipy.linalg.null_space(system.constraint_rows)
    if Z.shape[1] != n * N - 2 * n:
        raise NumericError(
            f"constraint null space has dimension {Z.shape[1]}, expected "
            f"{n * N - 2 * n} (n={n}, sigma={problem.sigma}, N={N})"
        )
    G = system.interior_operator @ Z
    H = system.interior_resample @ Z
    try:
        M = np.linalg.solve(H, G)
        lams, Y = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"dense eigensolve failed for n={n}, sigma={problem.sigma}, N={N}: {exc}"
        ) from exc

    def accept(lam_list, vec_list):
        out = []
        for lam, col in zip(lam_list, vec_list):
            if abs(lam.imag) >= _IMAG_TOL * (1.0 + abs(lam)):
                continue
            vec = _realify(Z @ col)
            sup = np.max(np.abs(vec))
            residual = float(np.max(np.abs(system.constraint_rows @ vec)) / sup)
            if residual >= _RESIDUAL_TOL:
                continue
            # deterministic orientation and unit sup norm
            vec = vec / vec[np.argmax(np.abs(vec))]
            out.append(
                CollocationEigenpair(
                    lam=float(lam.real),
                    edge_values=vec[system.layout],
                    residual=residual,
                )
            )
            if len(out) == K:
                break
        return out

    order = np.argsort(lams.real)
    pairs = accept(lams[order], [Y[:, i] for i in order])
    if len(pairs) < K:
        raise NumericError(
            f"only {len(pairs)} of {K} eigenpairs accepted for "
            f"n={n}, sigma={problem.sigma}, N={N}"
        )

    width = pairs[-1].lam - pairs[0].lam
    if K >= 2 and width < _CLUSTER_REL_WIDTH * (1.0 + abs(pairs[-1].lam)):
        si_lams, si_vecs = _shift_invert_pass(
            G, H, pairs[0].lam, max(width, 1e-9 * (1.0 + abs(pairs[0].lam))), K
        )
        refined = accept(si_lams, si_vecs)
        if len(refined) == K:
            pairs = refined
    return pairs


def edge_derivatives(pair: CollocationEigenpair, grid: ChebGrid) -> np.ndarray:
    """Per-edge derivative values at the collocation points."""
    N = grid.N
    D = differentiation_matrix(N)
    out = np.empty_like(pair.edge_values)
    for k, pts in enumerate(grid.edges):
        s = 2.0 / (pts[-1] - pts[0])
        out[k] = s * (D @ pair.edge_values[k])
    return out


def _interpolant_sup(edge_values: np.ndarray, N: int) -> float:
    """Sup norm of the piecewise interpolant (not just its sampled values).

    Samples each edge polynomial on a fine grid and refines the winning
    point with one parabolic step, which recovers the extremum of a smooth
    function to ~1e-10 of its height.
    """
    t_fine = np.linspace(-1.0, 1.0, 513)
    P = _barycentric_matrix(chebyshev_points(N), t_fine)
    best = 0.0
    h = t_fine[1] - t_fine[0]
    for vals in edge_values:
        fine = P @ vals
        i = int(np.argmax(np.abs(fine)))
        best = max(best, abs(fine[i]))
        if 0 < i < fine.size - 1:
            f0, f1, f2 = fine[i - 1], fine[i], fine[i + 1]
            denom = f0 - 2 * f1 + f2
            if denom != 0.0:
                shift = 0.5 * (f0 - f2) / denom
                if abs(shift) <= 1.0:
                    t_star = t_fine[i] + shift * h
                    w = _barycentric_weights(N)
                    diff = t_star - chebyshev_points(N)
                    if np.all(diff != 0.0):
                        terms = w / diff
                        best = max(best, abs(float(terms @ vals / terms.sum())))
    return best


def amplitude_matrix(
    problem: FlowProblem, pairs: list[CollocationEigenpair]
) -> AmplitudeMatrix:
    """Projection of each eigenfunction onto sin(n pi x), per interval.

    Entry (m, k) is 2n * integral of u_m sin(n pi x) over interval k, with
    each eigenfunction at unit sup norm; the factor 2n makes the projection
    of sin(n pi x) itself equal to 1 on every interval.  Rows are sign-fixed
    so the first column is nonnegative.
    """
    if not problem.is_canonical:
        raise DomainError("amplitude matrix is defined for canonical problems")
    n = problem.n
    if len(pairs) != n:
        raise DomainError(f"need the first {n} eigenpairs, got {len(pairs)}")
    N = pairs[0].edge_values.shape[1]
    grid = ChebGrid.for_problem(problem, N)
    w = clenshaw_curtis_weights(N)
    entries = np.empty((n, n))
    for m, pair in enumerate(pairs):
        vals = pair.edge_values / _interpolant_sup(pair.edge_values, N)
        for k, pts in enumerate(grid.edges):
            half_len = 0.5 * (pts[-1] - pts[0])
            integrand = vals[k] * np.sin(n * PI * pts)
            entries[m, k] = 2 * n * half_len * np.dot(w, integrand)
        if entries[m, 0] < 0:
            entries[m] = -entries[m]
    return AmplitudeMatrix(entries=entries)


def diff_metrics(problem: FlowProblem, N: int = DEFAULT_N) -> tuple[float, float]:
    """(diff_val, diff_vec) for a canonical problem.

    diff_val is lam_n - lam_1 from the collocation solve.  diff_vec is the
    max entrywise deviation between the per-row least-squares rescaled
    amplitude matrix and the closed-form limit amplitudes; it is NaN at
    sigma = 0, where the limit comparison is meaningless.
    """
    n = problem.n
    pairs = solve_eigs(problem, N, K=n)
    diff_val = pairs[-1].lam - pairs[0].lam
    if problem.sigma == 0:
        return diff_val, float("nan")
    M_norm = amplitude_matrix(problem, pairs).entries
    diff_vec = 0.0
    for m in range(1, n + 1):
        target = np.asarray(analytic.limit_vector(n, m))
        row = M_norm[m - 1]
        alpha = float(np.dot(row, target) / np.dot(row, row))
        diff_vec = max(diff_vec, float(np.max(np.abs(alpha * row - target))))
    return diff_val, diff_vec


def eval_collocation(pair: CollocationEigenpair, grid: ChebGrid, x: float) -> float:
    """Barycentric evaluation of a collocation eigenfunction at x.

    At a shared node the left edge is used; edge endpoints return the stored
    values exactly.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    nodes = np.asarray(grid.nodes)
    i = int(np.searchsorted(nodes, x, side="left"))
    edge = min(max(i - 1, 0), len(grid.edges) - 1)
    pts = grid.edges[edge]
    vals = pair.edge_values[edge]
    hits = np.nonzero(pts == x)[0]
    if hits.size:
        return float(vals[hits[0]])
    w = _barycentric_weights(grid.N)
    terms = w / (x - pts)
    return float(np.dot(terms, vals) / np.sum(terms))
