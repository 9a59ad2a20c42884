"""Closed-form solver for the canonical (zero-potential) spectral flow.

For nodes at k/n the eigenvalues lam_m(sigma) = gamma_m(sigma)^2 of the
delta flow solve the implicit equation

    sigma = 2 gamma (cos(m pi/n) - cos(gamma/n)) / sin(gamma/n),

whose right side is a strictly increasing bijection from [m pi, n pi) onto
[0, inf) for each 1 <= m <= n-1.  The eigenfunctions are sums of translated
sines with coefficients determined by gamma alone.  The n-th branch is
constant: lam_n = (n pi)^2 with eigenfunction sin(n pi x) for every sigma.
"""
from __future__ import annotations

import math

import numpy as np

from .core import AnalyticEigenpair, DomainError, NumericError
from . import kernels

PI = math.pi

# Bisection for gamma runs in log(delta) where delta = n*pi - gamma; this
# keeps full relative accuracy in delta (hence in sigma) even when sigma is
# huge and gamma sits within a few ulps of the pole at n*pi.
_LOG_DELTA_FLOOR = math.log(1e-250)
_LOG_TOL = 1e-13
_MAX_BISECT = 400


def _validate_indices(n: int, m: int, allow_top: bool = False) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    top = n if allow_top else n - 1
    if int(m) != m or not 1 <= m <= top:
        raise DomainError(f"m={m} outside 1..{top} for n={n}")


def sigma_of_gamma(n: int, m: int, gamma: float) -> float:
    """Delta strength at which branch m has frequency gamma.

    Strictly increasing on [m pi, n pi), 0 at gamma = m pi, unbounded as
    gamma approaches n pi.
    """
    _validate_indices(n, m)
    if not m * PI <= gamma < n * PI:
        raise DomainError(
            f"gamma={gamma} outside [{m}*pi, {n}*pi) for branch m={m}"
        )
    theta = m * PI / n
    return 2.0 * gamma * (math.cos(theta) - math.cos(gamma / n)) / math.sin(gamma / n)


def _sigma_from_delta(n: int, theta: float, delta: float) -> float:
    # sigma written in terms of delta = n*pi - gamma; cos(gamma/n) = -cos(delta/n)
    gamma = n * PI - delta
    return 2.0 * gamma * (math.cos(theta) + math.cos(delta / n)) / math.sin(delta / n)


def gamma_of_sigma(n: int, m: int, sigma: float) -> float:
    """Unique frequency gamma in [m pi, n pi) with sigma_of_gamma == sigma."""
    _validate_indices(n, m)
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0.0:
        return m * PI
    theta = m * PI / n
    # sigma is strictly decreasing in delta on (0, (n-m)*pi]; bisect log(delta)
    lo, hi = _LOG_DELTA_FLOOR, math.log((n - m) * PI)
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if _sigma_from_delta(n, theta, math.exp(mid)) > sigma:
            lo = mid
        else:
            hi = mid
        if hi - lo < _LOG_TOL:
            break
    return n * PI - math.exp(0.5 * (lo + hi))


def coefficients(n: int, m: int, sigma: float) -> AnalyticEigenpair:
    """Frequency and translated-sine coefficients of eigenfunction m."""
    _validate_indices(n, m, allow_top=True)
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    if m == n:
        # sin(n pi x) vanishes at every node, so this branch never moves
        return AnalyticEigenpair(n=n, m=m, sigma=float(sigma), gamma=n * PI,
                                 coeffs=(0.0,) * (n - 1))
    gamma = gamma_of_sigma(n, m, sigma)
    coeffs = _coeffs_from_gamma(n, m, gamma)
    return AnalyticEigenpair(n=n, m=m, sigma=float(sigma), gamma=gamma,
                             coeffs=tuple(coeffs))


def _coeffs_from_gamma(n: int, m: int, gamma: float) -> list[float]:
    theta = m * PI / n
    a1 = 2.0 * math.cos(theta) - 2.0 * math.cos(gamma / n)
    return [a1 * math.sin(k * theta) / math.sin(theta) for k in range(1, n)]


def limit_coefficients(n: int, m: int) -> list[float]:
    """sigma -> infinity limits of the translated-sine coefficients."""
    _validate_indices(n, m, allow_top=True)
    theta = m * PI / n
    a1 = 2.0 * math.cos(theta) + 2.0
    return [a1 * math.sin(k * theta) / math.sin(theta) for k in range(1, n)]


def eval_u(pair: AnalyticEigenpair, x):
    """Eigenfunction value(s) at x in [0, 1] (u'(0) = gamma normalization)."""
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError("x outside [0, 1]")
    out = kernels.eval_u_grid(np.atleast_1d(xs).ravel(), pair.gamma,
                              np.asarray(pair.coeffs), pair.n)
    if np.isscalar(x) or xs.ndim == 0:
        return float(out[0])
    return out.reshape(xs.shape)


def eval_u_prime(pair: AnalyticEigenpair, x: float, side: str = "left") -> float:
    """One-sided derivative of the eigenfunction at x.

    ``side='left'`` uses the interval ending at x, ``side='right'`` the one
    starting there; away from nodes both agree.  Computed from the cosine
    form of the translated-sine expansion, not by differencing.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError("x outside [0, 1]")
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    g, n = pair.gamma, pair.n
    du = g * math.cos(g * x)
    for j, a in enumerate(pair.coeffs, start=1):
        xj = j / n
        active = x > xj if side == "left" else x >= xj
        if active:
            du += a * g * math.cos(g * (x - xj))
    return du


def node_values(n: int, m: int, sigma: float) -> list[float]:
    """Eigenfunction values at the interior nodes x_k = k/n, k = 1..n-1."""
    _validate_indices(n, m)
    gamma = gamma_of_sigma(n, m, sigma)
    theta = m * PI / n
    scale = math.sin(gamma / n) / math.sin(theta)
    return [scale * math.sin(k * theta) for k in range(1, n)]


def interval_integrals(n: int, m: int, sigma: float) -> list[float]:
    """Weights of eigenfunction m against sin(n pi x) on each interval.

    Uses the closed form n*pi*(-1)^(k+1) (u(x_k)+u(x_{k-1})) / ((n pi)^2 - lam)
    in the u'(0) = gamma normalization.
    """
    _validate_indices(n, m)
    gamma = gamma_of_sigma(n, m, sigma)
    lam = gamma * gamma
    denom = (n * PI) ** 2 - lam
    if abs(denom) < 1e-12:
        raise NumericError(
            f"lambda within 1e-12 of the ceiling (n pi)^2 for n={n}, m={m}, "
            f"sigma={sigma}"
        )
    u = [0.0] + node_values(n, m, sigma) + [0.0]
    return [
        n * PI * (-1.0) ** (k + 1) * (u[k] + u[k - 1]) / denom
        for k in range(1, n + 1)
    ]


def limit_vector(n: int, m: int) -> list[float]:
    """Per-interval amplitudes of the sigma -> infinity eigenfunction."""
    _validate_indices(n, m, allow_top=True)
    return [
        (-1.0) ** (k + 1) * math.sin((2 * k - 1) * m * PI / (2 * n))
        for k in range(1, n + 1)
    ]


def limit_eigenfunction_coeffs(n: int, m: int) -> list[float]:
    """Alternating partial sums 1 + sum_{j<k} (-1)^j A_j at the limit.

    Proportional (one global scalar) to ``limit_vector(n, m)``.
    """
    _validate_indices(n, m, allow_top=True)
    a_inf = limit_coefficients(n, m)
    out = []
    acc = 1.0
    for k in range(1, n + 1):
        out.append(acc)
        if k <= n - 1:
            acc += (-1.0) ** k * a_inf[k - 1]
    return out


def eigenvalue_table(n: int, sigmas) -> np.ndarray:
    """Rows m = 1..n of lam_m(sigma) for each sigma (row n is constant)."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    sigmas = list(sigmas)
    table = np.empty((n, len(sigmas)))
    for m in range(1, n):
        table[m - 1] = [gamma_of_sigma(n, m, s) ** 2 for s in sigmas]
    table[n - 1] = (n * PI) ** 2
    return table
