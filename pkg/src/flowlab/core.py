"""Shared domain types for the delta spectral flow on [0, 1].

A flow problem is the Dirichlet operator -u'' + V u on [0, 1] with a delta
potential of strength sigma attached to every interior node.  All types here
are immutable values; the solvers live in the sibling modules.
"""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class DomainError(ValueError):
    """An argument lies outside an operation's documented domain."""


class ConfigurationError(ValueError):
    """A problem is structurally invalid (e.g. misaligned potential)."""


class NumericError(RuntimeError):
    """A solver failed to meet its accuracy contract."""


@dataclass(frozen=True)
class PiecewisePotential:
    """Piecewise-constant potential on [0, 1].

    ``breakpoints`` are the interior jump locations (strictly increasing,
    inside (0, 1)); ``values`` holds one constant per segment, so
    ``len(values) == len(breakpoints) + 1``.  At a breakpoint the value of
    the left segment applies.
    """

    breakpoints: tuple[float, ...] = ()
    values: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if any(not (0.0 < b < 1.0) for b in bp):
            raise DomainError("potential breakpoints must lie inside (0, 1)")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise DomainError("potential breakpoints must be strictly increasing")
        if len(vals) != len(bp) + 1:
            raise DomainError(
                "need one potential value per segment; got "
                f"{len(vals)} values for {len(bp) + 1} segments"
            )

    @classmethod
    def zero(cls) -> "PiecewisePotential":
        return cls((), (0.0,))

    @classmethod
    def step(cls, x: float, left: float, right: float) -> "PiecewisePotential":
        """Potential equal to ``left`` on (0, x) and ``right`` on (x, 1)."""
        return cls((x,), (left, right))

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def value_at(self, x: float) -> float:
        """Value at x, taking the left segment at a breakpoint."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        return self.values[bisect.bisect_left(self.breakpoints, x)]

    def breakpoints_within(self, a: float, b: float) -> tuple[float, ...]:
        """Breakpoints strictly inside (a, b)."""
        return tuple(p for p in self.breakpoints if a < p < b)

    def constant_value_on(self, a: float, b: float) -> float:
        """The single value on (a, b); raises if the potential jumps there."""
        inside = self.breakpoints_within(a, b)
        if inside:
            raise ConfigurationError(
                f"potential has breakpoints {inside} inside ({a}, {b}); "
                "split the edge at the breakpoints instead"
            )
        return self.value_at(0.5 * (a + b))

    def cell_average(self, a: float, b: float) -> float:
        """Exact mean of the potential over [a, b]."""
        if b <= a:
            raise DomainError("cell_average needs a < b")
        knots = [a] + [p for p in self.breakpoints if a < p < b] + [b]
        total = 0.0
        for lo, hi in zip(knots, knots[1:]):
            total += self.value_at(0.5 * (lo + hi)) * (hi - lo)
        return total / (b - a)

    def scaled(self, factor: float) -> "PiecewisePotential":
        return PiecewisePotential(self.breakpoints, tuple(factor * v for v in self.values))

    def to_json_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "PiecewisePotential":
        return cls(tuple(d["breakpoints"]), tuple(d["values"]))


@dataclass(frozen=True)
class FlowProblem:
    """A delta spectral-flow instance.

    ``nodes`` is the ordered vertex list 0 = x_0 < x_1 < ... < x_n = 1; a
    delta of strength ``sigma`` acts at every interior node.  ``n`` is the
    number of edges, so ``len(nodes) == n + 1``.
    """

    n: int
    nodes: tuple[float, ...]
    sigma: float
    potential: PiecewisePotential = field(default_factory=PiecewisePotential.zero)

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "n", int(self.n))
        if self.n < 2:
            raise DomainError(f"need at least two edges, got n={self.n}")
        if len(nodes) != self.n + 1:
            raise DomainError(
                f"node count {len(nodes)} does not match n+1={self.n + 1}"
            )
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise DomainError("nodes must start at 0 and end at 1")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError(f"nodes must be strictly increasing, got {nodes}")
        if self.sigma < 0.0:
            raise DomainError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def is_canonical(self) -> bool:
        """True when V = 0 and the nodes sit exactly at k/n."""
        return self.potential.is_zero and all(
            x == k / self.n for k, x in enumerate(self.nodes)
        )

    def edges(self) -> list[tuple[float, float]]:
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    def edge_lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.nodes))

    def edge_potentials(self) -> np.ndarray:
        """Per-edge constant potential values; raises if any edge straddles a jump."""
        return np.array(
            [self.potential.constant_value_on(a, b) for a, b in self.edges()]
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "nodes": list(self.nodes),
                "sigma": self.sigma,
                "potential": self.potential.to_json_dict(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FlowProblem":
        d = json.loads(text)
        return cls(
            n=d["n"],
            nodes=tuple(d["nodes"]),
            sigma=d["sigma"],
            potential=PiecewisePotential.from_json_dict(d["potential"]),
        )


def canonical_problem(n: int, sigma: float) -> FlowProblem:
    """The zero-potential flow with nodes at k/n."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    n = int(n)
    nodes = tuple(k / n for k in range(n + 1))
    return FlowProblem(n=n, nodes=nodes, sigma=float(sigma))


def problem_with_potential(
    potential: PiecewisePotential, nodes: Sequence[float], sigma: float
) -> FlowProblem:
    """Flow problem with externally supplied nodes (e.g. computed zeros)."""
    nodes = tuple(float(x) for x in nodes)
    return FlowProblem(n=len(nodes) - 1, nodes=nodes, sigma=sigma, potential=potential)


@dataclass(frozen=True)
class AnalyticEigenpair:
    """Closed-form eigenpair of the canonical flow.

    The eigenfunction is sin(gamma*x) plus translated sines switched on at
    the interior nodes, with ``coeffs[j-1]`` multiplying sin(gamma*(x - j/n)).
    Normalization: u'(0) = gamma.
    """

    n: int
    m: int
    sigma: float
    gamma: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise DomainError(f"m={self.m} outside 1..{self.n}")
        if len(self.coeffs) != self.n - 1:
            raise DomainError("need n-1 coefficients")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))

    @property
    def lam(self) -> float:
        return self.gamma * self.gamma


@dataclass(frozen=True, eq=False)
class CollocationEigenpair:
    """One accepted eigenpair from the collocation solve.

    ``edge_values`` has shape (n_edges, N): function values at the mapped
    Chebyshev points of each edge.  ``residual`` is the sup-norm defect of
    the boundary/vertex constraint rows, relative to the sup-norm of the
    eigenvector.
    """

    lam: float
    edge_values: np.ndarray
    residual: float


@dataclass(frozen=True, eq=False)
class AmplitudeMatrix:
    """Per-interval amplitudes of the first n eigenfunctions.

    Row m (1-based) holds the coefficient of sin(n*pi*x) on each interval
    I_k, obtained by projecting eigenfunction m against sin(n*pi*x).
    """

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[1]
