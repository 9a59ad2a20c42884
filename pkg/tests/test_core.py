"""Domain types: construction, invariants, JSON round trips."""
import math

import pytest

from flowlab import (
    DomainError,
    ConfigurationError,
    FlowProblem,
    PiecewisePotential,
    canonical_problem,
    problem_with_potential,
)


def test_canonical_problem_n2():
    p = canonical_problem(2, 0.0)
    assert p.nodes == (0.0, 0.5, 1.0)
    assert p.potential.is_zero
    assert p.is_canonical


def test_canonical_problem_n3_sigma10():
    p = canonical_problem(3, 10.0)
    assert p.nodes == (0.0, 1 / 3, 2 / 3, 1.0)
    assert p.sigma == 10.0
    # nodes are exactly k/n
    assert all(x == k / 3 for k, x in enumerate(p.nodes))


@pytest.mark.parametrize("n,sigma", [(1, 0.0), (0, 1.0), (2, -0.5), (2.5, 1.0)])
def test_canonical_problem_rejects(n, sigma):
    with pytest.raises(DomainError):
        canonical_problem(n, sigma)


def test_problem_with_potential_matches_canonical():
    p = problem_with_potential(PiecewisePotential.zero(), (0.0, 0.5, 1.0), 5.0)
    assert p == canonical_problem(2, 5.0)


def test_problem_with_potential_rejects_unsorted():
    with pytest.raises(DomainError):
        problem_with_potential(PiecewisePotential.zero(), (0.0, 0.7, 0.3, 1.0), 1.0)


def test_problem_rejects_bad_endpoints():
    with pytest.raises(DomainError):
        problem_with_potential(PiecewisePotential.zero(), (0.1, 0.5, 1.0), 0.0)
    with pytest.raises(DomainError):
        problem_with_potential(PiecewisePotential.zero(), (0.0, 0.5, 0.9), 0.0)


def test_node_count_mismatch_rejected_before_numerics():
    with pytest.raises(DomainError):
        FlowProblem(n=3, nodes=(0.0, 0.5, 1.0), sigma=0.0)


def test_potential_step_and_value_at():
    v = PiecewisePotential.step(0.5, 20.0, 0.0)
    assert v.value_at(0.25) == 20.0
    assert v.value_at(0.75) == 0.0
    assert v.value_at(0.5) == 20.0  # left segment at a breakpoint
    assert v.value_at(0.0) == 20.0
    assert v.value_at(1.0) == 0.0


def test_potential_invariants():
    with pytest.raises(DomainError):
        PiecewisePotential((0.5, 0.3), (1.0, 2.0, 3.0))
    with pytest.raises(DomainError):
        PiecewisePotential((0.5,), (1.0,))
    with pytest.raises(DomainError):
        PiecewisePotential((0.0,), (1.0, 2.0))


def test_potential_cell_average():
    v = PiecewisePotential.step(0.5, 20.0, 0.0)
    assert v.cell_average(0.0, 1.0) == pytest.approx(10.0, abs=1e-14)
    assert v.cell_average(0.25, 0.75) == pytest.approx(10.0, abs=1e-14)
    assert v.cell_average(0.6, 0.8) == 0.0


def test_potential_constant_value_on():
    v = PiecewisePotential.step(0.5, 20.0, 0.0)
    assert v.constant_value_on(0.0, 0.5) == 20.0
    with pytest.raises(ConfigurationError):
        v.constant_value_on(0.25, 0.75)


def test_edge_potentials_requires_alignment():
    v = PiecewisePotential.step(0.5, 20.0, 0.0)
    ok = problem_with_potential(v, (0.0, 0.5, 1.0), 0.0)
    assert list(ok.edge_potentials()) == [20.0, 0.0]
    bad = problem_with_potential(v, (0.0, 0.25, 1.0), 0.0)
    with pytest.raises(ConfigurationError):
        bad.edge_potentials()


def test_json_round_trip_is_lossless():
    v = PiecewisePotential((1 / 3,), (math.pi, -0.125))
    p = problem_with_potential(v, (0.0, 0.123456789012345, 1.0), 2.5e6)
    q = FlowProblem.from_json(p.to_json())
    assert q == p
    assert q.nodes[1] == p.nodes[1]  # exact float round trip


def test_json_keys():
    import json

    d = json.loads(canonical_problem(2, 1.0).to_json())
    assert set(d) == {"n", "nodes", "sigma", "potential"}
    assert set(d["potential"]) == {"breakpoints", "values"}
