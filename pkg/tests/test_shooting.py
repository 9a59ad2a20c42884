"""Transfer-matrix shooting solver and the flat/step ratio experiment."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from flowlab import (
    DomainError,
    PiecewisePotential,
    analytic,
    canonical_problem,
    chebgraph,
    fdoracle,
    problem_with_potential,
    shooting,
)

PI = math.pi

H1 = PiecewisePotential.step(0.5, 20.0, 0.0)

# values frozen from this module's own solve, cross-checked below against
# the finite-difference referee
H1_LAM3 = 98.56872018905989
H1_ZEROS = (0.3544255591767199, 0.6835680600132064)


def test_segment_transfer_zero_energy():
    np.testing.assert_allclose(
        shooting.segment_transfer(5.0, 5.0, 0.7), [[1.0, 0.7], [0.0, 1.0]], atol=1e-12)


def test_segment_transfer_sine():
    M = shooting.segment_transfer(PI**2, 0.0, 1.0)
    out = M @ np.array([0.0, PI])
    np.testing.assert_allclose(out, [math.sin(PI), PI * math.cos(PI)], atol=1e-12)


def test_segment_transfer_determinant_random():
    # draws stay in the solver's operating regime (evanescent depth bounded)
    rng = np.random.default_rng(11)
    for _ in range(1000):
        lam = rng.uniform(-10.0, 400.0)
        v = rng.uniform(-10.0, 30.0)
        L = rng.uniform(0.05, 0.5)
        M = shooting.segment_transfer(lam, v, L)
        assert abs(np.linalg.det(M) - 1.0) < 1e-10


def test_segment_transfer_taylor_branch_continuity():
    # the series branch must join the trig/hyperbolic branches smoothly
    for sign in (1.0, -1.0):
        M_in = shooting.segment_transfer(5.0 + sign * 0.9e-8, 5.0, 1.0)
        M_out = shooting.segment_transfer(5.0 + sign * 1.1e-8, 5.0, 1.0)
        np.testing.assert_allclose(M_in, M_out, rtol=0, atol=1e-10)


def test_segment_transfer_rejects_bad_length():
    with pytest.raises(DomainError):
        shooting.segment_transfer(1.0, 0.0, 0.0)


def test_vertex_jump():
    assert shooting.vertex_jump(0.0, 1.2, -0.3) == (1.2, -0.3)
    assert shooting.vertex_jump(10.0, 0.0, 3.0) == (0.0, 3.0)
    assert shooting.vertex_jump(2.0, 1.5, -1.0) == (1.5, 2.0)


def test_shoot_at_eigenvalue():
    p = canonical_problem(2, 0.0)
    assert abs(shooting.shoot(p, PI**2)) < 1e-12


def test_shoot_reference_cell():
    p = canonical_problem(2, 10.0)
    near = abs(shooting.shoot(p, 22.6699))
    scale = max(abs(shooting.shoot(p, 21.6699)), abs(shooting.shoot(p, 23.6699)))
    assert near < 1e-3 * scale


def test_shoot_step_potential_shifts_spectrum():
    p = problem_with_potential(H1, (0.0, 0.5, 1.0), 0.0)
    assert abs(shooting.shoot(p, PI**2)) > 1e-3


def test_find_eigenvalues_unperturbed():
    lams = shooting.find_eigenvalues(canonical_problem(3, 0.0), 3)
    np.testing.assert_allclose(lams, [PI**2, 4 * PI**2, 9 * PI**2], atol=1e-9)


def test_find_eigenvalues_n4_row():
    lams = shooting.find_eigenvalues(canonical_problem(4, 10.0), 4)
    np.testing.assert_allclose(lams[[0, 1, 3]], [42.4846, 70.9891, 157.9137], atol=5e-4)
    lam3 = analytic.gamma_of_sigma(4, 3, 10.0) ** 2
    assert abs(lams[2] - lam3) / lam3 < 1e-7


def test_find_eigenvalues_base_step():
    p = problem_with_potential(H1, (0.0, 0.5, 1.0), 0.0)
    lams = shooting.find_eigenvalues(p, 1)
    assert PI**2 < lams[0] < PI**2 + 20.0


def test_find_eigenvalues_rejects_bad_k():
    with pytest.raises(DomainError):
        shooting.find_eigenvalues(canonical_problem(2, 0.0), 0)


def test_eval_shooting_solution():
    p = canonical_problem(2, 0.0)
    val = shooting.eval_shooting_solution(p, PI**2, 0.5)
    assert val == pytest.approx(1.0 / PI, abs=1e-12)
    lam = 17.3
    assert shooting.eval_shooting_solution(p, lam, 1.0) == pytest.approx(
        shooting.shoot(p, lam), abs=1e-13)


def test_eval_shooting_solution_domain():
    p = canonical_problem(2, 0.0)
    with pytest.raises(DomainError):
        shooting.eval_shooting_solution(p, 1.0, -0.2)


def test_find_zeros_canonical():
    p = canonical_problem(3, 0.0)
    zs = shooting.find_zeros(p, 9 * PI**2)
    np.testing.assert_allclose(zs, [1 / 3, 2 / 3], atol=1e-12)
    p2 = canonical_problem(2, 0.0)
    zs2 = shooting.find_zeros(p2, 4 * PI**2)
    np.testing.assert_allclose(zs2, [0.5], atol=1e-12)


def test_step_third_eigenfunction_zeros():
    base, lam3, zeros = shooting._flow_setup(H1)
    assert lam3 == pytest.approx(H1_LAM3, abs=1e-9)
    np.testing.assert_allclose(zeros, H1_ZEROS, atol=1e-9)
    # the step pushes mass right, so the left zero exceeds 1/3
    assert zeros[0] > 1 / 3
    # eigenfunction vanishes at its zeros
    p = problem_with_potential(H1, (0.0, 0.5, 1.0), 0.0)
    for z in zeros:
        assert abs(shooting.eval_shooting_solution(p, lam3, z)) < 1e-9


def test_step_zeros_against_fd_eigenvector():
    lams, vecs, xs = fdoracle.fd_eigensystem(H1, [], [], 3)
    fd_zeros = fdoracle.zero_crossings(vecs[:, 2], xs)
    assert len(fd_zeros) == 2
    np.testing.assert_allclose(fd_zeros, H1_ZEROS, atol=1e-4)


def test_ratio_curve_flat_constant():
    sigmas = [0.0, 10.0, 50.0, 100.0]
    r1 = shooting.ratio_curve(PiecewisePotential.zero(), 1, sigmas)
    assert max(r1) - min(r1) < 1e-10
    assert r1[0] == pytest.approx(1.0, abs=1e-10)
    r2 = shooting.ratio_curve(PiecewisePotential.zero(), 2, sigmas)
    assert max(r2) - min(r2) < 1e-10
    assert r2[0] == pytest.approx(-1.0, abs=1e-10)


def test_ratio_curve_step_noninvariant():
    # regression bounds frozen from the finite-difference referee, which
    # reproduces these curves to ~2e-7 (relative spreads 0.1986 and 0.1135)
    sigmas = [0.0, 25.0, 50.0, 75.0, 100.0]
    r1 = shooting.ratio_curve(H1, 1, sigmas)
    spread1 = (max(r1) - min(r1)) / abs(float(np.mean(r1)))
    assert spread1 > 0.15
    r2 = shooting.ratio_curve(H1, 2, sigmas)
    spread2 = (max(r2) - min(r2)) / abs(float(np.mean(r2)))
    assert spread2 > 0.08


def test_ratio_curve_rejects_bad_m():
    with pytest.raises(DomainError):
        shooting.ratio_curve(H1, 3, [0.0])


def test_perturbation_constant():
    assert shooting.perturbation_constant(PiecewisePotential.zero(), 1) == 0.0
    flat_one = PiecewisePotential((), (1.0,))
    assert shooting.perturbation_constant(flat_one, 1) == pytest.approx(2 / PI, abs=1e-14)
    c = shooting.perturbation_constant(H1, 1)
    assert c == pytest.approx(20 / PI, abs=1e-13)
    ref, _ = quad(lambda t: 20.0 * (t < 0.5) * math.sin(PI * (1 - t)), 0, 1,
                  points=[0.5])
    assert c == pytest.approx(ref, abs=1e-10)


def test_wronskian_through_whole_chain():
    rng = np.random.default_rng(3)
    for _ in range(50):
        lam = rng.uniform(1.0, 300.0)
        M = np.eye(2)
        for k in range(4):
            M = shooting.segment_transfer(lam, rng.uniform(0, 20), 0.25) @ M
            if k < 3:
                s = rng.uniform(0, 100)
                M = np.array([[1.0, 0.0], [s, 1.0]]) @ M
        assert abs(np.linalg.det(M) - 1.0) < 1e-10


def test_oracle_triangle():
    for n in range(2, 7):
        for s in (0.0, 10.0, 1e3):
            tab = analytic.eigenvalue_table(n, [s])[:, 0]
            lam_s = shooting.find_eigenvalues(canonical_problem(n, s), n)
            lam_c = np.array(
                [p.lam for p in chebgraph.solve_eigs(canonical_problem(n, s), 32, K=n)])
            for a, b in ((tab, lam_s), (tab, lam_c), (lam_s, lam_c)):
                assert np.max(np.abs(a - b) / np.abs(a)) < 1e-7


def test_eigenvalues_nondecreasing_in_sigma():
    for n in (2, 4):
        prev = None
        for s in (0.0, 1.0, 10.0, 100.0, 1e3, 1e4):
            lams = shooting.find_eigenvalues(canonical_problem(n, s), n)
            if prev is not None:
                assert np.all(lams >= prev - 1e-10)
                # branches below the ceiling move strictly
                assert np.all(lams[:-1] > prev[:-1])
            prev = lams


def test_interval_weight_epsilon_scaling():
    # the sigma-variation of F2/F1 scales linearly in the potential size;
    # measured rates vary by ~1.2 percent over this epsilon range
    W = PiecewisePotential.step(0.5, 1.0, 0.0)
    for m in (1, 2):
        assert shooting.perturbation_constant(W, m) != 0.0
        rates = []
        for eps in (0.5, 0.25, 0.125):
            Veps = W.scaled(eps)
            F0 = shooting.interval_weights(Veps, m, 0.0)
            F1 = shooting.interval_weights(Veps, m, 1.0)
            rates.append(abs(F1[1] / F1[0] - F0[1] / F0[0]) / eps)
        assert max(rates) / min(rates) < 2.0


def test_flow_eigenvalues_against_fd():
    _, _, zeros = shooting._flow_setup(H1)
    for s in (0.0, 10.0, 100.0):
        chain = shooting._chain_with_vertices(H1, zeros, s)
        lt = shooting._find_chain_eigenvalues(chain, 2)
        lf = fdoracle.fd_eigenvalues(H1, zeros, [s, s], 2)
        assert np.max(np.abs(lt - lf) / lt) < 1e-6


def test_canonical_flow_against_fd():
    for n, s in [(2, 0.0), (3, 10.0), (4, 1e3)]:
        p = canonical_problem(n, s)
        lt = shooting.find_eigenvalues(p, n)
        lf = fdoracle.fd_solve(p, n)
        assert np.max(np.abs(lt - lf) / lt) < 1e-6


def test_shoot_rejects_breakpoint_inside_edge():
    from flowlab.core import ConfigurationError

    bad = problem_with_potential(H1, (0.0, 0.25, 1.0), 0.0)
    with pytest.raises(ConfigurationError):
        shooting.shoot(bad, 10.0)
