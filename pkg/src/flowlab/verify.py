"""Self-check suites wired into the ``flowlab verify`` command.

Each check compares a computed quantity against an expectation at a fixed
tolerance and reports pass/fail; ``quick`` keeps n <= 4 and sigma <= 1e5,
``full`` extends to n <= 6 and sigma up to 1e9 where a check calls for it.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analytic, chebgraph, fdoracle, shooting
from .core import NumericError, PiecewisePotential, canonical_problem

PI = math.pi


@dataclass
class CheckResult:
    name: str
    expected: str
    actual: str
    tolerance: str
    status: str  # pass | fail | skipped
    detail: str = ""


@dataclass
class RunReport:
    command: str
    params: dict
    checks: list[CheckResult] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "fail"]

    def to_json(self) -> str:
        # wall time is informational; the check rows are deterministic
        return json.dumps(
            {
                "command": self.command,
                "params": self.params,
                "checks": [vars(c) for c in self.checks],
                "wall_time_s": self.wall_time_s,
            },
            indent=2,
        )

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(
                f"[{c.status.upper():7s}] {c.name}: actual={c.actual} "
                f"expected={c.expected} tol={c.tolerance}"
                + (f" ({c.detail})" if c.detail else "")
            )
        npass = sum(1 for c in self.checks if c.status == "pass")
        nskip = sum(1 for c in self.checks if c.status == "skipped")
        lines.append(
            f"{npass} passed, {len(self.failed)} failed, {nskip} skipped "
            f"in {self.wall_time_s:.2f}s"
        )
        return "\n".join(lines)


def _bound_check(name, actual, bound, detail="") -> CheckResult:
    status = "pass" if actual <= bound else "fail"
    return CheckResult(name, f"<= {bound:.3g}", f"{actual:.6g}",
                       f"{bound:.3g}", status, detail)


def _flag_check(name, ok, actual, expected, detail="") -> CheckResult:
    return CheckResult(name, expected, actual, "exact",
                       "pass" if ok else "fail", detail)


def run_checks(level: str = "quick") -> RunReport:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    full = level == "full"
    n_max = 6 if full else 4
    sigma_cap = 1e9 if full else 1e5
    sigmas = [0.0] + [10.0**k for k in range(0, 8 if full else 6)]
    sigmas = [s for s in sigmas if s <= (1e7 if full else 1e5)]
    rng = np.random.default_rng(20240817)

    t0 = time.time()
    report = RunReport(command=f"verify --level {level}",
                       params={"level": level, "n_max": n_max})
    add = report.checks.append

    # implicit-equation round trip on a geometric grid
    worst = 0.0
    for n in range(2, n_max + 1):
        for m in range(1, n):
            for s in [0.0, 1.0, 100.0, 1e4, sigma_cap]:
                g = analytic.gamma_of_sigma(n, m, s)
                err = abs(analytic.sigma_of_gamma(n, m, g) - s)
                # gamma quantization bounds the achievable round trip
                floor_ = 2.0 * np.spacing(n * PI) / max(n * PI - g, 1e-300) * max(s, 1.0)
                worst = max(worst, err / max(max(1e-9, 1e-9 * s), floor_))
    add(_bound_check("implicit-roundtrip", worst, 1.0,
                     "err / max(1e-9*(1+sigma), quantization floor)"))

    # monotonicity and ordering of the frequencies
    ok = True
    for n in range(2, n_max + 1):
        for m in range(1, n):
            gs = [analytic.gamma_of_sigma(n, m, s) for s in
                  [0.0] + [10.0**k for k in range(-2, 10, 2) if 10.0**k <= sigma_cap]]
            ok &= all(b > a for a, b in zip(gs, gs[1:]))
        for s in (0.0, 10.0, sigma_cap):
            gs = [analytic.gamma_of_sigma(n, m, s) for m in range(1, n)]
            ok &= all(b > a for a, b in zip(gs, gs[1:])) and gs[-1] < n * PI
    add(_flag_check("gamma-monotone-ordered", ok, str(ok), "True"))

    # proof identities on random triples
    count = 500 if full else 150
    worst_jump = worst_dir = worst_rec = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n))
        s = float(10.0 ** rng.uniform(-2, 6))
        pair = analytic.coefficients(n, m, s)
        vals = analytic.node_values(n, m, s)
        for k in range(1, n):
            xk = k / n
            jump = (analytic.eval_u_prime(pair, xk, "right")
                    - analytic.eval_u_prime(pair, xk, "left"))
            worst_jump = max(worst_jump, abs(jump - s * vals[k - 1]) / (1 + s))
        total = 1.0 + sum(abs(a) for a in pair.coeffs)
        worst_dir = max(worst_dir, abs(analytic.eval_u(pair, 1.0)) / total)
        g = pair.gamma
        for k in range(2, n):
            lhs = pair.coeffs[k - 1] * math.sin(g / n)
            terms = [math.sin(k * g / n)] + [
                pair.coeffs[j - 1] * math.sin((k - j) * g / n) for j in range(1, k)
            ]
            rhs = pair.coeffs[0] * sum(terms)
            # relative to the size of what is summed; lhs itself can be an
            # exact zero when sin(k m pi / n) vanishes
            scale = abs(lhs) + abs(pair.coeffs[0]) * sum(abs(t) for t in terms)
            if scale > 0:
                worst_rec = max(worst_rec, abs(lhs - rhs) / scale)
    add(_bound_check("jump-residual", worst_jump, 1e-8, f"{count} random triples"))
    add(_bound_check("dirichlet-closure", worst_dir, 1e-9))
    add(_bound_check("recursion-identity", worst_rec, 1e-9))

    # node-ratio and interval-weight invariance in sigma
    worst_nr = worst_fr = 0.0
    for n in range(2, n_max + 1):
        for m in range(1, n):
            base_nv = None
            base_fr = None
            for s in (0.0, 10.0, 1e3, sigma_cap):
                nv = analytic.node_values(n, m, s)
                ratios = [v / nv[0] for v in nv]
                F = analytic.interval_integrals(n, m, s)
                fr = [f / F[0] for f in F]
                if base_nv is None:
                    base_nv, base_fr = ratios, fr
                else:
                    worst_nr = max(worst_nr, max(abs(a - b) for a, b in zip(ratios, base_nv)))
                    worst_fr = max(worst_fr, max(abs(a - b) for a, b in zip(fr, base_fr)))
    add(_bound_check("node-ratio-invariance", worst_nr, 1e-9))
    add(_bound_check("interval-weight-invariance", worst_fr, 1e-9))

    # quadrature equivalence of the closed-form interval weights
    worst_q = 0.0
    for n in range(2, min(n_max, 4) + 1):
        for m in range(1, n):
            for s in (0.0, 10.0, 1e3):
                pair = analytic.coefficients(n, m, s)
                F = analytic.interval_integrals(n, m, s)
                for k in range(1, n + 1):
                    a, b = (k - 1) / n, k / n
                    cheb_fit = np.polynomial.chebyshev.Chebyshev.interpolate(
                        lambda x: analytic.eval_u(pair, x) * np.sin(n * PI * x),
                        60, domain=[a, b])
                    quad = cheb_fit.integ()(b) - cheb_fit.integ()(a)
                    worst_q = max(worst_q, abs(quad - F[k - 1]))
    add(_bound_check("quadrature-equivalence", worst_q, 1e-9))

    # three-solver agreement on the eigenvalues
    worst_cheb = worst_shoot = worst_const = 0.0
    for n in range(2, n_max + 1):
        for s in sigmas:
            tab = analytic.eigenvalue_table(n, [s])[:, 0]
            prob = canonical_problem(n, s)
            lams_c = np.array([p.lam for p in chebgraph.solve_eigs(prob, 32, K=n)])
            lams_s = shooting.find_eigenvalues(prob, n)
            worst_cheb = max(worst_cheb, float(np.max(np.abs(lams_c - tab) / tab)))
            worst_shoot = max(worst_shoot, float(np.max(np.abs(lams_s - tab) / tab)))
            worst_const = max(worst_const, abs(lams_c[-1] - (n * PI) ** 2))
    add(_bound_check("collocation-analytic-agreement", worst_cheb, 1e-7))
    add(_bound_check("shooting-analytic-agreement", worst_shoot, 1e-7))
    add(_bound_check("constant-branch", worst_const, 1e-9,
                     "top eigenvalue pinned at (n pi)^2"))

    # vertex conditions of accepted collocation eigenpairs
    worst_v = 0.0
    for n in (2, n_max):
        for s in (0.0, 10.0, min(1e5, sigma_cap)):
            prob = canonical_problem(n, s)
            pairs = chebgraph.solve_eigs(prob, 32, K=n)
            grid = chebgraph.ChebGrid.for_problem(prob, 32)
            for p in pairs:
                dv = chebgraph.edge_derivatives(p, grid)
                sup = np.max(np.abs(p.edge_values))
                for k in range(1, n):
                    jump = dv[k, 0] - dv[k - 1, -1]
                    res = abs(jump - s * p.edge_values[k, 0]) / ((1 + s) * sup)
                    worst_v = max(worst_v, res)
    add(_bound_check("vertex-conditions", worst_v, 1e-7))

    # limiting amplitudes (large sigma)
    if full:
        worst_amp = 0.0
        for n in range(2, n_max + 1):
            prob = canonical_problem(n, 1e9)
            # N=16 keeps the pencil norm (hence the eigenvector roundoff
            # floor) low; these modes carry ~1 wavelength per edge
            pairs = chebgraph.solve_eigs(prob, 16, K=n)
            M = chebgraph.amplitude_matrix(prob, pairs).entries
            for m in range(1, n + 1):
                t = np.asarray(analytic.limit_vector(n, m))
                row = M[m - 1]
                alpha = float(row @ t / (row @ row))
                worst_amp = max(worst_amp, float(np.max(np.abs(alpha * row - t))))
        add(_bound_check("collocation-amplitude-limit", worst_amp, 1e-6,
                         "sigma=1e9, least-squares row scaling"))

        worst_al = 0.0
        for n in range(2, n_max + 1):
            for m in range(1, n + 1):
                pair = analytic.coefficients(n, m, 1e9)
                mids = (np.arange(n) + 0.5) / n
                amps = analytic.eval_u(pair, mids) * (-1.0) ** np.arange(n)
                t = np.asarray(analytic.limit_vector(n, m))
                alpha = float(amps @ t / (amps @ amps))
                worst_al = max(worst_al, float(np.max(np.abs(alpha * amps - t))))
        add(_bound_check("analytic-amplitude-limit", worst_al, 1e-4, "sigma=1e9"))
    else:
        add(CheckResult("collocation-amplitude-limit", "<= 1e-06", "-", "1e-06",
                        "skipped", "needs sigma=1e9 (full level)"))
        add(CheckResult("analytic-amplitude-limit", "<= 0.0001", "-", "0.0001",
                        "skipped", "needs sigma=1e9 (full level)"))

    # limit metrics of the collocation solver at sigma = 1e7
    if full:
        worst_vec = 0.0
        worst_val_dev = 0.0
        for n in range(2, n_max + 1):
            dv, dvec = chebgraph.diff_metrics(canonical_problem(n, 1e7), 32)
            theta = PI / n
            formula = 4.0 * n**3 * PI**2 * (1 + math.cos(theta)) / 1e7
            worst_val_dev = max(worst_val_dev, abs(dv - formula) / formula)
            worst_vec = max(worst_vec, dvec)
        add(_bound_check("limit-metrics-diff-vec", worst_vec, 1e-5, "sigma=1e7"))
        add(_bound_check(
            "limit-metrics-diff-val-vs-formula", worst_val_dev, 1e-3,
            "lam_n - lam_1 against its closed-form leading term 4 n^3 pi^2 "
            "(1+cos(pi/n))/sigma; the reference tables print solver-floor "
            "values that are inconsistent with the implicit equation",
        ))

    # reflection symmetry of collocation eigenfunctions
    prob = canonical_problem(3, 100.0)
    pairs = chebgraph.solve_eigs(prob, 32, K=3)
    grid = chebgraph.ChebGrid.for_problem(prob, 32)
    xs = np.linspace(0.05, 0.95, 37)
    worst_sym = 0.0
    for p in pairs:
        vals = np.array([chebgraph.eval_collocation(p, grid, x) for x in xs])
        refl = np.array([chebgraph.eval_collocation(p, grid, 1 - x) for x in xs])
        i = int(np.argmax(np.abs(vals)))  # sign pick away from any zero
        sign = 1.0 if abs(vals[i] - refl[i]) < abs(vals[i] + refl[i]) else -1.0
        worst_sym = max(worst_sym, float(np.max(np.abs(vals - sign * refl))))
    add(_bound_check("reflection-symmetry", worst_sym, 1e-8))

    # transfer-matrix structure; draws stay in the solver's operating regime
    # (evanescent depth kappa*L <= ~3.5, where cosh^2 roundoff is harmless)
    det_worst = 0.0
    for _ in range(200):
        lam = float(rng.uniform(-10, 400))
        v = float(rng.uniform(-10, 30))
        L = float(rng.uniform(0.05, 0.5))
        det_worst = max(det_worst, abs(np.linalg.det(
            shooting.segment_transfer(lam, v, L)) - 1.0))
    add(_bound_check("transfer-determinant", det_worst, 1e-10))

    # eigenvalue monotonicity along the flow
    ok = True
    for n in (2, 3):
        grid_s = [0.0, 1.0, 10.0, 100.0, 1e3, 1e4]
        rows = analytic.eigenvalue_table(n, grid_s)
        for m in range(n - 1):
            ok &= all(b > a for a, b in zip(rows[m], rows[m][1:]))
    add(_flag_check("flow-monotonicity", ok, str(ok), "True"))

    # flat vs step ratio experiment
    H0 = PiecewisePotential.zero()
    H1 = PiecewisePotential.step(0.5, 20.0, 0.0)
    sig_list = [0.0, 25.0, 50.0, 75.0, 100.0]
    worst_flat = 0.0
    for m in (1, 2):
        r = shooting.ratio_curve(H0, m, sig_list)
        worst_flat = max(worst_flat, max(r) - min(r))
    add(_bound_check("flat-ratio-constancy", worst_flat, 1e-10))
    r1 = shooting.ratio_curve(H1, 1, sig_list)
    spread = (max(r1) - min(r1)) / abs(float(np.mean(r1)))
    add(_flag_check("step-ratio-noninvariance", spread > 1e-2,
                    f"{spread:.4f}", "> 0.01",
                    "relative spread of u(x1)/u(x2) over sigma"))

    # transfer vs finite-difference referee
    _, _, zeros = shooting._flow_setup(H1)
    worst_fd = 0.0
    for s in (0.0, 100.0):
        chain = shooting._chain_with_vertices(H1, zeros, s)
        lt = shooting._find_chain_eigenvalues(chain, 2)
        lf = fdoracle.fd_eigenvalues(H1, zeros, [s, s], 2)
        worst_fd = max(worst_fd, float(np.max(np.abs(lt - lf) / lt)))
    add(_bound_check("transfer-fd-agreement", worst_fd, 1e-6))

    if full:
        # the reference tables print 1116.7243 for (n=4, m=3, sigma=10); the
        # implicit equation and the shooting solver agree on the true value
        lam_formula = analytic.gamma_of_sigma(4, 3, 10.0) ** 2
        lam_shoot = shooting.find_eigenvalues(canonical_problem(4, 10.0), 4)[2]
        rel = abs(lam_formula - lam_shoot) / lam_formula
        add(CheckResult(
            "reference-discrepancy-n4-m3-sigma10: expected-from-formula",
            f"{lam_formula:.6f}", f"{lam_shoot:.6f}", "1e-7 relative",
            "pass" if rel < 1e-7 else "fail",
            "printed table value 1116.7243 exceeds the ceiling 16 pi^2"))

    report.wall_time_s = time.time() - t0
    return report
