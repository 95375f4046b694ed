import math

import numpy as np
import pytest
from scipy import integrate

from fracadapt.barriers import Barrier, BarrierKind
from fracadapt.errors import DomainError
from fracadapt.experiments import problem_a, problem_b, problem_c
from fracadapt.fracops import TemporalMesh, TimeGridFunction, graded_mesh
from fracadapt.residual import (
    Distribution,
    JumpAtZero,
    ProblemC,
    SamplePlan,
    Standard,
    check_norms,
    interval_check,
    node_residual_norms,
    residual_direct,
    residual_norm_at,
)
from fracadapt.spatial import Norm
from fracadapt.stepper import l1_solve_all


def test_sample_plan_points_inside():
    for dist in Distribution:
        pts = SamplePlan(9, dist).points(0.2, 0.5)
        assert np.all((pts > 0.2) & (pts < 0.5)) and np.all(np.diff(pts) > 0)
    with pytest.raises(DomainError):
        SamplePlan(2)


@pytest.mark.parametrize("make", [lambda: problem_a(0.3), lambda: problem_b(0.8, 300)])
def test_node_residual_vanishes(make):
    p = make()
    sol = p.solve_graded(30)
    norms = node_residual_norms(sol, p.op, p.f, p.alpha)
    fn = np.array([p.op.norm(p.f(float(t))) for t in sol.mesh.nodes[1:]])
    assert np.all(norms <= 1e-10 * (1 + fn))


@pytest.mark.parametrize("make", [lambda: problem_a(0.6), lambda: problem_b(0.4, 200)])
def test_sampled_form_equals_direct_residual(make):
    p = make()
    sol = p.solve_graded(12)
    rng = np.random.default_rng(5)
    for t in rng.uniform(0, 1, 15):
        direct = p.op.norm(residual_direct(sol, p.op, p.f, p.alpha, float(t)))
        sampled = residual_norm_at(sol, Standard(), p.op, p.f, p.alpha, float(t))
        assert sampled == pytest.approx(direct, rel=1e-8, abs=1e-10)


def test_exact_injection_gives_bubble_of_expected_size():
    alpha = 0.5
    p = problem_a(alpha)
    mesh = graded_mesh(1.0, 8, 1.0)
    u = TimeGridFunction(mesh, np.array([p.exact(float(t)) for t in mesh.nodes]))
    m = 5
    a, b = mesh.nodes[m - 1], mesh.nodes[m]
    t = 0.5 * (a + b)
    got = residual_direct(u, p.op, p.f, alpha, t)[0]

    # brute force: Caputo of the interpolant by quadrature of its slopes
    slopes = np.diff(u.values[:, 0]) / np.diff(mesh.nodes)
    d = 0.0
    for j in range(m):
        lo, hi = mesh.nodes[j], min(mesh.nodes[j + 1], t)
        if hi == t:
            val = integrate.quad(lambda s: 1.0, lo, hi, weight="alg", wvar=(0, -alpha))[0]
        else:
            val = integrate.quad(lambda s: (t - s) ** -alpha, lo, hi)[0]
        d += slopes[j] * val
    d /= math.gamma(1 - alpha)
    brute = d + 3.0 * u(t)[0] - p.f(t)[0]
    assert got == pytest.approx(brute, rel=1e-8)
    tau = b - a
    assert 0 < abs(got) < 10 * tau ** (2 - alpha)


def test_problem_c_first_interval_formula():
    p = problem_c(0.6, 200)
    sol = p.solve_graded(10)
    t1 = float(sol.mesh.nodes[1])
    jump = sol.values[1] - sol.values[0]
    mode = ProblemC(t1, jump)
    t = t1 / 2
    expected = p.op.norm(jump * t**-0.6 / math.gamma(0.4) + p.op.apply(sol.values[1]))
    assert residual_norm_at(sol, mode, p.op, p.f, 0.6, t) == pytest.approx(expected, rel=1e-12)


def test_problem_c_mode_requires_held_interpolant():
    p = problem_c(0.6, 50)
    sol = l1_solve_all(0.6, p.op, graded_mesh(0.2, 4, 2.0), p.u0, p.f)  # Linear mode
    with pytest.raises(DomainError):
        residual_norm_at(sol, ProblemC(float(sol.mesh.nodes[1]), sol.values[1] - sol.values[0]),
                         p.op, p.f, 0.6, 0.1)


def test_jump_mode_adds_singular_term():
    p = problem_a(0.4)
    sol = p.solve_graded(6)
    jump = np.array([0.25])
    for t in (0.01, 0.3, 0.9):
        base = residual_direct(sol, p.op, p.f, 0.4, t)[0]
        got = residual_norm_at(sol, JumpAtZero(jump), p.op, p.f, 0.4, t)
        assert got == pytest.approx(abs(base + 0.25 * t**-0.4 / math.gamma(0.6)), rel=1e-9)


def test_norm_choice():
    p = problem_b(0.5, 100)
    sol = p.solve_graded(5)
    l2 = residual_norm_at(sol, Standard(), p.op, p.f, 0.5, 0.3, Norm.L2)
    linf = residual_norm_at(sol, Standard(), p.op, p.f, 0.5, 0.3, Norm.Linf)
    assert 0 < l2 <= linf * math.sqrt(math.pi)


def test_check_trivial_cases():
    times = np.array([0.1, 0.2])
    norms = np.array([1.0, 2.0])
    b = Barrier(BarrierKind.R0, 0.5, 0.0)
    ok = check_norms(times, norms, b, 1e300)
    assert ok.passed and ok.worst_ratio < 1e-290
    bad = check_norms(times, norms, b, 0.0)
    assert not bad.passed
    zero = check_norms(times, np.zeros(2), b, 0.0)
    assert zero.passed and zero.worst_ratio == 0.0


def test_oversized_first_step_fails():
    p = problem_a(0.7)
    u = l1_solve_all(0.7, p.op, TemporalMesh(np.array([0.0, 0.5, 1.0])), p.u0, p.f)
    b = Barrier(BarrierKind.R0, 0.7, 3.0)
    res = interval_check(u, Standard(), p.op, p.f, 0.7, 1, b, 1e-3)
    assert not res.passed and res.worst_ratio > 1
    # dense scan agrees that the barrier is violated
    ts = np.linspace(1e-4, 0.5, 10_000)
    worst = max(residual_norm_at(u, Standard(), p.op, p.f, 0.7, float(t)) / (1e-3 * b(t)) for t in ts[::50])
    assert worst > 1


def test_out_of_range_time():
    p = problem_a(0.5)
    sol = p.solve_graded(4)
    with pytest.raises(DomainError):
        residual_norm_at(sol, Standard(), p.op, p.f, 0.5, 1.5)
    with pytest.raises(DomainError):
        interval_check(sol, Standard(), p.op, p.f, 0.5, 5, Barrier(BarrierKind.R0, 0.5, 3.0), 1e-3)
