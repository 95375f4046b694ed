import math

import numpy as np
import pytest
from scipy import integrate

from fracadapt.adapt import AdaptConfig, adaptive_solve
from fracadapt.barriers import Barrier, BarrierKind
from fracadapt.bounds import ResidualTrace, inv_op_apply, residual_trace, sup_bounds
from fracadapt.errors import DomainError
from fracadapt.experiments import error_metrics, problem_a
from fracadapt.residual import Standard
from fracadapt.specfun import mlf


def const_trace(value, alpha, lam, T=1.0, n=400):
    t = np.linspace(T / n, T, n)
    return ResidualTrace(t, np.full(n, value), alpha, lam)


def test_zero_trace():
    assert inv_op_apply(const_trace(0.0, 0.5, 1.0), 0.7) == 0.0


def test_unit_trace_lambda_zero():
    tr = const_trace(1.0, 0.4, 0.0)
    assert inv_op_apply(tr, 1.0) == pytest.approx(1.0 / math.gamma(1.4), rel=1e-13)


def test_unit_trace_lambda_one():
    tr = const_trace(1.0, 0.5, 1.0)
    expected = 1.0 - mlf(0.5, 1.0, -1.0)
    assert inv_op_apply(tr, 1.0) == pytest.approx(expected, rel=1e-12)
    # independent check by quadrature of the resolvent kernel
    kern, _ = integrate.quad(lambda s: mlf(0.5, 0.5, -(s**0.5)), 0, 1, weight="alg", wvar=(-0.5, 0))
    assert inv_op_apply(tr, 1.0) == pytest.approx(kern, rel=1e-8)


def test_hold_rules_ordered():
    t = np.linspace(0.01, 1, 100)
    tr = ResidualTrace(t, np.abs(np.sin(7 * t)), 0.6, 2.0)
    assert inv_op_apply(tr, 0.8, "max") >= inv_op_apply(tr, 0.8)
    with pytest.raises(DomainError):
        inv_op_apply(tr, 0.8, "nearest")


def test_coverage_errors():
    tr = const_trace(1.0, 0.5, 1.0)
    with pytest.raises(DomainError):
        inv_op_apply(tr, 1.5)
    with pytest.raises(DomainError):
        sup_bounds(tr, Barrier(BarrierKind.R0, 0.5, 1.0), 0.0)


def test_trace_validation():
    with pytest.raises(DomainError):
        ResidualTrace(np.array([0.0, 1.0]), np.ones(2), 0.5, 1.0)
    with pytest.raises(DomainError):
        ResidualTrace(np.array([0.5, 1.0]), np.array([1.0, -1.0]), 0.5, 1.0)


def test_sup_bounds_trivial():
    b = Barrier(BarrierKind.R0, 0.5, 1.0)
    t = np.linspace(0.01, 1, 50)
    assert sup_bounds(ResidualTrace(t, b(t), 0.5, 1.0), b, 1.0) == pytest.approx(1.0)
    assert sup_bounds(ResidualTrace(t, np.zeros(50), 0.5, 1.0), b, 1.0) == 0.0


def test_bound_dominates_error_on_run():
    p = problem_a(0.4)
    cfg = AdaptConfig(1e-2)
    rep = adaptive_solve(p.as_problem(), cfg)
    tr = residual_trace(rep.solution, Standard(), p.op, p.f, p.alpha, cfg.plan)
    em = error_metrics(rep.solution, p)
    for j, t in enumerate(rep.mesh.nodes[1:], start=1):
        assert em.node_errors[j] <= inv_op_apply(tr, float(t), "max")
        assert em.node_errors[j] <= 1.05 * inv_op_apply(tr, float(t))
        assert sup_bounds(tr, rep.barrier, float(t)) <= 1e-2
