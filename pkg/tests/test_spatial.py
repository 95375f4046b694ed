import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracadapt.errors import DomainError, ShapeError
from fracadapt.spatial import Laplacian1D, Norm, ScalarShift, norm


def test_scalar_shift_apply_and_solve():
    op = ScalarShift(3.0)
    assert op.apply(np.array([2.0]))[0] == 6.0
    assert op.solve_shifted(2.0, np.array([10.0]))[0] == pytest.approx(2.0)
    assert op.lam == 3.0 and op.dim == 1


def test_scalar_norms():
    op = ScalarShift(3.0)
    assert norm(op, np.array([-3.0])) == 3.0
    assert norm(op, np.array([-3.0]), Norm.Linf) == 3.0
    assert norm(op, np.zeros(1)) == 0.0


def test_laplacian_zero():
    op = Laplacian1D(math.pi, 10)
    np.testing.assert_array_equal(op.apply(np.zeros(op.dim)), 0.0)
    np.testing.assert_array_equal(op.solve_shifted(1.0, np.zeros(op.dim)), 0.0)


def test_discrete_eigenfunction():
    op = Laplacian1D(math.pi, 4)
    v = np.sin(op.grid)
    expected = (2 - 2 * math.cos(op.h)) / op.h**2 * v
    np.testing.assert_allclose(op.apply(v), expected, rtol=1e-13)


def test_smallest_eigenvalue_matches_dense_spectrum():
    op = Laplacian1D(math.pi, 40, reaction=0.5)
    A = np.column_stack([op.apply(e) for e in np.eye(op.dim)])
    assert op.smallest_eigenvalue() == pytest.approx(np.linalg.eigvalsh(A)[0], rel=1e-12)


def test_smallest_eigenvalue_just_below_one_on_unit_mode():
    # discrete value is 1 - O(h^2) on (0, pi); lam = 1 is the continuum constant
    for n in (100, 2000):
        op = Laplacian1D(math.pi, n)
        assert 1 - op.h**2 / 10 < op.smallest_eigenvalue() < 1


def test_coercivity_witness():
    op = Laplacian1D(math.pi, 200)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=op.dim)
        assert op.inner(op.apply(v), v) >= op.smallest_eigenvalue() * op.inner(v, v) * (1 - 1e-12)
        assert op.inner(op.apply(v), v) >= op.lam * op.inner(v, v)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 300), mu=st.floats(1e-3, 1e6), seed=st.integers(0, 2**31))
def test_solve_round_trip(n, mu, seed):
    op = Laplacian1D(math.pi, n, reaction=0.1)
    v = np.random.default_rng(seed).normal(size=op.dim)
    w = op.solve_shifted(mu, op.apply(v) + mu * v)
    np.testing.assert_allclose(w, v, rtol=1e-9, atol=1e-12 * np.max(np.abs(v)))


def test_constant_vector_norm_tends_to_sqrt_pi():
    for n in (10, 100, 1000):
        op = Laplacian1D(math.pi, n)
        assert op.norm(np.ones(op.dim)) == pytest.approx(math.sqrt(op.h * (n - 1)), rel=1e-14)
        assert abs(op.norm(np.ones(op.dim)) - math.sqrt(math.pi)) < 2 * op.h


def test_norm_inequality():
    op = Laplacian1D(math.pi, 50)
    v = np.random.default_rng(1).normal(size=op.dim)
    assert op.norm(v) <= op.norm(v, Norm.Linf) * math.sqrt(math.pi)


def test_errors():
    op = Laplacian1D(math.pi, 10)
    with pytest.raises(ShapeError):
        op.apply(np.zeros(3))
    with pytest.raises(DomainError):
        op.solve_shifted(0.0, np.zeros(op.dim))
    with pytest.raises(DomainError):
        ScalarShift(3.0).solve_shifted(-1.0, np.ones(1))
    with pytest.raises(DomainError):
        Laplacian1D(math.pi, 1)
