import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracadapt.barriers import Barrier, BarrierKind, ProfileKind, barrier_value, profile_value, rho
from fracadapt.errors import DomainError
from fracadapt.fracops import caputo_e0, caputo_via_eq7


def test_rho_examples():
    assert rho(1.0, 0.3) == 1.0
    assert rho(2.0, 0.5) == pytest.approx(2**-0.5, rel=1e-15)
    assert rho(0.5, 0.5) == pytest.approx(math.sqrt(2) * (1 - math.sqrt(0.5)), rel=1e-14)


def test_rho_small_argument_keeps_digits():
    # rho(s) ~ beta s^(1-beta) as s -> 0
    s = 1e-12
    assert rho(s, 0.4) == pytest.approx(0.4 * s**0.6, rel=1e-10)


@pytest.mark.parametrize("beta", [0.1, 0.3, 0.5, 0.6, 0.9])
def test_rho_lower_bound(beta):
    s = np.geomspace(1e-8, 1e4, 2000)
    assert np.all(rho(s, beta) >= s**-beta * np.minimum(beta * s, 1.0) * (1 - 1e-14))


def test_rho_domain():
    with pytest.raises(DomainError):
        rho(0.0, 0.5)
    with pytest.raises(DomainError):
        rho(1.0, 1.0)


def test_r0_values():
    assert barrier_value(Barrier(BarrierKind.R0, 0.5, 0.0), 1.0) == pytest.approx(1 / math.sqrt(math.pi))
    assert barrier_value(Barrier(BarrierKind.R0, 0.4, 3.0), 1.0) == pytest.approx(1 / math.gamma(0.6) + 3)


def test_r1_before_tau():
    alpha, tau = 0.3, 0.2
    b = Barrier(BarrierKind.R1, alpha, 0.0, tau)
    t = np.array([0.01, 0.1, 0.2])
    expected = tau ** -(1 - alpha) * t**-alpha / math.gamma(1 - alpha)
    np.testing.assert_allclose(b(t), expected, rtol=1e-13)


def test_profiles():
    assert profile_value(ProfileKind.E0, 0.5, 0.0) == 0.0
    assert profile_value(ProfileKind.E0, 0.5, 0.37) == 1.0
    assert profile_value(ProfileKind.E1, 0.4, 0.05, tau=0.1) == pytest.approx(0.1**-0.6)
    assert profile_value(ProfileKind.E1, 0.4, 1.0, tau=0.1) == 1.0
    assert profile_value(ProfileKind.E1, 0.4, 0.0, tau=0.1) == 0.0


def test_barrier_validation():
    with pytest.raises(DomainError):
        Barrier(BarrierKind.R1, 0.5, 1.0)
    with pytest.raises(DomainError):
        Barrier(BarrierKind.R0, 0.5, -1.0)
    with pytest.raises(DomainError):
        barrier_value(Barrier(BarrierKind.R0, 0.5, 1.0), 0.0)


def test_e0_barrier_is_caputo_of_profile():
    alpha, lam = 0.35, 2.0
    b = Barrier(BarrierKind.R0, alpha, lam)
    for t in (1e-3, 0.2, 5.0):
        assert b(t) == pytest.approx(caputo_e0(alpha, t) + lam * profile_value(ProfileKind.E0, alpha, t))


@pytest.mark.parametrize("alpha", [0.3, 0.6, 0.85])
def test_e1_barrier_is_caputo_of_profile(alpha):
    tau, lam = 0.05, 1.5
    b = Barrier(BarrierKind.R1, alpha, lam, tau)

    def e1(s):
        return profile_value(ProfileKind.E1, alpha, s, tau)

    for t in np.geomspace(tau / 10, 10 * tau, 9):
        d = caputo_via_eq7(e1, alpha, float(t), breakpoints=[tau]).value[0]
        assert d + lam * e1(t) == pytest.approx(b(t), rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(0.05, 0.95), lam=st.floats(0, 10), tau=st.floats(1e-6, 1), t=st.floats(1e-6, 10))
def test_barriers_positive(alpha, lam, tau, t):
    assert Barrier(BarrierKind.R0, alpha, lam)(t) > 0
    assert Barrier(BarrierKind.R1, alpha, lam, tau)(t) > 0
