r"""Sampling the residual of an L1 solution inside a time step.

On the interval :math:`(t_{m-1}, t_m)` the residual of the piecewise-linear
interpolant is evaluated as

.. math::

    R_h = g - g^I + R_h^I, \qquad g = D_t^\alpha u_h - f,

with :math:`g^I` the linear interpolant of :math:`g` between the two nodes
and :math:`R_h^I = [\mathcal{L}_h u^0 - f(0)](1 - t/t_1)^+`. The operator is
applied to :math:`u^0` only (and to :math:`u^1` in the rough-data mode),
never to the computed node values in general.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .barriers import Barrier
from .errors import DomainError
from .fracops import FirstIntervalMode, TimeGridFunction, _pow_diff_over_step, sigma_correction
from .spatial import Norm, SpatialOperator
from .specfun import gamma

__all__ = [
    "Standard",
    "JumpAtZero",
    "ProblemC",
    "ResidualMode",
    "Distribution",
    "SamplePlan",
    "CheckResult",
    "IntervalData",
    "interval_residual_norms",
    "residual_norm_at",
    "residual_direct",
    "node_residual_norms",
    "interval_check",
]

Forcing = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class Standard:
    """Plain residual of the continuous interpolant with ``u_h(0) = u_0``."""


@dataclass(frozen=True)
class JumpAtZero:
    """Continuous interpolant with ``u_h(0) - u_0 = jump``; adds ``jump t^-alpha / Gamma(1-alpha)``."""

    jump: np.ndarray


@dataclass(frozen=True)
class ProblemC:
    """Interpolant reset to ``u^1`` on ``(0, t1]`` for rough initial data."""

    t1: float
    u1_minus_u0: np.ndarray


ResidualMode = Standard | JumpAtZero | ProblemC


class Distribution(enum.Enum):
    Chebyshev = "chebyshev"
    Uniform = "uniform"


@dataclass(frozen=True)
class SamplePlan:
    points_per_interval: int = 16
    distribution: Distribution = Distribution.Chebyshev

    def __post_init__(self) -> None:
        if self.points_per_interval < 3:
            raise DomainError("at least three sample points per interval are required")

    def points(self, a: float, b: float) -> np.ndarray:
        """Sample times strictly inside ``(a, b)``, increasing."""
        k = self.points_per_interval
        if self.distribution is Distribution.Chebyshev:
            x = 0.5 * (1.0 - np.cos((2.0 * np.arange(1, k + 1) - 1.0) * math.pi / (2.0 * k)))
        else:
            x = np.arange(1, k + 1) / (k + 1.0)
        return a + (b - a) * x


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    worst_ratio: float
    t_worst: float


@dataclass
class IntervalData:
    """Everything needed to sample the residual on one interval ``(t_left, t_right)``.

    ``hist_nodes``/``hist_incr`` describe the intervals before ``t_left``
    (``hist_nodes[-1] == t_left``).
    """

    alpha: float
    hist_nodes: np.ndarray
    hist_incr: np.ndarray
    u_left: np.ndarray
    t_right: float
    u_right: np.ndarray
    u0: np.ndarray
    f0: np.ndarray | None = None
    lu0: np.ndarray | None = None

    @property
    def t_left(self) -> float:
        return float(self.hist_nodes[-1])

    @property
    def m(self) -> int:
        return len(self.hist_nodes)

    def caputo(self, times: np.ndarray) -> np.ndarray:
        """``D_t^alpha u_h`` at ``t_left <= times <= t_right``, shape ``(K, N)``."""
        g2 = gamma(2.0 - self.alpha)
        times = np.asarray(times, dtype=float)
        out = np.zeros((len(times), len(self.u_left)))
        if len(self.hist_nodes) > 1:
            w = _pow_diff_over_step(
                times[:, None], self.hist_nodes[None, :-1], self.hist_nodes[None, 1:], 1.0 - self.alpha
            )
            out += w @ self.hist_incr
        tau = self.t_right - self.t_left
        d = np.maximum(times - self.t_left, 0.0)
        out += np.outer(d ** (1.0 - self.alpha) / tau, self.u_right - self.u_left)
        return out / g2


def _norms(op: SpatialOperator, r: np.ndarray, which: Norm) -> np.ndarray:
    if which is Norm.Linf:
        return np.max(np.abs(r), axis=1)
    return np.sqrt(op.h * np.einsum("ij,ij->i", r, r))


def _eval_forcing(f: Forcing, times: np.ndarray, dim: int) -> np.ndarray:
    return np.array([np.asarray(f(float(t)), dtype=float).reshape(dim) for t in times])


def interval_residual_norms(
    data: IntervalData,
    times: np.ndarray,
    op: SpatialOperator,
    f: Forcing,
    mode: ResidualMode,
    which: Norm = Norm.L2,
) -> np.ndarray:
    """Residual norms at ``times`` inside ``(t_left, t_right]``."""
    times = np.asarray(times, dtype=float)
    a, b = data.t_left, data.t_right
    if np.any(times <= a) or np.any(times > b):
        raise DomainError(f"sample times must lie in ({a}, {b}]")
    alpha = data.alpha
    g1 = gamma(1.0 - alpha)
    dim = len(data.u_left)
    fk = _eval_forcing(f, times, dim)

    if isinstance(mode, ProblemC) and data.m == 1:
        # u_h == u^1 on (0, t1]
        jump = np.asarray(mode.u1_minus_u0, dtype=float)
        lu1 = op.apply(data.u_right)
        r = np.outer(times**-alpha / g1, jump) + lu1[None, :] - fk
        return _norms(op, r, which)

    ends = np.array([a, b]) if a > 0 else np.array([b])
    dk = data.caputo(np.concatenate([times, ends]))
    g_samples = dk[: len(times)] - fk
    g_right = dk[-1] - _eval_forcing(f, [b], dim)[0]
    if a > 0:
        g_left = dk[-2] - _eval_forcing(f, [a], dim)[0]
    else:
        f0 = data.f0 if data.f0 is not None else _eval_forcing(f, [0.0], dim)[0]
        g_left = -f0
    theta = ((times - a) / (b - a))[:, None]
    r = g_samples - ((1.0 - theta) * g_left + theta * g_right)

    if data.m == 1 and not isinstance(mode, ProblemC):
        f0 = data.f0 if data.f0 is not None else _eval_forcing(f, [0.0], dim)[0]
        lu0 = data.lu0 if data.lu0 is not None else op.apply(data.u0)
        r += np.outer(np.maximum(1.0 - times / b, 0.0), lu0 - f0)

    if isinstance(mode, JumpAtZero):
        r += np.outer(times**-alpha / g1, np.asarray(mode.jump, dtype=float))
    elif isinstance(mode, ProblemC):
        sig = sigma_correction(alpha, mode.t1, times)
        r += np.outer(np.atleast_1d(sig) / g1, np.asarray(mode.u1_minus_u0, dtype=float))
    return _norms(op, r, which)


def _interval_data(u: TimeGridFunction, alpha: float, m: int) -> IntervalData:
    nodes = u.mesh.nodes
    if not 1 <= m <= u.mesh.M:
        raise DomainError(f"interval {m} does not exist (M={u.mesh.M})")
    return IntervalData(
        alpha=alpha,
        hist_nodes=nodes[:m],
        hist_incr=u.increments[: m - 1],
        u_left=u.values[m - 1],
        t_right=float(nodes[m]),
        u_right=u.values[m],
        u0=u.values[0],
    )


def _check_mode(u: TimeGridFunction, mode: ResidualMode) -> None:
    constant = u.first_interval_mode is FirstIntervalMode.ConstantEqualToU1
    if isinstance(mode, ProblemC) != constant:
        raise DomainError("ProblemC mode goes together with a ConstantEqualToU1 grid function")


def residual_norm_at(
    u: TimeGridFunction,
    mode: ResidualMode,
    op: SpatialOperator,
    f: Forcing,
    alpha: float,
    t: float,
    which: Norm = Norm.L2,
) -> float:
    """Norm of the residual at a single time ``t`` in ``(0, T]``."""
    _check_mode(u, mode)
    m = u.mesh.interval_of(t)
    return float(interval_residual_norms(_interval_data(u, alpha, m), np.array([t]), op, f, mode, which)[0])


def residual_direct(
    u: TimeGridFunction, op: SpatialOperator, f: Forcing, alpha: float, t: float
) -> np.ndarray:
    """``D_t^alpha u_h(t) + L_h u_h(t) - f(t)`` with the operator applied at ``t``.

    Standard-mode reference used to validate the sampled form.
    """
    m = u.mesh.interval_of(t)
    data = _interval_data(u, alpha, m)
    d = data.caputo(np.array([t]))[0]
    return d + op.apply(u(t)) - np.asarray(f(t), dtype=float).reshape(-1)


def node_residual_norms(
    u: TimeGridFunction, op: SpatialOperator, f: Forcing, alpha: float, which: Norm = Norm.L2
) -> np.ndarray:
    """Directly evaluated residual norms at ``t_1, ..., t_M``."""
    nodes = u.mesh.nodes
    out = np.empty(u.mesh.M)
    for j in range(1, u.mesh.M + 1):
        out[j - 1] = op.norm(residual_direct(u, op, f, alpha, float(nodes[j])), which)
    return out


def check_norms(
    times: np.ndarray, norms: np.ndarray, barrier: Barrier | Callable, tol: float
) -> CheckResult:
    """Compare sampled residual norms with ``tol * barrier(t)``."""
    bvals = np.asarray(barrier(times), dtype=float)
    denom = tol * bvals
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(norms == 0, 0.0, norms / denom)
    k = int(np.argmax(ratio))
    worst = float(ratio[k])
    return CheckResult(bool(worst <= 1.0), worst, float(times[k]))


def interval_check(
    u: TimeGridFunction,
    mode: ResidualMode,
    op: SpatialOperator,
    f: Forcing,
    alpha: float,
    m: int,
    barrier: Barrier | Callable,
    tol: float,
    plan: SamplePlan = SamplePlan(),
    which: Norm = Norm.L2,
) -> CheckResult:
    """Sampled test of ``||R_h(t)|| <= tol * barrier(t)`` on ``(t_{m-1}, t_m)``."""
    _check_mode(u, mode)
    data = _interval_data(u, alpha, m)
    times = plan.points(data.t_left, data.t_right)
    norms = interval_residual_norms(data, times, op, f, mode, which)
    return check_norms(times, norms, barrier, tol)
