r"""Temporal meshes and exact Caputo derivatives of piecewise-linear interpolants.

For a continuous piecewise-linear :math:`u_h` with nodal values
:math:`u^0, \dots, u^M` the Caputo derivative of order :math:`\alpha` is

.. math::

    D_t^\alpha u_h(t) = \frac{1}{\Gamma(2-\alpha)} \sum_{t_{j-1} < t}
        \frac{u^j - u^{j-1}}{\tau_j}
        \left[(t-t_{j-1})^{1-\alpha} - (t-t_j)_+^{1-\alpha}\right],

evaluated here in closed form. Kernel differences are formed as
``b**g * expm1(g * log1p(tau / b))`` so that long-past tiny intervals (common
on graded meshes) do not lose their digits to cancellation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError, ShapeError
from .specfun import gamma

__all__ = [
    "TemporalMesh",
    "FirstIntervalMode",
    "TimeGridFunction",
    "CaputoSample",
    "graded_mesh",
    "uniform_mesh",
    "caputo_weights",
    "caputo_pwlinear",
    "caputo_e0",
    "sigma_correction",
    "caputo_via_eq7",
]


@dataclass(frozen=True)
class TemporalMesh:
    """Strictly increasing nodes ``0 = t_0 < t_1 < ... < t_M = T``."""

    nodes: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise DomainError("a temporal mesh needs at least two nodes")
        if nodes[0] != 0.0:
            raise DomainError(f"mesh must start at t=0, got {nodes[0]}")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("mesh nodes must be strictly increasing")
        if not np.all(np.isfinite(nodes)):
            raise DomainError("mesh nodes must be finite")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def T(self) -> float:
        return float(self.nodes[-1])

    @property
    def M(self) -> int:
        return len(self.nodes) - 1

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)

    def interval_of(self, t: float) -> int:
        """Index ``m`` with ``t_{m-1} < t <= t_m`` (1-based)."""
        if not 0 < t <= self.T:
            raise DomainError(f"t={t} outside (0, {self.T}]")
        return int(np.searchsorted(self.nodes, t, side="left"))

    def __len__(self) -> int:
        return len(self.nodes)


def graded_mesh(T: float, M: int, r: float) -> TemporalMesh:
    """Graded mesh ``t_j = T (j/M)**r``."""
    if M < 1:
        raise DomainError(f"M must be at least 1, got {M}")
    if r < 1:
        raise DomainError(f"grading exponent must be >= 1, got {r}")
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    j = np.arange(M + 1, dtype=float)
    nodes = T * (j / M) ** r
    nodes[-1] = T
    return TemporalMesh(nodes)


def uniform_mesh(T: float, M: int) -> TemporalMesh:
    return graded_mesh(T, M, 1.0)


class FirstIntervalMode(enum.Enum):
    #: Standard Lagrange piecewise-linear interpolant.
    Linear = "linear"
    #: ``u_h(t) = u^1`` on ``(0, t_1]``, discontinuous at ``t = 0``.
    ConstantEqualToU1 = "constant"


@dataclass(frozen=True)
class TimeGridFunction:
    """Node values ``values[j] = u_h(t_j)``, shape ``(M+1, N)``."""

    mesh: TemporalMesh
    values: np.ndarray
    first_interval_mode: FirstIntervalMode = FirstIntervalMode.Linear
    initial_jump: np.ndarray | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] != len(self.mesh):
            raise ShapeError(
                f"expected {len(self.mesh)} node vectors, got array of shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        constant = self.first_interval_mode is FirstIntervalMode.ConstantEqualToU1
        if constant and self.initial_jump is None:
            object.__setattr__(self, "initial_jump", values[1] - values[0])
        if not constant and self.initial_jump is not None:
            raise DomainError("initial_jump is only meaningful in ConstantEqualToU1 mode")
        if self.initial_jump is not None:
            jump = np.asarray(self.initial_jump, dtype=float).reshape(-1)
            if jump.shape != (values.shape[1],):
                raise ShapeError("initial_jump must match the spatial dimension")
            object.__setattr__(self, "initial_jump", jump)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def increments(self) -> np.ndarray:
        """``u^j - u^{j-1}`` for ``j = 1..M``, shape ``(M, N)``."""
        return np.diff(self.values, axis=0)

    def __call__(self, t: float) -> np.ndarray:
        """Value of the interpolant at time ``t`` (respecting the first-interval mode)."""
        nodes = self.mesh.nodes
        if not 0 <= t <= self.mesh.T:
            raise DomainError(f"t={t} outside [0, {self.mesh.T}]")
        if t == 0:
            return self.values[0].copy()
        m = self.mesh.interval_of(t)
        if m == 1 and self.first_interval_mode is FirstIntervalMode.ConstantEqualToU1:
            return self.values[1].copy()
        theta = (t - nodes[m - 1]) / (nodes[m] - nodes[m - 1])
        return (1 - theta) * self.values[m - 1] + theta * self.values[m]


@dataclass(frozen=True)
class CaputoSample:
    t: float
    value: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise DomainError("Caputo samples are defined for t > 0")


def _pow_diff_over_step(t: np.ndarray, left: np.ndarray, right: np.ndarray, g: float) -> np.ndarray:
    """``[(t-left)_+^g - (t-right)_+^g] / (right-left)`` broadcast over arrays.

    Entries with ``t <= left`` are zero.
    """
    a = t - left
    b = t - right
    step = right - left
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        far = b > 0
        bsafe = np.where(far, b, 1.0)
        # stable for b >> step
        far_val = bsafe**g * np.expm1(g * np.log1p(step / bsafe)) / step
        near_val = np.where(a > 0, np.where(a > 0, a, 0.0) ** g, 0.0) / step
    return np.where(far, far_val, np.where(a > 0, near_val, 0.0))


def caputo_weights(nodes: np.ndarray, alpha: float, times, n_intervals: int | None = None) -> np.ndarray:
    r"""Matrix ``W`` with ``D_t^alpha u_h(times) = W @ increments``.

    ``W[k, j-1]`` multiplies ``u^j - u^{j-1}``. Only the first ``n_intervals``
    intervals of ``nodes`` are used (default: all).
    """
    nodes = np.asarray(nodes, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    m = len(nodes) - 1 if n_intervals is None else n_intervals
    left = nodes[:m][None, :]
    right = nodes[1 : m + 1][None, :]
    w = _pow_diff_over_step(times[:, None], left, right, 1.0 - alpha)
    return w / gamma(2.0 - alpha)


def caputo_pwlinear(u: TimeGridFunction, alpha: float, t: float) -> CaputoSample:
    """Exact Caputo derivative of the piecewise-linear interpolant at ``t``."""
    if u.first_interval_mode is not FirstIntervalMode.Linear:
        raise DomainError("caputo_pwlinear needs a Linear-mode grid function")
    _check_alpha(alpha)
    if not 0 < t <= u.mesh.T:
        raise DomainError(f"t={t} outside (0, {u.mesh.T}]")
    w = caputo_weights(u.mesh.nodes, alpha, [t])[0]
    return CaputoSample(t, w @ u.increments)


def caputo_e0(alpha: float, t: float) -> float:
    """Caputo derivative of the unit step that jumps at ``t = 0``: ``t^-alpha / Gamma(1-alpha)``."""
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return t**-alpha / gamma(1.0 - alpha)


def sigma_correction(alpha: float, t1: float, t) -> float | np.ndarray:
    r"""``t^-alpha - [t^(1-alpha) - (t-t1)^(1-alpha)] / ((1-alpha) t1)`` for ``t > t1``.

    Converts the Caputo derivative of the standard interpolant into that of the
    interpolant held constant on ``(0, t1]`` (up to the ``1/Gamma(1-alpha)`` factor
    applied by the caller).
    """
    _check_alpha(alpha)
    ta = np.asarray(t, dtype=float)
    if not t1 > 0 or np.any(ta <= t1):
        raise DomainError("sigma_correction requires 0 < t1 < t")
    g = 1.0 - alpha
    b = ta - t1
    diff = b**g * np.expm1(g * np.log1p(t1 / b))
    out = ta**-alpha - diff / (g * t1)
    return float(out) if ta.ndim == 0 else out


def caputo_via_eq7(
    u: TimeGridFunction | Callable[[float], float],
    alpha: float,
    t: float,
    quad_tol: float = 1e-10,
    breakpoints: Sequence[float] = (),
) -> CaputoSample:
    r"""Caputo derivative through the integrated-by-parts representation

    .. math::

        \Gamma(1-\alpha) D_t^\alpha v(t) = t^{-\alpha} v(t)
            + \int_0^t \alpha (t-s)^{-\alpha-1} [v(t) - v(s)] \, ds,

    valid for ``v(0) = 0`` and also for functions that jump at ``t = 0``
    (``v(0+) != 0``). Intended as an independent check of
    :func:`caputo_pwlinear`; the integrals are computed by adaptive quadrature.

    ``u`` is either a Linear-mode :class:`TimeGridFunction` with ``u(0) = 0``
    or a scalar callable, smooth between the given ``breakpoints``.
    """
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")

    if isinstance(u, TimeGridFunction):
        if u.first_interval_mode is not FirstIntervalMode.Linear:
            raise DomainError("caputo_via_eq7 needs a Linear-mode grid function")
        if not 0 < t <= u.mesh.T:
            raise DomainError(f"t={t} outside (0, {u.mesh.T}]")
        if np.any(u.values[0] != 0):
            raise DomainError("the representation requires u(0) = 0")
        nodes = u.mesh.nodes
        m = u.mesh.interval_of(t)
        out = np.empty(u.dim)
        for i in range(u.dim):
            col = u.values[:, i]

            def v(s, col=col):
                return float(np.interp(s, nodes, col))

            slope = (col[m] - col[m - 1]) / (nodes[m] - nodes[m - 1])
            out[i] = _eq7_scalar(v, alpha, t, nodes[1:m], quad_tol, last_slope=slope)
        return CaputoSample(t, out)

    inner = [b for b in sorted(breakpoints) if 0 < b < t]
    return CaputoSample(t, np.array([_eq7_scalar(u, alpha, t, inner, quad_tol)]))


def _eq7_scalar(v, alpha, t, inner, quad_tol, last_slope=None) -> float:
    vt = v(t)
    pts = [0.0, *inner, t]
    total = t**-alpha * vt
    err = 0.0
    scale = abs(total)  # sum of piece magnitudes; each piece is solved to quad_tol relative
    for a, b in zip(pts[:-2], pts[1:-1]):
        val, e = integrate.quad(
            lambda s: alpha * (t - s) ** (-alpha - 1.0) * (vt - v(s)),
            a, b, epsabs=quad_tol * 1e-2, epsrel=quad_tol, limit=200,
        )
        total += val
        err += e
        scale += abs(val)
    a = pts[-2]
    if last_slope is not None:
        # v(t) - v(s) = slope (t - s) on the last piece
        total += alpha * last_slope * (t - a) ** (1.0 - alpha) / (1.0 - alpha)
    else:
        span = t - a
        # below delta the difference quotient loses digits to cancellation, so it
        # is continued linearly from its values at delta and 2 delta
        delta = 1e-5 * span

        def raw(d):
            return alpha * (vt - v(t - d)) / d

        q1 = raw(delta)
        dq = (q1 - raw(2.0 * delta)) / delta

        def q(s):
            d = t - s
            return q1 + dq * (delta - d) if d < delta else raw(d)

        # (t - s)^(-alpha) weight taken by the algebraic-singularity rule
        val, e = integrate.quad(q, a, t, weight="alg", wvar=(0.0, -alpha),
                                epsabs=quad_tol * 1e-2, epsrel=quad_tol, limit=200)
        total += val
        err += e
        scale += abs(val)
    if err > quad_tol * max(1.0, scale):
        raise AccuracyError("quadrature did not reach the requested tolerance", err)
    return total / gamma(1.0 - alpha)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
