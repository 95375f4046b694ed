r"""A posteriori error bounds evaluated from a sampled residual trace.

The convolution bound applies the resolvent

.. math::

    (D_t^\alpha + \lambda)^{-1} v(t) = \int_0^t (t-s)^{\alpha-1}
        E_{\alpha,\alpha}(-\lambda (t-s)^\alpha) v(s)\, ds

to the residual norm, held piecewise constant around each sample. On a cell
:math:`[a, b]` the kernel integrates exactly to
:math:`[E_{\alpha,1}(-\lambda(t-b)^\alpha) - E_{\alpha,1}(-\lambda(t-a)^\alpha)]/\lambda`
(or :math:`[(t-a)^\alpha - (t-b)^\alpha]/\Gamma(1+\alpha)` for :math:`\lambda = 0`).

These are diagnostics only; the adaptive controller does not use them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .barriers import Barrier, BarrierKind, barrier_value
from .errors import DomainError
from .fracops import TimeGridFunction
from .residual import ResidualMode, SamplePlan, _check_mode, _interval_data, interval_residual_norms
from .spatial import Norm, SpatialOperator
from .specfun import gamma, mlf

__all__ = ["ResidualTrace", "residual_trace", "inv_op_apply", "sup_bounds"]


@dataclass(frozen=True)
class ResidualTrace:
    times: np.ndarray
    norms: np.ndarray
    alpha: float
    lam: float

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        norms = np.asarray(self.norms, dtype=float)
        if times.shape != norms.shape or times.ndim != 1 or len(times) == 0:
            raise DomainError("times and norms must be non-empty 1-D arrays of equal length")
        if np.any(times <= 0) or np.any(np.diff(times) <= 0):
            raise DomainError("trace times must be positive and strictly increasing")
        if not np.all(np.isfinite(norms)) or np.any(norms < 0):
            raise DomainError("trace norms must be finite and non-negative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "norms", norms)

    @property
    def cell_edges(self) -> np.ndarray:
        """Cells ``[edges[i], edges[i+1]]`` hold ``norms[i]``."""
        s = self.times
        return np.concatenate([[0.0], 0.5 * (s[:-1] + s[1:]), [s[-1]]])


def residual_trace(
    u: TimeGridFunction,
    mode: ResidualMode,
    op: SpatialOperator,
    f: Callable,
    alpha: float,
    plan: SamplePlan = SamplePlan(),
    which: Norm = Norm.L2,
    include_nodes: bool = True,
) -> ResidualTrace:
    """Sample ``||R_h||`` on every interval of ``u`` (optionally at the nodes too)."""
    _check_mode(u, mode)
    times, norms = [], []
    nodes = u.mesh.nodes
    for m in range(1, u.mesh.M + 1):
        ts = plan.points(float(nodes[m - 1]), float(nodes[m]))
        if include_nodes:
            ts = np.append(ts, nodes[m])
        times.append(ts)
        norms.append(interval_residual_norms(_interval_data(u, alpha, m), ts, op, f, mode, which))
    return ResidualTrace(np.concatenate(times), np.concatenate(norms), alpha, op.lam)


def inv_op_apply(trace: ResidualTrace, t: float, hold: str = "midpoint") -> float:
    """Resolvent of ``D_t^alpha + lambda`` applied to the held residual trace, at ``t``.

    ``hold="midpoint"`` holds each sample on its midpoint cell. ``hold="max"``
    holds the largest of each sample and its two neighbours instead, which
    gives a conservative bound when the residual peaks between samples.
    """
    if hold not in ("midpoint", "max"):
        raise DomainError(f"unknown hold rule {hold!r}")
    if not 0 < t <= trace.times[-1]:
        raise DomainError(f"t={t} outside the trace coverage (0, {trace.times[-1]}]")
    alpha, lam = trace.alpha, trace.lam
    edges = trace.cell_edges
    n = int(np.searchsorted(edges, t, side="left"))  # cells 0..n-1 intersect (0, t)
    lo = edges[:n]
    hi = np.minimum(edges[1 : n + 1], t)
    v = trace.norms
    if hold == "max":
        v = np.maximum(v, np.maximum(np.r_[v[1:], v[-1]], np.r_[v[0], v[:-1]]))
    v = v[:n]
    da = t - lo
    db = t - hi
    if lam == 0:
        w = (da**alpha - db**alpha) / gamma(1.0 + alpha)
    else:
        ea = mlf(alpha, 1.0, -lam * da**alpha)
        eb = mlf(alpha, 1.0, -lam * db**alpha)
        w = (eb - ea) / lam
    return float(np.dot(w, v))


def sup_bounds(trace: ResidualTrace, barrier: Barrier, t: float) -> float:
    """Sup-form bound: ``max ||R||/R0`` or ``E1(t) max ||R||/R1`` over samples ``<= t``."""
    if not 0 < t <= trace.times[-1]:
        raise DomainError(f"t={t} outside the trace coverage (0, {trace.times[-1]}]")
    k = int(np.searchsorted(trace.times, t, side="right"))
    if k == 0:
        return 0.0
    ratio = float(np.max(trace.norms[:k] / barrier_value(barrier, trace.times[:k])))
    if barrier.kind is BarrierKind.R0:
        return ratio
    return ratio * max(barrier.tau, t) ** (barrier.alpha - 1.0)
