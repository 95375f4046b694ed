r"""The L1 method on an arbitrary temporal mesh.

At each new node the collocation condition
:math:`D_t^\alpha u_h(t_m) + \mathcal{L}_h u^m = f(t_m)` is solved for
:math:`u^m`, i.e.

.. math::

    (\mu_m I + \mathcal{L}_h) u^m = f(t_m) + \mu_m u^{m-1} - H_m,
    \qquad \mu_m = \frac{\tau_m^{-\alpha}}{\Gamma(2-\alpha)},

where :math:`H_m` is the contribution of the already accepted intervals.
The history is recomputed from the stored increments at every step.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DomainError, ShapeError
from .fracops import FirstIntervalMode, TemporalMesh, TimeGridFunction, _pow_diff_over_step
from .spatial import SpatialOperator
from .specfun import gamma

__all__ = ["L1State", "l1_step", "l1_solve_all"]

RhsProvider = Callable[[float], np.ndarray]


class L1State:
    """Accepted nodes and node values of an L1 computation in progress."""

    def __init__(self, alpha: float, op: SpatialOperator, u0, rhs_provider: RhsProvider) -> None:
        if not 0 < alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
        self.alpha = float(alpha)
        self.op = op
        self.rhs_provider = rhs_provider
        self._gamma2 = gamma(2.0 - alpha)
        u0 = np.asarray(u0, dtype=float).reshape(-1)
        if u0.shape != (op.dim,):
            raise ShapeError(f"u0 has length {u0.shape[0]}, operator needs {op.dim}")
        cap = 64
        self._nodes = np.zeros(cap)
        self._values = np.zeros((cap, op.dim))
        self._values[0] = u0
        self._incr = np.zeros((cap, op.dim))
        self._n = 1

    @property
    def n_nodes(self) -> int:
        return self._n

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes[: self._n]

    @property
    def history(self) -> np.ndarray:
        return self._values[: self._n]

    @property
    def increments(self) -> np.ndarray:
        """``u^j - u^{j-1}`` for the accepted intervals."""
        return self._incr[: self._n - 1]

    @property
    def last_time(self) -> float:
        return float(self._nodes[self._n - 1])

    def accept(self, t_new: float, u_new: np.ndarray) -> None:
        if not t_new > self.last_time:
            raise DomainError(f"t_new={t_new} must exceed the last node {self.last_time}")
        if self._n == len(self._nodes):
            self._nodes = np.concatenate([self._nodes, np.zeros(len(self._nodes))])
            self._values = np.concatenate([self._values, np.zeros_like(self._values)])
            self._incr = np.concatenate([self._incr, np.zeros_like(self._incr)])
        self._nodes[self._n] = t_new
        self._values[self._n] = u_new
        self._incr[self._n - 1] = self._values[self._n] - self._values[self._n - 1]
        self._n += 1

    def history_term(self, t_new: float) -> np.ndarray:
        """Caputo contribution of accepted intervals at ``t_new``."""
        if self._n < 2:
            return np.zeros(self.op.dim)
        nodes = self.nodes
        w = _pow_diff_over_step(t_new, nodes[:-1], nodes[1:], 1.0 - self.alpha)
        return (w @ self.increments) / self._gamma2

    def to_grid_function(self) -> TimeGridFunction:
        return TimeGridFunction(TemporalMesh(self.nodes.copy()), self.history.copy())


def l1_step(state: L1State, t_new: float) -> np.ndarray:
    """Compute ``u^m`` at the trial node ``t_new`` without accepting it."""
    t_prev = state.last_time
    if not t_new > t_prev:
        raise DomainError(f"t_new={t_new} must exceed the last node {t_prev}")
    tau = t_new - t_prev
    mu = tau**-state.alpha / state._gamma2
    f = np.asarray(state.rhs_provider(t_new), dtype=float).reshape(-1)
    rhs = f + mu * state.history[-1] - state.history_term(t_new)
    return state.op.solve_shifted(mu, rhs)


def l1_solve_all(
    alpha: float,
    op: SpatialOperator,
    mesh: TemporalMesh,
    u0,
    rhs_provider: RhsProvider,
    first_interval_mode: FirstIntervalMode = FirstIntervalMode.Linear,
) -> TimeGridFunction:
    """Run the L1 method over every node of ``mesh``.

    ``first_interval_mode`` only changes how the result is interpolated on
    ``(0, t_1]``; the node values are those of the standard scheme.
    """
    state = L1State(alpha, op, u0, rhs_provider)
    for t in mesh.nodes[1:]:
        state.accept(float(t), l1_step(state, float(t)))
    return TimeGridFunction(mesh, state.history.copy(), first_interval_mode)
