r"""The three test problems, their exact or reference solutions, and error/rate tables.

* A: :math:`\mathcal{L} = 3`, :math:`T = 1`, :math:`u = t^\alpha - t^2`.
* B: :math:`\mathcal{L} = -\partial_x^2` on :math:`(0, \pi)`, :math:`T = 1`,
  :math:`u = (t^\alpha - t^2)\sin(x^2/\pi)`.
* C: :math:`\mathcal{L} = -\partial_x^2` on :math:`(0, \pi)`, :math:`T = 0.2`,
  :math:`f = 0`, piecewise-linear :math:`u_0` with a kink at :math:`x = 1`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .adapt import Problem
from .errors import DomainError, StateError
from .fracops import FirstIntervalMode, TimeGridFunction, graded_mesh
from .spatial import Laplacian1D, Norm, ScalarShift
from .specfun import gamma
from .stepper import l1_solve_all

__all__ = [
    "TestProblem",
    "problem_a",
    "problem_b",
    "problem_c",
    "manufactured_f",
    "ErrorMetrics",
    "error_metrics",
    "reference_solution_c",
    "RateTable",
    "rate_table",
    "fitted_rate",
    "optimal_grading",
]

DEFAULT_NX_B = 2000
DEFAULT_NX_C = 4000


def optimal_grading(alpha: float) -> float:
    """Grading exponent ``(2 - alpha) / alpha``."""
    return (2.0 - alpha) / alpha


def _time_factor(alpha: float, t: float) -> tuple[float, float]:
    """``(t^a - t^2, D_t^a (t^a - t^2))``."""
    if t == 0:
        return 0.0, gamma(1.0 + alpha)
    u = t**alpha - t * t
    du = gamma(1.0 + alpha) - 2.0 * t ** (2.0 - alpha) / gamma(3.0 - alpha)
    return u, du


@dataclass
class TestProblem:
    """One of the test problems A, B, C at a given order ``alpha``."""

    __test__ = False  # not a pytest class

    id: str
    alpha: float
    T: float
    op: ScalarShift | Laplacian1D
    u0: np.ndarray
    f: Callable[[float], np.ndarray]
    exact: Callable[[float], np.ndarray] | None = None
    reference: np.ndarray | None = field(default=None, repr=False)

    @property
    def lam(self) -> float:
        return self.op.lam

    @property
    def residual_mode(self) -> str:
        return "problem_c" if self.id == "C" else "standard"

    @property
    def interpolation(self) -> FirstIntervalMode:
        if self.id == "C":
            return FirstIntervalMode.ConstantEqualToU1
        return FirstIntervalMode.Linear

    def as_problem(self) -> Problem:
        return Problem(self.alpha, self.op, self.f, self.u0, self.T, self.residual_mode)

    def solve_graded(self, M: int, r: float | None = None) -> TimeGridFunction:
        r = optimal_grading(self.alpha) if r is None else r
        mesh = graded_mesh(self.T, M, r)
        return l1_solve_all(self.alpha, self.op, mesh, self.u0, self.f, self.interpolation)


def problem_a(alpha: float) -> TestProblem:
    op = ScalarShift(3.0)

    def f(t: float) -> np.ndarray:
        u, du = _time_factor(alpha, t)
        return np.array([du + 3.0 * u])

    def exact(t: float) -> np.ndarray:
        return np.array([_time_factor(alpha, t)[0]])

    return TestProblem("A", alpha, 1.0, op, np.zeros(1), f, exact)


def problem_b(alpha: float, n_intervals: int = DEFAULT_NX_B) -> TestProblem:
    op = Laplacian1D(math.pi, n_intervals, lam=1.0)
    x = op.grid
    shape = np.sin(x * x / math.pi)
    # -d^2/dx^2 sin(x^2/pi), continuum
    l_shape = -2.0 / math.pi * np.cos(x * x / math.pi) + 4.0 * x * x / math.pi**2 * shape

    def f(t: float) -> np.ndarray:
        u, du = _time_factor(alpha, t)
        return du * shape + u * l_shape

    def exact(t: float) -> np.ndarray:
        return _time_factor(alpha, t)[0] * shape

    return TestProblem("B", alpha, 1.0, op, np.zeros(op.dim), f, exact)


def initial_data_c(x: np.ndarray) -> np.ndarray:
    return np.where(x <= 1.0, x, 1.0 - (x - 1.0) / (math.pi - 1.0))


def problem_c(alpha: float, n_intervals: int = DEFAULT_NX_C) -> TestProblem:
    op = Laplacian1D(math.pi, n_intervals, lam=1.0)
    zero = np.zeros(op.dim)

    def f(t: float) -> np.ndarray:
        return zero

    return TestProblem("C", alpha, 0.2, op, initial_data_c(op.grid), f)


def manufactured_f(problem: TestProblem, t: float) -> np.ndarray:
    """Forcing of the manufactured problems A and B."""
    if problem.id not in ("A", "B"):
        raise DomainError("manufactured forcing exists for problems A and B only")
    return problem.f(t)


@dataclass(frozen=True)
class ErrorMetrics:
    max_node_error: float
    terminal_error: float
    node_errors: np.ndarray = field(repr=False)


def error_metrics(solution: TimeGridFunction, problem: TestProblem, which: Norm = Norm.L2) -> ErrorMetrics:
    """Nodal errors against the exact solution (A, B) or the terminal reference (C)."""
    op = problem.op
    if problem.exact is not None:
        errs = np.array(
            [op.norm(solution.values[j] - problem.exact(float(t)), which) for j, t in enumerate(solution.mesh.nodes)]
        )
        return ErrorMetrics(float(np.max(errs[1:])), float(errs[-1]), errs)
    if problem.reference is None:
        raise StateError(f"problem {problem.id} has no exact solution and no reference was computed")
    err = op.norm(solution.values[-1] - problem.reference, which)
    errs = np.full(len(solution.mesh.nodes), np.nan)
    errs[-1] = err
    return ErrorMetrics(err, err, errs)


def reference_solution_c(problem: TestProblem, M_ref: int, r: float | None = None) -> np.ndarray:
    """Terminal snapshot of an L1 solve on a fine graded mesh (same spatial grid)."""
    sol = problem.solve_graded(M_ref, r)
    return sol.values[-1].copy()


@dataclass(frozen=True)
class RateTable:
    """Consecutive observed rates ``log(e_i/e_{i+1}) / log(M_{i+1}/M_i)``."""

    M: np.ndarray
    errors: np.ndarray
    rates: np.ndarray  # rates[0] is nan; rates[i] pairs rows i-1 and i
    tol: np.ndarray | None = None


def rate_table(runs: Sequence[tuple[int, float]], tols: Sequence[float] | None = None) -> RateTable:
    if len(runs) < 2:
        raise DomainError("a rate table needs at least two runs")
    M = np.array([r[0] for r in runs], dtype=float)
    e = np.array([r[1] for r in runs], dtype=float)
    if len(set(M)) != len(M):
        raise DomainError("runs must have distinct M")
    rates = np.full(len(M), np.nan)
    for i in range(1, len(M)):
        if e[i - 1] > 0 and e[i] > 0:
            rates[i] = math.log(e[i - 1] / e[i]) / math.log(M[i] / M[i - 1])
    return RateTable(M, e, rates, None if tols is None else np.asarray(tols, dtype=float))


def fitted_rate(M: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``-log(error)`` against ``log(M)``."""
    lm = np.log(np.asarray(M, dtype=float))
    le = np.log(np.asarray(errors, dtype=float))
    slope = np.polyfit(lm, le, 1)[0]
    return float(-slope)
