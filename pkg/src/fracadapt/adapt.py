"""Adaptive construction of the temporal mesh.

Each step starts from a proposed node. A trial that passes the residual
check is stashed and the step is enlarged by ``Q``; the first failure after a
pass restores the stash and accepts it. A failure with nothing stashed
shrinks the step by ``Q``. A passing trial that reaches ``T`` ends the run.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .barriers import Barrier, BarrierKind
from .errors import DomainError, NonConvergenceError
from .fracops import FirstIntervalMode, TemporalMesh, TimeGridFunction
from .residual import (
    CheckResult,
    IntervalData,
    JumpAtZero,
    ProblemC,
    ResidualMode,
    SamplePlan,
    Standard,
    check_norms,
    interval_residual_norms,
)
from .spatial import Norm, SpatialOperator
from .stepper import L1State, l1_step

__all__ = ["AdaptConfig", "StepRecord", "AdaptiveRunReport", "Problem", "adaptive_solve"]

logger = logging.getLogger(__name__)

# trial nodes this close to T (relative) are snapped onto T
_SNAP = 1e-14


@dataclass(frozen=True)
class Problem:
    """Data of ``D_t^alpha u + L u = f`` on ``(0, T]`` with ``u(0) = u0``."""

    alpha: float
    op: SpatialOperator
    f: Callable[[float], np.ndarray]
    u0: np.ndarray
    T: float
    mode: str = "standard"  # "standard" or "problem_c"
    jump: np.ndarray | None = None

    @property
    def lam(self) -> float:
        return self.op.lam


@dataclass(frozen=True)
class AdaptConfig:
    tol: float
    barrier_kind: BarrierKind = BarrierKind.R0
    Q: float = 1.1
    tau_star: float | None = None
    tau_star_star: float = 0.0
    max_retries_per_step: int = 10000
    plan: SamplePlan = SamplePlan()
    norm: Norm = Norm.L2

    def __post_init__(self) -> None:
        if not self.Q > 1:
            raise DomainError(f"Q must exceed 1, got {self.Q}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.tau_star is not None and not self.tau_star > 0:
            raise DomainError("tau_star must be positive")
        if self.tau_star_star < 0:
            raise DomainError("tau_star_star must be non-negative")

    def initial_step(self, alpha: float) -> float:
        if self.tau_star is not None:
            return self.tau_star
        if self.barrier_kind is BarrierKind.R0:
            return 5.0 * self.tol ** (1.0 / alpha)
        return self.tol


@dataclass(frozen=True)
class StepRecord:
    t: float
    step: float
    trials: int
    worst_ratio: float
    t_worst: float
    path: str  # "restored" (flag=1 acceptance) or "final" (trial reached T)


@dataclass
class AdaptiveRunReport:
    mesh: TemporalMesh
    solution: TimeGridFunction
    per_step: list[StepRecord]
    barrier: Barrier
    config: AdaptConfig

    @property
    def M(self) -> int:
        return self.mesh.M

    @property
    def total_trials(self) -> int:
        return sum(r.trials for r in self.per_step)


def make_barrier(kind: BarrierKind, alpha: float, lam: float, tau: float | None = None) -> Barrier:
    return Barrier(kind, alpha, lam, tau if kind is BarrierKind.R1 else None)


def _residual_mode(problem: Problem, t1: float, u1: np.ndarray) -> ResidualMode:
    if problem.mode == "problem_c":
        return ProblemC(t1, u1 - problem.u0)
    if problem.jump is not None:
        return JumpAtZero(np.asarray(problem.jump, dtype=float))
    return Standard()


def check_trial(
    problem: Problem,
    state: L1State,
    t_new: float,
    u_new: np.ndarray,
    barrier: Barrier,
    config: AdaptConfig,
    u1: np.ndarray,
    t1: float,
    f0: np.ndarray,
    lu0: np.ndarray | None,
) -> CheckResult:
    data = IntervalData(
        alpha=problem.alpha,
        hist_nodes=state.nodes,
        hist_incr=state.increments,
        u_left=state.history[-1],
        t_right=t_new,
        u_right=u_new,
        u0=state.history[0],
        f0=f0,
        lu0=lu0,
    )
    times = config.plan.points(state.last_time, t_new)
    mode = _residual_mode(problem, t1, u1)
    norms = interval_residual_norms(data, times, problem.op, problem.f, mode, config.norm)
    return check_norms(times, norms, barrier, config.tol)


def adaptive_solve(problem: Problem, config: AdaptConfig) -> AdaptiveRunReport:
    """Build an adaptive mesh on ``[0, T]`` and the L1 solution on it."""
    alpha, T = problem.alpha, problem.T
    state = L1State(alpha, problem.op, problem.u0, problem.f)
    f0 = np.asarray(problem.f(0.0), dtype=float).reshape(-1)
    lu0 = None if problem.mode == "problem_c" else problem.op.apply(problem.u0)
    barrier = make_barrier(config.barrier_kind, alpha, problem.lam, config.initial_step(alpha))

    records: list[StepRecord] = []
    t_trial = min(config.initial_step(alpha), T)
    u1 = t1 = None
    m = 0
    while state.last_time < T:
        m += 1
        flag = False
        stash: tuple[float, np.ndarray, CheckResult] | None = None
        t_prev = state.last_time
        trials = 0
        last: CheckResult | None = None
        while t_trial - t_prev > config.tau_star_star:
            if trials >= config.max_retries_per_step:
                raise NonConvergenceError(m, trials, last.worst_ratio if last else math.nan, t_trial)
            trials += 1
            if T - t_trial < _SNAP * T:
                t_trial = T
            u_new = l1_step(state, t_trial)
            if m == 1:
                # tau := t_1 follows the current trial of the first step
                if config.barrier_kind is BarrierKind.R1:
                    barrier = barrier.with_tau(t_trial)
                cur_u1, cur_t1 = u_new, t_trial
            else:
                cur_u1, cur_t1 = u1, t1
            last = check_trial(problem, state, t_trial, u_new, barrier, config, cur_u1, cur_t1, f0, lu0)
            if last.passed:
                if t_trial == T:
                    _accept(state, records, t_trial, u_new, trials, last, "final")
                    break
                stash = (t_trial, u_new, last)
                t_trial = min(t_prev + config.Q * (t_trial - t_prev), T)
                flag = True
            elif not flag:
                t_trial = t_prev + (t_trial - t_prev) / config.Q
            else:
                t_acc, u_acc, res = stash
                _accept(state, records, t_acc, u_acc, trials, res, "restored")
                t_trial = min(t_acc + (t_acc - t_prev), T)
                break
        else:
            raise NonConvergenceError(m, trials, last.worst_ratio if last else math.nan, t_trial)
        if m == 1:
            t1, u1 = float(state.nodes[1]), state.history[1].copy()
            if config.barrier_kind is BarrierKind.R1:
                barrier = barrier.with_tau(t1)
        logger.debug("step %d accepted t=%.6e after %d trials", m, state.last_time, trials)

    mode = FirstIntervalMode.ConstantEqualToU1 if problem.mode == "problem_c" else FirstIntervalMode.Linear
    mesh = TemporalMesh(state.nodes.copy())
    solution = TimeGridFunction(mesh, state.history.copy(), mode)
    return AdaptiveRunReport(mesh, solution, records, barrier, config)


def _accept(state, records, t, u, trials, res: CheckResult, path: str) -> None:
    step = t - state.last_time
    state.accept(t, u)
    records.append(StepRecord(t, step, trials, res.worst_ratio, res.t_worst, path))
