"""Adaptive L1 time stepping for time-fractional parabolic equations."""

from .adapt import AdaptConfig, AdaptiveRunReport, Problem, StepRecord, adaptive_solve
from .barriers import Barrier, BarrierKind, ProfileKind, barrier_value, profile_value, rho
from .bounds import ResidualTrace, inv_op_apply, residual_trace, sup_bounds
from .errors import (
    AccuracyError,
    DomainError,
    FracAdaptError,
    NonConvergenceError,
    ShapeError,
    StateError,
)
from .fracops import (
    FirstIntervalMode,
    TemporalMesh,
    TimeGridFunction,
    caputo_pwlinear,
    caputo_via_eq7,
    graded_mesh,
    uniform_mesh,
)
from .residual import Distribution, JumpAtZero, ProblemC, SamplePlan, Standard, interval_check
from .spatial import Laplacian1D, Norm, ScalarShift
from .specfun import MlfAccuracy, gamma, mlf
from .stepper import L1State, l1_solve_all, l1_step

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AdaptConfig",
    "AdaptiveRunReport",
    "Barrier",
    "BarrierKind",
    "Distribution",
    "DomainError",
    "FirstIntervalMode",
    "FracAdaptError",
    "JumpAtZero",
    "L1State",
    "Laplacian1D",
    "MlfAccuracy",
    "NonConvergenceError",
    "Norm",
    "Problem",
    "ProblemC",
    "ProfileKind",
    "ResidualTrace",
    "SamplePlan",
    "ScalarShift",
    "ShapeError",
    "Standard",
    "StateError",
    "StepRecord",
    "TemporalMesh",
    "TimeGridFunction",
    "adaptive_solve",
    "barrier_value",
    "caputo_pwlinear",
    "caputo_via_eq7",
    "gamma",
    "graded_mesh",
    "interval_check",
    "inv_op_apply",
    "l1_solve_all",
    "l1_step",
    "mlf",
    "profile_value",
    "residual_trace",
    "rho",
    "sup_bounds",
    "uniform_mesh",
]
