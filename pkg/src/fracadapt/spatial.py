"""Spatial operators: a scalar shift and the 1-D Dirichlet finite-difference Laplacian.

Spatial vectors are plain 1-D ``numpy`` arrays. For :class:`Laplacian1D` they
hold the ``n_intervals - 1`` interior nodal values; boundary values are zero
and never stored. For :class:`ScalarShift` they have length one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, ShapeError

__all__ = ["Norm", "ScalarShift", "Laplacian1D", "SpatialOperator", "norm"]


class Norm(enum.Enum):
    L2 = "l2"
    Linf = "linf"


@dataclass(frozen=True)
class ScalarShift:
    """``L v = c v`` on a single degree of freedom; coercivity constant ``lambda = c``."""

    c: float

    @property
    def lam(self) -> float:
        return self.c

    @property
    def dim(self) -> int:
        return 1

    @property
    def h(self) -> float:
        return 1.0

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = _as_vec(v, 1)
        return self.c * v

    def solve_shifted(self, mu: float, rhs: np.ndarray) -> np.ndarray:
        """Solve ``(mu + c) w = rhs``."""
        rhs = _as_vec(rhs, 1)
        if not mu > 0:
            raise DomainError(f"shift must be positive, got {mu}")
        return rhs / (mu + self.c)

    def norm(self, v: np.ndarray, which: Norm = Norm.L2) -> float:
        return float(np.max(np.abs(_as_vec(v, 1))))


@dataclass(frozen=True)
class Laplacian1D:
    """``-d^2/dx^2 + reaction`` on ``(0, domain_length)`` with homogeneous Dirichlet data.

    Three-point stencil on a uniform grid of ``n_intervals`` cells. ``lam`` is
    the coercivity constant reported to the barriers; it is configuration,
    not computed.
    """

    domain_length: float
    n_intervals: int
    reaction: float = 0.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.n_intervals < 2:
            raise DomainError("Laplacian1D needs at least two intervals")
        if not self.domain_length > 0:
            raise DomainError("domain_length must be positive")
        if self.reaction < 0 or self.lam < 0:
            raise DomainError("reaction and lam must be non-negative")

    @property
    def dim(self) -> int:
        return self.n_intervals - 1

    @property
    def h(self) -> float:
        return self.domain_length / self.n_intervals

    @property
    def grid(self) -> np.ndarray:
        """Interior node coordinates."""
        return self.h * np.arange(1, self.n_intervals)

    def smallest_eigenvalue(self) -> float:
        """Smallest eigenvalue of the discrete operator (closed form)."""
        h = self.h
        return 4.0 / h**2 * math.sin(math.pi * h / (2.0 * self.domain_length)) ** 2 + self.reaction

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = _as_vec(v, self.dim)
        out = (2.0 + self.reaction * self.h**2) * v
        out[1:] -= v[:-1]
        out[:-1] -= v[1:]
        return out / self.h**2

    def solve_shifted(self, mu: float, rhs: np.ndarray) -> np.ndarray:
        """Solve ``(mu I + L_h) w = rhs`` by banded (tridiagonal) elimination."""
        rhs = _as_vec(rhs, self.dim)
        if not mu > 0:
            raise DomainError(f"shift must be positive, got {mu}")
        inv_h2 = 1.0 / self.h**2
        ab = np.empty((3, self.dim))
        ab[0, :] = -inv_h2
        ab[1, :] = 2.0 * inv_h2 + self.reaction + mu
        ab[2, :] = -inv_h2
        return solve_banded((1, 1), ab, rhs, check_finite=False)

    def norm(self, v: np.ndarray, which: Norm = Norm.L2) -> float:
        v = _as_vec(v, self.dim)
        if which is Norm.Linf:
            return float(np.max(np.abs(v))) if len(v) else 0.0
        return float(math.sqrt(self.h * float(v @ v)))

    def inner(self, v: np.ndarray, w: np.ndarray) -> float:
        """Lumped-mass discrete inner product ``h sum v_i w_i``."""
        return self.h * float(_as_vec(v, self.dim) @ _as_vec(w, self.dim))


SpatialOperator = ScalarShift | Laplacian1D


def norm(op: SpatialOperator, v: np.ndarray, which: Norm = Norm.L2) -> float:
    """Discrete L2 (lumped mass) or max norm of a spatial vector."""
    return op.norm(v, which)


def _as_vec(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (n,):
        raise ShapeError(f"expected a spatial vector of length {n}, got {v.shape}")
    return v
