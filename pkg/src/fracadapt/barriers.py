r"""Residual barriers and the error profiles they certify.

Keeping :math:`\|R_h(t)\| \le \mathrm{TOL}\,\mathcal{R}_p(t)` for all
:math:`t > 0` bounds the error by :math:`\mathrm{TOL}\,\mathcal{E}_p(t)`:

* ``R0`` / ``E0``: :math:`\mathcal{R}_0 = t^{-\alpha}/\Gamma(1-\alpha) + \lambda`,
  uniform profile :math:`\mathcal{E}_0 \equiv 1`;
* ``R1`` / ``E1``: :math:`\mathcal{R}_1 = \rho(\tau/t) / (t\,\Gamma(1-\alpha))
  + \lambda \max\{\tau, t\}^{\alpha-1}` with
  :math:`\rho(s) = s^{-\beta}[1 - ((1-s)^+)^\beta]`, :math:`\beta = 1-\alpha`,
  profile :math:`\mathcal{E}_1 = \max\{\tau, t\}^{\alpha-1}`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .specfun import gamma

__all__ = ["BarrierKind", "ProfileKind", "Barrier", "rho", "barrier_value", "profile_value"]


class BarrierKind(enum.Enum):
    R0 = "r0"
    R1 = "r1"


class ProfileKind(enum.Enum):
    E0 = "e0"
    E1 = "e1"


def rho(s, beta: float):
    """``s^-beta [1 - ((1-s)^+)^beta]``; equals ``s^-beta`` for ``s >= 1``."""
    sa = np.asarray(s, dtype=float)
    if np.any(sa <= 0):
        raise DomainError("rho is defined for s > 0")
    if not 0 < beta < 1:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    one_minus = np.maximum(1.0 - sa, 0.0)
    # 1 - (1-s)^beta = -expm1(beta*log1p(-s)) keeps digits for small s
    with np.errstate(divide="ignore"):
        bracket = np.where(one_minus > 0, -np.expm1(beta * np.log1p(-np.minimum(sa, 1.0))), 1.0)
    out = sa**-beta * bracket
    return float(out) if sa.ndim == 0 else out


@dataclass(frozen=True)
class Barrier:
    kind: BarrierKind
    alpha: float
    lam: float
    tau: float | None = None

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.lam < 0:
            raise DomainError("barriers require lambda >= 0")
        if self.kind is BarrierKind.R1 and not (self.tau is not None and self.tau > 0):
            raise DomainError("the R1 barrier needs tau > 0")

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    def with_tau(self, tau: float) -> "Barrier":
        return replace(self, tau=tau)

    def __call__(self, t):
        return barrier_value(self, t)


def barrier_value(b: Barrier, t):
    """Barrier ``R0`` or ``R1`` at ``t > 0`` (scalar or array)."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0):
        raise DomainError("barriers are evaluated at t > 0 only")
    g1 = gamma(1.0 - b.alpha)
    if b.kind is BarrierKind.R0:
        out = ta**-b.alpha / g1 + b.lam
    else:
        out = rho(b.tau / ta, b.beta) / (ta * g1) + b.lam * np.maximum(b.tau, ta) ** (b.alpha - 1.0)
    return float(out) if ta.ndim == 0 else out


def profile_value(kind: ProfileKind, alpha: float, t, tau: float | None = None):
    """Error profile ``E0`` (1 for ``t > 0``) or ``E1`` (``max(tau, t)^(alpha-1)``); both 0 at ``t = 0``."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise DomainError("profiles are defined for t >= 0")
    if kind is ProfileKind.E0:
        out = np.where(ta > 0, 1.0, 0.0)
    else:
        if tau is None or not tau > 0:
            raise DomainError("the E1 profile needs tau > 0")
        with np.errstate(divide="ignore"):
            out = np.where(ta > 0, np.maximum(tau, ta) ** (alpha - 1.0), 0.0)
    return float(out) if ta.ndim == 0 else out


PROFILE_OF = {BarrierKind.R0: ProfileKind.E0, BarrierKind.R1: ProfileKind.E1}
