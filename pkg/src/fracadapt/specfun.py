r"""Gamma and two-parameter Mittag-Leffler functions on the non-positive axis.

The Mittag-Leffler function

.. math::

    E_{\alpha,\beta}(x) = \sum_{k=0}^\infty \frac{x^k}{\Gamma(\alpha k + \beta)}

is evaluated for :math:`0 < \alpha \le 1`, :math:`\beta > 0` and real
:math:`x \le 0` by one of four routes, chosen per argument:

* the power series with compensated summation, for small :math:`|x|`;
* the algebraic asymptotic expansion with optimal truncation, for large
  :math:`|x|` where the exponentially small remainder is negligible;
* a real integral representation on :math:`(0, \infty)` discretized by a
  double-exponential trapezoidal rule, in between;
* for :math:`\alpha = 1`, the Kummer-transformed series
  :math:`E_{1,\beta}(-y) = e^{-y} M(\beta - 1, \beta, y) / \Gamma(\beta)`,
  whose terms share one sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import AccuracyError, DomainError

__all__ = ["MlfAccuracy", "gamma", "mlf"]

# Summation stops once a term drops below this fraction of the partial sum.
_EPS_STOP = 2.0**-56
# Asymptotic expansion is trusted only where exp(-|x|^(1/alpha)) is below 1e-17.
_EXP_REMAINDER_EXPONENT = 40.0
# Kummer series for alpha == 1 is used up to this |x|; the asymptotic beyond.
_KUMMER_LIMIT = 40.0
# Trapezoidal steps for the double-exponential rule: 1/64 ... 1/1024.
_DE_LEVELS = 5
_DE_TAU = (-4.5, 3.5)
_DE_CHUNK = 4096


@dataclass(frozen=True)
class MlfAccuracy:
    """Evaluation policy for :func:`mlf`.

    ``switch_point`` is the magnitude above which the asymptotic expansion is
    attempted; ``series_radius`` bounds the power-series region.
    """

    rel_tol: float = 1e-12
    switch_point: float = 5.0
    max_terms: int = 200
    series_radius: float = 0.5

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.switch_point > 0:
            raise DomainError(f"switch_point must be positive, got {self.switch_point}")
        if self.max_terms < 10:
            raise DomainError(f"max_terms must be at least 10, got {self.max_terms}")
        if not 0 < self.series_radius <= self.switch_point:
            raise DomainError("series_radius must lie in (0, switch_point]")


DEFAULT_ACCURACY = MlfAccuracy()


def gamma(x: float) -> float:
    """Gamma function for finite positive arguments."""
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"gamma is only provided for finite x > 0, got {x}")
    return math.gamma(x)


def mlf(alpha: float, beta: float, x, acc: MlfAccuracy | None = None):
    r"""Evaluate :math:`E_{\alpha,\beta}(x)` for real :math:`x \le 0`.

    ``x`` may be a scalar or an array; the result has the same shape.

    Raises
    ------
    DomainError
        If ``alpha`` is outside ``(0, 1]``, ``beta <= 0`` or any ``x > 0``.
    AccuracyError
        If ``acc.rel_tol`` cannot be met within the configured budget.
    """
    acc = DEFAULT_ACCURACY if acc is None else acc
    alpha = float(alpha)
    beta = float(beta)
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"beta must be positive, got {beta}")

    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("mlf requires finite arguments")
    if np.any(xa > 0):
        raise DomainError("mlf is only provided on the non-positive real axis")

    y = -xa.ravel()
    out = _mlf_neg(alpha, beta, y, acc)
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def _mlf_neg(alpha: float, beta: float, y: np.ndarray, acc: MlfAccuracy) -> np.ndarray:
    """E_{alpha,beta}(-y) for y >= 0 (1-D array)."""
    out = np.empty_like(y)
    zero = y == 0
    out[zero] = special.rgamma(beta)
    rest = ~zero
    if not rest.any():
        return out

    if alpha == 1.0:
        if beta == 1.0:
            out[rest] = np.exp(-y[rest])
            return out
        small = rest & (y <= _KUMMER_LIMIT)
        if small.any():
            out[small] = _kummer_alpha_one(beta, y[small], acc)
        large = rest & ~small
        if large.any():
            vals, ok, est = _asymptotic(alpha, beta, y[large], acc)
            if not ok.all():
                raise AccuracyError("asymptotic expansion did not converge", float(est.max()))
            out[large] = vals
        return out

    series = rest & (y <= acc.series_radius)
    if series.any():
        out[series] = _series(alpha, beta, y[series], acc)

    pending = rest & ~series
    asym = pending & (y > acc.switch_point) & (y ** (1.0 / alpha) >= _EXP_REMAINDER_EXPONENT)
    if asym.any():
        vals, ok, _ = _asymptotic(alpha, beta, y[asym], acc)
        idx = np.flatnonzero(asym)
        out[idx[ok]] = vals[ok]
        pending[idx[ok]] = False

    if pending.any():
        out[pending] = _integral(alpha, beta, y[pending], acc)
    return out


def _series(alpha: float, beta: float, y: np.ndarray, acc: MlfAccuracy) -> np.ndarray:
    """Defining power series with Neumaier-compensated summation."""
    z = -y
    s = np.full_like(y, special.rgamma(beta))
    comp = np.zeros_like(y)
    zk = np.ones_like(y)
    term = s
    for k in range(1, acc.max_terms + 1):
        zk = zk * z
        term = zk * special.rgamma(alpha * k + beta)
        t = s + term
        big = np.abs(s) >= np.abs(term)
        comp += np.where(big, (s - t) + term, (term - t) + s)
        s = t
        if np.all(np.abs(term) <= _EPS_STOP * np.abs(s + comp)) and k > 2:
            return s + comp
    total = s + comp
    est = float(np.max(np.abs(term) / np.maximum(np.abs(total), np.finfo(float).tiny)))
    if est > acc.rel_tol:
        raise AccuracyError("power series did not converge within max_terms", est)
    return total


def _asymptotic(alpha: float, beta: float, y: np.ndarray, acc: MlfAccuracy):
    """Algebraic expansion -sum_{k>=1} x^{-k} / Gamma(beta - alpha k).

    Returns values, a per-element success mask and the error estimate (the
    smallest neglected term relative to the sum).
    """
    k = np.arange(1, acc.max_terms + 1, dtype=float)
    arg = beta - alpha * k
    pole = (arg <= 0) & (np.abs(arg - np.round(arg)) < 1e-12)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lg = special.gammaln(np.where(pole, 0.5, arg))
        sgn = np.where(pole, 0.0, special.gammasgn(np.where(pole, 0.5, arg)))
        # (-y)^{-k} = (-1)^k y^{-k}
        logmag = -np.outer(np.log(y), k) - lg[None, :]
        mag = np.where(pole[None, :], 0.0, np.exp(logmag))
        terms = -((-1.0) ** k)[None, :] * sgn[None, :] * mag

    if pole[-1] and np.all(pole[int(np.argmax(pole)) :]):
        # terminating expansion (alpha = 1, integer beta): only the
        # exponentially small part y^((1-beta)/alpha) exp(-y^(1/alpha)) / alpha is left out
        vals = np.sum(terms, axis=1)
        yr = y ** (1.0 / alpha)
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            rem = np.exp(-yr + (1.0 - beta) / alpha * np.log(y)) / alpha
            est = np.where(vals != 0, rem / np.abs(vals), np.inf)
        return vals, est <= acc.rel_tol * 1e-2, est

    # Optimal truncation: stop before the smallest nonzero term.
    masked = np.where(mag > 0, mag, np.inf)
    kstar = np.argmin(masked, axis=1)
    cols = np.arange(terms.shape[1])[None, :]
    keep = cols < kstar[:, None]
    vals = np.sum(np.where(keep, terms, 0.0), axis=1)
    smallest = masked[np.arange(len(y)), kstar]
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(vals != 0, smallest / np.abs(vals), np.inf)
    ok = est <= acc.rel_tol * 1e-2
    return vals, ok, est


def _kummer_alpha_one(beta: float, y: np.ndarray, acc: MlfAccuracy) -> np.ndarray:
    """E_{1,beta}(-y) = e^{-y}/Gamma(beta) [1 + (beta-1) sum_k y^k/(k!(beta-1+k))]."""
    logy = np.log(y)
    s = np.exp(-y)
    comp = np.zeros_like(y)
    b1 = beta - 1.0
    kmax = max(acc.max_terms, int(np.max(y) + 12.0 * math.sqrt(np.max(y)) + 30))
    for k in range(1, kmax + 1):
        term = b1 * np.exp(k * logy - math.lgamma(k + 1.0) - y) / (b1 + k)
        t = s + term
        big = np.abs(s) >= np.abs(term)
        comp += np.where(big, (s - t) + term, (term - t) + s)
        s = t
        if k > np.max(y) and np.all(np.abs(term) <= _EPS_STOP * np.abs(s + comp)):
            return (s + comp) * special.rgamma(beta)
    total = s + comp
    est = float(np.max(np.abs(term) / np.maximum(np.abs(total), np.finfo(float).tiny)))
    if est > acc.rel_tol:
        raise AccuracyError("Kummer series did not converge", est)
    return total * special.rgamma(beta)


def _integral(alpha: float, beta: float, y: np.ndarray, acc: MlfAccuracy) -> np.ndarray:
    """Real integral representation, valid for beta < 1 + alpha and alpha < 1.

    For beta > 1 the recurrence E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
    lowers beta first, keeping the integrand regular at the origin.
    """
    if beta > 1.0:
        lower = _integral(alpha, beta - alpha, y, acc)
        return (lower - special.rgamma(beta - alpha)) / (-y)
    out = np.empty_like(y)
    for start in range(0, len(y), _DE_CHUNK):
        sl = slice(start, start + _DE_CHUNK)
        out[sl] = _integral_chunk(alpha, beta, y[sl], acc)
    return out


def _de_nodes(h: float, offset: float):
    lo, hi = _DE_TAU
    tau = np.arange(lo + offset, hi + 0.5 * h, h)
    sh = 0.5 * math.pi * np.sinh(tau)
    r = np.exp(sh)
    dr = r * 0.5 * math.pi * np.cosh(tau)
    return r, dr


def _integral_chunk(alpha: float, beta: float, y: np.ndarray, acc: MlfAccuracy) -> np.ndarray:
    # z = -y; kernel from the Laplace-type representation on (0, inf):
    # (1/(a pi)) r^{(1-b)/a} exp(-r^{1/a}) [r sin(pi(1-b)) + y sin(pi(1-b+a))]
    #   / (r^2 + 2 r y cos(a pi) + y^2)
    s1 = math.sin(math.pi * (1.0 - beta))
    s2 = math.sin(math.pi * (1.0 - beta + alpha))
    c = math.cos(alpha * math.pi)
    p = (1.0 - beta) / alpha

    def partial(h: float, offset: float) -> np.ndarray:
        r, dr = _de_nodes(h, offset)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            base = np.power(r, p) * np.exp(-np.power(r, 1.0 / alpha)) * dr
        base = np.nan_to_num(base, nan=0.0, posinf=0.0)
        keep = base != 0
        r = r[keep]
        base = base[keep] / (alpha * math.pi)
        R = r[None, :]
        Y = y[:, None]
        g = (R * s1 + Y * s2) / (R * R + 2.0 * c * R * Y + Y * Y)
        return g @ base, np.abs(g) @ base

    h = 1.0 / 64.0
    total, mass = partial(h, 0.0)
    value = h * total
    est = np.inf
    for _ in range(_DE_LEVELS - 1):
        dt, dm = partial(h, 0.5 * h)
        total = total + dt
        mass = mass + dm
        h *= 0.5
        new = h * total
        # relative to |E| where it is well conditioned, to the integrand mass otherwise
        scale = np.maximum(np.abs(new), 1e-3 * h * mass)
        with np.errstate(divide="ignore", invalid="ignore"):
            est_arr = np.abs(new - value) / scale
        value = new
        est = float(np.nanmax(est_arr)) if len(est_arr) else 0.0
        if est <= acc.rel_tol:
            return value
    raise AccuracyError("double-exponential quadrature did not converge", est)
