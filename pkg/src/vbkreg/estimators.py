"""Kernel regression estimators with fixed and variable bandwidths.

All estimators are evaluated by direct summation over the sample and are
vectorized over the evaluation points ``t``.  Results keep the shape of
``t`` (0-d arrays for scalar input).

The variable-bandwidth (VB) estimators place bandwidth ``h / alpha_i`` on
observation ``i`` and weight it by ``alpha_i``, in numerator and
denominator alike, so the implied weights always sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .clipping import ClipSpec, clip_alpha
from .kernels import Kernel, get_kernel

__all__ = [
    "DENOM_FLOOR",
    "DegenerateDenominator",
    "Sample",
    "BandwidthPlan",
    "EstimateAtPoint",
    "pr_density",
    "nw_estimate",
    "nw_derivative",
    "pilot_q_hat",
    "pilot_alpha",
    "vb_density",
    "vb_weights",
    "vb_estimate",
    "ideal_vb_estimate",
    "true_vb_estimate",
]

DENOM_FLOOR = 1e-12
# cap on the (points x observations) block materialized at once
_BLOCK = 1 << 21


class DegenerateDenominator(ValueError):
    """The averaged kernel denominator fell below :data:`DENOM_FLOOR`."""


@dataclass(frozen=True)
class Sample:
    """Paired observations ``(x_i, y_i)``; arrays are made read-only."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).ravel()
        y = np.array(self.y, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("sample must contain at least one observation")
        if x.shape != y.shape:
            raise ValueError(f"x and y lengths differ ({x.size} vs {y.size})")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("sample entries must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    def __len__(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class BandwidthPlan:
    """Pilot bandwidth ``h1`` (for q-hat) and final bandwidth ``h2``."""

    h1: float
    h2: float

    def __post_init__(self):
        if not (self.h1 > 0 and self.h2 > 0):
            raise ValueError("bandwidths must be positive")

    @classmethod
    def default(cls, n: int) -> "BandwidthPlan":
        """``h1 = 0.6 n^(-1/7)``, ``h2 = n^(-1/9) / 4``."""
        return cls(0.6 * n ** (-1.0 / 7.0), n ** (-1.0 / 9.0) / 4.0)


@dataclass(frozen=True)
class EstimateAtPoint:
    """Estimator output at ``t``.

    ``value`` is NaN wherever ``ok`` is false, i.e. where ``denom`` (the
    averaged density-type denominator) is below :data:`DENOM_FLOOR`.
    """

    t: np.ndarray
    value: np.ndarray
    denom: np.ndarray
    ok: np.ndarray


def _check_h(h):
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")


def _kernel_sums(x, t, h, kernel, alpha=None, y=None, deriv=False):
    """Row sums over observations for each evaluation point.

    Returns ``S0 = sum K(u_i) a_i`` and, when ``y`` is given,
    ``S1 = sum K(u_i) a_i y_i`` with ``u_i = (t - x_i) a_i / h``.  With
    ``deriv`` the same sums are also returned for ``K'``.
    """
    tf = np.ravel(t)
    n = x.size
    m = tf.size
    s0 = np.empty(m)
    s1 = np.empty(m) if y is not None else None
    d0 = np.empty(m) if deriv else None
    d1 = np.empty(m) if deriv and y is not None else None
    step = max(1, _BLOCK // max(n, 1))
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        u = tf[lo:hi, None] - x[None, :]
        if alpha is not None:
            u *= alpha[None, :]
        u /= h
        k = kernel(u)
        if alpha is not None:
            k *= alpha[None, :]
        s0[lo:hi] = k.sum(axis=1)
        if y is not None:
            s1[lo:hi] = np.einsum("ij,j->i", k, y)
        if deriv:
            kd = kernel.deriv(u)
            if alpha is not None:
                kd *= alpha[None, :]
            d0[lo:hi] = kd.sum(axis=1)
            if y is not None:
                d1[lo:hi] = np.einsum("ij,j->i", kd, y)
    return s0, s1, d0, d1


def _ratio(t, num, den):
    ok = den >= DENOM_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(ok, num / np.where(ok, den, 1.0), np.nan)
    shape = np.shape(t)
    return EstimateAtPoint(
        t=np.asarray(t, dtype=float),
        value=value.reshape(shape),
        denom=den.reshape(shape),
        ok=ok.reshape(shape),
    )


def pr_density(sample: Sample, t, h: float, kernel: Kernel | str = "tricube"):
    """Parzen-Rosenblatt density estimate ``(nh)^-1 sum K((t - X_i)/h)``."""
    _check_h(h)
    kernel = get_kernel(kernel)
    s0, *_ = _kernel_sums(sample.x, t, h, kernel)
    return (s0 / (sample.n * h)).reshape(np.shape(t))


def nw_estimate(sample: Sample, t, h: float, kernel: Kernel | str = "tricube") -> EstimateAtPoint:
    """Nadaraya-Watson regression estimate at ``t``."""
    _check_h(h)
    kernel = get_kernel(kernel)
    nh = sample.n * h
    s0, s1, _, _ = _kernel_sums(sample.x, t, h, kernel, y=sample.y)
    return _ratio(t, s1 / nh, s0 / nh)


def nw_derivative(sample: Sample, t, h: float, kernel: Kernel | str = "tricube") -> EstimateAtPoint:
    """Derivative of the Nadaraya-Watson curve, ``(f g' - g f') / f**2``.

    ``denom`` is the density estimate ``f``; the point is flagged when it
    is below the floor.
    """
    _check_h(h)
    kernel = get_kernel(kernel)
    n = sample.n
    s0, s1, d0, d1 = _kernel_sums(sample.x, t, h, kernel, y=sample.y, deriv=True)
    f = s0 / (n * h)
    g = s1 / (n * h)
    fp = d0 / (n * h * h)
    gp = d1 / (n * h * h)
    ok = f >= DENOM_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(ok, (f * gp - g * fp) / np.where(ok, f, 1.0) ** 2, np.nan)
    shape = np.shape(t)
    return EstimateAtPoint(np.asarray(t, dtype=float), value.reshape(shape), f.reshape(shape), ok.reshape(shape))


def pilot_q_hat(sample: Sample, x, h1: float, kernel: Kernel | str = "tricube") -> EstimateAtPoint:
    """Pilot estimate ``f_hat(x) * sqrt(|r_hat'(x)|)`` with bandwidth ``h1``."""
    d = nw_derivative(sample, x, h1, kernel)
    f = d.denom
    value = np.where(d.ok, f * np.sqrt(np.abs(np.where(d.ok, d.value, 0.0))), np.nan)
    return EstimateAtPoint(d.t, value, f, d.ok)


def pilot_alpha(sample: Sample, h1: float, kernel: Kernel | str, clip: ClipSpec) -> np.ndarray:
    """``alpha(q_hat(X_i; h1))`` for every observation.

    Observations whose pilot is degenerate get ``q_hat = 0``, i.e. the
    clipped floor ``alpha = c * sqrt(p(0))``.
    """
    q = pilot_q_hat(sample, sample.x, h1, kernel)
    return clip_alpha(clip, np.where(q.ok, q.value, 0.0))


def vb_density(sample: Sample, t, h: float, kernel: Kernel | str, clip: ClipSpec, q_vals) -> np.ndarray:
    """Variable-bandwidth density ``(nh)^-1 sum K((t - X_i) a_i / h) a_i`` with ``a_i = alpha(q_i)``."""
    _check_h(h)
    kernel = get_kernel(kernel)
    q_vals = np.asarray(q_vals, dtype=float)
    if q_vals.shape != sample.x.shape:
        raise ValueError("q_vals must have one entry per observation")
    alpha = clip_alpha(clip, q_vals)
    s0, *_ = _kernel_sums(sample.x, t, h, kernel, alpha=alpha)
    return (s0 / (sample.n * h)).reshape(np.shape(t))


def vb_estimate(sample: Sample, t, h: float, kernel: Kernel | str, alpha_vals) -> EstimateAtPoint:
    """VB regression with per-observation scale factors ``alpha_vals`` given directly."""
    _check_h(h)
    kernel = get_kernel(kernel)
    alpha = np.asarray(alpha_vals, dtype=float)
    if alpha.shape != sample.x.shape:
        raise ValueError("alpha_vals must have one entry per observation")
    nh = sample.n * h
    s0, s1, _, _ = _kernel_sums(sample.x, t, h, kernel, alpha=alpha, y=sample.y)
    return _ratio(t, s1 / nh, s0 / nh)


def vb_weights(sample: Sample, t: float, h: float, kernel: Kernel | str, alpha_vals) -> np.ndarray:
    """Weights ``w_i`` with ``sum_i w_i Y_i`` equal to the VB estimate at scalar ``t``.

    Raises
    ------
    DegenerateDenominator
        If the VB density at ``t`` is below the floor.
    """
    _check_h(h)
    kernel = get_kernel(kernel)
    alpha = np.asarray(alpha_vals, dtype=float)
    k = kernel((float(t) - sample.x) * alpha / h) * alpha
    denom = k.sum() / (sample.n * h)
    if not denom >= DENOM_FLOOR:
        raise DegenerateDenominator(f"VB density {denom:.3e} at t={t} is below the floor")
    return k / k.sum()


def ideal_vb_estimate(
    sample: Sample,
    t,
    h: float,
    kernel: Kernel | str,
    clip: ClipSpec,
    q_true: Callable[[np.ndarray], np.ndarray],
) -> EstimateAtPoint:
    """VB estimate using the true ``q = f sqrt(|r'|)`` at the observations."""
    alpha = clip_alpha(clip, q_true(sample.x))
    return vb_estimate(sample, t, h, kernel, alpha)


def true_vb_estimate(
    sample: Sample,
    t,
    plan: BandwidthPlan,
    kernel: Kernel | str,
    clip: ClipSpec,
    alpha_vals=None,
) -> EstimateAtPoint:
    """Two-stage VB estimate: pilot ``q_hat`` at ``h1``, then VB at ``h2``.

    ``alpha_vals`` may carry a precomputed :func:`pilot_alpha` to reuse
    the O(n^2) pilot across calls on the same sample.
    """
    if alpha_vals is None:
        alpha_vals = pilot_alpha(sample, plan.h1, kernel, clip)
    return vb_estimate(sample, t, plan.h2, kernel, alpha_vals)
