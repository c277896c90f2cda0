"""Closed-form asymptotics of the variable-bandwidth regression estimator.

Derivatives of model-composite functions are taken by central finite
differences on a nine-point stencil, so a model only has to supply
``f``, ``r``, ``r'`` and ``sigma^2`` as vectorized callables.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, minimize_scalar

from .clipping import ClipSpec, in_region_drf, q_of
from .estimators import DENOM_FLOOR
from .kernels import TRICUBE, Kernel, get_kernel, kernel_moment
from .quadrature import QuadratureError, integrate

__all__ = [
    "TrueModel",
    "ExpansionReport",
    "fd_weights",
    "central_derivative",
    "theta_coefficient",
    "asymptotic_variance",
    "optimal_bandwidth",
    "expansion_check",
    "residual_slope",
]

Fn = Callable[[np.ndarray], np.ndarray]
STENCIL_HALF = 4
_LHS_ABS_ERR = 1e-11


@dataclass(frozen=True)
class TrueModel:
    """Data-generating model: design density, regression curve and noise variance."""

    f: Fn
    r: Fn
    rprime: Fn
    sigma2: Fn
    name: str = field(default="model", compare=False)

    def q(self, t):
        return q_of(self.f(t), self.rprime(t))


@dataclass(frozen=True)
class ExpansionReport:
    """Quadrature value of a kernel-smoothing integral against its h-series."""

    lhs: float
    series: float
    residual: float
    h: float
    coefficients: tuple[float, ...] = ()


def fd_weights(order: int, offsets) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0.

    Solves the Taylor moment system on integer (or arbitrary) ``offsets``;
    divide the weighted sum by ``step**order``.
    """
    offsets = np.asarray(offsets, dtype=float)
    m = offsets.size
    if order >= m:
        raise ValueError("need more stencil points than the derivative order")
    A = np.vander(offsets, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(A, rhs)


_OFFSETS = np.arange(-STENCIL_HALF, STENCIL_HALF + 1, dtype=float)
_WEIGHTS = {k: fd_weights(k, _OFFSETS) for k in range(1, 7)}


def _default_step(t):
    return 1e-2 * np.maximum(1.0, np.abs(t))


def central_derivative(fn: Fn, t, order: int, step=None):
    """``order``-th derivative of ``fn`` at ``t`` on a nine-point central stencil."""
    if order == 0:
        return np.asarray(fn(np.asarray(t, dtype=float)), dtype=float)
    t = np.asarray(t, dtype=float)
    step = _default_step(t) if step is None else np.asarray(step, dtype=float)
    pts = t[..., None] + step[..., None] * _OFFSETS
    vals = np.asarray(fn(pts), dtype=float)
    return (vals @ _WEIGHTS[order]) / step**order


def theta_coefficient(model: TrueModel, t, fd_step=None, kernel: Kernel | str = TRICUBE):
    """Leading h^4 bias coefficient of the VB estimator at ``t``.

    ``mu_{4,1} / (24 f) * [D4(r / (f|r'|)) - r * D4(1 / (f|r'|))]``.

    Raises
    ------
    ValueError
        If ``f`` is below the floor or ``r'`` vanishes on the stencil.
    """
    kernel = get_kernel(kernel)
    t = np.asarray(t, dtype=float)
    step = _default_step(t) if fd_step is None else np.broadcast_to(np.asarray(fd_step, float), t.shape)
    pts = t[..., None] + step[..., None] * _OFFSETS
    f = np.asarray(model.f(pts), dtype=float)
    rp = np.abs(np.asarray(model.rprime(pts), dtype=float))
    if np.any(f < DENOM_FLOOR):
        raise ValueError("density below floor on the finite-difference stencil")
    if np.any(rp == 0):
        raise ValueError("r' vanishes on the finite-difference stencil")
    inv = 1.0 / (f * rp)
    r = np.asarray(model.r(pts), dtype=float)
    w = _WEIGHTS[4]
    d4_a = (r * inv) @ w / step**4
    d4_b = inv @ w / step**4
    centre = STENCIL_HALF
    return kernel_moment(kernel, 4, 1) / (24.0 * f[..., centre]) * (d4_a - r[..., centre] * d4_b)


def asymptotic_variance(model: TrueModel, t, kernel: Kernel | str = TRICUBE):
    """Variance of the normal limit of ``sqrt(nh) (r_bar(t) - r(t))``."""
    kernel = get_kernel(kernel)
    t = np.asarray(t, dtype=float)
    f = np.asarray(model.f(t), dtype=float)
    if np.any(f <= 0):
        raise ValueError("density must be positive at t")
    rp = np.abs(np.asarray(model.rprime(t), dtype=float))
    return kernel_moment(kernel, 0, 2) * rp**0.25 * np.asarray(model.sigma2(t), dtype=float) / np.sqrt(f)


def optimal_bandwidth(
    model: TrueModel,
    kernel: Kernel | str,
    n: int,
    region: tuple[float, float],
    quad_tol: float = 1e-10,
    clip: ClipSpec | None = None,
) -> float:
    """MSE-optimal final bandwidth ``h2*`` integrated over ``region``.

    ``sigma^2(t)`` is kept inside the variance integral; for constant noise
    this is the usual ``n^(-1/9) [mu02 sigma^2 I_v / (8 I_theta)]^(1/9)``.
    """
    kernel = get_kernel(kernel)
    a, b = map(float, region)
    if not b > a:
        raise ValueError("region must be a non-empty interval")
    clip = ClipSpec() if clip is None else clip
    probe = np.linspace(a, b, 201)
    if not np.all(in_region_drf(clip, model.q(probe))):
        raise ValueError(f"region [{a}, {b}] leaves D_rf for this model")
    mu02 = kernel_moment(kernel, 0, 2)
    var_int = integrate(
        lambda s: model.sigma2(s) * np.abs(model.rprime(s)) ** 0.25 / np.sqrt(model.f(s)),
        a, b, tol=0.0, rtol=1e-12,
    )
    # absolute floor well under quad_tol so a vanishing theta still terminates
    theta_sq = integrate(
        lambda s: theta_coefficient(model, s, kernel=kernel) ** 2, a, b, tol=1e-3 * quad_tol, rtol=1e-8
    )
    if theta_sq < quad_tol:
        raise ValueError(f"integrated theta^2 = {theta_sq:.3e} is below quad_tol; h2* undefined")
    bracket = mu02 * var_int / (8.0 * theta_sq)
    return float(n ** (-1.0 / 9.0) * bracket ** (1.0 / 9.0))


def _support_breaks(t, h, xi, support, span, grid=20001):
    s = np.linspace(t - span, t + span, grid)
    g = np.abs(t - s) * np.asarray(xi(s), dtype=float) - support * h
    breaks = [t - span, t, t + span]
    for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0):
        breaks.append(_edge(t, h, xi, support, s[i], s[i + 1]))
    return breaks


def _edge(t, h, xi, support, lo, hi):
    return brentq(lambda z: abs(t - z) * float(xi(np.asarray(z))) - support * h, lo, hi, xtol=1e-15)


def _xi_minima(xi, lo, hi, grid=4001):
    """Strict interior minima of ``xi``; cusps of ``alpha(q)`` sit at zeros of ``r'``."""
    s = np.linspace(lo, hi, grid)
    v = np.asarray(xi(s), dtype=float)
    idx = np.flatnonzero((v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])) + 1
    return [
        minimize_scalar(
            lambda z: float(xi(np.asarray(z))), bounds=(s[i - 1], s[i + 1]),
            method="bounded", options={"xatol": 1e-13},
        ).x
        for i in idx
    ]


def _local_breaks(t, h, xi, support, span, grid=20001):
    """Ends of the support component that contains ``t``."""
    out = []
    for side in (-1.0, 1.0):
        s = t + side * np.linspace(0.0, span, grid)
        g = np.abs(t - s) * np.asarray(xi(s), dtype=float) - support * h
        cross = np.flatnonzero(g[1:] > 0)
        if cross.size == 0:
            out.append(t + side * span)
            continue
        i = cross[0]
        lo, hi = sorted((s[i], s[i + 1]))
        out.append(_edge(t, h, xi, support, lo, hi))
    return [out[0], t, out[1]]


def expansion_check(
    eta: Fn,
    xi: Fn,
    t: float,
    h: float,
    kernel: Kernel | str = TRICUBE,
    squared: bool = False,
    fd_step=None,
    span: float = 10.0,
    order: int = 4,
    local: bool = True,
) -> ExpansionReport:
    """Compare ``(1/h) int K((t-s) xi(s)/h) xi(s) eta(s) ds`` with its series to ``h**order``.

    With ``squared`` the integrand is ``K^2(.) xi^2 eta`` and the even
    coefficients are ``mu_{2k,2}/(2k)! D_{2k}(eta / xi^(2k-1))``; otherwise
    ``a_k = (-1)^k mu_{k,1}/k! D_k(eta / xi^k)``.

    By default (``local``) the integral covers the kernel-support
    component containing ``t``, which is where the expansion applies.  If
    ``xi`` becomes small far from ``t`` (e.g. ``alpha(q)`` near a zero of
    ``r'``) the kernel window reopens there and adds a term of order
    ``h**4`` that no local series accounts for; ``local=False`` integrates
    over all of ``[t - span, t + span]`` instead.  Pieces are split at
    ``t``, at support edges and at minima of ``xi`` and integrated with
    adaptive Gauss-Kronrod, which copes with the ``|s - s0|^(1/4)`` cusp
    of ``alpha(q)`` at a zero ``s0`` of ``r'``.

    Raises
    ------
    QuadratureError
        If any piece fails to converge.
    """
    kernel = get_kernel(kernel)
    T = kernel.support
    power = 2 if squared else 1

    def integrand(s):
        xs = float(xi(np.asarray(s)))
        return float(kernel((t - s) * xs / h)) ** power * xs**power * float(eta(np.asarray(s))) / h

    breaks = (_local_breaks if local else _support_breaks)(t, h, xi, T, span)
    lo, hi = min(breaks), max(breaks)
    pts = np.unique(np.concatenate([breaks, _xi_minima(xi, lo, hi)]))
    lhs = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(integrand, a, b, epsabs=1e-15, epsrel=1e-13, limit=500)
        if not err <= _LHS_ABS_ERR:
            raise QuadratureError(f"expansion lhs at h={h} on [{a}, {b}]: error estimate {err:.2e}")
        lhs += val

    coeffs = []
    for k in range(order + 1):
        if k % 2 == 1:
            # symmetric kernels: odd moments vanish
            coeffs.append(0.0)
            continue
        if squared:
            mu = kernel_moment(kernel, k, 2)
            xi_pow = k - 1
            sign = 1.0
        else:
            mu = kernel_moment(kernel, k, 1)
            xi_pow = k
            sign = (-1.0) ** k
        ratio = lambda s, p=xi_pow: np.asarray(eta(s), float) / np.asarray(xi(s), float) ** p
        deriv = float(central_derivative(ratio, t, k, fd_step))
        coeffs.append(sign * mu / math.factorial(k) * deriv)
    series = float(sum(a * h**k for k, a in enumerate(coeffs)))
    return ExpansionReport(lhs=lhs, series=series, residual=lhs - series, h=float(h), coefficients=tuple(coeffs))


def residual_slope(reports) -> float:
    """Least-squares slope of ``log|residual|`` against ``log h``."""
    h = np.array([r.h for r in reports])
    res = np.abs(np.array([r.residual for r in reports]))
    return float(np.polyfit(np.log(h), np.log(res), 1)[0])
