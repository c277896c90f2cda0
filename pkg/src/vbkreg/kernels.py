"""Compact-support smoothing kernels, their derivatives and moments.

Every kernel here is non-negative, symmetric, integrates to one and
vanishes outside ``[-T, T]``.  Evaluation is vectorized over ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .quadrature import integrate

__all__ = [
    "Kernel",
    "KERNEL_IDS",
    "get_kernel",
    "eval_kernel",
    "eval_kernel_derivative",
    "kernel_moment",
    "TRICUBE",
    "EPANECHNIKOV",
    "GAUSSIAN_TRUNCATED",
]

_TRICUBE_C = 70.0 / 81.0
_GAUSS_CUT = 4.0
# normalizer of phi restricted to |u| <= 4
_GAUSS_Z = math.sqrt(2.0 * math.pi) * math.erf(_GAUSS_CUT / math.sqrt(2.0))


def _tricube(u):
    a = np.abs(u)
    inner = np.maximum(1.0 - a * a * a, 0.0)
    return _TRICUBE_C * (inner * inner * inner)


def _tricube_deriv(u):
    a = np.abs(u)
    inner = np.maximum(1.0 - a * a * a, 0.0)
    return (-9.0 * _TRICUBE_C) * (inner * inner) * (a * u)


def _epanechnikov(u):
    return 0.75 * np.clip(1.0 - u * u, 0.0, None)


def _epanechnikov_deriv(u):
    return np.where(np.abs(u) <= 1.0, -1.5 * u, 0.0)


def _gauss_trunc(u):
    return np.where(np.abs(u) <= _GAUSS_CUT, np.exp(-0.5 * u * u) / _GAUSS_Z, 0.0)


def _gauss_trunc_deriv(u):
    return -u * _gauss_trunc(u)


@dataclass(frozen=True)
class Kernel:
    """A symmetric kernel ``K`` supported on ``[-support, support]``."""

    name: str
    support: float
    _fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    _deriv: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return self._fn(u)

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        return self._deriv(u)

    def moment(self, k: int, p: int = 1) -> float:
        return kernel_moment(self, k, p)


TRICUBE = Kernel("tricube", 1.0, _tricube, _tricube_deriv)
EPANECHNIKOV = Kernel("epanechnikov", 1.0, _epanechnikov, _epanechnikov_deriv)
GAUSSIAN_TRUNCATED = Kernel("gaussian_truncated", _GAUSS_CUT, _gauss_trunc, _gauss_trunc_deriv)

_REGISTRY = {k.name: k for k in (TRICUBE, EPANECHNIKOV, GAUSSIAN_TRUNCATED)}
KERNEL_IDS = tuple(_REGISTRY)


def get_kernel(kernel: str | Kernel) -> Kernel:
    """Look a kernel up by id; ``Kernel`` instances pass through."""
    if isinstance(kernel, Kernel):
        return kernel
    try:
        return _REGISTRY[kernel]
    except KeyError:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNEL_IDS}") from None


def eval_kernel(kernel: Kernel, u):
    return kernel(u)


def eval_kernel_derivative(kernel: Kernel, u):
    return kernel.deriv(u)


@lru_cache(maxsize=None)
def _moment(name: str, k: int, p: int) -> float:
    kern = _REGISTRY[name]
    T = kern.support

    def integrand(u):
        return u**k * kern(u) ** p

    # split at 0: tricube has a jump in its third derivative there
    return integrate(integrand, -T, 0.0, tol=1e-13) + integrate(integrand, 0.0, T, tol=1e-13)


def kernel_moment(kernel: Kernel, k: int, p: int = 1) -> float:
    """mu_{k,p} = integral of ``u**k * K(u)**p`` over the support.

    Values are cached per ``(kernel, k, p)`` for registered kernels.
    """
    if k < 0 or p < 1:
        raise ValueError("need k >= 0 and p >= 1")
    return _moment(get_kernel(kernel).name, int(k), int(p))
