"""Smooth clipping of the square-root bandwidth law.

``alpha(w) = c * sqrt(p(w / c**2))`` behaves like ``sqrt(w)`` once
``w >= t0 * c**2`` and never drops below ``c``, which caps the bandwidth
``h / alpha`` in sparse or flat regions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ClipSpec",
    "DEFAULT_C",
    "clip_p",
    "clip_alpha",
    "default_p",
    "q_of",
    "in_region_drf",
]

DEFAULT_C = 1e-6


def default_p(u):
    """Five times differentiable clipping polynomial with junction at 2.

    Equals 1 for ``u <= 0`` and ``u`` for ``u >= 2``.
    """
    u = np.asarray(u, dtype=float)
    s = np.clip(u, 0.0, 2.0)
    d = s - 2.0
    bracket = 1.0 - 2.0 * d + 2.25 * d**2 - 1.75 * d**3 + 0.875 * d**4
    mid = 1.0 + s**6 / 64.0 * bracket
    return np.where(u >= 2.0, u, np.where(u <= 0.0, 1.0, mid))


@dataclass(frozen=True)
class ClipSpec:
    """Clipping constants and the polynomial ``p``.

    A custom ``p`` must satisfy ``p >= 1`` everywhere and ``p(u) = u`` for
    ``u >= t0``; it is not validated beyond a spot check.
    """

    c: float = DEFAULT_C
    t0: float = 2.0
    p: Callable[[np.ndarray], np.ndarray] = field(default=default_p, repr=False, compare=False)
    p_deriv_order: int = 5

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("clip c must be positive")
        if not self.t0 >= 1:
            raise ValueError("clip t0 must be >= 1")
        if self.p_deriv_order < 4:
            raise ValueError("clipping polynomial needs at least four derivatives")
        probe = float(self.p(np.asarray(self.t0 + 1.0)))
        if not np.isclose(probe, self.t0 + 1.0):
            raise ValueError("p(u) must equal u beyond t0")

    @property
    def knee(self) -> float:
        """Smallest ``w`` on the pure square-root branch, ``t0 * c**2``."""
        return self.t0 * self.c**2


def clip_p(spec: ClipSpec, u):
    return spec.p(np.asarray(u, dtype=float))


def clip_alpha(spec: ClipSpec, w):
    """``c * sqrt(p(w / c**2))`` evaluated without forming ``w / c**2`` on the root branch."""
    w = np.asarray(w, dtype=float)
    root = w >= spec.knee
    # w/c^2 is only needed below the knee, where it stays <= t0
    scaled = np.where(root, 0.0, w) / spec.c**2
    clipped = spec.c * np.sqrt(spec.p(scaled))
    return np.where(root, np.sqrt(np.where(root, w, 0.0)), clipped)


def q_of(f_val, rprime_val):
    """Local difficulty ``f * sqrt(|r'|)`` that drives the bandwidth."""
    f_val = np.asarray(f_val, dtype=float)
    if np.any(f_val < 0):
        raise ValueError("density value must be non-negative")
    return f_val * np.sqrt(np.abs(np.asarray(rprime_val, dtype=float)))


def in_region_drf(spec: ClipSpec, q_val):
    """True where ``q >= 2 * t0 * c**2``; the h^4 bias region."""
    return np.asarray(q_val, dtype=float) >= 2.0 * spec.knee
