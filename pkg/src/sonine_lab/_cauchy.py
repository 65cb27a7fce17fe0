"""Cauchy-circle differentiation, shared by specfun and kernels."""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from .errors import RadiusCollisionError


def circle_points(k: int) -> int:
    """Number of trapezoid nodes used on the circle for a k-th derivative."""
    return max(32, 8 * k)


def effective_radius(center: complex, radius: float, poles: Iterable[complex], shrink: bool = True) -> float:
    """Radius actually used around ``center`` given the known pole locations.

    With ``shrink`` the radius is reduced to half the distance to the nearest
    pole; otherwise a pole inside the disc raises.
    """
    dists = [abs(complex(p) - center) for p in poles]
    if not dists:
        return radius
    d = min(dists)
    if d <= 1e-12:
        raise RadiusCollisionError(f"a pole sits at the circle centre {center}")
    if shrink:
        return min(radius, 0.5 * d)
    if radius >= d:
        raise RadiusCollisionError(f"pole at distance {d:.3g} inside circle of radius {radius:.3g}")
    return radius


def cauchy_derivative(
    func: Callable[[np.ndarray], np.ndarray],
    center: complex,
    k: int,
    radius: float,
) -> np.ndarray:
    """k-th derivative of ``func`` at ``center`` from samples on a circle.

    ``func`` receives a 1-D complex array of circle points and returns an array
    whose first axis runs over those points; extra axes are carried through, so
    a whole frame of functions can be differentiated in one call.
    """
    n = circle_points(k)
    theta = 2.0 * np.pi * np.arange(n) / n
    z = center + radius * np.exp(1j * theta)
    vals = np.asarray(func(z), dtype=complex)
    phase = np.exp(-1j * k * theta)
    shape = (n,) + (1,) * (vals.ndim - 1)
    return math.factorial(k) / radius**k * np.mean(vals * phase.reshape(shape), axis=0)


def laurent_parts(
    func: Callable[[np.ndarray], np.ndarray],
    center: complex,
    radius: float,
    n: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Constant term and residue of ``func`` about ``center``.

    Both come from trapezoid means on the circle: the mean of f gives the
    constant Laurent coefficient and the mean of f·(z − c) gives the residue.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    e = radius * np.exp(1j * theta)
    vals = np.asarray(func(center + e), dtype=complex)
    shape = (n,) + (1,) * (vals.ndim - 1)
    const = np.mean(vals, axis=0)
    residue = np.mean(vals * e.reshape(shape), axis=0)
    return const, residue
