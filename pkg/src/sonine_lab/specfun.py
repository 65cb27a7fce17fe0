"""Complex special functions: log-Gamma, the cosine multiplier, zeta, and the
completed Mellin factor pi^(-s/2) Gamma(s/2).

Everything here is pure and reentrant.  Scalar entry points take either a
:class:`ComplexPoint` or a plain Python/NumPy number; the ``*_array`` helpers
are vectorised versions used by the grid code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import bernoulli, loggamma

from ._cauchy import cauchy_derivative, effective_radius, laurent_parts
from .errors import InvalidParameterError, PoleError

POLE_THRESHOLD = 1e-8
"""Inputs closer than this to a pole are treated as the pole itself."""

_LOG_2 = math.log(2.0)
_LOG_2PI = math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class ComplexPoint:
    """A finite point ``re + i*im`` of the complex plane."""

    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise InvalidParameterError(f"non-finite complex point ({self.re}, {self.im})")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, value: "PointLike") -> "ComplexPoint":
        if isinstance(value, ComplexPoint):
            return value
        c = complex(value)
        return cls(c.real, c.imag)

    def __complex__(self) -> complex:
        return self.z


PointLike = Union[ComplexPoint, complex, float, int]


def as_complex(s: PointLike) -> complex:
    """Coerce a point-like input to ``complex`` and reject NaN/inf."""
    if isinstance(s, ComplexPoint):
        return s.z
    c = complex(s)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidParameterError(f"non-finite complex input {c}")
    return c


@dataclass(frozen=True)
class PoleAwareValue:
    """Value of a meromorphic function together with its local pole data.

    At a simple pole ``value`` is the finite part (constant Laurent
    coefficient) and ``residue`` the coefficient of 1/(s - s0).
    """

    value: complex
    pole_order: int = 0
    residue: complex = 0j

    def __post_init__(self) -> None:
        if self.pole_order < 0:
            raise InvalidParameterError("pole order must be non-negative")
        if self.pole_order == 0 and self.residue != 0:
            raise InvalidParameterError("a regular value cannot carry a residue")

    @property
    def is_pole(self) -> bool:
        return self.pole_order > 0


def _nearest_nonpositive_integer(s: complex) -> tuple[int, float]:
    n = min(0, round(s.real))
    return n, abs(s - n)


def log_gamma(s: PointLike) -> complex:
    """Principal branch of log Gamma(s).

    Raises :class:`PoleError` at (or within ``POLE_THRESHOLD`` of) 0, -1, -2, ...
    """
    z = as_complex(s)
    n, d = _nearest_nonpositive_integer(z)
    if d < POLE_THRESHOLD:
        raise PoleError(f"Gamma has a pole at {n}")
    return complex(loggamma(z))


def _log_cos_half_pi(s: np.ndarray) -> np.ndarray:
    # log cos(pi s / 2) without overflow: cos(z) = e^{big}(1 + e^{-2 big})/2
    # where big = -iz or iz is chosen so that Re(big) >= 0.
    z = np.pi * s / 2.0
    big = np.where(z.imag > 0, -1j * z, 1j * z)
    return big + np.log1p(np.exp(-2.0 * big)) - _LOG_2


def gamma_plus_array(s: np.ndarray | complex) -> np.ndarray:
    """Vectorised 2 (2 pi)^(-s) cos(pi s/2) Gamma(s) away from its poles."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(_LOG_2 - s * _LOG_2PI + loggamma(s) + _log_cos_half_pi(s))
    return out


def gamma_plus(s: PointLike) -> PoleAwareValue:
    """The cosine-transform multiplier gamma_+(s) = 2 (2pi)^-s cos(pi s/2) Gamma(s).

    Simple poles at 0, -2, -4, ... are reported through :class:`PoleAwareValue`
    (finite part plus residue) instead of raising.  Odd positive integers are
    exact zeros.
    """
    z = as_complex(s)
    n, d = _nearest_nonpositive_integer(z)
    if d < POLE_THRESHOLD:
        if n % 2 == 0:
            k = -n // 2
            residue = 2.0 * (2.0 * math.pi) ** (2 * k) * (-1) ** k / math.factorial(2 * k)
            finite, _ = laurent_parts(gamma_plus_array, complex(n), 0.1)
            return PoleAwareValue(complex(finite), 1, complex(residue))
        # Odd negative integers: the Gamma pole is cancelled by a zero of cos.
        finite, _ = laurent_parts(gamma_plus_array, complex(n), 0.1)
        return PoleAwareValue(complex(finite))
    if z.imag == 0.0 and z.real > 0 and z.real == math.floor(z.real) and int(z.real) % 2 == 1:
        return PoleAwareValue(0j)
    return PoleAwareValue(complex(gamma_plus_array(z)))


_BERNOULLI = bernoulli(20)


def _zeta_euler_maclaurin(s: complex, n_terms: int, n_bernoulli: int = 10) -> complex:
    n = np.arange(1, n_terms, dtype=float)
    head = np.sum(np.exp(-s * np.log(n)))
    big_n = float(n_terms)
    log_n = math.log(big_n)
    total = head + np.exp((1 - s) * log_n) / (s - 1) + 0.5 * np.exp(-s * log_n)
    rising = s  # s (s+1) ... (s + 2k - 2)
    for k in range(1, n_bernoulli + 1):
        if k > 1:
            rising *= (s + 2 * k - 3) * (s + 2 * k - 2)
        term = _BERNOULLI[2 * k] / math.factorial(2 * k) * rising * np.exp((-s - 2 * k + 1) * log_n)
        total += term
    return complex(total)


def riemann_zeta(s: PointLike) -> complex:
    """Riemann zeta by Euler-Maclaurin summation, valid on C minus {1}.

    The head length is max(10, 2|Im s|) and ten Bernoulli corrections are
    added, which is ample for |Im s| <= 50.  Left of Re s = -1/2 the head terms
    n^-s grow and cancel, so there zeta(s) = gamma_+(1 - s) zeta(1 - s) is
    used instead (exact zeros at -2, -4, ... come for free).
    """
    z = as_complex(s)
    if abs(z - 1.0) < POLE_THRESHOLD:
        raise PoleError("zeta has a pole at s = 1")
    if z.real < -0.5:
        w = 1.0 - z
        return gamma_plus(w).value * _zeta_euler_maclaurin(w, max(10, int(math.ceil(2.0 * abs(w.imag)))))
    n_terms = max(10, int(math.ceil(2.0 * abs(z.imag))))
    return _zeta_euler_maclaurin(z, n_terms)


def completed_factor_array(s: np.ndarray | complex) -> np.ndarray:
    """Vectorised pi^(-s/2) Gamma(s/2) (infinite at the poles)."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.exp(-0.5 * s * _LOG_PI + loggamma(s / 2.0))


def completed_factor_poles(center: complex) -> list[complex]:
    """Poles of Gamma(s/2) (the points 0, -2, -4, ...) down to Re(center) - 5.

    The nearest pole to ``center`` is always in the list.
    """
    bottom = min(0, int(math.floor(center.real)) - 5)
    return [complex(m) for m in range(0, bottom - 1, -2)]


def completed_factor(s: PointLike, k: int = 0) -> complex:
    """k-th derivative of pi^(-s/2) Gamma(s/2).

    Derivatives (k >= 1) use a Cauchy circle of radius 0.25, shrunk to half
    the distance to the nearest pole.  Poles of the k = 0 value raise.
    """
    z = as_complex(s)
    if k < 0:
        raise InvalidParameterError("derivative order must be non-negative")
    m = round(z.real / 2.0) * 2
    if m <= 0 and abs(z - m) < POLE_THRESHOLD:
        raise PoleError(f"pi^(-s/2) Gamma(s/2) has a pole at {m}")
    if k == 0:
        return complex(completed_factor_array(z))
    radius = effective_radius(z, 0.25, completed_factor_poles(z))
    return complex(cauchy_derivative(completed_factor_array, z, k, radius))


def hardy_z(t: float | np.ndarray) -> np.ndarray:
    """Real-rotated zeta on the critical line: exp(i theta(t)) zeta(1/2 + i t).

    theta is the Riemann-Siegel angle Im log Gamma(1/4 + it/2) - (t/2) log pi.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    theta = np.imag(loggamma(0.25 + 0.5j * t_arr)) - 0.5 * t_arr * _LOG_PI
    vals = np.array([riemann_zeta(complex(0.5, ti)) for ti in t_arr])
    return np.real(np.exp(1j * theta) * vals)


def critical_zeros(t_min: float, t_max: float, step: float = 0.05) -> list[float]:
    """Ordinates of zeta zeros on the critical line in [t_min, t_max].

    Zeros are bracketed by sign changes of :func:`hardy_z` on a grid with the
    given step and polished with Brent's method.  Zeros closer together than
    ``step`` could be missed, which is not a concern below height 50.
    """
    if t_max <= t_min or step <= 0:
        raise InvalidParameterError("need t_min < t_max and step > 0")
    ts = np.arange(t_min, t_max + 0.5 * step, step)
    zs = hardy_z(ts)
    roots = []
    f = lambda x: float(hardy_z(x)[0])
    for i in range(len(ts) - 1):
        if zs[i] == 0.0:
            roots.append(float(ts[i]))
        elif zs[i] * zs[i + 1] < 0:
            roots.append(brentq(f, ts[i], ts[i + 1], xtol=1e-12))
    return roots
