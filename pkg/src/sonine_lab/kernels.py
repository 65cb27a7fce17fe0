"""Truncated cosine/sine kernels and their evaluation routes.

    C_a(u, w) = 2 int_a^inf cos(2 pi u t) t^(w-1) dt
    S_a(u, w) = 2 int_a^inf sin(2 pi u t) t^(w-1) dt
    D_a(u, w) = 2 int_0^a  cos(2 pi u t) t^(w-1) dt

Two independent routes exist for C_a:

* ``series``: gamma_+(w) u^-w minus the power series of D_a (needs Re w > 0).
  The series alternates with terms as large as exp(2 pi u a), so it is summed
  in extended precision with mpmath.
* ``quadrature``: one integration by parts turns C_a into an absolutely
  convergent sine tail (needs Re w < 1), integrated panel by panel between
  consecutive zeros of the sine with 8-point Gauss-Legendre and an Euler
  transform of the alternating panel sums.

``auto`` dispatches on Re w and, in the overlap strip 0 < Re w < 1, evaluates
both and raises if they disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Literal

import mpmath
import numpy as np

from ._cauchy import cauchy_derivative, effective_radius
from .errors import ConvergenceError, CrossCheckError, DomainError, InvalidParameterError
from .specfun import PointLike, as_complex, gamma_plus_array
from .transforms import GridFunction, LogGrid, cosine_transform, mellin, trig_interpolate

Route = Literal["series", "quadrature", "auto"]

SERIES_MAX_TERMS = 200
SERIES_REL_TAIL = 1e-14
SERIES_MAX_ARGUMENT = 600.0
CROSSCHECK_TOL = 1e-6
MAX_DERIVATIVE_ORDER = 8

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_EULER_TERMS = 32


@dataclass(frozen=True)
class KernelEval:
    """One evaluation of C_a(u, w) with the route that produced it."""

    a: float
    u: float
    w: complex
    route: str
    series_cutoff: int
    value: complex
    crosscheck_residual: float = float("nan")


# ---------------------------------------------------------------------------
# D_a power series


def D_a_series(u: float, w: PointLike, a: float, return_terms: bool = False):
    """2 sum_j (-1)^j (2 pi u)^(2j) a^(2j+w) / ((2j)! (2j+w)).

    Equals 2 int_0^a cos(2 pi u t) t^(w-1) dt for Re w > 0.  Summation stops
    when the next term is below 1e-14 of the running sum, or fails after 200
    terms.  The terms only start to shrink once 2j exceeds about e * 2 pi u a,
    so in practice the cap is reached for 2 pi u a beyond ~136.
    """
    wc = as_complex(w)
    if not wc.real > 0:
        raise DomainError("the D_a series needs Re(w) > 0")
    if not (u >= 0 and a > 0):
        raise InvalidParameterError("need u >= 0 and a > 0")
    arg = 2.0 * math.pi * u * a
    if arg > SERIES_MAX_ARGUMENT:
        raise ConvergenceError(f"2*pi*u*a = {arg:.1f} exceeds {SERIES_MAX_ARGUMENT}")
    # The largest term is about exp(arg); carry enough digits to absorb it.
    dps = 20 + int(math.ceil(arg / math.log(10.0)))
    with mpmath.workdps(dps):
        wm = mpmath.mpc(wc.real, wc.imag)
        x2 = (2 * mpmath.pi * mpmath.mpf(u)) ** 2
        aw = mpmath.power(mpmath.mpf(a), wm)
        a2 = mpmath.mpf(a) ** 2
        total = mpmath.mpc(0)
        power = mpmath.mpf(1)  # (2 pi u)^(2j) a^(2j) / (2j)!
        for j in range(SERIES_MAX_TERMS):
            term = (-1) ** j * power * aw / (2 * j + wm)
            total += term
            if j > arg and abs(term) <= SERIES_REL_TAIL * abs(total):
                value = complex(2 * total)
                return (value, j + 1) if return_terms else value
            power = power * x2 * a2 / ((2 * j + 1) * (2 * j + 2))
    raise ConvergenceError(f"D_a series did not converge in {SERIES_MAX_TERMS} terms")


# ---------------------------------------------------------------------------
# oscillatory tails


def _gl_geometric(lo: np.ndarray, hi: np.ndarray, pieces: int, integrand) -> np.ndarray:
    """Composite 8-point Gauss-Legendre on geometric sub-intervals of [lo, hi]."""
    edges = lo[:, None] * (hi / lo)[:, None] ** (np.arange(pieces + 1) / pieces)[None, :]
    left, right = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = mid[..., None] + half[..., None] * _GL_X
    vals = integrand(nodes)
    return np.sum(vals * _GL_W * half[..., None], axis=(1, 2))


def _pieces(ratio: float, beta: complex) -> int:
    # Enough geometric pieces that the envelope t^beta changes by a modest
    # factor (and phase) on each one.
    spread = math.log(ratio) * (abs(beta) + 1.0)
    return max(1, int(math.ceil(spread / 0.3)))


def oscillatory_tail(u, beta: complex, a: float, kind: Literal["sin", "cos"] = "sin") -> np.ndarray:
    """int_a^inf trig(2 pi u t) t^beta dt for Re(beta) < 0, vectorised over u.

    Panels run between consecutive zeros of the trigonometric factor, so the
    panel integrals alternate in sign; the first stretch is summed directly
    and the remainder through an Euler transform of 32 panels.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if not beta.real < 0:
        raise DomainError("oscillatory tail needs Re(beta) < 0")
    if np.any(u <= 0) or a <= 0:
        raise InvalidParameterError("need u > 0 and a > 0")
    trig = np.sin if kind == "sin" else np.cos
    c0 = 0.0 if kind == "sin" else 0.5

    def integrand_for(uu):
        return lambda t: trig(2.0 * np.pi * uu[:, None, None] * t) * t**beta

    integrand = integrand_for(u)
    # zeros z_n = (n + c0) / (2u); first zero at or beyond a
    n0 = np.ceil(2.0 * u * a - c0)
    n0 = np.maximum(n0, 1.0 if kind == "sin" else 0.0)
    z0 = (n0 + c0) / (2.0 * u)
    total = np.zeros(u.shape, dtype=complex)

    head = z0 > a * (1 + 1e-15)
    if np.any(head):
        ratio = float(np.max(z0[head] / a))
        pieces = max(8, _pieces(ratio, beta))
        total[head] += _gl_geometric(np.full(head.sum(), a), z0[head], pieces, integrand_for(u[head]))

    start = 30.0 + 4.0 * abs(beta)
    n_euler = np.maximum(n0, math.ceil(start))
    direct_count = (n_euler - n0).astype(int)
    for m in range(int(direct_count.max(initial=0))):
        sel = direct_count > m
        n = n0[sel] + m
        lo = (n + c0) / (2.0 * u[sel])
        hi = (n + 1 + c0) / (2.0 * u[sel])
        pieces = _pieces(float(np.max(hi / lo)), beta)
        total[sel] += _gl_geometric(lo, hi, pieces, integrand_for(u[sel]))

    # Euler transform over the alternating panel sums beyond n_euler
    panels = np.empty((_EULER_TERMS, u.size), dtype=complex)
    for p in range(_EULER_TERMS):
        n = n_euler + p
        lo = (n + c0) / (2.0 * u)
        hi = (n + 1 + c0) / (2.0 * u)
        pieces = _pieces(float(np.max(hi / lo)), beta)
        panels[p] = _gl_geometric(lo, hi, pieces, integrand)
    signs = (-1.0) ** np.arange(_EULER_TERMS)
    b = panels * signs[:, None]
    tail = np.zeros(u.size, dtype=complex)
    diff = b.copy()
    for k in range(_EULER_TERMS):
        tail += (-1) ** k * diff[0] / 2.0 ** (k + 1)
        diff = diff[1:] - diff[:-1]
        if diff.shape[0] == 0:
            break
    return total + tail


# ---------------------------------------------------------------------------
# C_a and S_a


def _c_quadrature(u: np.ndarray, w: complex, a: float) -> np.ndarray:
    if not w.real < 1:
        raise DomainError("the quadrature route needs Re(w) < 1")
    tail = oscillatory_tail(u, w - 2.0, a, "sin")
    return ((1.0 - w) * tail - a ** (w - 1.0) * np.sin(2.0 * np.pi * a * u)) / (np.pi * u)


def _c_series(u: float, w: complex, a: float) -> tuple[complex, int]:
    if not w.real > 0:
        raise DomainError("the series route needs Re(w) > 0")
    d, terms = D_a_series(u, w, a, return_terms=True)
    g = complex(gamma_plus_array(w))
    return g * u ** (-w) - d, terms


def C_a_array(u, w: PointLike, a: float) -> np.ndarray:
    """Quadrature-route C_a(u, w) for an array of u (Re w < 1)."""
    return _c_quadrature(np.atleast_1d(np.asarray(u, dtype=float)), as_complex(w), float(a))


def C_a_eval(u: float, w: PointLike, a: float, route: Route = "auto") -> KernelEval:
    """Evaluate C_a(u, w) through the requested route.

    ``auto`` uses the series for Re w >= 1, quadrature for Re w <= 0, and
    both (with a cross-check at 1e-6 relative) in between.  When the series
    cannot be summed in the strip (2 pi u a beyond its limit) the quadrature
    value is returned without a cross-check.
    """
    wc = as_complex(w)
    if not (u > 0 and a > 0):
        raise InvalidParameterError("need u > 0 and a > 0")
    if route == "series":
        val, terms = _c_series(u, wc, a)
        return KernelEval(a, u, wc, "series", terms, val)
    if route == "quadrature":
        val = complex(_c_quadrature(np.array([u]), wc, a)[0])
        return KernelEval(a, u, wc, "quadrature", 0, val)
    if route != "auto":
        raise InvalidParameterError(f"unknown route {route!r}")
    if wc.real >= 1:
        return C_a_eval(u, wc, a, "series")
    if wc.real <= 0:
        return C_a_eval(u, wc, a, "quadrature")
    q = complex(_c_quadrature(np.array([u]), wc, a)[0])
    try:
        s, terms = _c_series(u, wc, a)
    except ConvergenceError:
        return KernelEval(a, u, wc, "quadrature", 0, q)
    scale = max(abs(q), abs(s), 1e-300)
    resid = abs(s - q) / scale
    if resid > CROSSCHECK_TOL:
        raise CrossCheckError(f"C_a routes disagree by {resid:.2e} at u={u}, w={wc}, a={a}")
    return KernelEval(a, u, wc, "auto", terms, q, resid)


def S_a_array(u, w: PointLike, a: float) -> np.ndarray:
    """S_a(u, w) for an array of u.

    For Re w < 1 this is a direct oscillatory tail; otherwise one integration
    by parts relates it to C_a(u, w - 1).
    """
    wc = as_complex(w)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if wc.real < 1:
        return 2.0 * oscillatory_tail(u, wc - 1.0, a, "sin")
    c_prev = np.array([C_a_eval(float(ui), wc - 1.0, a).value for ui in u])
    return (2.0 * a ** (wc - 1.0) * np.cos(2.0 * np.pi * a * u) + (wc - 1.0) * c_prev) / (2.0 * np.pi * u)


def S_a_eval(u: float, w: PointLike, a: float) -> complex:
    """Scalar S_a(u, w) = 2 int_a^inf sin(2 pi u t) t^(w-1) dt (continued in w)."""
    if not (u > 0 and a > 0):
        raise InvalidParameterError("need u > 0 and a > 0")
    return complex(S_a_array(np.array([u]), w, a)[0])


# ---------------------------------------------------------------------------
# derivatives in w


def dw_derivative(
    func: Callable,
    w: PointLike,
    k: int,
    radius: float = 0.25,
    poles: Iterable[complex] = (),
    shrink: bool = True,
):
    """k-th derivative in w by the Cauchy integral over a circle.

    The trapezoid rule uses max(32, 8k) points.  The radius is cut to half the
    distance to the nearest listed pole; with ``shrink=False`` a pole inside
    the circle raises :class:`RadiusCollisionError` instead.  ``func`` is
    called once per circle point and may return an array.
    """
    wc = as_complex(w)
    if k < 0:
        raise InvalidParameterError("derivative order must be non-negative")
    r = effective_radius(wc, radius, poles, shrink=shrink)

    def batch(z: np.ndarray) -> np.ndarray:
        return np.array([func(zi) for zi in z])

    out = cauchy_derivative(batch, wc, k, r)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# profiles D_{w,k} and vectors X


@dataclass(frozen=True)
class ProfileSpec:
    """Parameters (lambda, w, k) of a profile D_{w,k} truncated at lambda."""

    lam: float
    w: complex
    k: int = 0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise InvalidParameterError("lambda must be positive")
        if not (0 <= self.k <= MAX_DERIVATIVE_ORDER):
            raise InvalidParameterError(f"derivative order must lie in [0, {MAX_DERIVATIVE_ORDER}]")
        object.__setattr__(self, "w", as_complex(self.w))


def profile_D_wk(t: float, spec: ProfileSpec) -> complex:
    """D_{w,k}(t): (log 1/t)^k t^-w when Re w > 1/2, else d^k/dw^k C_lambda(t, w)."""
    if not t > 0:
        raise InvalidParameterError("t must be positive")
    w = spec.w
    if w.real > 0.5:
        return complex(math.log(1.0 / t) ** spec.k * t ** (-w))
    if spec.k == 0:
        return C_a_eval(t, w, spec.lam, "auto").value
    return dw_derivative(lambda z: C_a_eval(t, z, spec.lam, "quadrature").value, w, spec.k)


def profile_array(t: np.ndarray, spec: ProfileSpec) -> np.ndarray:
    """Vectorised D_{w,k} on an array of t (quadrature route for Re w <= 1/2)."""
    t = np.asarray(t, dtype=float)
    w = spec.w
    if w.real > 0.5:
        return np.log(1.0 / t) ** spec.k * t ** (-w)
    if spec.k == 0:
        return C_a_array(t, w, spec.lam)
    return cauchy_derivative(lambda z: np.array([C_a_array(t, zi, spec.lam) for zi in z]), w, spec.k, 0.25)


def sample_X(grid: LogGrid, spec: ProfileSpec) -> GridFunction:
    """X^lambda_{w,k} = 1_{t >= lambda} D_{w,k} sampled on the grid."""
    t = np.asarray(grid.t)
    out = np.zeros(grid.N, dtype=complex)
    keep = t >= spec.lam
    out[keep] = profile_array(t[keep], spec)
    return GridFunction(grid, out)


# ---------------------------------------------------------------------------
# analytic continuation identity


def continuation_kernel(u: np.ndarray, s: complex, a: float) -> np.ndarray:
    """[(1 - s) int_a^inf sin(2 pi u t) t^(s-2) dt - a^(s-1) sin(2 pi a u)] / (pi u).

    The inner integral is S_a(u, s - 1) / 2.
    """
    inner = 0.5 * S_a_array(u, s - 1.0, a)
    return ((1.0 - s) * inner - a ** (s - 1.0) * np.sin(2.0 * np.pi * a * u)) / (np.pi * u)


def continuation_identity_residual(f: GridFunction, s: PointLike, a: float, b: float, refine: int = 4) -> float:
    """|Mellin(f)(s) - int_b^inf kernel(u, s) F(f)(u) du| for f in K_{a,b}.

    The right side integrates over a band-limited refinement of F(f) (factor
    ``refine``) so that the oscillation of the kernel is resolved.
    """
    sc = as_complex(s)
    if not sc.real < 1:
        raise DomainError("the continuation identity is checked for Re(s) < 1")
    if not np.any(f.samples):
        return 0.0
    lhs = mellin(f, sc)
    ff = cosine_transform(f)
    u_fine, ff_fine = trig_interpolate(f.grid, ff.samples, refine)
    keep = u_fine > b
    du = u_fine[keep] * f.grid.delta / refine
    kern = continuation_kernel(u_fine[keep], sc, a)
    rhs = np.sum(kern * ff_fine[keep] * du)
    return float(abs(lhs - rhs))
