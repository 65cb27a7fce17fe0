"""Arithmetic layer: bump test functions, the operator D = u (d/du)^2 u, the map

    E(phi)(u) = sum_{n >= 1} phi(n u) - (int phi) / u,

the subspace W spanned by E(D phi), and the obstruction functional whose
zeros on the critical line are the nontrivial zeros of zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .errors import DegenerateVectorError, DimensionError, EmptyFrameError, InvalidParameterError
from .specfun import PointLike, as_complex, critical_zeros
from .spaces import SubspaceFrame, constraint_residual, evaluation_row
from .transforms import GridFunction, LogGrid

SUPPORT_MARGIN = 1e-3
DETECTION_THRESHOLD = 5e-3


# ---------------------------------------------------------------------------
# test functions


class SmoothProfile:
    """A smooth function on (0, inf) with compact support [lo, hi]."""

    lo: float
    hi: float
    # Points s where the Mellin transform is known to vanish exactly; s = 1
    # means the integral is exactly zero.
    mellin_zeros: frozenset = frozenset()

    def value(self, u: np.ndarray) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def integral(self) -> float:
        """int phi, from a closed form when one is known, else adaptive quadrature."""
        if 1 in self.mellin_zeros:
            return 0.0
        val, _ = quad(lambda u: float(self.value(np.array([u]))[0]), self.lo, self.hi, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val

    def mellin(self, s: PointLike) -> complex:
        """int phi(u) u^(s-1) du by adaptive quadrature on the closed form."""
        z = as_complex(s)

        def part(fn):
            v, _ = quad(lambda u: fn(float(self.value(np.array([u]))[0]) * u ** (z - 1.0)), self.lo, self.hi,
                        epsabs=1e-14, epsrel=1e-12, limit=400)
            return v

        if z.imag == 0:  # real profile, real power: nothing to integrate in the imaginary part
            return complex(part(lambda c: c.real), 0.0)
        return complex(part(lambda c: c.real), part(lambda c: c.imag))


@dataclass
class TestFunction(SmoothProfile):
    """phi(u) = y^m exp(-1/(1 - y^2)), y = (u - c)/h, on [c - h, c + h]."""

    __test__ = False  # not a pytest class

    lam: float
    c: float
    h: float
    m: int = 0

    def __post_init__(self) -> None:
        self.lo, self.hi = self.c - self.h, self.c + self.h
        self.mellin_zeros = frozenset({1}) if self.m % 2 == 1 else frozenset()

    def _parts(self, u: np.ndarray):
        u = np.asarray(u, dtype=float)
        y = (u - self.c) / self.h
        inside = np.abs(y) < 1.0
        yi = np.where(inside, y, 0.0)
        q = 1.0 - yi**2
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            e = np.where(inside, np.exp(-1.0 / q), 0.0)
        a1 = -2.0 * yi / q**2
        a2 = -2.0 / q**2 - 8.0 * yi**2 / q**3
        return yi, e, a1, a2, inside

    def value(self, u) -> np.ndarray:
        y, e, _, _, _ = self._parts(u)
        return y**self.m * e

    def d1(self, u) -> np.ndarray:
        y, e, a1, _, _ = self._parts(u)
        m = self.m
        poly = (m * y ** (m - 1) if m >= 1 else 0.0) + y**m * a1
        return e * poly / self.h

    def d2(self, u) -> np.ndarray:
        y, e, a1, a2, _ = self._parts(u)
        m = self.m
        t0 = m * (m - 1) * y ** (m - 2) if m >= 2 else 0.0
        t1 = 2 * m * y ** (m - 1) * a1 if m >= 1 else 0.0
        poly = t0 + t1 + y**m * (a1**2 + a2)
        return e * poly / self.h**2


@dataclass
class DerivedFunction(SmoothProfile):
    """A closed-form composite of test functions (D phi, I phi, rescalings)."""

    func: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    label: str = ""
    mellin_zeros: frozenset = frozenset()

    def value(self, u) -> np.ndarray:
        return self.func(np.asarray(u, dtype=float))


def make_bump(lam: float, c: float, h: float, m: int = 0) -> TestFunction:
    """Bump with support [c - h, c + h] inside [1/Lambda + 1e-3, Lambda - 1e-3]."""
    if not lam > 1:
        raise InvalidParameterError("Lambda must exceed 1")
    if m < 0 or h <= 0:
        raise InvalidParameterError("need h > 0 and m >= 0")
    if c - h < 1.0 / lam + SUPPORT_MARGIN or c + h > lam - SUPPORT_MARGIN:
        raise InvalidParameterError(f"support [{c - h}, {c + h}] not inside [1/{lam}, {lam}] with margin")
    return TestFunction(lam, c, h, m)


def apply_D(phi: TestFunction) -> DerivedFunction:
    """(D phi)(u) = u (u phi)'' = 2 u phi' + u^2 phi''.

    Its Mellin transform is s(s-1) times that of phi, so it vanishes at 0 and 1.
    """
    f = lambda u: 2.0 * u * phi.d1(u) + u**2 * phi.d2(u)
    return DerivedFunction(f, phi.lo, phi.hi, f"D({phi!r})", mellin_zeros=frozenset({0, 1}))


def invert_profile(phi: SmoothProfile) -> DerivedFunction:
    """(I phi)(u) = phi(1/u) / u, still smooth and compactly supported."""
    f = lambda u: phi.value(1.0 / u) / u
    # the Mellin transform of I phi at s is that of phi at 1 - s
    zeros = frozenset(1 - z for z in phi.mellin_zeros)
    return DerivedFunction(f, 1.0 / phi.hi, 1.0 / phi.lo, "I(...)", mellin_zeros=zeros)


def rescale_profile(phi: SmoothProfile, theta: float) -> DerivedFunction:
    """u -> phi(theta u)."""
    f = lambda u: phi.value(theta * u)
    return DerivedFunction(f, phi.lo / theta, phi.hi / theta, "rescaled", mellin_zeros=phi.mellin_zeros)


# ---------------------------------------------------------------------------
# E map


def E_map(phi: SmoothProfile, grid: LogGrid) -> GridFunction:
    """sum_{n >= 1} phi(n u) - (int phi)/u at every node (finite sums only)."""
    t = np.asarray(grid.t)
    lo, hi = phi.support
    out = np.zeros(grid.N)
    n_max = int(math.floor(hi / t[0]))
    for n in range(1, n_max + 1):
        i0 = np.searchsorted(t, lo / n, side="left")
        i1 = np.searchsorted(t, hi / n, side="right")
        if i1 > i0:
            out[i0:i1] += phi.value(n * t[i0:i1])
    integral = phi.integral()
    if integral != 0.0:
        out -= integral / t
    return GridFunction(grid, out)


# ---------------------------------------------------------------------------
# W_Lambda


def default_family(lam: float, size: int = 8) -> list[TestFunction]:
    """A varied family of wide bumps on [1/Lambda, Lambda].

    Wide supports keep the Mellin transforms decaying fast along the critical
    line, which the finite grid needs; variety in centre, width and parity
    keeps the family nondegenerate.
    """
    if size < 4:
        raise InvalidParameterError("the family needs at least 4 members")
    lo, hi = 1.0 / lam + 2 * SUPPORT_MARGIN, lam - 2 * SUPPORT_MARGIN
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    base = [
        (0.0, 0.98, 0), (0.0, 0.98, 1),
        (-0.2, 0.78, 0), (0.2, 0.78, 0),
        (-0.2, 0.78, 1), (0.2, 0.78, 1),
        (0.0, 0.85, 2), (0.0, 0.95, 3),
    ]
    out = []
    for i in range(size):
        shift, width, m = base[i % len(base)]
        m += 2 * (i // len(base))
        out.append(make_bump(lam, mid + shift * half, width * half, m))
    return out


def build_W_Lambda(
    lam: float,
    family_size: int,
    grid: LogGrid,
    tol: float = 1e-8,
    guard_fraction: float = 0.05,
    family: Sequence[TestFunction] | None = None,
) -> SubspaceFrame:
    """Orthonormal frame of span{E(D phi)} over a bump family."""
    fam = list(family) if family is not None else default_family(lam, family_size)
    if len(fam) < 4:
        raise InvalidParameterError("the family needs at least 4 members")
    samples = np.array([E_map(apply_D(phi), grid).samples.real for phi in fam])
    y = samples * grid.sqrt_w[None, :]
    _, s, vt = np.linalg.svd(y, full_matrices=False)
    rank = int(np.sum(s >= tol * s[0])) if s.size and s[0] > 0 else 0
    if rank == 0:
        raise EmptyFrameError("E(D phi) family has rank zero", float(s[-1]) if s.size else 0.0)
    vectors = vt[:rank] / grid.sqrt_w[None, :]
    params = {"lam": lam, "L": grid.L, "N": grid.N, "guard_fraction": guard_fraction,
              "family": [[f.c, f.h, f.m] for f in fam]}
    frame = SubspaceFrame(grid, vectors, "W_Lambda", params, 0.0, tol, s)
    frame.constraint_residual = constraint_residual(frame)
    return frame


# ---------------------------------------------------------------------------
# obstruction


class Obstruction:
    """beta(w, k) = ||P_W Z_{w,k}|| / ||Z_{w,k}|| for fixed H and W frames."""

    def __init__(self, h_frame: SubspaceFrame, w_frame: SubspaceFrame):
        if h_frame.grid != w_frame.grid:
            raise InvalidParameterError("frames live on different grids")
        self.h = h_frame
        self.w = w_frame
        self.cross = h_frame.unitary() @ w_frame.unitary().T

    def __call__(self, w: PointLike, k: int = 0) -> float:
        c = evaluation_row(self.h, w, k)
        norm = float(np.linalg.norm(c))
        if norm < 1e-12:
            raise DegenerateVectorError(f"representer vanishes at w={w}, k={k}")
        return float(np.linalg.norm(c @ self.cross)) / norm


def obstruction_beta(h_frame: SubspaceFrame, w_frame: SubspaceFrame, w: PointLike, k: int = 0) -> float:
    """Normalised projection of the representer Z_{w,k} onto W."""
    return Obstruction(h_frame, w_frame)(w, k)


@dataclass
class ObstructionReport:
    lam: float
    t_samples: np.ndarray
    beta: np.ndarray
    minima: list[tuple[float, float]]
    threshold: float = DETECTION_THRESHOLD

    def detections(self) -> list[tuple[float, float]]:
        return [(t, b) for t, b in self.minima if b < self.threshold]

    def summary(self, profile: str = "") -> dict:
        return {
            "minima": [{"t": t, "beta": b} for t, b in self.minima if b < self.threshold],
            "all_minima": [{"t": t, "beta": b} for t, b in self.minima],
            "threshold": self.threshold,
            "profile": profile,
            "lambda": self.lam,
        }


def zero_scan(
    h_frame: SubspaceFrame,
    w_frame: SubspaceFrame,
    t_min: float,
    t_max: float,
    step: float,
    threshold: float = DETECTION_THRESHOLD,
) -> ObstructionReport:
    """Sample beta on w = 1/2 + it and refine local minima by golden section."""
    if not (t_max > t_min and step > 0):
        raise InvalidParameterError("need t_max > t_min and step > 0")
    obs = Obstruction(h_frame, w_frame)
    ts = np.arange(t_min, t_max + 0.5 * step, step)
    beta = np.array([obs(complex(0.5, t)) for t in ts])
    minima = []
    for i in range(1, len(ts) - 1):
        if beta[i] < beta[i - 1] and beta[i] <= beta[i + 1]:
            f = lambda t: obs(complex(0.5, t))
            res = minimize_scalar(f, bracket=(ts[i - 1], ts[i], ts[i + 1]), method="golden",
                                  options={"xtol": (step / 100.0) / max(abs(ts[i]), 1.0)})
            minima.append((float(res.x), float(res.fun)))
    minima.sort()
    return ObstructionReport(h_frame.params.get("lam", float("nan")), ts, beta, minima, threshold)


def detection_matches(report: ObstructionReport, t_min: float, t_max: float, tol: float = 5e-2) -> tuple[bool, list[float]]:
    """Do sub-threshold minima match the zeta zeros in [t_min, t_max] one to one?"""
    zeros = critical_zeros(t_min, t_max)
    found = [t for t, _ in report.detections()]
    if len(found) != len(zeros):
        return False, zeros
    ok = all(abs(f - z) <= tol for f, z in zip(sorted(found), zeros))
    return ok, zeros


# ---------------------------------------------------------------------------
# HP_Lambda


def build_HP_Lambda(h_frame: SubspaceFrame, w_frame: SubspaceFrame) -> SubspaceFrame:
    """Orthogonal complement of W inside H, as a frame in H's coordinates."""
    if h_frame.grid != w_frame.grid:
        raise InvalidParameterError("frames live on different grids")
    d_h, d_w = h_frame.dimension, w_frame.dimension
    if d_w > d_h:
        raise DimensionError(f"dim W = {d_w} exceeds dim H = {d_h}")
    cross = h_frame.unitary() @ w_frame.unitary().T
    q, _ = np.linalg.qr(cross, mode="complete")
    comp = q[:, d_w:]
    vectors = comp.T @ h_frame.vectors
    params = dict(h_frame.params)
    return SubspaceFrame(h_frame.grid, vectors, "HP_Lambda", params, h_frame.constraint_residual, h_frame.tol)
