"""Discrete model of L^2((0, inf), dt) on a log-uniform, reciprocal-symmetric grid.

Nodes are t_j = exp(-L + j*Delta) with Delta = 2L/(N-1), so t_{N-1-j} = 1/t_j
and the inversion f(t) -> f(1/t)/t is an exact node permutation.

The cosine transform is realised as an exact orthogonal involution on the
space of grid functions.  In the log variable x = log t, with y(x) =
sqrt(t) f(t), the transform is a Hankel convolution

    y -> Delta * sum_j K(x_i + x_j) y_j

whose kernel K has Fourier symbol gamma_+(1/2 - i tau).  The kernel is built
from that symbol on the discrete frequencies of the periodic window
(period N*Delta).  Because gamma_+(s) gamma_+(1-s) = 1 and |gamma_+| = 1 on the
critical line, the resulting matrix squares to the identity to rounding.  A
plain trapezoid rule for 2 cos(2 pi t u) on these nodes aliases badly once
t*u is large, which is why it is not used.
"""

from __future__ import annotations

import csv
import functools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.linalg import hankel

from .errors import GridMismatchError, InvalidParameterError
from .specfun import PointLike, as_complex, gamma_plus_array

TAIL_FRACTION = 0.05
TAIL_RATIO = 1e-6


@dataclass(frozen=True)
class LogGrid:
    """Log-uniform grid on [e^-L, e^L] with N (even) nodes."""

    L: float
    N: int

    def __post_init__(self) -> None:
        if not (self.L > 0 and math.isfinite(self.L)):
            raise InvalidParameterError(f"half extent must be positive, got {self.L}")
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise InvalidParameterError(f"point count must be an even integer >= 8, got {self.N}")

    @cached_property
    def delta(self) -> float:
        return 2.0 * self.L / (self.N - 1)

    @cached_property
    def x(self) -> np.ndarray:
        j = np.arange(self.N)
        # Symmetric construction keeps x_{N-1-j} = -x_j bit for bit.
        x = (j - (self.N - 1) / 2.0) * self.delta
        x.setflags(write=False)
        return x

    @cached_property
    def t(self) -> np.ndarray:
        t = np.exp(self.x)
        t.setflags(write=False)
        return t

    @cached_property
    def w(self) -> np.ndarray:
        # Rectangle rule: node j owns the log-cell [x_j - Delta/2, x_j + Delta/2].
        # The operators treat the N nodes as one period, and under these
        # weights they are exactly orthogonal (endpoint halving breaks that).
        w = self.t * self.delta
        w.setflags(write=False)
        return w

    @cached_property
    def sqrt_w(self) -> np.ndarray:
        s = np.sqrt(self.w)
        s.setflags(write=False)
        return s

    def index_of(self, t: float) -> int:
        """Index of the node nearest to ``t`` in log distance."""
        return int(np.clip(round((math.log(t) + self.L) / self.delta), 0, self.N - 1))

    def tail_mask(self, fraction: float = TAIL_FRACTION) -> np.ndarray:
        """Boolean mask of the outer ``fraction`` of nodes at each end."""
        k = max(1, int(math.ceil(fraction * self.N)))
        m = np.zeros(self.N, dtype=bool)
        m[:k] = True
        m[-k:] = True
        return m


def make_log_grid(L: float, N: int) -> LogGrid:
    """Build the reciprocal-symmetric grid with half extent L and N nodes."""
    return LogGrid(float(L), int(N))


@dataclass
class GridFunction:
    """Complex samples of a function on a :class:`LogGrid`."""

    grid: LogGrid
    samples: np.ndarray
    tail_warning: bool = field(default=False)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.N,):
            raise InvalidParameterError(
                f"expected {self.grid.N} samples, got shape {self.samples.shape}"
            )

    @classmethod
    def from_callable(cls, grid: LogGrid, func) -> "GridFunction":
        return cls(grid, np.asarray(func(np.asarray(grid.t)), dtype=complex))

    def norm(self) -> float:
        """L^2(dt) norm with the grid weights (conjugated)."""
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2 * self.grid.w)))

    def _check(self, other: "GridFunction") -> None:
        if other.grid != self.grid:
            raise GridMismatchError("grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.samples + other.samples, self.tail_warning or other.tail_warning)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.samples - other.samples, self.tail_warning or other.tail_warning)

    def __mul__(self, scalar: complex) -> "GridFunction":
        return GridFunction(self.grid, self.samples * scalar, self.tail_warning)

    __rmul__ = __mul__


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise GridMismatchError("grid functions live on different grids")


def bilinear_pair(f: GridFunction, g: GridFunction) -> complex:
    """Euclidean pairing sum_j f_j g_j w_j, with no complex conjugation."""
    _same_grid(f, g)
    return complex(np.sum(f.samples * g.samples * f.grid.w))


def has_heavy_tails(grid: LogGrid, samples: np.ndarray) -> bool:
    """True when |f| on the extreme 5% of nodes exceeds 1e-6 of max |f|."""
    a = np.abs(samples)
    peak = a.max() if a.size else 0.0
    if peak == 0.0:
        return False
    return bool(a[grid.tail_mask()].max() >= TAIL_RATIO * peak)


# ---------------------------------------------------------------------------
# operator matrices


def multiplier_symbol(tau: np.ndarray) -> np.ndarray:
    """Fourier symbol of the log-variable kernel: gamma_+(1/2 - i tau)."""
    return gamma_plus_array(0.5 - 1j * np.asarray(tau, dtype=float))


@functools.lru_cache(maxsize=4)
def _periodic_kernel(L: float, N: int) -> np.ndarray:
    """Delta * K(n Delta) for n = 0..N-1 (indices taken modulo N)."""
    grid = LogGrid(L, N)
    k = np.fft.fftfreq(N, d=1.0 / N)  # 0, 1, ..., N/2-1, -N/2, ..., -1
    tau = 2.0 * np.pi * k / (N * grid.delta)
    sym = multiplier_symbol(tau)
    # The Nyquist mode is mapped to itself with a sign flip by the reflection,
    # so it needs a real symbol of modulus one for the square to be exact.
    sym[N // 2] = 1.0
    kern = np.fft.ifft(sym).real
    kern.setflags(write=False)
    return kern


def _hankel_in_x(grid: LogGrid, reverse: bool) -> np.ndarray:
    """Matrix Delta*K(+-(x_i + x_j)) in symmetric (sqrt t) coordinates."""
    kern = _periodic_kernel(grid.L, grid.N)
    n = np.arange(2 * grid.N - 1) - (grid.N - 1)  # i + j - (N - 1)
    if reverse:
        n = -n
    vals = kern[n % grid.N]
    return hankel(vals[: grid.N], vals[grid.N - 1 :])


@functools.lru_cache(maxsize=2)
def _cosine_matrix(L: float, N: int) -> np.ndarray:
    grid = LogGrid(L, N)
    st = np.sqrt(grid.t)
    m = _hankel_in_x(grid, reverse=False)
    m *= st[None, :]
    m /= st[:, None]
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=2)
def _g_matrix(L: float, N: int) -> np.ndarray:
    grid = LogGrid(L, N)
    st = np.sqrt(grid.t)
    m = _hankel_in_x(grid, reverse=True)
    m *= st[None, :]
    m /= st[:, None]
    m.setflags(write=False)
    return m


def cosine_matrix(grid: LogGrid) -> np.ndarray:
    """Dense N x N matrix of the discrete cosine transform on samples f_j."""
    return _cosine_matrix(grid.L, grid.N)


def g_matrix(grid: LogGrid) -> np.ndarray:
    """Dense matrix of G = I F I on samples, built directly from the reflected kernel."""
    return _g_matrix(grid.L, grid.N)


def unitary(grid: LogGrid, matrix: np.ndarray) -> np.ndarray:
    """Conjugate an operator on samples to the coordinates y_j = sqrt(w_j) f_j."""
    s = grid.sqrt_w
    return matrix * s[:, None] / s[None, :]


# ---------------------------------------------------------------------------
# operators on grid functions


def cosine_transform(f: GridFunction) -> GridFunction:
    """Discrete cosine transform 2 int cos(2 pi t u) f(u) du.

    The result carries ``tail_warning`` when f does not decay at the grid ends
    (the periodic model then wraps the missing mass around).
    """
    out = cosine_matrix(f.grid) @ f.samples
    return GridFunction(f.grid, out, f.tail_warning or has_heavy_tails(f.grid, f.samples))


def involution_I(f: GridFunction) -> GridFunction:
    """I f (t) = f(1/t) / t, an exact node permutation."""
    return GridFunction(f.grid, f.samples[::-1] / f.grid.t, f.tail_warning)


def operator_G(f: GridFunction) -> GridFunction:
    """G = I F I, applied as the composition of the three steps."""
    return involution_I(cosine_transform(involution_I(f)))


def dilation_steps(grid: LogGrid, theta: float) -> int:
    """Integer node shift m with theta = exp(m Delta), or raise."""
    if not theta > 0:
        raise InvalidParameterError("dilation factor must be positive")
    m = math.log(theta) / grid.delta
    mi = round(m)
    if abs(m - mi) > 1e-9 * max(1.0, abs(m)):
        raise InvalidParameterError(f"theta={theta} is not exp(m*Delta) for an integer m")
    return int(mi)


def dilation(f: GridFunction, theta: float) -> GridFunction:
    """D_theta f (t) = f(t / theta) / sqrt(theta) with zero fill."""
    m = dilation_steps(f.grid, theta)
    out = np.zeros_like(f.samples)
    if m >= 0:
        out[m:] = f.samples[: f.grid.N - m]
    else:
        out[:m] = f.samples[-m:]
    return GridFunction(f.grid, out / math.sqrt(theta), f.tail_warning)


def mellin_weights(grid: LogGrid, s: np.ndarray | complex) -> np.ndarray:
    """Rows t_j^(s-1) w_j, one row per requested s."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    return np.exp(np.outer(s - 1.0, grid.x)) * grid.w[None, :]


def mellin(f: GridFunction, s: PointLike) -> complex:
    """Mellin transform sum_j f_j t_j^(s-1) w_j."""
    z = as_complex(s)
    return complex(mellin_weights(f.grid, z)[0] @ f.samples)


def trig_interpolate(grid: LogGrid, samples: np.ndarray, factor: int) -> tuple[np.ndarray, np.ndarray]:
    """Band-limited refinement of sqrt(t) f on the periodic window.

    Returns fine nodes t (covering one period N*Delta starting at e^-L) and
    the interpolated samples of f.  Exact for the periodic model.
    """
    if factor < 1:
        raise InvalidParameterError("refinement factor must be >= 1")
    n = grid.N
    y = np.sqrt(grid.t) * np.asarray(samples, dtype=complex)
    spec = np.fft.fft(y)
    big = np.zeros(n * factor, dtype=complex)
    half = n // 2
    big[:half] = spec[:half]
    big[-half + 1 :] = spec[half + 1 :]
    big[half] = 0.5 * spec[half]
    big[-half] = 0.5 * spec[half]
    fine = np.fft.ifft(big) * factor
    x_fine = -grid.L + np.arange(n * factor) * grid.delta / factor
    t_fine = np.exp(x_fine)
    return t_fine, fine / np.sqrt(t_fine)


# ---------------------------------------------------------------------------
# CSV serialisation

_HEADER = re.compile(r"#\s*L=(?P<L>\S+)\s+N=(?P<N>\S+)")


def write_grid_function(path: str | Path, f: GridFunction) -> None:
    """Write columns (t, re, im) preceded by a ``# L=<val> N=<val>`` header."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# L={f.grid.L!r} N={f.grid.N}\n")
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for t, v in zip(f.grid.t, f.samples):
            w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


def read_grid_function(path: str | Path) -> GridFunction:
    """Inverse of :func:`write_grid_function`."""
    with open(path, newline="") as fh:
        first = fh.readline()
        m = _HEADER.match(first.strip())
        if not m:
            raise InvalidParameterError(f"{path}: missing '# L=<val> N=<val>' header")
        grid = make_log_grid(float(m["L"]), int(m["N"]))
        rows = list(csv.DictReader(fh))
    if len(rows) != grid.N:
        raise InvalidParameterError(f"{path}: expected {grid.N} rows, found {len(rows)}")
    samples = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return GridFunction(grid, samples)
