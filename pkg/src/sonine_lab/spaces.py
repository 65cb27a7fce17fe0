"""Discretised Sonine subspaces, their G-split, evaluation functionals and
Riesz representers.

A subspace is stored as a real frame: rows f_i of samples on the grid with
sum_j f_i(t_j) f_k(t_j) w_j = delta_ik.  All linear algebra happens in the
coordinates y_j = sqrt(w_j) f_j, where the weighted pairing is the plain dot
product and the inversion I is a reversal of the node order.

Constraints are imposed on the grid nodes.  In addition to the defining
support conditions, a guard band of nodes at the far end of the window
(``guard_fraction`` of the grid) is treated as outside the admissible region,
both for the samples and for their transforms.  The guard keeps vectors away
from the window edge, where the discrete operators stop imitating the
continuum ones.  For H_Lambda the guard sits at the small-t end; for K_{a,b}
it sits at the large-t end, so the two constructions remain exact images of
each other under I.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import subspace_angles

from ._cauchy import cauchy_derivative, laurent_parts
from .errors import (
    DimensionError,
    EigenvalueDriftError,
    EmptyFrameError,
    GridMismatchError,
    InvalidParameterError,
)
from .specfun import PointLike, as_complex, completed_factor_array
from .transforms import GridFunction, LogGrid, cosine_matrix, g_matrix, make_log_grid, mellin_weights, unitary

DEFAULT_TOL = 1e-8
DEFAULT_GUARD = 0.05
SPLIT_DRIFT_LIMIT = 0.1
POLE_CLEARANCE = 0.05
POLE_SNAP = 1e-8


@dataclass
class SubspaceFrame:
    """Orthonormal real frame of a discretised subspace."""

    grid: LogGrid
    vectors: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)
    constraint_residual: float = 0.0
    tol: float = DEFAULT_TOL
    singular_values: np.ndarray | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[0])

    def unitary(self) -> np.ndarray:
        """Frame rows in sqrt(w)-weighted coordinates (orthonormal rows)."""
        return self.vectors * self.grid.sqrt_w[None, :]

    def vector(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.vectors[i])

    def gram_error(self) -> float:
        y = self.unitary()
        return float(np.abs(y @ y.T - np.eye(self.dimension)).max()) if self.dimension else 0.0


# ---------------------------------------------------------------------------
# constraint sets


def guard_count(grid: LogGrid, guard_fraction: float) -> int:
    return int(math.ceil(guard_fraction * grid.N)) if guard_fraction > 0 else 0


def _h_masks(grid: LogGrid, lam: float, guard_fraction: float) -> tuple[np.ndarray, np.ndarray]:
    """(admissible sample nodes, nodes where the G-image must vanish) for H_Lambda."""
    t = np.asarray(grid.t)
    g = guard_count(grid, guard_fraction)
    low_guard = np.zeros(grid.N, dtype=bool)
    low_guard[:g] = True
    cols = (t <= lam) & ~low_guard
    rows = (t > lam) | low_guard
    return cols, rows


def _k_masks(grid: LogGrid, a: float, b: float, guard_fraction: float) -> tuple[np.ndarray, np.ndarray]:
    """(admissible sample nodes, nodes where the cosine image must vanish) for K_{a,b}."""
    t = np.asarray(grid.t)
    g = guard_count(grid, guard_fraction)
    high_guard = np.zeros(grid.N, dtype=bool)
    if g:
        high_guard[-g:] = True
    cols = (t >= a) & ~high_guard
    rows = (t < b) | high_guard
    return cols, rows


def _check_inside(grid: LogGrid, *points: float) -> None:
    lo, hi = grid.t[0], grid.t[-1]
    for p in points:
        if not (lo < p < hi):
            raise InvalidParameterError(f"{p} is not strictly inside the grid range [{lo:.4g}, {hi:.4g}]")


def _smoothness_order(grid: LogGrid, basis: np.ndarray) -> np.ndarray:
    """Rotate an orthonormal basis (columns, unitary coords) by increasing roughness.

    Roughness is the squared second difference of y = sqrt(t) f in the log
    variable, so the first frame vectors are the most slowly varying ones.
    """
    if basis.shape[1] <= 1:
        return basis
    # y_j = sqrt(t_j) f_j = unitary_j / sqrt(Delta) up to the endpoint weights
    rough = np.diff(basis, n=2, axis=0)
    energy = rough.T @ rough
    _, rot = np.linalg.eigh(energy)
    return basis @ rot


def _nullspace_frame(
    grid: LogGrid,
    operator_u: np.ndarray,
    cols: np.ndarray,
    rows: np.ndarray,
    tol: float,
    label: str,
) -> tuple[np.ndarray, np.ndarray, float]:
    c = operator_u[np.ix_(rows, cols)]
    _, s, vt = np.linalg.svd(c, full_matrices=True)
    smax = s[0] if s.size else 0.0
    keep = int(np.sum(s >= tol * smax)) if smax > 0 else 0
    null = vt[keep:, :].T  # columns span the admissible nullspace
    if null.shape[1] == 0:
        raise EmptyFrameError(f"no nullvector for {label} at tol={tol:g}", float(s[-1]) / smax)
    null = _smoothness_order(grid, null)
    full = np.zeros((grid.N, null.shape[1]))
    full[cols, :] = null
    resid = np.linalg.norm(c @ null, axis=0)
    vectors = (full / grid.sqrt_w[:, None]).T
    return vectors, s, float(resid.max())


def build_K_ab(
    a: float,
    b: float,
    grid: LogGrid,
    tol: float = DEFAULT_TOL,
    guard_fraction: float = DEFAULT_GUARD,
) -> SubspaceFrame:
    """Functions vanishing below a whose cosine transform vanishes below b."""
    _check_inside(grid, a, b)
    cols, rows = _k_masks(grid, a, b, guard_fraction)
    op = unitary(grid, cosine_matrix(grid))
    vectors, s, resid = _nullspace_frame(grid, op, cols, rows, tol, f"K_{{{a},{b}}}")
    params = {"a": a, "b": b, "L": grid.L, "N": grid.N, "guard_fraction": guard_fraction}
    return SubspaceFrame(grid, vectors, "K_ab", params, resid, tol, s)


def build_H_Lambda(
    lam: float,
    grid: LogGrid,
    tol: float = DEFAULT_TOL,
    guard_fraction: float = DEFAULT_GUARD,
    check_conjugation: bool = True,
) -> SubspaceFrame:
    """Functions supported in (0, Lambda] whose G-image is supported in (0, Lambda].

    With ``check_conjugation`` the frame is compared with I(K_{1/Lambda,1/Lambda})
    built independently; the largest principal angle is stored in
    ``params['conjugation_angle']``.
    """
    if not lam > 1:
        raise InvalidParameterError("Lambda must exceed 1")
    _check_inside(grid, lam, 1.0 / lam)
    cols, rows = _h_masks(grid, lam, guard_fraction)
    op = unitary(grid, g_matrix(grid))
    vectors, s, resid = _nullspace_frame(grid, op, cols, rows, tol, f"H_{lam}")
    params = {"lam": lam, "L": grid.L, "N": grid.N, "guard_fraction": guard_fraction}
    frame = SubspaceFrame(grid, vectors, "H_Lambda", params, resid, tol, s)
    if check_conjugation:
        k_frame = build_K_ab(1.0 / lam, 1.0 / lam, grid, tol, guard_fraction)
        frame.params["conjugation_angle"] = max_principal_angle(frame, invert_frame(k_frame))
    return frame


def constraint_residual(frame: SubspaceFrame) -> float:
    """Largest violation of the defining constraints over the frame vectors.

    For each vector the maximum of (samples outside the admissible set) and
    (transform on the forbidden set), both relative to the vector norm.
    K-type frames use the cosine transform, the other kinds use G with the
    H_Lambda constraint set.
    """
    grid = frame.grid
    gf = frame.params.get("guard_fraction", DEFAULT_GUARD)
    if frame.kind == "K_ab":
        cols, rows = _k_masks(grid, frame.params["a"], frame.params["b"], gf)
        op = cosine_matrix(grid)
    else:
        cols, rows = _h_masks(grid, frame.params["lam"], gf)
        op = g_matrix(grid)
    if frame.dimension == 0:
        return 0.0
    y = frame.unitary()
    norms = np.linalg.norm(y, axis=1)
    outside = np.linalg.norm(y[:, ~cols], axis=1) / norms
    image = (op @ frame.vectors.T).T * grid.sqrt_w[None, :]
    leak = np.linalg.norm(image[:, rows], axis=1) / norms
    return float(max(outside.max(), leak.max()))


# ---------------------------------------------------------------------------
# geometry helpers


def invert_frame(frame: SubspaceFrame) -> SubspaceFrame:
    """Apply I to every frame vector (an isometry, so the frame stays orthonormal)."""
    vecs = frame.vectors[:, ::-1] / frame.grid.t[None, :]
    return SubspaceFrame(frame.grid, vecs, f"I({frame.kind})", dict(frame.params), frame.constraint_residual, frame.tol)


def principal_angles(a: SubspaceFrame, b: SubspaceFrame) -> np.ndarray:
    """Principal angles (radians, descending) between two frames' spans."""
    if a.grid != b.grid:
        raise GridMismatchError("frames live on different grids")
    if a.dimension == 0 or b.dimension == 0:
        return np.zeros(0)
    return subspace_angles(a.unitary().T, b.unitary().T)


def max_principal_angle(a: SubspaceFrame, b: SubspaceFrame) -> float:
    ang = principal_angles(a, b)
    return float(ang.max()) if ang.size else 0.0


def containment_residual(a: SubspaceFrame, b: SubspaceFrame) -> float:
    """Largest relative norm of the component of span(a) orthogonal to span(b)."""
    ya, yb = a.unitary(), b.unitary()
    rest = ya - (ya @ yb.T) @ yb
    return float(np.linalg.svd(rest, compute_uv=False).max()) if a.dimension else 0.0


# ---------------------------------------------------------------------------
# G split


def split_G_eigenspaces(frame: SubspaceFrame) -> tuple[SubspaceFrame, SubspaceFrame]:
    """Eigenframes of the compressed G for eigenvalues near +1 and -1."""
    if frame.kind != "H_Lambda":
        raise InvalidParameterError("the G split applies to H_Lambda frames")
    y = frame.unitary()
    gu = unitary(frame.grid, g_matrix(frame.grid))
    comp = y @ gu @ y.T
    comp = 0.5 * (comp + comp.T)
    vals, vecs = np.linalg.eigh(comp)
    drift = np.minimum(np.abs(vals - 1.0), np.abs(vals + 1.0))
    worst = float(drift.max()) if drift.size else 0.0
    if worst > SPLIT_DRIFT_LIMIT:
        raise EigenvalueDriftError(f"compressed G eigenvalue {worst:.3g} away from +-1")
    plus = vals > 0
    out = []
    for sel, sign in ((plus, "+"), (~plus, "-")):
        vec = vecs[:, sel].T @ frame.vectors
        params = dict(frame.params, sign=sign, eigen_drift=worst)
        out.append(SubspaceFrame(frame.grid, vec, "H_Lambda", params, frame.constraint_residual, frame.tol))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# evaluation functionals


def completed_mellin(vectors: np.ndarray, grid: LogGrid, s: np.ndarray) -> np.ndarray:
    """pi^(-s/2) Gamma(s/2) * Mellin(f_i)(s) for every s (rows) and frame vector (columns)."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    mel = mellin_weights(grid, s) @ vectors.T
    return completed_factor_array(s)[:, None] * mel


def _nearest_trivial_zero(w: complex) -> tuple[int, float]:
    m = min(0, 2 * round(w.real / 2.0))
    return m, abs(w - m)


def evaluation_row(frame: SubspaceFrame, w: PointLike, k: int = 0) -> np.ndarray:
    """Entries M(f_i)^(k)(w) where M(f)(s) = pi^(-s/2) Gamma(s/2) Mellin(f)(s).

    At w in {0, -2, -4, ...} the pole of Gamma(s/2) meets the trivial zero of
    the Mellin transform, and the value comes from a Cauchy circle centred
    there.  Within 0.05 of such a point (but not on it) evaluation is refused.
    """
    wc = as_complex(w)
    if k < 0:
        raise InvalidParameterError("derivative order must be non-negative")
    m, dist = _nearest_trivial_zero(wc)
    func = lambda z: completed_mellin(frame.vectors, frame.grid, z)
    if dist < POLE_SNAP:
        # removable singularity: the next pole is 2 away
        return cauchy_derivative(func, complex(m), k, 0.25)
    if dist < POLE_CLEARANCE:
        raise InvalidParameterError(f"w={wc} is within {POLE_CLEARANCE} of the trivial zero {m}")
    if k == 0:
        assert dist >= POLE_CLEARANCE  # direct products are never formed next to a pole
        return func(wc)[0]
    return cauchy_derivative(func, wc, k, min(0.25, 0.5 * dist))


def pole_cancellation(frame: SubspaceFrame, point: int, radius: float = 0.25) -> tuple[np.ndarray, float]:
    """Finite values of M(f_i) at an even non-positive integer and the residual.

    The residual is the largest |residue| of M(f_i) there (relative to
    ||f_i||), which vanishes when the Mellin transform has the expected zero.
    """
    if point > 0 or point % 2:
        raise InvalidParameterError("trivial-zero points are 0, -2, -4, ...")
    func = lambda z: completed_mellin(frame.vectors, frame.grid, z)
    const, residue = laurent_parts(func, complex(point), radius)
    return const, float(np.abs(residue).max())


@dataclass
class RepresenterVector:
    """Riesz representer of f -> M(f)^(k)(w) inside a frame's span."""

    w: complex
    k: int
    lam: float
    coefficients: np.ndarray
    as_grid: GridFunction

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


def riesz_Z(frame: SubspaceFrame, w: PointLike, k: int = 0) -> RepresenterVector:
    """Representer Z with (f, Z] = M(f)^(k)(w) for every f in the span."""
    coeffs = evaluation_row(frame, w, k)
    samples = coeffs @ frame.vectors
    return RepresenterVector(as_complex(w), k, frame.params.get("lam", float("nan")), coeffs, GridFunction(frame.grid, samples))


def independence_gram(frame: SubspaceFrame, specs: Sequence[tuple[PointLike, int]]) -> float:
    """Smallest singular value of the column-normalised representer coefficients."""
    if not specs or len(specs) > frame.dimension:
        raise DimensionError(f"need between 1 and {frame.dimension} specs, got {len(specs)}")
    cols = []
    for w, k in specs:
        c = evaluation_row(frame, w, k)
        n = np.linalg.norm(c)
        cols.append(c / n if n > 0 else c)
    mat = np.array(cols).T
    return float(np.linalg.svd(mat, compute_uv=False).min())


# ---------------------------------------------------------------------------
# zero scans on K_{a,b}


@dataclass
class TrivialZeroReport:
    points: list[float]
    residuals: list[float]
    control_points: list[float]
    controls: list[float]


def _mellin_abs_max(frame: SubspaceFrame, s: complex) -> float:
    mel = mellin_weights(frame.grid, s) @ frame.vectors.T
    norms = np.sqrt(np.sum(frame.vectors**2 * frame.grid.w[None, :], axis=1))
    return float(np.max(np.abs(mel[0]) / norms))


def trivial_zero_scan(frame: SubspaceFrame, j_max: int) -> TrivialZeroReport:
    """r_j = max_i |Mellin(f_i)(1 + 2j)| / ||f_i|| and controls at 2 + 2j."""
    if frame.kind != "K_ab":
        raise InvalidParameterError("trivial zeros are scanned on K_{a,b} frames")
    pts = [1.0 + 2 * j for j in range(j_max + 1)]
    ctl = [2.0 + 2 * j for j in range(j_max + 1)]
    return TrivialZeroReport(
        pts,
        [_mellin_abs_max(frame, p) for p in pts],
        ctl,
        [_mellin_abs_max(frame, p) for p in ctl],
    )


def common_zero_scan(frame: SubspaceFrame, s_points: Sequence[PointLike]) -> np.ndarray:
    """Euclidean norm of (Mellin(f_i)(s))_i for each s."""
    if frame.kind != "K_ab":
        raise InvalidParameterError("common zeros are scanned on K_{a,b} frames")
    s = np.array([as_complex(p) for p in s_points])
    mel = mellin_weights(frame.grid, s) @ frame.vectors.T
    return np.linalg.norm(mel, axis=1)


# ---------------------------------------------------------------------------
# serialisation


def save_frame(frame: SubspaceFrame, csv_path: str | Path) -> Path:
    """Write the frame as CSV (node, vector_1, ...) plus a JSON sidecar."""
    csv_path = Path(csv_path)
    header = ",".join(["node"] + [f"vector_{i + 1}" for i in range(frame.dimension)])
    data = np.column_stack([np.arange(frame.grid.N), frame.vectors.T])
    fmt = ["%d"] + ["%.17g"] * frame.dimension
    np.savetxt(csv_path, data, delimiter=",", header=header, comments="", fmt=fmt)
    sidecar = csv_path.with_suffix(".json")
    meta = {
        "kind": frame.kind,
        "params": frame.params,
        "dimension": frame.dimension,
        "constraint_residual": frame.constraint_residual,
        "tol": frame.tol,
    }
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return sidecar


def load_frame(csv_path: str | Path) -> SubspaceFrame:
    """Read a frame written by :func:`save_frame`."""
    csv_path = Path(csv_path)
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    params = meta["params"]
    grid = make_log_grid(params["L"], params["N"])
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != grid.N:
        raise InvalidParameterError(f"{csv_path}: expected {grid.N} rows, found {data.shape[0]}")
    vectors = data[:, 1:].T.copy()
    if vectors.shape[0] != meta["dimension"]:
        raise InvalidParameterError(f"{csv_path}: sidecar dimension {meta['dimension']} != {vectors.shape[0]} columns")
    return SubspaceFrame(grid, vectors, meta["kind"], params, meta["constraint_residual"], meta["tol"])
