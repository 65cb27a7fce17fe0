"""Named invariant suites run by ``sonine-lab verify``.

Each suite returns a list of :class:`Check` records (measured value, tolerance,
pass flag).  Checks never raise on a numerical miss; domain errors raised by
the library are caught and reported as failures with their message.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import kernels, spaces, specfun, transforms, zeta_lab
from .profiles import RunConfig


@dataclass
class Check:
    name: str
    tag: str
    measured: float
    tolerance: float
    passed: bool
    relation: str = "<="
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measured"] = _json_float(self.measured)
        return d


def _json_float(x: float):
    if x is None or not math.isfinite(x):
        return str(x)
    return float(x)


def _le(name: str, tag: str, measured: float, tol: float, detail: str = "") -> Check:
    return Check(name, tag, float(measured), tol, bool(measured <= tol), "<=", detail)


def _ge(name: str, tag: str, measured: float, tol: float, detail: str = "") -> Check:
    return Check(name, tag, float(measured), tol, bool(measured >= tol), ">=", detail)


class Lab:
    """Lazily built objects shared by the checks of one run."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.grid = config.profile.grid()
        self.guard = config.profile.guard_fraction

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.config.seed)

    @cached_property
    def H(self) -> spaces.SubspaceFrame:
        return spaces.build_H_Lambda(self.config.lam, self.grid, self.config.tol("nullspace", 1e-8), self.guard)

    @cached_property
    def K(self) -> spaces.SubspaceFrame:
        lam = 1.0 / self.config.lam
        return spaces.build_K_ab(lam, lam, self.grid, self.config.tol("nullspace", 1e-8), self.guard)

    @cached_property
    def W(self) -> spaces.SubspaceFrame:
        return zeta_lab.build_W_Lambda(self.config.lam, 8, self.grid, guard_fraction=self.guard)


# ---------------------------------------------------------------------------
# specfun


def _random_points(rng, count, re_range, im_max, keep=lambda s: True):
    pts = []
    while len(pts) < count:
        s = complex(rng.uniform(*re_range), rng.uniform(-im_max, im_max))
        if keep(s):
            pts.append(s)
    return pts


def _far_from_integers(s: complex, gap: float = 0.1) -> bool:
    # poles of gamma_+ sit at 0, -2, ...; zeros at 1, 3, ...; the same holds for 1 - s
    for z in (s, 1 - s):
        n = round(z.real)
        if abs(z - n) < gap:
            return False
    return True


def suite_specfun(lab: Lab) -> list[Check]:
    cfg = lab.config
    rng = lab.rng()
    pts = _random_points(rng, 100, (-10, 10), 20, _far_from_integers)
    refl = max(abs(specfun.gamma_plus(s).value * specfun.gamma_plus(1 - s).value - 1) for s in pts)
    strip = _random_points(rng, 50, (1e-3, 1 - 1e-3), 30)
    fe = max(
        abs(specfun.riemann_zeta(1 - s) - specfun.gamma_plus(s).value * specfun.riemann_zeta(s))
        / (1 + abs(specfun.riemann_zeta(1 - s)))
        for s in strip
    )
    rec_pts = _random_points(rng, 50, (0.1, 20), 20)
    rec = max(abs(np.exp(specfun.log_gamma(s + 1) - specfun.log_gamma(s)) / s - 1) for s in rec_pts)
    poles, zeros = [], []
    for n in range(-10, 11):
        v = specfun.gamma_plus(n)
        if v.is_pole:
            poles.append(n)
        elif v.value == 0:
            zeros.append(n)
    inventory_ok = poles == list(range(-10, 1, 2)) and zeros == [1, 3, 5, 7, 9]
    return [
        _le("gamma_plus_reflection", "multiplier_reflection", refl, cfg.tol("reflection", 1e-10)),
        _le("zeta_functional_equation", "multiplier_reflection", fe, cfg.tol("functional_equation", 1e-8)),
        _le("log_gamma_recurrence", "special_functions", rec, cfg.tol("recurrence", 1e-12)),
        Check("gamma_plus_pole_zero_inventory", "special_functions", 0.0 if inventory_ok else 1.0, 0.0,
              inventory_ok, "==", f"poles={poles} zeros={zeros}"),
    ]


# ---------------------------------------------------------------------------
# transforms


def _middle_mask(grid: transforms.LogGrid, share: float = 0.8) -> np.ndarray:
    k = int(round((1 - share) / 2 * grid.N))
    m = np.zeros(grid.N, dtype=bool)
    m[k : grid.N - k] = True
    return m


def suite_transforms(lab: Lab) -> list[Check]:
    cfg, grid = lab.config, lab.grid
    mid = _middle_mask(grid)
    fu = transforms.unitary(grid, transforms.cosine_matrix(grid))
    block = fu[:, mid]
    iso = np.abs(block.T @ block - np.eye(mid.sum())).max()
    gu = transforms.unitary(grid, transforms.g_matrix(grid))
    g2 = np.abs((gu @ gu)[np.ix_(mid, mid)] - np.eye(mid.sum())).max()
    rng = lab.rng()
    f = transforms.GridFunction(grid, rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N))
    ii = transforms.involution_I(transforms.involution_I(f))
    i_err = float(np.abs(ii.samples - f.samples).max() / np.abs(f.samples).max())
    g = transforms.GridFunction(grid, rng.standard_normal(grid.N))
    s = complex(0.5, 3.0)
    alpha, beta = 0.7 - 0.2j, -1.3
    lin = abs(transforms.mellin(f * alpha + g * beta, s) - alpha * transforms.mellin(f, s) - beta * transforms.mellin(g, s))
    scale = abs(transforms.mellin(f, s)) + abs(transforms.mellin(g, s))
    return [
        _le("cosine_isometry_middle", "cosine_isometry", iso, cfg.tol("isometry", 1e-4)),
        _le("G_squared_identity_middle", "cosine_isometry", g2, cfg.tol("g_squared", 1e-5)),
        _le("I_exact_involution", "inversion", i_err, cfg.tol("inversion", 1e-14)),
        _le("mellin_linearity", "mellin", lin / scale, cfg.tol("linearity", 1e-12)),
    ]


# ---------------------------------------------------------------------------
# kernels


def route_agreement(rng: np.random.Generator, count: int) -> float:
    worst = 0.0
    for _ in range(count):
        u = rng.uniform(0.1, 5.0)
        w = complex(rng.uniform(0.05, 0.95), rng.uniform(-10, 10))
        a = rng.uniform(0.3, 3.0)
        q = kernels.C_a_eval(u, w, a, "quadrature").value
        s = kernels.C_a_eval(u, w, a, "series").value
        worst = max(worst, abs(s - q) / max(abs(q), abs(s)))
    return worst


def decay_ratio(w: complex, a: float = 1.0) -> float:
    us = [2.0**j for j in range(7)]
    vals = [abs(u * kernels.C_a_eval(u, w, a).value) for u in us]
    return max(vals[i + 1] / vals[i] for i in range(len(vals) - 1))


def suite_kernels(lab: Lab) -> list[Check]:
    cfg = lab.config
    rng = lab.rng()
    agree = route_agreement(rng, 50)
    decay = max(decay_ratio(w) for w in (complex(-1, 2), 0.4, complex(0.9, -3)))
    # Cauchy rectangle around a box in the overlap strip
    u0, a0 = 1.3, 1.0
    corners = [complex(0.2, -1), complex(0.8, -1), complex(0.8, 1), complex(0.2, 1)]
    xg, wg = np.polynomial.legendre.leggauss(24)
    contour = 0j
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        zs = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * xg
        vals = np.array([kernels.C_a_eval(u0, z, a0, "quadrature").value for z in zs])
        contour += np.sum(vals * wg) * 0.5 * (z1 - z0)
    small = []
    for u in (0.1, 0.05, 0.01):
        w = 0.6 + 0.5j
        small.append(abs(kernels.C_a_eval(u, w, 1.0).value - specfun.gamma_plus(w).value * u ** (-w)))
    return [
        _le("route_agreement", "kernel_routes", agree, cfg.tol("routes", 1e-6)),
        _le("decay_doubling_ratio", "kernel_decay", decay, cfg.tol("decay_ratio", 1.2)),
        _le("entirety_contour", "kernel_entirety", abs(contour), cfg.tol("contour", 1e-8)),
        _le("small_u_bounded", "kernel_decay", max(small) / min(small), cfg.tol("small_u_growth", 2.0)),
    ]


# ---------------------------------------------------------------------------
# spaces


def suite_spaces(lab: Lab) -> list[Check]:
    cfg = lab.config
    H, K = lab.H, lab.K
    checks = [
        _le("H_frame_orthonormal", "sonine_spaces", H.gram_error(), cfg.tol("orthonormal", 1e-12)),
        _le("H_constraint_residual", "sonine_spaces", H.constraint_residual, cfg.tol("constraint", 1e-6)),
        _le("K_constraint_residual", "sonine_spaces", K.constraint_residual, cfg.tol("constraint", 1e-6)),
        _le("H_equals_I_of_K", "sonine_spaces", H.params["conjugation_angle"], cfg.tol("angle", 1e-3)),
    ]
    tz = spaces.trivial_zero_scan(K, 1)
    checks += [
        _le("trivial_zero_r0", "trivial_zeros", tz.residuals[0], cfg.tol("r0", 1e-4)),
        _le("trivial_zero_r1", "trivial_zeros", tz.residuals[1], cfg.tol("r1", 1e-3)),
        _ge("control_at_2_over_r0", "trivial_zeros", tz.controls[0] / max(tz.residuals[0], 1e-300), 10.0),
    ]
    for point in (0, -2):
        c1, _ = spaces.pole_cancellation(H, point, 0.25)
        c2, _ = spaces.pole_cancellation(H, point, 0.125)
        change = float(np.abs(c1 - c2).max() / np.abs(c1).max())
        checks.append(_le(f"pole_cancellation_stable_at_{-point}", "trivial_zeros", change, cfg.tol("radius_halving", 1e-3)))
    w = complex(0.3, 5.0)
    z = spaces.riesz_Z(H, w, 0)
    gram = H.unitary() @ H.unitary().T
    lsq = np.linalg.lstsq(gram, z.coefficients, rcond=None)[0]
    checks.append(_le("representer_uniqueness", "representers", np.abs(lsq - z.coefficients).max() / np.abs(z.coefficients).max(),
                      cfg.tol("representer", 1e-9)))
    specs = [(w_, k) for w_ in (0.3, complex(0.5, 2), complex(0.8, -1)) for k in (0, 1)]
    checks.append(_ge("independence_smallest_singular_value", "representer_independence",
                      spaces.independence_gram(H, specs), cfg.tol("independence", 1e-8)))
    return checks


# ---------------------------------------------------------------------------
# zeta


def suite_zeta(lab: Lab) -> list[Check]:
    cfg, grid = lab.config, lab.grid
    lam = cfg.lam
    p1 = zeta_lab.make_bump(lam, *_bump_params(lam, 0.0, 0.9), 1)
    p2 = zeta_lab.make_bump(lam, *_bump_params(lam, 0.1, 0.7), 3)
    e1, e2 = zeta_lab.E_map(p1, grid), zeta_lab.E_map(p2, grid)
    combo = zeta_lab.DerivedFunction(lambda u: 2.0 * p1.value(u) - 0.5 * p2.value(u), min(p1.lo, p2.lo), max(p1.hi, p2.hi),
                                     mellin_zeros=frozenset({1}))
    expect = 2.0 * e1.samples - 0.5 * e2.samples
    lin = np.abs(zeta_lab.E_map(combo, grid).samples - expect).max() / np.abs(expect).max()
    theta = math.exp(grid.delta)
    scaled = zeta_lab.E_map(zeta_lab.rescale_profile(p1, theta), grid).samples
    cov = np.abs(scaled[:-1] - e1.samples[1:]).max() / np.abs(e1.samples).max()
    rng = lab.rng()
    fact = 0.0
    for phi in (p1, p2):
        e = zeta_lab.E_map(phi, grid)
        for t in rng.uniform(-20, 20, 10):
            s = complex(0.5, t)
            rhs = specfun.riemann_zeta(s) * phi.mellin(s)
            fact = max(fact, abs(transforms.mellin(e, s) - rhs) / (1 + abs(rhs)))
    W, H = lab.W, lab.H
    within = spaces.containment_residual(W, H)
    report = zeta_lab.zero_scan(H, W, 10.0, 30.0, 0.05, cfg.tol("detection", zeta_lab.DETECTION_THRESHOLD))
    ok, zeros = zeta_lab.detection_matches(report, 10.0, 30.0, 5e-2)
    det = [t for t, _ in report.detections()]
    return [
        _le("E_linearity", "e_map", lin, cfg.tol("e_linearity", 1e-12)),
        _le("E_dilation_covariance", "e_map", cov, cfg.tol("e_dilation", 1e-10)),
        _le("E_mellin_factorization", "e_map", fact, cfg.tol("factorization", 1e-4)),
        _le("W_inside_H", "zeta_subspace", within, cfg.tol("w_in_h", 1e-3)),
        Check("zero_detection", "zero_detection", float(len(det)), float(len(zeros)), ok, "==",
              f"detected={[round(t, 6) for t in det]} oracle={[round(z, 6) for z in zeros]}"),
    ]


def _bump_params(lam: float, shift: float, width: float) -> tuple[float, float]:
    lo, hi = 1.0 / lam + 2e-3, lam - 2e-3
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    w = width * half
    c = mid + shift * half
    return c, min(w, c - lo, hi - c)


SUITES: dict[str, Callable[[Lab], list[Check]]] = {
    "specfun": suite_specfun,
    "transforms": suite_transforms,
    "kernels": suite_kernels,
    "spaces": suite_spaces,
    "zeta": suite_zeta,
}


def run_suite(name: str, lab: Lab) -> list[Check]:
    try:
        return SUITES[name](lab)
    except Exception as exc:  # a library error is a failed check, not a crash
        return [Check(f"{name}_suite_error", name, float("nan"), 0.0, False, "==", f"{type(exc).__name__}: {exc}")]
