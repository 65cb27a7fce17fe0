"""One pass/fail test per acceptance criterion, all on the default profile."""

import math

import numpy as np
import pytest

from sonine_lab import kernels
from sonine_lab.spaces import (
    constraint_residual,
    independence_gram,
    invert_frame,
    max_principal_angle,
    trivial_zero_scan,
)
from sonine_lab.specfun import critical_zeros, gamma_plus, riemann_zeta
from sonine_lab.transforms import mellin, operator_G
from sonine_lab.zeta_lab import (
    DETECTION_THRESHOLD,
    E_map,
    apply_D,
    detection_matches,
    invert_profile,
    make_bump,
    obstruction_beta,
    zero_scan,
)

SEED = 20240611


def _away_from_integers(s, gap=0.1):
    return abs(s - round(s.real)) >= gap


def _seeded_points(count, re_lo, re_hi, im_max, rng):
    out = []
    while len(out) < count:
        s = complex(rng.uniform(re_lo, re_hi), rng.uniform(-im_max, im_max))
        if _away_from_integers(s):
            out.append(s)
    return out


def test_01_multiplier_reflection():
    rng = np.random.default_rng(SEED)
    worst = max(abs(gamma_plus(s).value * gamma_plus(1 - s).value - 1)
                for s in _seeded_points(100, -10, 10, 20, rng))
    assert worst <= 1e-10


def test_02_zeta_functional_equation():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(50):
        s = complex(rng.uniform(1e-3, 1 - 1e-3), rng.uniform(-30, 30))
        lhs = riemann_zeta(1 - s)
        worst = max(worst, abs(lhs - gamma_plus(s).value * riemann_zeta(s)) / abs(lhs))
    assert worst <= 1e-8


def test_03_kernel_route_agreement():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(50):
        u = rng.uniform(0.1, 5.0)
        w = complex(rng.uniform(0.05, 0.95), rng.uniform(-10, 10))
        a = rng.uniform(0.3, 3.0)
        series = kernels.C_a_eval(u, w, a, "series").value
        quad = kernels.C_a_eval(u, w, a, "quadrature").value
        worst = max(worst, abs(series - quad) / abs(quad))
    assert worst <= 1e-6


@pytest.mark.parametrize("w", [complex(-1, 2), 0.4, complex(0.9, -3)])
def test_04_kernel_decay(w):
    us = [2.0**j for j in range(7)]
    vals = [abs(u * kernels.C_a_eval(u, w, 1.0).value) for u in us]
    ratios = [vals[i + 1] / vals[i] for i in range(len(vals) - 1)]
    assert max(ratios) <= 1.2


def test_05_sonine_space_existence(K55, H2):
    assert K55.dimension >= 1
    assert K55.constraint_residual <= 1e-6
    assert constraint_residual(K55) <= 1e-6
    assert max_principal_angle(H2, invert_frame(K55)) <= 1e-3


def test_06_trivial_zeros(K55):
    rep = trivial_zero_scan(K55, 1)
    r0, r1 = rep.residuals
    assert rep.points == [1.0, 3.0] and rep.control_points[0] == 2.0
    assert r0 <= 1e-4
    assert r1 <= 1e-3
    assert rep.controls[0] >= 10 * r0


def test_07_continuation_identity(K55):
    for i in range(3):
        f = K55.vector(i)
        for s in (-1.0, complex(0.5, -3.0)):
            assert kernels.continuation_identity_residual(f, s, 0.5, 0.5) <= 1e-4 * f.norm()


def test_08_representer_independence(H2):
    specs = [(complex(0.5, 14.0), 0), (complex(0.5, 14.0), 1), (2.0, 0),
             (complex(0.3, 5.0), 0), (-1.0, 0), (3.0, 2)]
    assert len(set(specs)) == 6
    assert independence_gram(H2, specs) >= 1e-8


def test_09_E_map_factorization(grid):
    # E(phi) = -(int phi)/u beyond the support of phi, so the part of the
    # Mellin integral past the right edge of the window is known exactly.
    # The points are evenly spaced: a relative bound loses meaning at a point
    # that happens to sit within ~1e-2 of a zeta zero.
    edge = math.exp(grid.L + grid.delta / 2)
    bumps = [make_bump(2.0, 1.0, 0.4, 0), make_bump(2.0, 1.1, 0.5, 1), make_bump(2.0, 1.3, 0.6, 2)]
    ts = np.arange(-18.0, 19.0, 4.0)
    worst = 0.0
    for phi in bumps:
        e = E_map(phi, grid)
        integral = phi.integral()
        for t in ts:
            s = complex(0.5, t)
            tail = -integral * edge ** (s - 1) / (1 - s)
            ref = riemann_zeta(s) * phi.mellin(s)
            worst = max(worst, abs(mellin(e, s) + tail - ref) / abs(ref))
    assert worst <= 1e-4


def test_10_G_equivariance(grid):
    d = apply_D(make_bump(2.0, 1.1, 0.5, 0))
    e = E_map(d, grid).samples
    lhs = operator_G(E_map(d, grid)).samples
    rhs = E_map(invert_profile(d), grid).samples
    sw = grid.sqrt_w
    assert np.linalg.norm((lhs - rhs) * sw) <= 1e-4 * np.linalg.norm(e * sw)


def test_11_zero_detection(H2, W2):
    report = zero_scan(H2, W2, 10.0, 30.0, 0.05)
    found = sorted(t for t, _ in report.detections())
    oracle = critical_zeros(10.0, 30.0)
    assert len(oracle) == 3
    assert len(found) == 3
    assert all(abs(f - z) <= 5e-2 for f, z in zip(found, oracle))
    assert detection_matches(report, 10.0, 30.0)[0]
    assert obstruction_beta(H2, W2, complex(0.5, oracle[0]), k=1) > DETECTION_THRESHOLD


def test_12_decomposition(H2, W2, HP2):
    assert W2.dimension + HP2.dimension == H2.dimension
    assert np.abs(HP2.unitary() @ W2.unitary().T).max() <= 1e-10
    assert H2.constraint_residual <= 1e-6
    assert constraint_residual(H2) <= 1e-6


@pytest.mark.xfail(strict=True, reason="at L = 6, N = 1024 W leaves H and the second zero is missed")
def test_11_zero_detection_on_small_grid():
    from sonine_lab.spaces import build_H_Lambda
    from sonine_lab.transforms import make_log_grid
    from sonine_lab.zeta_lab import build_W_Lambda

    grid = make_log_grid(6.0, 1024)
    h = build_H_Lambda(2.0, grid, check_conjugation=False)
    w = build_W_Lambda(2.0, 8, grid)
    assert detection_matches(zero_scan(h, w, 10.0, 30.0, 0.05), 10.0, 30.0)[0]
