import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import completed_factor as cf_oracle
from oracles import gamma_plus as gp_oracle
from oracles import loggamma_stirling, zeta as zeta_oracle, zeta_zeros
from sonine_lab.errors import InvalidParameterError, PoleError
from sonine_lab.specfun import (
    ComplexPoint,
    PoleAwareValue,
    as_complex,
    completed_factor,
    critical_zeros,
    gamma_plus,
    hardy_z,
    log_gamma,
    riemann_zeta,
)

# first three ordinates, frozen from mpmath.zetazero
RHO = [14.134725141734695, 21.022039638771556, 25.01085758014569]


def five_point(f, x, h=1e-3):
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


# ---------------------------------------------------------------------------
# ComplexPoint / PoleAwareValue


def test_complex_point_round_trip():
    p = ComplexPoint(0.5, 14.0)
    assert p.z == complex(0.5, 14.0)
    assert ComplexPoint.of(2 - 1j) == ComplexPoint(2.0, -1.0)
    assert as_complex(p) == p.z


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), complex(0, float("nan"))])
def test_non_finite_points_rejected(bad):
    with pytest.raises(InvalidParameterError):
        as_complex(bad)


def test_regular_value_cannot_carry_residue():
    with pytest.raises(InvalidParameterError):
        PoleAwareValue(1.0, 0, 2.0)


# ---------------------------------------------------------------------------
# log_gamma


def test_log_gamma_half():
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-12)
    assert log_gamma(0.5).real == pytest.approx(0.5723649429, abs=1e-10)


def test_log_gamma_five():
    assert log_gamma(5) == pytest.approx(math.log(24), rel=1e-14)


def test_log_gamma_matches_stirling_oracle():
    # compared after exponentiation so that the branch choice does not matter
    ours = cmath.exp(log_gamma(1 + 1j))
    ref = cmath.exp(loggamma_stirling(1 + 1j))
    assert abs(ours - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("n", [0, -1, -2, -7])
def test_log_gamma_poles(n):
    with pytest.raises(PoleError):
        log_gamma(n)
    with pytest.raises(PoleError):
        log_gamma(n + 1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(-40, 40), st.floats(-30, 30))
def test_log_gamma_relative_accuracy(re, im):
    s = complex(re, im)
    if abs(s) > 50 or min(abs(s - n) for n in range(-45, 1)) < 0.05:
        return
    ours = cmath.exp(log_gamma(s))
    ref = cmath.exp(loggamma_stirling(s))
    assert abs(ours - ref) <= 1e-12 * abs(ref)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 30), st.floats(-20, 20))
def test_log_gamma_recurrence(re, im):
    s = complex(re, im)
    assert abs(cmath.exp(log_gamma(s + 1) - log_gamma(s)) - s) <= 1e-12 * abs(s)


# ---------------------------------------------------------------------------
# gamma_plus


def test_gamma_plus_zero_at_one():
    v = gamma_plus(1)
    assert v.value == 0 and not v.is_pole


def test_gamma_plus_residue_at_zero():
    v = gamma_plus(0)
    assert v.pole_order == 1
    assert v.residue == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_gamma_plus_residues(k):
    v = gamma_plus(-2 * k)
    expected = 2 * (2 * math.pi) ** (2 * k) * (-1) ** k / math.factorial(2 * k)
    assert v.pole_order == 1
    assert v.residue == pytest.approx(expected, rel=1e-8)


def test_gamma_plus_finite_part_at_pole():
    # finite part at 0 from the Laurent series of the mpmath function
    import mpmath as mp

    f = lambda z: 2 * (2 * mp.pi) ** (-z) * mp.cos(mp.pi * z / 2) * mp.gamma(z) - 2 / z
    ref = complex(mp.limit(f, 0))
    assert gamma_plus(0).value == pytest.approx(ref, abs=1e-8)


def test_gamma_plus_half_is_one():
    assert gamma_plus(0.5).value == pytest.approx(1.0, abs=1e-14)


def test_gamma_plus_derivative_at_half():
    # 5-point central stencil at step 1e-3 on the independent mpmath function
    ref = five_point(gp_oracle, 0.5)
    from sonine_lab.kernels import dw_derivative

    ours = dw_derivative(lambda z: gamma_plus(z).value, 0.5, 1, poles=[0j])
    assert abs(ours - ref) <= 1e-6 * abs(ref)


def test_gamma_plus_inventory():
    for n in range(-10, 11):
        v = gamma_plus(n)
        if n <= 0 and n % 2 == 0:
            assert v.is_pole
        elif n > 0 and n % 2 == 1:
            assert v.value == 0 and not v.is_pole
        else:
            assert not v.is_pole and abs(v.value) > 1e-3


def _clear_of_integers(s, gap=0.1):
    return all(abs(z - round(z.real)) >= gap for z in (s, 1 - s))


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-20, 20))
def test_gamma_plus_reflection(re, im):
    s = complex(re, im)
    if not _clear_of_integers(s):
        return
    assert abs(gamma_plus(s).value * gamma_plus(1 - s).value - 1) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-8, 8), st.floats(-15, 15))
def test_gamma_plus_matches_mpmath(re, im):
    s = complex(re, im)
    if not _clear_of_integers(s, 0.05):
        return
    ref = gp_oracle(s)
    assert abs(gamma_plus(s).value - ref) <= 1e-11 * abs(ref)


# ---------------------------------------------------------------------------
# riemann_zeta


def test_zeta_at_zero_and_two():
    assert riemann_zeta(0) == pytest.approx(-0.5, abs=1e-13)
    assert riemann_zeta(2) == pytest.approx(math.pi**2 / 6, rel=1e-13)


def test_zeta_first_zero():
    assert abs(riemann_zeta(complex(0.5, 14.134725142))) <= 1e-6


def test_zeta_pole():
    with pytest.raises(PoleError):
        riemann_zeta(1)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(-50, 50))
def test_zeta_matches_mpmath(re, im):
    s = complex(re, im)
    if abs(s - 1) < 0.1:
        return
    ref = zeta_oracle(s)
    assert abs(riemann_zeta(s) - ref) <= 1e-10 * max(abs(ref), 1e-2)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1 - 1e-3), st.floats(-30, 30))
def test_zeta_functional_equation(re, im):
    s = complex(re, im)
    lhs = riemann_zeta(1 - s)
    assert abs(lhs - gamma_plus(s).value * riemann_zeta(s)) <= 1e-8 * (1 + abs(lhs))


# ---------------------------------------------------------------------------
# completed factor and zeros


def test_completed_factor_values():
    assert completed_factor(1) == pytest.approx(1.0, abs=1e-14)
    assert completed_factor(2) == pytest.approx(0.3183098862, abs=1e-10)


def test_completed_factor_derivative_at_half():
    ref = five_point(lambda z: cf_oracle(z), 0.5)
    assert abs(completed_factor(0.5, 1) - ref) <= 1e-6 * abs(ref)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_completed_factor_derivatives_vs_mpmath(k):
    s = complex(1.3, 2.0)
    ref = cf_oracle(s, k)
    assert abs(completed_factor(s, k) - ref) <= 1e-8 * abs(ref)


@pytest.mark.parametrize("s", [0, -2, -4 + 1e-10])
def test_completed_factor_poles(s):
    with pytest.raises(PoleError):
        completed_factor(s)


def test_hardy_z_is_real_and_changes_sign_at_zero():
    z = hardy_z(np.array([RHO[0] - 0.01, RHO[0] + 0.01]))
    assert z[0] * z[1] < 0


def test_critical_zeros_match_mpmath():
    ours = critical_zeros(10, 30)
    ref = zeta_zeros(3)
    assert np.allclose(ours, ref, atol=1e-9)
    assert np.allclose(ours, RHO, atol=1e-9)
    assert critical_zeros(0, 10) == []
