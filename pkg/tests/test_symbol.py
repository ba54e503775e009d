import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhspec.errors import ConvergenceError, DomainError, OnCurveError, SingularPointError
from fhspec.symbol import (
    SymbolParams, asymptotic_eigenvalue, asymptotic_left_eigenvector, asymptotic_momentum,
    asymptotic_right_eigenvector, eval_symbol, fourier_coefficient, invert_symbol,
    symbol_derivative, winding_number,
)

W = SymbolParams(1 / 3, -0.5)

# Fourier coefficients of the working symbol from 30-digit adaptive
# quadrature of (1/2pi) int a(e^{-ip}) e^{irp} dp (frozen).
QUADRATURE_T = {
    0: 0.85020265622326344,
    1: 0.077291150565751222,
    -1: -0.85020265622326344,
    2: 0.031825767880015209,
    -2: -0.077291150565751222,
    5: 0.0084182530160245841,
    -5: -0.011785554222434418,
    64: 0.00013850498177736554,
    -64: -0.00014215946678468389,
}
TAIL_CONSTANT = 0.1436763757  # Gamma(5/3) |sin(pi (alpha +/- beta))| / pi


def test_params_validation():
    with pytest.raises(DomainError):
        SymbolParams(-0.5, 0.0)
    with pytest.raises(DomainError):
        SymbolParams(float("nan"), 0.0)
    assert SymbolParams(1 / 3, -0.5).determinant_admissible
    assert not SymbolParams(0.0, 1.0).determinant_admissible  # alpha - beta = -1


def test_trivial_symbol():
    P = SymbolParams(0, 0)
    assert eval_symbol(P, 1.0) == pytest.approx(1.0)
    assert symbol_derivative(P, 0.3) == 0


def test_working_symbol_at_pi():
    val = eval_symbol(W, math.pi)
    assert val.real == pytest.approx(4 ** (1 / 3), rel=1e-14)
    assert abs(val.imag) < 1e-14


def test_shift_symbol_and_derivative():
    P = SymbolParams(0, 1)
    assert eval_symbol(P, 0.0) == pytest.approx(-1.0)
    assert symbol_derivative(P, 0.0) == pytest.approx(1j)


def test_pole_for_negative_alpha():
    with pytest.raises(SingularPointError):
        eval_symbol(SymbolParams(-0.25, 0.0), 0.0)


def test_derivative_singular_at_zero():
    with pytest.raises(SingularPointError):
        symbol_derivative(W, 0.0)


@pytest.mark.parametrize("p", [0.5, 1.0, math.pi, 2.0 + 0.1j, 5.5 - 0.05j])
def test_derivative_matches_central_difference(p):
    h = 1e-6
    fd = (eval_symbol(W, p + h) - eval_symbol(W, p - h)) / (2 * h)
    assert abs(symbol_derivative(W, p) - fd) <= 1e-6 * abs(fd)


@given(st.floats(0.01, 2 * math.pi - 0.01), st.floats(-0.2, 0.2))
def test_conjugate_symmetry(re, im):
    p = complex(re, im)
    q = 2 * math.pi - p.conjugate()
    assert eval_symbol(W, q) == pytest.approx(np.conj(eval_symbol(W, p)), abs=1e-12)


@pytest.mark.parametrize("r,expected", sorted(QUADRATURE_T.items()))
def test_fourier_coefficient_matches_quadrature(r, expected):
    assert fourier_coefficient(W, r) == pytest.approx(expected, abs=1e-12)


def test_fourier_trivial_cases():
    assert fourier_coefficient(SymbolParams(0, 0), 0) == 1.0
    assert all(fourier_coefficient(SymbolParams(0, 0), r) == 0.0 for r in (-3, -1, 1, 4))
    shift = SymbolParams(0, 1)
    assert fourier_coefficient(shift, 1) == pytest.approx(-1.0)
    assert all(fourier_coefficient(shift, r) == 0.0 for r in (-2, -1, 0, 2, 3))


def test_fourier_tail_law():
    for r in (1000, -1000, 4000, -4000):
        scaled = abs(fourier_coefficient(W, r)) * abs(r) ** (5 / 3)
        assert scaled == pytest.approx(TAIL_CONSTANT, rel=0.02)


def test_superdiagonal_negative_subdiagonal_positive():
    assert all(fourier_coefficient(W, -r) < 0 for r in range(1, 30))
    assert all(fourier_coefficient(W, r) > 0 for r in range(1, 30))


def test_winding_numbers():
    assert winding_number(W, 0.5) == -1
    assert winding_number(SymbolParams(1 / 3, 0.5), 0.5) == 1
    assert winding_number(SymbolParams(0, 0), 5.0) == 0


@pytest.mark.parametrize("grid", [512, 1024, 4096])
def test_winding_stable_under_refinement(grid):
    for z in (0.5, 1.0 + 0.2j, 1.2 - 0.3j):
        assert winding_number(W, z, grid=grid) == -1


def test_winding_rejects_points_on_curve():
    with pytest.raises(OnCurveError):
        winding_number(W, eval_symbol(W, 1.0), tol=1e-3)
    with pytest.raises(DomainError):
        winding_number(W, 0.5, grid=64)


def test_invert_shift_symbol():
    P = SymbolParams(0, 1)
    m = invert_symbol(P, -np.exp(-1j), 1.1)
    assert m.p == pytest.approx(1.0, abs=1e-8)


def test_round_trip_grid():
    rng = np.random.default_rng(3)
    ps = rng.uniform(0.15, 2 * math.pi - 0.15, 100) + 1j * rng.uniform(-0.2, 0.2, 100)
    for p in ps:
        m = invert_symbol(W, eval_symbol(W, p), p + 0.02 - 0.01j)
        assert abs(m.p.real - p.real) < 1e-8 and abs(m.p.imag - p.imag) < 1e-8


def test_inversion_failure_is_reported():
    with pytest.raises(ConvergenceError) as info:
        invert_symbol(W, 0.0, 0.3, max_iter=20, restarts=2)
    assert info.value.residual is not None


def test_asymptotic_momentum():
    m = asymptotic_momentum(160, 80, W)
    assert m.p.real == pytest.approx(math.pi)
    assert m.p.imag == pytest.approx((5 / 3) * math.log(160) / 160)
    assert asymptotic_momentum(160, 0, W).p.real == 0
    assert asymptotic_momentum(64, 5, SymbolParams(-0.5 + 1e-15, 0)).p.imag == pytest.approx(0, abs=1e-12)


def test_asymptotic_eigenvalue():
    assert asymptotic_eigenvalue(W, 160, 80) == pytest.approx(4 ** (1 / 3))
    assert asymptotic_eigenvalue(SymbolParams(0, 0), 160, 17) == pytest.approx(1)
    assert asymptotic_eigenvalue(W, 160, 40) == pytest.approx(np.conj(asymptotic_eigenvalue(W, 160, 120)))


def test_asymptotic_eigenvalue_close_to_symbol_at_momentum():
    n = 160
    for ell in range(20, 141, 20):
        p = asymptotic_momentum(n, ell, W).p
        assert abs(asymptotic_eigenvalue(W, n, ell) - eval_symbol(W, p)) < 3 * math.log(n) / n * 1.6


def test_asymptotic_right_vector():
    n, ell = 160, 37
    v = asymptotic_right_eigenvector(W, n, ell)
    assert abs(v[0]) == pytest.approx(math.sqrt(2 * (5 / 3) * math.log(n) / n))
    assert np.all(np.diff(np.abs(v)) < 0)
    assert abs(v[-1] / v[0]) == pytest.approx(n ** (-(5 / 3) * (n - 1) / n))
    assert abs(v[1] / v[0]) == pytest.approx(math.exp(-(5 / 3) * math.log(n) / n))
    for m in (64, 160, 512):
        assert np.linalg.norm(asymptotic_right_eigenvector(W, m, m // 3)) == pytest.approx(1, rel=0.1)


def test_asymptotic_left_vector_dual():
    for n in (64, 160, 512):
        ell = n // 4
        L = asymptotic_left_eigenvector(W, n, ell)
        R = asymptotic_right_eigenvector(W, n, ell)
        assert abs(np.sum(L * R)) == pytest.approx(1, rel=0.1)
        assert abs(L[1] / L[0]) == pytest.approx(math.exp((5 / 3) * math.log(n) / n))
