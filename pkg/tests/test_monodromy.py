import cmath
import math

import numpy as np
import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from pdet.diffop import unperturbed
from pdet.errors import (AccuracyFailureError, BadContourError, InvalidInputError,
                         SolverFailureError)
from pdet.monodromy import (_Dual, _newton, expected_eigenvalues, heun_equation, lambda_at,
                            lambda_elliptic, lambda_heun, monodromy_numeric, operator_polys)
from pdet.series import LaurentSeries, TruncSeries

LAMBDA = [mpq(1, 2), mpq(1, 24), mpq(25, 144), mpq(-11, 17280), mpq(70591, 518400),
          mpq(-774601, 24192000), mpq(2215989011, 15240960000)]
H = [mpq(1, 4), mpq(1, 24), mpq(101, 576), mpq(239, 17280), mpq(19153, 115200),
     mpq(-1516283, 72576000), mpq(23167560743, 121927680000)]


@pytest.fixture(scope="module")
def lam9():
    return lambda_heun(9)


def test_lambda_heun_coefficients(lam9):
    assert lam9.valuation == 1
    assert lam9.coefficient(0) == 0
    assert [lam9.coefficient(k) for k in range(1, 8)] == LAMBDA


def test_lambda_squared_is_h(lam9):
    h = (lam9 * lam9).to_trunc(9)
    assert list(h.coeffs) == [0, 0] + H


def test_depth_stability():
    assert lambda_heun(6, depth=8) == lambda_heun(6, depth=12)


def test_equation_residual(lam9):
    # lam solves the truncated equation: the residual is O(t^K) at any larger depth
    W = 9
    t = LaurentSeries([1], 1, W)
    one_plus = LaurentSeries([1, 1], 0, W)
    u = t / (one_plus * one_plus)
    lam = lam9.with_precision(W)
    r = heun_equation(_Dual(lam, LaurentSeries([1], 0, W)), u, 14).a
    assert all(r.coefficient(k) == 0 for k in range(-2, W - 2))


def test_solver_errors():
    with pytest.raises(InvalidInputError):
        lambda_heun(1)
    with pytest.raises(SolverFailureError):
        _newton(6, 8, 10, max_iter=1)


def test_lambda_elliptic_values():
    assert list(lambda_elliptic(6).coeffs) == [1, mpq(1, 4), mpq(9, 64), mpq(25, 256),
                                               mpq(1225, 16384), mpq(3969, 65536)]
    s = lambda_elliptic(5) - 1
    assert list((s * s).coeffs) == [0, 0, mpq(1, 16), mpq(9, 128), mpq(281, 4096)]
    assert lambda_elliptic(1) == TruncSeries([1])


@given(st.integers(0, 30))
def test_lambda_elliptic_factorial_formula(k):
    want = mpq(math.factorial(2 * k) ** 2, 2 ** (4 * k) * math.factorial(k) ** 4)
    assert lambda_elliptic(k + 1)[k] == want


# -- numeric monodromy --------------------------------------------------------------

def test_operator_polys_match_symbolic(intro):
    x, t = sympy.symbols("x t")
    tv = sympy.Rational(1, 10)
    C = operator_polys(intro, 0.1)
    lead = sympy.Poly(sympy.expand((x ** 2 - (x ** 3 + tv * x) / (1 + tv))), x)
    first = sympy.Poly(sympy.expand(2 * x - (3 * x ** 2 + tv) / (1 + tv)), x)
    zeroth = sympy.Poly(-x / (1 + tv), x)
    for row, poly in zip((C[2], C[1], C[0]), (lead, first, zeroth)):
        want = [float(c) for c in reversed(poly.all_coeffs())]
        assert np.allclose(row[: len(want)], want) and np.allclose(row[len(want):], 0)


def test_unipotent_at_t_zero(intro):
    res = monodromy_numeric(intro, 0.0, 0.5, 1e-10)
    assert all(abs(z - 1) < 1e-8 for z in res.eigenvalues)


def test_eigenvalues_match_lambda(intro, lam9):
    res = monodromy_numeric(intro, 0.01, 0.5, 1e-10)
    lam = lambda_at(lam9, 0.01)
    assert abs(lam - 0.00500434) < 1e-8
    want = sorted(expected_eigenvalues(lam), key=lambda z: z.imag)
    got = sorted(res.eigenvalues, key=lambda z: z.imag)
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-6
    # the half-angle reading is ruled out by the same check
    half = cmath.exp(1j * math.pi * lam)
    assert min(abs(z - half) for z in res.eigenvalues) > 1e-3
    assert abs(got[0] * got[1] - 1) < 10 * 1e-10 + res.error_estimate
    assert abs(np.linalg.det(res.matrix) - 1) < 1e-8


def test_constant_solutions():
    res = monodromy_numeric(unperturbed([0]), 0.0, 0.5, 1e-12)
    assert len(res.eigenvalues) == 1 and abs(res.eigenvalues[0] - 1) < 1e-12


def test_noninteger_exponent_operator():
    # x^2 g'' + x g' + a^2 ... replaced by an Euler operator with complex roots:
    # (x d)^2 - x d + c has solutions x^r with r^2 - 2r + c = 0, monodromy e^{2 pi i r}
    from pdet.diffop import DiffOperator, RatFunc
    D = DiffOperator(2, (0, 0), 0, {(0, 0): RatFunc([0, 1])})
    res = monodromy_numeric(D, 0.3, 0.7, 1e-10)
    r = np.roots([1, 0, 0.3])
    want = sorted((cmath.exp(2j * math.pi * z) for z in r), key=lambda z: (z.real, z.imag))
    got = sorted(res.eigenvalues, key=lambda z: (z.real, z.imag))
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-8


def test_bad_contour_and_accuracy(intro):
    with pytest.raises(BadContourError):
        monodromy_numeric(intro, 0.01, 1.0, 1e-8)
    with pytest.raises(BadContourError):
        monodromy_numeric(intro, 0.25, 0.25, 1e-8)
    with pytest.raises(BadContourError):
        monodromy_numeric(intro, 0.0, -1.0, 1e-8)
    with pytest.raises(AccuracyFailureError):
        monodromy_numeric(intro, 0.01, 0.5, 1e-15, start_steps=64, max_steps=256)
