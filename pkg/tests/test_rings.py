import random
from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from pdet.errors import InvalidInputError
from pdet.rings import (DensePoly, PrimeFieldElem, format_rational, is_prime, poly_bareiss_det,
                        rational, reduce_mod)

fractions = st.fractions(max_denominator=10 ** 6).filter(lambda f: abs(f) < 10 ** 9)
small_primes = st.sampled_from([2, 3, 5, 7, 11, 13, 101, 10007])


def test_rational_lowest_terms():
    x = rational("6/-4")
    assert (int(x.numerator), int(x.denominator)) == (-3, 2)
    assert format_rational(rational(0)) == "0/1"
    assert rational(Fraction(10, 4)) == mpq(5, 2)
    with pytest.raises(InvalidInputError):
        rational(0.5)
    with pytest.raises(InvalidInputError):
        rational("1/0")


@given(fractions, fractions, fractions)
def test_rational_ring_axioms(a, b, c):
    x, y, z = rational(a), rational(b), rational(c)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x + y == rational(a + b) and x * y == rational(a * b)
    if x:
        assert x * (1 / x) == 1


@given(fractions)
def test_rational_canonical_representation(a):
    x = rational(a)
    y = rational(format_rational(x))
    assert format_rational(x) == format_rational(y) == f"{a.numerator}/{a.denominator}"


@given(small_primes, st.integers(), st.integers(), st.integers())
def test_prime_field_axioms(p, a, b, c):
    x, y, z = (PrimeFieldElem(v, p) for v in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert int(x - y) == (a - b) % p
    if x:
        assert x * x.inverse() == PrimeFieldElem(1, p)
        assert x / x == PrimeFieldElem(1, p)


def test_prime_field_mixed_moduli_rejected():
    with pytest.raises(InvalidInputError):
        PrimeFieldElem(1, 5) + PrimeFieldElem(1, 7)
    with pytest.raises(InvalidInputError):
        poly_bareiss_det([[DensePoly([1], 5), DensePoly([1], 5)],
                          [DensePoly([1], 7), DensePoly([0, 1], 5)]])


def test_reduce_mod_and_primality():
    assert reduce_mod(mpq(1, 4), 5) == 4
    assert reduce_mod(mpq(1, 24), 5) == 4
    with pytest.raises(ZeroDivisionError):
        reduce_mod(mpq(1, 10), 5)
    assert [q for q in range(30) if is_prime(q)] == list(sympy.primerange(0, 30))


def test_dense_poly_arithmetic():
    p = 7
    f = DensePoly([1, 2, 3], p)
    g = DensePoly([6, 1], p)
    q, r = f.divmod(g)
    assert q * g + r == f and r.degree < g.degree
    assert str(DensePoly([0, 0, 4, 4], 5)) == "4*t^2 + 4*t^3 (mod 5)"
    assert str(DensePoly([0, 1, 1], 5)) == "t + t^2 (mod 5)"
    assert DensePoly([0, 0], 5).is_zero()
    assert (f * g).gcd(g * DensePoly([1, 1], p)) == g.monic()
    assert f(PrimeFieldElem(2, p)) == PrimeFieldElem(1 + 4 + 12, p)


def test_bareiss_examples():
    t = DensePoly([0, 1], 5)
    one = DensePoly([1], 5)
    assert poly_bareiss_det([[t]]) == t
    assert poly_bareiss_det([[t, one], [one, t]]) == DensePoly([4, 0, 1], 5)
    row = [t, one, t * t]
    assert poly_bareiss_det([row, [one, t, one], row]).is_zero()


def _cofactor(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    acc = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in M[1:]]
        term = M[0][j] * _cofactor(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


@pytest.mark.parametrize("seed", range(20))
def test_bareiss_matches_cofactor_expansion(seed):
    rng = random.Random(seed)
    p = 7
    M = [[DensePoly([rng.randrange(p) for _ in range(3)], p) for _ in range(4)] for _ in range(4)]
    assert poly_bareiss_det(M) == _cofactor(M)


def test_bareiss_matches_sympy_over_gf():
    rng = random.Random(1)
    p = 13
    t = sympy.Symbol("t")
    for _ in range(5):
        rows = [[[rng.randrange(p) for _ in range(3)] for _ in range(5)] for _ in range(5)]
        M = [[DensePoly(c, p) for c in r] for r in rows]
        S = sympy.Matrix([[sum(c * t ** k for k, c in enumerate(e)) for e in r] for r in rows])
        want = sympy.Poly(S.det(method="berkowitz"), t, modulus=p)
        got = poly_bareiss_det(M)
        assert [c % p for c in reversed(want.all_coeffs())] == got.residues() or \
            (want.is_zero and got.is_zero())
