"""Exact scalars: rationals, prime-field elements, dense univariate polynomials."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq, mpz

from . import _kernels
from .errors import InvalidInputError

#: Arbitrary-precision rational, always in lowest terms with positive denominator.
Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)


def rational(x) -> mpq:
    """Coerce ints, Fractions, mpq and ``"a/b"`` strings to an mpq."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            a, b = s.split("/")
            if int(b) == 0:
                raise InvalidInputError(f"zero denominator in {x!r}")
            return mpq(int(a), int(b))
        return mpq(int(s))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise InvalidInputError("floating-point values are not exact rationals")
    return mpq(x)


def format_rational(x) -> str:
    x = rational(x)
    return f"{int(x.numerator)}/{int(x.denominator)}"


def to_fraction(x) -> Fraction:
    x = rational(x)
    return Fraction(int(x.numerator), int(x.denominator))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return bool(mpz(p).is_prime(50))


def reduce_mod(x, p: int) -> int:
    """Image of a p-integral rational in F_p; raises if p divides the denominator."""
    x = rational(x)
    den = int(x.denominator) % p
    if den == 0:
        raise ZeroDivisionError(f"{x} is not {p}-integral")
    return (int(x.numerator) * pow(den, -1, p)) % p


class PrimeFieldElem:
    """Residue class modulo a prime; the modulus travels with the value."""

    __slots__ = ("residue", "modulus")

    def __init__(self, value, modulus: int):
        if modulus < 2:
            raise InvalidInputError(f"modulus must be prime, got {modulus}")
        object.__setattr__(self, "modulus", int(modulus))
        if isinstance(value, PrimeFieldElem):
            value = value.residue
        if not isinstance(value, int):
            value = reduce_mod(value, modulus)
        object.__setattr__(self, "residue", value % modulus)

    def __setattr__(self, *_):
        raise AttributeError("PrimeFieldElem is immutable")

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElem):
            if other.modulus != self.modulus:
                raise InvalidInputError(
                    f"cannot combine residues mod {self.modulus} and mod {other.modulus}")
            return other.residue
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElem(self.residue + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElem(self.residue - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElem(o - self.residue, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElem(self.residue * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElem(-self.residue, self.modulus)

    def inverse(self) -> "PrimeFieldElem":
        if self.residue == 0:
            raise ZeroDivisionError("zero has no inverse")
        return PrimeFieldElem(pow(self.residue, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = PrimeFieldElem(other, self.modulus)
        self._coerce(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PrimeFieldElem(pow(self.residue, e, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElem):
            return self.modulus == other.modulus and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"PrimeFieldElem({self.residue}, {self.modulus})"


class DensePoly:
    """Univariate polynomial in ``t``; coefficients lowest degree first.

    With ``modulus=p`` the coefficients live in F_p (as PrimeFieldElem);
    otherwise they are rationals. Trailing zeros are stripped, so the zero
    polynomial has no coefficients.
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: Iterable = (), modulus: int | None = None):
        if modulus is None:
            cs = [c if isinstance(c, PrimeFieldElem) else rational(c) for c in coeffs]
            mods = {c.modulus for c in cs if isinstance(c, PrimeFieldElem)}
            if len(mods) > 1:
                raise InvalidInputError(f"mixed moduli {sorted(mods)}")
            if mods:
                modulus = mods.pop()
                cs = [PrimeFieldElem(c, modulus) for c in cs]
        else:
            cs = [PrimeFieldElem(c, modulus) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, *_):
        raise AttributeError("DensePoly is immutable")

    @classmethod
    def from_residues(cls, residues: Sequence[int], p: int) -> "DensePoly":
        return cls([int(r) for r in residues], modulus=p)

    def residues(self) -> list[int]:
        if self.modulus is None:
            raise InvalidInputError("not a polynomial over a prime field")
        return [c.residue for c in self.coeffs]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self._zero()

    def _zero(self):
        return PrimeFieldElem(0, self.modulus) if self.modulus else ZERO

    def _check(self, other: "DensePoly"):
        if self.modulus != other.modulus:
            raise InvalidInputError(
                f"cannot combine polynomials over moduli {self.modulus} and {other.modulus}")

    def _lift(self, other):
        if isinstance(other, DensePoly):
            self._check(other)
            return other
        return DensePoly([other], modulus=self.modulus)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DensePoly([self[i] + other[i] for i in range(n)], self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return DensePoly([-c for c in self.coeffs], self.modulus)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return DensePoly([], self.modulus)
        if self.modulus is not None:
            p = self.modulus
            a = np.array(self.residues(), dtype=object)
            b = np.array(other.residues(), dtype=object)
            return DensePoly([int(x) % p for x in np.convolve(a, b)], p)
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return DensePoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = DensePoly([1], self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "DensePoly"):
        """Euclidean division (coefficients must form a field)."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead_inv = 1 / other.coeffs[-1] if self.modulus is None else other.coeffs[-1].inverse()
        quo = [self._zero()] * max(len(rem) - dd, 0)
        while len(rem) - 1 >= dd and rem:
            s = len(rem) - 1 - dd
            q = rem[-1] * lead_inv
            quo[s] = q
            for j, c in enumerate(other.coeffs):
                rem[s + j] = rem[s + j] - q * c
            while rem and not rem[-1]:
                rem.pop()
        return DensePoly(quo, self.modulus), DensePoly(rem, self.modulus)

    def __floordiv__(self, other):
        return self.divmod(self._lift(other))[0]

    def __mod__(self, other):
        return self.divmod(self._lift(other))[1]

    def monic(self) -> "DensePoly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        inv = lead.inverse() if self.modulus else 1 / lead
        return DensePoly([c * inv for c in self.coeffs], self.modulus)

    def gcd(self, other: "DensePoly") -> "DensePoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, x):
        acc = self._zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, DensePoly):
            return self.modulus == other.modulus and self.coeffs == other.coeffs
        if isinstance(other, (int, Rational, Fraction)):
            return self == DensePoly([other], self.modulus)
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    def __repr__(self):
        return f"DensePoly({list(map(str, self.coeffs))}, modulus={self.modulus})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c.residue) if self.modulus else str(c)
            if k == 0:
                terms.append(cs)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                terms.append(mono if cs == "1" else f"{cs}*{mono}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} (mod {self.modulus})" if self.modulus else body


def poly_bareiss_det(M: Sequence[Sequence[DensePoly]]) -> DensePoly:
    """Exact determinant of a square matrix of polynomials over one prime field.

    Fraction-free Bareiss elimination with exact polynomial division; the
    numeric work runs in the compiled kernel.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise InvalidInputError("matrix is not square")
    mods = {e.modulus for row in M for e in row}
    if None in mods or len(mods) != 1:
        raise InvalidInputError(f"entries must share one prime modulus, got {mods}")
    p = mods.pop()
    if n == 0:
        return DensePoly([1], p)
    d = max(max(e.degree for row in M for e in row), 0)
    L = 2 * n * (d + 1) + 2
    arr = np.zeros((n, n, L), dtype=np.int64)
    for i, row in enumerate(M):
        for j, e in enumerate(row):
            r = e.residues()
            arr[i, j, : len(r)] = r
    return DensePoly.from_residues(_kernels.bareiss_modp(arr, p).tolist(), p)
