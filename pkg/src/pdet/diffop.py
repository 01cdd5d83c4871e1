"""Operators ``prod_k (x d/dx - l_k) + sum t_{i,k}(t) x^i (d/dx)^k`` and their matrices.

Acting on ``x^(j+eps)`` an operator produces ``sum_i b_ij(eps) x^(i+eps)``.
This module builds the entries ``b_ij(eps)`` as truncated (eps, t)
expansions, evaluates determinants of finite windows of that matrix, and
computes the exact mod-p determinant on ``span(1, x, ..., x^(p-1))``.
"""
from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .errors import (ArityError, BadPrimeError, InvalidInputError,
                     NonInvertibleDenominatorError, NotPolynomialError,
                     OperatorFileError, SmallnessViolationError)
from .rings import (ONE, ZERO, DensePoly, format_rational, is_prime,
                    poly_bareiss_det, rational, reduce_mod)
from .series import EpsPoly, TruncSeries, _zeros, series_inv


class RatFunc:
    """Rational function ``num(t)/den(t)`` with ``den(0) != 0``."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence = (0,), den: Sequence = (1,)):
        n = [rational(c) for c in num]
        d = [rational(c) for c in den]
        while n and not n[-1]:
            n.pop()
        while d and not d[-1]:
            d.pop()
        if not d:
            raise NonInvertibleDenominatorError("zero denominator")
        if not d[0]:
            raise NonInvertibleDenominatorError("denominator vanishes at t = 0")
        object.__setattr__(self, "num", tuple(n))
        object.__setattr__(self, "den", tuple(d))

    def __setattr__(self, *_):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def constant(cls, c) -> "RatFunc":
        return cls([c], [1])

    def is_zero(self) -> bool:
        return not self.num

    def at_zero(self):
        return (self.num[0] if self.num else ZERO) / self.den[0]

    def series(self, K: int) -> TruncSeries:
        return TruncSeries(self.num, K) * series_inv(TruncSeries(self.den, K))

    def mod_p(self, p: int) -> tuple[DensePoly, DensePoly]:
        """Reduction ``(num, den)`` over F_p; requires p-integral data and ``den(0) != 0 mod p``."""
        try:
            num = DensePoly.from_residues([reduce_mod(c, p) for c in self.num], p)
            den = DensePoly.from_residues([reduce_mod(c, p) for c in self.den], p)
        except ZeroDivisionError as exc:
            raise BadPrimeError(f"p = {p} divides a coefficient denominator: {exc}") from None
        if den[0].residue == 0:
            raise BadPrimeError(f"p = {p} divides den(0) = {self.den[0]}")
        return num, den

    def __neg__(self):
        return RatFunc([-c for c in self.num], self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        a = DensePoly(self.num) * DensePoly(other.num)
        b = DensePoly(self.den) * DensePoly(other.den)
        return RatFunc(a.coeffs or [0], b.coeffs)

    def to_json(self) -> dict:
        return {"num": [_json_num(c) for c in self.num] or [0],
                "den": [_json_num(c) for c in self.den]}

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return DensePoly(self.num) * DensePoly(other.den) == DensePoly(other.num) * DensePoly(self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({[str(c) for c in self.num]}, {[str(c) for c in self.den]})"


def _json_num(c):
    c = rational(c)
    return int(c) if c.denominator == 1 else format_rational(c)


def _poly_eps(roots_shift: Sequence[int]) -> list[int]:
    """Coefficients (ascending in eps) of ``prod (eps + s)`` over the shifts."""
    out = [1]
    for s in roots_shift:
        nxt = [0] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i] += c * s
            nxt[i + 1] += c
        out = nxt
    return out


def falling_eps(j: int, k: int) -> list[int]:
    """``(j+eps)(j+eps-1)...(j+eps-k+1)`` as ascending eps coefficients."""
    return _poly_eps([j - r for r in range(k)])


@dataclass(frozen=True, eq=False)
class DiffOperator:
    """An operator of the family above together with a prefactor ``c(t)``.

    ``coeffs`` maps ``(i, k)`` to the rational function multiplying
    ``x^i (d/dx)^k``. The prefactor only affects ``detp`` (the operator
    whose p-determinant is taken is ``c(t) * D``).
    """

    n: int
    l: tuple
    m: int
    coeffs: Mapping
    prefactor: RatFunc = field(default_factory=lambda: RatFunc.constant(1))
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or len(self.l) != self.n:
            raise ArityError(f"need n >= 1 exponents, got n={self.n}, l={self.l}")
        if list(self.l) != sorted(self.l):
            raise OperatorFileError(f"exponents must be sorted: {self.l}")
        if self.m < 0:
            raise ArityError("m must be non-negative")
        for (i, k), f in self.coeffs.items():
            if i < 0 or k < 0:
                raise ArityError(f"negative index in coefficient ({i}, {k})")
            if k > self.m:
                raise ArityError(f"coefficient ({i}, {k}) has k > m = {self.m}")
            if i <= k and f.at_zero() != 0:
                raise SmallnessViolationError(
                    f"t_({i},{k}) must vanish at t = 0, got {f.at_zero()}")
        if self.prefactor.at_zero() == 0:
            raise InvalidInputError("prefactor must be a unit (c(0) != 0)")
        object.__setattr__(self, "coeffs",
                           {key: f for key, f in sorted(self.coeffs.items()) if not f.is_zero()})

    # -- basic data ---------------------------------------------------------
    @property
    def max_abs_l(self) -> int:
        return max(abs(x) for x in self.l)

    @property
    def lower_bandwidth(self) -> int:
        """Largest ``i - j`` with ``b_ij`` possibly nonzero."""
        return max([i - k for (i, k) in self.coeffs] + [0])

    def is_unperturbed(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.n, self.l, self.m) == (other.n, other.l, other.m) and \
            self.coeffs == other.coeffs and self.prefactor == other.prefactor

    def __hash__(self):
        return hash((self.n, self.l, self.m, tuple(self.coeffs)))

    def with_prefactor(self, c: RatFunc) -> "DiffOperator":
        return DiffOperator(self.n, self.l, self.m, dict(self.coeffs), c)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "l": list(self.l),
            "m": self.m,
            "prefactor": self.prefactor.to_json(),
            "coeffs": [{"i": i, "k": k, **f.to_json()} for (i, k), f in self.coeffs.items()],
        }

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    # -- expansions -------------------------------------------------------------
    def coeff_series(self, K: int) -> dict:
        """``{(i, k): TruncSeries}`` expanded to order K (memoized)."""
        key = ("series", K)
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            hit = {ik: f.series(K) for ik, f in self.coeffs.items()}
            with self._lock:
                self._cache[key] = hit
        return hit


def parse_operator(text: str | bytes | dict) -> DiffOperator:
    """Parse and validate an operator description (JSON text or decoded dict)."""
    if isinstance(text, dict):
        data = text
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise OperatorFileError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise OperatorFileError("operator file must hold a JSON object")
    try:
        n = int(data["n"])
        l = tuple(int(x) for x in data["l"])
        m = int(data["m"])
        pre = data.get("prefactor") or {"num": [1], "den": [1]}
        prefactor = RatFunc(pre.get("num", [1]), pre.get("den", [1]))
        coeffs = {}
        for entry in data.get("coeffs", []):
            key = (int(entry["i"]), int(entry["k"]))
            if key in coeffs:
                raise OperatorFileError(f"duplicate coefficient {key}")
            coeffs[key] = RatFunc(entry.get("num", [0]), entry.get("den", [1]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, OperatorFileError):
            raise
        raise OperatorFileError(f"malformed operator file: {exc!r}") from None
    return DiffOperator(n, l, m, coeffs, prefactor)


def load_operator(path) -> DiffOperator:
    with open(path, "rb") as fh:
        return parse_operator(fh.read())


BUNDLED = ("d0", "intro", "minus_d1", "d1", "unperturbed")


def bundled_operator(name: str) -> DiffOperator:
    """One of the operator files shipped in ``pdet/data`` (name with or without ``.json``)."""
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise OperatorFileError(f"no bundled operator {name!r}; choose from {', '.join(BUNDLED)}")
    return parse_operator(resources.files("pdet.data").joinpath(stem + ".json").read_bytes())


def unperturbed(l: Sequence[int], m: int = 0) -> DiffOperator:
    return DiffOperator(len(l), tuple(sorted(l)), m, {})


# ---------------------------------------------------------------------------
# matrix entries
# ---------------------------------------------------------------------------

def _entry_array(D: DiffOperator, i: int, j: int, E: int, K: int) -> np.ndarray | None:
    """``b_ij`` as an ``(E+1, K)`` object array, or None when it vanishes."""
    if j - i > D.m or i - j > D.lower_bandwidth:
        return None
    ser = D.coeff_series(K)
    arr = _zeros(E + 1, K)
    nonzero = False
    if i == j:
        diag = _poly_eps([j - lk for lk in D.l])
        for e, c in enumerate(diag[: E + 1]):
            arr[e, 0] += c
        nonzero = True
    for k in range(max(0, j - i), D.m + 1):
        s = ser.get((k + i - j, k))
        if s is None:
            continue
        ff = falling_eps(j, k)
        row = np.array(s.coeffs, dtype=object)
        for e, c in enumerate(ff[: E + 1]):
            if c:
                arr[e] += c * row
                nonzero = True
    if not nonzero or not np.any(arr != 0):
        return None
    return arr


def matrix_entry(D: DiffOperator, i: int, j: int, E: int, K: int) -> EpsPoly:
    """``b_ij(eps)`` truncated to ``eps^E`` and ``t^(K-1)``."""
    arr = _entry_array(D, i, j, E, K)
    if arr is None:
        return EpsPoly(_zeros(0, K), 0, E)
    return EpsPoly(arr, 0, E)


# ---------------------------------------------------------------------------
# (eps, t)-truncated bivariate kernels on raw (E+1, K) arrays
# ---------------------------------------------------------------------------

def _bmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows, K = a.shape
    out = _zeros(rows, K)
    if np.count_nonzero(a != 0) > np.count_nonzero(b != 0):
        a, b = b, a
    for e, k in zip(*np.nonzero(a != 0)):
        out[e:, k:] += a[e, k] * b[: rows - e, : K - k]
    return out


def _binv(a: np.ndarray) -> np.ndarray:
    E = a.shape[0] - 1
    inv = EpsPoly(a, 0, E).inverse()
    out = _zeros(E + 1, a.shape[1])
    out[: inv.arr.shape[0]] = inv.arr
    return out


def berkowitz_det(M: list, mul, add, neg, zero, one):
    """Division-free determinant over a commutative ring (Berkowitz).

    ``M`` is a square list of lists of ring elements; the ring is given by
    the callables, so the same code serves scalars and truncated series.
    """
    n = len(M)
    if n == 0:
        return one
    # characteristic polynomial of the leading r x r block, highest degree first
    poly = [one, neg(M[0][0])]
    for r in range(1, n):
        R = [M[r][c] for c in range(r)]          # row r, columns < r
        S = [M[c][r] for c in range(r)]          # column r, rows < r
        A = [row[:r] for row in M[:r]]
        a = M[r][r]
        # Toeplitz column: 1, -a, -R S, -R A S, -R A^2 S, ...
        col = [one, neg(a)]
        vec = S
        for _ in range(r):
            dot = zero
            for x, y in zip(R, vec):
                dot = add(dot, mul(x, y))
            col.append(neg(dot))
            vec = [_dot_row(A[i], vec, mul, add, zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, len(poly) - 1) + 1):
                if i - j < len(col):
                    acc = add(acc, mul(col[i - j], poly[j]))
            new.append(acc)
        poly = new
    det = poly[n]
    return neg(det) if n % 2 else det


def _dot_row(row, vec, mul, add, zero):
    acc = zero
    for x, y in zip(row, vec):
        acc = add(acc, mul(x, y))
    return acc


@dataclass(frozen=True)
class WindowDet:
    """``value * scale`` is the window determinant (``scale`` is 1 unless normalized)."""

    a: int
    b: int
    value: EpsPoly
    scale: object = ONE


def window_det(D: DiffOperator, a: int, b: int, E: int, K: int,
               normalize: bool = False) -> WindowDet:
    """``det B_{a,b}(eps)`` modulo ``(eps^(E+1), t^K)``.

    Rows whose diagonal is a unit (index not among the exponents) are
    pivoted out by banded Schur-complement elimination in natural order;
    the remaining core block is evaluated by Berkowitz. With ``normalize``
    each pivot is divided by its constant term ``prod_k (i - l_k)`` and the
    product of those constants is returned separately as ``scale``; this
    keeps the integers small without changing the Weierstrass polynomial.
    """
    if a > b:
        raise InvalidInputError(f"empty window ({a}, {b})")
    idx = list(range(a, b + 1))
    rows: dict = {i: {} for i in idx}
    for i in idx:
        for j in range(max(a, i - D.lower_bandwidth), min(b, i + D.m) + 1):
            arr = _entry_array(D, i, j, E, K)
            if arr is not None:
                rows[i][j] = arr
    cols: dict = {j: set() for j in idx}
    for i, r in rows.items():
        for j in r:
            cols[j].add(i)

    lset = set(D.l)
    det = _zeros(E + 1, K)
    det[0, 0] = ONE
    scale = ONE
    for piv in idx:
        if piv in lset:
            continue
        prow = rows.pop(piv)
        pcol = cols.pop(piv)
        pv = prow.pop(piv)
        if normalize:
            c = pv[0, 0]
            scale *= c
            det = _bmul(det, pv * (1 / c))
        else:
            det = _bmul(det, pv)
        inv = _binv(pv)
        for j in prow:
            cols[j].discard(piv)
        for r in pcol:
            if r == piv:
                continue
            rrow = rows[r]
            f = _bmul(rrow.pop(piv), inv)
            for j, v in prow.items():
                upd = _bmul(f, v)
                cur = rrow.get(j)
                new = -upd if cur is None else cur - upd
                if np.any(new != 0):
                    rrow[j] = new
                    cols[j].add(r)
                elif cur is not None:
                    del rrow[j]
                    cols[j].discard(r)
    core = sorted(rows)
    zero = _zeros(E + 1, K)
    one = _zeros(E + 1, K)
    one[0, 0] = ONE
    M = [[rows[i].get(j, zero) for j in core] for i in core]
    cdet = berkowitz_det(M, _bmul, lambda x, y: x + y, lambda x: -x, zero, one)
    return WindowDet(a, b, EpsPoly(_bmul(det, cdet), 0, E), scale)


# ---------------------------------------------------------------------------
# exact p-determinant
# ---------------------------------------------------------------------------

def _check_prime(p: int):
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise BadPrimeError(f"{p} is not a prime")


def detp_rational(D: DiffOperator, p: int) -> tuple[DensePoly, DensePoly]:
    """``Det_p(c(t) D)`` over F_p(t) as a reduced fraction ``(num, den)``, den monic."""
    _check_prime(p)
    reds = {ik: f.mod_p(p) for ik, f in D.coeffs.items()}
    cn, cd = D.prefactor.mod_p(p)
    one = DensePoly([1], p)
    G = one
    for _, den in reds.values():
        if den.degree > 0 and not (G % den).is_zero():
            G = G * (den // den.gcd(G))
    # G * t_{i,k} as polynomials mod p
    scaled = {ik: num * (G // den) for ik, (num, den) in reds.items()}
    zero = DensePoly([], p)
    M = []
    for i in range(p):
        row = []
        for j in range(p):
            e = zero
            if i == j:
                prod = 1
                for lk in D.l:
                    prod *= (j - lk)
                e = G * (prod % p)
            for k in range(max(0, j - i), D.m + 1):
                s = scaled.get((k + i - j, k))
                if s is None:
                    continue
                ff = 1
                for r in range(k):
                    ff *= (j - r)
                if ff % p:
                    e = e + s * (ff % p)
            row.append(e)
        M.append(row)
    det = poly_bareiss_det(M)
    # Frobenius: c(t)^p = c(t^p) over F_p
    def frob(f: DensePoly) -> DensePoly:
        out = [0] * (p * max(f.degree, 0) + 1)
        for k, c in enumerate(f.residues()):
            out[p * k] = c
        return DensePoly.from_residues(out, p)
    num = frob(cn) * det
    den = frob(cd) * G ** p
    if num.is_zero():
        return num, one
    g = num.gcd(den)
    num, den = num // g, den // g
    lead = den.coeffs[-1].inverse()
    return num * DensePoly([lead], p), den * DensePoly([lead], p)


def detp(D: DiffOperator, p: int) -> DensePoly:
    """Exact ``Det_p(c(t) D)`` in F_p[t]; raises NotPolynomialError for a proper fraction."""
    num, den = detp_rational(D, p)
    if den.degree > 0:
        raise NotPolynomialError(
            f"Det_p is not a polynomial for p = {p}; use detp_series or supply a prefactor")
    return num


def detp_series(D: DiffOperator, p: int, K: int) -> list[int]:
    """Residues of ``Det_p(c(t) D)`` at ``t^0 .. t^(K-1)`` (expanded at t = 0)."""
    num, den = detp_rational(D, p)
    d0 = den[0].residue
    if d0 == 0:
        raise BadPrimeError(f"Det_p has a pole at t = 0 for p = {p}")
    inv0 = pow(d0, -1, p)
    n = num.residues() if not num.is_zero() else []
    d = den.residues()
    out = []
    for k in range(K):
        acc = n[k] if k < len(n) else 0
        for j in range(1, min(k, len(d) - 1) + 1):
            acc -= d[j] * out[k - j]
        out.append(acc * inv0 % p)
    return out
