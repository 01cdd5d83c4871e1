"""Truncated power series in t, Laurent series in t, and (eps, t) expansions.

``TruncSeries`` and ``LaurentSeries`` are univariate in ``t``. ``EpsLaurent``
holds finitely many powers of ``eps`` (possibly negative) whose coefficients
are power series in ``t`` truncated at a common order ``K``; ``EpsPoly`` is
the special case with no negative powers and an optional truncation bound
``E`` in ``eps``. Coefficients are exact rationals throughout.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from gmpy2 import is_square, isqrt, mpq

from .errors import InvalidInputError, NoSquareRootError, NotAUnitError
from .rings import ZERO, ONE, format_rational, rational


def _conv(a: Sequence, b: Sequence, K: int) -> list:
    out = [ZERO] * K
    for i, x in enumerate(a[:K]):
        if not x:
            continue
        for j in range(min(len(b), K - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


class TruncSeries:
    """Power series ``c_0 + c_1 t + ... + c_{K-1} t^{K-1} + O(t^K)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (), order: int | None = None):
        cs = [rational(c) for c in coeffs]
        if order is not None:
            cs = (cs + [ZERO] * order)[:order]
        if not cs:
            raise InvalidInputError("truncation order must be at least 1")
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *_):
        raise AttributeError("TruncSeries is immutable")

    @classmethod
    def zero(cls, K: int) -> "TruncSeries":
        return cls([], K)

    @classmethod
    def one(cls, K: int) -> "TruncSeries":
        return cls([1], K)

    @classmethod
    def t(cls, K: int) -> "TruncSeries":
        return cls([0, 1], K)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return self.order

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, K: int) -> "TruncSeries":
        if K > self.order:
            raise InvalidInputError(f"cannot raise truncation order {self.order} to {K}")
        return TruncSeries(self.coeffs[:K])

    def _other(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries([other], self.order)

    def __add__(self, other):
        other = self._other(other)
        K = min(self.order, other.order)
        return TruncSeries([a + b for a, b in zip(self.coeffs[:K], other.coeffs[:K])])

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            x = rational(other)
            return TruncSeries([c * x for c in self.coeffs])
        K = min(self.order, other.order)
        return TruncSeries(_conv(self.coeffs, other.coeffs, K))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * series_inv(other)
        x = rational(other)
        return TruncSeries([c / x for c in self.coeffs])

    def __rtruediv__(self, other):
        return self._other(other) * series_inv(self)

    def __pow__(self, e: int):
        if e < 0:
            return series_inv(self) ** (-e)
        result = TruncSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by ``t**k`` (k >= 0), keeping the order."""
        return TruncSeries([ZERO] * k + list(self.coeffs), self.order)

    def derivative(self) -> "TruncSeries":
        K = self.order
        return TruncSeries([k * self.coeffs[k] for k in range(1, K)], K)

    def integral(self) -> "TruncSeries":
        K = self.order
        return TruncSeries([ZERO] + [self.coeffs[k] / (k + 1) for k in range(K - 1)], K)

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"TruncSeries([{', '.join(map(str, self.coeffs))}])"

    def __str__(self):
        return format_series(self.coeffs, 0, self.order)


def format_series(coeffs: Sequence, valuation: int, order: int, var: str = "t") -> str:
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        k = valuation + i
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        s = format_rational(c)
        if s.endswith("/1"):
            s = s[:-2]
        if mono:
            s = mono if s == "1" else ("-" + mono if s == "-1" else f"{s}*{mono}")
        parts.append(s)
    body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    return f"{body} + O({var}^{order})"


def series_inv(s: TruncSeries) -> TruncSeries:
    """Multiplicative inverse; requires a nonzero constant term."""
    c0 = s.coeffs[0]
    if not c0:
        raise NotAUnitError("series with zero constant term is not invertible")
    K = s.order
    inv0 = 1 / c0
    w = [inv0]
    for k in range(1, K):
        acc = ZERO
        for j in range(1, k + 1):
            sj = s.coeffs[j]
            if sj:
                acc += sj * w[k - j]
        w.append(-acc * inv0)
    return TruncSeries(w)


def series_log(s: TruncSeries) -> TruncSeries:
    """``log s`` for constant term 1, as the integral of ``s'/s``."""
    if s.coeffs[0] != 1:
        raise InvalidInputError("series_log needs constant term 1")
    return (s.derivative() * series_inv(s)).integral()


def series_exp(s: TruncSeries) -> TruncSeries:
    """``exp s`` for zero constant term (recurrence from ``e' = s' e``)."""
    if s.coeffs[0]:
        raise InvalidInputError("series_exp needs zero constant term")
    K = s.order
    e = [ONE]
    for k in range(1, K):
        acc = ZERO
        for j in range(1, k + 1):
            sj = s.coeffs[j]
            if sj:
                acc += j * sj * e[k - j]
        e.append(acc / k)
    return TruncSeries(e)


def _rational_sqrt(x):
    num, den = int(x.numerator), int(x.denominator)
    if x < 0 or not (is_square(num) and is_square(den)):
        raise NoSquareRootError(f"{x} is not a square in Q")
    return mpq(int(isqrt(num)), int(isqrt(den)))


def series_sqrt(s: TruncSeries) -> TruncSeries:
    """Square root of ``t^(2v) u`` with positive leading coefficient.

    Only ``K - v`` coefficients of the root are determined, so the result
    carries order ``K - v``.
    """
    K = s.order
    v = s.valuation()
    if v == K:
        return TruncSeries.zero(max((K + 1) // 2, 1))
    if v % 2:
        raise NoSquareRootError("odd valuation")
    u = s.coeffs[v:]
    r0 = _rational_sqrt(u[0])
    r = [r0]
    inv2r0 = 1 / (2 * r0)
    for k in range(1, len(u)):
        acc = u[k]
        for j in range(1, k):
            acc -= r[j] * r[k - j]
        r.append(acc * inv2r0)
    h = v // 2
    return TruncSeries([ZERO] * h + r, K - h)


# ---------------------------------------------------------------------------
# Laurent series in t with absolute precision tracking
# ---------------------------------------------------------------------------

class LaurentSeries:
    """``t^v (c_0 + c_1 t + ...)`` known modulo ``t^prec``.

    Arithmetic tracks absolute precision, so dividing by a series of
    positive valuation visibly costs precision.
    """

    __slots__ = ("valuation", "coeffs", "prec")

    def __init__(self, coeffs: Iterable = (), valuation: int = 0, prec: int | None = None):
        cs = [rational(c) for c in coeffs]
        if prec is None:
            prec = valuation + len(cs)
        cs = cs[: max(prec - valuation, 0)]
        i = 0
        while i < len(cs) and not cs[i]:
            i += 1
        cs = cs[i:]
        while cs and not cs[-1]:
            cs.pop()
        v = valuation + i if cs else prec
        object.__setattr__(self, "valuation", v)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *_):
        raise AttributeError("LaurentSeries is immutable")

    @classmethod
    def from_trunc(cls, s: TruncSeries) -> "LaurentSeries":
        return cls(s.coeffs, 0, s.order)

    @classmethod
    def constant(cls, c, prec: int) -> "LaurentSeries":
        return cls([c], 0, prec)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int):
        if k >= self.prec:
            raise InvalidInputError(f"t^{k} is beyond the known precision {self.prec}")
        i = k - self.valuation
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else ZERO

    def to_trunc(self, K: int | None = None) -> TruncSeries:
        K = self.prec if K is None else K
        if K > self.prec:
            raise InvalidInputError(f"only known through t^{self.prec - 1}")
        if self.coeffs and self.valuation < 0:
            raise InvalidInputError("series has a pole at t = 0")
        return TruncSeries([self.coefficient(k) for k in range(K)], K)

    def _other(self, other):
        if isinstance(other, LaurentSeries):
            return other
        return LaurentSeries([other], 0, max(self.prec, 1))

    def __add__(self, other):
        other = self._other(other)
        prec = min(self.prec, other.prec)
        lo = min(self.valuation, other.valuation, prec)
        return LaurentSeries(
            [self.coefficient(k) + other.coefficient(k) for k in range(lo, prec)], lo, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries([-c for c in self.coeffs], self.valuation, self.prec)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            x = rational(other)
            return LaurentSeries([c * x for c in self.coeffs], self.valuation, self.prec)
        v = self.valuation + other.valuation
        prec = min(self.valuation + other.prec, other.valuation + self.prec)
        if self.is_zero() or other.is_zero():
            return LaurentSeries([], prec, prec)
        return LaurentSeries(_conv(self.coeffs, other.coeffs, prec - v), v, prec)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        if self.is_zero():
            raise NotAUnitError("inverse of a series that is zero to known precision")
        v = self.valuation
        rel = self.prec - v
        unit = TruncSeries(self.coeffs, rel)
        return LaurentSeries(series_inv(unit).coeffs, -v, rel - v)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        return self * (1 / rational(other))

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def truncate(self, prec: int) -> "LaurentSeries":
        return LaurentSeries(self.coeffs, self.valuation, min(prec, self.prec))

    def with_precision(self, prec: int) -> "LaurentSeries":
        """Reinterpret as exact through ``prec`` (padding with zeros)."""
        return LaurentSeries(self.coeffs, self.valuation, prec)

    def __eq__(self, other):
        if isinstance(other, LaurentSeries):
            return (self.valuation, self.coeffs, self.prec) == (
                other.valuation, other.coeffs, other.prec)
        return NotImplemented

    def __hash__(self):
        return hash((self.valuation, self.coeffs, self.prec))

    def __repr__(self):
        return (f"LaurentSeries({[str(c) for c in self.coeffs]}, "
                f"valuation={self.valuation}, prec={self.prec})")

    def __str__(self):
        return format_series(self.coeffs, self.valuation, self.prec)


# ---------------------------------------------------------------------------
# (eps, t) expansions
# ---------------------------------------------------------------------------

def _zeros(rows: int, K: int) -> np.ndarray:
    return np.full((max(rows, 0), K), ZERO, dtype=object)


class EpsLaurent:
    """Finite Laurent expansion in ``eps`` with truncated ``t``-series coefficients.

    ``arr[e - low, k]`` is the coefficient of ``eps^e t^k``. When
    ``eps_bound`` is set, powers of ``eps`` above it are dropped by every
    operation, i.e. the value lives in a ring truncated in ``eps``.
    """

    __slots__ = ("low", "arr", "eps_bound")

    def __init__(self, arr, low: int = 0, eps_bound: int | None = None):
        arr = np.asarray(arr, dtype=object)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise InvalidInputError("coefficient array must have shape (rows, K) with K >= 1")
        if eps_bound is not None and low + arr.shape[0] - 1 > eps_bound:
            arr = arr[: max(eps_bound - low + 1, 0)]
        nz = np.nonzero(np.any(arr != 0, axis=1))[0]
        if nz.size == 0:
            arr, low = arr[:0], 0
        else:
            arr, low = arr[nz[0]: nz[-1] + 1], low + int(nz[0])
        object.__setattr__(self, "arr", arr)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "eps_bound", eps_bound)

    def __setattr__(self, *_):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def from_terms(cls, terms: dict, K: int, eps_bound: int | None = None):
        """Build from ``{eps exponent: TruncSeries or scalar}``."""
        if not terms:
            return cls(_zeros(0, K), 0, eps_bound)
        lo, hi = min(terms), max(terms)
        arr = _zeros(hi - lo + 1, K)
        for e, s in terms.items():
            if isinstance(s, TruncSeries):
                cs = list(s.coeffs[:K])
                arr[e - lo, : len(cs)] = cs
            else:
                arr[e - lo, 0] = rational(s)
        return make_eps(arr, lo, eps_bound)

    @property
    def t_order(self) -> int:
        return self.arr.shape[1]

    @property
    def high(self) -> int:
        return self.low + self.arr.shape[0] - 1

    def is_zero(self) -> bool:
        return self.arr.shape[0] == 0

    def eps_range(self) -> range:
        return range(self.low, self.high + 1)

    def coeff(self, e: int) -> TruncSeries:
        return TruncSeries(self.coeff_row(e), self.t_order)

    def coeff_row(self, e: int) -> np.ndarray:
        if self.low <= e <= self.high:
            return self.arr[e - self.low]
        return np.full(self.t_order, ZERO, dtype=object)

    def terms(self) -> dict:
        return {e: self.coeff(e) for e in self.eps_range() if np.any(self.arr[e - self.low] != 0)}

    def t_valuation(self) -> int:
        if self.is_zero():
            return self.t_order
        return int(np.nonzero(np.any(self.arr != 0, axis=0))[0][0])

    def truncate_t(self, K: int):
        return make_eps(self.arr[:, :K], self.low, self.eps_bound)

    def truncate_eps(self, high: int):
        return make_eps(self.arr[: max(high - self.low + 1, 0)], self.low, self.eps_bound)

    def with_eps_bound(self, eps_bound: int | None):
        return make_eps(self.arr, self.low, eps_bound)

    def _bound_with(self, other) -> int | None:
        bounds = [b for b in (self.eps_bound, getattr(other, "eps_bound", None)) if b is not None]
        return min(bounds) if bounds else None

    def _coerce(self, other) -> "EpsLaurent":
        if isinstance(other, EpsLaurent):
            return other
        if isinstance(other, TruncSeries):
            return EpsLaurent.from_terms({0: other}, self.t_order)
        return EpsLaurent.from_terms({0: rational(other)}, self.t_order)

    def __add__(self, other):
        other = self._coerce(other)
        K = min(self.t_order, other.t_order)
        bound = self._bound_with(other)
        if self.is_zero():
            return make_eps(other.arr[:, :K], other.low, bound)
        if other.is_zero():
            return make_eps(self.arr[:, :K], self.low, bound)
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        arr = _zeros(hi - lo + 1, K)
        arr[self.low - lo: self.high - lo + 1] += self.arr[:, :K]
        arr[other.low - lo: other.high - lo + 1] += other.arr[:, :K]
        return make_eps(arr, lo, bound)

    __radd__ = __add__

    def __neg__(self):
        return make_eps(-self.arr, self.low, self.eps_bound)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, x):
        return make_eps(self.arr * rational(x), self.low, self.eps_bound)

    def mul(self, other, high: int | None = None):
        """Product; powers of eps above ``high`` or either ``eps_bound`` are dropped."""
        if not isinstance(other, EpsLaurent):
            if not isinstance(other, TruncSeries):
                return self.scale(other)
            other = self._coerce(other)
        K = min(self.t_order, other.t_order)
        bound = self._bound_with(other)
        caps = [c for c in (bound, high) if c is not None]
        lo = self.low + other.low
        hi = self.high + other.high
        if caps:
            hi = min(hi, min(caps))
        rows = hi - lo + 1
        if self.is_zero() or other.is_zero() or rows <= 0:
            return make_eps(_zeros(0, K), 0, bound)
        a, b = self.arr[:, :K], other.arr[:, :K]
        if np.count_nonzero(a != 0) > np.count_nonzero(b != 0):
            a, b = b, a
        out = _zeros(rows, K)
        nb_rows = b.shape[0]
        for e, k in zip(*np.nonzero(a != 0)):
            if e >= rows:
                continue
            m = min(nb_rows, rows - e)
            out[e: e + m, k:] += a[e, k] * b[:m, : K - k]
        return make_eps(out, lo, bound)

    def __mul__(self, other):
        return self.mul(other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InvalidInputError("negative powers are not supported")
        result = EpsLaurent.from_terms({0: 1}, self.t_order, self.eps_bound)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift_eps(self, d: int):
        """Multiply by ``eps**d``."""
        return make_eps(self.arr, self.low + d, self.eps_bound)

    def evaluate_eps(self, x) -> TruncSeries:
        x = rational(x)
        acc = np.full(self.t_order, ZERO, dtype=object)
        for e in self.eps_range():
            acc = acc + self.arr[e - self.low] * (x ** e)
        return TruncSeries(list(acc), self.t_order)

    def __eq__(self, other):
        if not isinstance(other, EpsLaurent):
            return NotImplemented
        if self.t_order != other.t_order:
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return (self.low == other.low and self.arr.shape == other.arr.shape
                and bool(np.all(self.arr == other.arr)))

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{e}: {s}" for e, s in self.terms().items())
        return f"{type(self).__name__}({{{body}}}, K={self.t_order})"


class EpsPoly(EpsLaurent):
    """Polynomial in eps (stored from ``eps^0``), optionally truncated at ``eps_bound``."""

    __slots__ = ()

    def __init__(self, arr, low: int = 0, eps_bound: int | None = None):
        arr = np.asarray(arr, dtype=object)
        if low < 0:
            if np.any(arr[: -low] != 0):
                raise InvalidInputError("EpsPoly cannot hold negative powers of eps")
            arr, low = arr[-low:], 0
        if low > 0 and arr.size:
            arr = np.concatenate([_zeros(low, arr.shape[1]), arr], axis=0)
        super().__init__(arr, 0, eps_bound)
        if self.low > 0:
            full = np.concatenate([_zeros(self.low, self.t_order), self.arr], axis=0)
            object.__setattr__(self, "arr", full)
            object.__setattr__(self, "low", 0)

    @property
    def degree(self) -> int:
        return self.high

    def coefficients(self) -> list:
        return [self.coeff(e) for e in range(self.high + 1)]

    @classmethod
    def from_series_list(cls, coeffs: Sequence[TruncSeries], eps_bound: int | None = None):
        K = min(s.order for s in coeffs)
        return cls.from_terms({e: s for e, s in enumerate(coeffs)}, K, eps_bound)

    def inverse(self) -> "EpsPoly":
        """Inverse of a unit in the ring truncated at ``eps_bound`` and ``t^K``."""
        if self.eps_bound is None:
            raise InvalidInputError("inverse needs a finite eps_bound")
        K, E = self.t_order, self.eps_bound
        rows = E + 1
        a = _zeros(rows, K)
        r = min(self.arr.shape[0], rows)
        a[:r] = self.arr[:r]
        c0 = a[0, 0]
        if not c0:
            raise NotAUnitError("constant term vanishes")
        # invert the t^0 slice as a series in eps, then solve t-order by t-order
        u0 = a[:, 0]
        inv0 = [1 / c0]
        for e in range(1, rows):
            acc = ZERO
            for j in range(1, e + 1):
                if u0[j]:
                    acc += u0[j] * inv0[e - j]
            inv0.append(-acc * inv0[0])
        inv0 = np.array(inv0, dtype=object)
        w = _zeros(rows, K)
        w[:, 0] = inv0
        for k in range(1, K):
            acc = np.full(rows, ZERO, dtype=object)
            for j in range(1, k + 1):
                if np.any(a[:, j] != 0) and np.any(w[:, k - j] != 0):
                    acc = acc + np.convolve(a[:, j], w[:, k - j])[:rows]
            if np.any(acc != 0):
                w[:, k] = -np.convolve(acc, inv0)[:rows]
        return EpsPoly(w, 0, E)


def make_eps(arr, low: int, eps_bound: int | None = None) -> EpsLaurent:
    """EpsPoly when no negative eps power survives, else EpsLaurent."""
    arr = np.asarray(arr, dtype=object)
    if low >= 0:
        return EpsPoly(arr, low, eps_bound)
    neg = arr[: -low]
    if not np.any(neg != 0):
        return EpsPoly(arr[-low:], 0, eps_bound) if arr.shape[0] > -low else EpsPoly(
            _zeros(0, arr.shape[1]), 0, eps_bound)
    return EpsLaurent(arr, low, eps_bound)


def eps_split(f: EpsLaurent):
    """``(L_<0 f, L_>=0 f)``: principal part and non-negative part in eps."""
    K = f.t_order
    neg_rows = min(max(-f.low, 0), f.arr.shape[0])
    neg = EpsLaurent(f.arr[:neg_rows], f.low) if neg_rows else EpsLaurent(_zeros(0, K))
    pos = EpsPoly(f.arr[neg_rows:], f.low + neg_rows, f.eps_bound) if f.high >= 0 else EpsPoly(
        _zeros(0, K), 0, f.eps_bound)
    return neg, pos


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------

def dumps_series(s) -> str:
    """One exact ``a/b`` coefficient per line after an ``order K`` header.

    Laurent series add a ``valuation v`` line; their coefficients then run
    from ``t^v`` up to ``t^(K-1)``.
    """
    if isinstance(s, LaurentSeries):
        n = max(s.prec - s.valuation, 0)
        cs = list(s.coeffs) + [ZERO] * (n - len(s.coeffs))
        lines = [f"order {s.prec}", f"valuation {s.valuation}"] + [format_rational(c) for c in cs]
    else:
        lines = [f"order {s.order}"] + [format_rational(c) for c in s.coeffs]
    return "\n".join(lines) + "\n"


def loads_series(text: str):
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("order "):
        raise InvalidInputError("series text must start with 'order K'")
    K = int(lines[0].split()[1])
    if len(lines) > 1 and lines[1].startswith("valuation "):
        v = int(lines[1].split()[1])
        cs = [rational(x) for x in lines[2:]]
        if len(cs) != max(K - v, 0):
            raise InvalidInputError(f"expected {K - v} coefficients, found {len(cs)}")
        return LaurentSeries(cs, v, K)
    cs = [rational(x) for x in lines[1:]]
    if len(cs) != K:
        raise InvalidInputError(f"expected {K} coefficients, found {len(cs)}")
    return TruncSeries(cs)
