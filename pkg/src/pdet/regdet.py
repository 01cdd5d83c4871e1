"""Regularized determinant ``L(D)`` and the Weierstrass polynomial ``w(eps)``.

Two routes are provided:

* ``regularized_wpoly`` grows symmetric windows ``B_{-M,N}(eps)``, takes
  the Weierstrass polynomial of each window determinant and stops once two
  consecutive windows agree through ``t^(K-1)``;
* ``w_via_trace`` sums closed walks of the normalized matrix through a cut
  at ``-b``, applies ``t_eps`` to each walk product and exponentiates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .diffop import DiffOperator, _entry_array, _poly_eps, window_det
from .errors import InternalBoundError, InvalidInputError, NonConvergenceError, UnsupportedPoleError
from .rings import ZERO, format_rational
from .series import EpsLaurent, EpsPoly, TruncSeries, _zeros
from .weierstrass import weierstrass_split


# ---------------------------------------------------------------------------
# rational functions of eps with integer poles, and T_eps
# ---------------------------------------------------------------------------

def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] < b.shape[0]:
        a, b = b, a
    out = a.copy()
    out[: b.shape[0]] += b
    return out


def _pmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of eps-polynomials with t-series rows (arrays ``(deg+1, K)``)."""
    K = a.shape[1]
    if b.shape[1] != K:
        raise InvalidInputError("t-orders differ")
    out = _zeros(a.shape[0] + b.shape[0] - 1, K)
    for e, k in zip(*np.nonzero(a != 0)):
        out[e: e + b.shape[0], k:] += a[e, k] * b[:, : K - k]
    return out


class RationalFunctionEps:
    """``N(eps) / prod_c (eps - c)^(m_c)`` with integer poles ``c``.

    ``num`` is an array ``(deg+1, K)``: row ``e`` is the t-series multiplying
    ``eps^e``. The denominator is kept factored as ``{c: m_c}``.
    """

    __slots__ = ("num", "poles")

    def __init__(self, num, poles: dict):
        num = np.asarray(num, dtype=object)
        if num.ndim != 2:
            raise InvalidInputError("numerator must be a (deg+1, K) array")
        for c, mult in poles.items():
            if int(c) != c:
                raise UnsupportedPoleError(f"pole at non-integer point {c}")
            if mult < 0:
                raise InvalidInputError("pole multiplicities must be non-negative")
        self.num = num
        self.poles = {int(c): int(mult) for c, mult in poles.items() if mult}

    @classmethod
    def from_terms(cls, terms: dict, poles: dict, K: int) -> "RationalFunctionEps":
        deg = max(terms) if terms else 0
        num = _zeros(deg + 1, K)
        for e, s in terms.items():
            if e < 0:
                raise InvalidInputError("numerator must be a polynomial in eps")
            if isinstance(s, TruncSeries):
                num[e, : min(K, s.order)] = s.coeffs[:K]
            else:
                num[e, 0] = mpq(s)
        return cls(num, poles)

    @property
    def t_order(self) -> int:
        return self.num.shape[1]

    def t_valuation(self) -> int:
        cols = np.nonzero(np.any(self.num != 0, axis=0))[0]
        return int(cols[0]) if cols.size else self.t_order

    def __mul__(self, other: "RationalFunctionEps") -> "RationalFunctionEps":
        poles = dict(self.poles)
        for c, mult in other.poles.items():
            poles[c] = poles.get(c, 0) + mult
        return RationalFunctionEps(_pmul(self.num, other.num), poles)


def _taylor_at(num: np.ndarray, c: int, order: int) -> np.ndarray:
    """Rows ``0..order-1`` of ``N(c + u)`` as a polynomial in u."""
    deg = num.shape[0] - 1
    out = _zeros(order, num.shape[1])
    for s in range(min(order, deg + 1)):
        for e in range(s, deg + 1):
            coef = math.comb(e, s) * c ** (e - s)
            if coef:
                out[s] += coef * num[e]
    return out


def t_eps(f: RationalFunctionEps) -> EpsLaurent:
    """Drop the polynomial part and move every pole to ``eps = 0``.

    ``1/(eps - c)^j -> 1/eps^j`` for each integer ``c``; computed from the
    Laurent expansion of ``f`` at each pole.
    """
    K = f.t_order
    total = _zeros(0, K)
    terms: dict = {}
    for c, mc in f.poles.items():
        # N(c+u) * prod_{d != c} (c - d + u)^(-m_d), expanded to u^(mc-1)
        series = _taylor_at(f.num, c, mc)
        for d, md in f.poles.items():
            if d == c:
                continue
            delta = mpq(c - d)
            # (delta + u)^(-1) = sum_s (-1)^s u^s / delta^(s+1)
            inv = _zeros(mc, K)
            for s in range(mc):
                inv[s, 0] = (-1) ** s / delta ** (s + 1)
            for _ in range(md):
                series = _pmul(series, inv)[:mc]
        # principal part: sum_r series[mc - r] / u^r
        for r in range(1, mc + 1):
            row = series[mc - r]
            if np.any(row != 0):
                terms[-r] = terms.get(-r, np.full(K, ZERO, dtype=object)) + row
    if not terms:
        return EpsLaurent(total, 0)
    lo = min(terms)
    arr = _zeros(-lo, K)
    for e, row in terms.items():
        arr[e - lo] = row
    return EpsLaurent(arr, lo)


# ---------------------------------------------------------------------------
# window stabilization
# ---------------------------------------------------------------------------

@dataclass
class StabilizationReport:
    """Windows tried, the ``(w_1..w_n)`` snapshot of each, and the outcome."""

    windows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    converged: bool = False
    eps_bound: int = 0
    t_order: int = 0
    certified_order: int = 0

    def to_json(self) -> dict:
        return {
            "windows": [list(w) for w in self.windows],
            "snapshots": [[[format_rational(c) for c in s.coeffs] for s in snap]
                          for snap in self.snapshots],
            "converged": self.converged,
            "eps_bound": self.eps_bound,
            "t_order": self.t_order,
            "certified_order": self.certified_order,
        }


def _agree_prefix(a: tuple, b: tuple, K: int) -> int:
    """Number of leading t-orders on which two snapshots agree."""
    for k in range(K):
        if any(x.coeffs[k] != y.coeffs[k] for x, y in zip(a, b)):
            return k
    return K


def default_eps_bound(D: DiffOperator, K: int) -> int:
    return D.n * (K + 1)


def window_schedule(D: DiffOperator, K: int):
    """Symmetric window half-widths tried by ``regularized_wpoly``."""
    start = D.max_abs_l + D.n + 2
    step = max(2, D.m)
    limit = K * D.m * (D.m + 1) + D.max_abs_l + D.n + 4
    M = start
    while M <= limit:
        yield M
        M += step
    if M - step < limit:
        yield limit


def regularized_wpoly(D: DiffOperator, K: int, eps_bound: int | None = None,
                      extra_checks: int = 0):
    """Weierstrass polynomial of ``det B_{-M,M}(eps)`` in the window limit.

    Returns ``(w, report)`` with ``w`` the monic degree-n ``EpsPoly``.
    ``extra_checks`` further windows are evaluated after convergence and
    must agree as well.
    """
    if K < 1:
        raise InvalidInputError("K must be at least 1")
    E = default_eps_bound(D, K) if eps_bound is None else eps_bound
    report = StabilizationReport(eps_bound=E, t_order=K)
    prev = best = None
    remaining = None
    for M in window_schedule(D, K):
        wd = window_det(D, -M, M, E, K, normalize=True)
        data = weierstrass_split(wd.value, D.n, K)
        snap = data.w_coeffs
        report.windows.append((-M, M))
        report.snapshots.append(snap)
        if prev is not None:
            agree = _agree_prefix(prev, snap, K)
            if remaining is not None:
                if agree < K:
                    raise NonConvergenceError(
                        f"window ({-M}, {M}) disagrees after apparent convergence")
                remaining -= 1
            elif agree == K:
                report.converged = True
                best = data
                remaining = extra_checks
            else:
                report.certified_order = agree
            if remaining == 0:
                break
        prev = snap
    if not report.converged:
        raise NonConvergenceError(
            f"no stabilization up to window {report.windows[-1]} at K = {K}; "
            "check the smallness of the coefficients")
    if remaining:
        raise NonConvergenceError("window schedule exhausted during extra checks")
    report.certified_order = K
    return best.wpoly(), report


def ldet(D: DiffOperator, K: int, eps_bound: int | None = None, with_report: bool = False):
    """``L(D) = (-1)^n w(0) = w_n`` through ``t^(K-1)``."""
    w, report = regularized_wpoly(D, K, eps_bound)
    value = w.coeff(0)
    if D.n % 2:
        value = -value
    return (value, report) if with_report else value


def wpoly_coeffs(w: EpsPoly, n: int) -> list:
    """``(w_1, ..., w_n)`` read off ``eps^n - w_1 eps^(n-1) + ...``."""
    return [w.coeff(n - i) * (-1) ** i for i in range(1, n + 1)]


# ---------------------------------------------------------------------------
# trace route
# ---------------------------------------------------------------------------

def _normalized_entry(D: DiffOperator, i: int, j: int, K: int):
    """``a_ij - delta_ij`` with ``a_ij = b_ij / prod_k (j + eps - l_k)``."""
    deg = max(D.n, D.m)
    arr = _entry_array(D, i, j, deg, K)
    if arr is None:
        return None
    if i == j:
        diag = _poly_eps([j - lk for lk in D.l])
        for e, c in enumerate(diag):
            arr[e, 0] -= c
        if not np.any(arr != 0):
            return None
    poles: dict = {}
    for lk in D.l:
        poles[lk - j] = poles.get(lk - j, 0) + 1
    f = RationalFunctionEps(arr, poles)
    return f, f.t_valuation()


def w_via_trace(D: DiffOperator, K: int, b: int | None = None) -> EpsPoly:
    """``eps^n exp T_eps(sum of closed walks with maximum -b)``.

    Walks run over indices ``<= -b`` with steps ``j - i <= m``; a walk of
    length k rooted at ``-b`` with r visits to ``-b`` has weight
    ``(-1)^(k-1) / r``, which counts every cyclic rotation once. Branches
    are cut when the accumulated t-valuation plus the up-steps still
    needed to return reach K.
    """
    if b is None:
        b = D.max_abs_l + 1
    if b <= D.max_abs_l:
        raise InvalidInputError(f"b = {b} must exceed max |l| = {D.max_abs_l}")
    n, m = D.n, D.m
    if D.is_unperturbed():
        return EpsPoly.from_terms({n: 1}, K)
    cap = K * (m + 1)
    root = -b
    low_bw = D.lower_bandwidth
    cache: dict = {}

    def entry(i, j):
        key = (i, j)
        if key not in cache:
            cache[key] = _normalized_entry(D, i, j, K)
        return cache[key]

    acc = EpsLaurent(_zeros(0, K), 0)
    # DFS stack items: (position, length, visits to root, valuation, product)
    stack = [(root, 0, 1, 0, None)]
    while stack:
        pos, length, visits, val, prod = stack.pop()
        if length >= cap:
            # a branch this long must already be t-adically negligible
            raise InternalBoundError(f"walk length reached {cap} with valuation {val} < {K}")
        for nxt in range(pos - low_bw, min(pos + m, root) + 1):
            e = entry(pos, nxt)
            if e is None:
                continue
            f, v = e
            nval = val + v
            need = -(-(root - nxt) // m) if m else (0 if nxt == root else K)
            if nval + need >= K:
                continue
            nprod = f if prod is None else prod * f
            if nxt == root:
                weight = mpq((-1) ** length, visits)   # (-1)^(k-1) / r with k = length + 1
                acc = acc + t_eps(nprod).scale(weight)
                stack.append((nxt, length + 1, visits + 1, nval, nprod))
            else:
                stack.append((nxt, length + 1, visits, nval, nprod))
    # exp of a principal part whose coefficients are t-small
    result = EpsLaurent.from_terms({0: 1}, K)
    power = EpsLaurent.from_terms({0: 1}, K)
    fact = 1
    for k in range(1, K):
        power = power * acc
        if power.is_zero():
            break
        fact *= k
        result = result + power.scale(mpq(1, fact))
    w = result.shift_eps(n)
    if not isinstance(w, EpsPoly):
        raise InternalBoundError("trace route produced a pole in eps; walk sum incomplete")
    return w
