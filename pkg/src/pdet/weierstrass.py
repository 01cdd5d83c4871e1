"""Formal Weierstrass preparation ``q(eps) = w(eps) * q_inv(eps)``.

``q`` is a power series in eps over ``Q[[t]]/(t^K)`` whose coefficients
``q_0 .. q_{n-1}`` vanish at ``t = 0`` while ``q_n(0) != 0``. Then there is
a unique monic ``w = eps^n - w_1 eps^(n-1) + ... + (-1)^n w_n`` with every
``w_i(0) = 0`` and a unit ``q_inv``. Two independent algorithms are given:

* ``weierstrass_iterative`` solves the coefficient equations of the
  product one t-adic digit per round;
* ``weierstrass_split`` takes the principal part of ``log(q / eps^n)`` and
  exponentiates it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalBoundError, NotWeierstrassReadyError
from gmpy2 import mpq

from .series import EpsLaurent, EpsPoly, TruncSeries, eps_split, series_inv


@dataclass(frozen=True)
class WeierstrassData:
    """``w_coeffs = (w_1, ..., w_n)`` and the unit cofactor ``q_inv``."""

    w_coeffs: tuple
    q_inv: EpsPoly

    @property
    def n(self) -> int:
        return len(self.w_coeffs)

    def wpoly(self) -> EpsPoly:
        """``eps^n - w_1 eps^(n-1) + ... + (-1)^n w_n``."""
        n = self.n
        K = self.q_inv.t_order
        terms = {n: TruncSeries.one(K)}
        for i, w in enumerate(self.w_coeffs, start=1):
            terms[n - i] = w if i % 2 == 0 else -w
        return EpsPoly.from_terms(terms, K)

    def __eq__(self, other):
        if not isinstance(other, WeierstrassData):
            return NotImplemented
        return self.w_coeffs == other.w_coeffs and self.q_inv == other.q_inv


def _check_ready(q: EpsPoly, n: int):
    if n < 0:
        raise NotWeierstrassReadyError("n must be non-negative")
    for r in range(n):
        if q.coeff_row(r)[0]:
            raise NotWeierstrassReadyError(
                f"eps^{r} coefficient has nonzero constant term {q.coeff_row(r)[0]}")
    k0 = q.coeff_row(n)[0]
    if not k0:
        raise NotWeierstrassReadyError(f"eps^{n} coefficient vanishes at t = 0")
    return k0


def _default_bound(q: EpsPoly, n: int, K: int) -> int:
    E = q.eps_bound if q.eps_bound is not None else q.high
    return max(E, n)


def _w_from_poly(wp: EpsLaurent, n: int, K: int) -> tuple:
    out = []
    for i in range(1, n + 1):
        c = wp.coeff(n - i).truncate(K) if wp.t_order >= K else wp.coeff(n - i)
        out.append(c if i % 2 == 0 else -c)
    return tuple(out)


def weierstrass_split(q: EpsPoly, n: int, K: int | None = None) -> WeierstrassData:
    """Weierstrass data via ``eps^n exp(L_<0 log(q / (k_0 eps^n))``.

    ``k_0 = q_n(0)`` is divided out first and multiplied back into ``q_inv``.
    """
    K = q.t_order if K is None else min(K, q.t_order)
    q = q.truncate_t(K)
    k0 = _check_ready(q, n)
    E = _default_bound(q, n, K)
    cap = n * K                               # highest eps power that can still matter
    x = q.shift_eps(-n).scale(1 / k0).with_eps_bound(None) - 1
    x = x.truncate_eps(cap)
    # log(1 + x), truncated to eps powers <= cap
    log = x
    power = x
    for k in range(2, (n + 1) * K + 1):
        if power.is_zero():
            break
        power = power.mul(x, high=cap)
        term = power.scale(mpq(1, k))
        log = log - term if k % 2 == 0 else log + term
    y, _ = eps_split(log)
    # q_- = exp(y); y^k has t-valuation >= k
    q_minus = EpsLaurent.from_terms({0: 1}, K)
    power = EpsLaurent.from_terms({0: 1}, K)
    fact = 1
    for k in range(1, K):
        power = power.mul(y)
        if power.is_zero():
            break
        fact *= k
        q_minus = q_minus + power.scale(mpq(1, fact))
    if q_minus.low < -n:
        raise InternalBoundError(f"principal part has pole order {-q_minus.low} > n = {n}")
    w = q_minus.shift_eps(n)
    # q_inv = k0 * (q / (k0 eps^n)) * exp(-y)
    inv_minus = EpsLaurent.from_terms({0: 1}, K)
    power = EpsLaurent.from_terms({0: 1}, K)
    fact = 1
    for k in range(1, K):
        power = power.mul(-y)
        if power.is_zero():
            break
        fact *= k
        inv_minus = inv_minus + power.scale(mpq(1, fact))
    prod = q.with_eps_bound(None).shift_eps(-n).mul(inv_minus, high=E - n)
    neg, pos = eps_split(prod)
    if not neg.is_zero():
        raise InternalBoundError("cofactor has a principal part; eps bound too small")
    return WeierstrassData(_w_from_poly(w, n, K), pos.with_eps_bound(E - n))


def weierstrass_iterative(q: EpsPoly, n: int, K: int | None = None) -> WeierstrassData:
    """Weierstrass data by solving ``q = w * v`` coefficientwise, K rounds.

    With ``w = eps^n + sum_{d<n} c_d eps^d`` the product gives
    ``v_i = q_{n+i} - sum_d c_d v_{n+i-d}`` and
    ``c_r = (q_r - sum_{d<r} c_d v_{r-d}) / v_0``. Starting from ``c = 0``
    each round fixes one more power of t; a final round must be a fixpoint.
    """
    K = q.t_order if K is None else min(K, q.t_order)
    q = q.truncate_t(K)
    _check_ready(q, n)
    E = _default_bound(q, n, K)
    qs = [q.coeff(e) for e in range(E + 1)]
    L = E - n + 1
    zero = TruncSeries.zero(K)
    c = [zero] * n
    v = [zero] * L

    def sweep(c):
        nv = []
        for i in range(L):
            acc = qs[n + i]
            for d in range(n):
                j = n + i - d
                if j < L and not c[d].is_zero():
                    acc = acc - c[d] * v_prev[j]
            nv.append(acc)
        return nv

    for rnd in range(K + 2):
        v_prev = v
        v = sweep(c)
        inv0 = series_inv(v[0])
        nc = []
        for r in range(n):
            acc = qs[r]
            for d in range(r):
                acc = acc - nc[d] * v[r - d]
            nc.append(acc * inv0)
        if rnd >= K and nc == c and v == v_prev:
            break
        c = nc
    else:
        raise InternalBoundError("coefficient iteration did not reach a fixpoint")
    # c_d = (-1)^(n-d) w_(n-d)
    ws = [None] * n
    for d in range(n):
        ws[n - d - 1] = c[d] if (n - d) % 2 == 0 else -c[d]
    q_inv = EpsPoly.from_terms({i: s for i, s in enumerate(v)}, K, E - n)
    return WeierstrassData(tuple(ws), q_inv)


def reconstruct(data: WeierstrassData, E: int) -> EpsPoly:
    """``w * q_inv`` truncated at ``eps^E``."""
    return data.wpoly().with_eps_bound(E).mul(data.q_inv.with_eps_bound(E))
