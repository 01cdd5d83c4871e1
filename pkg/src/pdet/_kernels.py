"""Hot numeric kernels: mod-p polynomial Bareiss and the RK4 loop integrator.

Every kernel has two implementations with identical signatures: a numba
``@njit`` version operating on scalars in explicit loops and a pure numpy
version. The active backend is chosen at import time; set
``PDET_DISABLE_NUMBA=1`` to force the numpy path (numba missing has the
same effect).
"""
from __future__ import annotations

import functools
import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba as nb
except ImportError:  # pragma: no cover
    nb = None

_FLAG = os.environ.get("PDET_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = nb is not None and _FLAG not in ("1", "true", "yes", "on")

if nb is not None:
    njit = functools.partial(nb.njit, cache=True, nogil=True)
else:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# polynomials over F_p stored as int64 coefficient rows, lowest degree first
# ---------------------------------------------------------------------------

@njit
def _deg_nb(a):
    for d in range(a.shape[0] - 1, -1, -1):
        if a[d] != 0:
            return d
    return -1


@njit
def _mulsub_nb(a, b, c, d, p, out):
    # out = a*b - c*d mod p
    out[:] = 0
    da = _deg_nb(a)
    db = _deg_nb(b)
    if da >= 0 and db >= 0:
        for i in range(da + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(db + 1):
                out[i + j] = (out[i + j] + ai * b[j]) % p
    dc = _deg_nb(c)
    dd = _deg_nb(d)
    if dc >= 0 and dd >= 0:
        for i in range(dc + 1):
            ci = c[i]
            if ci == 0:
                continue
            for j in range(dd + 1):
                out[i + j] = (out[i + j] - ci * d[j]) % p


@njit
def _powmod_nb(a, e, p):
    r = 1
    a = a % p
    while e > 0:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


@njit
def _exactdiv_nb(num, den, p, out):
    # num is destroyed; raises if the division leaves a remainder
    out[:] = 0
    dd = _deg_nb(den)
    inv = _powmod_nb(den[dd], p - 2, p)
    dn = _deg_nb(num)
    while dn >= dd:
        q = (num[dn] * inv) % p
        s = dn - dd
        out[s] = q
        for j in range(dd + 1):
            num[s + j] = (num[s + j] - q * den[j]) % p
        dn = _deg_nb(num)
    if dn >= 0:
        raise ValueError("inexact polynomial division in Bareiss step")


@njit
def _bareiss_modp_nb(M, p):
    n = M.shape[0]
    L = M.shape[2]
    A = M.copy() % p
    sign = 1
    prev = np.zeros(L, dtype=np.int64)
    prev[0] = 1
    tmp = np.zeros(L, dtype=np.int64)
    res = np.zeros(L, dtype=np.int64)
    for k in range(n - 1):
        if _deg_nb(A[k, k]) < 0:
            piv = -1
            for r in range(k + 1, n):
                if _deg_nb(A[r, k]) >= 0:
                    piv = r
                    break
            if piv < 0:
                return np.zeros(L, dtype=np.int64)
            for c in range(n):
                for d in range(L):
                    x = A[k, c, d]
                    A[k, c, d] = A[piv, c, d]
                    A[piv, c, d] = x
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                _mulsub_nb(A[i, j], A[k, k], A[i, k], A[k, j], p, tmp)
                _exactdiv_nb(tmp, prev, p, res)
                A[i, j, :] = res
        prev[:] = A[k, k]
    out = A[n - 1, n - 1].copy()
    if sign < 0:
        for d in range(L):
            out[d] = (p - out[d]) % p
    return out


def _trim(a):
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if nz.size else a[:0]


def _polymul_np(a, b, p):
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    if p < (1 << 20):
        return np.convolve(a, b) % p
    return (np.convolve(a.astype(object), b.astype(object)) % p).astype(np.int64)


def _polysub_np(a, b, p):
    out = np.zeros(max(a.size, b.size), dtype=np.int64)
    out[: a.size] += a
    out[: b.size] -= b
    return _trim(out % p)


def _exactdiv_np(num, den, p):
    num = _trim(num.copy())
    den = _trim(den)
    dd = den.size - 1
    inv = pow(int(den[-1]), p - 2, p)
    out = np.zeros(max(num.size - dd, 1), dtype=np.int64)
    while num.size - 1 >= dd:
        s = num.size - 1 - dd
        q = (int(num[-1]) * inv) % p
        out[s] = q
        num[s:] = (num[s:] - (q * den.astype(object)) % p).astype(np.int64) % p
        num = _trim(num)
    if num.size:
        raise ValueError("inexact polynomial division in Bareiss step")
    return _trim(out)


def _bareiss_modp_np(M, p):
    n, _, L = M.shape
    A = [[_trim(M[i, j] % p) for j in range(n)] for i in range(n)]
    sign = 1
    prev = np.ones(1, dtype=np.int64)
    for k in range(n - 1):
        if A[k][k].size == 0:
            piv = next((r for r in range(k + 1, n) if A[r][k].size), None)
            if piv is None:
                return np.zeros(L, dtype=np.int64)
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _polysub_np(_polymul_np(A[i][j], A[k][k], p),
                                  _polymul_np(A[i][k], A[k][j], p), p)
                A[i][j] = _exactdiv_np(num, prev, p) if num.size else num
        prev = A[k][k]
    out = np.zeros(L, dtype=np.int64)
    last = A[n - 1][n - 1]
    out[: last.size] = last
    if sign < 0:
        out = (-out) % p
    return out


def bareiss_modp(M: np.ndarray, p: int) -> np.ndarray:
    """Determinant of an ``n x n`` matrix over ``F_p[t]``.

    ``M`` has shape ``(n, n, L)``: entry ``M[i, j, d]`` is the coefficient of
    ``t**d`` in row ``i``, column ``j``. ``L`` must exceed the degree of the
    determinant. Returns a length-``L`` coefficient row reduced mod ``p``.
    """
    M = np.ascontiguousarray(M, dtype=np.int64)
    if M.shape[0] == 0:
        out = np.zeros(max(M.shape[2], 1), dtype=np.int64)
        out[0] = 1
        return out
    if USE_NUMBA and p < (1 << 31):
        return _bareiss_modp_nb(M, np.int64(p))
    return _bareiss_modp_np(M, p)


# ---------------------------------------------------------------------------
# holonomy of y' = A(x) y around the circle |x| = r, companion form
# ---------------------------------------------------------------------------

@njit
def _horner_nb(c, x):
    acc = 0j
    for k in range(c.shape[0] - 1, -1, -1):
        acc = acc * x + c[k]
    return acc


@njit
def _rhs_nb(C, r, theta, Y, out):
    # dY/dtheta = i x A(x) Y with A the companion matrix of sum_j c_j(x) d^j
    N = C.shape[0] - 1
    x = r * np.exp(1j * theta)
    lead = _horner_nb(C[N], x)
    scale = 1j * x
    for col in range(N):
        for row in range(N - 1):
            out[row, col] = scale * Y[row + 1, col]
        acc = 0j
        for j in range(N):
            acc -= _horner_nb(C[j], x) * Y[j, col]
        out[N - 1, col] = scale * acc / lead


@njit
def _holonomy_nb(C, r, steps):
    N = C.shape[0] - 1
    Y = np.eye(N, dtype=np.complex128)
    k1 = np.empty((N, N), dtype=np.complex128)
    k2 = np.empty((N, N), dtype=np.complex128)
    k3 = np.empty((N, N), dtype=np.complex128)
    k4 = np.empty((N, N), dtype=np.complex128)
    h = 2.0 * np.pi / steps
    for s in range(steps):
        th = s * h
        _rhs_nb(C, r, th, Y, k1)
        _rhs_nb(C, r, th + 0.5 * h, Y + 0.5 * h * k1, k2)
        _rhs_nb(C, r, th + 0.5 * h, Y + 0.5 * h * k2, k3)
        _rhs_nb(C, r, th + h, Y + h * k3, k4)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return Y


def _holonomy_np(C, r, steps):
    N = C.shape[0] - 1
    rev = C[:, ::-1]

    def rhs(theta, Y):
        x = r * np.exp(1j * theta)
        vals = np.array([np.polyval(rev[j], x) for j in range(N + 1)])
        A = np.zeros((N, N), dtype=np.complex128)
        A[np.arange(N - 1), np.arange(1, N)] = 1.0
        A[N - 1, :] = -vals[:N] / vals[N]
        return 1j * x * (A @ Y)

    Y = np.eye(N, dtype=np.complex128)
    h = 2.0 * np.pi / steps
    for s in range(steps):
        th = s * h
        k1 = rhs(th, Y)
        k2 = rhs(th + 0.5 * h, Y + 0.5 * h * k1)
        k3 = rhs(th + 0.5 * h, Y + 0.5 * h * k2)
        k4 = rhs(th + h, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return Y


def holonomy(C: np.ndarray, radius: float, steps: int) -> np.ndarray:
    """Fundamental-matrix holonomy of ``sum_j c_j(x) g^(j) = 0`` around
    ``|x| = radius`` (counter-clockwise, starting at ``x = radius``).

    ``C[j]`` holds the coefficients of ``c_j`` in ascending powers of ``x``.
    The state vector is ``(g, g', ..., g^(N-1))``; classical RK4 in the angle.
    """
    C = np.ascontiguousarray(C, dtype=np.complex128)
    if USE_NUMBA:
        return _holonomy_nb(C, float(radius), int(steps))
    return _holonomy_np(C, float(radius), int(steps))


def min_abs_on_circle(c: np.ndarray, radius: float, samples: int = 4096) -> float:
    x = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.min(np.abs(np.polyval(np.asarray(c)[::-1], x))))
