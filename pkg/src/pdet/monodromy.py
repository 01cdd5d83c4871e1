"""Monodromy exponent series and a numeric monodromy check.

``lambda_heun`` solves the two-branch continued-fraction equation for the
Heun exponent ``lambda(t)`` by Newton iteration on Laurent series;
``lambda_elliptic`` is the closed form for the elliptic example;
``monodromy_numeric`` integrates an operator around a circle in the
x-plane at a fixed numeric parameter and returns the holonomy eigenvalues.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from . import _kernels
from .diffop import DiffOperator
from .errors import AccuracyFailureError, BadContourError, InvalidInputError, SolverFailureError
from .rings import to_fraction
from .series import LaurentSeries, TruncSeries


# ---------------------------------------------------------------------------
# forward-mode derivative over Laurent series
# ---------------------------------------------------------------------------

class _Dual:
    """``a + b*d`` with ``d^2 = 0``; carries a value and its derivative."""

    __slots__ = ("a", "b")

    def __init__(self, a: LaurentSeries, b: LaurentSeries):
        self.a, self.b = a, b

    def __add__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.a + o.a, self.b + o.b)
        return _Dual(self.a + o, self.b)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.a - o.a, self.b - o.b)
        return _Dual(self.a - o, self.b)

    def __rsub__(self, o):
        return _Dual(o - self.a, -self.b)

    def __mul__(self, o):
        if isinstance(o, _Dual):
            return _Dual(self.a * o.a, self.a * o.b + self.b * o.a)
        return _Dual(self.a * o, self.b * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, _Dual):
            inv = o.a.inverse()
            q = self.a * inv
            return _Dual(q, (self.b - q * o.b) * inv)
        inv = o.inverse() if isinstance(o, LaurentSeries) else 1 / mpq(o)
        return _Dual(self.a * inv, self.b * inv)

    def __rtruediv__(self, o):
        inv = self.a.inverse()
        q = o * inv
        return _Dual(q, -(q * self.b) * inv)


def _cf_branch(lam: _Dual, u: LaurentSeries, factors) -> _Dual:
    """``1 - u f_1/(1 - u f_2/(1 - ...))`` evaluated bottom-up."""
    tail = None
    for f in reversed(factors):
        num = f(lam) * u
        tail = 1 - num if tail is None else 1 - num / tail
    return tail


def heun_equation(lam: _Dual, u: LaurentSeries, depth: int) -> _Dual:
    """Left side minus right side of the continued-fraction equation."""
    upper = [(lambda x, k=k: (x + (k + 1)) * (x + (k + 1)) / ((x + k) * (x + (k + 2))))
             for k in range(1, depth + 1)]
    lower = [(lambda x, k=k: (x + (1 - k)) * (x + (1 - k)) / ((x - k) * (x + (2 - k))))
             for k in range(depth)]
    return _cf_branch(lam, u, upper) + _cf_branch(lam, u, lower) - 1


def _newton(K: int, depth: int, work: int, max_iter: int) -> LaurentSeries:
    W = work
    t = LaurentSeries([1], 1, W)
    one_plus = LaurentSeries([1, 1], 0, W)
    u = t / (one_plus * one_plus)
    lam = LaurentSeries([mpq(1, 2)], 1, W)
    one = LaurentSeries([1], 0, W)
    stable = 0
    for _ in range(max_iter):
        phi = heun_equation(_Dual(lam, one), u, depth)
        if phi.b.is_zero():
            raise SolverFailureError("derivative vanishes to working precision")
        step = phi.a / phi.b
        new = (lam - step).with_precision(W)
        known = min(step.prec, W)
        if all(new.coefficient(k) == lam.coefficient(k) for k in range(known)):
            stable += 1
            if stable >= 2 and known >= K:
                return new.truncate(K)
        else:
            stable = 0
        lam = new
    raise SolverFailureError(f"Newton iteration stagnated after {max_iter} steps")


def lambda_heun(K: int, depth: int | None = None) -> LaurentSeries:
    """``lambda(t) = t/2 + t^2/24 + ...`` through ``t^(K-1)``.

    Solved at two depths (``d`` and ``d + 2`` levels per branch) which must
    agree; ``d`` defaults to ``K + 2``.
    """
    if K < 2:
        raise InvalidInputError("K must be at least 2")
    d = K + 2 if depth is None else depth
    work = K + 4
    iters = 4 * K + 10
    a = _newton(K, d, work, iters)
    b = _newton(K, d + 2, work, iters)
    if a != b:
        raise SolverFailureError(f"depths {d} and {d + 2} disagree: {a} vs {b}")
    return a


def lambda_elliptic(K: int) -> TruncSeries:
    """``sum_k (2k)!^2 / (2^(4k) k!^4) t^k`` through ``t^(K-1)``."""
    if K < 1:
        raise InvalidInputError("K must be at least 1")
    out = []
    c = mpq(1)
    for k in range(K):
        out.append(c)
        # ratio of consecutive terms: ((2k+1)(2k+2) / (4 (k+1)^2))^2
        c = c * mpq((2 * k + 1) * (2 * k + 2), 4 * (k + 1) ** 2) ** 2
    return TruncSeries(out)


# ---------------------------------------------------------------------------
# numeric monodromy
# ---------------------------------------------------------------------------

def _rat_eval(num, den, z: complex) -> complex:
    n = sum(float(to_fraction(c)) * z ** k for k, c in enumerate(num))
    d = sum(float(to_fraction(c)) * z ** k for k, c in enumerate(den))
    return n / d


def operator_polys(D: DiffOperator, t_value: complex) -> np.ndarray:
    """``C[j]`` = ascending x-coefficients of the ``(d/dx)^j`` coefficient at ``t = t_value``.

    The prefactor is ignored: a scalar multiple does not change solutions.
    """
    # expand prod (x d - l) into sum c_{i,j} x^i d^j
    ops = {(0, 0): 1}
    for lk in D.l:
        new: dict = {}
        for (i, j), c in ops.items():
            for key, v in (((i, j), c * (i - lk)), ((i + 1, j + 1), c)):
                if v:
                    new[key] = new.get(key, 0) + v
        ops = new
    vals: dict = {key: complex(c) for key, c in ops.items()}
    for (i, k), f in D.coeffs.items():
        vals[(i, k)] = vals.get((i, k), 0) + _rat_eval(f.num, f.den, t_value)
    order = max(j for (_, j), v in vals.items() if v != 0)
    deg = max(i for (i, _) in vals)
    C = np.zeros((order + 1, deg + 1), dtype=np.complex128)
    for (i, j), v in vals.items():
        C[j, i] += v
    return C


@dataclass
class MonodromyResult:
    eigenvalues: list
    radius: float
    steps: int
    error_estimate: float
    matrix: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "radius": self.radius,
            "steps": self.steps,
            "error_estimate": self.error_estimate,
            "determinant": [complex(np.linalg.det(self.matrix)).real,
                            complex(np.linalg.det(self.matrix)).imag],
        }


def _match_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max distance after greedily pairing two eigenvalue lists."""
    rest = list(b)
    worst = 0.0
    for z in a:
        i = min(range(len(rest)), key=lambda k: abs(rest[k] - z))
        worst = max(worst, abs(rest[i] - z))
        rest.pop(i)
    return worst


def monodromy_numeric(D: DiffOperator, t_value: complex, radius: float, tol: float = 1e-10,
                      start_steps: int = 512, max_steps: int = 1 << 18) -> MonodromyResult:
    """Holonomy eigenvalues of ``D`` at ``t = t_value`` around ``|x| = radius``.

    RK4 in the angle with repeated step doubling until two successive
    resolutions agree within ``tol``.
    """
    if not radius > 0:
        raise BadContourError("radius must be positive")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    C = operator_polys(D, complex(t_value))
    lead = C[-1]
    scale = float(np.max(np.abs(lead))) or 1.0
    if _kernels.min_abs_on_circle(lead, radius) < 1e-9 * scale:
        raise BadContourError(f"leading coefficient vanishes near |x| = {radius}")
    steps = start_steps
    prev = None
    while steps <= max_steps:
        Y = _kernels.holonomy(C, radius, steps)
        ev = np.linalg.eigvals(Y)
        if prev is not None:
            err = _match_distance(ev, prev)
            if err < tol:
                ev = sorted(ev, key=lambda z: (round(cmath.phase(z), 12), abs(z)))
                return MonodromyResult(list(ev), float(radius), steps, float(err), Y)
        prev = ev
        steps *= 2
    raise AccuracyFailureError(f"no agreement within {tol} up to {max_steps} steps")


def lambda_at(series: LaurentSeries | TruncSeries, t_value: float) -> float:
    """Evaluate a truncated series numerically."""
    if isinstance(series, LaurentSeries):
        return sum(float(to_fraction(c)) * t_value ** (series.valuation + i)
                   for i, c in enumerate(series.coeffs))
    return sum(float(to_fraction(c)) * t_value ** k for k, c in enumerate(series.coeffs))


def expected_eigenvalues(lam: float) -> tuple:
    return cmath.exp(2j * math.pi * lam), cmath.exp(-2j * math.pi * lam)
