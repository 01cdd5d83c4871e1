"""Congruence and conjecture harness with a persistent coefficient cache.

The normalization chain between the two pipelines lives here. ``ldet``
works with the bare operator while ``detp`` includes the prefactor
``c(t)``; since ``Det_p(c D) = c(t)^p Det_p(D) = c(t^p) Det_p(D)`` over F_p,
the target for orders below p is ``c(0) * ldet(D)``.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import sympy
from gmpy2 import mpq

from .diffop import DiffOperator, bundled_operator, detp_series
from .errors import BadPrimeError, InvalidInputError, NotPolynomialError
from .monodromy import lambda_elliptic, lambda_heun
from .regdet import ldet
from .rings import format_rational, is_prime, reduce_mod
from .series import LaurentSeries, TruncSeries, dumps_series, loads_series

CACHE_FORMAT = 1
CACHE_ENV = "PDET_CACHE_DIR"


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

class CoefficientCache:
    """One file per key: a JSON header line followed by the series text.

    Writes go to a temporary file in the same directory and are renamed
    into place, so readers only ever see complete files.
    """

    def __init__(self, root=None):
        if root is None:
            root = os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "pdet"
        self.root = Path(root)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    @staticmethod
    def key(op_digest: str, pipeline: str, order: int) -> str:
        raw = f"{op_digest}|{pipeline}|{order}|v{CACHE_FORMAT}"
        return hashlib.sha256(raw.encode()).hexdigest()

    def path(self, op_digest: str, pipeline: str, order: int) -> Path:
        return self.root / f"{self.key(op_digest, pipeline, order)}.series"

    def load(self, op_digest: str, pipeline: str, order: int):
        """``(series, header)`` or ``None`` when absent or unreadable."""
        p = self.path(op_digest, pipeline, order)
        try:
            text = p.read_text()
        except OSError:
            return None
        head, _, body = text.partition("\n")
        try:
            header = json.loads(head)
            if header.get("format") != CACHE_FORMAT or header.get("operator") != op_digest \
                    or header.get("pipeline") != pipeline:
                return None
            return loads_series(body), header
        except (ValueError, InvalidInputError):
            return None

    def store(self, op_digest: str, pipeline: str, order: int, series,
              certified_order: int | None = None) -> Path:
        header = {"format": CACHE_FORMAT, "operator": op_digest, "pipeline": pipeline,
                  "order": order,
                  "certified_order": order if certified_order is None else certified_order}
        text = json.dumps(header, sort_keys=True) + "\n" + dumps_series(series)
        self.root.mkdir(parents=True, exist_ok=True)
        dest = self.path(op_digest, pipeline, order)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".series")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, dest)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return dest

    def get_or_compute(self, op_digest: str, pipeline: str, order: int, compute):
        hit = self.load(op_digest, pipeline, order)
        with self._lock:
            if hit is not None:
                self.hits += 1
            else:
                self.misses += 1
        if hit is not None:
            return hit[0]
        value = compute()
        self.store(op_digest, pipeline, order, value)
        return value


_HEUN_ID = "heun-cf"
_ELLIPTIC_ID = "elliptic"


def _cached(cache, digest, pipeline, K, compute):
    if cache is None:
        return compute()
    return cache.get_or_compute(digest, pipeline, K, compute)


# ---------------------------------------------------------------------------
# sign chain and reference series
# ---------------------------------------------------------------------------

def normalized_ldet(D: DiffOperator, K: int, cache: CoefficientCache | None = None) -> TruncSeries:
    """``c(0) * L(D)``, the series ``Det_p(c D)`` is congruent to."""
    value = _cached(cache, D.digest(), "ldet", K, lambda: ldet(D, K))
    return value * D.prefactor.at_zero()


def h_series(K: int, cache: CoefficientCache | None = None) -> TruncSeries:
    """``h = lambda^2`` from the continued-fraction solver, through ``t^(K-1)``."""
    def compute():
        lam = lambda_heun(max(K, 2))
        return (lam * lam).to_trunc(K)
    return _cached(cache, _HEUN_ID, "h", K, compute)


def elliptic_target(K: int) -> TruncSeries:
    """``(lambda_elliptic - 1)^2`` through ``t^(K-1)``."""
    s = lambda_elliptic(K) - 1
    return s * s


@dataclass
class IdentityReport:
    name: str
    order: int
    left: TruncSeries
    right: TruncSeries

    @property
    def mismatches(self) -> list:
        return [k for k in range(self.order) if self.left[k] != self.right[k]]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order, "passed": self.passed,
                "mismatches": self.mismatches,
                "left": [format_rational(c) for c in self.left.coeffs],
                "right": [format_rational(c) for c in self.right.coeffs]}


def check_heun_identity(K: int, cache=None) -> IdentityReport:
    """``-L(D_0) = lambda^2`` exactly."""
    D0 = bundled_operator("d0")
    left = -_cached(cache, D0.digest(), "ldet", K, lambda: ldet(D0, K))
    return IdentityReport("-L(D0) = lambda_heun^2", K, left, h_series(K, cache))


def check_elliptic_identity(K: int, cache=None) -> IdentityReport:
    """``-L(-D_1) = (lambda_elliptic - 1)^2`` exactly."""
    D = bundled_operator("minus_d1")
    left = -_cached(cache, D.digest(), "ldet", K, lambda: ldet(D, K))
    return IdentityReport("-L(-D1) = (lambda_elliptic - 1)^2", K, left, elliptic_target(K))


# ---------------------------------------------------------------------------
# congruences
# ---------------------------------------------------------------------------

MATCH, MISMATCH, BLOCKED = "match", "mismatch", "denominator-blocked"


@dataclass
class CongruenceReport:
    """Per-prime comparison of ``detp`` with the reduced ``ldet`` series.

    ``order`` is ``min(K, ceil(p/2))``; ``statuses`` covers ``t^0 ..
    t^(order-1)``; ``bonus`` lists indices beyond ``order`` that match anyway.
    """

    prime: int
    order: int
    statuses: list = field(default_factory=list)
    detp: list = field(default_factory=list)
    reduced: list = field(default_factory=list)
    bonus: list = field(default_factory=list)
    skipped: str | None = None
    informational: bool = False
    elapsed: float = 0.0

    @property
    def mismatches(self) -> list:
        return [k for k, s in enumerate(self.statuses) if s != MATCH]

    @property
    def passed(self) -> bool:
        return self.skipped is None and not self.mismatches

    def to_json(self) -> dict:
        return {"prime": self.prime, "order": self.order, "passed": self.passed,
                "skipped": self.skipped, "informational": self.informational,
                "statuses": self.statuses, "mismatches": self.mismatches,
                "detp": self.detp, "reduced": self.reduced, "bonus_matches": self.bonus,
                "timing": {"elapsed_s": round(self.elapsed, 3)}}


def compared_order(K: int, p: int) -> int:
    return min(K, (p + 1) // 2)


def _reduce(c, p: int):
    try:
        return reduce_mod(c, p)
    except ZeroDivisionError:
        return None


def _one_prime(D: DiffOperator, p: int, target: TruncSeries, K: int, informational: bool):
    t0 = time.perf_counter()
    Kp = compared_order(K, p)
    rep = CongruenceReport(p, Kp, informational=informational)
    try:
        det = detp_series(D, p, K)
    except (BadPrimeError, NotPolynomialError) as exc:
        rep.skipped = str(exc)
        rep.elapsed = time.perf_counter() - t0
        return rep
    reduced = [_reduce(target[k], p) for k in range(K)]
    rep.detp = det
    rep.reduced = reduced
    for k in range(Kp):
        if reduced[k] is None:
            rep.statuses.append(BLOCKED)
        else:
            rep.statuses.append(MATCH if reduced[k] == det[k] else MISMATCH)
    rep.bonus = [k for k in range(Kp, K) if reduced[k] is not None and reduced[k] == det[k]]
    rep.elapsed = time.perf_counter() - t0
    return rep


def verify_congruence(D: DiffOperator, primes, K: int, *, include_two: bool = False,
                      target: TruncSeries | None = None, cache: CoefficientCache | None = None,
                      workers: int | None = None) -> list:
    """Compare ``detp(D, p)`` with ``c(0) L(D)`` mod p for every prime.

    Primes that are not admissible come back with ``skipped`` set. The
    result is sorted by prime.
    """
    if K < 1:
        raise InvalidInputError("K must be at least 1")
    primes = sorted(set(int(p) for p in primes))
    if target is None:
        target = normalized_ldet(D, K, cache)
    reports = {}
    todo = []
    for p in primes:
        if not is_prime(p):
            reports[p] = CongruenceReport(p, 0, skipped=f"{p} is not prime")
        elif p == 2 and not include_two:
            reports[p] = CongruenceReport(p, 0, skipped="p = 2 excluded by default")
        else:
            todo.append(p)
    if todo:
        with ThreadPoolExecutor(max_workers=workers or min(len(todo), os.cpu_count() or 1)) as ex:
            futs = {p: ex.submit(_one_prime, D, p, target, K, p == 2) for p in todo}
            for p, f in futs.items():
                reports[p] = f.result()
    return [reports[p] for p in primes]


def reports_table(reports) -> str:
    lines = [f"{'p':>5}  {'K':>3}  {'status':<8}  detail"]
    for r in reports:
        if r.skipped:
            status, detail = "skipped", r.skipped
        else:
            status = "pass" if r.passed else "FAIL"
            if r.informational:
                status += "*"
            detail = "detp = " + " ".join(str(x) for x in r.detp[:r.order])
            if r.mismatches:
                detail += f"; bad at {r.mismatches}"
            if r.bonus:
                detail += f"; bonus {r.bonus}"
        lines.append(f"{r.prime:>5}  {r.order:>3}  {status:<8}  {detail}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# denominator conjecture
# ---------------------------------------------------------------------------

ALPHA3_EXCEPTIONS = (6, 7, 8)


def conjectured_alpha(p: int, n: int) -> int:
    """Conjectured exponent of p in the denominator of ``h_n``."""
    if p == 2:
        return n - 1 + sympy.multiplicity(2, math.factorial(n))
    best = 0
    k = 1
    while p ** k <= n + 1:
        best = max(best, k * (n + 1 - p ** k))
        k += 1
    return best


def conjectured_sign(n: int) -> int | None:
    return (-1) ** n if n >= 6 else None


@dataclass
class CoefficientProfile:
    n: int
    sign: int
    alpha: dict
    conjectured: dict
    b: int
    extra_primes: dict

    @property
    def mismatched_primes(self) -> list:
        return [p for p in self.conjectured if self.alpha.get(p, 0) != self.conjectured[p]]

    @property
    def documented_exception(self) -> bool:
        return self.mismatched_primes == [3] and self.n in ALPHA3_EXCEPTIONS

    @property
    def sign_ok(self) -> bool:
        want = conjectured_sign(self.n)
        return want is None or want == self.sign

    @property
    def agrees(self) -> bool:
        return self.sign_ok and not self.extra_primes and \
            (not self.mismatched_primes or self.documented_exception)

    def to_json(self) -> dict:
        return {"n": self.n, "sign": self.sign,
                "alpha": {str(p): a for p, a in self.alpha.items()},
                "conjectured": {str(p): a for p, a in self.conjectured.items()},
                "b": str(self.b), "extra_primes": {str(p): a for p, a in self.extra_primes.items()},
                "mismatched_primes": self.mismatched_primes,
                "documented_exception": self.documented_exception, "agrees": self.agrees}


@dataclass
class DenominatorProfile:
    entries: list

    def __getitem__(self, n: int) -> CoefficientProfile:
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)

    @property
    def agrees(self) -> bool:
        return all(e.agrees for e in self.entries)

    def to_json(self) -> dict:
        return {"entries": [e.to_json() for e in self.entries], "agrees": self.agrees}


def denominator_profile(series, start: int = 2) -> DenominatorProfile:
    """Factor the denominators of ``series[start:]`` and compare with the conjecture.

    Zero coefficients are skipped. ``b`` is the absolute numerator.
    """
    if isinstance(series, LaurentSeries):
        series = series.to_trunc()
    out = []
    for n in range(max(start, 0), series.order):
        c = mpq(series[n])
        if not c:
            continue
        den = int(c.denominator)
        fac = sympy.factorint(den)
        small = [int(p) for p in sympy.primerange(2, n + 1)]
        alpha = {p: fac.get(p, 0) for p in small}
        extra = {int(p): e for p, e in fac.items() if p > n}
        conj = {p: conjectured_alpha(p, n) for p in small}
        out.append(CoefficientProfile(n, 1 if c > 0 else -1, alpha, conj,
                                      abs(int(c.numerator)), extra))
    return DenominatorProfile(out)


def is_power_of_two_denominators(series, upto: int) -> bool:
    return all(int(mpq(series[k]).denominator) & (int(mpq(series[k]).denominator) - 1) == 0
               for k in range(min(upto + 1, series.order)))
