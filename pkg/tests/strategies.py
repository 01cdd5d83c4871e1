"""Shared hypothesis strategies."""
from gmpy2 import mpq
from hypothesis import strategies as st

from pdet.series import EpsPoly, TruncSeries
from pdet.weierstrass import WeierstrassData

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def admissible(draw, max_n=3, max_K=8):
    """q = w * u with w a Weierstrass polynomial and u a unit (both random)."""
    n = draw(st.integers(1, max_n))
    K = draw(st.integers(1, max_K))
    ws = [TruncSeries([0] + draw(st.lists(small, min_size=K - 1, max_size=K - 1)), K)
          if K > 1 else TruncSeries.zero(1) for _ in range(n)]
    deg_u = draw(st.integers(0, 3))
    u = {}
    for e in range(deg_u + 1):
        cs = draw(st.lists(small, min_size=K, max_size=K))
        if e == 0 and cs[0] == 0:
            cs[0] = mpq(1)
        u[e] = TruncSeries(cs)
    E = n * (K + 1) + deg_u
    w = WeierstrassData(tuple(ws), EpsPoly.from_terms({0: 1}, K)).wpoly()
    q = w.mul(EpsPoly.from_terms(u, K)).with_eps_bound(E)
    return q, n, K, tuple(ws), EpsPoly.from_terms(u, K, E - n)
