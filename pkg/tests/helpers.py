"""Tuple generators and independent numerical oracles shared by the tests."""
import math
import random

import mpmath
from hypothesis import strategies as st

from sobolev_oracle.params import INF, Q, EmbeddingParams, derive, sobolev_conjugate

DENS = (1, 2, 3, 4, 6)


def rq(rng, lo, hi):
    d = rng.choice(DENS)
    return Q(rng.randint(lo * d, hi * d), d)


def random_tuple(rng):
    n = rng.randint(1, 5)
    p = Q(1) + abs(rq(rng, 0, 5))
    if n == 1:
        r = rq(rng, 0, 12)
        if r <= 0:
            r = Q(1, rng.choice(DENS) + 1)
    else:
        r = Q(1) + abs(rq(rng, 0, 11))
    return EmbeddingParams(n, rq(rng, -6, 6), rq(rng, -8, 8), rq(rng, -12, 12), p, r)


def random_tuples(count, seed=0):
    rng = random.Random(seed)
    return [random_tuple(rng) for _ in range(count)]


def boundary_variants(prm):
    """Tuples on the measure-zero boundaries derived from ``prm``."""
    n, a, b, c, p, r = prm.as_tuple()
    d = derive(prm)
    out = [prm.replace(c=d.c0), prm.replace(c=d.c1), prm.replace(b=p - n),
           prm.replace(b=a * p - n + p), prm.replace(c=-n), prm.replace(a=Q(0))]
    bd = prm.replace(b=a * p - n + p)
    out.append(bd.replace(c=derive(bd).c1))
    out.append(prm.replace(r=p))
    ps = sobolev_conjugate(p, n)
    if ps != INF:
        out.append(prm.replace(r=ps))
        big = prm.replace(r=ps + 1 + abs(r))
        dd = derive(big)
        out.append(big.replace(c=dd.c0 + (ps / big.r) * (dd.c1 - dd.c0)))
    return out


def boundary_set(count, seed=1):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        out.extend(boundary_variants(random_tuple(rng)))
    return out[:count]


def mp_norm(f, c, r, dim, area=None, lo=0, hi=mpmath.inf, points=()):
    """Oracle for ``(A int t^{c+N-1} |f|^r dt)^{1/r}`` by mpmath tanh-sinh."""
    mpmath.mp.dps = 30
    A = mpmath.mpf(2) * mpmath.pi ** (mpmath.mpf(dim) / 2) / mpmath.gamma(mpmath.mpf(dim) / 2) \
        if area is None else mpmath.mpf(area)
    g = lambda t: t ** (c + dim - 1) * abs(f(t)) ** r
    pts = [lo, *points, hi]
    val = mpmath.quad(g, pts)
    return float((A * val) ** (mpmath.mpf(1) / r))


def sphere_area(dim):
    return 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)


def rationals(lo, hi, max_den=6):
    return st.builds(lambda n, d: Q(n, d), st.integers(lo * 6, hi * 6), st.integers(1, max_den))


@st.composite
def param_tuples(draw):
    n = draw(st.integers(1, 6))
    p = Q(1) + draw(rationals(0, 5))
    if n == 1:
        r = draw(rationals(0, 10).filter(lambda x: x > 0))
    else:
        r = Q(1) + draw(rationals(0, 10))
    return EmbeddingParams(n, draw(rationals(-6, 6)), draw(rationals(-8, 8)),
                           draw(rationals(-12, 12)), p, r)
