"""Parameter tuples, exact derived quantities and the inversion duality.

Every quantity here is an exact rational (``gmpy2.mpq``, which compares and
hashes equal to :class:`fractions.Fraction`) so that the measure-zero case
boundaries (``c == c0``, ``b - p == -N``, ``theta == p*/r``) are decided
exactly.  The Sobolev conjugate ``p*`` is either a rational or ``math.inf``;
the two compare correctly, so ``r <= p_star`` and ``theta <= p_star / r``
need no special casing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

from gmpy2 import mpq as Q

INF = math.inf

Number = Union[int, float, str, Fraction, Decimal]
Rat = type(Q())
ExtReal = Union[Rat, float]


class InvalidParams(ValueError):
    """A parameter tuple violates a domain constraint."""

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


def to_rational(x: Number) -> Rat:
    """Convert *x* to an exact rational.

    Floats go through their shortest round-trip decimal representation, so
    ``0.1`` becomes ``1/10`` rather than the binary neighbour.  Strings accept
    ``"3"``, ``"-1/3"``, ``"0.25"`` and ``"1e-3"``.
    """
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not parameters")
    if isinstance(x, int):
        return Q(x)
    if isinstance(x, Rational):
        return Q(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Q(repr(x))
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise ValueError(f"non-finite value {x!r}")
        return Q(str(x))
    if isinstance(x, str):
        try:
            return Q(x.strip())
        except ValueError:
            raise ValueError(f"not a rational number: {x!r}") from None
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


_FIELDS = ("a", "b", "c", "p", "r")


@dataclass(frozen=True)
class EmbeddingParams:
    """The tuple ``(N, a, b, c, p, r)`` of one embedding question.

    Fields are normalised to exact rationals on construction (``dim`` stays an
    ``int``).  Construction does not validate; call :func:`validate`.
    """

    dim: int
    a: Rat
    b: Rat
    c: Rat
    p: Rat
    r: Rat

    def __post_init__(self):
        if (type(self.dim) is int and type(self.a) is Rat and type(self.b) is Rat
                and type(self.c) is Rat and type(self.p) is Rat and type(self.r) is Rat):
            return  # already normalised; the common case inside the engine
        if isinstance(self.dim, bool) or not isinstance(self.dim, (int, Rational)):
            raise InvalidParams("dim", "must be an integer")
        if to_rational(self.dim).denominator != 1:
            raise InvalidParams("dim", "must be an integer")
        object.__setattr__(self, "dim", int(self.dim))
        for name in _FIELDS:
            try:
                value = to_rational(getattr(self, name))
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise InvalidParams(name, str(exc)) from None
            object.__setattr__(self, name, value)

    @classmethod
    def of(cls, dim, a, b, c, p, r) -> "EmbeddingParams":
        return cls(dim, a, b, c, p, r)

    def replace(self, **changes) -> "EmbeddingParams":
        values = dict(dim=self.dim, a=self.a, b=self.b, c=self.c, p=self.p, r=self.r)
        values.update(changes)
        return EmbeddingParams(**values)

    def as_tuple(self):
        return (self.dim, self.a, self.b, self.c, self.p, self.r)


def _normalised(dim, a, b, c, p, r) -> EmbeddingParams:
    # skips __post_init__; only for values that are already an int and mpq's
    obj = object.__new__(EmbeddingParams)
    obj.__dict__.update(dim=dim, a=a, b=b, c=c, p=p, r=r)
    return obj


def validate(params: EmbeddingParams) -> None:
    """Raise :class:`InvalidParams` unless the tuple is admissible."""
    if params.dim < 1:
        raise InvalidParams("dim", "must be a positive integer")
    if params.p < 1:
        raise InvalidParams("p", "must satisfy 1 <= p < inf")
    if params.r <= 0:
        raise InvalidParams("r", "must satisfy 0 < r < inf")
    if params.dim >= 2 and params.r < 1:
        raise InvalidParams("r", "r < 1 is only admissible when dim == 1")


def sobolev_conjugate(p, dim: int) -> ExtReal:
    """``N p / (N - p)`` if ``p < N``, otherwise ``inf``."""
    p = to_rational(p)
    if p < dim:
        return dim * p / (dim - p)
    return INF


class Side(enum.Enum):
    SameSideStrict = "SameSideStrict"
    SameSideWithBoundary = "SameSideWithBoundary"
    OppositeStrict = "OppositeStrict"
    DegenerateEqual = "DegenerateEqual"


@dataclass(frozen=True)
class SideConfig:
    """Where ``a p - N`` and ``b - p`` sit relative to ``-N``.

    ``tag`` gives ``DegenerateEqual`` precedence when ``a p - N == b - p``;
    the underlying sign information stays available through ``sign`` (the
    sign of ``a (b - p + N)``) and the ``degenerate`` flag.
    """

    tag: Side
    sign: int
    degenerate: bool

    @property
    def same_side(self) -> bool:
        """Same side of ``-N``, touching ``-N`` allowed."""
        return self.sign >= 0

    @property
    def strictly_same_side(self) -> bool:
        return self.sign > 0

    @property
    def opposite(self) -> bool:
        return self.sign < 0


def side_config(params: EmbeddingParams) -> SideConfig:
    a, b, p, n = params.a, params.b, params.p, params.dim
    return _side_config(a, b - p + n, a * p - n == b - p)


def _side_config(a, bpn, degenerate) -> SideConfig:
    # bpn = b - p + N
    prod = a * bpn
    sign = (prod > 0) - (prod < 0)
    if degenerate:
        tag = Side.DegenerateEqual
    elif sign > 0:
        tag = Side.SameSideStrict
    elif sign == 0:
        # b - p == -N, or a == 0 (then a p - N == -N itself)
        tag = Side.SameSideWithBoundary
    else:
        tag = Side.OppositeStrict
    return SideConfig(tag, sign, degenerate)


@dataclass(frozen=True)
class StarQuantities:
    """Exponents of the transformed space reached through ``u -> |u|^(r/p*)``."""

    a_star: Rat
    b_star: Rat
    c_star1: Rat


@dataclass(frozen=True)
class DerivedQuantities:
    p_star: ExtReal
    c0: Rat
    c1: Rat
    theta_c: Optional[Rat]
    theta_minus_N: Optional[Rat]
    side_config: SideConfig
    star: Optional[StarQuantities]


def between(x, lo, hi, *, closed: bool) -> bool:
    """Is *x* in the interval with endpoints *lo* and *hi* (either order)?"""
    if lo > hi:
        lo, hi = hi, lo
    if closed:
        return lo <= x <= hi
    return lo < x < hi


def derive(params: EmbeddingParams) -> DerivedQuantities:
    n, a, b, c, p, r = params.as_tuple()
    n = Q(n)  # keeps the arithmetic mpq-only, which is measurably faster
    mn = -n
    bpn = b - p + n
    p_star = n * p / (n - p) if p < n else INF
    c0 = a * r - n
    c1 = r * bpn / p - n
    theta_c = None
    theta_mn = None
    if c0 != c1:
        gap = c1 - c0
        lo, hi = (c0, c1) if c0 < c1 else (c1, c0)
        if lo <= c <= hi:
            theta_c = (c - c0) / gap
        if lo < mn < hi:
            theta_mn = (mn - c0) / gap
    star = None
    if p_star != INF and r > p_star:
        s = r / p_star
        w = p_star / r
        star = StarQuantities(
            a_star=a * s,
            b_star=b + a * p * (s - 1),
            c_star1=w * c1 + (1 - w) * c0,
        )
    # a p - N == b - p  <=>  a p == b - p + N
    sides = _side_config(a, bpn, a * p == bpn)
    return DerivedQuantities(p_star, c0, c1, theta_c, theta_mn, sides, star)


def kelvin_dual(params: EmbeddingParams) -> EmbeddingParams:
    """Parameters seen through the inversion ``x -> x / |x|^2``."""
    n, p = params.dim, params.p
    two_n = Q(2 * n)
    return _normalised(n, -params.a, 2 * p - two_n - params.b, -two_n - params.c, p, params.r)


def scaling_exponents(params: EmbeddingParams):
    """Powers of ``lambda`` picked up by each norm under ``u -> u(lambda x)``.

    Returns ``(target, sup, grad)`` for ``||u||_{c,r}``, ``|| |x|^a u ||_inf``
    and ``||grad u||_{b,p}``.
    """
    n, a, b, c, p, r = params.as_tuple()
    return (-(c + n) / r, -a, -(b - p + n) / p)
