"""Radial test profiles as small expression trees.

A profile ``f`` stands for the radial function ``u(x) = f(|x|)``.  Each node
knows three things about itself:

* its value and exact derivative in ``t`` (``evaluate`` / ``derivative``);
* a log-radius form used by the quadrature engine: with ``s = ln t``,
  ``f(e^s) = e^{E s} R(s)`` and ``f'(e^s) = e^{(E-1) s} D(s)`` where the
  exponent ``E`` is an exact rational kept apart from ``R`` so that power
  weights can be combined with it before anything is exponentiated;
* its behaviour near ``0+`` and ``inf`` as a finite sum of powers
  (:class:`Expansion`), valid beyond the log-radii ``s0`` / ``s1``.

Nodes are frozen dataclasses, so trees compare structurally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, gammaln

from .params import Q, EmbeddingParams, Rat, to_rational

ZERO_END = "0"
INF_END = "inf"


class DomainError(ValueError):
    pass


class AsymptoticsUnknown(ArithmeticError):
    """Leading terms cancel in a way the expansion algebra cannot resolve."""


# -- power expansions ----------------------------------------------------------

@dataclass(frozen=True)
class Expansion:
    """``sum(k * t**e)`` near one end of ``(0, inf)``.

    ``terms`` is sorted from dominant to subdominant (ascending exponents near
    0, descending near infinity).  When ``exact`` is false only the first
    term is known.  No terms means the function vanishes identically there.
    """

    end: str
    terms: tuple = ()
    exact: bool = True

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def leading(self):
        """``(exponent, coefficient)`` of the dominant term, or ``None``."""
        return self.terms[0] if self.terms else None


def _sorted_terms(end, mapping, scale):
    items = [(e, k) for e, k in mapping.items() if abs(k) > 1e-12 * scale]
    items.sort(key=lambda ek: ek[0], reverse=(end == INF_END))
    return tuple(items)


def _dominates(end, e1, e2) -> bool:
    return e1 < e2 if end == ZERO_END else e1 > e2


def exp_add(x: Expansion, y: Expansion) -> Expansion:
    if x.is_zero:
        return y
    if y.is_zero:
        return x
    if x.exact and y.exact:
        acc = {}
        scale = 0.0
        for e, k in x.terms + y.terms:
            acc[e] = acc.get(e, 0.0) + k
            scale = max(scale, abs(k))
        return Expansion(x.end, _sorted_terms(x.end, acc, scale), True)
    (ex, kx), (ey, ky) = x.leading(), y.leading()
    if ex == ey:
        k = kx + ky
        if abs(k) <= 1e-12 * max(abs(kx), abs(ky)):
            raise AsymptoticsUnknown("leading terms cancel")
        return Expansion(x.end, ((ex, k),), False)
    lead = (ex, kx) if _dominates(x.end, ex, ey) else (ey, ky)
    return Expansion(x.end, (lead,), False)


def exp_mul(x: Expansion, y: Expansion) -> Expansion:
    if x.is_zero or y.is_zero:
        return Expansion(x.end)
    if x.exact and y.exact:
        acc = {}
        scale = 0.0
        for ex, kx in x.terms:
            for ey, ky in y.terms:
                acc[ex + ey] = acc.get(ex + ey, 0.0) + kx * ky
                scale = max(scale, abs(kx * ky))
        return Expansion(x.end, _sorted_terms(x.end, acc, scale), True)
    (ex, kx), (ey, ky) = x.leading(), y.leading()
    return Expansion(x.end, ((ex + ey, kx * ky),), False)


def exp_scale(x: Expansion, factor: float) -> Expansion:
    if factor == 0:
        return Expansion(x.end)
    return Expansion(x.end, tuple((e, k * factor) for e, k in x.terms), x.exact)


def exp_pow(x: Expansion, sigma) -> Expansion:
    """``|f|**sigma``; exact only for a single-term expansion."""
    if x.is_zero:
        if sigma == 0:
            return Expansion(x.end, ((Q(0), 1.0),), True)
        return x
    e, k = x.leading()
    exact = x.exact and len(x.terms) == 1
    return Expansion(x.end, ((e * sigma, abs(k) ** float(sigma)),), exact)


def exp_abs(x: Expansion) -> Expansion:
    if x.is_zero:
        return x
    sign = 1.0 if x.leading()[1] > 0 else -1.0
    return exp_scale(x, sign)


def exp_deriv(x: Expansion) -> Expansion:
    if not x.exact:
        raise AsymptoticsUnknown("cannot differentiate a leading-term-only expansion")
    terms = tuple((e - 1, k * float(e)) for e, k in x.terms if e != 0)
    return Expansion(x.end, terms, True)


# -- nodes ---------------------------------------------------------------------

def _arr(t):
    return np.asarray(t, dtype=float)


def _smooth_step_arg(t):
    # argument y of zeta = expit(y) on (1/2, 1): y = 1/(2t-1) - 1/(2-2t)
    u = 2.0 - 2.0 * t
    v = 2.0 * t - 1.0
    with np.errstate(divide="ignore"):
        return 1.0 / v - 1.0 / u, u, v


def _zeta(t):
    t = _arr(t)
    out = np.where(t <= 0.5, 1.0, 0.0)
    mid = (t > 0.5) & (t < 1.0)
    if np.any(mid):
        y, _, _ = _smooth_step_arg(t[mid])
        out[mid] = expit(y)
    return out


def _one_minus_zeta(t):
    t = _arr(t)
    out = np.where(t >= 1.0, 1.0, 0.0)
    mid = (t > 0.5) & (t < 1.0)
    if np.any(mid):
        y, _, _ = _smooth_step_arg(t[mid])
        out[mid] = expit(-y)
    return out


def _zeta_prime(t):
    t = _arr(t)
    out = np.zeros_like(t)
    mid = (t > 0.5) & (t < 1.0)
    if np.any(mid):
        y, u, v = _smooth_step_arg(t[mid])
        sig = expit(y) * expit(-y)
        with np.errstate(over="ignore", invalid="ignore"):
            val = -2.0 * sig * (1.0 / (u * u) + 1.0 / (v * v))
        out[mid] = np.where(sig > 0, val, 0.0)
    return out


def _bump(x):
    x = _arr(x)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
    return out


def _bump_prime(x):
    x = _arr(x)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    w = 1.0 - xi * xi
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(1.0 - 1.0 / w) * (-2.0 * xi / (w * w))
    out[inside] = np.where(np.isfinite(val), val, 0.0)
    return out


def _weighted(E, s, R):
    """``e^{E s} R`` with ``0 * inf`` read as 0."""
    if E == 0:
        return R
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(float(E) * s) * R
    return np.where(R == 0, 0.0, val)


def _fmt(x):
    if isinstance(x, Rat):
        return str(x)
    return repr(float(x))


class Profile:
    """Base class for radial profile nodes."""

    kind = "Profile"

    # t-space
    def evaluate(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.evaluate(t)

    # log-radius form
    @property
    def E(self):
        return Q(0)

    def rest(self, s):
        raise NotImplementedError

    def drest(self, s):
        raise NotImplementedError

    # structure
    def log_breakpoints(self) -> tuple:
        return ()

    @property
    def s0(self) -> float:
        """Expansion at 0+ is exact for ``s < s0``."""
        return math.inf

    @property
    def s1(self) -> float:
        """Expansion at infinity is exact for ``s > s1``."""
        return -math.inf

    def expansion(self, end: str) -> Expansion:
        raise NotImplementedError

    def dexpansion(self, end: str) -> Expansion:
        return exp_deriv(self.expansion(end))

    @property
    def breakpoints(self) -> tuple:
        """Non-smooth points (and support edges) in ``t``."""
        return tuple(math.exp(s) for s in self.log_breakpoints())

    def to_json(self) -> dict:
        raise NotImplementedError

    # composition sugar
    def __mul__(self, other):
        return product(self, as_profile(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return add(self, as_profile(other))

    __radd__ = __add__


@dataclass(frozen=True)
class Power(Profile):
    exponent: Rat
    kind = "Power"

    def __post_init__(self):
        object.__setattr__(self, "exponent", to_rational(self.exponent))

    def evaluate(self, t):
        return _arr(t) ** float(self.exponent)

    def derivative(self, t):
        e = float(self.exponent)
        if e == 0:
            return np.zeros_like(_arr(t))
        return e * _arr(t) ** (e - 1.0)

    @property
    def E(self):
        return self.exponent

    def rest(self, s):
        return np.ones_like(_arr(s))

    def drest(self, s):
        return np.full_like(_arr(s), float(self.exponent))

    def expansion(self, end):
        return Expansion(end, ((self.exponent, 1.0),))

    def to_json(self):
        return {"type": self.kind, "exponent": _fmt(self.exponent)}


@dataclass(frozen=True)
class Constant(Profile):
    k: float
    kind = "Constant"

    def evaluate(self, t):
        return np.full_like(_arr(t), float(self.k))

    def derivative(self, t):
        return np.zeros_like(_arr(t))

    def rest(self, s):
        return np.full_like(_arr(s), float(self.k))

    def drest(self, s):
        return np.zeros_like(_arr(s))

    def expansion(self, end):
        if self.k == 0:
            return Expansion(end)
        return Expansion(end, ((Q(0), float(self.k)),))

    def to_json(self):
        return {"type": self.kind, "k": _fmt(self.k)}


_LOG_HALF = math.log(0.5)


@dataclass(frozen=True)
class Cutoff(Profile):
    """Smooth ``zeta``: 1 on ``(0, 1/2]``, 0 on ``[1, inf)``."""

    kind = "Cutoff"

    def evaluate(self, t):
        return _zeta(t)

    def derivative(self, t):
        return _zeta_prime(t)

    def rest(self, s):
        return _zeta(np.exp(_arr(s)))

    def drest(self, s):
        t = np.exp(_arr(s))
        return t * _zeta_prime(t)

    def log_breakpoints(self):
        return (_LOG_HALF, 0.0)

    @property
    def s0(self):
        return _LOG_HALF

    @property
    def s1(self):
        return 0.0

    def expansion(self, end):
        if end == ZERO_END:
            return Expansion(end, ((Q(0), 1.0),))
        return Expansion(end)

    def to_json(self):
        return {"type": self.kind}


@dataclass(frozen=True)
class OneMinusCutoff(Profile):
    kind = "OneMinusCutoff"

    def evaluate(self, t):
        return _one_minus_zeta(t)

    def derivative(self, t):
        return -_zeta_prime(t)

    def rest(self, s):
        return _one_minus_zeta(np.exp(_arr(s)))

    def drest(self, s):
        t = np.exp(_arr(s))
        return -t * _zeta_prime(t)

    def log_breakpoints(self):
        return (_LOG_HALF, 0.0)

    @property
    def s0(self):
        return _LOG_HALF

    @property
    def s1(self):
        return 0.0

    def expansion(self, end):
        if end == INF_END:
            return Expansion(end, ((Q(0), 1.0),))
        return Expansion(end)

    def to_json(self):
        return {"type": self.kind}


@dataclass(frozen=True)
class LogBump(Profile):
    """``g((ln t - center) / width)`` with ``g(x) = exp(1 - 1/(1 - x^2))`` on ``|x| < 1``."""

    center: float = 0.0
    width: float = 1.0
    kind = "LogBump"

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("width must be positive")

    def _x(self, s):
        return (_arr(s) - self.center) / self.width

    def evaluate(self, t):
        with np.errstate(divide="ignore"):
            return _bump(self._x(np.log(_arr(t))))

    def derivative(self, t):
        t = _arr(t)
        with np.errstate(divide="ignore"):
            x = self._x(np.log(t))
        return _bump_prime(x) / (self.width * t)

    def rest(self, s):
        return _bump(self._x(s))

    def drest(self, s):
        return _bump_prime(self._x(s)) / self.width

    def log_breakpoints(self):
        return (self.center - self.width, self.center + self.width)

    @property
    def s0(self):
        return self.center - self.width

    @property
    def s1(self):
        return self.center + self.width

    def expansion(self, end):
        return Expansion(end)

    def to_json(self):
        return {"type": self.kind, "center": _fmt(self.center), "width": _fmt(self.width)}


@dataclass(frozen=True)
class Indicator(Profile):
    """1 on ``(lo, hi]``, 0 elsewhere; the derivative is the a.e. one (zero)."""

    lo: float = 0.0
    hi: float = math.inf
    kind = "Indicator"

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ValueError("need 0 <= lo < hi")

    def evaluate(self, t):
        t = _arr(t)
        return ((t > self.lo) & (t <= self.hi)).astype(float)

    def derivative(self, t):
        return np.zeros_like(_arr(t))

    def rest(self, s):
        return self.evaluate(np.exp(_arr(s)))

    def drest(self, s):
        return np.zeros_like(_arr(s))

    def log_breakpoints(self):
        pts = []
        if self.lo > 0:
            pts.append(math.log(self.lo))
        if math.isfinite(self.hi):
            pts.append(math.log(self.hi))
        return tuple(pts)

    @property
    def s0(self):
        return math.log(self.lo) if self.lo > 0 else math.log(self.hi)

    @property
    def s1(self):
        if math.isfinite(self.hi):
            return math.log(self.hi)
        return math.log(self.lo) if self.lo > 0 else -math.inf

    def expansion(self, end):
        one = Expansion(end, ((Q(0), 1.0),))
        if end == ZERO_END:
            return Expansion(end) if self.lo > 0 else one
        return one if not math.isfinite(self.hi) else Expansion(end)

    def to_json(self):
        return {"type": self.kind, "lo": _fmt(self.lo), "hi": _fmt(self.hi)}


@dataclass(frozen=True)
class Product(Profile):
    left: Profile
    right: Profile
    kind = "Product"

    def evaluate(self, t):
        return self.left.evaluate(t) * self.right.evaluate(t)

    def derivative(self, t):
        f, g = self.left, self.right
        return f.derivative(t) * g.evaluate(t) + f.evaluate(t) * g.derivative(t)

    @property
    def E(self):
        return self.left.E + self.right.E

    def rest(self, s):
        return self.left.rest(s) * self.right.rest(s)

    def drest(self, s):
        f, g = self.left, self.right
        return f.drest(s) * g.rest(s) + f.rest(s) * g.drest(s)

    def log_breakpoints(self):
        return tuple(sorted(set(self.left.log_breakpoints() + self.right.log_breakpoints())))

    @property
    def s0(self):
        return min(self.left.s0, self.right.s0)

    @property
    def s1(self):
        return max(self.left.s1, self.right.s1)

    def expansion(self, end):
        return exp_mul(self.left.expansion(end), self.right.expansion(end))

    def dexpansion(self, end):
        f, g = self.left, self.right
        return exp_add(exp_mul(f.dexpansion(end), g.expansion(end)),
                       exp_mul(f.expansion(end), g.dexpansion(end)))

    def to_json(self):
        return {"type": self.kind, "children": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class Sum(Profile):
    left: Profile
    right: Profile
    kind = "Sum"

    def evaluate(self, t):
        return self.left.evaluate(t) + self.right.evaluate(t)

    def derivative(self, t):
        return self.left.derivative(t) + self.right.derivative(t)

    @property
    def E(self):
        if self.left.E == self.right.E:
            return self.left.E
        return Q(0)

    def rest(self, s):
        f, g = self.left, self.right
        if f.E == g.E:
            return f.rest(s) + g.rest(s)
        s = _arr(s)
        return _weighted(f.E, s, f.rest(s)) + _weighted(g.E, s, g.rest(s))

    def drest(self, s):
        f, g = self.left, self.right
        if f.E == g.E:
            return f.drest(s) + g.drest(s)
        s = _arr(s)
        return _weighted(f.E, s, f.drest(s)) + _weighted(g.E, s, g.drest(s))

    def log_breakpoints(self):
        return tuple(sorted(set(self.left.log_breakpoints() + self.right.log_breakpoints())))

    @property
    def s0(self):
        return min(self.left.s0, self.right.s0)

    @property
    def s1(self):
        return max(self.left.s1, self.right.s1)

    def expansion(self, end):
        return exp_add(self.left.expansion(end), self.right.expansion(end))

    def dexpansion(self, end):
        return exp_add(self.left.dexpansion(end), self.right.dexpansion(end))

    def to_json(self):
        return {"type": self.kind, "children": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class Scale(Profile):
    """``f(lam * t)``."""

    lam: float
    f: Profile
    kind = "Scale"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")

    @property
    def _shift(self):
        return math.log(self.lam)

    @property
    def _factor(self):
        return float(self.lam) ** float(self.f.E)

    def evaluate(self, t):
        return self.f.evaluate(self.lam * _arr(t))

    def derivative(self, t):
        return self.lam * self.f.derivative(self.lam * _arr(t))

    @property
    def E(self):
        return self.f.E

    def rest(self, s):
        return self._factor * self.f.rest(_arr(s) + self._shift)

    def drest(self, s):
        return self._factor * self.f.drest(_arr(s) + self._shift)

    def log_breakpoints(self):
        return tuple(x - self._shift for x in self.f.log_breakpoints())

    @property
    def s0(self):
        return self.f.s0 - self._shift

    @property
    def s1(self):
        return self.f.s1 - self._shift

    def expansion(self, end):
        x = self.f.expansion(end)
        return Expansion(end, tuple((e, k * self.lam ** float(e)) for e, k in x.terms), x.exact)

    def dexpansion(self, end):
        x = self.f.dexpansion(end)
        lam = self.lam
        return Expansion(end, tuple((e, k * lam * lam ** float(e)) for e, k in x.terms), x.exact)

    def to_json(self):
        return {"type": self.kind, "lambda": _fmt(self.lam), "children": [self.f.to_json()]}


def _other(end):
    return INF_END if end == ZERO_END else ZERO_END


@dataclass(frozen=True)
class KelvinImage(Profile):
    """``f(1/t)``."""

    f: Profile
    kind = "KelvinImage"

    def evaluate(self, t):
        return self.f.evaluate(1.0 / _arr(t))

    def derivative(self, t):
        t = _arr(t)
        return -self.f.derivative(1.0 / t) / (t * t)

    @property
    def E(self):
        return -self.f.E

    def rest(self, s):
        return self.f.rest(-_arr(s))

    def drest(self, s):
        return -self.f.drest(-_arr(s))

    def log_breakpoints(self):
        return tuple(sorted(-x for x in self.f.log_breakpoints()))

    @property
    def s0(self):
        return -self.f.s1

    @property
    def s1(self):
        return -self.f.s0

    def expansion(self, end):
        x = self.f.expansion(_other(end))
        return Expansion(end, tuple((-e, k) for e, k in x.terms), x.exact)

    def dexpansion(self, end):
        x = self.f.dexpansion(_other(end))
        return Expansion(end, tuple((-e - 2, -k) for e, k in x.terms), x.exact)

    def to_json(self):
        return {"type": self.kind, "children": [self.f.to_json()]}


@dataclass(frozen=True)
class PowerTransform(Profile):
    """``|f|**exponent`` for a nonnegative profile ``f``."""

    exponent: Rat
    f: Profile
    kind = "PowerTransform"

    def __post_init__(self):
        object.__setattr__(self, "exponent", to_rational(self.exponent))
        if not self.exponent > 0:
            raise ValueError("exponent must be positive")

    def _chain(self, val, dval):
        sig = float(self.exponent)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = sig * np.abs(val) ** (sig - 1.0) * dval
        return np.where(val == 0, 0.0, out)

    def evaluate(self, t):
        return np.abs(self.f.evaluate(t)) ** float(self.exponent)

    def derivative(self, t):
        return self._chain(self.f.evaluate(t), self.f.derivative(t))

    @property
    def E(self):
        return self.f.E * self.exponent

    def rest(self, s):
        return np.abs(self.f.rest(s)) ** float(self.exponent)

    def drest(self, s):
        return self._chain(self.f.rest(s), self.f.drest(s))

    def log_breakpoints(self):
        return self.f.log_breakpoints()

    @property
    def s0(self):
        return self.f.s0

    @property
    def s1(self):
        return self.f.s1

    def expansion(self, end):
        return exp_pow(self.f.expansion(end), self.exponent)

    def dexpansion(self, end):
        sig = self.exponent
        inner = exp_mul(exp_pow(self.f.expansion(end), sig - 1), self.f.dexpansion(end))
        return exp_scale(inner, float(sig))

    def to_json(self):
        return {"type": self.kind, "exponent": _fmt(self.exponent), "children": [self.f.to_json()]}


@dataclass(frozen=True)
class Abs(Profile):
    """``|f|``; assumes ``f`` keeps one sign near each end."""

    f: Profile
    kind = "Abs"

    def evaluate(self, t):
        return np.abs(self.f.evaluate(t))

    def derivative(self, t):
        return np.sign(self.f.evaluate(t)) * self.f.derivative(t)

    @property
    def E(self):
        return self.f.E

    def rest(self, s):
        return np.abs(self.f.rest(s))

    def drest(self, s):
        return np.sign(self.f.rest(s)) * self.f.drest(s)

    def log_breakpoints(self):
        return self.f.log_breakpoints()

    @property
    def s0(self):
        return self.f.s0

    @property
    def s1(self):
        return self.f.s1

    def expansion(self, end):
        return exp_abs(self.f.expansion(end))

    def dexpansion(self, end):
        x = self.f.expansion(end)
        if x.is_zero:
            return x
        sign = 1.0 if x.leading()[1] > 0 else -1.0
        return exp_scale(self.f.dexpansion(end), sign)

    def to_json(self):
        return {"type": self.kind, "children": [self.f.to_json()]}


# -- smart constructors --------------------------------------------------------

def as_profile(x) -> Profile:
    if isinstance(x, Profile):
        return x
    return Constant(float(x))


def power(exponent) -> Profile:
    e = to_rational(exponent)
    return Constant(1.0) if e == 0 else Power(e)


def product(*factors: Profile) -> Profile:
    """Product with constant folding and merging of pure powers."""
    k = 1.0
    e = Q(0)
    rest = []
    for f in factors:
        f = as_profile(f)
        if isinstance(f, Constant):
            k *= float(f.k)
        elif isinstance(f, Power):
            e += f.exponent
        else:
            rest.append(f)
    if k == 0:
        return Constant(0.0)
    parts = []
    if k != 1.0:
        parts.append(Constant(k))
    if e != 0:
        parts.append(Power(e))
    parts.extend(rest)
    if not parts:
        return Constant(1.0)
    out = parts[0]
    for f in parts[1:]:
        out = Product(out, f)
    return out


def add(*terms: Profile) -> Profile:
    terms = [as_profile(f) for f in terms]
    k = sum(float(f.k) for f in terms if isinstance(f, Constant))
    rest = [f for f in terms if not isinstance(f, Constant)]
    if k != 0 or not rest:
        rest.append(Constant(k))
    out = rest[0]
    for f in rest[1:]:
        out = Sum(out, f)
    return out


def scale(lam: float, f: Profile) -> Profile:
    """``t -> f(lam t)``; equivalently ``u -> u(lam x)``."""
    lam = float(lam)
    if lam == 1.0 or isinstance(f, Constant):
        return f
    return Scale(lam, f)


def cutoff() -> Profile:
    return Cutoff()


def counterexample_near_zero(params: EmbeddingParams) -> Profile:
    """``t^{-(c+N)/r} zeta(t)``: ``|x|^c |u|^r = |x|^{-N}`` near the origin."""
    return product(power(-(params.c + params.dim) / params.r), Cutoff())


def counterexample_near_infinity(params: EmbeddingParams) -> Profile:
    return product(power(-(params.c + params.dim) / params.r), OneMinusCutoff())


def log_bump_family(a, lam: float) -> Profile:
    """``t^{-a} g(lam ln t)``, i.e. ``t^a f`` is the bump in ``ln t`` dilated by ``lam``."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    return product(power(-to_rational(a)), LogBump(0.0, 1.0 / float(lam)))


_VALIDATION_GRID = np.exp(np.linspace(-30.0, 30.0, 2401))


def power_transform(f: Profile, exponent) -> Profile:
    """``f**exponent`` for ``f >= 0``; raises :class:`DomainError` otherwise."""
    sig = to_rational(exponent)
    if sig < 1:
        raise DomainError("exponent must be >= 1")
    if isinstance(f, Constant):
        if f.k < 0:
            raise DomainError("negative constant")
        return Constant(float(f.k) ** float(sig))
    if isinstance(f, Power):
        return Power(f.exponent * sig)
    with np.errstate(all="ignore"):
        vals = f.evaluate(_VALIDATION_GRID)
    if np.any(vals < 0):
        raise DomainError("profile takes negative values")
    if sig == 1:
        return f
    return PowerTransform(sig, f)


def kelvin_image(f: Profile) -> Profile:
    """``t -> f(1/t)``, the radial form of ``u(x / |x|^2)``."""
    if isinstance(f, KelvinImage):
        return f.f
    if isinstance(f, Power):
        return Power(-f.exponent)
    if isinstance(f, Constant):
        return f
    return KelvinImage(f)


# -- JSON round trip -----------------------------------------------------------

def _num(x: str) -> float:
    return float(x)


def profile_from_json(d: dict) -> Profile:
    kind = d["type"]
    kids = [profile_from_json(c) for c in d.get("children", [])]
    if kind == "Power":
        return Power(to_rational(d["exponent"]))
    if kind == "Constant":
        return Constant(_num(d["k"]))
    if kind == "Cutoff":
        return Cutoff()
    if kind == "OneMinusCutoff":
        return OneMinusCutoff()
    if kind == "LogBump":
        return LogBump(_num(d["center"]), _num(d["width"]))
    if kind == "Indicator":
        return Indicator(_num(d["lo"]), _num(d["hi"]))
    if kind == "Product":
        return Product(*kids)
    if kind == "Sum":
        return Sum(*kids)
    if kind == "Scale":
        return Scale(_num(d["lambda"]), kids[0])
    if kind == "KelvinImage":
        return KelvinImage(kids[0])
    if kind == "PowerTransform":
        return PowerTransform(to_rational(d["exponent"]), kids[0])
    if kind == "Abs":
        return Abs(kids[0])
    raise ValueError(f"unknown node type {kind!r}")


# -- separable functions -------------------------------------------------------

def sphere_area(dim: int) -> float:
    """``N omega_N``, the area of the unit sphere in ``R^N``."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class SeparableFunction:
    """``u(t sigma) = f(t) h(sigma)`` with closed-form angular data.

    ``angular_mean(s)`` is the mean of ``|h|^s`` over the unit sphere and
    ``angular_sup`` the supremum of ``|h|``.
    """

    radial: Profile
    angular_mean: Callable[[float], float] = field(compare=False)
    angular_sup: float
    name: str = "h"


def angular_constant(k: float = 1.0):
    k = abs(float(k))
    return (lambda s: k ** s), k, f"const({k:g})"


def angular_hemisphere():
    """Indicator of a half sphere: mean of ``|h|^s`` is 1/2 for every ``s``."""
    return (lambda s: 0.5), 1.0, "hemisphere"


def angular_coordinate_power(m: float, dim: int):
    """``h(sigma) = |sigma_1|^m``.

    The mean of ``|sigma_1|^q`` over ``S^{N-1}`` is
    ``Gamma(N/2) Gamma((q+1)/2) / (sqrt(pi) Gamma((N+q)/2))``.
    """
    m = float(m)

    def mean(s):
        q = m * s
        return math.exp(gammaln(dim / 2) + gammaln((q + 1) / 2)
                        - 0.5 * math.log(math.pi) - gammaln((dim + q) / 2))

    return mean, 1.0, f"|x1|^{m:g}"


def separable(radial: Profile, angular) -> SeparableFunction:
    mean, sup, name = angular
    return SeparableFunction(radial, mean, sup, name)


def radial_function(f: Profile) -> SeparableFunction:
    return separable(f, angular_constant(1.0))


def spherical_mean_power(u: SeparableFunction, s) -> Profile:
    """Radial profile of ``[(|u|^s)_S]^{1/s}``, i.e. ``|f| M_s^{1/s}``."""
    s = float(s)
    m = u.angular_mean(s)
    if not m > 0:
        raise DomainError("angular mean must be positive")
    f = u.radial
    mag = f if _nonnegative(f) else Abs(f)
    factor = m ** (1.0 / s)
    return mag if factor == 1.0 else product(Constant(factor), mag)


def _nonnegative(f: Profile) -> bool:
    with np.errstate(all="ignore"):
        vals = f.evaluate(_VALIDATION_GRID)
    return bool(np.all(np.nan_to_num(vals, nan=0.0) >= 0))
