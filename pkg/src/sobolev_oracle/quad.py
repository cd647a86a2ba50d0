"""Weighted norms of radial and separable functions.

All integrals are computed after the substitution ``t = e^s``:

    int_0^inf t^{c+N-1} |f(t)|^r dt = int_R exp((c+N) s) |f(e^s)|^r ds.

With ``f(e^s) = e^{E s} R(s)`` the integrand is ``exp(beta s + r log|R(s)|)``
where ``beta = c + N + r E`` is exact.  Panels are summed in log space, so
neither huge nor tiny norms overflow.

Behaviour at the ends is settled symbolically from the profile's power
expansions before any panel is evaluated: the integral diverges at ``0+``
iff ``c + N + e r <= 0`` and at infinity iff ``c + N + e r >= 0``, where
``e`` is the leading exponent there.  Single-power tails are integrated in
closed form; other tails are extended numerically until the leading-term
estimate of what is left drops below the tolerance.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .params import Q, EmbeddingParams, scaling_exponents, to_rational
from .testfun import (
    INF_END,
    ZERO_END,
    AsymptoticsUnknown,
    Profile,
    SeparableFunction,
    sphere_area,
)

__all__ = [
    "QuadStatus", "DivergenceCertificate", "QuadResult", "NormTriple",
    "DerivativeView", "weighted_lr_norm", "weighted_sup_norm",
    "membership_norms", "scaling_exponents", "gauss_kronrod",
]

MAX_REFINEMENTS = 30
MAX_PANELS = 200_000


class QuadStatus(enum.Enum):
    Converged = "Converged"
    Divergent = "Divergent"
    MaxRefinementReached = "MaxRefinementReached"


@dataclass(frozen=True)
class DivergenceCertificate:
    """Why an integral or supremum is infinite.

    ``exponent`` is the symbolic leading power of the profile at ``end``;
    ``integrand_exponent`` is ``c + N + exponent * r`` for integrals (the
    power of ``t`` in ``t^{c+N} |f|^r``) or ``a + exponent`` for suprema.
    ``fitted_exponent`` is the local slope of ``log|f|`` against ``log t``
    measured numerically far out, as an independent sanity check.
    """

    end: str
    exponent: Q
    integrand_exponent: Q
    fitted_exponent: float


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error: float
    status: QuadStatus
    certificate: Optional[DivergenceCertificate] = None
    log_value: float = -math.inf

    @property
    def converged(self) -> bool:
        return self.status is QuadStatus.Converged

    @property
    def divergent(self) -> bool:
        return self.status is QuadStatus.Divergent


@dataclass(frozen=True)
class NormTriple:
    sup_norm: QuadResult
    grad_norm: QuadResult
    target_norm: QuadResult

    @property
    def all_converged(self) -> bool:
        return self.sup_norm.converged and self.grad_norm.converged and self.target_norm.converged


class DerivativeView(Profile):
    """Read-only view of ``f'`` with the interface the norm engine needs."""

    kind = "Derivative"

    def __init__(self, f: Profile):
        self.f = f

    def evaluate(self, t):
        return self.f.derivative(t)

    @property
    def E(self):
        return self.f.E - 1

    def rest(self, s):
        return self.f.drest(s)

    def log_breakpoints(self):
        return self.f.log_breakpoints()

    @property
    def s0(self):
        return self.f.s0

    @property
    def s1(self):
        return self.f.s1

    def expansion(self, end):
        return self.f.dexpansion(end)


# -- Gauss-Kronrod 7/15 ------------------------------------------------------

_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _panel_logs(logf, lo, hi):
    """Log-scaled K15 / G7 estimates on each panel ``[lo_i, hi_i]``.

    Returns ``(shift, k, g)`` with the panel integral ``~ e^shift * k``.
    """
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = mid[:, None] + half[:, None] * _NODES[None, :]
    with np.errstate(all="ignore"):
        h = logf(s.ravel()).reshape(s.shape)
    h = np.where(np.isnan(h), -np.inf, h)
    shift = np.max(h, axis=1)
    finite = np.isfinite(shift)
    safe = np.where(finite, shift, 0.0)
    with np.errstate(all="ignore"):
        vals = np.exp(h - safe[:, None])
    vals = np.where(finite[:, None], vals, 0.0)
    k = half * (vals @ _WK15)
    g = half * (vals @ _WG15)
    return np.where(finite, shift, -np.inf), k, g


def _combine(shift, vals):
    """``log(sum(e^shift_i * vals_i))`` for nonnegative ``vals``."""
    mask = (vals > 0) & np.isfinite(shift)
    if not np.any(mask):
        return -math.inf
    return float(logsumexp(shift[mask] + np.log(vals[mask])))


def gauss_kronrod(logf, edges, tol=1e-10, max_refinements=MAX_REFINEMENTS):
    """Integrate ``exp(logf(s))`` over consecutive ``edges``.

    Returns ``(log_value, rel_error, converged)``.  Panels whose error
    estimate exceeds their share of ``tol * total`` are bisected, all at once,
    for up to ``max_refinements`` rounds.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return -math.inf, 0.0, True
    shift, k, g = _panel_logs(logf, lo, hi)
    for _ in range(max_refinements + 1):
        err = np.abs(k - g)
        log_total = _combine(shift, k)
        if log_total == -math.inf:
            return -math.inf, 0.0, True
        log_err = _combine(shift, err)
        rel = math.exp(log_err - log_total) if log_err > -math.inf else 0.0
        if rel <= tol:
            return log_total, rel, True
        # split panels whose relative error share is too large
        with np.errstate(all="ignore"):
            share = np.where(err > 0, np.exp(shift + np.log(err) - log_total), 0.0)
        bad = share > tol / max(lo.size, 1)
        if not np.any(bad):
            bad = share >= share.max()
        if lo.size + bad.sum() > MAX_PANELS:
            break
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        ns, nk, ng = _panel_logs(logf, new_lo, new_hi)
        good = ~bad
        lo = np.concatenate([lo[good], new_lo])
        hi = np.concatenate([hi[good], new_hi])
        shift = np.concatenate([shift[good], ns])
        k = np.concatenate([k[good], nk])
        g = np.concatenate([g[good], ng])
    return log_total, rel, False


# -- helpers -----------------------------------------------------------------

def _edges(a, b, breakpoints, max_width=1.0, max_count=4096):
    """Panel edges on ``[a, b]`` through every breakpoint, width <= max_width."""
    knots = sorted({a, b, *[x for x in breakpoints if a < x < b]})
    out = [knots[0]]
    total = b - a
    width = max(max_width, total / max_count)
    for x0, x1 in zip(knots[:-1], knots[1:]):
        n = max(1, int(math.ceil((x1 - x0) / width)))
        out.extend(np.linspace(x0, x1, n + 1)[1:].tolist())
    return np.array(out)


def _split_point(f: Profile):
    """Interior region ``[lo, hi]`` outside which the expansions are exact."""
    s0, s1 = f.s0, f.s1
    if s0 <= s1:
        return s0, s1
    m = min(max(0.0, s1), s0)
    return m, m


def _fitted_exponent(f: Profile, end: str) -> float:
    s0, s1 = f.s0, f.s1
    if end == ZERO_END:
        base = min(s0, s1, 0.0) if math.isfinite(min(s0, s1)) else 0.0
        s = np.array([base - 20.0, base - 10.0])
    else:
        base = max(s0, s1, 0.0) if math.isfinite(max(s0, s1)) else 0.0
        s = np.array([base + 10.0, base + 20.0])
    with np.errstate(all="ignore"):
        logs = float(f.E) * s + np.log(np.abs(f.rest(s)))
    return float((logs[1] - logs[0]) / (s[1] - s[0]))


def _as_rational(x):
    return to_rational(x) if not isinstance(x, type(Q())) else x


def _log_single_tail(k, gamma, m, end, r):
    """``log int e^{gamma s} |k|^r ds`` over ``(-inf, m)`` or ``(m, inf)``."""
    g = float(gamma)
    base = r * math.log(abs(k))
    if end == ZERO_END:
        return base + g * m - math.log(g)
    return base + g * m - math.log(-g)


# -- weighted L^r norm -------------------------------------------------------

def weighted_lr_norm(f: Profile, c, r, dim: int, angular_factor: Optional[float] = None,
                     tol: float = 1e-8, s_bounds=None) -> QuadResult:
    """``(A int_0^inf t^{c+N-1} |f(t)|^r dt)^{1/r}`` with ``A = N omega_N`` by default.

    ``tol`` is relative to the returned norm.  With ``s_bounds = (lo, hi)``
    the integral is truncated to ``e^lo < t < e^hi`` and never diverges.
    """
    if not r > 0 or not tol > 0:
        raise ValueError("need r > 0 and tol > 0")
    c, r_q = _as_rational(c), _as_rational(r)
    rf = float(r_q)
    A = sphere_area(dim) if angular_factor is None else float(angular_factor)
    if A <= 0:
        raise ValueError("angular factor must be positive")
    beta = float(c + dim + r_q * f.E)
    itol = tol * rf  # relative error of the integral

    def logf(s):
        with np.errstate(all="ignore"):
            return beta * s + rf * np.log(np.abs(f.rest(s)))

    def finish(log_i, rel, ok):
        if log_i == -math.inf:
            return QuadResult(0.0, 0.0, QuadStatus.Converged, None, -math.inf)
        log_norm = (math.log(A) + log_i) / rf
        value = math.exp(log_norm) if log_norm < 709 else math.inf
        status = QuadStatus.Converged if ok else QuadStatus.MaxRefinementReached
        return QuadResult(value, value * rel / rf if math.isfinite(value) else math.inf,
                          status, None, log_norm)

    bps = f.log_breakpoints()
    if s_bounds is not None:
        lo, hi = float(s_bounds[0]), float(s_bounds[1])
        log_i, rel, ok = gauss_kronrod(logf, _edges(lo, hi, bps), itol / 4)
        return finish(log_i, rel, ok)

    try:
        exp0, expi = f.expansion(ZERO_END), f.expansion(INF_END)
    except AsymptoticsUnknown:
        return QuadResult(math.nan, math.inf, QuadStatus.MaxRefinementReached)

    # symbolic divergence test
    for end, ex in ((ZERO_END, exp0), (INF_END, expi)):
        if ex.is_zero:
            continue
        e, _ = ex.leading()
        gamma = c + dim + e * r_q
        if (end == ZERO_END and gamma <= 0) or (end == INF_END and gamma >= 0):
            cert = DivergenceCertificate(end, e, gamma, _fitted_exponent(f, end))
            return QuadResult(math.inf, 0.0, QuadStatus.Divergent, cert, math.inf)

    lo, hi = _split_point(f)
    parts = []
    rels = []
    ok_all = True
    if hi > lo:
        log_mid, rel, ok = gauss_kronrod(logf, _edges(lo, hi, bps), itol / 4)
        parts.append(log_mid)
        rels.append((log_mid, rel))
        ok_all &= ok
    for end, ex, m in ((ZERO_END, exp0, lo), (INF_END, expi, hi)):
        if ex.is_zero:
            continue
        e, k = ex.leading()
        gamma = c + dim + e * r_q
        if ex.exact and len(ex.terms) == 1:
            parts.append(_log_single_tail(k, gamma, m, end, rf))
            rels.append((parts[-1], 1e-15))
            continue
        # numeric tail: extend until the leading-term estimate is negligible
        log_acc = -math.inf
        width = 4.0
        near = m
        for _ in range(64):
            far = near - width if end == ZERO_END else near + width
            a_, b_ = (far, near) if end == ZERO_END else (near, far)
            log_chunk, rel, ok = gauss_kronrod(logf, _edges(a_, b_, bps), itol / 8)
            ok_all &= ok
            rels.append((log_chunk, rel))
            log_acc = np.logaddexp(log_acc, log_chunk)
            near = far
            width *= 2
            rest = _log_single_tail(k, gamma, near, end, rf)
            ref = np.logaddexp(log_acc, logsumexp(parts) if parts else -math.inf)
            if rest - ref < math.log(itol / 8):
                break
        else:
            ok_all = False
        parts.append(float(log_acc))
    if not parts:
        return finish(-math.inf, 0.0, True)
    log_i = float(logsumexp(parts))
    if log_i == -math.inf:
        return finish(log_i, 0.0, ok_all)
    rel_i = sum(math.exp(lp - log_i) * rl for lp, rl in rels if lp > -math.inf)
    return finish(log_i, rel_i, ok_all)


# -- weighted sup norm -------------------------------------------------------

def weighted_sup_norm(f: Profile, a) -> QuadResult:
    """``sup_t t^a |f(t)|`` by a log-grid scan plus bounded Brent refinement.

    Limits at the ends come from the leading powers: ``t^{a+e}`` blows up at
    ``0+`` when ``a + e < 0`` and at infinity when ``a + e > 0``.
    """
    a = _as_rational(a)
    try:
        exp0, expi = f.expansion(ZERO_END), f.expansion(INF_END)
    except AsymptoticsUnknown:
        return QuadResult(math.nan, math.inf, QuadStatus.MaxRefinementReached)
    limits = []
    for end, ex in ((ZERO_END, exp0), (INF_END, expi)):
        if ex.is_zero:
            continue
        e, k = ex.leading()
        power = a + e
        if (end == ZERO_END and power < 0) or (end == INF_END and power > 0):
            cert = DivergenceCertificate(end, e, power, _fitted_exponent(f, end))
            return QuadResult(math.inf, 0.0, QuadStatus.Divergent, cert, math.inf)
        if power == 0:
            limits.append(abs(k))
    delta = float(a + f.E)

    def logf(s):
        with np.errstate(all="ignore"):
            return delta * np.asarray(s, dtype=float) + np.log(np.abs(f.rest(s)))

    lo, hi = _split_point(f)
    # single-term tails are monotone, so only the region next to them matters;
    # multi-term tails get a generous extension
    pad_lo = 1.0 if (exp0.exact and len(exp0.terms) <= 1) else 60.0
    pad_hi = 1.0 if (expi.exact and len(expi.terms) <= 1) else 60.0
    knots = sorted({lo - pad_lo, hi + pad_hi,
                    *[x for x in f.log_breakpoints() if lo - pad_lo < x < hi + pad_hi]})
    grid = []
    for x0, x1 in zip(knots[:-1], knots[1:]):
        n = int(min(max(64, 40 * (x1 - x0)), 4000))
        grid.append(np.linspace(x0, x1, n + 1))
    s = np.unique(np.concatenate(grid))
    h = logf(s)
    h = np.where(np.isnan(h), -np.inf, h)
    best = float(np.max(h)) if h.size else -math.inf
    if best > -math.inf:
        # refine around the few highest local maxima
        idx = np.argsort(h)[::-1][:5]
        for i in idx:
            if not np.isfinite(h[i]):
                continue
            a_, b_ = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]
            if b_ <= a_:
                continue
            with np.errstate(invalid="ignore"):  # -inf at a support edge
                res = minimize_scalar(lambda x: -float(logf(np.array([x]))[0]),
                                      bounds=(a_, b_), method="bounded",
                                      options={"xatol": 1e-12 * max(1.0, abs(a_))})
            if np.isfinite(res.fun):
                best = max(best, -float(res.fun))
    for lim in limits:
        best = max(best, math.log(float(lim)))
    value = math.exp(best) if best < 709.0 else math.inf
    return QuadResult(value, 1e-12 * value, QuadStatus.Converged, None, best)


# -- the triple ----------------------------------------------------------------

def membership_norms(u: Union[Profile, SeparableFunction], params: EmbeddingParams,
                     tol: float = 1e-8) -> NormTriple:
    """Sup, gradient and target norms of ``u``.

    For a separable ``u(t sigma) = f(t) h(sigma)`` the angular means ``M_r``
    and ``M_p`` enter the integrals and ``sup |h|`` the supremum; the
    gradient norm is that of the radial derivative.
    """
    n, a, b, c, p, r = params.as_tuple()
    area = sphere_area(n)
    if isinstance(u, SeparableFunction):
        f = u.radial
        a_r, a_p = area * u.angular_mean(float(r)), area * u.angular_mean(float(p))
        hsup = float(u.angular_sup)
    else:
        f, a_r, a_p, hsup = u, area, area, 1.0
    sup = weighted_sup_norm(f, a)
    if hsup != 1.0 and sup.converged:
        v = sup.value * hsup
        sup = QuadResult(v, sup.abs_error * hsup, sup.status, None,
                         math.log(v) if v > 0 else -math.inf)
    grad = weighted_lr_norm(DerivativeView(f), b, p, n, a_p, tol)
    target = weighted_lr_norm(f, c, r, n, a_r, tol)
    return NormTriple(sup, grad, target)
