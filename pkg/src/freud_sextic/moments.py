"""Moments of the perturbed Freud weight.

Even moments eta_{2k}(t; sigma) are computed two ways:

* ``moment_series`` expands exp(-t(x^4 - x^2)) in powers of y = x^2 and
  integrates term by term against x^(2k+2 sigma+1) exp(-c x^6), giving
  Gamma-function terms.  Regrouping the double sum over (m, j) by the power
  l = 2m - j means the Taylor coefficients of exp(t y - t y^2) are computed
  once by a three-term recurrence, and the Gamma factors by Gamma(z+1) = z Gamma(z).
* ``moment_quadrature`` integrates the weight directly with tanh-sinh
  panels on [0, X], X chosen so the dropped tail is below tolerance.

Odd moments vanish by parity and are never computed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import mpmath
from mpmath import mp, mpf

from .errors import AccuracyError, PreconditionError
from .report import VerificationReport, make_report
from .weight import WeightParams, _mp, exact

MAX_SERIES_TERMS = 20000


@dataclass(frozen=True)
class MomentTable:
    """eta_{2k} for k = 0..K; ``values[k]`` is the 2k-th moment."""

    params: WeightParams
    values: tuple
    method: str
    est_error: mpf

    def __post_init__(self):
        if any(v <= 0 for v in self.values):
            raise PreconditionError("moment table must be positive")

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def moment(self, i: int) -> mpf:
        """Full moment sequence: mu_i = eta_i, zero for odd i."""
        return mpf(0) if i % 2 else self.values[i // 2]


# ---------------------------------------------------------------------------
# Series route


@lru_cache(maxsize=4096)
def _series_cached(c: Fraction, t: Fraction, sigma: Fraction, shift: int, dps: int, min_terms: int):
    with mp.workdps(dps):
        return _series(c, t, sigma, shift, min_terms)


def _series(c, t, sigma, shift, min_terms):
    """(1/3) sum_l a_l c^(-kappa_l/3) Gamma(kappa_l/3), kappa_l = sigma + shift + 1 + l.

    a_l are the Taylor coefficients of exp(t y - t y^2); b_l those of the
    majorant exp(|t| y + |t| y^2), so |a_l| <= b_l bounds every dropped term.
    Returns (value, tail bound, absolute sum) for cancellation accounting.
    """
    c, t, s = _mp(c), _mp(t), _mp(sigma)
    at = abs(t)
    tol = mpf(10) ** (-mp.dps)
    kap0 = s + shift + 1
    # G[l] = c^(-kappa/3) Gamma(kappa/3); only three Gamma evaluations needed
    G = [c ** (-(kap0 + l) / 3) * mpmath.gamma((kap0 + l) / 3) for l in range(3)]
    a_prev, a = mpf(0), mpf(1)
    b_prev, b = mpf(0), mpf(1)
    total = a * G[0]
    abs_total = abs(total)
    prev_major = b * G[0]
    small_run = 0
    for l in range(1, MAX_SERIES_TERMS):
        if l + 2 >= len(G):
            kap = kap0 + l - 1
            G.append(G[l - 1] * (kap / 3) / c)
        a_prev, a = a, (t * a - 2 * t * a_prev) / l
        b_prev, b = b, (at * b + 2 * at * b_prev) / l
        if at == 0:
            return total / 3, mpf(0), abs_total / 3
        term = a * G[l]
        major = b * G[l]
        total += term
        abs_total += abs(term)
        ratio = major / prev_major if prev_major else mpf(0)
        prev_major = major
        if l >= min_terms and ratio < mpf(1) / 2 and major <= tol * abs(total):
            small_run += 1
            if small_run >= 3:
                tail = major * ratio / (1 - ratio)
                return total / 3, tail / 3, abs_total / 3
        else:
            small_run = 0
    raise AccuracyError("moment series did not converge within the term budget",
                        achieved=prev_major)


def gamma_series(p: WeightParams, shift: int, terms: int = 0, extra_dps: int = 0):
    """Return (value, tail bound) of the Gamma series with kappa shifted by ``shift``.

    Works at ``p.ctx.dps + extra_dps`` and re-runs with more digits when the
    alternating terms cancel badly (negative t with large |t|).
    """
    dps = p.ctx.dps + extra_dps
    val, tail, abs_sum = _series_cached(p.c, p.t, p.sigma, shift, dps, terms)
    lost = int(mpmath.log10(abs_sum / abs(val))) if val else dps
    if lost > 5:
        val, tail, _ = _series_cached(p.c, p.t, p.sigma, shift, dps + lost + 5, terms)
    return val, tail


def moment_series(p: WeightParams, k: int, terms: int = 0) -> mpf:
    """eta_{2k}(t; sigma) from the Gamma series.

    ``terms`` is a minimum term count; the series is extended until the
    majorant tail is below the working precision.
    """
    if k < 0:
        raise PreconditionError("moment order must be nonnegative")
    return gamma_series(p, k, terms)[0]


# ---------------------------------------------------------------------------
# Quadrature route


def _truncation_point(c: float, t: float, power: float, digits: int, logscale: float = 0.0) -> float:
    """Smallest X >= 1 (on a coarse grid) with integrand below 10^-(digits+20) beyond X.

    For x >= 1 the integrand x^power exp(-[c x^6 + t(x^4 - x^2)]) is bounded by
    x^power exp(-c x^6 + |t| x^4), whose log is decreasing once c x^6 dominates.
    """
    target = (digits + 20) * math.log(10) + logscale
    X = 1.0
    while True:
        expo = c * X ** 6 - abs(t) * X ** 4 - power * math.log(X)
        slope = 6 * c * X ** 5 - 4 * abs(t) * X ** 3 - power / X
        if expo >= target and slope > 0:
            return X
        X *= 1.05


def _panel_quad(f, X, panels: int, dps: int):
    pts = [mpf(X) * i / panels for i in range(panels + 1)]
    with mp.workdps(dps):
        return mpmath.quad(f, pts, error=True, method="tanh-sinh")


def _adaptive_quad(f, X, tol, dps: int, budget: int = 64):
    panels = max(4, int(math.ceil(2 * X)))
    while True:
        val, err = _panel_quad(f, X, panels, dps)
        if val != 0 and err <= tol * abs(val):
            return val, err
        if panels * 2 > budget:
            raise AccuracyError(f"quadrature stalled at relative error {mpmath.nstr(err / abs(val), 5)}",
                                achieved=err)
        panels *= 2


@lru_cache(maxsize=1024)
def _quad_cached(c: Fraction, t: Fraction, sigma: Fraction, k: int, digits: int, qdigits: float, dps: int):
    cf, tf, sf = float(c), float(t), float(sigma)
    power = 2 * k + 2 * sf + 1
    X = _truncation_point(cf, tf, power, digits)
    with mp.workdps(dps):
        cm, tm, am = _mp(c), _mp(t), 2 * _mp(sigma) + 1 + 2 * k

        def f(x):
            if x == 0:
                return mpf(0)
            x2 = x * x
            return x ** am * mpmath.exp(-(cm * x2 ** 3 + tm * (x2 * x2 - x2)))

        tol = mpf(10) ** (-mpf(qdigits))
        val, err = _adaptive_quad(f, X, tol, dps)
        return 2 * val, 2 * err


def moment_quadrature(p: WeightParams, k: int, with_error: bool = False):
    """eta_{2k} = 2 int_0^inf x^(2k) W(x) dx by panelled tanh-sinh quadrature."""
    if k < 0:
        raise PreconditionError("moment order must be nonnegative")
    ctx = p.ctx
    val, err = _quad_cached(p.c, p.t, p.sigma, k, ctx.digits, ctx.quadrature_digits, ctx.dps + 10)
    return (val, err) if with_error else val


def moment_table(p: WeightParams, K: int, method: str = "series") -> MomentTable:
    if method == "series":
        vals, errs = zip(*(gamma_series(p, k) for k in range(K + 1)))
    elif method == "quadrature":
        vals, errs = zip(*(moment_quadrature(p, k, with_error=True) for k in range(K + 1)))
    else:
        raise PreconditionError(f"unknown moment method {method!r}")
    with p.ctx.workdps():
        est = max(e / v for e, v in zip(errs, vals))
    return MomentTable(p, tuple(vals), method, est)


def _moment(p: WeightParams, k: int, method: str, extra_dps: int = 0) -> mpf:
    if method == "series":
        return gamma_series(p, k, extra_dps=extra_dps)[0]
    if method == "quadrature":
        if extra_dps:
            ctx = p.ctx.with_digits(p.ctx.digits + extra_dps)
            return moment_quadrature(p.replace(ctx=ctx), k)
        return moment_quadrature(p, k)
    raise PreconditionError(f"unknown moment method {method!r}")


# ---------------------------------------------------------------------------
# Identities


def check_agreement(p: WeightParams, ks) -> VerificationReport:
    """Series vs quadrature, relative difference per k against tol_identity."""
    start = time.perf_counter()
    items = []
    with p.ctx.workdps():
        for k in _as_range(ks):
            s = moment_series(p, k)
            q = moment_quadrature(p, k)
            items.append({"label": f"k={k}", "residual": abs(s - q) / abs(s), "value": s})
    return make_report("moment_agreement", p.echo(), items, p.ctx.tol_identity, started=start)


def check_shift_identity(p: WeightParams, k, method: str = "series") -> VerificationReport:
    """eta_{2k}(t; sigma) against eta_0(t; sigma + k)."""
    start = time.perf_counter()
    items = []
    with p.ctx.workdps():
        for kk in _as_range(k):
            lhs = _moment(p, kk, method)
            rhs = _moment(p.replace(sigma=p.sigma + kk), 0, method)
            items.append({"label": f"k={kk}", "residual": abs(lhs - rhs) / abs(lhs)})
    return make_report("moment_shift", p.echo(), items, p.ctx.tol_identity, started=start)


_STENCILS = {
    # (offsets in units of h, weights, divisor exponent, constant divisor)
    1: ((1, -1), (1, -1), 2),
    2: ((1, 0, -1), (1, -2, 1), 1),
    3: ((2, 1, -1, -2), (1, -2, 2, -1), 2),
}


def derivative_formula(p: WeightParams, n: int, method: str = "series", extra_dps: int = 0):
    """sum_k (-1)^(n+k) C(n,k) eta_{4n-2k}, and the sum of |terms| as a scale."""
    terms = [(-1) ** (n + k) * comb(n, k) * _moment(p, 2 * n - k, method, extra_dps) for k in range(n + 1)]
    return mpmath.fsum(terms), mpmath.fsum(abs(x) for x in terms)


def check_derivative_identity(p: WeightParams, n: int, h=None, method: str = "series") -> VerificationReport:
    """Central difference of d^n eta_0 / dt^n against the moment combination.

    The difference quotient loses about n * log10(1/h) digits, so eta_0 is
    evaluated with that many extra digits.
    """
    if n not in _STENCILS:
        raise PreconditionError("derivative identity is checked for n = 1, 2, 3")
    start = time.perf_counter()
    ctx = p.ctx
    h = Fraction(1, 10 ** (ctx.digits // 4)) if h is None else exact(h)
    extra = n * int(math.ceil(-math.log10(h))) + 10
    offsets, weights, div = _STENCILS[n]
    with ctx.workdps(extra):
        vals = [_moment(p.replace(t=p.t + o * h), 0, method, extra) for o in offsets]
        fd = mpmath.fsum(w * v for w, v in zip(weights, vals)) / (div * _mp(h) ** n)
        exact_val, scale = derivative_formula(p, n, method, extra)
        resid = abs(fd - exact_val) / scale
        tol = max(_mp(h) ** 2, ctx.tol_identity)
    items = [{"label": f"n={n}", "residual": resid, "fd": fd, "formula": exact_val}]
    notes = [f"h={h}", f"method={method}"]
    return make_report("moment_derivative", p.echo(), items, tol, notes=notes, started=start)


def airy_moment(p: WeightParams, i: int, j: int, which: str, method: str = "series") -> mpf:
    """int_0^inf xi^(i+j) w(xi) d xi for w = w1 or w2.

    Series form: the same Gamma series as eta_{2m} with m = i + j (w1) or
    i + j + 1 (w2).  Quadrature form integrates in xi directly.
    """
    if which not in ("w1", "w2"):
        raise PreconditionError(f"which must be 'w1' or 'w2', got {which!r}")
    m = i + j + (1 if which == "w2" else 0)
    if method == "series":
        return gamma_series(p, m)[0]
    if method == "quadrature":
        ctx = p.ctx
        return _airy_quad_cached(p.c, p.t, p.sigma, m, ctx.digits, ctx.quadrature_digits, ctx.dps + 10)
    raise PreconditionError(f"unknown method {method!r}")


@lru_cache(maxsize=1024)
def _airy_quad_cached(c, t, sigma, m, digits, qdigits, dps):
    cf, tf, sf = float(c), float(t), float(sigma)
    # bound for xi >= 1 in terms of x = sqrt(xi): same decay as the x-integrand
    X = _truncation_point(cf, tf, 2 * m + 2 * sf + 1, digits) ** 2
    with mp.workdps(dps):
        cm, tm, pw = _mp(c), _mp(t), _mp(sigma) + m

        def f(xi):
            if xi == 0:
                return mpf(0)
            return xi ** pw * mpmath.exp(-(cm * xi ** 3 + tm * (xi * xi - xi)))

        tol = mpf(10) ** (-mpf(qdigits))
        val, _ = _adaptive_quad(f, X, tol, dps)
        return val


def _as_range(ks):
    return [ks] if isinstance(ks, int) else list(ks)
