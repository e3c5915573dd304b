"""Recurrence coefficients gamma_n(t; sigma) of the symmetric three-term recurrence

    S_{n+1}(x) = x S_n(x) - gamma_n S_{n-1}(x),   S_0 = 1, gamma_0 = 0,

computed by a Stieltjes procedure on exact moments (authoritative), by
Hankel pivots (cross-check), and by forward solution of the string
equation (a verification subject; it is unstable).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from .errors import InstabilityError, PrecisionError, PreconditionError
from .moments import gamma_series
from .numerics import Poly, poly_mul
from .report import VerificationReport, make_report
from .weight import WeightParams, _mp, exact


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """gamma_0..gamma_N and norms Gamma_0..Gamma_N for one weight.

    ``dps`` is the decimal precision the values were computed at (requested
    digits plus guard digits); downstream checks evaluate at that precision.
    """

    params: WeightParams
    gammas: tuple
    norms: tuple
    method: str
    dps: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.gammas) - 1

    def gamma(self, n: int) -> mpf:
        if n <= 0:
            return mpf(0)
        if n > self.N:
            raise PreconditionError(f"gamma_{n} needed but table stops at N = {self.N}")
        return self.gammas[n]

    def xi(self, n: int) -> mpf:
        """Xi_n = gamma_n (gamma_{n-1} + gamma_n + gamma_{n+1})."""
        if n <= 0:
            return mpf(0)
        g = self.gamma
        return g(n) * (g(n - 1) + g(n) + g(n + 1))

    @staticmethod
    def omega(n: int) -> int:
        """Omega_n = (1 - (-1)^n) / 2."""
        return n % 2

    def workdps(self):
        return mp.workdps(self.dps)


def _guard(N: int) -> int:
    return 2 * N + 20


def _moments(p: WeightParams, K: int, extra: int):
    return [gamma_series(p, k, extra_dps=extra)[0] for k in range(K + 1)]


# ---------------------------------------------------------------------------
# Producers


def gamma_initial(p: WeightParams) -> mpf:
    """gamma_1 = eta_2 / eta_0."""
    with p.ctx.workdps():
        return gamma_series(p, 1)[0] / gamma_series(p, 0)[0]


def gamma_stieltjes(p: WeightParams, N: int) -> RecurrenceTable:
    """Stieltjes procedure: Gamma_n = <S_n, S_n> from moments, gamma_n = Gamma_n / Gamma_{n-1}.

    Each norm is an alternating sum whose cancellation is tracked as a
    condition number; if the guard digits do not cover it the whole table is
    recomputed with more digits.
    """
    if N < 1:
        raise PreconditionError("N must be at least 1")
    extra = _guard(N)
    for _ in range(3):
        table = _stieltjes(p.c, p.t, p.sigma, p.ctx, N, extra)
        lost = table.diagnostics["lost_digits"]
        if lost + 10 <= extra + 20:
            return table
        extra = int(lost) + 30
    raise PrecisionError("Stieltjes norms lost more digits than available", index=N,
                         required_digits=p.ctx.digits + extra)


@lru_cache(maxsize=128)
def _stieltjes(c, t, sigma, ctx, N, extra) -> RecurrenceTable:
    p = _params(c, t, sigma, ctx)
    dps = ctx.dps + extra
    with mp.workdps(dps):
        eta = _moments(p, N, extra)
        gammas = [mpf(0)]
        norms = [eta[0]]
        conds = [mpf(1)]
        S_prev, S = Poly((1,)), Poly((0, 1))
        for n in range(1, N + 1):
            sq = poly_mul(S, S).coeffs
            val = mpmath.fsum(sq[i] * eta[i // 2] for i in range(0, len(sq), 2))
            if val <= 0:
                raise PrecisionError(f"norm Gamma_{n} came out nonpositive; raise precision",
                                     index=n, required_digits=2 * ctx.digits)
            absval = mpmath.fsum(abs(sq[i]) * eta[i // 2] for i in range(0, len(sq), 2))
            norms.append(val)
            gammas.append(val / norms[n - 1])
            conds.append(absval / val)
            S_prev, S = S, Poly((0,) + S.coeffs) - gammas[n] * S_prev
        lost = float(mpmath.log10(max(conds)))
    return RecurrenceTable(p, tuple(gammas), tuple(norms), "stieltjes", dps,
                           {"condition": tuple(conds), "lost_digits": lost})


_PARAM_CACHE: dict = {}


def _params(c, t, sigma, ctx) -> WeightParams:
    key = (c, t, sigma, ctx)
    if key not in _PARAM_CACHE:
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _PARAM_CACHE[key] = WeightParams(c, t, sigma, ctx)
    return _PARAM_CACHE[key]


def _ldl_pivots(M):
    """Pivots of Gaussian elimination without pivoting = ratios of leading minors."""
    n = len(M)
    A = [row[:] for row in M]
    piv = []
    growth = []
    for k in range(n):
        d = A[k][k]
        piv.append(d)
        growth.append(abs(M[k][k]) / abs(d) if d != 0 else mpf("inf"))
        if d <= 0:
            return piv, growth
        for i in range(k + 1, n):
            f = A[i][k] / d
            for j in range(k + 1, n):
                A[i][j] -= f * A[k][j]
    return piv, growth


def gamma_hankel(p: WeightParams, N: int) -> RecurrenceTable:
    """gamma_n from leading principal minors of the moment matrix.

    With odd moments zero the Hankel matrix splits into the even block
    (eta_{2(i+j)}) and the odd block (eta_{2(i+j+1)}); the elimination pivots
    of those blocks are Gamma_{2l} and Gamma_{2l+1} respectively.
    """
    if N < 1:
        raise PreconditionError("N must be at least 1")
    extra = 3 * N + 20
    for _ in range(3):
        try:
            return _hankel(p, N, extra)
        except PrecisionError:
            extra *= 2
    raise PrecisionError("Hankel minors stayed singular after raising precision", index=N,
                         required_digits=p.ctx.digits + extra)


def _hankel(p, N, extra):
    dps = p.ctx.dps + extra
    with mp.workdps(dps):
        n_even = N // 2 + 1
        n_odd = (N - 1) // 2 + 1
        eta = _moments(p, 2 * max(n_even, n_odd), extra)
        even = [[eta[i + j] for j in range(n_even)] for i in range(n_even)]
        odd = [[eta[i + j + 1] for j in range(n_odd)] for i in range(n_odd)]
        pe, ge = _ldl_pivots(even)
        po, go = _ldl_pivots(odd)
        norms = []
        for n in range(N + 1):
            d = pe[n // 2] if n % 2 == 0 else po[n // 2]
            if d <= 0:
                raise PrecisionError(f"Hankel pivot for Gamma_{n} is nonpositive", index=n)
            norms.append(d)
        lost = float(mpmath.log10(max(ge + go)))
        if lost + 10 > extra + 20:
            raise PrecisionError("Hankel elimination lost too many digits", index=N)
        gammas = [mpf(0)] + [norms[n] / norms[n - 1] for n in range(1, N + 1)]
    return RecurrenceTable(p, tuple(gammas), tuple(norms), "hankel", dps,
                           {"pivot_growth_even": tuple(ge), "pivot_growth_odd": tuple(go),
                            "lost_digits": lost})


def string_pivot_solve(p: WeightParams, g, n: int):
    """Solve the string equation at index n for gamma_{n+2}.

    The equation is linear in gamma_{n+2} (through Xi_{n+1}) with
    coefficient 6c gamma_n gamma_{n+1}.
    """
    c, t, alpha = p.c_mp, p.t_mp, p.alpha

    def G(k):
        return g[k] if k >= 1 else mpf(0)

    def Xi(k):
        return G(k) * (G(k - 1) + G(k) + G(k + 1)) if k >= 1 else mpf(0)

    pivot = 6 * c * G(n) * G(n + 1)
    if pivot == 0:
        raise InstabilityError(f"vanishing pivot at n = {n}", index=n)
    xi_next_partial = G(n + 1) * (G(n) + G(n + 1))
    known = 6 * c * (G(n) * (Xi(n - 1) + Xi(n) + xi_next_partial) + G(n - 1) * G(n) * G(n + 1)) \
        + 4 * t * Xi(n) - 2 * t * G(n)
    rhs = n + alpha * (n % 2)
    return (rhs - known) / pivot


def gamma_string_recursion(p: WeightParams, N: int, seed=None, reference: RecurrenceTable | None = None,
                           strict: bool = True) -> RecurrenceTable:
    """Forward solution of the string equation from seeds (gamma_1, gamma_2).

    Seeds default to their moment expressions.  With ``reference`` the
    per-n relative divergence and the agreement window (last n agreeing to
    tol_identity) go into ``diagnostics``.  A nonpositive gamma raises
    ``InstabilityError`` unless ``strict=False``, which truncates the table.
    """
    if N < 2:
        raise PreconditionError("string recursion needs N >= 2")
    ctx = p.ctx
    with ctx.workdps():
        if seed is None:
            e0, e1, e2 = (gamma_series(p, k)[0] for k in range(3))
            seed = (e1 / e0, (e2 * e0 - e1 * e1) / (e0 * e1))
        g = [mpf(0), mpf(seed[0]), mpf(seed[1])]
        failure = None
        for n in range(1, N - 1):
            nxt = string_pivot_solve(p, g, n)
            if nxt <= 0:
                failure = n + 2
                if strict:
                    partial = _string_table(p, g, ctx, reference, failure)
                    raise InstabilityError(f"string recursion produced gamma_{n + 2} = "
                                           f"{mpmath.nstr(nxt, 5)} <= 0", index=n + 2, partial=partial)
                break
            g.append(nxt)
        return _string_table(p, g, ctx, reference, failure)


def _string_table(p, g, ctx, reference, failure):
    norms = [gamma_series(p, 0)[0]]
    for n in range(1, len(g)):
        norms.append(norms[-1] * g[n])
    diag = {"failed_at": failure}
    if reference is not None:
        div = []
        window = 0
        for n in range(1, min(len(g), reference.N + 1)):
            d = abs(g[n] - reference.gammas[n]) / reference.gammas[n]
            div.append(d)
            if d <= ctx.tol_identity and window == n - 1:
                window = n
        diag["divergence"] = tuple(div)
        diag["agreement_window"] = window
    return RecurrenceTable(p, tuple(g), tuple(norms), "string", ctx.dps, diag)


# ---------------------------------------------------------------------------
# Identity checks


def string_residuals(table: RecurrenceTable, n: int):
    """Residuals of the string equation in the two algebraic groupings."""
    p = table.params
    c, t, alpha = p.c_mp, p.t_mp, p.alpha
    g, X = table.gamma, table.xi
    rhs = n + alpha * table.omega(n)
    grouped = 6 * c * (g(n) * (X(n - 1) + X(n) + X(n + 1)) + g(n - 1) * g(n) * g(n + 1)) \
        + 4 * t * X(n) - 2 * t * g(n)
    regrouped = 6 * c * ((g(n) + g(n - 1)) * X(n) + g(n) * X(n + 1) + g(n) * g(n - 1) * g(n - 2)) \
        + 4 * t * g(n) * (g(n - 1) + g(n) + g(n + 1)) - 2 * t * g(n)
    return grouped - rhs, regrouped - rhs


def check_string_equation(table: RecurrenceTable, n) -> VerificationReport:
    """String equation residual, normalized by n + 2 sigma + 1, for each n (1 <= n <= N-2)."""
    start = time.perf_counter()
    p = table.params
    items = []
    with table.workdps():
        for k in _as_list(n):
            if not 1 <= k <= table.N - 2:
                raise PreconditionError(f"string check needs 1 <= n <= N-2 = {table.N - 2}, got {k}")
            r1, r2 = string_residuals(table, k)
            scale = k + p.alpha
            items.append({"label": f"n={k}", "residual": max(abs(r1), abs(r2)) / scale,
                          "grouped": abs(r1) / scale, "regrouped": abs(r2) / scale,
                          "grouping_difference": abs(r1 - r2)})
    return make_report("string_equation", p.echo(), items, p.ctx.tol_identity, started=start)


def _shifted_tables(p: WeightParams, N: int, h: Fraction, offsets, digits: int | None = None):
    q = p if digits is None else p.replace(ctx=p.ctx.with_digits(digits))
    return {o: gamma_stieltjes(q.replace(t=q.t + o * h), N) for o in offsets}


def _default_h(p: WeightParams) -> Fraction:
    return Fraction(1, 10 ** (p.ctx.digits // 4))


def toda_rhs(table: RecurrenceTable, n: int):
    g, X = table.gamma, table.xi
    return g(n) * ((g(n + 1) - X(n + 1)) - (g(n - 1) - X(n - 1)))


def check_toda(p: WeightParams, n, h=None) -> VerificationReport:
    """d gamma_n / dt by central differences (tables rebuilt at t +- h) against
    gamma_n [(gamma_{n+1} - Xi_{n+1}) - (gamma_{n-1} - Xi_{n-1})]."""
    start = time.perf_counter()
    ns = _as_list(n)
    h = _default_h(p) if h is None else exact(h)
    N = max(ns) + 2
    tabs = _shifted_tables(p, N, h, (-1, 0, 1))
    items = []
    with tabs[0].workdps():
        hm = _mp(h)
        for k in ns:
            fd = (tabs[1].gamma(k) - tabs[-1].gamma(k)) / (2 * hm)
            rhs = toda_rhs(tabs[0], k)
            scale = max(mpf(1), abs(rhs))
            items.append({"label": f"n={k}", "residual": abs(fd - rhs) / scale, "fd": fd, "formula": rhs})
        tol = max(hm ** 2, p.ctx.tol_identity)
    return make_report("toda", p.echo(), items, tol, notes=[f"h={h}"], started=start)


def dde2_rhs(table: RecurrenceTable, n: int):
    """Right-hand side of the second-order differential-recurrence relation, transcribed term by term."""
    p = table.params
    c, t, alpha = p.c_mp, p.t_mp, p.alpha

    def G(k):
        return table.gamma(n + k)

    gn = G(0)
    m1, m2, m3, m4 = G(-1), G(-2), G(-3), G(-4)
    p1, p2, p3, p4 = G(1), G(2), G(3), G(4)
    theta = 2 * t * gn * (2 * (m1 + gn + p1) - 1)
    head = (n + alpha * table.omega(n) - theta) / (6 * c)
    c4 = -m1 - p1
    c3 = (-m2 * m1 - m1 ** 2 - 6 * m1 * p1 - p1 ** 2 - p1 * p2 + 2 * m1 + 2 * p1)
    c2 = (m3 * m2 * m1 + m2 ** 2 * m1 + 2 * m2 * m1 ** 2 - 4 * m2 * m1 * p1 + m1 ** 3
          - 5 * m1 ** 2 * p1 - 4 * m1 * p1 * p2 - 5 * m1 * p1 ** 2 + p1 ** 3 + 2 * p1 ** 2 * p2
          + p1 * p2 ** 2 + p1 * p2 * p3 + 8 * m1 * p1 - m1 - p1)
    c1 = (m4 * m3 * m2 * m1 + m3 ** 2 * m2 * m1 + 2 * m3 * m2 ** 2 * m1 + 2 * m3 * m2 * m1 ** 2
          + m2 ** 3 * m1 + 3 * m2 ** 2 * m1 ** 2 + 3 * m2 * m1 ** 3 - 2 * m2 * m1 * p1 ** 2
          - 2 * m2 * m1 * p1 * p2 + m1 ** 4 - 2 * m1 ** 2 * p1 ** 2 - 2 * m1 ** 2 * p1 * p2
          + p1 ** 4 + 3 * p1 ** 3 * p2 + 3 * p1 ** 2 * p2 ** 2 + 2 * p1 ** 2 * p2 * p3 + p1 * p2 ** 3
          + 2 * p1 * p2 ** 2 * p3 + p1 * p2 * p3 ** 2 - 2 * m2 ** 2 * m1 + p1 * p2 * p3 * p4
          - 2 * m3 * m2 * m1 - 4 * m2 * m1 ** 2 + 2 * m2 * m1 * p1 - 2 * m1 ** 3 + 2 * m1 ** 2 * p1
          + 2 * m1 * p1 ** 2 + 2 * m1 * p1 * p2 - 2 * p1 ** 3 - 4 * p1 ** 2 * p2 - gn ** 2
          - 2 * p1 * p2 ** 2 - 2 * p1 * p2 * p3 - 2 * m1 * p1 - 2 * gn * m1 - 2 * gn * p1 - p1 * m1)
    return head + c4 * gn ** 4 + c3 * gn ** 3 + c2 * gn ** 2 + c1 * gn, theta


def check_second_order_dde(p: WeightParams, n, h=None) -> VerificationReport:
    """Informational: compare the transcribed right-hand side with both the
    first and the second t-derivative of gamma_n.  Never gates."""
    start = time.perf_counter()
    ns = _as_list(n)
    h = _default_h(p) if h is None else exact(h)
    # the second difference loses 2 log10(1/h) digits; compute tables with that many more
    digits = p.ctx.digits + 2 * int(math.ceil(-math.log10(h)))
    tabs = _shifted_tables(p, max(ns) + 4, h, (-1, 0, 1), digits=digits)
    items = []
    notes = ["non-gating: the left-hand side is ambiguous between d/dt and d^2/dt^2"]
    tol = p.ctx.tol_identity
    with tabs[0].workdps():
        hm = _mp(h)
        for k in ns:
            d1 = (tabs[1].gamma(k) - tabs[-1].gamma(k)) / (2 * hm)
            d2 = (tabs[1].gamma(k) - 2 * tabs[0].gamma(k) + tabs[-1].gamma(k)) / hm ** 2
            rhs, theta = dde2_rhs(tabs[0], k)
            r1 = abs(d1 - rhs) / max(mpf(1), abs(d1), abs(rhs))
            r2 = abs(d2 - rhs) / max(mpf(1), abs(d2), abs(rhs))
            matched = "first" if r1 <= tol else ("second" if r2 <= tol else "none")
            items.append({"label": f"n={k}", "residual": min(r1, r2), "first_derivative": r1,
                          "second_derivative": r2, "rhs": rhs, "theta": theta, "matched": matched})
    return make_report("dde2", p.echo(), items, tol, gating=False, notes=notes, started=start)


def _as_list(n):
    return [n] if isinstance(n, int) else list(n)
