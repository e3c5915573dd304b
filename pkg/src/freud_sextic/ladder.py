"""Ladder coefficients A_n, B_n for the weight, their compatibility
identities, the second-order ODE for S_n and the quasi-orthogonality
coefficients of x S_n'.

    S_n' = gamma_n A_n S_{n-1} - B_n S_n
    A_n  = 6c x^4 + [6c(g_n + g_{n+1}) + 4t] x^2 + 6c(Xi_n + Xi_{n+1}) + 4t(g_n + g_{n+1}) - 2t
    B_n  = 6c g_n x^3 + (6c Xi_n + 4t g_n) x + (2 sigma + 1) Omega_n / x
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import PreconditionError, SingularityError
from .numerics import Poly, poly_derive
from .polynomials import build_Sn, inner
from .recurrence import RecurrenceTable
from .report import VerificationReport, combine_reports, make_report

DEFAULT_GRID = (mpf("-1.7"), mpf("-0.9"), mpf("-0.3"), mpf("0.3"), mpf("0.9"), mpf("1.7"))
ODE_GRID = (mpf("-2.0"), mpf("-1.1"), mpf("-0.4"), mpf("0.4"), mpf("1.1"), mpf("2.0"))


@dataclass(frozen=True)
class LadderCoeffs:
    """A_n as an even quartic, B_n as an odd cubic plus B_singular / x."""

    n: int
    A_poly: Poly
    B_poly: Poly
    B_singular: mpf

    def A(self, x):
        return self.A_poly(x)

    def dA(self, x):
        return poly_derive(self.A_poly)(x)

    def B(self, x):
        if x == 0 and self.B_singular != 0:
            raise SingularityError("B_n has a pole at x = 0 for odd n")
        return self.B_poly(x) + (self.B_singular / x if self.B_singular else 0)

    def dB(self, x):
        return poly_derive(self.B_poly)(x) - (self.B_singular / x ** 2 if self.B_singular else 0)


def ladder_coeffs(table: RecurrenceTable, n: int) -> LadderCoeffs:
    if not 0 <= n <= table.N - 2:
        raise PreconditionError(f"ladder coefficients need 0 <= n <= N-2 = {table.N - 2}, got {n}")
    p = table.params
    g, X = table.gamma, table.xi
    with table.workdps():
        c, t = p.c_mp, p.t_mp
        s = g(n) + g(n + 1)
        A = Poly((6 * c * (X(n) + X(n + 1)) + 4 * t * s - 2 * t, 0, 6 * c * s + 4 * t, 0, 6 * c))
        B = Poly((0, 6 * c * X(n) + 4 * t * g(n), 0, 6 * c * g(n)))
        return LadderCoeffs(n, A, B, p.alpha * table.omega(n))


def _v_prime_parts(table):
    """v' = poly part + sing / x."""
    p = table.params
    c, t = p.c_mp, p.t_mp
    return Poly((0, -2 * t, 0, 4 * t, 0, 6 * c)), -p.alpha


def _v_prime(table, x):
    poly, sing = _v_prime_parts(table)
    return poly(x) + sing / x


def _grid(xgrid, default):
    xs = [mpf(x) for x in (default if xgrid is None else xgrid)]
    if any(x == 0 for x in xs):
        raise PreconditionError("grid must avoid x = 0")
    return xs


def _ns(n):
    return [n] if isinstance(n, int) else list(n)


# ---------------------------------------------------------------------------
# Compatibility identities


def check_lowering(table: RecurrenceTable, n, xgrid=None) -> VerificationReport:
    """S_n' - [gamma_n A_n S_{n-1} - B_n S_n] at each grid point."""
    start = time.perf_counter()
    items = []
    with table.workdps():
        xs = _grid(xgrid, DEFAULT_GRID)
        for k in _ns(n):
            if k < 1:
                raise PreconditionError("lowering relation needs n >= 1")
            L = ladder_coeffs(table, k)
            S, Sm = build_Sn(table, k).coeffs, build_Sn(table, k - 1).coeffs
            dS = poly_derive(S)
            for x in xs:
                a, b, d = table.gamma(k) * L.A(x) * Sm(x), L.B(x) * S(x), dS(x)
                scale = max(abs(a), abs(b), abs(d))
                items.append({"label": f"n={k},x={mpmath.nstr(x, 3)}", "residual": abs(d - a + b) / scale})
    return make_report("lowering", table.params.echo(), items, table.params.ctx.tol_identity, started=start)


def m1_coefficients(table: RecurrenceTable, n: int) -> dict:
    """Laurent coefficients (powers -1..5) of both sides of B_n + B_{n+1} = x A_n - v'."""
    with table.workdps():
        L, L1 = ladder_coeffs(table, n), ladder_coeffs(table, n + 1)
        vpoly, vsing = _v_prime_parts(table)
        xA = Poly((0,) + L.A_poly.coeffs)
        out = {}
        for d in range(-1, 6):
            if d == -1:
                lhs, rhs = L.B_singular + L1.B_singular, -vsing
            else:
                lhs = L.B_poly.coeff(d) + L1.B_poly.coeff(d)
                rhs = xA.coeff(d) - vpoly.coeff(d)
            out[d] = (lhs, rhs)
        return out


def check_M1(table: RecurrenceTable, n) -> VerificationReport:
    """Coefficient-wise B_n + B_{n+1} = x A_n - v' (the 1/x parts agree since Omega_n + Omega_{n+1} = 1)."""
    start = time.perf_counter()
    items = []
    with table.workdps():
        for k in _ns(n):
            if k + 1 > table.N - 2:
                raise PreconditionError(f"(M1) at n={k} needs B_{k + 1}; table too short")
            coeffs = m1_coefficients(table, k)
            scale = max(max(abs(a), abs(b)) for a, b in coeffs.values())
            for d, (a, b) in coeffs.items():
                items.append({"label": f"n={k},x^{d}", "residual": abs(a - b) / scale, "lhs": a, "rhs": b})
    return make_report("m1", table.params.echo(), items, table.params.ctx.tol_quadrature, started=start)


def check_AnBn_lemma(table: RecurrenceTable, n, xgrid=None) -> VerificationReport:
    """A_n(z) = v0'(z)/z + (B_n(z) + B_{n+1}(z))/z - (2 sigma + 1)/z^2 pointwise."""
    start = time.perf_counter()
    p = table.params
    items = []
    with table.workdps():
        xs = _grid(xgrid, DEFAULT_GRID)
        c, t, alpha = p.c_mp, p.t_mp, p.alpha
        for k in _ns(n):
            L, L1 = ladder_coeffs(table, k), ladder_coeffs(table, k + 1)
            for z in xs:
                v0 = 6 * c * z ** 5 + t * (4 * z ** 3 - 2 * z)
                terms = (v0 / z, (L.B(z) + L1.B(z)) / z, alpha / z ** 2)
                rhs = terms[0] + terms[1] - terms[2]
                scale = max(abs(L.A(z)), *(abs(u) for u in terms))
                items.append({"label": f"n={k},x={mpmath.nstr(z, 3)}", "residual": abs(L.A(z) - rhs) / scale})
    return make_report("an_bn_lemma", p.echo(), items, p.ctx.tol_identity, started=start)


def sum_A(table: RecurrenceTable, n: int, x):
    """sum_{j=0}^{n-1} A_j(x)."""
    return mpmath.fsum(ladder_coeffs(table, j).A(x) for j in range(n))


def check_M2prime(table: RecurrenceTable, n, xgrid=None) -> VerificationReport:
    """v' B_n + sum_{j<n} A_j + B_n^2 - gamma_n A_n A_{n-1} pointwise."""
    start = time.perf_counter()
    items = []
    with table.workdps():
        xs = _grid(xgrid, DEFAULT_GRID)
        for k in _ns(n):
            if k < 1:
                raise PreconditionError("(M2') needs n >= 1")
            L, Lm = ladder_coeffs(table, k), ladder_coeffs(table, k - 1)
            for x in xs:
                vb = _v_prime(table, x) * L.B(x)
                sa = sum_A(table, k, x)
                bb = L.B(x) ** 2
                aa = table.gamma(k) * L.A(x) * Lm.A(x)
                scale = max(abs(vb), abs(bb), abs(aa))
                items.append({"label": f"n={k},x={mpmath.nstr(x, 3)}", "residual": abs(vb + sa + bb - aa) / scale})
    return make_report("m2prime", table.params.echo(), items, table.params.ctx.tol_identity, started=start)


# ---------------------------------------------------------------------------
# Second-order ODE  S'' + U S' + W S = 0


@dataclass(frozen=True)
class OdeCoeffsAt:
    x: mpf
    U: mpf
    W: mpf


def _check_ode_point(table, n, x):
    if x == 0:
        raise SingularityError("ODE coefficients are singular at x = 0")
    L = ladder_coeffs(table, n)
    a = L.A(x)
    if a == 0:
        raise SingularityError(f"A_{n} vanishes at x = {x}")
    return L, a


def ode_coeffs(table: RecurrenceTable, n: int, x) -> OdeCoeffsAt:
    """U = -v' - A_n'/A_n;  W = -B_n [v' + B_n + A_n'/A_n] + gamma_n A_n A_{n-1} + B_n'."""
    if n < 1:
        raise PreconditionError("ODE coefficients need n >= 1")
    with table.workdps():
        x = mpf(x)
        L, a = _check_ode_point(table, n, x)
        Lm = ladder_coeffs(table, n - 1)
        vp = _v_prime(table, x)
        r = L.dA(x) / a
        b = L.B(x)
        U = -vp - r
        W = -b * (vp + b + r) + table.gamma(n) * a * Lm.A(x) + L.dB(x)
        return OdeCoeffsAt(x, U, W)


def ode_coeffs_generic(table: RecurrenceTable, n: int, x) -> OdeCoeffsAt:
    """Same coefficients through the generic form W = B_n' - B_n A_n'/A_n + sum_{j<n} A_j."""
    with table.workdps():
        x = mpf(x)
        L, a = _check_ode_point(table, n, x)
        r = L.dA(x) / a
        U = -_v_prime(table, x) - r
        W = L.dB(x) - L.B(x) * r + sum_A(table, n, x)
        return OdeCoeffsAt(x, U, W)


def ode_coeffs_expanded(table: RecurrenceTable, n: int, x) -> OdeCoeffsAt:
    """Term-by-term expanded form of U and W, kept as a diagnostic comparison."""
    p = table.params
    g, X = table.gamma, table.xi
    with table.workdps():
        x = mpf(x)
        c, t, al, om = p.c_mp, p.t_mp, p.alpha, table.omega(n)
        An = 6 * c * x ** 4 + 6 * c * (g(n) + g(n + 1)) * x ** 2 + 6 * c * (X(n + 1) + X(n)) - 2 * t \
            + 4 * t * (x ** 2 + g(n) + g(n + 1))
        Am = 6 * c * x ** 4 + 6 * c * (g(n) + g(n - 1)) * x ** 2 + 6 * c * (X(n - 1) + X(n)) - 2 * t \
            + 4 * t * (x ** 2 + g(n) + g(n - 1))
        frac = (24 * c * x ** 3 + 2 * (6 * c * (g(n) + g(n + 1)) + 4 * t) * x) / An
        U = -6 * c * x ** 5 - t * (4 * x ** 3 - 2 * x) + al / x - frac
        W = (18 * c * g(n) * x ** 2 + 6 * c * X(n) - al * om / x ** 2 + 4 * t * g(n)
             + g(n) * An * Am
             - ((6 * c * x ** 5 + (6 * c * g(n) + 4 * t) * x ** 3 - al / x + (6 * c * X(n) + 4 * t * g(n) - 2 * t) * x
                 + al * om / x + frac)
                * (6 * c * g(n) * x ** 3 + (6 * c * X(n) + 4 * t * g(n)) * x + al * om / x)))
        return OdeCoeffsAt(x, U, W)


def ode_residual(table: RecurrenceTable, n: int, x, coeffs: OdeCoeffsAt | None = None):
    """(residual / scale, scale) of S'' + U S' + W S at x."""
    with table.workdps():
        x = mpf(x)
        co = ode_coeffs(table, n, x) if coeffs is None else coeffs
        S = build_Sn(table, n).coeffs
        dS = poly_derive(S)
        d2S = poly_derive(dS)
        parts = (d2S(x), co.U * dS(x), co.W * S(x))
        scale = max(abs(u) for u in parts)
        return abs(parts[0] + parts[1] + parts[2]) / scale, scale


def check_ode(table: RecurrenceTable, n, xgrid=None, near_origin: bool = True) -> VerificationReport:
    """ODE residual on the grid (ladder and generic assemblies), plus the
    1/x balance at x = +-1e-3 for odd n.  The expanded form is reported as
    ``expanded_vs_compact`` without gating."""
    start = time.perf_counter()
    p = table.params
    items = []
    notes = []
    with table.workdps():
        xs = _grid(xgrid, ODE_GRID)
        for k in _ns(n):
            pts = [(x, False) for x in xs]
            if near_origin and k % 2 == 1:
                pts += [(mpf("-1e-3"), True), (mpf("1e-3"), True)]
            for x, close in pts:
                if ladder_coeffs(table, k).A(x) == 0:
                    notes.append(f"n={k}: skipped x={x}, root of A_n")
                    continue
                r1, _ = ode_residual(table, k, x)
                r2, _ = ode_residual(table, k, x, ode_coeffs_generic(table, k, x))
                cmp_ = ode_coeffs(table, k, x)
                exp_ = ode_coeffs_expanded(table, k, x)
                dev = max(abs(cmp_.U - exp_.U) / max(1, abs(cmp_.U)), abs(cmp_.W - exp_.W) / max(1, abs(cmp_.W)))
                items.append({"label": f"n={k},x={mpmath.nstr(x, 3)}", "residual": max(r1, r2),
                              "ladder": r1, "generic": r2, "expanded_vs_compact": dev,
                              "near_origin": close})
    return make_report("ode", p.echo(), items, p.ctx.tol_identity, notes=notes, started=start)


# ---------------------------------------------------------------------------
# Quasi-orthogonality  x S_n' = sum_{k=n-6}^{n} u[k] S_k


@dataclass(frozen=True)
class QuasiCoeffs:
    n: int
    u: dict
    form: str


def quasi_coeffs(table: RecurrenceTable, n: int, form: str = "corrected") -> QuasiCoeffs:
    """Expansion coefficients u[k], k = n-6..n.

    ``form="corrected"`` carries the 4t term in u[n-4] and gamma_n gamma_{n-2}
    in the braces of u[n-2], both required by the projection integrals;
    ``form="uncorrected"`` omits the first and uses gamma_{n-1} gamma_{n-2} in the
    second, for comparison.
    """
    if form not in ("corrected", "uncorrected"):
        raise PreconditionError(f"unknown form {form!r}")
    if not 6 <= n <= table.N - 4:
        raise PreconditionError(f"quasi coefficients need 6 <= n <= N-4 = {table.N - 4}, got {n}")
    p = table.params
    g, X = table.gamma, table.xi
    with table.workdps():
        c, t = p.c_mp, p.t_mp
        pi4 = g(n) * g(n - 1) * g(n - 2) * g(n - 3)
        u = {k: mpf(0) for k in range(n - 6, n + 1)}
        u[n - 6] = 6 * c * pi4 * g(n - 4) * g(n - 5)
        u[n - 4] = 6 * c * pi4 * mpmath.fsum(g(n + j) for j in range(-4, 2))
        cross = g(n) * g(n - 2)
        if form == "corrected":
            u[n - 4] += 4 * t * pi4
        else:
            cross = g(n - 1) * g(n - 2)
        brace = X(n - 2) + X(n - 1) + X(n) + X(n + 1) + cross + g(n + 1) * (g(n - 2) + g(n - 1))
        u[n - 2] = g(n) * g(n - 1) * (6 * c * brace + 4 * t * (g(n - 2) + g(n - 1) + g(n) + g(n + 1)) - 2 * t)
        u[n] = mpf(n)
        return QuasiCoeffs(n, u, form)


def quasi_projection(table: RecurrenceTable, n: int, k: int) -> mpf:
    """<x S_n', S_k> / Gamma_k through the moments."""
    with table.workdps():
        S = build_Sn(table, n).coeffs
        xdS = Poly((0,) + poly_derive(S).coeffs)
        return inner(table, xdS, build_Sn(table, k).coeffs) / table.norms[k]


def check_quasi(table: RecurrenceTable, n, form: str = "corrected") -> VerificationReport:
    """(a) coefficient-level expansion of x S_n' and (b) each u[k] against its projection."""
    start = time.perf_counter()
    p = table.params
    expansion, projection = [], []
    with table.workdps():
        for m in _ns(n):
            q = quasi_coeffs(table, m, form)
            S = build_Sn(table, m).coeffs
            xdS = Poly((0,) + poly_derive(S).coeffs)
            acc = Poly()
            for k, uk in q.u.items():
                acc = acc + uk * build_Sn(table, k).coeffs
            diff = xdS - acc
            scale = max(abs(cf) for cf in xdS.coeffs)
            expansion.append({"label": f"n={m}", "residual": max(abs(cf) for cf in diff.coeffs) / scale})
            for k, uk in q.u.items():
                proj = quasi_projection(table, m, k)
                projection.append({"label": f"n={m},k={k}", "residual": abs(uk - proj) / max(mpf(1), abs(proj)),
                                   "formula": uk, "projection": proj})
    rep_a = make_report("quasi_expansion", p.echo(), expansion, p.ctx.tol_quadrature)
    rep_b = make_report("quasi_projection", p.echo(), projection, p.ctx.tol_identity)
    rep = combine_reports("quasi", p.echo(), [rep_a, rep_b], notes=[f"form={form}"])
    rep.runtime = time.perf_counter() - start
    return rep
