"""Monic polynomials S_n(x; t), their coefficient combinatorics, norms,
the quadratic symmetrization to half-line (Airy-type) polynomials, and the
Hankel determinant factorization.

    S_q(x) = sum_k Psi_k(q) x^(q - 2k),   Psi_0 = 1,
    Psi_k(q + 1) - Psi_k(q) = -gamma_q Psi_{k-1}(q - 1).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mpf

from .errors import PrecisionError, PreconditionError
from .moments import airy_moment, gamma_series
from .numerics import Poly, poly_mul
from .recurrence import RecurrenceTable, gamma_stieltjes
from .report import VerificationReport, make_report
from .weight import WeightParams


@dataclass(frozen=True)
class PolynomialRep:
    n: int
    coeffs: Poly
    parity: str

    def __call__(self, x):
        return self.coeffs(x)

    def coeff(self, i: int) -> mpf:
        return self.coeffs.coeff(i)


@lru_cache(maxsize=64)
def _chain(table: RecurrenceTable) -> tuple:
    with table.workdps():
        out = [Poly((1,))]
        if table.N >= 1:
            out.append(Poly((0, 1)))
        for n in range(1, table.N):
            out.append(Poly((0,) + out[n].coeffs) - table.gamma(n) * out[n - 1])
    return tuple(out)


def build_Sn(table: RecurrenceTable, n: int) -> PolynomialRep:
    """S_n from S_{n+1} = x S_n - gamma_n S_{n-1}, S_0 = 1, S_1 = x."""
    if not 0 <= n <= table.N:
        raise PreconditionError(f"need 0 <= n <= N = {table.N}, got {n}")
    return PolynomialRep(n, _chain(table)[n], "even" if n % 2 == 0 else "odd")


def chi(table: RecurrenceTable, n: int) -> mpf:
    """chi(n) = -(gamma_0 + ... + gamma_{n-1}), the x^(n-2) coefficient of S_n."""
    if not 0 <= n <= table.N + 1:
        raise PreconditionError(f"chi needs 0 <= n <= N + 1, got {n}")
    with table.workdps():
        return -mpmath.fsum(table.gamma(k) for k in range(n)) if n else mpf(0)


@lru_cache(maxsize=64)
def _psi_grid(table: RecurrenceTable) -> tuple:
    """Psi_k(q) for 0 <= q <= N by the first-order recursion in q."""
    with table.workdps():
        rows = [[mpf(1)]]  # q = 0
        for q in range(table.N):
            prev = rows[q]
            prev2 = rows[q - 1] if q >= 1 else [mpf(1)]
            row = [mpf(1)]
            for k in range(1, (q + 1) // 2 + 1):
                a = prev[k] if k < len(prev) else mpf(0)
                b = prev2[k - 1] if k - 1 < len(prev2) else mpf(0)
                row.append(a - table.gamma(q) * b)
            rows.append(row)
    return tuple(tuple(r) for r in rows)


def psi_coeff(table: RecurrenceTable, k: int, q: int) -> mpf:
    if not 0 <= q <= table.N or not 0 <= k <= q // 2:
        raise PreconditionError(f"need 0 <= k <= q/2 and q <= N, got k={k}, q={q}")
    return _psi_grid(table)[q][k]


def _gapped_tuples(lo: int, hi: int, r: int):
    """Increasing r-tuples in [lo, hi] with consecutive gaps of at least 2."""
    # k_j - j runs over strictly increasing tuples in [lo, hi - (r-1)]
    for base in itertools.combinations(range(lo, hi - r + 2), r):
        yield tuple(b + j for j, b in enumerate(base))


def psi_closed_form(table: RecurrenceTable, k: int, q: int, base: int = 1) -> mpf:
    """Nested-sum closed form for Psi_k(q); ``base`` is the lower limit of the outer index.

    The upper limit of the i-th index is q + 2i - 1 - 2k, so the innermost one
    stops at q - 1.  Starting the outer index at 0 instead of 1 only adds terms
    containing gamma_0 = 0.
    """
    if k == 0:
        return mpf(1)
    with table.workdps():
        total = mpmath.fsum(mpmath.fprod(table.gamma(j) for j in ks)
                            for ks in _gapped_tuples(base, q - 1, k))
        return (-1) ** k * total


def check_psi(table: RecurrenceTable, q_max: int = 12) -> VerificationReport:
    """Recursion, closed form (both index bases) and coefficient extraction agree."""
    start = time.perf_counter()
    q_max = min(q_max, table.N)
    items = []
    with table.workdps():
        for q in range(q_max + 1):
            S = build_Sn(table, q)
            for k in range(q // 2 + 1):
                rec = psi_coeff(table, k, q)
                ext = S.coeff(q - 2 * k)
                c1 = psi_closed_form(table, k, q, base=1)
                c0 = psi_closed_form(table, k, q, base=0)
                scale = max(mpf(1), abs(rec))
                items.append({"label": f"q={q},k={k}",
                              "residual": max(abs(rec - ext), abs(rec - c1), abs(rec - c0)) / scale,
                              "base0_minus_base1": abs(c0 - c1)})
    tol = table.params.ctx.tol_quadrature
    return make_report("psi_forms", table.params.echo(), items, tol, started=start,
                       notes=["closed form evaluated with outer index from 0 and from 1"])


def check_wqr_form(table: RecurrenceTable, q: int) -> VerificationReport:
    """(-1)^r * sum over W(q, r) of gamma products against the x^(q-2r) coefficient."""
    if q > 12:
        raise PreconditionError("W(q, r) enumeration is limited to q <= 12")
    start = time.perf_counter()
    items = []
    S = build_Sn(table, q)
    with table.workdps():
        for r in range(1, q // 2 + 1):
            tuples = list(_gapped_tuples(1, q - 1, r))
            s = mpmath.fsum(mpmath.fprod(table.gamma(j) for j in ks) for ks in tuples)
            coef = S.coeff(q - 2 * r)
            items.append({"label": f"q={q},r={r}", "residual": abs((-1) ** r * s - coef) / max(mpf(1), abs(coef)),
                          "terms": len(tuples)})
    return make_report("wqr_form", table.params.echo(), items, table.params.ctx.tol_quadrature, started=start)


def _eta(table: RecurrenceTable, k: int) -> mpf:
    extra = table.dps - table.params.ctx.dps
    return gamma_series(table.params, k, extra_dps=extra)[0]


def norm_Gamma(table: RecurrenceTable, n: int) -> mpf:
    """Gamma_n = sum_k Psi_k(n) eta_{2n-2k} (pairing S_n with x^n)."""
    if not 0 <= n <= table.N:
        raise PreconditionError(f"need 0 <= n <= N, got {n}")
    with table.workdps():
        return mpmath.fsum(psi_coeff(table, k, n) * _eta(table, n - k) for k in range(n // 2 + 1))


def inner(table: RecurrenceTable, P: Poly, Q: Poly) -> mpf:
    """<P, Q> against the full weight, through the moments."""
    with table.workdps():
        pq = poly_mul(P, Q).coeffs
        return mpmath.fsum(pq[i] * _eta(table, i // 2) for i in range(0, len(pq), 2))


def check_norm(table: RecurrenceTable, n_max: int | None = None) -> VerificationReport:
    start = time.perf_counter()
    n_max = table.N if n_max is None else n_max
    items = []
    with table.workdps():
        for n in range(n_max + 1):
            a = norm_Gamma(table, n)
            b = table.norms[n]
            items.append({"label": f"n={n}", "residual": abs(a - b) / b})
    return make_report("norm", table.params.echo(), items, table.params.ctx.tol_identity, started=start)


def check_orthogonality(table: RecurrenceTable, n_max: int = 8) -> VerificationReport:
    """|<S_n, S_m>| <= tol * sqrt(Gamma_n Gamma_m) for n != m <= n_max."""
    start = time.perf_counter()
    items = []
    with table.workdps():
        for n in range(n_max + 1):
            for m in range(n):
                val = inner(table, build_Sn(table, n).coeffs, build_Sn(table, m).coeffs)
                items.append({"label": f"({n},{m})",
                              "residual": abs(val) / mpmath.sqrt(table.norms[n] * table.norms[m])})
    return make_report("orthogonality", table.params.echo(), items, table.params.ctx.tol_identity, started=start)


def check_chi(table: RecurrenceTable) -> VerificationReport:
    """chi(n) against the extracted coefficient, and gamma_n = chi(n) - chi(n+1)."""
    start = time.perf_counter()
    items = []
    with table.workdps():
        for n in range(table.N + 1):
            ext = build_Sn(table, n).coeff(n - 2) if n >= 2 else mpf(0)
            r1 = abs(chi(table, n) - ext)
            r2 = abs(table.gamma(n) - (chi(table, n) - chi(table, n + 1))) if n < table.N else mpf(0)
            items.append({"label": f"n={n}", "residual": max(r1, r2) / max(mpf(1), abs(ext))})
    return make_report("chi", table.params.echo(), items, table.params.ctx.tol_quadrature, started=start)


# ---------------------------------------------------------------------------
# Symmetrization x^2 = xi


@dataclass(frozen=True)
class SymmetrizedPair:
    m: int
    ptilde: Poly
    phat: Poly
    norms: tuple


def symmetrize(table: RecurrenceTable, m: int) -> SymmetrizedPair:
    """S_{2m}(x) = Ptilde_m(x^2) and S_{2m+1}(x) = x Phat_m(x^2)."""
    if 2 * m + 1 > table.N:
        raise PreconditionError(f"symmetrize needs 2m+1 <= N, got m={m}")
    even = build_Sn(table, 2 * m).coeffs
    odd = build_Sn(table, 2 * m + 1).coeffs
    pt = Poly(tuple(even.coeff(2 * i) for i in range(m + 1)))
    ph = Poly(tuple(odd.coeff(2 * i + 1) for i in range(m + 1)))
    return SymmetrizedPair(m, pt, ph, (table.norms[2 * m], table.norms[2 * m + 1]))


def _airy_inner(table, P: Poly, Q: Poly, which: str) -> mpf:
    """Pairing under w1 or w2; the xi^i moment of w1 is eta_{2i}, of w2 eta_{2i+2}."""
    shift = 1 if which == "w2" else 0
    with table.workdps():
        pq = poly_mul(P, Q).coeffs
        return mpmath.fsum(pq[i] * _eta(table, i + shift) for i in range(len(pq)))


def check_symmetrized(table: RecurrenceTable, m_max: int) -> VerificationReport:
    """Ptilde_m orthogonal to xi^l under w1, Phat_m under w2 (l < m); norms match."""
    start = time.perf_counter()
    items = []
    with table.workdps():
        for m in range(m_max + 1):
            pair = symmetrize(table, m)
            for l in range(m):
                mono = Poly.monomial(l)
                for which, P, h in (("w1", pair.ptilde, pair.norms[0]), ("w2", pair.phat, pair.norms[1])):
                    v = _airy_inner(table, P, mono, which)
                    items.append({"label": f"{which},m={m},l={l}", "residual": abs(v) / h})
            for which, P, h in (("w1", pair.ptilde, pair.norms[0]), ("w2", pair.phat, pair.norms[1])):
                v = _airy_inner(table, P, P, which)
                items.append({"label": f"{which},m={m},norm", "residual": abs(v - h) / h})
    return make_report("symmetrized", table.params.echo(), items, table.params.ctx.tol_identity, started=start)


def _hankel_det(p: WeightParams, m: int, which: str, method: str):
    if m == 0:
        return mpf(1)  # empty determinant
    with p.ctx.workdps():
        M = mpmath.matrix(m, m)
        for i in range(m):
            for j in range(m):
                M[i, j] = airy_moment(p, i, j, which, method=method)
        return mpmath.det(M)


def hankel_factors(p: WeightParams, n: int, method: str = "series"):
    """(Delta_n, Dtilde, Dhat) with Delta_n = Gamma_0 ... Gamma_{n-1}.

    Dtilde has k + (n mod 2) rows, Dhat has k rows, where k = n // 2.
    """
    k, odd = divmod(n, 2)
    table = gamma_stieltjes(p, max(n, 1))
    with table.workdps():
        delta = mpmath.fprod(table.norms[j] for j in range(n))
        Dt = _hankel_det(p, k + odd, "w1", method)
        Dh = _hankel_det(p, k, "w2", method)
        return delta, Dt, Dh


def check_hankel_product(p: WeightParams, n, method: str = "series") -> VerificationReport:
    """Delta_{2k} = Dtilde_k Dhat_k and Delta_{2k+1} = Dtilde_{k+1} Dhat_k.

    A point that misses the tolerance is recomputed once with twice the
    digits; a determinant that comes out nonpositive raises ``PrecisionError``.
    """
    start = time.perf_counter()
    ns = [n] if isinstance(n, int) else list(n)
    if max(ns) > 14 or min(ns) < 1:
        raise PreconditionError("Hankel product check needs 1 <= n <= 14")
    tol = p.ctx.tol_identity
    items = []
    for k in ns:
        q = p
        for _ in range(2):
            delta, Dt, Dh = hankel_factors(q, k, method)
            if Dt <= 0 or Dh <= 0:
                raise PrecisionError(f"nonpositive Hankel determinant at n={k}", index=k,
                                     required_digits=2 * q.ctx.digits)
            with q.ctx.workdps():
                res = abs(delta - Dt * Dh) / delta
            if res <= tol:
                break
            q = q.replace(ctx=q.ctx.with_digits(2 * q.ctx.digits))
        items.append({"label": f"n={k}", "residual": res, "delta": delta, "Dtilde": Dt, "Dhat": Dh})
    return make_report("hankel_product", p.echo(), items, tol, started=start)
