"""Zeros of S_n as eigenvalues of the Jacobi matrix, their interlacing and
symmetry, and the electrostatic balance implied by the ODE at a root:

    2 sum_{k != j} 1/(x_j - x_k) + U_n(x_j) = 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mpf

from .errors import PreconditionError
from .ladder import ladder_coeffs, ode_coeffs
from .numerics import poly_derive, tridiag_eigenvalues
from .polynomials import build_Sn
from .recurrence import RecurrenceTable
from .report import VerificationReport, combine_reports, make_report


@dataclass(frozen=True)
class ZeroSet:
    n: int
    zeros: tuple
    gamma_source: str


@lru_cache(maxsize=256)
def compute_zeros(table: RecurrenceTable, n: int) -> ZeroSet:
    """Eigenvalues of the zero-diagonal Jacobi matrix with off-diagonals sqrt(gamma_k),
    each polished by one Newton step on S_n.  For odd n the middle zero is exactly 0."""
    if not 1 <= n <= table.N:
        raise PreconditionError(f"need 1 <= n <= N = {table.N}, got {n}")
    ctx = table.params.ctx
    with table.workdps():
        off = [mpmath.sqrt(table.gamma(k)) for k in range(1, n)]
        eig = tridiag_eigenvalues([mpf(0)] * n, off, ctx)
        S = build_Sn(table, n).coeffs
        dS = poly_derive(S)
        out = []
        for j, x in enumerate(eig):
            if n % 2 == 1 and j == n // 2:
                out.append(mpf(0))
                continue
            d = dS(x)
            out.append(x - S(x) / d if d != 0 else x)
    return ZeroSet(n, tuple(out), table.method)


def check_zero_properties(table: RecurrenceTable, n) -> VerificationReport:
    """Strictly increasing, contains 0 iff n odd, x_j + x_{n-1-j} ~ 0 and |S_n(x_j)| <= tol (1 + |x_j|)^n."""
    start = time.perf_counter()
    ns = [n] if isinstance(n, int) else list(n)
    items = []
    ctx = table.params.ctx
    with table.workdps():
        for m in ns:
            z = compute_zeros(table, m).zeros
            S = build_Sn(table, m).coeffs
            val = max(abs(S(x)) / (1 + abs(x)) ** m for x in z)
            sym = max(abs(a + b) / max(1, abs(a)) for a, b in zip(z, reversed(z)))
            bad = sum(1 for a, b in zip(z, z[1:]) if not a < b)
            bad += int((mpf(0) in z) != (m % 2 == 1))
            items.append({"label": f"n={m}", "residual": max(val, sym) if not bad else mpf("inf"),
                          "symmetry": sym, "structure_violations": bad})
    return make_report("zero_properties", table.params.echo(), items, ctx.tol_identity, started=start)


def check_interlacing(table: RecurrenceTable, n) -> VerificationReport:
    """Zeros of S_{n-1} strictly interlace those of S_n; residual counts violations."""
    start = time.perf_counter()
    ns = [n] if isinstance(n, int) else list(n)
    items = []
    with table.workdps():
        for m in ns:
            if m < 2:
                raise PreconditionError("interlacing needs n >= 2")
            big = compute_zeros(table, m).zeros
            small = compute_zeros(table, m - 1).zeros
            viol = sum(1 for j, y in enumerate(small) if not big[j] < y < big[j + 1])
            items.append({"label": f"n={m}", "residual": mpf(viol)})
    return make_report("interlacing", table.params.echo(), items, mpf(0), started=start)


def electrostatic_items(table: RecurrenceTable, n: int):
    """Per-zero residual |2 sum 1/(x_j - x_k) + U_n(x_j)| / local scale; origin and roots of A_n skipped."""
    items, notes = [], []
    with table.workdps():
        z = compute_zeros(table, n).zeros
        L = ladder_coeffs(table, n)
        for j, x in enumerate(z):
            if x == 0:
                continue
            if L.A(x) == 0:
                notes.append(f"n={n}: zero {mpmath.nstr(x, 10)} coincides with a root of A_n; skipped")
                continue
            pair = [1 / (x - y) for k, y in enumerate(z) if k != j]
            force = 2 * mpmath.fsum(pair)
            U = ode_coeffs(table, n, x).U
            scale = max(abs(U), 2 * mpmath.fsum(abs(q) for q in pair))
            items.append({"label": f"n={n},j={j}", "x": x, "residual": abs(force + U) / scale})
    return items, notes


def tol_electro(table: RecurrenceTable) -> mpf:
    return mpf(10) ** (-mpf(table.params.ctx.digits) / 4)


def electrostatic_residual(table: RecurrenceTable, n) -> VerificationReport:
    start = time.perf_counter()
    ns = [n] if isinstance(n, int) else list(n)
    items, notes = [], []
    for m in ns:
        if m < 2:
            raise PreconditionError("electrostatic residual needs n >= 2")
        it, no = electrostatic_items(table, m)
        items += it
        notes += no
    return make_report("electrostatic", table.params.echo(), items, tol_electro(table), notes=notes,
                       started=start)


def check_zeros(table: RecurrenceTable, n_max: int) -> VerificationReport:
    reps = [check_zero_properties(table, range(1, n_max + 1)), check_interlacing(table, range(2, n_max + 1))]
    return combine_reports("zeros", table.params.echo(), reps)
