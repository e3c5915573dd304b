"""Precision-parameterized arithmetic kernels.

Everything here works on :mod:`mpmath` numbers.  Callers pick the number of
decimal digits through a :class:`PrecisionContext`; functions raise the
working precision locally (``ctx.workdps()``) so that results are good to the
requested digits after rounding noise from intermediate steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, PreconditionError

GUARD_DIGITS = 20


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus the two tolerances derived from it.

    Tolerances are stored as decimal exponents: ``identity_digits = 60``
    means ``tol_identity = 1e-60``.  Defaults follow the digit count:
    ``digits/2`` for identity checks and ``digits - 10`` for quadrature.
    """

    digits: int = 120
    identity_digits: float | None = None
    quadrature_digits: float | None = None

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 30:
            raise PreconditionError(f"digits must be an integer >= 30, got {self.digits!r}")
        if self.identity_digits is None:
            object.__setattr__(self, "identity_digits", self.digits / 2)
        if self.quadrature_digits is None:
            object.__setattr__(self, "quadrature_digits", self.digits - 10)
        if not 0 < self.identity_digits < self.quadrature_digits:
            raise PreconditionError(
                "need 0 < tol_quadrature < tol_identity < 1, got "
                f"1e-{self.quadrature_digits} and 1e-{self.identity_digits}"
            )

    @property
    def tol_identity(self) -> mpf:
        return mpf(10) ** (-mpf(self.identity_digits))

    @property
    def tol_quadrature(self) -> mpf:
        return mpf(10) ** (-mpf(self.quadrature_digits))

    @property
    def dps(self) -> int:
        """Internal decimal precision: requested digits plus guard digits."""
        return self.digits + GUARD_DIGITS

    def workdps(self, extra: int = 0):
        return mp.workdps(self.dps + extra)

    def with_digits(self, digits: int) -> "PrecisionContext":
        scale = digits / self.digits
        return PrecisionContext(digits, self.identity_digits * scale, self.quadrature_digits * scale)


def gamma_fn(x, ctx: PrecisionContext) -> mpf:
    """Euler Gamma function for real ``x > 0``."""
    with ctx.workdps():
        x = mpf(x)
        if x <= 0:
            raise DomainError(f"gamma_fn is defined here for x > 0 only, got {x}")
        return mpmath.gamma(x)


# ---------------------------------------------------------------------------
# Dense polynomials


@dataclass(frozen=True)
class Poly:
    """Dense polynomial, ``coeffs[i]`` multiplies ``x**i``.

    Trailing exact zeros are stripped on construction so the leading
    coefficient is nonzero; the zero polynomial is ``Poly((0,))``.
    """

    coeffs: tuple = field(default=(mpf(0),))

    def __post_init__(self):
        cs = [c if isinstance(c, mpf) else mpf(c) for c in self.coeffs] or [mpf(0)]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Poly":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> mpf:
        return self.coeffs[-1]

    def coeff(self, i: int) -> mpf:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else mpf(0)

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other):
        return poly_add(self, _as_poly(other))

    __radd__ = __add__

    def __sub__(self, other):
        return poly_add(self, poly_scale(_as_poly(other), -1))

    def __rsub__(self, other):
        return poly_add(_as_poly(other), poly_scale(self, -1))

    def __neg__(self):
        return poly_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_mul(self, other)
        return poly_scale(self, other)

    __rmul__ = __mul__


def _as_poly(p) -> Poly:
    return p if isinstance(p, Poly) else Poly((p,))


def poly_eval(p: Poly, x):
    acc = mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def poly_derive(p: Poly) -> Poly:
    if p.degree == 0:
        return Poly()
    return Poly(tuple(i * p.coeffs[i] for i in range(1, len(p.coeffs))))


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p.coeffs), len(q.coeffs))
    return Poly(tuple(p.coeff(i) + q.coeff(i) for i in range(n)))


def poly_scale(p: Poly, s) -> Poly:
    return Poly(tuple(s * c for c in p.coeffs))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out = [mpf(0)] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            out[i + j] += a * b
    return Poly(tuple(out))


def poly_shift(p: Poly, k: int = 1) -> Poly:
    """Multiply by ``x**k``."""
    if p.is_zero():
        return p
    return Poly((mpf(0),) * k + p.coeffs)


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigenvalues


def _sturm_count(diag: Sequence, off2: Sequence, lam) -> int:
    """Number of negative LDL^T pivots of T - lam I.

    A zero pivot is counted as negative, so the result is the number of
    eigenvalues <= lam (for lam exactly on an eigenvalue).
    """
    count = 0
    q = mpf(1)
    tiny = mpf(10) ** (-mp.dps * 2)
    for i, a in enumerate(diag):
        q = a - lam - (off2[i - 1] / q if i else 0)
        if q == 0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def _charpoly(diag: Sequence, off2: Sequence, lam):
    """det(T - lam I) and its derivative by the continuant recurrence."""
    p_prev, p = mpf(1), diag[0] - lam
    dp_prev, dp = mpf(0), mpf(-1)
    for i in range(1, len(diag)):
        a = diag[i] - lam
        p_next = a * p - off2[i - 1] * p_prev
        dp_next = a * dp - p - off2[i - 1] * dp_prev
        p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
    return p, dp


def tridiag_eigenvalues(diag: Iterable, offdiag: Iterable, ctx: PrecisionContext) -> list:
    """Eigenvalues of a symmetric tridiagonal matrix, ascending.

    Each eigenvalue is isolated by Sturm-sequence bisection and then refined
    with bracketed Newton steps on the characteristic polynomial until the
    step falls below ``ctx.tol_quadrature`` (relative to ``max(1, |lam|)``).
    Off-diagonal entries must be positive, which makes every eigenvalue simple.
    """
    with ctx.workdps():
        diag = [mpf(a) for a in diag]
        off = [mpf(b) for b in offdiag]
        n = len(diag)
        if n == 0:
            raise PreconditionError("empty matrix")
        if len(off) != n - 1:
            raise PreconditionError("len(offdiag) must equal len(diag) - 1")
        if any(b <= 0 for b in off):
            raise PreconditionError("off-diagonal entries must be positive")
        off2 = [b * b for b in off]
        radius = [(off[i - 1] if i else 0) + (off[i] if i < n - 1 else 0) for i in range(n)]
        lo0 = min(a - r for a, r in zip(diag, radius))
        hi0 = max(a + r for a, r in zip(diag, radius))
        if lo0 == hi0:
            return [lo0]
        # Gershgorin bounds may be attained exactly (2x2 zero diagonal); pad them
        pad = (hi0 - lo0) / 1024
        lo0, hi0 = lo0 - pad, hi0 + pad
        tol = ctx.tol_quadrature
        out = []
        for k in range(n):
            lo, hi = lo0, hi0
            # isolate: exactly one eigenvalue (index k) inside (lo, hi]
            while not (_sturm_count(diag, off2, lo) == k and _sturm_count(diag, off2, hi) == k + 1):
                mid = (lo + hi) / 2
                if _sturm_count(diag, off2, mid) > k:
                    hi = mid
                else:
                    lo = mid
                if hi - lo <= tol * max(1, abs(mid)):
                    break
            out.append(_refine(diag, off2, k, lo, hi, tol))
        return out


def _refine(diag, off2, k, lo, hi, tol):
    """Newton on det(T - lam I) inside (lo, hi]; the bracket is updated from
    Sturm counts, so a bracket end sitting on a neighbouring eigenvalue is harmless."""
    lam = (lo + hi) / 2
    for _ in range(10 * mp.prec):
        if _sturm_count(diag, off2, lam) > k:
            hi = lam
        else:
            lo = lam
        p, dp = _charpoly(diag, off2, lam)
        new = lam - p / dp if dp != 0 else None
        # hi may itself be the eigenvalue (counts are "<= lam"), so allow a hair beyond it
        if new is None or not lo < new <= hi + tol * max(1, abs(hi)):
            new = (lo + hi) / 2
        if abs(new - lam) <= tol * max(1, abs(new)) or hi - lo <= tol * max(1, abs(new)):
            return new
        lam = new
    return lam
