"""The perturbed sextic Freud weight and its two half-line companions.

    W(x) = |x|^(2 sigma + 1) exp(-[c x^6 + t (x^4 - x^2)])

Under x^2 = xi the even and odd parts of the moment problem turn into
half-line problems with weights

    w1(xi) = xi^sigma     exp(-[c xi^3 + t (xi^2 - xi)])
    w2(xi) = xi^(sigma+1) exp(-[c xi^3 + t (xi^2 - xi)])
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import DomainError, PreconditionError, SingularityError
from .numerics import PrecisionContext


def exact(value) -> Fraction:
    """Exact rational for a user-supplied parameter (floats go through their repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, mpf):
        return Fraction(mpmath.nstr(value, 50, strip_zeros=True))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class WeightParams:
    """Weight parameters (c, t, sigma) plus the precision context.

    Parameters are held as exact fractions and converted to ``mpf`` inside the
    caller's working precision, so one ``WeightParams`` serves any precision.
    ``sigma_warning`` is set when sigma <= 0: formulas remain valid for
    sigma > -1/2, but the classical statements assume sigma > 0.
    """

    c: Fraction
    t: Fraction
    sigma: Fraction
    ctx: PrecisionContext = field(default_factory=PrecisionContext)

    def __post_init__(self):
        for name in ("c", "t", "sigma"):
            object.__setattr__(self, name, exact(getattr(self, name)))
        if self.c <= 0:
            raise PreconditionError(f"c must be positive, got {self.c}")
        if self.sigma <= Fraction(-1, 2):
            raise PreconditionError(f"sigma must exceed -1/2 for integrability, got {self.sigma}")
        if self.sigma <= 0:
            warnings.warn(f"sigma = {self.sigma} <= 0 lies outside the classical range sigma > 0",
                          stacklevel=3)

    @property
    def sigma_warning(self) -> bool:
        return self.sigma <= 0

    # mpf views at the current working precision
    @property
    def c_mp(self) -> mpf:
        return _mp(self.c)

    @property
    def t_mp(self) -> mpf:
        return _mp(self.t)

    @property
    def sigma_mp(self) -> mpf:
        return _mp(self.sigma)

    @property
    def alpha(self) -> mpf:
        """Exponent 2 sigma + 1 of |x|."""
        return 2 * _mp(self.sigma) + 1

    def replace(self, **changes) -> "WeightParams":
        kw = dict(c=self.c, t=self.t, sigma=self.sigma, ctx=self.ctx)
        kw.update(changes)
        return WeightParams(**kw)

    def echo(self) -> dict:
        return {"c": str(self.c), "t": str(self.t), "sigma": str(self.sigma), "digits": self.ctx.digits}


def _mp(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def weight_eval(p: WeightParams, x) -> mpf:
    with p.ctx.workdps():
        x = mpf(x)
        if x == 0:
            return mpf(0)
        ax = abs(x)
        x2 = x * x
        return ax ** p.alpha * mpmath.exp(-(p.c_mp * x2 ** 3 + p.t_mp * (x2 * x2 - x2)))


def potential_v(p: WeightParams, x) -> mpf:
    """v(x) = -log W(x) = -(2 sigma + 1) log|x| + c x^6 + t (x^4 - x^2)."""
    with p.ctx.workdps():
        x = mpf(x)
        if x == 0:
            raise SingularityError("potential v is singular at x = 0")
        x2 = x * x
        return -p.alpha * mpmath.log(abs(x)) + p.c_mp * x2 ** 3 + p.t_mp * (x2 * x2 - x2)


def potential_v_prime(p: WeightParams, x) -> mpf:
    with p.ctx.workdps():
        x = mpf(x)
        if x == 0:
            raise SingularityError("v' is singular at x = 0")
        return -p.alpha / x + 6 * p.c_mp * x ** 5 + p.t_mp * (4 * x ** 3 - 2 * x)


def v0_prime(p: WeightParams, x) -> mpf:
    """Derivative of the smooth part c x^6 + t (x^4 - x^2) of the potential."""
    with p.ctx.workdps():
        x = mpf(x)
        return 6 * p.c_mp * x ** 5 + p.t_mp * (4 * x ** 3 - 2 * x)


def x_log_derivative(p: WeightParams, x) -> mpf:
    """x W'(x) / W(x) = -6 c x^6 - 4 t x^4 + 2 t x^2 + (2 sigma + 1)."""
    with p.ctx.workdps():
        x2 = mpf(x) ** 2
        return -6 * p.c_mp * x2 ** 3 - 4 * p.t_mp * x2 * x2 + 2 * p.t_mp * x2 + p.alpha


def airy_weight(p: WeightParams, which: str, xi) -> mpf:
    if which not in ("w1", "w2"):
        raise PreconditionError(f"which must be 'w1' or 'w2', got {which!r}")
    with p.ctx.workdps():
        xi = mpf(xi)
        if xi <= 0:
            raise DomainError(f"Airy-type weights live on xi > 0, got {xi}")
        power = p.sigma_mp + (1 if which == "w2" else 0)
        return xi ** power * mpmath.exp(-(p.c_mp * xi ** 3 + p.t_mp * (xi * xi - xi)))
