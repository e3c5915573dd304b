"""Orthogonal polynomials for the perturbed sextic Freud weight

    W(x) = |x|^(2 sigma + 1) exp(-[c x^6 + t (x^4 - x^2)])

in arbitrary precision: moments, recurrence coefficients, polynomials,
ladder and ODE coefficients, quasi-orthogonality coefficients and zeros,
with numerical checks of the identities that tie them together.
"""

from __future__ import annotations

from .errors import (AccuracyError, DomainError, FreudError, InstabilityError, PrecisionError,
                     PreconditionError, SingularityError)
from .numerics import Poly, PrecisionContext, gamma_fn, tridiag_eigenvalues
from .weight import WeightParams, airy_weight, potential_v, potential_v_prime, weight_eval
from .moments import MomentTable, airy_moment, moment_quadrature, moment_series, moment_table
from .recurrence import (RecurrenceTable, gamma_hankel, gamma_initial, gamma_stieltjes,
                         gamma_string_recursion)
from .polynomials import PolynomialRep, SymmetrizedPair, build_Sn, chi, psi_coeff, symmetrize
from .ladder import LadderCoeffs, OdeCoeffsAt, QuasiCoeffs, ladder_coeffs, ode_coeffs, quasi_coeffs
from .zeros import ZeroSet, compute_zeros
from .report import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "DomainError", "FreudError", "InstabilityError", "PrecisionError",
    "PreconditionError", "SingularityError",
    "Poly", "PrecisionContext", "gamma_fn", "tridiag_eigenvalues",
    "WeightParams", "airy_weight", "potential_v", "potential_v_prime", "weight_eval",
    "MomentTable", "airy_moment", "moment_quadrature", "moment_series", "moment_table",
    "RecurrenceTable", "gamma_hankel", "gamma_initial", "gamma_stieltjes", "gamma_string_recursion",
    "PolynomialRep", "SymmetrizedPair", "build_Sn", "chi", "psi_coeff", "symmetrize",
    "LadderCoeffs", "OdeCoeffsAt", "QuasiCoeffs", "ladder_coeffs", "ode_coeffs", "quasi_coeffs",
    "ZeroSet", "compute_zeros", "VerificationReport",
]
