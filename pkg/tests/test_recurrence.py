from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from conftest import make_params
from freud_sextic import (InstabilityError, PreconditionError, build_Sn, chi, gamma_hankel, gamma_initial,
                          gamma_stieltjes, gamma_string_recursion, moment_series)
from freud_sextic.recurrence import (check_second_order_dde, check_string_equation, check_toda,
                                     string_residuals)


def det_gammas(p, n_max, dps=160):
    """gamma_n = D_{n+1} D_{n-1} / D_n^2 from full Hankel determinants (odd moments zero)."""
    with mpmath.workdps(dps):
        eta = [moment_series(p, k) for k in range(n_max + 2)]
        mu = [eta[i // 2] if i % 2 == 0 else mpf(0) for i in range(2 * n_max + 3)]
        D = [mpf(1)] + [mpmath.det(mpmath.matrix([[mu[i + j] for j in range(m)] for i in range(m)]))
                        for m in range(1, n_max + 2)]
        return [mpf(0)] + [D[n + 1] * D[n - 1] / D[n] ** 2 for n in range(1, n_max + 1)]


def test_gamma1_gamma_ratio(base50):
    p, T = base50
    with T.workdps():
        ref = mpmath.gamma(mpf(2) / 3) / mpmath.gamma(mpf(1) / 3)
        assert abs(T.gammas[1] - ref) <= mpf("1e-45")
        assert abs(gamma_initial(p) - T.gammas[1]) <= mpf("1e-45")
    assert abs(T.gammas[1] - mpf("0.5054680")) < mpf("1e-7")
    assert T.gammas[0] == 0


def test_gamma_initial_sigma_one():
    p = make_params(1, 0, 1, digits=50)
    with p.ctx.workdps():
        assert abs(gamma_initial(p) - 1 / mpmath.gamma(mpf(2) / 3)) <= mpf("1e-45")
    # the quoted 0.7384882 is off by one unit in its last place; 1/Gamma(2/3) = 0.73848811...
    assert abs(gamma_initial(p) - mpf("0.7384882")) < mpf("1e-7")
    assert mpmath.nstr(gamma_initial(p), 10) == "0.7384881116"


def test_table_invariants(small):
    p, T = small
    assert T.N == 20 and T.method == "stieltjes"
    assert all(g > 0 for g in T.gammas[1:])
    with T.workdps():
        for n in range(1, T.N + 1):
            assert abs(T.norms[n] - T.gammas[n] * T.norms[n - 1]) <= mpf("1e-45") * T.norms[n]
    assert T.gamma(0) == 0 and T.gamma(-3) == 0
    with pytest.raises(PreconditionError):
        T.gamma(21)
    assert (T.omega(2), T.omega(3)) == (0, 1)


@pytest.mark.parametrize("point", [(1, 0, 0), (1, 1, Fraction(1, 2)), (Fraction(1, 2), -1, Fraction(1, 4))])
def test_stieltjes_against_determinants(point):
    p = make_params(*point, digits=50)
    T = gamma_stieltjes(p, 8)
    ref = det_gammas(p, 8)
    with T.workdps():
        for n in range(1, 9):
            assert abs(T.gammas[n] / ref[n] - 1) <= mpf("1e-40")


@pytest.mark.parametrize("point,N", [((1, 1, Fraction(1, 2)), 20), ((1, -1, Fraction(1, 4)), 12)])
def test_hankel_agrees_with_stieltjes(point, N):
    p = make_params(*point, digits=50)
    S, H = gamma_stieltjes(p, N), gamma_hankel(p, N)
    assert H.method == "hankel"
    with S.workdps():
        for n in range(1, N + 1):
            assert abs(S.gammas[n] - H.gammas[n]) <= p.ctx.tol_identity * S.gammas[n]
        assert abs(H.gammas[1] - gamma_initial(p)) <= mpf("1e-45")


def test_string_recursion_agreement_window(small):
    p, T = small
    R = gamma_string_recursion(p, 20, reference=T)
    assert R.gammas[0] == 0
    window = R.diagnostics["agreement_window"]
    assert window >= 8
    with T.workdps():
        for n in range(1, window + 1):
            assert abs(R.gammas[n] - T.gammas[n]) <= p.ctx.tol_identity * T.gammas[n]


def test_string_recursion_instability_reported(base50):
    p, T = base50
    with T.workdps():
        bad = (T.gammas[1], T.gammas[2] * (1 + mpf("1e-6")))
    with pytest.raises(InstabilityError) as info:
        gamma_string_recursion(p, 40, seed=bad)
    assert info.value.index > 2
    loose = gamma_string_recursion(p, 40, seed=bad, strict=False)
    assert loose.diagnostics["failed_at"] == info.value.index
    assert loose.N == info.value.index - 1


def test_string_equation_first_index(base50):
    # with Xi_0 = 0 the n = 1 equation ties gamma_3 to gamma_1, gamma_2
    p, T = base50
    with T.workdps():
        r1, r2 = string_residuals(T, 1)
        assert abs(r1) <= p.ctx.tol_identity and abs(r2) <= p.ctx.tol_identity


def test_string_equation_report(small):
    p, T = small
    rep = check_string_equation(T, range(1, 19))
    assert rep.passed, rep.summary()
    assert all(it["grouping_difference"] <= p.ctx.tol_identity for it in rep.items)
    with pytest.raises(PreconditionError):
        check_string_equation(T, 19)


def test_telescoping(small):
    p, T = small
    with T.workdps():
        for n in range(0, 12):
            S = build_Sn(T, n)
            assert abs(chi(T, n) + mpmath.fsum(T.gammas[:n])) <= mpf("1e-45")
            if n >= 2:
                assert abs(S.coeff(n - 2) - chi(T, n)) <= mpf("1e-45")
            assert abs(T.gamma(n) - (chi(T, n) - chi(T, n + 1))) <= mpf("1e-45")


@pytest.mark.parametrize("point,n", [((1, 0, 0), 1), ((1, 1, Fraction(1, 2)), 5)])
def test_toda_flow(point, n):
    p = make_params(*point, digits=40)
    rep = check_toda(p, [n])
    assert rep.passed, rep.summary()


def test_second_order_relation_is_informational():
    p = make_params(1, 0, 0, digits=40)
    rep = check_second_order_dde(p, [3])
    assert rep.gating is False
    (item,) = rep.items
    assert "first_derivative" in item and "second_derivative" in item
    assert item["theta"] == 0  # theta carries a factor t
    assert item["matched"] == "second"


@settings(max_examples=6, deadline=None)
@given(st.fractions(min_value=-1, max_value=2, max_denominator=4),
       st.fractions(min_value=Fraction(1, 4), max_value=2, max_denominator=4))
def test_gammas_positive_and_string_equation(t, sigma):
    p = make_params(1, t, sigma, digits=40)
    T = gamma_stieltjes(p, 10)
    assert all(g > 0 for g in T.gammas[1:])
    assert check_string_equation(T, range(1, 9)).passed
