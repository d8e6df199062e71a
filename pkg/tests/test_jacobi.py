import math

import numpy as np
import pytest

from jacobi0.jacobi import (
    DEFAULT_MATRICES,
    I2,
    S,
    T,
    ExceedsWindow,
    ModifiedJacobiForm,
    UnimodularMatrix,
    coeff_relation_check,
    cocycle_factor,
    compare,
    constant_form,
    filtration_index,
    grid,
    relation_partner,
    sigma_form,
    slash_dprime,
    slash_prime,
    verify_cocycles,
)
from jacobi0.qseries import BiSeries, bs_support_profile
from jacobi0.verify import control_function
from jacobi0.weierstrass import RationalPair, sigma_eval, sigma_series

R = RationalPair
POINTS = grid()


class TestUnimodularMatrix:
    def test_det_checked(self):
        with pytest.raises(ValueError):
            UnimodularMatrix(1, 1, 1, 1)

    def test_parse_and_str(self):
        M = UnimodularMatrix.parse("9,8,64,57")
        assert str(M) == "(9,8;64,57)"
        with pytest.raises(ValueError):
            UnimodularMatrix.parse("1,2,3")

    def test_group_law(self):
        M = S @ T
        assert M @ M.inverse() == I2
        tau = 0.3 + 1.1j
        assert abs((S @ T).act(tau) - S.act(T.act(tau))) < 1e-15


class TestSlashPrime:
    def test_identity(self):
        f = slash_prime(sigma_eval, -1, I2)
        for tau, z in POINTS:
            assert f(tau, z) == sigma_eval(tau, z)

    def test_sigma_invariant_under_S(self):
        assert abs(slash_prime(sigma_eval, -1, S)(1j, 0.2) - sigma_eval(1j, 0.2)) < 1e-8

    @pytest.mark.parametrize("M", DEFAULT_MATRICES)
    def test_sigma_invariant(self, M):
        rep = compare("s", ((slash_prime(sigma_eval, -1, M)(t, z), sigma_eval(t, z)) for t, z in POINTS),
                      1e-8, relative=True)
        assert rep.passed, rep.line()

    def test_composition(self):
        lhs = slash_prime(slash_prime(control_function, 2, T), 2, S)
        rhs = slash_prime(control_function, 2, T @ S)
        for tau, z in POINTS:
            assert abs(lhs(tau, z) / rhs(tau, z) - 1) < 1e-8


class TestSlashDoublePrime:
    def test_zero_shift(self):
        f = slash_dprime(sigma_eval, -1, R(0, 0))
        for tau, z in POINTS:
            assert f(tau, z) == pytest.approx(sigma_eval(tau, z), rel=1e-15)

    @pytest.mark.parametrize("X", [R(1, 0), R(0, 1), R(1, 1), R(2, 0), R(-1, 3)])
    def test_sigma_invariant(self, X):
        f = slash_dprime(sigma_eval, -1, X)
        for tau, z in POINTS:
            assert abs(f(tau, z) / sigma_eval(tau, z) - 1) < 1e-8

    def test_integer_cocycle_factor_is_one(self):
        for X, Xp in [(R(1, 0), R(0, 1)), (R(2, 1), R(-1, 3)), (R(1, 1), R(1, 1))]:
            for k in (-2, -1, 1, 3):
                assert cocycle_factor(X, Xp, k) == 1

    def test_fractional_cocycle_factor(self):
        c = cocycle_factor(R("1/2", 0), R(0, "1/3"), 1)
        assert abs(c - np.exp(2j * math.pi * (-1 / 12))) < 1e-15


class TestCocycles:
    def test_sigma(self):
        pairs = [(R("1/2", 0), R(0, "1/3"))]
        r1, r2 = verify_cocycles(sigma_eval, -1, pairs, [S], [R("1/2", "1/2")], [(1j, 0.1)], 1e-9)
        assert r1.passed and r2.passed

    @pytest.mark.parametrize("k", [-2, 1, 3])
    def test_control_function(self, k):
        pairs = [(R("1/3", "2/5"), R("-1/2", "1/7")), (R(1, 0), R("1/2", 2))]
        r1, r2 = verify_cocycles(control_function, k, pairs, DEFAULT_MATRICES,
                                 [R("1/2", "1/2"), R("-2/5", "3/7")], POINTS, 1e-9, "control")
        assert r1.passed, r1.line()
        assert r2.passed, r2.line()

    def test_wrong_factor_detected(self):
        # a control function that ignores the ψ e(det/2) factor must fail (i)
        X, Xp = R("1/2", 0), R(0, "1/3")
        lhs = slash_dprime(slash_dprime(control_function, 1, X), 1, Xp)
        rhs = slash_dprime(control_function, 1, X + Xp)
        rep = compare("naive", ((lhs(t, z), rhs(t, z)) for t, z in POINTS), 1e-9, relative=True)
        assert not rep.passed

    def test_report_json(self):
        rep = compare("x", [(1, 1 + 1e-12)], 1e-9)
        assert rep.to_json() == {"identity": "x", "max_abs_deviation": pytest.approx(1e-12), "samples": 1,
                                 "pass": True, "tolerance": 1e-9}


class TestForms:
    def test_series_consistency(self):
        phi = sigma_form(14)
        for tau, z in POINTS:
            assert phi.series_deviation(tau, z) < 1e-9

    def test_graded_square(self):
        sq = sigma_form() * sigma_form()
        assert sq.weight == -2
        assert sq.normalized_series.row(0) == {0: 1, 1: -2, 2: 1}
        assert bs_support_profile(sq.normalized_series).envelope[2] <= 4
        for tau, z in POINTS:
            assert sq.series_deviation(tau, z) < 1e-8 * max(1, abs(sq(tau, z)))

    def test_times_constant(self):
        phi = sigma_form() * constant_form()
        assert phi.weight == -1
        assert phi.normalized_series == sigma_form().normalized_series
        assert phi(1j, 0.1) == pytest.approx(sigma_eval(1j, 0.1))

    def test_missing_series(self):
        phi = ModifiedJacobiForm(0, lambda t, z: 1)
        with pytest.raises(ValueError):
            phi.series_deviation(1j, 0.1)


class TestCoefficientRelation:
    def test_table_examples(self):
        Sser = sigma_series(5)
        n2, r2, sign = relation_partner(1, 2, -1, 1)
        assert (n2, r2, sign) == (0, 1, -1)
        assert Sser[(1, 2)] == sign * Sser[(0, 1)] == 1
        n2, r2, sign = relation_partner(3, 3, -1, 1)
        assert Sser[(3, 3)] == sign * Sser[(n2, r2)] == -1

    def test_lambda_zero_trivial(self):
        assert relation_partner(4, -2, -1, 0) == (4, -2, 1)

    def test_sigma_and_square(self):
        Sser = sigma_series(10)
        assert coeff_relation_check(Sser, -1).passed
        assert coeff_relation_check(Sser * Sser, -2).passed

    def test_detects_corruption(self):
        Sser = sigma_series(6)
        bad = Sser + BiSeries(6, {(4, 2): 1})
        rep = coeff_relation_check(bad, -1)
        assert not rep.passed
        assert any(v[:2] == (4, 2) for v in rep.violations)

    def test_wrong_weight_fails(self):
        assert not coeff_relation_check(sigma_series(6), -2).passed

    def test_complex_series_rejected(self):
        with pytest.raises(ValueError):
            coeff_relation_check(sigma_series(3).to_complex(), -1)


class TestFiltration:
    def test_sigma(self):
        assert filtration_index(sigma_form()) == 2

    def test_constant(self):
        assert filtration_index(constant_form()) == 1

    def test_square(self):
        assert filtration_index(sigma_form() * sigma_form()) == 3

    def test_bare_series_needs_weight(self):
        with pytest.raises(ValueError):
            filtration_index(sigma_series(8))
        assert filtration_index(sigma_series(8), -1) == 2

    def test_window_too_short(self):
        with pytest.raises(ExceedsWindow):
            filtration_index(sigma_series(1), -1)

    def test_non_settling_profile(self):
        # support that keeps widening at the window edge
        wide = BiSeries(3, {(0, 0): 1, (1, 2): 1, (2, 4): 1, (3, 6): 1})
        with pytest.raises(ExceedsWindow):
            filtration_index(wide, -1)

    def test_tie_is_inclusive(self):
        # min gap -1 and k = -8 give exactly m = 2
        s = BiSeries(3, {(0, 1): 1, (1, 1): 1, (2, 1): 1, (3, 1): 1})
        assert filtration_index(s, -8) == 2
