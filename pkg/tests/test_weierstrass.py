import cmath
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from jacobi0.jacobi import DEFAULT_MATRICES, UnimodularMatrix
from jacobi0.weierstrass import (
    TWO_PI_I,
    RationalPair,
    colored_partitions,
    e_frac,
    eta1,
    eta1_series,
    eta_point,
    eta_tau,
    psi,
    rho,
    sigma_eval,
    sigma_normalized_eval,
    sigma_series,
    terms_needed,
    wzeta_eval,
)


def laurent_product_oracle(N):
    """S through q^N by multiplying dict polynomials, independent of BiSeries."""
    def mul(a, b):
        out = {}
        for (n, r), c in a.items():
            for (m, s), d in b.items():
                if n + m <= N:
                    out[(n + m, r + s)] = out.get((n + m, r + s), 0) + c * d
        return out

    acc = {(0, 0): 1, (0, 1): -1}
    for n in range(1, N + 1):
        acc = mul(acc, {(0, 0): 1, (n, 1): -1})
        acc = mul(acc, {(0, 0): 1, (n, -1): -1})
    # two-coloured partitions by direct enumeration of (p1, p2) pairs
    p1 = [0] * (N + 1)
    for parts in product(*[range(N // k + 1) for k in range(1, N + 1)]):
        w = sum((k + 1) * m for k, m in enumerate(parts))
        if w <= N:
            p1[w] += 1
    p2 = [sum(p1[i] * p1[n - i] for i in range(n + 1)) for n in range(N + 1)]
    acc = mul(acc, {(n, 0): c for n, c in enumerate(p2)})
    return {k: v for k, v in acc.items() if v}


class TestSigmaSeries:
    def test_matches_independent_oracle(self):
        S = sigma_series(6)
        assert {k: int(v) for k, v in S.nonzero_items()} == laurent_product_oracle(6)

    def test_row_four_oracle(self):
        row = {r: int(c) for r, c in sigma_series(5).row(4).items()}
        assert row == {-2: 3, -1: -22, 0: 51, 1: -51, 2: 22, 3: -3}

    def test_low_rows(self):
        S = sigma_series(3)
        assert {r: int(c) for r, c in S.row(1).items()} == {-1: -1, 0: 3, 1: -3, 2: 1}
        assert {r: int(c) for r, c in S.row(3).items()} == {-2: 1, -1: -9, 0: 22, 1: -22, 2: 9, 3: -1}

    def test_two_coloured_partitions(self):
        assert colored_partitions(5) == [1, 2, 5, 10, 20, 36]

    def test_coefficient_relation_k_minus_one(self):
        S = sigma_series(10)
        for (n, r), c in S.nonzero_items():
            n2, r2 = n - r + 1, r - 1
            if 0 <= n2 <= S.N:
                assert c == -S[(n2, r2)]

    @pytest.mark.parametrize("tau,z", [(1j, 0.1), (0.5 + 1j, 0.2 + 0.3j), (1 / 3 + 2j, -0.15 + 0.05j)])
    def test_series_matches_product(self, tau, z):
        approx = sigma_series(14)(tau, z)
        assert abs(approx - sigma_normalized_eval(tau, z)) < 1e-9


class TestPsi:
    @pytest.mark.parametrize("X,expected", [((3, 2), -1), ((2, 2), 1), (("1/2", 0), 1), ((1, 0), -1), ((0, 0), 1)])
    def test_values(self, X, expected):
        assert psi(RationalPair(*X)) == expected

    def test_matches_closed_form_on_lattice(self):
        for lam in range(-3, 4):
            for mu in range(-3, 4):
                assert psi(RationalPair(lam, mu)) == (-1) ** ((lam * mu + lam + mu) % 2)

    def test_sl2_invariance(self):
        xs = [RationalPair(a, b) for a in range(-2, 3) for b in range(-2, 3)]
        xs += [RationalPair("1/2", "1/3"), RationalPair("-3/4", 2)]
        for X in xs:
            for M in DEFAULT_MATRICES + (UnimodularMatrix(2, 1, 1, 1),):
                assert psi(X @ M) == psi(X)


class TestRationalPair:
    def test_parse(self):
        X = RationalPair.parse("1/3,-2/5")
        assert X.lam == Fraction(1, 3) and X.mu == Fraction(-2, 5)
        assert X.level == 15

    @pytest.mark.parametrize("bad", ["0.5,1", "1/2", "1/2,1/3,1", "a,b", "1e3,1"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            RationalPair.parse(bad)

    def test_e_frac_exact(self):
        assert e_frac(Fraction(1, 2)) == -1
        assert e_frac(Fraction(-1, 4)) == -1j
        assert abs(e_frac(Fraction(1, 3)) - cmath.exp(TWO_PI_I / 3)) < 1e-15


class TestEta:
    def test_eta1_at_i_is_pi(self):
        assert abs(eta1(1j) - math.pi) < 1e-12

    def test_series_coefficients(self):
        s = eta1_series(3)
        assert s.coefficient(0) == pytest.approx(math.pi**2 / 3)
        assert s.coefficient(1) == pytest.approx(-8 * math.pi**2)

    def test_series_agrees_with_lambert(self):
        tau = 0.3 + 1.2j
        assert abs(eta1_series(30).evaluate(tau) - eta1(tau)) < 1e-10

    def test_eta_point(self):
        tau = 0.2 + 1.3j
        assert eta_point(RationalPair(0, 1), tau) == pytest.approx(eta1(tau))
        assert eta_point(RationalPair(0, 0), tau) == 0
        assert abs(eta_point(RationalPair(1, 0), 1j) + 1j * math.pi) < 1e-12

    def test_eta1_modular_transform(self):
        # E2 quasi-modularity: eta1(-1/tau) = tau^2 eta1(tau) - 2 pi i tau
        tau = 0.3 + 1.1j
        assert abs(eta1(-1 / tau) - (tau**2 * eta1(tau) - TWO_PI_I * tau)) < 1e-9

    def test_small_imag_tau(self):
        # S maps 3+0.05i to Im(tau) of about 5.5e-3
        tau = complex(UnimodularMatrix(0, -1, 1, 0).act(3 + 0.05j))
        assert np.isfinite(eta1(tau))

    def test_term_cap(self):
        with pytest.raises(ValueError):
            terms_needed(1e-7j, 0, max_terms=1000)


class TestRho:
    def test_zero(self):
        assert rho(1j, 0) == pytest.approx(1)

    def test_symmetric_product(self):
        v = rho(1j, 0.3) * rho(1j, -0.3)
        assert abs(v - math.exp(math.pi * 0.09)) < 1e-12
        assert abs(v - 1.32680) < 1e-4  # 1.326765 to six places

    def test_at_one(self):
        assert abs(rho(1j, 1) + math.exp(math.pi / 2)) < 1e-10
        assert abs(rho(1j, 1) - (-4.81048)) < 1e-5


class TestSigmaAndZeta:
    def test_sigma_near_zero(self):
        assert abs(sigma_eval(1j, 1e-6) / 1e-6 - 1) < 1e-5

    def test_sigma_odd(self):
        z = 0.3 + 0.1j
        assert abs(sigma_eval(2j, -z) + sigma_eval(2j, z)) < 1e-12

    def test_sigma_vectorised(self):
        zs = np.array([0.1, 0.2 + 0.3j])
        out = sigma_eval(1j, zs)
        assert out.shape == (2,)
        assert out[1] == pytest.approx(sigma_eval(1j, zs[1]))

    def test_quasi_periodicity(self):
        tau, z = 0.5 + 1j, 0.2 + 0.1j
        for lam, mu in [(1, 0), (0, 1), (1, 1), (2, 0)]:
            X = RationalPair(lam, mu)
            w = X.point(tau)
            lhs = sigma_eval(tau, z + w)
            rhs = psi(X) * np.exp(eta_point(X, tau) * (z + w / 2)) * sigma_eval(tau, z)
            assert abs(lhs / rhs - 1) < 1e-8

    def test_wzeta_odd(self):
        z = 0.3 + 0.1j
        assert abs(wzeta_eval(1j, -z) + wzeta_eval(1j, z)) < 1e-9

    def test_wzeta_quasi_periods(self):
        tau, z = 2j, 0.2 + 0.3j
        assert abs(wzeta_eval(tau, z + 1) - wzeta_eval(tau, z) - eta1(tau)) < 1e-9
        assert abs(wzeta_eval(tau, z + tau) - wzeta_eval(tau, z) - eta_point(RationalPair(1, 0), tau)) < 1e-9
        assert abs(eta_tau(tau) - eta_point(RationalPair(1, 0), tau)) < 1e-12

    def test_wzeta_is_log_derivative(self):
        tau, z, h = 0.5 + 1j, 0.2 + 0.1j, 1e-5
        fd = (sigma_eval(tau, z + h) - sigma_eval(tau, z - h)) / (2 * h) / sigma_eval(tau, z)
        assert abs(fd - wzeta_eval(tau, z)) < 1e-7

    def test_wzeta_rejects_lattice_point(self):
        with pytest.raises(ValueError):
            wzeta_eval(1j, 1 + 1j)

    def test_rejects_lower_half_plane(self):
        with pytest.raises(ValueError):
            sigma_eval(-1j, 0.1)
