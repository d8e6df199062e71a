"""Klein forms and the specializations ``phi_X(tau) = (phi|''_k X)(tau, 0)``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from jacobi0.jacobi import (
    ModifiedJacobiForm,
    UnimodularMatrix,
    VerificationReport,
    compare,
    slash_dprime,
)
from jacobi0.qseries import ZERO_SERIES, FracQSeries, bs_support_profile, qs_ord
from jacobi0.weierstrass import (
    SIGMA_SERIES_SCALE,
    RationalPair,
    colored_partitions,
    det2,
    e_frac,
    eta1,
    eta_point,
    log_normalized_sigma,
    psi,
)

# Members of Gamma(8) used as modularity witnesses for X = (1/2, 0), k = -1
GAMMA8_WITNESSES = (
    UnimodularMatrix(1, 8, 0, 1),
    UnimodularMatrix(1, -8, 0, 1),
    UnimodularMatrix(1, 0, 8, 1),
    UnimodularMatrix(9, 8, 64, 57),
    UnimodularMatrix(17, -8, 32, -15),
)


def klein_eval(X: RationalPair, tau: complex) -> complex:
    """``psi(X) exp(-eta(w) w / 2) sigma(tau, w)`` with ``w = lam tau + mu``.

    The exponentials of the eta factor, rho and the sigma product are summed
    before exponentiating, which keeps the value finite for small ``Im tau``.
    """
    tau = complex(tau)
    if X.is_integral():
        return 0j
    w = X.point(tau)
    e1 = eta1(tau)
    exponent = -0.5 * eta_point(X, tau) * w + 0.5 * e1 * w * w - 1j * math.pi * w
    return complex(psi(X) * SIGMA_SERIES_SCALE * np.exp(exponent + log_normalized_sigma(tau, w)))


def reduce_lambda(X: RationalPair) -> tuple[RationalPair, complex]:
    """Translate ``X`` into ``0 <= lam < 1`` and return the Klein-form ratio.

    ``k_X = ratio * k_{X_r}``, from the weight -1 cocycle law with the integer
    shift ``B = X - X_r``.
    """
    shift = math.floor(X.lam)
    B = RationalPair(shift, 0)
    Xr = X - B
    if shift == 0:
        return Xr, 1 + 0j
    ratio = psi(B) * psi(Xr) * psi(X) * e_frac(det2(Xr, B) / 2)
    return Xr, complex(ratio)


def _klein_denominator(lam: Fraction) -> int:
    b = lam.denominator
    return 1 if b == 1 else 2 * b * b


def _mul_binomial(poly: np.ndarray, coeff: complex, shift: int) -> None:
    """In place: ``poly *= (1 - coeff t^shift)``, truncated to ``len(poly)``."""
    if shift == 0:
        poly *= 1 - coeff
    elif shift < len(poly):
        poly[shift:] -= coeff * poly[:-shift].copy()


def klein_qexp(X: RationalPair, N_trunc: int) -> FracQSeries:
    """Product expansion of the Klein form through ``q^N_trunc``.

    The series carries ``scale = -1/(2 pi i)``, so its coefficients are the
    plain product ``e(mu(lam-1)/2) q^{lam(lam-1)/2} (1 - e(mu) q^lam) prod ...``.
    Integer ``X`` gives the zero series.
    """
    if X.is_integral():
        return FracQSeries(1, 0, np.zeros(N_trunc + 1), SIGMA_SERIES_SCALE)
    Xr, ratio = reduce_lambda(X)
    lam, mu = Xr.lam, Xr.mu
    D = _klein_denominator(lam)
    e0 = int(lam * (lam - 1) / 2 * D)
    L = int(lam * D)
    top = N_trunc * D - e0
    poly = np.zeros(top + 1, dtype=complex)
    poly[0] = 1
    em, emi = e_frac(mu), e_frac(-mu)
    _mul_binomial(poly, em, L)
    n = 1
    while n * D - L <= top:
        _mul_binomial(poly, em, n * D + L)
        _mul_binomial(poly, emi, n * D - L)
        n += 1
    p2 = colored_partitions(top // D)
    part = np.zeros(top + 1, dtype=complex)
    part[::D] = p2[: len(part[::D])]
    poly = np.convolve(poly, part)[: top + 1]
    lead = e_frac(mu * (lam - 1) / 2) * ratio
    return FracQSeries(D, e0, lead * poly, SIGMA_SERIES_SCALE)


@dataclass(frozen=True)
class KleinForm:
    X: RationalPair
    weight: int = -1

    @property
    def level(self) -> int:
        return self.X.level

    @property
    def is_zero(self) -> bool:
        return self.X.is_integral()

    def __call__(self, tau: complex) -> complex:
        return klein_eval(self.X, tau)

    def qexp(self, N_trunc: int) -> FracQSeries:
        return klein_qexp(self.X, N_trunc)


def _phi_x_denominator(u: Fraction) -> int:
    return _klein_denominator(u)


def phi_X(phi: ModifiedJacobiForm, X: RationalPair) -> FracQSeries:
    """Fractional q-series of ``phi_X`` read off the normalized series of ``phi``.

    ``(psi(X) e(v(1-u)/2))^k sum c(n, r) e(v r) q^{n + u r + k u(1-u)/2}``.
    Exponents past the window are valid only if the support profile grows
    by at most one per row beyond ``N``; the truncation order reflects that.
    """
    series = phi.normalized_series
    if series is None:
        raise ValueError(f"{phi.label}: phi_X needs a normalized series")
    k = phi.weight
    u, v = X.lam, X.mu
    D = _phi_x_denominator(u)
    shift = k * u * (1 - u) / 2
    pref = (psi(X) * e_frac(v * (1 - u) / 2)) ** k
    terms: dict[int, complex] = {}
    for (n, r), c in series.nonzero_items():
        e = (n + u * r + shift) * D
        assert e.denominator == 1
        terms[int(e)] = terms.get(int(e), 0) + complex(c) * e_frac(v * r)
    env = bs_support_profile(series).envelope
    valid = (series.N + 1) - abs(u) * (env[-1] + 1) + shift
    top = math.ceil(valid * D) - 1
    terms = {e: pref * c for e, c in terms.items() if e <= top}
    lo = min(terms, default=0)
    return FracQSeries.from_terms(D, terms, max(top, lo), phi.series_scale, min_exponent=lo)


def phi_X_eval(phi: ModifiedJacobiForm, X: RationalPair, tau: complex) -> complex:
    """``phi_X(tau)`` through the evaluator path."""
    return complex(slash_dprime(phi.evaluator, phi.weight, X)(tau, 0j))


@dataclass(frozen=True)
class CongruenceCondition:
    X: RationalPair
    k: int

    def quantities(self, M: UnimodularMatrix) -> tuple[Fraction, Fraction, Fraction]:
        lam, mu = self.X.lam, self.X.mu
        return ((M.a - 1) * lam + M.c * mu,
                M.b * lam + (M.d - 1) * mu,
                self.k * (M.b * lam**2 + (M.d - M.a) * lam * mu - M.c * mu**2))

    def __contains__(self, M: UnimodularMatrix) -> bool:
        return subgroup_member(self, M)


def subgroup_member(cond: CongruenceCondition, M: UnimodularMatrix) -> bool:
    """True iff the three congruence quantities are all even integers."""
    return all(x.denominator == 1 and x.numerator % 2 == 0 for x in cond.quantities(M))


def check_phix_modularity(phi: ModifiedJacobiForm, X: RationalPair, matrices: Sequence[UnimodularMatrix],
                          taus: Sequence[complex], tolerance: float = 1e-8) -> VerificationReport:
    """``(c tau + d)^{-k} phi_X(M tau) = phi_X(tau)`` for the given members.

    Raises if a matrix fails the congruence condition; such a matrix is not
    expected to fix ``phi_X``.
    """
    cond = CongruenceCondition(X, phi.weight)
    for M in matrices:
        if not subgroup_member(cond, M):
            raise ValueError(f"{M} is not in the congruence subgroup for X={X}, k={phi.weight}")

    def pairs():
        for M in matrices:
            for tau in taus:
                lhs = M.automorphy(tau) ** (-phi.weight) * phi_X_eval(phi, X, M.act(tau))
                yield lhs, phi_X_eval(phi, X, tau)

    rep = compare(f"phix-modularity[{phi.label},X={X}]", pairs(), tolerance, relative=True)
    return rep


@dataclass(frozen=True)
class TranslationRatio:
    xi: complex
    order: int | None
    grid_deviation: float
    modulus_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.grid_deviation < self.tolerance and self.modulus_error < self.tolerance


def translation_ratio(phi: ModifiedJacobiForm, X: RationalPair, Xp: RationalPair,
                      taus: Sequence[complex] = (1j, 2j, 0.5 + 1j, 1 / 3 + 2j),
                      tolerance: float = 1e-9) -> TranslationRatio:
    """Measure ``xi = phi_X / phi_X'`` on a grid for ``X = X' mod Z^2``."""
    diff = X - Xp
    if not diff.is_integral():
        raise ValueError(f"{X} and {Xp} are not congruent mod Z^2")
    ratios = []
    for tau in taus:
        den = phi_X_eval(phi, Xp, tau)
        if abs(den) == 0:
            raise ZeroDivisionError(f"phi_X' vanishes at tau={tau}")
        ratios.append(phi_X_eval(phi, X, tau) / den)
    ratios = np.array(ratios)
    xi = complex(ratios.mean())
    spread = float(np.max(np.abs(ratios - xi)))
    modulus = abs(abs(xi) - 1)
    N = max(X.level, Xp.level)
    bound = max(1, 4 * N * N * abs(phi.weight))
    order = next((d for d in range(1, bound + 1) if abs(xi**d - 1) < tolerance), None)
    return TranslationRatio(xi, order, spread, modulus, tolerance)


def klein_order(X: RationalPair) -> Fraction | str:
    """Exact ``ord_q`` of the Klein form: ``lam_r (lam_r - 1)/2`` after reduction."""
    if X.is_integral():
        return ZERO_SERIES
    lam = X.lam - math.floor(X.lam)
    if lam == 0:
        return Fraction(0)
    return lam * (lam - 1) / 2


__all__ = [
    "GAMMA8_WITNESSES", "CongruenceCondition", "KleinForm", "TranslationRatio",
    "check_phix_modularity", "klein_eval", "klein_order", "klein_qexp", "phi_X",
    "phi_X_eval", "qs_ord", "reduce_lambda", "subgroup_member", "translation_ratio",
]
