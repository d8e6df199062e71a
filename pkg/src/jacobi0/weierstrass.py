"""Weierstrass functions on lattices ``[tau, 1]``.

Everything is built from the product expansion of sigma and the Lambert
series for ``eta(1, [tau, 1])``; the second quasi-period is obtained from
the Legendre relation ``eta(tau) = tau * eta(1) - 2 pi i``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from jacobi0 import kernels
from jacobi0.qseries import EXACT, BiSeries, FracQSeries

TWO_PI_I = 2j * math.pi
DEFAULT_MAX_TERMS = 200_000
# product/Lambert terms below e^{-40} relative are dropped
_TAIL_EXPONENT = 40.0


@dataclass(frozen=True)
class RationalPair:
    """``X = (lam, mu)`` in Q^2, kept exact."""

    lam: Fraction
    mu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "mu", Fraction(self.mu))

    @classmethod
    def parse(cls, text: str) -> "RationalPair":
        """Parse ``"p/q,r/s"`` (integers allowed); no float syntax."""
        parts = [t.strip() for t in text.replace("(", "").replace(")", "").split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected 'lam,mu', got {text!r}")
        vals = []
        for t in parts:
            if "." in t or "e" in t.lower():
                raise ValueError(f"rational entries must be p/q, got {t!r}")
            vals.append(Fraction(t))
        return cls(*vals)

    @property
    def level(self) -> int:
        """Least ``N >= 1`` with ``X`` in ``N^{-1} Z^2``."""
        return math.lcm(self.lam.denominator, self.mu.denominator)

    def is_integral(self) -> bool:
        return self.lam.denominator == 1 and self.mu.denominator == 1

    def __add__(self, other: "RationalPair") -> "RationalPair":
        return RationalPair(self.lam + other.lam, self.mu + other.mu)

    def __sub__(self, other: "RationalPair") -> "RationalPair":
        return RationalPair(self.lam - other.lam, self.mu - other.mu)

    def __neg__(self) -> "RationalPair":
        return RationalPair(-self.lam, -self.mu)

    def __matmul__(self, M) -> "RationalPair":
        """Row vector times a 2x2 matrix with attributes ``a, b, c, d``."""
        return RationalPair(self.lam * M.a + self.mu * M.c, self.lam * M.b + self.mu * M.d)

    def point(self, tau: complex) -> complex:
        return float(self.lam) * tau + float(self.mu)

    def __str__(self):
        return f"{self.lam},{self.mu}"


def det2(X: RationalPair, Y: RationalPair) -> Fraction:
    """Determinant of the matrix with rows ``X`` and ``Y``."""
    return X.lam * Y.mu - X.mu * Y.lam


def psi(X: RationalPair) -> int:
    """-1 on ``L - 2L`` (integer pairs not both even), +1 elsewhere."""
    if not X.is_integral():
        return 1
    if X.lam.numerator % 2 == 0 and X.mu.numerator % 2 == 0:
        return 1
    return -1


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError(f"Im(tau) must be positive, got {tau!r}")
    return tau


def terms_needed(tau: complex, z_imag: float = 0.0, max_terms: int = DEFAULT_MAX_TERMS) -> int:
    """Number of product factors after which ``|q^n zeta^{+-1}| < e^{-40}``."""
    tau = _check_tau(tau)
    n = int(math.ceil((abs(z_imag) + _TAIL_EXPONENT / (2 * math.pi)) / tau.imag)) + 2
    if n > max_terms:
        raise ValueError(f"Im(tau)={tau.imag:.3g} needs {n} terms (> max_terms={max_terms})")
    return n


def eta1(tau: complex, max_terms: int = DEFAULT_MAX_TERMS) -> complex:
    """``eta(1, [tau, 1]) = (2 pi i)^2/12 (-1 + 24 sum n q^n / (1 - q^n))``."""
    tau = _check_tau(tau)
    n = terms_needed(tau, 0.0, max_terms) + int(math.log(1 + 1 / tau.imag)) + 1
    return TWO_PI_I**2 / 12 * (-1 + 24 * kernels.lambert(tau, n))


def eta1_series(N: int) -> FracQSeries:
    """q-expansion of ``eta(1, [tau, 1])`` through ``q^N``."""
    sigma1 = [0] * (N + 1)
    for d in range(1, N + 1):
        for m in range(d, N + 1, d):
            sigma1[m] += d
    c = TWO_PI_I**2 / 12
    coeffs = [-c] + [24 * c * sigma1[n] for n in range(1, N + 1)]
    return FracQSeries(1, 0, np.array(coeffs, dtype=complex))


def eta_tau(tau: complex, max_terms: int = DEFAULT_MAX_TERMS) -> complex:
    """``eta(tau, [tau, 1])`` from the Legendre relation."""
    tau = _check_tau(tau)
    return tau * eta1(tau, max_terms) - TWO_PI_I


def eta_point(X: RationalPair, tau: complex, max_terms: int = DEFAULT_MAX_TERMS) -> complex:
    """``eta(lam tau + mu, [tau, 1])`` extended R-linearly."""
    tau = _check_tau(tau)
    if X.lam == 0 and X.mu == 0:
        return 0j
    e1 = eta1(tau, max_terms)
    return float(X.lam) * (tau * e1 - TWO_PI_I) + float(X.mu) * e1


def rho(tau: complex, z, max_terms: int = DEFAULT_MAX_TERMS):
    """``exp(eta(1)/2 z^2 - pi i z)``."""
    e1 = eta1(tau, max_terms)
    z = np.asarray(z, dtype=complex)
    out = np.exp(0.5 * e1 * z * z - 1j * math.pi * z)
    return complex(out) if out.ndim == 0 else out


def log_normalized_sigma(tau: complex, z, max_terms: int = DEFAULT_MAX_TERMS):
    """log of ``(1 - zeta) prod (1 - q^n zeta)(1 - q^n/zeta)/(1 - q^n)^2`` (any branch)."""
    tau = _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(z).ravel()
    n = terms_needed(tau, float(np.max(np.abs(flat.imag))) if flat.size else 0.0, max_terms)
    out = kernels.log_theta(tau, flat, n)
    return complex(out[0]) if z.ndim == 0 else out.reshape(z.shape)


def sigma_eval(tau: complex, z, max_terms: int = DEFAULT_MAX_TERMS):
    """``sigma(z, [tau, 1])`` from the product expansion.

    Accepts a scalar or an array of ``z``. The exponentials of rho and the
    normalized product are combined before exponentiating, so moderately
    large intermediate factors do not overflow.
    """
    tau = _check_tau(tau)
    zz = np.asarray(z, dtype=complex)
    e1 = eta1(tau, max_terms)
    logs = np.asarray(log_normalized_sigma(tau, zz, max_terms))
    out = -np.exp(0.5 * e1 * zz * zz - 1j * math.pi * zz + logs) / TWO_PI_I
    return complex(out) if out.ndim == 0 else out


def sigma_normalized_eval(tau: complex, z, max_terms: int = DEFAULT_MAX_TERMS):
    """The integer-coefficient series ``S = -2 pi i rho^{-1} sigma`` evaluated directly."""
    out = np.exp(np.asarray(log_normalized_sigma(tau, z, max_terms)))
    return complex(out) if out.ndim == 0 else out


def is_lattice_point(tau: complex, z: complex, tol: float = 1e-12) -> bool:
    a = z.imag / tau.imag
    b = z.real - a * tau.real
    return abs(a - round(a)) < tol and abs(b - round(b)) < tol


def wzeta_eval(tau: complex, z, max_terms: int = DEFAULT_MAX_TERMS):
    """Weierstrass zeta ``sigma'/sigma`` on ``[tau, 1]``, as a logarithmic derivative."""
    tau = _check_tau(tau)
    zz = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zz).ravel()
    for w in flat:
        if is_lattice_point(tau, complex(w)):
            raise ValueError(f"z={complex(w)!r} is a lattice point (pole of zeta)")
    n = terms_needed(tau, float(np.max(np.abs(flat.imag))), max_terms)
    e1 = eta1(tau, max_terms)
    out = e1 * flat - 1j * math.pi - TWO_PI_I * kernels.theta_logderiv(tau, flat, n)
    return complex(out[0]) if zz.ndim == 0 else out.reshape(zz.shape)


def _series_mul_int(a: list[int], b: list[int], N: int) -> list[int]:
    out = [0] * (N + 1)
    for i, x in enumerate(a[: N + 1]):
        if x:
            for j, y in enumerate(b[: N + 1 - i]):
                out[i + j] += x * y
    return out


def colored_partitions(N: int, colors: int = 2) -> list[int]:
    """Coefficients of ``prod (1 - q^n)^{-colors}`` through ``q^N``."""
    p = [1] + [0] * N
    for _ in range(colors):
        for n in range(1, N + 1):
            for m in range(n, N + 1):
                p[m] += p[m - n]
    return p


@lru_cache(maxsize=32)
def sigma_series(N: int) -> BiSeries:
    """Normalized sigma series ``S = (1-zeta) prod (1-q^n zeta)(1-q^n/zeta)/(1-q^n)^2``.

    Exact integer coefficients through ``q^N``; ``sigma = -rho S / (2 pi i)``.
    """
    S = BiSeries(N, {(0, 0): 1, (0, 1): -1})
    for n in range(1, N + 1):
        S = S * BiSeries(N, {(0, 0): 1, (n, 1): -1})
        S = S * BiSeries(N, {(0, 0): 1, (n, -1): -1})
    p2 = colored_partitions(N)
    return S * BiSeries(N, {(n, 0): c for n, c in enumerate(p2)}, EXACT)


SIGMA_SERIES_SCALE = -1 / TWO_PI_I
"""``rho^{-1} sigma = SIGMA_SERIES_SCALE * S``."""


def e_frac(x: Fraction) -> complex:
    """``exp(2 pi i x)`` for rational ``x``, exact for denominators 1, 2, 4."""
    x = Fraction(x) % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): -1 + 0j,
             Fraction(1, 4): 1j, Fraction(3, 4): -1j}
    if x in exact:
        return exact[x]
    return cmath.exp(TWO_PI_I * float(x))
