"""Modified slash operators and modified Jacobi forms of index zero."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from jacobi0.qseries import EXACT, BiSeries, EvalPoint, bs_eval, bs_mul, bs_support_profile
from jacobi0.weierstrass import (
    SIGMA_SERIES_SCALE,
    RationalPair,
    det2,
    e_frac,
    eta_point,
    psi,
    rho,
    sigma_eval,
    sigma_series,
)

Evaluator = Callable[[complex, complex], complex]


class ExceedsWindow(ValueError):
    """The truncation window is too short to decide the question asked."""


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"det({self.a},{self.b};{self.c},{self.d}) != 1")

    @classmethod
    def parse(cls, text: str) -> "UnimodularMatrix":
        vals = [int(t) for t in text.replace(";", ",").split(",")]
        if len(vals) != 4:
            raise ValueError(f"expected 'a,b,c,d', got {text!r}")
        return cls(*vals)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                                self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def automorphy(self, tau: complex) -> complex:
        return self.c * tau + self.d

    def __str__(self):
        return f"({self.a},{self.b};{self.c},{self.d})"


I2 = UnimodularMatrix(1, 0, 0, 1)
S = UnimodularMatrix(0, -1, 1, 0)
T = UnimodularMatrix(1, 1, 0, 1)
DEFAULT_MATRICES = (S, T, T.inverse(), S @ T, UnimodularMatrix(1, 1, 1, 2))
DEFAULT_TAUS = (1j, 2j, 0.5 + 1j, 1 / 3 + 2j)
DEFAULT_ZS = (0.1 + 0j, 0.2 + 0.3j, -0.15 + 0.05j)


@dataclass(frozen=True)
class ModifiedJacobiForm:
    """A weight-``k`` function of ``(tau, z)`` with an optional series for ``rho^k phi``.

    ``rho^k phi = series_scale * normalized_series`` when the series is
    present; the scale lets the series keep exact rational coefficients.
    """

    weight: int
    evaluator: Evaluator
    normalized_series: BiSeries | None = None
    series_scale: complex = 1
    label: str = ""

    def __call__(self, tau, z):
        return self.evaluator(tau, z)

    def __mul__(self, other: "ModifiedJacobiForm") -> "ModifiedJacobiForm":
        return graded_mul(self, other)

    def scaled(self, c: complex, label: str | None = None) -> "ModifiedJacobiForm":
        ev = self.evaluator
        return ModifiedJacobiForm(self.weight, lambda tau, z: c * ev(tau, z), self.normalized_series,
                                  self.series_scale * c, label or f"{c}*{self.label}")

    def series_deviation(self, tau: complex, z: complex) -> float:
        """``|phi - rho^{-k} scale eval(series)|`` at one point."""
        if self.normalized_series is None:
            raise ValueError(f"{self.label}: no normalized series")
        approx = rho(tau, z) ** (-self.weight) * self.series_scale * bs_eval(
            self.normalized_series, EvalPoint(tau, z))
        return abs(self(tau, z) - approx)


def sigma_form(trunc: int = 12) -> ModifiedJacobiForm:
    """Weierstrass sigma as a weight -1 form with its normalized series."""
    return ModifiedJacobiForm(-1, sigma_eval, sigma_series(trunc), SIGMA_SERIES_SCALE, "sigma")


def constant_form(value=1, trunc: int = 12) -> ModifiedJacobiForm:
    def ev(tau, z):
        return value + 0 * np.asarray(z, dtype=complex)
    return ModifiedJacobiForm(0, ev, BiSeries.constant(1, trunc, EXACT), value, f"const({value})")


def slash_prime(phi: Evaluator, k: int, M: UnimodularMatrix) -> Evaluator:
    """``(tau, z) -> (c tau + d)^{-k} phi(M tau, z / (c tau + d))``."""
    def sl(tau, z):
        j = M.automorphy(tau)
        return j ** (-k) * phi(M.act(tau), np.asarray(z) / j)
    return sl


def dprime_factor(X: RationalPair, k: int, tau: complex, z) -> complex:
    """``(psi(X) exp(eta(w)(z + w/2)))^k`` with ``w = lam tau + mu``."""
    w = X.point(tau)
    if X.lam == 0 and X.mu == 0:
        return 1 + 0 * np.asarray(z, dtype=complex)
    return psi(X) ** k * np.exp(k * eta_point(X, tau) * (np.asarray(z) + 0.5 * w))


def slash_dprime(phi: Evaluator, k: int, X: RationalPair) -> Evaluator:
    """``(tau, z) -> (psi(X) exp(eta(w)(z + w/2)))^k phi(tau, z + w)``."""
    def sl(tau, z):
        return dprime_factor(X, k, tau, z) * phi(tau, np.asarray(z) + X.point(tau))
    return sl


def cocycle_factor(X: RationalPair, Xp: RationalPair, k: int) -> complex:
    """``(psi(X) psi(X') psi(X+X') e(det(X'; X)/2))^k``."""
    sign = psi(X) * psi(Xp) * psi(X + Xp)
    return complex((sign * e_frac(det2(Xp, X) / 2)) ** k)


@dataclass
class VerificationReport:
    identity: str
    max_abs_deviation: float
    samples: int
    tolerance: float
    max_rel_deviation: float = 0.0
    relative: bool = False
    details: dict = field(default_factory=dict)
    exact: bool = False

    @property
    def passed(self) -> bool:
        dev = self.max_rel_deviation if self.relative else self.max_abs_deviation
        if self.exact:
            return dev == 0
        return bool(np.isfinite(dev) and dev < self.tolerance)

    def to_json(self) -> dict:
        return {"identity": self.identity, "max_abs_deviation": float(self.max_abs_deviation),
                "samples": self.samples, "pass": self.passed, "tolerance": self.tolerance}

    def line(self) -> str:
        dev = self.max_rel_deviation if self.relative else self.max_abs_deviation
        kind = "rel" if self.relative else "abs"
        if self.exact:
            return f"{'PASS' if self.passed else 'FAIL'} {self.identity}: exact, mismatch {dev:g} ({self.samples} samples)"
        rel = "<" if self.passed else ">="
        return f"{'PASS' if self.passed else 'FAIL'} {self.identity}: {kind} dev {dev:.3e} {rel} {self.tolerance:g} ({self.samples} samples)"


def compare(identity: str, pairs: Iterable[tuple[complex, complex]], tolerance: float,
            relative: bool = False) -> VerificationReport:
    """Report the worst deviation between paired (lhs, rhs) values."""
    abs_dev = rel_dev = 0.0
    n = 0
    for lhs, rhs in pairs:
        d = abs(complex(lhs) - complex(rhs))
        abs_dev = max(abs_dev, d)
        rel_dev = max(rel_dev, d / max(abs(complex(rhs)), 1e-300))
        n += 1
    return VerificationReport(identity, abs_dev, n, tolerance, rel_dev, relative)


def grid(taus: Sequence[complex] = DEFAULT_TAUS, zs: Sequence[complex] = DEFAULT_ZS):
    return [(t, z) for t in taus for z in zs]


def verify_cocycles(phi: Evaluator, k: int, pairs: Sequence[tuple[RationalPair, RationalPair]],
                    matrices: Sequence[UnimodularMatrix], xs: Sequence[RationalPair],
                    points=None, tolerance: float = 1e-9, label: str = "phi", relative: bool = True):
    """Check both cocycle laws of the double-prime operator at sample points.

    (i)  ``(phi|''X)|''X' = (psi psi psi e(det/2))^k phi|''(X+X')`` for each pair;
    (ii) ``(phi|'M)|''(XM) = (phi|''X)|'M`` for each ``M`` and ``X``.
    Both sides are evaluated independently. Deviations are relative by
    default, since test functions need not stay of unit size. Returns the
    two reports.
    """
    points = list(points or grid())

    def first():
        for X, Xp in pairs:
            lhs_f = slash_dprime(slash_dprime(phi, k, X), k, Xp)
            rhs_f = slash_dprime(phi, k, X + Xp)
            c = cocycle_factor(X, Xp, k)
            for tau, z in points:
                yield lhs_f(tau, z), c * rhs_f(tau, z)

    def second():
        for M in matrices:
            for X in xs:
                lhs_f = slash_dprime(slash_prime(phi, k, M), k, X @ M)
                rhs_f = slash_prime(slash_dprime(phi, k, X), k, M)
                for tau, z in points:
                    yield lhs_f(tau, z), rhs_f(tau, z)

    return (compare(f"cocycle-i[{label},k={k}]", first(), tolerance, relative),
            compare(f"cocycle-ii[{label},k={k}]", second(), tolerance, relative))


def graded_mul(phi: ModifiedJacobiForm, phi2: ModifiedJacobiForm) -> ModifiedJacobiForm:
    """Pointwise product; weights add and normalized series multiply."""
    ev1, ev2 = phi.evaluator, phi2.evaluator
    series = None
    if phi.normalized_series is not None and phi2.normalized_series is not None:
        series = bs_mul(phi.normalized_series, phi2.normalized_series)
    return ModifiedJacobiForm(phi.weight + phi2.weight, lambda tau, z: ev1(tau, z) * ev2(tau, z),
                              series, phi.series_scale * phi2.series_scale,
                              f"{phi.label}*{phi2.label}")


def relation_partner(n: int, r: int, k: int, lam: int) -> tuple[int, int, int]:
    """Partner index and sign of ``c(n, r) = (-1)^{lam k} c(n - r lam - k(lam^2+lam)/2, r + lam k)``."""
    return (n - r * lam - k * (lam * lam + lam) // 2, r + lam * k, -1 if (lam * k) % 2 else 1)


@dataclass
class CoeffRelationReport:
    k: int
    lambdas: tuple[int, ...]
    checked: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def coeff_relation_check(series: BiSeries, k: int, lambdas: Iterable[int] = (-2, -1, 1, 2)) -> CoeffRelationReport:
    """Check the translation symmetry of ``c(n, r)`` exactly over the window.

    Every ``(n, r)`` with ``0 <= n <= N`` in a band covering the support is
    tested; partners with negative ``n`` count as known zeros, partners
    beyond ``N`` are skipped.
    """
    if series.field != EXACT:
        raise ValueError("coefficient relation is checked on exact series only")
    lambdas = tuple(lambdas)
    rs = [r for (_, r) in series.coeffs] or [0]
    pad = max((abs(l * k) for l in lambdas), default=0) + 1
    lo, hi = min(rs) - pad, max(rs) + pad
    report = CoeffRelationReport(k, lambdas, 0)
    for lam in lambdas:
        for n in range(series.N + 1):
            for r in range(lo, hi + 1):
                n2, r2, sign = relation_partner(n, r, k, lam)
                if n2 > series.N:
                    continue
                other = series[(n2, r2)] if n2 >= 0 else 0
                report.checked += 1
                if series[(n, r)] != sign * other:
                    report.violations.append((n, r, lam, series[(n, r)], sign * other))
    return report


def filtration_index(phi: ModifiedJacobiForm | BiSeries, k: int | None = None) -> int:
    """Smallest ``m >= 1`` with ``min(n - r0(n)) + k/8 >= -m``.

    ``r0`` is the monotone envelope of the nonzero support. Raises
    :class:`ExceedsWindow` unless ``n - r0(n)`` is nondecreasing at the
    window edge and above its minimum there.
    """
    if isinstance(phi, ModifiedJacobiForm):
        series, k = phi.normalized_series, phi.weight if k is None else k
        if series is None:
            raise ValueError(f"{phi.label}: no normalized series")
    else:
        series = phi
        if k is None:
            raise ValueError("weight k is required for a bare series")
    gaps = bs_support_profile(series).gaps()
    if len(gaps) < 2 or gaps[-1] < gaps[-2] or gaps[-1] <= min(gaps):
        raise ExceedsWindow(f"n - r0(n) = {gaps} does not settle inside the window")
    bound = -(Fraction(min(gaps)) + Fraction(k, 8))
    return max(1, math.ceil(bound))
