"""Zero counting on the torus, the Legendre check, Delta and the Delta^m embedding."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from jacobi0.jacobi import ModifiedJacobiForm, UnimodularMatrix, filtration_index
from jacobi0.klein import phi_X
from jacobi0.qseries import ZERO_SERIES, FracQSeries, bs_support_profile, qs_ord
from jacobi0.weierstrass import TWO_PI_I, RationalPair, eta1, eta_tau, wzeta_eval

SliceFn = Callable[[np.ndarray], np.ndarray]

RETRY_OFFSET = 0.017 + 0.013j
MAX_RETRIES = 8
RESIDUAL_LIMIT = 0.01


class ContourError(RuntimeError):
    pass


class CuspOrderViolation(ValueError):
    pass


@lru_cache(maxsize=8)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class TorusContour:
    """Parallelogram ``z0 -> z0+1 -> z0+1+tau0 -> z0+tau0 -> z0``."""

    tau0: complex
    z0: complex = 0.11 + 0.13j
    points_per_segment: int = 64
    min_distance: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "tau0", complex(self.tau0))
        object.__setattr__(self, "z0", complex(self.z0))
        if self.tau0.imag <= 0:
            raise ValueError("Im(tau0) must be positive")
        if self.points_per_segment < 2:
            raise ValueError("need at least 2 quadrature points per segment")

    @property
    def vertices(self) -> tuple[complex, complex, complex, complex]:
        z0, t = self.z0, self.tau0
        return (z0, z0 + 1, z0 + 1 + t, z0 + t)

    def shifted(self, offset: complex) -> "TorusContour":
        return TorusContour(self.tau0, self.z0 + offset, self.points_per_segment, self.min_distance)

    def segments(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % 4]) for i in range(4)]


@dataclass
class ZeroCountReport:
    tau0: complex
    z0: complex
    integral: complex
    count: int
    residual: float
    retries: int
    segment_integrals: tuple[complex, ...] = field(default=())

    def to_json(self) -> dict:
        return {"tau0": [self.tau0.real, self.tau0.imag], "z0": [self.z0.real, self.z0.imag],
                "integral": [self.integral.real, self.integral.imag], "count": self.count,
                "residual": self.residual, "retries": self.retries}


def _derivative(f: SliceFn, z: np.ndarray) -> np.ndarray:
    h = 1e-5 * np.maximum(1.0, np.abs(z))
    return (f(z + h) - f(z - h)) / (2 * h)


def _integrate(f: SliceFn, contour: TorusContour):
    x, w = _gauss_legendre(contour.points_per_segment)
    segs = []
    closest = math.inf
    for a, b in contour.segments():
        half = (b - a) / 2
        z = a + half * (x + 1)
        val = np.asarray(f(z), dtype=complex)
        der = _derivative(f, z)
        if not np.all(np.isfinite(val)) or np.any(val == 0):
            return None, 0.0
        # Newton step |f/f'| estimates the distance to the nearest zero
        dist = np.full(val.shape, np.inf)
        nz = der != 0
        dist[nz] = np.abs(val[nz] / der[nz])
        closest = min(closest, float(np.min(dist)))
        segs.append(complex(np.sum(w * der / val) * half / TWO_PI_I))
    return segs, closest


def count_zeros(f: SliceFn, contour: TorusContour) -> ZeroCountReport:
    """Number of zeros of ``z -> f(z)`` in the parallelogram, by the argument principle.

    ``f`` maps an array of ``z`` to values. The contour is shifted by
    multiples of ``RETRY_OFFSET`` when a zero lies too close to it or the
    integral is not near an integer.
    """
    probe = np.asarray(f(contour.z0 + np.array([0.3, 0.5 + 0.5 * contour.tau0, 0.7 * contour.tau0])))
    if not np.any(probe != 0):
        raise ContourError("slice looks identically zero")
    for retry in range(MAX_RETRIES + 1):
        c = contour.shifted(retry * RETRY_OFFSET)
        segs, closest = _integrate(f, c)
        if segs is None or closest < c.min_distance:
            continue
        total = sum(segs)
        count = int(round(total.real))
        residual = abs(total - count)
        if residual <= RESIDUAL_LIMIT:
            return ZeroCountReport(c.tau0, c.z0, total, count, residual, retry, tuple(segs))
    raise ContourError(f"no admissible contour after {MAX_RETRIES} retries")


def pairing_expected(k: int, tau0: complex) -> tuple[complex, complex]:
    """Opposite-side sums ``(F1 + F3, F2 + F4)`` implied by the translation law.

    ``F1 + F3 = k eta(tau0)/(2 pi i)`` and ``F2 + F4 = -k tau0 eta(1)/(2 pi i)``.
    """
    return k * eta_tau(tau0) / TWO_PI_I, -k * tau0 * eta1(tau0) / TWO_PI_I


def legendre_check(tau: complex, z_base: complex = 0.2 + 0.3j) -> float:
    """``|eta(1) tau - eta(tau) - 2 pi i|`` with ``eta(tau)`` measured as a zeta quasi-period."""
    tau = complex(tau)
    eta_tau_measured = wzeta_eval(tau, z_base + tau) - wzeta_eval(tau, z_base)
    return abs(eta1(tau) * tau - eta_tau_measured - TWO_PI_I)


DELTA_SCALE = TWO_PI_I**12


def delta_coefficients(N: int) -> list[int]:
    """Integer coefficients of ``q prod (1 - q^n)^24`` for ``q^0 .. q^N``."""
    poly = [0] * (N + 1)
    if N >= 1:
        poly[1] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            for e in range(N, n - 1, -1):
                poly[e] -= poly[e - n]
    return poly


def delta_qexp(N_trunc: int) -> FracQSeries:
    """``Delta / (2 pi i)^12`` through ``q^N`` with ``scale = (2 pi i)^12``."""
    return FracQSeries(1, 0, np.array(delta_coefficients(N_trunc), dtype=complex), DELTA_SCALE)


def cusp_order_bound(phi: ModifiedJacobiForm) -> Fraction:
    """``min(n - r0(n)) + k/8``: a lower bound for ``ord_q phi_X`` at every cusp."""
    gaps = bs_support_profile(phi.normalized_series).gaps()
    return Fraction(min(gaps)) + Fraction(phi.weight, 8)


def reduce_unit_square(X: RationalPair) -> RationalPair:
    return RationalPair(X.lam - math.floor(X.lam), X.mu - math.floor(X.mu))


def cusp_orders(phi: ModifiedJacobiForm, X: RationalPair,
                matrices: Sequence[UnimodularMatrix]) -> list[Fraction | str]:
    """``ord_q phi_{XM}`` for each ``M``, with ``XM`` moved into ``[0, 1)^2``."""
    return [qs_ord(phi_X(phi, reduce_unit_square(X @ M))) for M in matrices]


def embedding_weight(k: int, m: int) -> int:
    return k + 12 * m


def embed_g(phi: ModifiedJacobiForm, X_list: Sequence[RationalPair], m: int) -> list[FracQSeries]:
    """``phi -> (phi_{X_j} Delta^m)_j`` for ``-k + 1`` distinct points in ``(0, 1)^2``.

    Raises :class:`CuspOrderViolation` if a component has negative order.
    """
    k = phi.weight
    if k >= 0:
        raise ValueError("the embedding is defined for negative weight")
    if len(X_list) != -k + 1:
        raise ValueError(f"need {-k + 1} indices for weight {k}, got {len(X_list)}")
    if len(set(X_list)) != len(X_list):
        raise ValueError("indices must be distinct")
    for X in X_list:
        if not (0 < X.lam < 1 and 0 < X.mu < 1):
            raise ValueError(f"index {X} is not in (0, 1)^2")
    need = filtration_index(phi)
    if m < need:
        raise ValueError(f"m={m} is below the filtration index {need}")
    out = []
    for X in X_list:
        px = phi_X(phi, X)
        top = math.ceil(px.truncation_order / px.D) + 1
        comp = px * delta_qexp(max(top, 1)) ** m
        o = qs_ord(comp)
        if o != ZERO_SERIES and o < 0:
            raise CuspOrderViolation(f"component for X={X} has ord {o} < 0")
        out.append(comp)
    return out
