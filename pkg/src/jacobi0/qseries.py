"""Truncated bivariate Fourier-Laurent series and fractional q-series.

:class:`BiSeries` holds ``sum c(n, r) q^n zeta^r`` for ``0 <= n <= N`` with
either exact rational coefficients or complex floats. :class:`FracQSeries`
holds ``scale * sum c(e) q^(e/D)`` with possibly negative ``e``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from jacobi0 import kernels

EXACT = "exact"
COMPLEX = "complex"
FIELDS = (EXACT, COMPLEX)

# |q| <= e^{-pi} keeps the truncation tail geometric
MIN_IMAG_TAU = 0.5

# Int64 kernel is used while |coeff| products provably stay below this
_INT64_SAFE = 2**62


class FieldMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPoint:
    """A point ``(tau, z)`` together with the evaluation policy."""

    tau: complex
    z: complex = 0j
    tolerance: float = 1e-9
    max_terms: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "z", complex(self.z))
        if self.tau.imag <= 0:
            raise ValueError(f"Im(tau) must be positive, got {self.tau!r}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")

    @property
    def q(self) -> complex:
        return cmath.exp(2j * math.pi * self.tau)

    @property
    def zeta(self) -> complex:
        return cmath.exp(2j * math.pi * self.z)


def _as_exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact series need rational coefficients, got {type(x).__name__}")


@dataclass(frozen=True)
class BiSeries:
    """Truncated series ``sum_{0<=n<=N} sum_r c(n, r) q^n zeta^r``.

    Coefficients are held in an immutable mapping ``(n, r) -> value``.
    Stored zeros are allowed; the support profile only looks at nonzero
    entries.
    """

    N: int
    coeffs: Mapping[tuple[int, int], object] = dc_field(default_factory=dict)
    field: str = EXACT

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("truncation order must be nonnegative")
        if self.field not in FIELDS:
            raise ValueError(f"unknown field tag {self.field!r}")
        conv = _as_exact if self.field == EXACT else complex
        clean = {}
        for (n, r), c in dict(self.coeffs).items():
            n, r = int(n), int(r)
            if not 0 <= n <= self.N:
                raise ValueError(f"term (n={n}, r={r}) outside truncation window 0..{self.N}")
            clean[(n, r)] = conv(c)
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    # construction helpers

    @classmethod
    def constant(cls, value=1, N: int = 0, field: str = EXACT) -> "BiSeries":
        return cls(N, {(0, 0): value}, field)

    @classmethod
    def from_rows(cls, rows: Mapping[int, Mapping[int, object]], N: int, field: str = EXACT) -> "BiSeries":
        return cls(N, {(n, r): c for n, row in rows.items() for r, c in row.items()}, field)

    def __getitem__(self, key: tuple[int, int]):
        return self.coeffs.get(key, Fraction(0) if self.field == EXACT else 0j)

    def row(self, n: int) -> dict[int, object]:
        return {r: c for (m, r), c in sorted(self.coeffs.items()) if m == n and c != 0}

    def nonzero_items(self):
        return sorted((k, c) for k, c in self.coeffs.items() if c != 0)

    def truncate(self, N: int) -> "BiSeries":
        N = min(N, self.N)
        return BiSeries(N, {k: c for k, c in self.coeffs.items() if k[0] <= N}, self.field)

    def to_complex(self) -> "BiSeries":
        if self.field == COMPLEX:
            return self
        return BiSeries(self.N, {k: complex(c) for k, c in self.coeffs.items()}, COMPLEX)

    def is_integral(self) -> bool:
        return self.field == EXACT and all(c.denominator == 1 for c in self.coeffs.values())

    # arithmetic

    def _check_field(self, other: "BiSeries"):
        if self.field != other.field:
            raise FieldMismatchError(f"cannot combine {self.field} and {other.field} series")

    def __add__(self, other: "BiSeries") -> "BiSeries":
        if not isinstance(other, BiSeries):
            return NotImplemented
        self._check_field(other)
        N = min(self.N, other.N)
        out = {k: c for k, c in self.coeffs.items() if k[0] <= N}
        for k, c in other.coeffs.items():
            if k[0] <= N:
                out[k] = out.get(k, 0) + c
        return BiSeries(N, out, self.field)

    def __neg__(self) -> "BiSeries":
        return BiSeries(self.N, {k: -c for k, c in self.coeffs.items()}, self.field)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + (-other)

    def scale(self, s) -> "BiSeries":
        s = _as_exact(s) if self.field == EXACT else complex(s)
        return BiSeries(self.N, {k: s * c for k, c in self.coeffs.items()}, self.field)

    def __mul__(self, other):
        if isinstance(other, BiSeries):
            return bs_mul(self, other)
        return NotImplemented

    def __pow__(self, k: int) -> "BiSeries":
        if k < 0:
            raise ValueError("only nonnegative powers")
        result = BiSeries.constant(1, self.N, self.field)
        base = self
        while k:
            if k & 1:
                result = bs_mul(result, base)
            k >>= 1
            if k:
                base = bs_mul(base, base)
        return result

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return (self.N == other.N and self.field == other.field
                and dict(self.nonzero_items()) == dict(other.nonzero_items()))

    def __hash__(self):
        return hash((self.N, self.field, tuple(self.nonzero_items())))

    def __call__(self, tau, z=0j) -> complex:
        return bs_eval(self, EvalPoint(tau, z))

    def __repr__(self):
        return f"BiSeries(N={self.N}, field={self.field!r}, terms={len(self.coeffs)})"

    # json

    def to_json(self) -> dict:
        terms = []
        for (n, r), c in sorted(self.coeffs.items()):
            if self.field == EXACT:
                terms.append({"n": n, "r": r, "num": str(c.numerator), "den": str(c.denominator)})
            else:
                terms.append({"n": n, "r": r, "re": c.real, "im": c.imag})
        return {"kind": "biseries", "field": self.field, "N": self.N, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "BiSeries":
        if data.get("kind") != "biseries":
            raise ValueError("not a biseries document")
        fld = data["field"]
        coeffs = {}
        for t in data["terms"]:
            if fld == EXACT:
                c = Fraction(int(t["num"]), int(t["den"]))
            else:
                c = complex(t["re"], t["im"])
            coeffs[(t["n"], t["r"])] = c
        return cls(int(data["N"]), coeffs, fld)


def _dense(a: BiSeries, dtype):
    rs = [r for (_, r) in a.coeffs] or [0]
    lo, hi = min(rs), max(rs)
    arr = np.zeros((a.N + 1, hi - lo + 1), dtype=dtype)
    for (n, r), c in a.coeffs.items():
        arr[n, r - lo] = int(c) if dtype is np.int64 else complex(c)
    return arr, lo


def _exact_mul(a: BiSeries, b: BiSeries, N: int) -> dict:
    brows: dict[int, list] = {}
    for (m, s), d in b.coeffs.items():
        if d != 0:
            brows.setdefault(m, []).append((s, d))
    out: dict[tuple[int, int], Fraction] = {}
    for (n, r), c in a.coeffs.items():
        if c == 0:
            continue
        for m in range(0, N - n + 1):
            for s, d in brows.get(m, ()):
                key = (n + m, r + s)
                out[key] = out.get(key, 0) + c * d
    return out


def bs_mul(a: BiSeries, b: BiSeries) -> BiSeries:
    """Product of two series, truncated to ``min(a.N, b.N)``."""
    a._check_field(b)
    N = min(a.N, b.N)
    if not a.coeffs or not b.coeffs:
        return BiSeries(N, {}, a.field)
    if a.field == EXACT:
        if a.is_integral() and b.is_integral():
            amax = max(abs(int(c)) for c in a.coeffs.values())
            bmax = max(abs(int(c)) for c in b.coeffs.values())
            if amax * bmax * (len(a.coeffs) + len(b.coeffs)) < _INT64_SAFE:
                da, la = _dense(a.truncate(N), np.int64)
                db, lb = _dense(b.truncate(N), np.int64)
                out = kernels.conv2d(da, db, N + 1)
                n_idx, r_idx = np.nonzero(out)
                return BiSeries(N, {(int(n), int(r) + la + lb): int(out[n, r])
                                    for n, r in zip(n_idx, r_idx)}, EXACT)
        return BiSeries(N, _exact_mul(a, b, N), EXACT)
    da, la = _dense(a.truncate(N), complex)
    db, lb = _dense(b.truncate(N), complex)
    out = kernels.conv2d(da, db, N + 1)
    n_idx, r_idx = np.nonzero(out)
    return BiSeries(N, {(int(n), int(r) + la + lb): complex(out[n, r])
                        for n, r in zip(n_idx, r_idx)}, COMPLEX)


def bs_eval(a: BiSeries, p: EvalPoint, min_imag: float = MIN_IMAG_TAU) -> complex:
    """Evaluate ``sum c(n, r) e(n tau + r z)``."""
    if p.tau.imag < min_imag:
        raise ValueError(f"Im(tau)={p.tau.imag} below evaluation floor {min_imag}; "
                         "truncated series are not reliable there")
    total = 0j
    for (n, r), c in a.coeffs.items():
        if c != 0:
            total += complex(c) * cmath.exp(2j * math.pi * (n * p.tau + r * p.z))
    return total


def row_magnitudes(a: BiSeries, p: EvalPoint) -> list[float]:
    """``|sum_r c(n, r) q^n zeta^r|`` bounds per row (sum of absolute terms)."""
    qa = abs(p.q)
    za = abs(p.zeta)
    rows = [0.0] * (a.N + 1)
    for (n, r), c in a.coeffs.items():
        rows[n] += abs(complex(c)) * qa**n * za**r
    return rows


def product_tail_bound(a: BiSeries, b: BiSeries, p: EvalPoint) -> float:
    """Bound on ``|eval(a)eval(b) - eval(a*b)|`` caused by truncating the product."""
    N = min(a.N, b.N)
    ra, rb = row_magnitudes(a, p), row_magnitudes(b, p)
    return sum(x * y for n, x in enumerate(ra) for m, y in enumerate(rb)
               if n + m > N or n > N or m > N)


@dataclass(frozen=True)
class SupportProfile:
    minimal: tuple[int, ...]
    envelope: tuple[int, ...]

    def gaps(self) -> tuple[int, ...]:
        """``n - r0(n)`` over the window, using the envelope."""
        return tuple(n - r for n, r in enumerate(self.envelope))


def bs_support_profile(a: BiSeries) -> SupportProfile:
    """Minimal ``r0(n)`` from the nonzero support and its running maximum."""
    minimal = [0] * (a.N + 1)
    for (n, r), c in a.coeffs.items():
        if c != 0:
            minimal[n] = max(minimal[n], abs(r))
    envelope = list(minimal)
    for n in range(1, len(envelope)):
        envelope[n] = max(envelope[n], envelope[n - 1])
    return SupportProfile(tuple(minimal), tuple(envelope))


ZERO_SERIES = "zero-series"


@dataclass(frozen=True)
class FracQSeries:
    """``scale * sum_{e=min_exponent}^{truncation_order} c(e) q^(e/D)``.

    ``scale`` lets series with a transcendental overall factor (such as
    ``-1/(2 pi i)`` or ``(2 pi i)^12``) keep simple coefficients.
    """

    D: int
    min_exponent: int
    coeffs: np.ndarray
    scale: complex = 1 + 0j
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("denominator must be >= 1")
        arr = np.array(self.coeffs, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "scale", complex(self.scale))

    @classmethod
    def from_terms(cls, D: int, terms: Mapping[int, complex], truncation_order: int | None = None,
                   scale=1, min_exponent: int | None = None) -> "FracQSeries":
        keys = list(terms)
        lo = min(keys) if min_exponent is None and keys else (min_exponent or 0)
        hi = truncation_order if truncation_order is not None else (max(keys) if keys else lo)
        arr = np.zeros(max(hi - lo + 1, 0), dtype=complex)
        for e, c in terms.items():
            if lo <= e <= hi:
                arr[e - lo] += c
        return cls(D, lo, arr, scale)

    @property
    def truncation_order(self) -> int:
        return self.min_exponent + len(self.coeffs) - 1

    def coefficient(self, e: int) -> complex:
        i = e - self.min_exponent
        return complex(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0j

    def terms(self) -> dict[int, complex]:
        return {self.min_exponent + i: complex(c) for i, c in enumerate(self.coeffs) if c != 0}

    def leading(self) -> tuple[Fraction, complex] | None:
        o = qs_ord(self)
        if o == ZERO_SERIES:
            return None
        e = int(o * self.D)
        return o, self.coefficient(e)

    def rescale(self, D: int) -> "FracQSeries":
        """Same series written over denominator ``D`` (a multiple of ``self.D``)."""
        if D % self.D:
            raise ValueError(f"{D} is not a multiple of {self.D}")
        f = D // self.D
        arr = np.zeros((len(self.coeffs) - 1) * f + 1, dtype=complex)
        arr[::f] = self.coeffs
        return FracQSeries(D, self.min_exponent * f, arr, self.scale, self.tolerance)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return FracQSeries(self.D, self.min_exponent, self.coeffs * other, self.scale, self.tolerance)
        if not isinstance(other, FracQSeries):
            return NotImplemented
        D = math.lcm(self.D, other.D)
        a, b = self.rescale(D), other.rescale(D)
        # valid exponents: below both truncation edges shifted by the other's start
        hi = min(a.truncation_order + b.min_exponent, b.truncation_order + a.min_exponent)
        lo = a.min_exponent + b.min_exponent
        full = np.convolve(a.coeffs, b.coeffs)[: hi - lo + 1]
        return FracQSeries(D, lo, full, a.scale * b.scale, max(a.tolerance, b.tolerance))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "FracQSeries":
        if k < 0:
            raise ValueError("only nonnegative powers")
        if k == 0:
            width = self.truncation_order - self.min_exponent + 1
            one = np.zeros(max(width, 1), dtype=complex)
            one[0] = 1
            return FracQSeries(self.D, 0, one, 1, self.tolerance)
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def evaluate(self, tau: complex) -> complex:
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("Im(tau) must be positive")
        e = np.arange(self.min_exponent, self.truncation_order + 1)
        return complex(self.scale * np.sum(self.coeffs * np.exp(2j * np.pi * tau * e / self.D)))

    __call__ = evaluate

    def to_json(self) -> dict:
        out = {"kind": "fracqseries", "D": self.D,
               "terms": [{"e": e, "re": c.real, "im": c.imag} for e, c in sorted(self.terms().items())]}
        out["N"] = self.truncation_order
        if self.scale != 1:
            out["scale"] = [self.scale.real, self.scale.imag]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FracQSeries":
        if data.get("kind") != "fracqseries":
            raise ValueError("not a fracqseries document")
        terms = {int(t["e"]): complex(t["re"], t["im"]) for t in data["terms"]}
        scale = complex(*data["scale"]) if "scale" in data else 1
        return cls.from_terms(int(data["D"]), terms, data.get("N"), scale)


def qs_ord(a: FracQSeries, tolerance: float | None = None) -> Fraction | str:
    """Least exponent ``e/D`` with a coefficient above ``tol * max|c|``."""
    tol = a.tolerance if tolerance is None else tolerance
    mags = np.abs(a.coeffs)
    if mags.size == 0 or mags.max() == 0:
        return ZERO_SERIES
    idx = np.flatnonzero(mags > tol * mags.max())
    return Fraction(a.min_exponent + int(idx[0]), a.D)


def series_from_polynomial(D: int, coeffs: Iterable, min_exponent: int = 0, scale=1) -> FracQSeries:
    return FracQSeries(D, min_exponent, np.asarray(list(coeffs), dtype=complex), scale)
